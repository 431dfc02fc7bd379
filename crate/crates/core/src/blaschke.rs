//! Lower bounds on `K` from Blaschke products composed with a conformal map
//! of a simply connected region onto the unit disk.
//!
//! The map comes from the Kerzman-Stein integral equation for the Szego
//! kernel of the boundary. Its boundary values are unimodular by
//! construction; accuracy is measured by self-convergence under refinement
//! and by how close the Cauchy integral of the boundary values puts the
//! center to zero.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{self, BoundaryPath, Node};
use crate::error::{Error, LinalgError, MapError, RegionError};
use crate::io::complex_serde;
use crate::matops::{self, ComplexMatrix, ShiftedSchur, C64};
use crate::regions::{self, Region, RegionOptions, RegionSpec};

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);
/// Largest discretization used for the Szego kernel solve.
const MAX_MAP_NODES: usize = 2500;
const MAP_CHANGE_TOL: f64 = 1e-10;
const CENTER_RESIDUAL_TOL: f64 = 1e-6;
const MATRIX_CHANGE_TOL: f64 = 1e-9;

/// Conformal map of a region onto the unit disk, sampled on the boundary.
#[derive(Clone, Debug)]
pub struct ConformalMap {
    pub path: BoundaryPath,
    /// Unimodular image of every node of `path`.
    pub boundary_values: Vec<C64>,
    /// The point sent to 0.
    pub center: C64,
    /// Positive by construction.
    pub derivative_at_center: f64,
    /// `|phi(center)|` recomputed from the boundary values.
    pub center_residual: f64,
    /// Largest change in the boundary values under the last refinement.
    pub refinement_change: f64,
    /// Szego kernel `S(z_k, center)` at the nodes.
    density: Vec<C64>,
}

/// `T(z) / (2 pi i (z - w))`.
fn cauchy_kernel(w: C64, z: C64, tz: C64) -> C64 {
    tz / (TWO_PI_I * (z - w))
}

/// Kerzman-Stein kernel. It is continuous on a smooth curve and vanishes on
/// the diagonal.
fn ks_kernel(w: C64, tw: C64, z: C64, tz: C64) -> C64 {
    if (z - w).norm() <= 1e-13 * (1.0 + z.norm()) {
        return C64::new(0.0, 0.0);
    }
    cauchy_kernel(w, z, tz) - cauchy_kernel(z, w, tw).conj()
}

fn rhs_term(center: C64, w: C64, tw: C64) -> C64 {
    cauchy_kernel(center, w, tw).conj()
}

fn phi_from_density(s: C64, t: C64) -> C64 {
    let v = C64::new(0.0, -1.0) * t * s / s.conj();
    v / v.norm()
}

/// Solves `(I + B) x = b` by unrestarted GMRES; returns the relative residual.
fn gmres(b_mat: &DMatrix<C64>, rhs: &DVector<C64>, tol: f64, max_iter: usize) -> (DVector<C64>, f64) {
    let n = rhs.len();
    let beta = rhs.norm();
    if beta == 0.0 {
        return (DVector::zeros(n), 0.0);
    }
    let zero = C64::new(0.0, 0.0);
    let mut basis: Vec<DVector<C64>> = vec![rhs.unscale(beta)];
    let mut h: Vec<Vec<C64>> = Vec::new();
    let mut rot: Vec<(f64, C64)> = Vec::new();
    let mut g = vec![C64::new(beta, 0.0)];
    let mut residual = 1.0;
    for j in 0..max_iter.min(n) {
        let mut w = &basis[j] + b_mat * &basis[j];
        let mut col = vec![zero; j + 2];
        for (i, v) in basis.iter().enumerate() {
            col[i] = v.dotc(&w);
            w.axpy(-col[i], v, C64::new(1.0, 0.0));
        }
        let next = w.norm();
        col[j + 1] = C64::new(next, 0.0);
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (x, y) = (col[i], col[i + 1]);
            col[i] = x * c + s * y;
            col[i + 1] = -s.conj() * x + y * c;
        }
        let (a, b) = (col[j], col[j + 1]);
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if a.norm() == 0.0 {
            (0.0, C64::new(1.0, 0.0))
        } else {
            (a.norm() / r, (a / a.norm()) * b.conj() / r)
        };
        col[j] = c * a + s * b;
        col[j + 1] = zero;
        rot.push((c, s));
        let gj = g[j];
        g[j] = gj * c;
        g.push(-s.conj() * gj);
        h.push(col);
        residual = g[j + 1].norm() / beta;
        if residual <= tol || next <= 1e-300 {
            break;
        }
        basis.push(w.unscale(next));
    }
    let m = h.len();
    let mut y = vec![zero; m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for k in i + 1..m {
            acc -= h[k][i] * y[k];
        }
        y[i] = acc / h[i][i];
    }
    let mut x = DVector::zeros(n);
    for (yi, v) in y.iter().zip(&basis) {
        x.axpy(*yi, v, C64::new(1.0, 0.0));
    }
    (x, residual)
}

fn solve_density(nodes: &[Node], center: C64) -> Result<Vec<C64>, MapError> {
    let n = nodes.len();
    let sq: Vec<f64> = nodes.iter().map(|p| p.ds.sqrt()).collect();
    // Symmetric weighting makes the discrete kernel skew-Hermitian, so
    // the system matrix is normal with singular values >= 1.
    let columns: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| -ks_kernel(nodes[i].z, nodes[i].tangent, nodes[j].z, nodes[j].tangent) * (sq[i] * sq[j]))
                .collect()
        })
        .collect();
    let b = DMatrix::from_fn(n, n, |i, j| columns[j][i]);
    let rhs = DVector::from_fn(n, |i, _| rhs_term(center, nodes[i].z, nodes[i].tangent) * sq[i]);
    let (x, residual) = gmres(&b, &rhs, 1e-14, 400);
    if residual > 1e-10 {
        return Err(MapError::SolveStalled { residual });
    }
    Ok(x.iter().zip(&sq).map(|(x, s)| x / s).collect())
}

/// Nystrom interpolant of the density at a boundary point.
fn density_at(nodes: &[Node], density: &[C64], center: C64, w: C64, tw: C64) -> C64 {
    let mut s = rhs_term(center, w, tw);
    for (node, d) in nodes.iter().zip(density) {
        s += ks_kernel(w, tw, node.z, node.tangent) * d * node.ds;
    }
    s
}

/// `(1/2 pi i) int f(zeta) / (zeta - z) dzeta` from node samples.
fn cauchy_interior(nodes: &[Node], f: &[C64], z: C64) -> C64 {
    nodes
        .iter()
        .zip(f)
        .map(|(n, v)| v * n.tangent * n.ds / (n.z - z))
        .sum::<C64>()
        / TWO_PI_I
}

/// Builds the map of the region bounded by a single smooth loop onto the
/// unit disk with `phi(center) = 0` and `phi'(center) > 0`.
pub fn build_conformal_map(path: &BoundaryPath, center: C64) -> Result<ConformalMap, Error> {
    if path.loop_count() != 1 {
        return Err(RegionError::NotSimplyConnected {
            loops: path.loop_count(),
        }
        .into());
    }
    let corners = path.corner_count();
    if corners > 0 {
        return Err(MapError::Corners { corners }.into());
    }
    if path.winding_number(center) != 1 || path.distance(center) <= 0.0 {
        return Err(MapError::CenterOutside { center }.into());
    }

    let mut current = path.clone();
    let mut density = solve_density(current.nodes(), center)?;
    let mut change = f64::INFINITY;
    for _ in 0..6 {
        let fine = current.refined();
        if fine.nodes().len() > MAX_MAP_NODES {
            break;
        }
        let fine_density = solve_density(fine.nodes(), center)?;
        change = current
            .nodes()
            .iter()
            .zip(&density)
            .map(|(n, d)| {
                let coarse = phi_from_density(*d, n.tangent);
                let s = density_at(fine.nodes(), &fine_density, center, n.z, n.tangent);
                (coarse - phi_from_density(s, n.tangent)).norm()
            })
            .fold(0.0, f64::max);
        current = fine;
        density = fine_density;
        if change <= MAP_CHANGE_TOL {
            break;
        }
    }

    let nodes = current.nodes();
    let boundary_values: Vec<C64> = nodes
        .iter()
        .zip(&density)
        .map(|(n, d)| phi_from_density(*d, n.tangent))
        .collect();
    let m = boundary_values.len();
    for i in 0..m {
        let step = (boundary_values[(i + 1) % m] / boundary_values[i]).arg();
        if step <= 0.0 {
            return Err(MapError::NotMonotone { node: i }.into());
        }
    }
    let center_residual = cauchy_interior(nodes, &boundary_values, center).norm();
    if center_residual > CENTER_RESIDUAL_TOL {
        return Err(MapError::CenterResidual {
            residual: center_residual,
        }
        .into());
    }
    let derivative_at_center = 2.0 * PI * cauchy_interior(nodes, &density, center).re;
    Ok(ConformalMap {
        path: current,
        boundary_values,
        center,
        derivative_at_center,
        center_residual,
        refinement_change: change,
        density,
    })
}

impl ConformalMap {
    /// `phi` at a boundary point with unit tangent `t`.
    pub fn eval_boundary(&self, z: C64, t: C64) -> C64 {
        let s = density_at(self.path.nodes(), &self.density, self.center, z, t);
        phi_from_density(s, t)
    }

    /// `phi` at an interior point by the Cauchy formula. Loses accuracy
    /// within a few node spacings of the boundary.
    pub fn eval_interior(&self, z: C64) -> C64 {
        cauchy_interior(self.path.nodes(), &self.boundary_values, z)
    }
}

fn cauchy_matrix(map: &ConformalMap, a: &ComplexMatrix, path: &BoundaryPath) -> Result<DMatrix<C64>, Error> {
    let n = a.dim();
    let partials: Vec<DMatrix<C64>> = path
        .nodes()
        .par_chunks(64)
        .map(|chunk| {
            let mut acc = DMatrix::<C64>::zeros(n, n);
            for node in chunk {
                let phi = map.eval_boundary(node.z, node.tangent);
                let r = matops::resolvent(a, node.z)?;
                acc += r.as_dmatrix() * (phi * node.tangent * node.ds / TWO_PI_I);
            }
            Ok(acc)
        })
        .collect::<Result<_, LinalgError>>()?;
    Ok(partials.into_iter().fold(DMatrix::zeros(n, n), |s, p| s + p))
}

/// `phi(A)` by the Cauchy integral on one given discretization of the
/// map's boundary curve, without refinement.
pub fn map_matrix_on(map: &ConformalMap, a: &ComplexMatrix, path: &BoundaryPath) -> Result<ComplexMatrix, Error> {
    boundary::check_spectrum_inside(a, path)?;
    Ok(ComplexMatrix::new(cauchy_matrix(map, a, path)?)?)
}

/// `phi(A)` by the Cauchy integral, on the certified discretization and
/// refined until it stops changing.
pub fn map_matrix(map: &ConformalMap, a: &ComplexMatrix) -> Result<ComplexMatrix, Error> {
    let cert = boundary::certify(a, &map.path, 1e-6, 6, false)?;
    let mut level = cert.path.level().max(map.path.level());
    let mut current = cauchy_matrix(map, a, &map.path.with_level(level))?;
    let mut change = f64::INFINITY;
    for _ in 0..4 {
        level += 1;
        let next = cauchy_matrix(map, a, &map.path.with_level(level))?;
        change = (&next - &current).norm() / next.norm().max(f64::MIN_POSITIVE);
        current = next;
        if change <= MATRIX_CHANGE_TOL {
            return Ok(ComplexMatrix::new(current)?);
        }
    }
    Err(MapError::NotConverged { change }.into())
}

/// `prod_j (z - alpha_j) / (1 - conj(alpha_j) z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlaschkeProduct {
    #[serde(with = "complex_serde::vec")]
    roots: Vec<C64>,
}

impl BlaschkeProduct {
    pub fn new(roots: Vec<C64>) -> Result<Self, MapError> {
        for (index, r) in roots.iter().enumerate() {
            if r.norm() > 1.0 + 1e-12 {
                return Err(MapError::RootOutsideDisk {
                    index,
                    modulus: r.norm(),
                });
            }
        }
        Ok(Self { roots })
    }

    /// Roots `tanh(rho_j) e^{i psi_j}` from `[rho_0, psi_0, rho_1, ...]`.
    pub fn from_params(params: &[f64]) -> Self {
        let roots = params
            .chunks_exact(2)
            .map(|p| matops::unit(p[1]) * p[0].tanh())
            .collect();
        Self { roots }
    }

    pub fn params(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| [r.norm().min(0.999).atanh(), r.arg()])
            .collect()
    }

    pub fn roots(&self) -> &[C64] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.roots
            .iter()
            .map(|a| (z - a) / (C64::new(1.0, 0.0) - a.conj() * z))
            .product()
    }
}

/// `prod_j (M - alpha_j I)(I - conj(alpha_j) M)^{-1}`, factors applied in
/// root order.
pub fn blaschke_matrix(b: &BlaschkeProduct, m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = m.dim();
    let eye = DMatrix::<C64>::identity(n, n);
    let mut product = eye.clone();
    for (index, alpha) in b.roots.iter().enumerate() {
        let f = m.as_dmatrix() - &eye * *alpha;
        let g = &eye - m.as_dmatrix() * alpha.conj();
        let lu = g.lu();
        let u = lu.u();
        let diag = u.diagonal();
        let largest = diag.iter().map(|d| d.norm()).fold(0.0, f64::max);
        let smallest = diag.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
        if smallest <= 1e-14 * largest.max(1.0) {
            return Err(LinalgError::SingularFactor { index });
        }
        let x = lu.solve(&f).ok_or(LinalgError::SingularFactor { index })?;
        product *= x;
    }
    ComplexMatrix::new(product)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundOptions {
    /// Defaults to `min(n - 1, 8)`.
    pub degree: Option<usize>,
    pub starts: usize,
    pub seed: u64,
    pub max_iters: u64,
    /// Defaults to the eigenvalue centroid when it is well inside.
    #[serde(skip)]
    pub center: Option<C64>,
}

impl Default for LowerBoundOptions {
    fn default() -> Self {
        Self {
            degree: None,
            starts: 20,
            seed: 0,
            max_iters: 2000,
            center: None,
        }
    }
}

/// Outcome of one optimizer start.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartTrace {
    pub start: usize,
    pub iterations: u64,
    pub initial: f64,
    pub best: f64,
    pub improved: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBound {
    /// `max ||B(phi(A))||` over the starts; a valid lower bound on `K`
    /// whatever the optimizer did.
    pub k_lower: f64,
    #[serde(with = "complex_serde::vec")]
    pub roots: Vec<C64>,
    pub degree: usize,
    #[serde(with = "complex_serde")]
    pub center: C64,
    /// Outward offset used to round corners, if there were any.
    pub smoothing: Option<f64>,
    pub map_nodes: usize,
    pub trace: Vec<StartTrace>,
}

/// Standard Nelder-Mead minimization from an initial simplex. Returns the
/// best vertex, its value and the iteration count.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, mut simplex: Vec<Vec<f64>>, max_iters: u64, tol: f64) -> (Vec<f64>, f64, u64) {
    let dim = simplex.len() - 1;
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut iterations = 0;
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    while iterations < max_iters {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let spread = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt();
        if spread <= tol {
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; dim];
        for x in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected = lerp(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = lerp(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
        } else if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
        } else {
            let (contracted, fc) = if fr < values[dim] {
                let c = lerp(&centroid, &worst, -0.5);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = lerp(&centroid, &worst, 0.5);
                let fc = f(&c);
                (c, fc)
            };
            if fc < values[dim].min(fr) {
                simplex[dim] = contracted;
                values[dim] = fc;
            } else {
                for k in 1..=dim {
                    simplex[k] = lerp(&simplex[0], &simplex[k], 0.5);
                    values[k] = f(&simplex[k]);
                }
            }
        }
    }
    let best = (0..=dim).fold(0, |b, k| if values[k] < values[b] { k } else { b });
    (simplex[best].clone(), values[best], iterations)
}

fn norm_at(m: &ComplexMatrix, params: &[f64]) -> f64 {
    blaschke_matrix(&BlaschkeProduct::from_params(params), m)
        .ok()
        .and_then(|b| matops::operator_norm(b.as_dmatrix()).ok())
        .unwrap_or(0.0)
}

fn choose_center(path: &BoundaryPath, eigenvalues: &[C64]) -> C64 {
    let centroid = eigenvalues.iter().sum::<C64>() / eigenvalues.len() as f64;
    let clearance = |z: C64| if path.winding_number(z) == 1 { path.distance(z) } else { -1.0 };
    if clearance(centroid) >= 1e-2 * path.diameter() {
        return centroid;
    }
    std::iter::once(centroid)
        .chain(eigenvalues.iter().copied())
        .fold((centroid, f64::NEG_INFINITY), |best, z| {
            let c = clearance(z);
            if c > best.1 {
                (z, c)
            } else {
                best
            }
        })
        .0
}

fn run_start(m: &ComplexMatrix, x0: Vec<f64>, start: usize, max_iters: u64) -> (StartTrace, Vec<f64>) {
    let initial = norm_at(m, &x0);
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut v = x0.clone();
        v[i] += 0.25;
        simplex.push(v);
    }
    let (params, _, iterations) = nelder_mead(|p| -norm_at(m, p), simplex, max_iters, 1e-12);
    let best = norm_at(m, &params);
    let (params, best) = if best >= initial {
        (params, best)
    } else {
        (BlaschkeProduct::from_params(&params).params(), initial)
    };
    (
        StartTrace {
            start,
            iterations,
            initial,
            best,
            improved: best > initial + 1e-12,
        },
        params,
    )
}

/// Multi-start maximization of `||B(phi(A))||` over Blaschke products of
/// the given degree, on a region bounded by one loop.
pub fn lower_bound_on_path(a: &ComplexMatrix, path: &BoundaryPath, opts: &LowerBoundOptions) -> Result<LowerBound, Error> {
    if path.loop_count() != 1 {
        return Err(RegionError::NotSimplyConnected {
            loops: path.loop_count(),
        }
        .into());
    }
    let (path, smoothing) = if path.corner_count() > 0 {
        let delta = 1e-3 * path.diameter();
        (regions::smooth_corners(path, delta)?, Some(delta))
    } else {
        (path.clone(), None)
    };
    let eigenvalues = ShiftedSchur::new(a)?.eigenvalues();
    let center = opts.center.unwrap_or_else(|| choose_center(&path, &eigenvalues));
    let map = build_conformal_map(&path, center)?;
    let m = map_matrix(&map, a)?;
    let n = a.dim();
    let degree = opts.degree.unwrap_or(n.saturating_sub(1).min(8));

    let images: Vec<C64> = eigenvalues
        .iter()
        .map(|&l| {
            let w = map.eval_interior(l);
            if w.norm() > 0.95 {
                w * (0.95 / w.norm())
            } else {
                w
            }
        })
        .collect();
    let results: Vec<(StartTrace, Vec<f64>)> = (0..opts.starts.max(1))
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(start as u64);
            let roots: Vec<C64> = (0..degree)
                .map(|j| {
                    if start == 0 && j < images.len() {
                        images[j]
                    } else {
                        let r = 0.9 * rng.random::<f64>().sqrt();
                        matops::unit(rng.random::<f64>() * 2.0 * PI) * r
                    }
                })
                .collect();
            let x0 = BlaschkeProduct { roots }.params();
            run_start(&m, x0, start, opts.max_iters)
        })
        .collect();

    // First maximum in start order.
    let mut best_index = 0;
    for (k, (t, _)) in results.iter().enumerate() {
        if t.best > results[best_index].0.best {
            best_index = k;
        }
    }
    let roots = BlaschkeProduct::from_params(&results[best_index].1).roots;
    Ok(LowerBound {
        k_lower: results[best_index].0.best,
        roots,
        degree,
        center,
        smoothing,
        map_nodes: map.path.nodes().len(),
        trace: results.into_iter().map(|(t, _)| t).collect(),
    })
}

/// Lower bound for a region that is already built.
pub fn lower_bound_for_region(a: &ComplexMatrix, region: &Region, opts: &LowerBoundOptions) -> Result<LowerBound, Error> {
    lower_bound_on_path(a, &region.path, opts)
}

/// Builds the region from `spec` and optimizes on it.
pub fn optimize_lower_bound(
    a: &ComplexMatrix,
    spec: &RegionSpec,
    region_opts: &RegionOptions,
    opts: &LowerBoundOptions,
) -> Result<LowerBound, Error> {
    let region = regions::build_region(a, spec, region_opts)?;
    lower_bound_for_region(a, &region, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gmres_solves_small_system() {
        let b = DMatrix::from_fn(5, 5, |i, j| C64::new(0.0, (i as f64 - j as f64) * 0.1) + if i == j { C64::new(0.2, 0.0) } else { C64::new(0.0, 0.0) });
        let x_true = DVector::from_fn(5, |i, _| C64::new(i as f64, 1.0));
        let rhs = &x_true + &b * &x_true;
        let (x, res) = gmres(&b, &rhs, 1e-14, 10);
        assert!(res < 1e-13);
        assert!((x - x_true).norm() < 1e-12);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let simplex = vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![0.0, 0.5]];
        let (x, v, _) = nelder_mead(f, simplex, 5000, 1e-20);
        assert!(v < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn params_round_trip() {
        let b = BlaschkeProduct::new(vec![C64::new(0.3, -0.2), C64::new(-0.5, 0.1)]).unwrap();
        let again = BlaschkeProduct::from_params(&b.params());
        for (x, y) in b.roots().iter().zip(again.roots()) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
