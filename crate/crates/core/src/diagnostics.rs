//! Rank-one structure of the resolvent near ill-conditioned eigenvalues.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::LinalgError;
use crate::io::complex_serde;
use crate::matops::{self, ComplexMatrix, C64};
use crate::regions::Window;

/// `x y*` written as `Q (B (+) 0) Q*` with `B` two by two.
#[derive(Clone, Debug)]
pub struct RankOneReduction {
    pub two_by_two: ComplexMatrix,
    /// `[[y*x / 2, 1], [0, y*x / 2]]`.
    pub model: ComplexMatrix,
    /// Spectral norm of `two_by_two - model`.
    pub e_norm: f64,
    pub q: DMatrix<C64>,
    /// Largest entry of `Q* x y* Q` outside the leading block.
    pub trailing: f64,
}

fn normalized(v: DVector<C64>) -> DVector<C64> {
    let n = v.norm();
    v.unscale(n)
}

/// Builds `Q` from `x - (y*x/2) y`, `y - (x*y/2) x` and an orthonormal
/// completion.
pub fn rank_one_reduction(x: &DVector<C64>, y: &DVector<C64>) -> Result<RankOneReduction, LinalgError> {
    let n = x.len();
    if y.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: y.len() });
    }
    if n < 2 {
        return Err(LinalgError::DimensionMismatch { expected: 2, found: n });
    }
    for v in [x, y] {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(LinalgError::NotUnit { norm });
        }
    }
    let yx = y.dotc(x);
    if yx.norm() > 1.0 - 1e-8 {
        return Err(LinalgError::ParallelVectors { overlap: yx.norm() });
    }
    let half = yx * 0.5;
    let q1 = normalized(x - y * half);
    let q2t = normalized(y - x * half.conj());
    let q2 = normalized(&q2t - &q1 * q1.dotc(&q2t));

    let mut cols = vec![q1, q2];
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = DVector::<C64>::zeros(n);
        e[k] = C64::new(1.0, 0.0);
        // Two passes of Gram-Schmidt keep the completion orthonormal.
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&e);
                e -= c * proj;
            }
        }
        if e.norm() > 1e-8 {
            cols.push(normalized(e));
        }
    }
    let q = DMatrix::from_columns(&cols);
    let full = q.adjoint() * (x * y.adjoint()) * &q;
    let two = full.view((0, 0), (2, 2)).into_owned();
    let mut trailing = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i >= 2 || j >= 2 {
                trailing = trailing.max(full[(i, j)].norm());
            }
        }
    }
    let model = DMatrix::from_row_slice(2, 2, &[half, C64::new(1.0, 0.0), C64::new(0.0, 0.0), half]);
    let e_norm = matops::operator_norm(&(&two - &model))?;
    Ok(RankOneReduction {
        two_by_two: ComplexMatrix::new(two)?,
        model: ComplexMatrix::new(model)?,
        e_norm,
        q,
        trailing,
    })
}

/// Grids of `sigma_2 / sigma_1` and `|u_1* v_1|` for the resolvent.
/// Row `j` of each map is `Im z = im_min + j * dy`; masked points are `None`.
#[derive(Clone, Debug, Serialize)]
pub struct RankOneDiagnostics {
    pub window: Window,
    pub resolution: usize,
    pub ratio_map: Vec<Option<f64>>,
    pub overlap_map: Vec<Option<f64>>,
    pub masked: usize,
    #[serde(with = "complex_serde::vec")]
    pub eigenvalues: Vec<C64>,
}

impl RankOneDiagnostics {
    pub fn point(&self, i: usize, j: usize) -> C64 {
        let r = (self.resolution - 1).max(1) as f64;
        self.window.point(i as f64 / r, j as f64 / r)
    }

    /// Writes a map as CSV rows of `re,im,value`; masked values are empty.
    pub fn write_csv<W: std::io::Write>(&self, map: &[Option<f64>], mut out: W) -> std::io::Result<()> {
        writeln!(out, "re_zeta,im_zeta,value")?;
        for j in 0..self.resolution {
            for i in 0..self.resolution {
                let z = self.point(i, j);
                match map[j * self.resolution + i] {
                    Some(v) => writeln!(out, "{:.16e},{:.16e},{:.16e}", z.re, z.im, v)?,
                    None => writeln!(out, "{:.16e},{:.16e},", z.re, z.im)?,
                }
            }
        }
        Ok(())
    }
}

/// Points where `zeta I - A` is singular to working precision are masked.
pub fn rank_one_maps(a: &ComplexMatrix, window: Window, resolution: usize) -> Result<RankOneDiagnostics, LinalgError> {
    let res = resolution.max(2);
    let n = a.dim();
    let scale = matops::operator_norm(a.as_dmatrix())?.max(1.0);
    let rows: Vec<Vec<(Option<f64>, Option<f64>)>> = (0..res)
        .into_par_iter()
        .map(|j| {
            (0..res)
                .map(|i| {
                    let z = window.point(i as f64 / (res - 1) as f64, j as f64 / (res - 1) as f64);
                    let m = a.shifted(z).into_dmatrix() * C64::new(-1.0, 0.0);
                    let trip = matops::singular_triplets(&m).ok()?;
                    let smallest = &trip[n - 1];
                    if smallest.sigma <= 1e3 * f64::EPSILON * n as f64 * scale {
                        return None;
                    }
                    let ratio = if n > 1 { smallest.sigma / trip[n - 2].sigma } else { 0.0 };
                    // Top singular pair of the resolvent is (v_n, u_n).
                    let overlap = smallest.u.dotc(&smallest.v).norm().min(1.0);
                    Some((Some(ratio.min(1.0)), Some(overlap)))
                })
                .map(|p| p.unwrap_or((None, None)))
                .collect()
        })
        .collect();
    let cells: Vec<(Option<f64>, Option<f64>)> = rows.concat();
    let masked = cells.iter().filter(|c| c.0.is_none()).count();
    Ok(RankOneDiagnostics {
        window,
        resolution: res,
        ratio_map: cells.iter().map(|c| c.0).collect(),
        overlap_map: cells.iter().map(|c| c.1).collect(),
        masked,
        eigenvalues: matops::schur(a)?.t.diagonal().iter().copied().collect(),
    })
}

/// Hypothesis and conclusion of the singular-subspace perturbation bound for
/// `lambda I - A` perturbed to `zeta I - A`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StewartBounds {
    pub gamma: f64,
    pub delta: f64,
    pub ratio_ok: bool,
    /// `2 gamma / delta`, when `gamma / delta < 1/2`.
    pub pq_norm_bound: Option<f64>,
    /// Bound on the overlap of the perturbed singular vectors, using
    /// `||p||, ||q|| <= 2 gamma / delta` each.
    pub overlap_bound: Option<f64>,
    /// `|y* x|` for the null vectors of `lambda I - A`.
    pub overlap_xy: f64,
    /// `sigma_{n-1}(lambda I - A)`.
    pub sigma_second: f64,
}

struct NullPair {
    x: DVector<C64>,
    y: DVector<C64>,
    x2: DMatrix<C64>,
    y2: DMatrix<C64>,
    sigma_second: f64,
}

fn null_pair(a: &ComplexMatrix, lambda: C64) -> Result<NullPair, LinalgError> {
    let n = a.dim();
    if n < 2 {
        return Err(LinalgError::DimensionMismatch { expected: 2, found: n });
    }
    let m = a.shifted(lambda).into_dmatrix() * C64::new(-1.0, 0.0);
    let trip = matops::singular_triplets(&m)?;
    let scale = trip[0].sigma.max(1.0);
    let sigma_min = trip[n - 1].sigma;
    if sigma_min > 1e-8 * scale {
        return Err(LinalgError::NotAnEigenvalue { lambda, sigma_min });
    }
    let sigma_second = trip[n - 2].sigma;
    if sigma_second <= 1e-8 * scale {
        return Err(LinalgError::Defective { lambda });
    }
    let rest = &trip[..n - 1];
    Ok(NullPair {
        x: trip[n - 1].v.clone(),
        y: trip[n - 1].u.clone(),
        x2: DMatrix::from_columns(&rest.iter().map(|t| t.v.clone()).collect::<Vec<_>>()),
        y2: DMatrix::from_columns(&rest.iter().map(|t| t.u.clone()).collect::<Vec<_>>()),
        sigma_second,
    })
}

pub fn stewart_singular_subspace_bound(a: &ComplexMatrix, lambda: C64, zeta: C64) -> Result<StewartBounds, LinalgError> {
    let NullPair {
        x,
        y,
        x2,
        y2,
        sigma_second,
    } = null_pair(a, lambda)?;
    let d = zeta - lambda;
    let top = y2.adjoint() * &x * d;
    let bottom = x2.adjoint() * &y * d.conj();
    let gamma = (top.norm_squared() + bottom.norm_squared()).sqrt();
    let overlap_xy = y.dotc(&x).norm();
    let cross = matops::operator_norm(&(y2.adjoint() * &x2))?;
    let delta = sigma_second - d.norm() * (overlap_xy + cross);
    let ratio_ok = delta > 0.0 && gamma / delta < 0.5;
    let pq_norm_bound = ratio_ok.then(|| 2.0 * gamma / delta);
    let overlap_bound = pq_norm_bound.map(|b| (overlap_xy + 2.0 * b + b * b) / (1.0 - b * b));
    Ok(StewartBounds {
        gamma,
        delta,
        ratio_ok,
        pq_norm_bound,
        overlap_bound,
        overlap_xy,
        sigma_second,
    })
}

/// Deviation of `sigma_min(zeta I - A)` from `rho |y* x|` on the circle
/// `|zeta - lambda| = rho`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DriftRow {
    pub radius: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftTable {
    pub overlap_xy: f64,
    pub rows: Vec<DriftRow>,
    /// Least-squares slope of `log residual` against `log radius`, when
    /// every residual is positive.
    pub slope: Option<f64>,
}

const DRIFT_DIRECTIONS: usize = 16;

pub fn smallest_singular_value_drift(a: &ComplexMatrix, lambda: C64, radii: &[f64]) -> Result<DriftTable, LinalgError> {
    let pair = null_pair(a, lambda)?;
    let overlap_xy = pair.y.dotc(&pair.x).norm();
    let mut rows = Vec::with_capacity(radii.len());
    for &rho in radii {
        let mut residual = 0.0f64;
        for k in 0..DRIFT_DIRECTIONS {
            let zeta = lambda + matops::unit(std::f64::consts::TAU * k as f64 / DRIFT_DIRECTIONS as f64) * rho;
            let m = a.shifted(zeta).into_dmatrix();
            let s = matops::singular_values(&m)?;
            residual = residual.max((s[s.len() - 1] - rho * overlap_xy).abs());
        }
        rows.push(DriftRow { radius: rho, residual });
    }
    let slope = if rows.len() >= 2 && rows.iter().all(|r| r.residual > 0.0 && r.radius > 0.0) {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.radius.ln(), r.residual.ln())).collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    } else {
        None
    };
    Ok(DriftTable {
        overlap_xy,
        rows,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::rank_one_pair;

    #[test]
    fn orthogonal_pair_reduces_to_nilpotent_block() {
        let (x, y) = rank_one_pair(4, 0.0);
        let r = rank_one_reduction(&x, &y).unwrap();
        assert!(r.e_norm <= 1e-12);
        assert!(r.trailing <= 1e-12);
        let qq = r.q.adjoint() * &r.q;
        assert!((qq - DMatrix::<C64>::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn parallel_pair_is_rejected() {
        let (x, _) = rank_one_pair(3, 0.0);
        assert!(matches!(
            rank_one_reduction(&x, &x),
            Err(LinalgError::ParallelVectors { .. })
        ));
    }
}
