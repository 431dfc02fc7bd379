//! Dense complex linear algebra used by every other module.
//!
//! Everything here is a pure function of its inputs. Matrices are small
//! (n up to a few hundred), so full decompositions are used throughout.

use std::ops::{Deref, Index};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::LinalgError;

pub type C64 = Complex64;

const EPS: f64 = f64::EPSILON;
const MAX_ITER: usize = 10_000;
const I: C64 = C64::new(0.0, 1.0);

/// A square matrix with finite complex entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(data: DMatrix<C64>) -> Result<Self, LinalgError> {
        let (rows, cols) = data.shape();
        if rows != cols {
            return Err(LinalgError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(LinalgError::Empty);
        }
        for col in 0..cols {
            for row in 0..rows {
                let v = data[(row, col)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(LinalgError::NonFinite { row, col });
                }
            }
        }
        Ok(Self(data))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self, LinalgError> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    /// Row-major construction from nested slices.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self, LinalgError> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(LinalgError::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(LinalgError::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diag(values: &[C64]) -> Result<Self, LinalgError> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `(B + B*) / 2`, Hermitian by construction.
    pub fn hermitian_part(&self) -> DMatrix<C64> {
        hermitian_part(&self.0)
    }

    /// `A - z I`.
    pub fn shifted(&self, z: C64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= z;
        }
        Self(m)
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|v| v.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;
    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl TryFrom<DMatrix<C64>> for ComplexMatrix {
    type Error = LinalgError;
    fn try_from(m: DMatrix<C64>) -> Result<Self, LinalgError> {
        Self::new(m)
    }
}

pub(crate) fn hermitian_part(b: &DMatrix<C64>) -> DMatrix<C64> {
    let n = b.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(b[(i, i)].re, 0.0)
        } else {
            (b[(i, j)] + b[(j, i)].conj()) * 0.5
        }
    })
}

fn frob(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Extreme eigenpairs of the Hermitian part of a matrix.
#[derive(Clone, Debug)]
pub struct HermitianExtremes {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub v_min: DVector<C64>,
    pub v_max: DVector<C64>,
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

pub(crate) fn hermitian_eigen(h: DMatrix<C64>) -> Result<HermitianEigen, LinalgError> {
    let dim = h.nrows();
    let norm = frob(&h);
    let eig = SymmetricEigen::try_new(h, EPS, MAX_ITER).ok_or(LinalgError::NoConvergence {
        routine: "hermitian eigensolver",
        dim,
        norm,
    })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix (eigenvalues only).
pub(crate) fn hermitian_lambda_min(h: DMatrix<C64>) -> Result<f64, LinalgError> {
    extreme_eigenvalue(h, f64::min, f64::INFINITY)
}

/// Largest eigenvalue of a Hermitian matrix (eigenvalues only).
pub(crate) fn hermitian_lambda_max(h: DMatrix<C64>) -> Result<f64, LinalgError> {
    extreme_eigenvalue(h, f64::max, f64::NEG_INFINITY)
}

fn extreme_eigenvalue(h: DMatrix<C64>, pick: fn(f64, f64) -> f64, init: f64) -> Result<f64, LinalgError> {
    let dim = h.nrows();
    let v = h.symmetric_eigenvalues().iter().copied().fold(init, pick);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(LinalgError::NoConvergence {
            routine: "hermitian eigensolver",
            dim,
            norm: frob(&h),
        })
    }
}

/// Extreme eigenvalues and eigenvectors of `H(B) = (B + B*)/2`.
pub fn hermitian_part_extremes(b: &ComplexMatrix) -> Result<HermitianExtremes, LinalgError> {
    let eig = hermitian_eigen(b.hermitian_part())?;
    let n = eig.values.len();
    Ok(HermitianExtremes {
        lambda_min: eig.values[0],
        lambda_max: eig.values[n - 1],
        v_min: eig.vectors.column(0).into_owned(),
        v_max: eig.vectors.column(n - 1).into_owned(),
    })
}

fn svd(m: DMatrix<C64>, vectors: bool) -> Result<SVD<C64, nalgebra::Dyn, nalgebra::Dyn>, LinalgError> {
    let dim = m.nrows();
    let norm = frob(&m);
    SVD::try_new(m, vectors, vectors, EPS, MAX_ITER).ok_or(LinalgError::NoConvergence {
        routine: "svd",
        dim,
        norm,
    })
}

/// Singular values in descending order.
pub fn singular_values(b: &DMatrix<C64>) -> Result<Vec<f64>, LinalgError> {
    let s = svd(b.clone(), false)?;
    let mut v: Vec<f64> = s.singular_values.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// A singular triplet `(sigma, u, v)` with `B v = sigma u`.
#[derive(Clone, Debug)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub u: DVector<C64>,
    pub v: DVector<C64>,
}

/// Full SVD with triplets sorted by descending singular value.
pub fn singular_triplets(b: &DMatrix<C64>) -> Result<Vec<SingularTriplet>, LinalgError> {
    let s = svd(b.clone(), true)?;
    let u = s.u.as_ref().expect("requested");
    let vt = s.v_t.as_ref().expect("requested");
    let mut out: Vec<SingularTriplet> = (0..s.singular_values.len())
        .map(|k| SingularTriplet {
            sigma: s.singular_values[k],
            u: u.column(k).into_owned(),
            v: vt.row(k).adjoint(),
        })
        .collect();
    out.sort_by(|a, b| b.sigma.total_cmp(&a.sigma));
    Ok(out)
}

/// Spectral norm (largest singular value).
pub fn operator_norm(b: &DMatrix<C64>) -> Result<f64, LinalgError> {
    Ok(singular_values(b)?[0])
}

/// `(zeta I - A)^{-1}` by LU solve against the identity, with a residual
/// check `||(zeta I - A) R - I|| <= 1e-10 ||R|| ||zeta I - A||`.
pub fn resolvent(a: &ComplexMatrix, zeta: C64) -> Result<ComplexMatrix, LinalgError> {
    let n = a.dim();
    let shifted: DMatrix<C64> = DMatrix::identity(n, n) * zeta - a.as_dmatrix();
    let lu = shifted.clone().lu();
    let r = lu
        .solve(&DMatrix::identity(n, n))
        .ok_or(LinalgError::SingularShift {
            zeta,
            sigma_min: 0.0,
        })?;
    let r_norm = frob(&r);
    if !r_norm.is_finite() {
        return Err(LinalgError::SingularShift {
            zeta,
            sigma_min: 0.0,
        });
    }
    let residual = frob(&(&shifted * &r - DMatrix::<C64>::identity(n, n)));
    // Frobenius norms bound the 2-norms within a factor sqrt(n) each way.
    let nf = n as f64;
    let scale = (r_norm / nf.sqrt()) * (frob(&shifted) / nf.sqrt());
    if residual > 1e-10 * scale || residual > 1e-2 {
        return Err(LinalgError::SingularShift {
            zeta,
            sigma_min: nf.sqrt() / r_norm,
        });
    }
    Ok(ComplexMatrix(r))
}

/// `lambda_max(H(e^{i theta} B))`.
fn rotated_lambda_max(b: &DMatrix<C64>, theta: f64) -> Result<f64, LinalgError> {
    let rot = C64::from_polar(1.0, theta);
    hermitian_lambda_max(hermitian_part(&(b * rot)))
}

/// Numerical radius `w(B) = max_theta lambda_max(H(e^{i theta} B))`.
///
/// A 256-point uniform grid in theta locates the best three local maxima,
/// each refined by golden-section search on its bracketing grid cell pair.
pub fn numerical_radius(b: &DMatrix<C64>) -> Result<f64, LinalgError> {
    numerical_radius_with_grid(b, 256)
}

pub(crate) fn numerical_radius_with_grid(b: &DMatrix<C64>, grid: usize) -> Result<f64, LinalgError> {
    let h = std::f64::consts::TAU / grid as f64;
    let vals: Vec<f64> = (0..grid)
        .map(|k| rotated_lambda_max(b, k as f64 * h))
        .collect::<Result<_, _>>()?;
    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&k| {
            let prev = vals[(k + grid - 1) % grid];
            let next = vals[(k + 1) % grid];
            vals[k] >= prev && vals[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(3);
    let mut best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for k in peaks {
        let center = k as f64 * h;
        let v = golden_max(|t| rotated_lambda_max(b, t), center - h, center + h, 1e-13)?;
        best = best.max(v);
    }
    Ok(best.max(0.0))
}

/// Maximum of a unimodal function on `[lo, hi]` by golden-section search.
pub(crate) fn golden_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, LinalgError>
where
    F: FnMut(f64) -> Result<f64, LinalgError>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = f1.max(f2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

/// Minimizer of a unimodal function on `[lo, hi]`, returning `(argmin, min)`.
pub(crate) fn golden_min<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64), LinalgError>
where
    F: FnMut(f64) -> Result<f64, LinalgError>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 > f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

// Pade(13) scaling-and-squaring, Higham (2005) coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^{tA}` by scaling and squaring with a degree-13 Pade approximant.
pub fn matrix_exponential(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, LinalgError> {
    let n = a.dim();
    let x: DMatrix<C64> = a.as_dmatrix() * C64::new(t, 0.0);
    let norm = norm1(&x);
    if !norm.is_finite() {
        return Err(LinalgError::Overflow { norm });
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let x = x * C64::new(2f64.powi(-s), 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = &x6 * (&x6 * b(13) + &x4 * b(11) + &x2 * b(9))
        + &x6 * b(7)
        + &x4 * b(5)
        + &x2 * b(3)
        + &id * b(1);
    let u = &x * u_inner;
    let v = &x6 * (&x6 * b(12) + &x4 * b(10) + &x2 * b(8))
        + &x6 * b(6)
        + &x4 * b(4)
        + &x2 * b(2)
        + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(LinalgError::Overflow { norm })?;
    for _ in 0..s {
        r = &r * &r;
    }
    ComplexMatrix::new(r).map_err(|_| LinalgError::Overflow { norm })
}

/// `A^k` by repeated squaring.
pub fn matrix_power(a: &ComplexMatrix, k: u32) -> ComplexMatrix {
    let n = a.dim();
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut base = a.as_dmatrix().clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    ComplexMatrix(result)
}

/// Eigenvalues with right/left eigenvectors and condition numbers for the
/// simple ones.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// `1/|y* x|` for simple eigenvalues; `None` where clustered.
    pub condition_numbers: Vec<Option<f64>>,
    pub right: Vec<Option<DVector<C64>>>,
    pub left: Vec<Option<DVector<C64>>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Index of the eigenvalue closest to `z`.
    pub fn nearest(&self, z: C64) -> usize {
        (0..self.len())
            .min_by(|&a, &b| {
                (self.eigenvalues[a] - z)
                    .norm()
                    .total_cmp(&(self.eigenvalues[b] - z).norm())
            })
            .unwrap_or(0)
    }

    /// True when some eigenvalue is flagged defective or clustered.
    pub fn has_clusters(&self) -> bool {
        self.condition_numbers.iter().any(Option::is_none)
    }
}

/// Complex Schur form `A = Q T Q*` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct SchurForm {
    pub q: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

pub fn schur(a: &ComplexMatrix) -> Result<SchurForm, LinalgError> {
    let n = a.dim();
    let norm = a.frobenius_norm();
    let s = Schur::try_new(a.as_dmatrix().clone(), EPS, MAX_ITER).ok_or(LinalgError::NoConvergence {
        routine: "schur",
        dim: n,
        norm,
    })?;
    let (q, mut t) = s.unpack();
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(SchurForm { q, t })
}

/// Eigendecomposition via the complex Schur form. Eigenvalues closer than
/// `1e-8 ||A||` to another eigenvalue are flagged and get no eigenvectors.
pub fn eigen_decomposition(a: &ComplexMatrix) -> Result<Spectrum, LinalgError> {
    let n = a.dim();
    let SchurForm { q, t } = schur(a)?;
    let eigenvalues: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = operator_norm(a.as_dmatrix())?.max(f64::MIN_POSITIVE);
    let sep = 1e-8 * scale;
    let mut condition_numbers = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = eigenvalues[k];
        let clustered = (0..n).any(|j| j != k && (eigenvalues[j] - lambda).norm() < sep);
        if clustered {
            condition_numbers.push(None);
            right.push(None);
            left.push(None);
            continue;
        }
        // (T - lambda I) x = 0 with x_k = 1, x_j = 0 for j > k.
        let mut xt = DVector::<C64>::zeros(n);
        xt[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for l in j + 1..=k {
                acc += t[(j, l)] * xt[l];
            }
            xt[j] = -acc / (t[(j, j)] - lambda);
        }
        // y* (T - lambda I) = 0 with y_k = 1, y_j = 0 for j < k.
        let mut yt = DVector::<C64>::zeros(n);
        yt[k] = C64::new(1.0, 0.0);
        for j in k + 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for l in k..j {
                acc += t[(l, j)].conj() * yt[l];
            }
            yt[j] = -acc / (t[(j, j)] - lambda).conj();
        }
        let mut x = &q * xt;
        let mut y = &q * yt;
        let xn = x.norm();
        let yn = y.norm();
        if !(xn.is_finite() && yn.is_finite()) || xn == 0.0 || yn == 0.0 {
            condition_numbers.push(None);
            right.push(None);
            left.push(None);
            continue;
        }
        x /= C64::new(xn, 0.0);
        y /= C64::new(yn, 0.0);
        let overlap = y.dotc(&x).norm();
        condition_numbers.push(Some(1.0 / overlap.max(f64::MIN_POSITIVE)));
        right.push(Some(x));
        left.push(Some(y));
    }
    Ok(Spectrum {
        eigenvalues,
        condition_numbers,
        right,
        left,
    })
}

/// Smallest singular value of `z I - A` evaluated through the Schur form,
/// so each point costs triangular solves instead of a full SVD.
#[derive(Clone, Debug)]
pub struct ShiftedSchur {
    t: DMatrix<C64>,
    norm: f64,
}

impl ShiftedSchur {
    pub fn new(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        let SchurForm { t, .. } = schur(a)?;
        let norm = frob(&t);
        Ok(Self { t, norm })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }

    /// Solves `(zI - T) y = x` in place.
    fn solve_upper(&self, z: C64, x: &mut DVector<C64>) -> bool {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc += self.t[(i, j)] * x[j];
            }
            let d = z - self.t[(i, i)];
            if d.norm() == 0.0 {
                return false;
            }
            x[i] = acc / d;
        }
        true
    }

    /// Solves `(zI - T)* y = x` in place.
    fn solve_lower_adjoint(&self, z: C64, x: &mut DVector<C64>) -> bool {
        let n = self.dim();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc += self.t[(j, i)].conj() * x[j];
            }
            let d = (z - self.t[(i, i)]).conj();
            if d.norm() == 0.0 {
                return false;
            }
            x[i] = acc / d;
        }
        true
    }

    /// `sigma_min(zI - A)` by inverse iteration on `(zI-T)*(zI-T)`.
    /// `warm` carries the iterate between nearby calls.
    pub fn sigma_min(&self, z: C64, warm: &mut DVector<C64>) -> f64 {
        let n = self.dim();
        let generic = |i: usize| C64::new((0.7 + 1.3 * i as f64).sin(), (0.3 + 2.1 * i as f64).cos());
        if warm.len() != n || warm.norm() == 0.0 {
            *warm = DVector::from_fn(n, |i, _| generic(i));
        } else {
            // A warm start that is an exact singular vector of a structured
            // matrix would never leave its invariant subspace.
            let wn = warm.norm();
            for i in 0..n {
                warm[i] += generic(i) * (1e-3 * wn / (n as f64).sqrt());
            }
        }
        let wn = warm.norm();
        *warm /= C64::new(wn, 0.0);
        let mut estimate = f64::INFINITY;
        for _ in 0..60 {
            let mut y = warm.clone();
            if !self.solve_lower_adjoint(z, &mut y) {
                return 0.0;
            }
            if !self.solve_upper(z, &mut y) {
                return 0.0;
            }
            let ynorm = y.norm();
            if !ynorm.is_finite() || ynorm == 0.0 {
                return 0.0;
            }
            // Rayleigh quotient of the inverse Gram matrix.
            let rq = warm.dotc(&y).re;
            let next = if rq > 0.0 { 1.0 / rq.sqrt() } else { 1.0 / ynorm.sqrt() };
            *warm = y / C64::new(ynorm, 0.0);
            if (estimate - next).abs() <= 1e-12 * next.max(1e-300) {
                return next;
            }
            estimate = next;
        }
        // Slow convergence: fall back to a dense SVD.
        let n = self.dim();
        let m = DMatrix::<C64>::identity(n, n) * z - &self.t;
        singular_values(&m)
            .map(|s| s[n - 1])
            .unwrap_or(estimate)
    }

    /// `sigma_min(zI - A)` together with its gradient in `z`, returned as a
    /// complex number `g` with `d sigma = Re(conj(g) dz)`.
    pub fn sigma_min_gradient(&self, z: C64, warm: &mut DVector<C64>) -> (f64, C64) {
        let sigma = self.sigma_min(z, warm);
        if sigma == 0.0 {
            return (0.0, C64::new(0.0, 0.0));
        }
        // warm is the right singular vector v; u = (zI - T) v / sigma.
        let n = self.dim();
        let v = &*warm;
        let mut uv = C64::new(0.0, 0.0);
        for i in 0..n {
            let mut mv = z * v[i];
            for j in i..n {
                mv -= self.t[(i, j)] * v[j];
            }
            uv += mv.conj() * v[i];
        }
        (sigma, (uv / sigma).conj())
    }

    pub fn scale(&self) -> f64 {
        self.norm
    }
}

/// Smallest singular triplet of `z I - A` by dense SVD.
pub fn smallest_singular_triplet(a: &ComplexMatrix, z: C64) -> Result<SingularTriplet, LinalgError> {
    let m = a.shifted(z).into_dmatrix() * C64::new(-1.0, 0.0);
    let mut trip = singular_triplets(&m)?;
    Ok(trip.pop().expect("nonempty"))
}

pub(crate) fn unit(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub(crate) fn i_times(z: C64) -> C64 {
    I * z
}
