//! Boundary of the numerical range by support functions.
//!
//! For each outward normal angle theta the largest eigenpair of
//! `H(e^{-i theta} A)` gives the support point `v* A v`. Between flat
//! facets the boundary is smooth and parametrized by theta itself, with
//! speed equal to the radius of curvature
//! `2 sum_k |v_k* H' v_1|^2 / (lambda_1 - lambda_k)`.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::boundary::{Curve, Label, Loop, Piece, SmoothCurve};
use crate::error::LinalgError;
use crate::matops::{self, golden_min, hermitian_eigen, hermitian_part, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Support {
    pub point: C64,
    /// Radius of curvature of the boundary at this normal angle.
    pub rho: f64,
    /// `lambda_1 - lambda_2` of the rotated Hermitian part.
    pub gap: f64,
}

pub(crate) fn support(a: &DMatrix<C64>, theta: f64) -> Result<Support, LinalgError> {
    let rot = matops::unit(-theta);
    let b = a * rot;
    let eig = hermitian_eigen(hermitian_part(&b))?;
    let n = eig.values.len();
    let v1 = eig.vectors.column(n - 1);
    let point = (v1.adjoint() * a * v1)[(0, 0)];
    let dh = hermitian_part(&(&b * C64::new(0.0, -1.0)));
    let dv = &dh * v1;
    let top = eig.values[n - 1];
    let mut rho = 0.0;
    for k in 0..n - 1 {
        let gap = top - eig.values[k];
        // Terms inside a numerically repeated top eigenvalue vanish exactly.
        if gap > 1e-12 * (1.0 + top.abs()) {
            rho += 2.0 * eig.vectors.column(k).dotc(&dv).norm_sqr() / gap;
        }
    }
    let gap = if n > 1 { top - eig.values[n - 2] } else { f64::INFINITY };
    Ok(Support { point, rho, gap })
}

/// Support function `max Re(e^{-i theta} z)` over `W(A)`.
pub(crate) fn support_value(a: &DMatrix<C64>, theta: f64) -> Result<f64, LinalgError> {
    matops::hermitian_lambda_max(hermitian_part(&(a * matops::unit(-theta))))
}

/// A smooth arc of `partial W(A)` between two normal angles, pushed out by
/// `margin` along the normal.
#[derive(Debug)]
pub(crate) struct SupportArc {
    a: DMatrix<C64>,
    theta0: f64,
    theta1: f64,
    margin: f64,
    /// Exact end points (facet end points) without margin.
    pins: Option<(C64, C64)>,
}

impl SupportArc {
    fn theta(&self, t: f64) -> f64 {
        self.theta0 + t * (self.theta1 - self.theta0)
    }
}

impl SmoothCurve for SupportArc {
    fn eval(&self, t: f64) -> (C64, C64) {
        let span = self.theta1 - self.theta0;
        let theta = self.theta(t);
        // Stay off the facet angles, where the top eigenvector is not unique.
        let guard = 1e-7 * span;
        let inner = if self.pins.is_some() {
            theta.clamp(self.theta0 + guard, self.theta1 - guard)
        } else {
            theta
        };
        let s = support(&self.a, inner).unwrap_or(Support {
            point: C64::new(f64::NAN, f64::NAN),
            rho: f64::NAN,
            gap: 0.0,
        });
        let point = match self.pins {
            Some((p0, _)) if t <= 0.0 => p0,
            Some((_, p1)) if t >= 1.0 => p1,
            _ => s.point,
        };
        let e = matops::unit(theta);
        (point + e * self.margin, matops::i_times(e) * ((s.rho + self.margin) * span))
    }

    fn closed(&self) -> bool {
        self.pins.is_none()
    }

    fn min_nodes(&self) -> usize {
        128
    }

    fn offset(&self, d: f64) -> Option<Arc<dyn SmoothCurve>> {
        Some(Arc::new(SupportArc {
            a: self.a.clone(),
            theta0: self.theta0,
            theta1: self.theta1,
            margin: self.margin + d,
            pins: self.pins,
        }))
    }
}

#[derive(Clone, Copy, Debug)]
struct Facet {
    theta: f64,
    start: C64,
    end: C64,
}

/// End points of the flat piece of `partial W(A)` with normal angle `theta`,
/// from the compression of `A` onto the top eigenspace.
fn facet_at(a: &DMatrix<C64>, theta: f64, scale: f64) -> Result<Facet, LinalgError> {
    let b = a * matops::unit(-theta);
    let eig = hermitian_eigen(hermitian_part(&b))?;
    let n = eig.values.len();
    let top = eig.values[n - 1];
    let k = eig.values.iter().filter(|&&v| v >= top - 1e-8 * scale).count().max(2);
    let v = eig.vectors.columns(n - k, k).into_owned();
    let compressed = v.adjoint() * &b * &v;
    // Im(e^{-i theta} z) runs along the facet in the direction of travel.
    let skew = hermitian_part(&(&compressed * C64::new(0.0, -1.0)));
    let se = hermitian_eigen(skew)?;
    let point = |col: usize| {
        let q = &v * se.vectors.column(col);
        (q.adjoint() * a * &q)[(0, 0)]
    };
    Ok(Facet {
        theta,
        start: point(0),
        end: point(k - 1),
    })
}

/// The boundary of `W(A)` (plus `margin`) as one counter-clockwise loop.
/// The flag is true when the numerical range has no interior.
pub(crate) fn numerical_range_loop(
    a: &ComplexMatrix,
    n_angles: usize,
    margin: f64,
) -> Result<(Loop, bool), LinalgError> {
    let m = a.as_dmatrix();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let step = TAU / n_angles as f64;
    // An irrational phase keeps symmetric facets off the grid.
    let phase = 0.381_966_011_250_105 * step;
    let thetas: Vec<f64> = (0..=n_angles).map(|k| phase + k as f64 * step).collect();
    let samples: Vec<Support> = thetas.par_iter().map(|&t| support(m, t)).collect::<Result<_, _>>()?;

    let mut facets: Vec<Facet> = Vec::new();
    if a.dim() > 1 {
        for k in 0..n_angles {
            let (s0, s1) = (&samples[k], &samples[k + 1]);
            let chord = (s1.point - s0.point).norm();
            let smooth = 3.0 * step * s0.rho.max(s1.rho);
            if chord <= smooth + 1e-9 * scale {
                continue;
            }
            let (theta, gap) = golden_min(
                |t| support(m, t).map(|s| s.gap),
                thetas[k],
                thetas[k + 1],
                1e-15,
            )?;
            let (theta, gap) = [(thetas[k], s0.gap), (thetas[k + 1], s1.gap), (theta, gap)]
                .into_iter()
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("nonempty");
            if gap >= 1e-10 * scale {
                continue;
            }
            let f = facet_at(m, theta, scale)?;
            let dup = facets.iter().any(|g| {
                let d = (g.theta - f.theta).rem_euclid(TAU);
                d.min(TAU - d) < 1e-9
            });
            if !dup {
                facets.push(f);
            }
        }
    }
    facets.sort_by(|x, y| x.theta.total_cmp(&y.theta));

    let tol = 1e-12 * scale;
    let mut pieces = Vec::new();
    if facets.is_empty() {
        let arc = SupportArc {
            a: m.clone(),
            theta0: phase,
            theta1: phase + TAU,
            margin,
            pins: None,
        };
        pieces.push(Piece::new(Curve::Custom(Arc::new(arc)), Label::Base));
    } else {
        let count = facets.len();
        for j in 0..count {
            let f = facets[j];
            let g = facets[(j + 1) % count];
            let theta_next = if j + 1 == count { g.theta + TAU } else { g.theta };
            let shift = matops::unit(f.theta) * margin;
            if (f.end - f.start).norm() > tol {
                pieces.push(Piece::new(
                    Curve::Segment {
                        a: f.start + shift,
                        b: f.end + shift,
                    },
                    Label::Base,
                ));
            }
            let arc = SupportArc {
                a: m.clone(),
                theta0: f.theta,
                theta1: theta_next,
                margin,
                pins: Some((f.end, g.start)),
            };
            let piece = Piece::new(Curve::Custom(Arc::new(arc)), Label::Base);
            if margin > 0.0 || piece.length() > 1e-10 * scale {
                pieces.push(piece);
            }
        }
    }
    let lp = Loop::new(pieces);
    let degenerate = margin == 0.0 && lp.signed_area().abs() <= 1e-10 * scale * scale;
    Ok((lp, degenerate))
}

/// Support points of `W(A)` at `count` equally spaced normal angles.
pub fn support_points(a: &ComplexMatrix, count: usize) -> Result<Vec<C64>, LinalgError> {
    (0..count)
        .into_par_iter()
        .map(|k| support(a.as_dmatrix(), TAU * k as f64 / count as f64).map(|s| s.point))
        .collect()
}

/// Bounding box `(re_min, re_max, im_min, im_max)` of `W(A)`.
pub fn bounding_box(a: &ComplexMatrix) -> Result<(f64, f64, f64, f64), LinalgError> {
    let m = a.as_dmatrix();
    Ok((
        -support_value(m, std::f64::consts::PI)?,
        support_value(m, 0.0)?,
        -support_value(m, -std::f64::consts::FRAC_PI_2)?,
        support_value(m, std::f64::consts::FRAC_PI_2)?,
    ))
}
