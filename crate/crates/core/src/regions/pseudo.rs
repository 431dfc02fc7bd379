//! Level sets `sigma_min(zI - A) = eps` by marching squares, polished onto
//! the level set and turned into trigonometric interpolants.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::boundary::{Curve, Label, Loop, Piece, SmoothCurve};
use crate::error::RegionError;
use crate::matops::{ShiftedSchur, C64};

/// Axis-aligned scan window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn point(&self, fx: f64, fy: f64) -> C64 {
        C64::new(
            self.re_min + fx * (self.re_max - self.re_min),
            self.im_min + fy * (self.im_max - self.im_min),
        )
    }
}

/// A closed curve `sum_k c_k e^{2 pi i k t}`, `k = -K..=K`.
#[derive(Clone, Debug)]
pub struct FourierLoop {
    coeffs: Vec<C64>,
}

impl FourierLoop {
    /// Trigonometric interpolant of equally spaced samples (odd count).
    pub fn interpolate(samples: &[C64]) -> Self {
        let n = samples.len();
        assert!(n % 2 == 1, "odd sample count");
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let half = n / 2;
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        for (k, c) in buf.into_iter().enumerate() {
            // Index k holds frequency k for k <= half, k - n above.
            let freq = if k <= half { k as isize } else { k as isize - n as isize };
            coeffs[(freq + half as isize) as usize] = c / n as f64;
        }
        Self { coeffs }
    }

    fn half(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// Largest coefficient magnitude in the upper half of the spectrum,
    /// relative to the largest non-constant coefficient.
    pub fn tail(&self) -> f64 {
        let h = self.half() as isize;
        let mag = |k: isize| self.coeffs[(k + h) as usize].norm();
        let head = (1..=h).map(|k| mag(k).max(mag(-k))).fold(0.0, f64::max);
        let tail = (h / 2..=h).map(|k| mag(k).max(mag(-k))).fold(0.0, f64::max);
        tail / head.max(f64::MIN_POSITIVE)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl SmoothCurve for FourierLoop {
    fn eval(&self, t: f64) -> (C64, C64) {
        let h = self.half() as isize;
        let w = C64::from_polar(1.0, TAU * t);
        let mut e = C64::from_polar(1.0, -TAU * t * h as f64);
        let mut z = C64::new(0.0, 0.0);
        let mut dz = C64::new(0.0, 0.0);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let k = idx as isize - h;
            let term = c * e;
            z += term;
            dz += term * C64::new(0.0, TAU * k as f64);
            e *= w;
        }
        (z, dz)
    }

    fn closed(&self) -> bool {
        true
    }

    fn min_nodes(&self) -> usize {
        self.coeffs.len().next_power_of_two().max(64)
    }
}

/// A level-set contour and its scan data.
#[derive(Clone, Debug)]
pub struct Contour {
    pub loops: Vec<Loop>,
    pub window: Window,
    pub grid: usize,
}

fn sigma_grid(schur: &ShiftedSchur, window: &Window, grid: usize) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let mut warm = DVector::zeros(0);
            let fy = j as f64 / (grid - 1) as f64;
            (0..grid)
                .map(|i| schur.sigma_min(window.point(i as f64 / (grid - 1) as f64, fy), &mut warm))
                .collect()
        })
        .collect();
    rows.concat()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum EdgeKey {
    /// Edge from (i, j) to (i+1, j).
    H(usize, usize),
    /// Edge from (i, j) to (i, j+1).
    V(usize, usize),
}

/// Marching squares on `f = sigma - eps` with the region `f < 0` kept on
/// the left of every segment. Returns closed polylines.
fn march(
    values: &[f64],
    grid: usize,
    eps: f64,
    window: &Window,
    center: impl Fn(C64) -> f64,
) -> Result<Vec<Vec<C64>>, RegionError> {
    let f = |i: usize, j: usize| values[j * grid + i] - eps;
    let pos = |i: usize, j: usize| window.point(i as f64 / (grid - 1) as f64, j as f64 / (grid - 1) as f64);
    let mut points: HashMap<EdgeKey, C64> = HashMap::new();
    let mut point_on = |key: EdgeKey| -> C64 {
        *points.entry(key).or_insert_with(|| {
            let (a, b) = match key {
                EdgeKey::H(i, j) => ((i, j), (i + 1, j)),
                EdgeKey::V(i, j) => ((i, j), (i, j + 1)),
            };
            let (fa, fb) = (f(a.0, a.1), f(b.0, b.1));
            let s = fa / (fa - fb);
            pos(a.0, a.1) + (pos(b.0, b.1) - pos(a.0, a.1)) * s
        })
    };
    let mut next: HashMap<EdgeKey, EdgeKey> = HashMap::new();
    let dx = (window.re_max - window.re_min) / (grid - 1) as f64;
    let dy = (window.im_max - window.im_min) / (grid - 1) as f64;
    for j in 0..grid - 1 {
        for i in 0..grid - 1 {
            // Corners counter-clockwise and the edges leaving each corner.
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let edges = [EdgeKey::H(i, j), EdgeKey::V(i + 1, j), EdgeKey::H(i, j + 1), EdgeKey::V(i, j)];
            let inside: Vec<bool> = corners.iter().map(|&(a, b)| f(a, b) < 0.0).collect();
            // Crossings in counter-clockwise order: (edge, leaving the inside?).
            let mut xs: Vec<(EdgeKey, bool)> = Vec::new();
            for k in 0..4 {
                let (a, b) = (inside[k], inside[(k + 1) % 4]);
                if a != b {
                    xs.push((edges[k], a));
                }
            }
            match xs.len() {
                0 => {}
                2 => {
                    let (from, to) = if xs[0].1 { (xs[0].0, xs[1].0) } else { (xs[1].0, xs[0].0) };
                    next.insert(from, to);
                }
                4 => {
                    // Saddle: resolve with the value at the cell centre.
                    let c = pos(i, j) + C64::new(0.5 * dx, 0.5 * dy);
                    let center_inside = center(c) < eps;
                    let outs: Vec<usize> = (0..4).filter(|&k| xs[k].1).collect();
                    for &k in &outs {
                        // Joining insides pairs each exit with the following
                        // entry; isolating them pairs it with the preceding one.
                        let partner = if center_inside { (k + 1) % 4 } else { (k + 3) % 4 };
                        next.insert(xs[k].0, xs[partner].0);
                    }
                }
                _ => unreachable!("crossing count is even"),
            }
        }
    }
    let mut loops = Vec::new();
    let mut keys: Vec<EdgeKey> = next.keys().copied().collect();
    keys.sort_by_key(|k| match *k {
        EdgeKey::H(i, j) => (j, i, 0),
        EdgeKey::V(i, j) => (j, i, 1),
    });
    let mut used: HashMap<EdgeKey, bool> = HashMap::new();
    for start in keys {
        if used.contains_key(&start) {
            continue;
        }
        let mut poly = Vec::new();
        let mut k = start;
        loop {
            used.insert(k, true);
            poly.push(point_on(k));
            k = *next
                .get(&k)
                .ok_or_else(|| RegionError::Stitch("open contour inside the scan window".into()))?;
            if k == start {
                break;
            }
        }
        loops.push(poly);
    }
    Ok(loops)
}

/// Moves `z` along the gradient of `sigma_min` onto the level `eps`.
fn project(schur: &ShiftedSchur, z: C64, eps: f64, warm: &mut DVector<C64>) -> C64 {
    let mut z = z;
    for _ in 0..30 {
        let (sigma, g) = schur.sigma_min_gradient(z, warm);
        let gn = g.norm_sqr();
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let step = g * ((sigma - eps) / gn);
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// `count` points equally spaced in arc length along a closed polyline.
fn resample_polyline(poly: &[C64], count: usize) -> Vec<C64> {
    let m = poly.len();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for k in 0..m {
        let d = (poly[(k + 1) % m] - poly[k]).norm();
        cum.push(cum[k] + d);
    }
    let total = cum[m];
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for s in 0..count {
        let target = total * s as f64 / count as f64;
        while seg + 1 < m && cum[seg + 1] < target {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let frac = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
        out.push(poly[seg] + (poly[(seg + 1) % m] - poly[seg]) * frac);
    }
    out
}

fn polish(schur: &ShiftedSchur, pts: &[C64], eps: f64) -> Vec<C64> {
    pts.par_chunks(64)
        .flat_map_iter(|chunk| {
            let mut warm = DVector::zeros(0);
            chunk.iter().map(|&z| project(schur, z, eps, &mut warm)).collect::<Vec<_>>()
        })
        .collect()
}

/// Smooth periodic interpolant of one polyline contour on the level set.
fn smooth_loop(schur: &ShiftedSchur, poly: &[C64], eps: f64) -> FourierLoop {
    let mut count = (poly.len().max(64) | 1).min(4097);
    let first = polish(schur, &resample_polyline(poly, count), eps);
    let mut curve = FourierLoop::interpolate(&first);
    for _ in 0..6 {
        // Re-sample the interpolant itself by arc length so the final
        // parametrization is smooth, then project back onto the level set.
        let dense: Vec<C64> = (0..4 * count).map(|k| curve.eval(k as f64 / (4 * count) as f64).0).collect();
        let pts = polish(schur, &resample_polyline(&dense, count), eps);
        let next = FourierLoop::interpolate(&pts);
        let converged = next.tail() < 1e-11;
        curve = next;
        if converged || count >= 4097 {
            break;
        }
        count = 2 * count + 1;
    }
    curve
}

/// The `eps`-level set of `sigma_min(zI - A)` inside `window`.
pub(crate) fn contour(schur: &ShiftedSchur, eps: f64, window: Window, grid: usize) -> Result<Contour, RegionError> {
    let values = sigma_grid(schur, &window, grid);
    let at = |i: usize, j: usize| values[j * grid + i];
    let faces: [(&'static str, &dyn Fn(usize) -> f64); 4] = [
        ("bottom", &|k| at(k, 0)),
        ("top", &|k| at(k, grid - 1)),
        ("left", &|k| at(0, k)),
        ("right", &|k| at(grid - 1, k)),
    ];
    for (face, value) in faces.iter() {
        if (0..grid).any(|k| value(k) <= eps) {
            return Err(RegionError::WindowTooSmall { face });
        }
    }
    let polys = march(&values, grid, eps, &window, |z| {
        let mut w = DVector::zeros(0);
        schur.sigma_min(z, &mut w)
    })?;
    if polys.is_empty() {
        return Err(RegionError::NoContour { eps });
    }
    let loops = polys
        .iter()
        .map(|p| {
            let curve = smooth_loop(schur, p, eps);
            Loop::new(vec![Piece::new(Curve::Custom(Arc::new(curve)), Label::Base)])
        })
        .collect();
    Ok(Contour { loops, window, grid })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_interpolant_reproduces_circle() {
        let n = 33;
        let pts: Vec<C64> = (0..n).map(|k| C64::from_polar(2.0, TAU * k as f64 / n as f64) + 1.0).collect();
        let f = FourierLoop::interpolate(&pts);
        let (z, dz) = f.eval(0.1);
        assert!((z - (C64::from_polar(2.0, TAU * 0.1) + 1.0)).norm() < 1e-13);
        assert!((dz.norm() - 2.0 * TAU).abs() < 1e-12);
        assert!(f.tail() < 1e-14);
    }
}
