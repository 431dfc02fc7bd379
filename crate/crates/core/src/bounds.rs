//! Spectral-set constants: the double-layer bound `c2 + sqrt(c2^2 + c1)`,
//! the Cauchy resolvent integral, and closed forms.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{self, BoundaryPath, Certified, KernelSample, KernelTable, Label};
use crate::error::{Error, PathError};
use crate::io::complex_serde;
use crate::matops::{ComplexMatrix, C64};
use crate::regions::{self, BaseSpec, Disk, Region, RegionOptions, RegionSpec};

/// `c2 + sqrt(c2^2 + c1)`.
pub fn k_from_c(c1: f64, c2: f64) -> f64 {
    c2 + (c2 * c2 + c1).sqrt()
}

/// Bound for a convex set with `m` disks removed, where disk `j` has weight
/// 1 (norm-rule radius) or 2 (numerical-radius rule).
pub fn k_multidisk_closedform(weights: &[u32]) -> f64 {
    let m = weights.len() as f64;
    let p: f64 = 1.0 + weights.iter().map(|&w| w as f64).sum::<f64>();
    p + (p * p + 2.0 * m + 1.0).sqrt()
}

/// `L / (2 pi eps)` for an `eps`-pseudospectrum boundary of length `L`.
pub fn k_pseudo_closedform(path: &BoundaryPath, eps: f64) -> f64 {
    path.perimeter() / (2.0 * PI * eps)
}

/// Candidate base points for the argument-variation scan.
const C1_CANDIDATES: usize = 2000;

/// Largest total argument variation over base points on the path, with the
/// point where it is attained. Corners are always scanned; elsewhere a
/// stride of nodes is scanned, then the neighbourhood of the winner on the
/// once-refined path.
pub fn c1_upper(path: &BoundaryPath) -> Result<(f64, C64), PathError> {
    let nodes = path.nodes();
    for k in 0..path.loop_count() {
        let m = path.loop_nodes(k).len();
        if m < 3 {
            return Err(PathError::TooFewNodes { index: k, nodes: m });
        }
    }
    let stride = nodes.len().div_ceil(C1_CANDIDATES).max(1);
    let candidates: Vec<C64> = nodes
        .iter()
        .enumerate()
        .filter(|(i, n)| i % stride == 0 || n.corner)
        .map(|(_, n)| n.z)
        .collect();
    let (mut best, mut at) = scan(path, &candidates);

    // Arc length spanned by the scan stride around the winner.
    let w = nodes.iter().position(|n| n.z == at).unwrap_or(0);
    let lo = w.saturating_sub(stride);
    let hi = (w + stride + 1).min(nodes.len());
    let reach = nodes[lo..hi].iter().map(|n| n.ds).sum::<f64>();
    let fine = path.refined();
    let local: Vec<C64> = fine
        .nodes()
        .iter()
        .filter(|n| (n.z - at).norm() <= reach)
        .map(|n| n.z)
        .collect();
    let (v, z) = scan(&fine, &local);
    if v > best {
        best = v;
        at = z;
    }
    Ok((best, at))
}

fn scan(path: &BoundaryPath, points: &[C64]) -> (f64, C64) {
    let values: Vec<f64> = points
        .par_iter()
        .map(|&z| boundary::argument_variation_unchecked(path, z))
        .collect();
    // First maximum in node order, so the winner does not depend on threads.
    values
        .iter()
        .zip(points)
        .fold((f64::NEG_INFINITY, C64::new(0.0, 0.0)), |acc, (&v, &z)| {
            if v > acc.0 {
                (v, z)
            } else {
                acc
            }
        })
}

/// `gamma(s) = max(0, -lambda_min(mu))` per node. On original boundary
/// pieces a negative value at roundoff level relative to `||R|| / pi` is
/// treated as zero.
pub fn gamma_values(path: &BoundaryPath, table: &KernelTable) -> Vec<f64> {
    path.nodes()
        .iter()
        .zip(&table.samples)
        .map(|(node, s)| {
            let mu = s.mu_lambda_min;
            if node.label == Label::Base && mu > -1e-9 * s.resolvent_norm / PI {
                0.0
            } else {
                (-mu).max(0.0)
            }
        })
        .collect()
}

/// `c2 <= 1 + int gamma ds` from a kernel table; returns `(c2, int gamma ds)`.
pub fn c2_from_table(path: &BoundaryPath, table: &KernelTable) -> (f64, f64) {
    let integral: f64 = gamma_values(path, table)
        .iter()
        .zip(path.nodes())
        .map(|(g, n)| g * n.ds)
        .sum();
    (1.0 + integral, integral)
}

/// `(1/2 pi) int ||R(zeta)|| ds` from a kernel table.
pub fn k_cauchy_from_table(path: &BoundaryPath, table: &KernelTable) -> f64 {
    let total: f64 = table
        .samples
        .iter()
        .zip(path.nodes())
        .map(|(s, n)| s.resolvent_norm * n.ds)
        .sum();
    total / (2.0 * PI)
}

/// Quadrature settings shared by the bound computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundOptions {
    /// Tolerance on `||S(1, A) - 2I||`.
    pub quadrature_tol: f64,
    pub max_refinements: u32,
    /// Relative change in `c2` and the Cauchy integral between successive
    /// refinements at which the integrals count as converged. Their
    /// integrands have kinks, so the identity certificate alone does not
    /// control them.
    pub integral_tol: f64,
    pub max_integral_refinements: u32,
    /// Also record `w(R)` at every node of the traces.
    pub trace_numerical_radius: bool,
    pub region: RegionOptions,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            quadrature_tol: 1e-6,
            max_refinements: 6,
            integral_tol: 1e-7,
            max_integral_refinements: 4,
            trace_numerical_radius: false,
            region: RegionOptions::default(),
        }
    }
}

/// A certified discretization refined further until `c2` and the Cauchy
/// integral settle. The last relative change is returned alongside.
pub fn converged(a: &ComplexMatrix, path: &BoundaryPath, opts: &BoundOptions) -> Result<(Certified, f64), Error> {
    let mut cert = boundary::certify(a, path, opts.quadrature_tol, opts.max_refinements, false)?;
    let values = |c: &Certified| (c2_from_table(&c.path, &c.table).0, k_cauchy_from_table(&c.path, &c.table));
    let mut prev = values(&cert);
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_integral_refinements {
        let path = cert.path.refined();
        let table = KernelTable::build(a, &path, false)?;
        let certificate = table.certificate(&path);
        cert = Certified {
            path,
            table,
            certificate,
        };
        let next = values(&cert);
        change = ((next.0 - prev.0).abs() / next.0).max((next.1 - prev.1).abs() / next.1);
        prev = next;
        if change <= opts.integral_tol {
            break;
        }
    }
    if opts.trace_numerical_radius {
        cert.table = KernelTable::build(a, &cert.path, true)?;
    }
    Ok((cert, change))
}

/// `c2` and `int gamma ds` on a path.
pub fn c2_upper(a: &ComplexMatrix, path: &BoundaryPath, opts: &BoundOptions) -> Result<(f64, f64), Error> {
    let (cert, _) = converged(a, path, opts)?;
    Ok(c2_from_table(&cert.path, &cert.table))
}

/// The Cauchy integral bound.
pub fn k_cauchy(a: &ComplexMatrix, path: &BoundaryPath, opts: &BoundOptions) -> Result<f64, Error> {
    let (cert, _) = converged(a, path, opts)?;
    Ok(k_cauchy_from_table(&cert.path, &cert.table))
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub c1: f64,
    pub c2: f64,
    #[serde(rename = "K_main")]
    pub k_main: f64,
    #[serde(rename = "K_cauchy")]
    pub k_cauchy: f64,
    #[serde(rename = "K_closedform", skip_serializing_if = "Option::is_none")]
    pub k_closedform: Option<f64>,
    #[serde(rename = "K_pseudo", skip_serializing_if = "Option::is_none")]
    pub k_pseudo: Option<f64>,
    #[serde(rename = "K_lower", skip_serializing_if = "Option::is_none")]
    pub k_lower: Option<f64>,
    pub gamma_integral: f64,
    #[serde(with = "complex_serde")]
    pub argmax_zeta0: C64,
    pub quadrature_certificate: f64,
    /// Relative change of `c2` and `K_cauchy` under the last refinement.
    pub integral_change: f64,
    pub components: usize,
    pub nodes: usize,
    pub refinement_level: u32,
    pub perimeter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_applied: Option<f64>,
    pub degenerate: bool,
    pub disks: Vec<Disk>,
    #[serde(skip)]
    pub traces: Vec<KernelSample>,
    #[serde(skip)]
    pub path: BoundaryPath,
}

impl BoundReport {
    /// Which upper bound is smaller, for comparison tables.
    pub fn winner(&self) -> &'static str {
        if self.k_main <= self.k_cauchy {
            "main"
        } else {
            "cauchy"
        }
    }
}

/// Bounds for a region that is already built.
pub fn report_for_region(a: &ComplexMatrix, spec: &RegionSpec, region: &Region, opts: &BoundOptions) -> Result<BoundReport, Error> {
    let (cert, integral_change) = converged(a, &region.path, opts)?;
    let (c2, gamma_integral) = c2_from_table(&cert.path, &cert.table);
    let (c1, argmax_zeta0) = c1_upper(&cert.path)?;
    let k_cauchy = k_cauchy_from_table(&cert.path, &cert.table);
    let convex_base = matches!(spec.base, BaseSpec::NumericalRange | BaseSpec::ConvexHullMargin { .. });
    let k_closedform = match spec.rule_weights() {
        Some(w) if convex_base && spec.clips.is_empty() => Some(k_multidisk_closedform(&w)),
        _ => None,
    };
    let k_pseudo = match spec.base {
        BaseSpec::Pseudospectrum { eps } if spec.holes.is_empty() && spec.clips.is_empty() => {
            Some(k_pseudo_closedform(&cert.path, eps))
        }
        _ => None,
    };
    Ok(BoundReport {
        c1,
        c2,
        k_main: k_from_c(c1, c2),
        k_cauchy,
        k_closedform,
        k_pseudo,
        k_lower: None,
        gamma_integral,
        argmax_zeta0,
        quadrature_certificate: cert.certificate,
        integral_change,
        components: region.components,
        nodes: cert.path.nodes().len(),
        refinement_level: cert.path.level(),
        perimeter: cert.path.perimeter(),
        margin_applied: region.margin_applied,
        degenerate: region.degenerate,
        disks: region.disks.clone(),
        traces: cert.table.samples,
        path: cert.path,
    })
}

/// Builds the region and computes every applicable bound on one certified
/// discretization.
pub fn full_report(a: &ComplexMatrix, spec: &RegionSpec, opts: &BoundOptions) -> Result<BoundReport, Error> {
    let region = regions::build_region(a, spec, &opts.region)?;
    report_for_region(a, spec, &region, opts)
}
