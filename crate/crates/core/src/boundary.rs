//! Oriented boundaries of regions in the complex plane and the quadrature
//! built on them.
//!
//! A boundary is a set of closed loops. Each loop is a chain of smooth
//! pieces (segments, circular arcs, or any [`SmoothCurve`]) so that corners
//! only ever occur at piece junctions. Discretization places Gauss-Lobatto
//! panels on each piece; a loop made of one closed smooth curve uses the
//! periodic trapezoid rule instead. Refinement doubles every panel.
//!
//! Outer loops run counter-clockwise and hole loops clockwise, so the region
//! is always on the left of the tangent.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LinalgError, PathError};
use crate::matops::{self, ComplexMatrix, C64};

/// Which part of the region boundary a node came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    /// Retained boundary of the base region.
    Base,
    /// Boundary added by a hole or clip.
    Cut,
}

/// A smooth parametrized curve on `t` in `[0, 1]`.
pub trait SmoothCurve: fmt::Debug + Send + Sync {
    /// Position and derivative with respect to `t`.
    fn eval(&self, t: f64) -> (C64, C64);

    /// True if `eval` is 1-periodic and the curve is closed and smooth.
    fn closed(&self) -> bool {
        false
    }

    /// Node count for the periodic rule at the coarsest level.
    fn min_nodes(&self) -> usize {
        64
    }

    /// The curve displaced by `d` along its right-hand normal `-i z'/|z'|`.
    fn offset(&self, _d: f64) -> Option<Arc<dyn SmoothCurve>> {
        None
    }
}

#[derive(Clone, Debug)]
pub enum Curve {
    Segment { a: C64, b: C64 },
    /// `center + radius e^{i(start + sweep t)}`; negative sweep runs clockwise.
    Arc {
        center: C64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
    Custom(Arc<dyn SmoothCurve>),
}

impl Curve {
    pub fn circle(center: C64, radius: f64, clockwise: bool) -> Self {
        Curve::Arc {
            center,
            radius,
            start: 0.0,
            sweep: if clockwise { -2.0 * PI } else { 2.0 * PI },
        }
    }

    pub fn eval(&self, t: f64) -> (C64, C64) {
        match self {
            Curve::Segment { a, b } => (a + (b - a) * t, b - a),
            Curve::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let e = matops::unit(start + sweep * t);
                (center + e * *radius, matops::i_times(e) * (radius * sweep))
            }
            Curve::Custom(c) => c.eval(t),
        }
    }

    pub fn closed(&self) -> bool {
        match self {
            Curve::Segment { .. } => false,
            Curve::Arc { sweep, .. } => (sweep.abs() - 2.0 * PI).abs() < 1e-12,
            Curve::Custom(c) => c.closed(),
        }
    }

    fn min_nodes(&self) -> usize {
        match self {
            Curve::Custom(c) => c.min_nodes(),
            _ => 64,
        }
    }

    /// Parallel curve at distance `d` to the right of the direction of travel.
    pub fn offset(&self, d: f64) -> Option<Curve> {
        match self {
            Curve::Segment { a, b } => {
                let n = -matops::i_times((b - a) / (b - a).norm());
                Some(Curve::Segment {
                    a: a + n * d,
                    b: b + n * d,
                })
            }
            Curve::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let r = if *sweep > 0.0 { radius + d } else { radius - d };
                (r > 0.0).then_some(Curve::Arc {
                    center: *center,
                    radius: r,
                    start: *start,
                    sweep: *sweep,
                })
            }
            Curve::Custom(c) => c.offset(d).map(Curve::Custom),
        }
    }
}

/// The part of a curve between parameters `t0` and `t1` (either order).
#[derive(Clone, Debug)]
pub struct Piece {
    pub curve: Curve,
    pub t0: f64,
    pub t1: f64,
    pub label: Label,
}

impl Piece {
    pub fn new(curve: Curve, label: Label) -> Self {
        Self {
            curve,
            t0: 0.0,
            t1: 1.0,
            label,
        }
    }

    /// Position and derivative at local parameter `u` in `[0, 1]`.
    pub fn eval(&self, u: f64) -> (C64, C64) {
        let (z, dz) = self.curve.eval(self.t0 + u * (self.t1 - self.t0));
        (z, dz * (self.t1 - self.t0))
    }

    pub fn start(&self) -> C64 {
        self.eval(0.0).0
    }

    pub fn end(&self) -> C64 {
        self.eval(1.0).0
    }

    pub fn sub(&self, u0: f64, u1: f64) -> Piece {
        let t = |u: f64| self.t0 + u * (self.t1 - self.t0);
        Piece {
            curve: self.curve.clone(),
            t0: t(u0),
            t1: t(u1),
            label: self.label,
        }
    }

    /// A piece is a whole loop on its own when it traverses a closed curve once.
    pub fn is_closed_loop(&self) -> bool {
        self.curve.closed() && ((self.t1 - self.t0).abs() - 1.0).abs() < 1e-14
    }

    /// Arc length on `[u0, u1]` by composite Gauss-Lobatto quadrature.
    pub fn length_between(&self, u0: f64, u1: f64, panels: usize) -> f64 {
        let rule = lobatto(LOBATTO_POINTS);
        let h = (u1 - u0) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let a = u0 + p as f64 * h;
            for (x, w) in rule.iter() {
                let u = a + 0.5 * h * (x + 1.0);
                total += 0.5 * h * w * self.eval(u).1.norm();
            }
        }
        total.abs()
    }

    pub fn length(&self) -> f64 {
        self.length_between(0.0, 1.0, 8)
    }
}

/// A closed chain of pieces, each starting where the previous one ends.
#[derive(Clone, Debug)]
pub struct Loop {
    pub pieces: Vec<Piece>,
}

impl Loop {
    pub fn new(pieces: Vec<Piece>) -> Self {
        Self { pieces }
    }

    pub fn is_periodic(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].is_closed_loop()
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    /// Largest gap between the end of one piece and the start of the next.
    pub fn closure_gap(&self) -> f64 {
        let n = self.pieces.len();
        (0..n)
            .map(|k| (self.pieces[k].end() - self.pieces[(k + 1) % n].start()).norm())
            .fold(0.0, f64::max)
    }

    pub fn corner_count(&self) -> usize {
        if self.is_periodic() {
            return 0;
        }
        let n = self.pieces.len();
        (0..n)
            .filter(|&k| {
                let out = self.pieces[k].eval(1.0).1;
                let inn = self.pieces[(k + 1) % n].eval(0.0).1;
                is_corner(out, inn)
            })
            .count()
    }

    /// Signed area by the shoelace formula on a dense sampling.
    pub fn signed_area(&self) -> f64 {
        let pts = self.sample(64);
        let n = pts.len();
        (0..n)
            .map(|k| {
                let a = pts[k];
                let b = pts[(k + 1) % n];
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
            / 2.0
    }

    /// Points along the loop, `per_piece` per piece, without repeating the
    /// closing point.
    pub fn sample(&self, per_piece: usize) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.pieces.len() * per_piece);
        for p in &self.pieces {
            for k in 0..per_piece {
                out.push(p.eval(k as f64 / per_piece as f64).0);
            }
        }
        out
    }

    pub fn reversed(&self) -> Loop {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| Piece {
                curve: p.curve.clone(),
                t0: p.t1,
                t1: p.t0,
                label: p.label,
            })
            .collect();
        Loop { pieces }
    }
}

fn is_corner(a: C64, b: C64) -> bool {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return false;
    }
    (a / na - b / nb).norm() > 1e-8
}

/// One quadrature node of a discretized boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub z: C64,
    /// Unit tangent in the direction of travel (one-sided at corners).
    pub tangent: C64,
    /// Arc-length weight.
    pub ds: f64,
    pub corner: bool,
    pub label: Label,
}

const LOBATTO_POINTS: usize = 8;
const BASE_PANELS: usize = 16;

/// A discretized multi-loop boundary.
#[derive(Clone, Debug)]
pub struct BoundaryPath {
    loops: Vec<Loop>,
    level: u32,
    nodes: Vec<Node>,
    offsets: Vec<usize>,
}

impl BoundaryPath {
    pub fn new(loops: Vec<Loop>) -> Result<Self, PathError> {
        Self::at_level(loops, 0)
    }

    pub fn at_level(loops: Vec<Loop>, level: u32) -> Result<Self, PathError> {
        let mut nodes = Vec::new();
        let mut offsets = vec![0];
        for (index, lp) in loops.iter().enumerate() {
            let before = nodes.len();
            if lp.is_periodic() {
                periodic_nodes(&lp.pieces[0], level, &mut nodes);
            } else {
                panel_nodes(lp, level, &mut nodes);
            }
            let count = nodes.len() - before;
            if count < 3 {
                return Err(PathError::TooFewNodes {
                    index,
                    nodes: count,
                });
            }
            offsets.push(nodes.len());
        }
        Ok(Self {
            loops,
            level,
            nodes,
            offsets,
        })
    }

    /// A single counter-clockwise circle.
    pub fn circle(center: C64, radius: f64) -> Self {
        Self::new(vec![Loop::new(vec![Piece::new(
            Curve::circle(center, radius, false),
            Label::Base,
        )])])
        .expect("circle discretizes")
    }

    /// Same geometry with every panel (or the periodic node count) doubled.
    pub fn refined(&self) -> Self {
        Self::at_level(self.loops.clone(), self.level + 1).expect("refinement adds nodes")
    }

    pub fn with_level(&self, level: u32) -> Self {
        Self::at_level(self.loops.clone(), level).expect("refinement adds nodes")
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn loop_count(&self) -> usize {
        self.loops.len()
    }

    pub fn loop_nodes(&self, k: usize) -> &[Node] {
        &self.nodes[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn perimeter(&self) -> f64 {
        self.nodes.iter().map(|n| n.ds).sum()
    }

    pub fn loop_length(&self, k: usize) -> f64 {
        self.loop_nodes(k).iter().map(|n| n.ds).sum()
    }

    /// Signed area enclosed by loop `k` (positive for counter-clockwise).
    pub fn loop_area(&self, k: usize) -> f64 {
        // Green: area = (1/2) closed integral of Im(conj(z) dz).
        self.loop_nodes(k)
            .iter()
            .map(|n| 0.5 * (n.z.conj() * n.tangent).im * n.ds)
            .sum()
    }

    /// Indices of loops running counter-clockwise.
    pub fn outer_loops(&self) -> Vec<usize> {
        (0..self.loop_count()).filter(|&k| self.loop_area(k) >= 0.0).collect()
    }

    pub fn corner_count(&self) -> usize {
        self.loops.iter().map(Loop::corner_count).sum()
    }

    /// Total winding number of all loops about `z`, from the node polylines.
    pub fn winding_number(&self, z: C64) -> i64 {
        let mut total = 0.0;
        for k in 0..self.loop_count() {
            total += polyline_winding(self.loop_nodes(k), z);
        }
        (total / (2.0 * PI)).round() as i64
    }

    pub fn contains(&self, z: C64) -> bool {
        self.winding_number(z) != 0
    }

    /// Distance from `z` to the nearest node.
    pub fn node_distance(&self, z: C64) -> f64 {
        self.nodes
            .iter()
            .map(|n| (n.z - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `z` to the node polyline.
    pub fn distance(&self, z: C64) -> f64 {
        let mut best = f64::INFINITY;
        for k in 0..self.loop_count() {
            let nodes = self.loop_nodes(k);
            let m = nodes.len();
            for i in 0..m {
                best = best.min(segment_distance(z, nodes[i].z, nodes[(i + 1) % m].z));
            }
        }
        best
    }

    /// Axis-aligned bounding box `(re_min, re_max, im_min, im_max)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for n in &self.nodes {
            b.0 = b.0.min(n.z.re);
            b.1 = b.1.max(n.z.re);
            b.2 = b.2.min(n.z.im);
            b.3 = b.3.max(n.z.im);
        }
        b
    }

    pub fn diameter(&self) -> f64 {
        let b = self.bounding_box();
        (b.1 - b.0).hypot(b.3 - b.2)
    }

    /// Writes the node table as CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "s,re_zeta,im_zeta,re_tangent,im_tangent,ds,corner")?;
        let mut s = 0.0;
        for n in &self.nodes {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                s,
                n.z.re,
                n.z.im,
                n.tangent.re,
                n.tangent.im,
                n.ds,
                u8::from(n.corner)
            )?;
            s += n.ds;
        }
        Ok(())
    }
}

fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

fn polyline_winding(nodes: &[Node], z: C64) -> f64 {
    let m = nodes.len();
    let mut total = 0.0;
    for i in 0..m {
        let a = nodes[i].z - z;
        let b = nodes[(i + 1) % m].z - z;
        if a.norm() == 0.0 || b.norm() == 0.0 {
            continue;
        }
        total += (b * a.conj()).arg();
    }
    total
}

fn periodic_nodes(piece: &Piece, level: u32, out: &mut Vec<Node>) {
    let n = piece.curve.min_nodes() << level;
    for k in 0..n {
        let u = k as f64 / n as f64;
        let (z, dz) = piece.eval(u);
        let speed = dz.norm();
        out.push(Node {
            z,
            tangent: dz / speed,
            ds: speed / n as f64,
            corner: false,
            label: piece.label,
        });
    }
}

/// Panel boundaries `(piece, u0, u1)` for a loop at level 0: about
/// `BASE_PANELS` panels in proportion to length, then graded so that
/// neighbouring panels differ in length by at most a factor two.
fn base_panels(lp: &Loop) -> Vec<(usize, f64, f64, f64)> {
    let lengths: Vec<f64> = lp.pieces.iter().map(Piece::length).collect();
    let total: f64 = lengths.iter().sum();
    let mut panels = Vec::new();
    for (k, p) in lp.pieces.iter().enumerate() {
        let count = ((BASE_PANELS as f64 * lengths[k] / total).ceil() as usize).max(1);
        for j in 0..count {
            let u0 = j as f64 / count as f64;
            let u1 = (j + 1) as f64 / count as f64;
            panels.push((k, u0, u1, p.length_between(u0, u1, 1)));
        }
    }
    for _ in 0..64 {
        let m = panels.len();
        let mut split = vec![false; m];
        for i in 0..m {
            let j = (i + 1) % m;
            if panels[i].3 > 2.0 * panels[j].3 {
                split[i] = true;
            }
            if panels[j].3 > 2.0 * panels[i].3 {
                split[j] = true;
            }
        }
        if !split.iter().any(|&s| s) {
            break;
        }
        let mut next = Vec::with_capacity(m * 2);
        for (i, &(k, u0, u1, len)) in panels.iter().enumerate() {
            if split[i] && len > 0.0 {
                let mid = 0.5 * (u0 + u1);
                let p = &lp.pieces[k];
                next.push((k, u0, mid, p.length_between(u0, mid, 1)));
                next.push((k, mid, u1, p.length_between(mid, u1, 1)));
            } else {
                next.push((k, u0, u1, len));
            }
        }
        panels = next;
    }
    panels
}

fn panel_nodes(lp: &Loop, level: u32, out: &mut Vec<Node>) {
    let rule = lobatto(LOBATTO_POINTS);
    let sub = 1usize << level;
    let mut raw: Vec<Node> = Vec::new();
    for (k, u0, u1, _) in base_panels(lp) {
        let piece = &lp.pieces[k];
        let h = (u1 - u0) / sub as f64;
        for s in 0..sub {
            let a = u0 + s as f64 * h;
            for (x, w) in rule.iter() {
                let u = a + 0.5 * h * (x + 1.0);
                let (z, dz) = piece.eval(u);
                let speed = dz.norm();
                let tangent = if speed > 0.0 {
                    dz / speed
                } else {
                    // Degenerate point: borrow the direction of a nearby interior point.
                    let (_, d2) = piece.eval(a + 0.5 * h * (rule[1].0 + 1.0));
                    d2 / d2.norm()
                };
                let node = Node {
                    z,
                    tangent,
                    ds: 0.5 * h * w * speed,
                    corner: false,
                    label: piece.label,
                };
                raw.push(node);
            }
        }
    }
    // Merge coincident panel endpoints; keep both copies at a corner so each
    // side carries its own tangent.
    let mut merged: Vec<Node> = Vec::with_capacity(raw.len());
    for node in raw {
        if let Some(last) = merged.last_mut() {
            if (last.z - node.z).norm() <= 1e-10 * (1.0 + node.z.norm()) {
                if is_corner(last.tangent, node.tangent) {
                    last.corner = true;
                    merged.push(Node {
                        corner: true,
                        ..node
                    });
                } else {
                    last.ds += node.ds;
                }
                continue;
            }
        }
        merged.push(node);
    }
    // Close the loop.
    if merged.len() > 1 {
        let first = merged[0];
        let last = merged[merged.len() - 1];
        if (last.z - first.z).norm() <= 1e-10 * (1.0 + first.z.norm()) {
            if is_corner(last.tangent, first.tangent) {
                merged[0].corner = true;
                let l = merged.len() - 1;
                merged[l].corner = true;
            } else {
                merged[0].ds += last.ds;
                merged.pop();
            }
        }
    }
    out.extend(merged.into_iter().filter(|n| n.ds > 0.0));
}

/// Gauss-Lobatto nodes and weights on `[-1, 1]`.
pub fn lobatto(q: usize) -> Vec<(f64, f64)> {
    assert!(q >= 2);
    let n = q - 1;
    let legendre = |x: f64| -> (f64, f64) {
        // P_n(x) and P_{n-1}(x).
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        (p1, p0)
    };
    let mut out = Vec::with_capacity(q);
    let w_end = 2.0 / (n * q) as f64;
    out.push((-1.0, w_end));
    for i in 1..n {
        // Chebyshev-Gauss-Lobatto initial guess, Newton on (1-x^2) P_n'(x).
        let mut x = -(PI * i as f64 / n as f64).cos();
        for _ in 0..100 {
            let (p, pm1) = legendre(x);
            // f = (1 - x^2) P_n' = n (P_{n-1} - x P_n); f' = -n (n+1) P_n.
            let f = n as f64 * (pm1 - x * p);
            let fp = -(n as f64) * (n as f64 + 1.0) * p;
            let dx = f / fp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, _) = legendre(x);
        out.push((x, 2.0 / ((n * q) as f64 * p * p)));
    }
    out.push((1.0, w_end));
    out
}

/// `mu(zeta, zeta', A) = H(-i zeta' R)/pi` with `R` the resolvent at `zeta`.
pub(crate) fn mu_matrix(r: &DMatrix<C64>, tangent: C64) -> DMatrix<C64> {
    let rotated = r * (-matops::i_times(tangent));
    matops::hermitian_part(&rotated) / C64::new(PI, 0.0)
}

/// Smallest eigenvalue of the double-layer kernel at a boundary point.
pub fn mu_min(a: &ComplexMatrix, zeta: C64, tangent: C64) -> Result<f64, LinalgError> {
    let r = matops::resolvent(a, zeta)?;
    matops::hermitian_lambda_min(mu_matrix(r.as_dmatrix(), tangent / tangent.norm()))
}

/// Kernel quantities at one boundary node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelSample {
    pub zeta: C64,
    pub tangent: C64,
    pub mu_lambda_min: f64,
    pub resolvent_norm: f64,
    /// Only filled in when traces ask for it; costs a numerical-radius solve.
    pub numerical_radius_resolvent: Option<f64>,
}

/// Per-node kernel matrices and samples on one discretization.
#[derive(Clone, Debug)]
pub struct KernelTable {
    pub mus: Vec<DMatrix<C64>>,
    pub samples: Vec<KernelSample>,
}

impl KernelTable {
    /// Evaluates the resolvent at every node in parallel. Results come back in
    /// node order, so any later reduction is independent of the thread count.
    pub fn build(a: &ComplexMatrix, path: &BoundaryPath, with_radius: bool) -> Result<Self, PathError> {
        let evals: Vec<(DMatrix<C64>, KernelSample)> = path
            .nodes()
            .par_iter()
            .map(|node| {
                let wrap = |source| PathError::NodeResolvent {
                    zeta: node.z,
                    source,
                };
                let r = matops::resolvent(a, node.z).map_err(wrap)?;
                let mu = mu_matrix(r.as_dmatrix(), node.tangent);
                let mu_lambda_min = matops::hermitian_lambda_min(mu.clone()).map_err(wrap)?;
                let resolvent_norm = matops::operator_norm(r.as_dmatrix()).map_err(wrap)?;
                let numerical_radius_resolvent = if with_radius {
                    Some(matops::numerical_radius(r.as_dmatrix()).map_err(wrap)?)
                } else {
                    None
                };
                Ok((
                    mu,
                    KernelSample {
                        zeta: node.z,
                        tangent: node.tangent,
                        mu_lambda_min,
                        resolvent_norm,
                        numerical_radius_resolvent,
                    },
                ))
            })
            .collect::<Result<_, PathError>>()?;
        let (mus, samples) = evals.into_iter().unzip();
        Ok(Self { mus, samples })
    }

    /// `sum_k f_k mu_k ds_k`.
    pub fn integrate(&self, path: &BoundaryPath, f: &[C64]) -> Result<DMatrix<C64>, PathError> {
        if f.len() != self.mus.len() {
            return Err(PathError::SampleMismatch {
                expected: self.mus.len(),
                found: f.len(),
            });
        }
        let n = self.mus.first().map_or(0, |m| m.nrows());
        let mut s = DMatrix::<C64>::zeros(n, n);
        for ((mu, node), fk) in self.mus.iter().zip(path.nodes()).zip(f) {
            s += mu * (fk * node.ds);
        }
        Ok(s)
    }

    /// `||S(1, A) - 2I||`.
    pub fn certificate(&self, path: &BoundaryPath) -> f64 {
        let ones = vec![C64::new(1.0, 0.0); self.mus.len()];
        let s = self.integrate(path, &ones).expect("lengths match");
        let n = s.nrows();
        let diff = s - DMatrix::<C64>::identity(n, n) * C64::new(2.0, 0.0);
        matops::operator_norm(&diff).unwrap_or(f64::INFINITY)
    }
}

/// Checks that every eigenvalue of `A` is strictly inside the region.
pub fn check_spectrum_inside(a: &ComplexMatrix, path: &BoundaryPath) -> Result<(), crate::Error> {
    let eig = matops::schur(a)?;
    let n = a.dim();
    for k in 0..n {
        let lambda = eig.t[(k, k)];
        let distance = path.distance(lambda);
        if path.winding_number(lambda) != 1 || distance <= 0.0 {
            return Err(PathError::SpectrumOutside { lambda, distance }.into());
        }
    }
    Ok(())
}

/// `int mu(zeta(s), A) ds` on the given discretization.
pub fn quadrature_s1(a: &ComplexMatrix, path: &BoundaryPath) -> Result<ComplexMatrix, crate::Error> {
    let ones = vec![C64::new(1.0, 0.0); path.nodes().len()];
    assemble_s(&ones, a, path)
}

/// `S(f, A) = int f(zeta(s)) mu(zeta(s), A) ds` for boundary samples of `f`.
pub fn assemble_s(f: &[C64], a: &ComplexMatrix, path: &BoundaryPath) -> Result<ComplexMatrix, crate::Error> {
    check_spectrum_inside(a, path)?;
    let table = KernelTable::build(a, path, false)?;
    Ok(ComplexMatrix::new(table.integrate(path, f)?)?)
}

/// A path refined until `||S(1,A) - 2I|| <= tol`, with its kernel table.
#[derive(Clone, Debug)]
pub struct Certified {
    pub path: BoundaryPath,
    pub table: KernelTable,
    pub certificate: f64,
}

/// Doubles the discretization until the quadrature certificate passes.
pub fn certify(
    a: &ComplexMatrix,
    path: &BoundaryPath,
    tol: f64,
    max_levels: u32,
    with_radius: bool,
) -> Result<Certified, crate::Error> {
    check_spectrum_inside(a, path)?;
    let mut current = path.clone();
    let mut refinements = 0;
    loop {
        let table = KernelTable::build(a, &current, false)?;
        let certificate = table.certificate(&current);
        if certificate <= tol {
            let table = if with_radius {
                KernelTable::build(a, &current, true)?
            } else {
                table
            };
            return Ok(Certified {
                path: current,
                table,
                certificate,
            });
        }
        if refinements >= max_levels {
            return Err(PathError::CertificateFailed {
                certificate,
                tol,
                levels: refinements,
            }
            .into());
        }
        current = current.refined();
        refinements += 1;
    }
}

/// `(1/pi) sum |Delta arg(zeta(s) - zeta0)|` over the node polylines.
/// When `zeta0` is a node, the jump of pi across it is excluded and the two
/// adjacent increments are measured from the one-sided tangents.
pub fn total_argument_variation(path: &BoundaryPath, zeta0: C64) -> Result<f64, PathError> {
    for k in 0..path.loop_count() {
        let m = path.loop_nodes(k).len();
        if m < 3 {
            return Err(PathError::TooFewNodes { index: k, nodes: m });
        }
    }
    Ok(argument_variation_unchecked(path, zeta0))
}

pub(crate) fn argument_variation_unchecked(path: &BoundaryPath, zeta0: C64) -> f64 {
    let tol = 1e-12 * (1.0 + zeta0.norm());
    let mut total = 0.0;
    for k in 0..path.loop_count() {
        let nodes = path.loop_nodes(k);
        let m = nodes.len();
        for i in 0..m {
            let (na, nb) = (&nodes[i], &nodes[(i + 1) % m]);
            let a = na.z - zeta0;
            let b = nb.z - zeta0;
            // At zeta0 itself the direction of zeta(s) - zeta0 is the one-sided
            // tangent, so the increment runs from (or to) that direction.
            let (a, b) = match (a.norm() <= tol, b.norm() <= tol) {
                (true, true) => continue,
                (true, false) => (na.tangent, b),
                (false, true) => (a, -nb.tangent),
                (false, false) => {
                    // A turning point of the argument between the nodes is
                    // located on the Hermite cubic through them.
                    let rate = |t: C64, d: C64| (t / d).im;
                    if rate(na.tangent, a) * rate(nb.tangent, b) < 0.0 {
                        let peak = turning_point(na, nb, zeta0);
                        total += (peak * a.conj()).arg().abs() + (b * peak.conj()).arg().abs();
                        continue;
                    }
                    (a, b)
                }
            };
            total += (b * a.conj()).arg().abs();
        }
    }
    total / PI
}

/// `zeta - zeta0` at the point between two nodes where the argument of
/// `zeta - zeta0` is stationary.
fn turning_point(na: &Node, nb: &Node, zeta0: C64) -> C64 {
    let chord = (nb.z - na.z).norm();
    let (ta, tb) = (na.tangent * chord, nb.tangent * chord);
    let point = |t: f64| {
        let (t2, t3) = (t * t, t * t * t);
        na.z * (2.0 * t3 - 3.0 * t2 + 1.0) + ta * (t3 - 2.0 * t2 + t) + nb.z * (-2.0 * t3 + 3.0 * t2) + tb * (t3 - t2)
    };
    let slope = |t: f64| {
        let t2 = t * t;
        na.z * (6.0 * t2 - 6.0 * t) + ta * (3.0 * t2 - 4.0 * t + 1.0) + nb.z * (-6.0 * t2 + 6.0 * t) + tb * (3.0 * t2 - 2.0 * t)
    };
    let rate = |t: f64| (slope(t) / (point(t) - zeta0)).im;
    let (mut lo, mut hi) = (0.0, 1.0);
    let lo_sign = rate(lo).signum();
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if rate(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    point(0.5 * (lo + hi)) - zeta0
}

/// `(1/2 pi i) int conj(f(zeta)) / (zeta - z) dzeta` for boundary samples of `f`.
pub fn cauchy_transform_conjugate(f: &[C64], path: &BoundaryPath, z: C64) -> Result<C64, PathError> {
    let nodes = path.nodes();
    if f.len() != nodes.len() {
        return Err(PathError::SampleMismatch {
            expected: nodes.len(),
            found: f.len(),
        });
    }
    if nodes.iter().any(|n| (n.z - z).norm() <= n.ds) {
        return Err(PathError::PointOnPath { z });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (node, fk) in nodes.iter().zip(f) {
        acc += fk.conj() * node.tangent * node.ds / (node.z - z);
    }
    Ok(acc / C64::new(0.0, 2.0 * PI))
}
