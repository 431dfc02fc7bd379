//! Regions containing the spectrum: the numerical range, the numerical range
//! with disks removed or clipped by half-planes and disks, pseudospectra,
//! explicit polygons and disks.

mod cut;
mod numrange;
mod pseudo;

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryPath, Curve, Label, Loop, Piece};
use crate::error::{Error, LinalgError, ParseError, RegionError};
use crate::io::{complex_serde, parse_complex};
use crate::matops::{self, ComplexMatrix, ShiftedSchur, C64};

pub use cut::Cutter;
pub use pseudo::{Contour, FourierLoop, Window};

pub use numrange::{bounding_box as numerical_range_bbox, support_points};

/// How a hole radius is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusRule {
    /// `1 / ||(A - xi I)^{-1}||`.
    Norm,
    /// `1 / w((A - xi I)^{-1})`.
    Numrad,
}

impl RadiusRule {
    /// Weight of the rule in the multi-disk closed form.
    pub fn weight(self) -> u32 {
        match self {
            RadiusRule::Norm => 1,
            RadiusRule::Numrad => 2,
        }
    }
}

/// Radius of a hole: by rule or explicit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HoleRadius {
    Rule(RadiusRule),
    Explicit(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleSpec {
    #[serde(with = "complex_serde")]
    pub center: C64,
    pub radius: HoleRadius,
}

fn default_normal() -> C64 {
    C64::new(1.0, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClipSpec {
    /// `Re(conj(normal) z) <= offset`.
    HalfPlane {
        #[serde(with = "complex_serde", default = "default_normal")]
        normal: C64,
        #[serde(default)]
        offset: f64,
    },
    Disk {
        #[serde(with = "complex_serde")]
        center: C64,
        radius: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpec {
    NumericalRange,
    ConvexHullMargin {
        margin: f64,
    },
    Pseudospectrum {
        eps: f64,
    },
    ExplicitPolygon {
        #[serde(with = "complex_serde::vec")]
        vertices: Vec<C64>,
    },
    Disk {
        #[serde(with = "complex_serde")]
        center: C64,
        radius: f64,
    },
}

/// Declarative description of a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub base: BaseSpec,
    #[serde(default)]
    pub holes: Vec<HoleSpec>,
    #[serde(default)]
    pub clips: Vec<ClipSpec>,
}

impl RegionSpec {
    pub fn new(base: BaseSpec) -> Self {
        Self {
            base,
            holes: Vec::new(),
            clips: Vec::new(),
        }
    }

    pub fn numerical_range() -> Self {
        Self::new(BaseSpec::NumericalRange)
    }

    pub fn pseudospectrum(eps: f64) -> Self {
        Self::new(BaseSpec::Pseudospectrum { eps })
    }

    pub fn with_hole(mut self, center: C64, radius: HoleRadius) -> Self {
        self.holes.push(HoleSpec { center, radius });
        self
    }

    pub fn with_clip(mut self, clip: ClipSpec) -> Self {
        self.clips.push(clip);
        self
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let spec: RegionSpec = serde_json::from_str(text).map_err(|e| ParseError::Region(e.to_string()))?;
        spec.validate().map_err(|e| ParseError::Region(e.to_string()))?;
        Ok(spec)
    }

    /// Parses the short flag forms:
    ///
    /// * `numerical_range`
    /// * `margin:<m>`
    /// * `pseudospectrum:<eps>`
    /// * `disk:<center>:<radius>`
    /// * `polygon:<z1>;<z2>;...`
    /// * `wminus:disk@<center>:<norm|numrad|r>[,disk@...]`
    /// * `whalf[:<c>]` for `W(A)` intersected with `Re z <= c`
    /// * `wdisk[:<r>]` for `W(A)` intersected with `|z| <= r`
    pub fn from_flag(flag: &str) -> Result<Self, ParseError> {
        let err = |msg: &str| ParseError::Region(format!("{msg} in {flag:?}"));
        let num = |s: &str| -> Result<f64, ParseError> {
            let z = parse_complex(s).map_err(|_| err("bad number"))?;
            if z.im != 0.0 {
                return Err(err("expected a real number"));
            }
            Ok(z.re)
        };
        let (head, rest) = match flag.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (flag, None),
        };
        let spec = match (head, rest) {
            ("numerical_range" | "w", None) => Self::numerical_range(),
            ("margin", Some(m)) => Self::new(BaseSpec::ConvexHullMargin { margin: num(m)? }),
            ("pseudospectrum", Some(e)) => Self::pseudospectrum(num(e)?),
            ("disk", Some(r)) => {
                let (c, rad) = r.rsplit_once(':').ok_or_else(|| err("expected disk:<center>:<radius>"))?;
                Self::new(BaseSpec::Disk {
                    center: parse_complex(c)?,
                    radius: num(rad)?,
                })
            }
            ("polygon", Some(r)) => Self::new(BaseSpec::ExplicitPolygon {
                vertices: r.split(';').map(parse_complex).collect::<Result<_, _>>()?,
            }),
            ("wminus", Some(r)) => {
                let mut spec = Self::numerical_range();
                for item in r.split(',') {
                    let body = item.strip_prefix("disk@").ok_or_else(|| err("expected disk@<center>:<rule>"))?;
                    let (c, rule) = body.rsplit_once(':').ok_or_else(|| err("expected disk@<center>:<rule>"))?;
                    let radius = match rule {
                        "norm" => HoleRadius::Rule(RadiusRule::Norm),
                        "numrad" => HoleRadius::Rule(RadiusRule::Numrad),
                        other => HoleRadius::Explicit(num(other)?),
                    };
                    spec = spec.with_hole(parse_complex(c)?, radius);
                }
                spec
            }
            ("whalf", c) => Self::numerical_range().with_clip(ClipSpec::HalfPlane {
                normal: default_normal(),
                offset: c.map(num).transpose()?.unwrap_or(0.0),
            }),
            ("wdisk", r) => Self::numerical_range().with_clip(ClipSpec::Disk {
                center: C64::new(0.0, 0.0),
                radius: r.map(num).transpose()?.unwrap_or(1.0),
            }),
            _ => return Err(err("unknown region")),
        };
        spec.validate().map_err(|e| ParseError::Region(e.to_string()))?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), RegionError> {
        let bad = |m: String| Err(RegionError::InvalidSpec(m));
        let finite = |z: C64| z.re.is_finite() && z.im.is_finite();
        match &self.base {
            BaseSpec::NumericalRange => {}
            BaseSpec::ConvexHullMargin { margin } => {
                if !(margin.is_finite() && *margin >= 0.0) {
                    return bad(format!("margin must be >= 0, got {margin}"));
                }
            }
            BaseSpec::Pseudospectrum { eps } => {
                if !(eps.is_finite() && *eps > 0.0) {
                    return bad(format!("eps must be > 0, got {eps}"));
                }
            }
            BaseSpec::ExplicitPolygon { vertices } => {
                if vertices.len() < 3 || !vertices.iter().all(|&z| finite(z)) {
                    return bad("polygon needs at least 3 finite vertices".into());
                }
            }
            BaseSpec::Disk { center, radius } => {
                if !(finite(*center) && radius.is_finite() && *radius > 0.0) {
                    return bad(format!("disk radius must be > 0, got {radius}"));
                }
            }
        }
        for h in &self.holes {
            if !finite(h.center) {
                return bad("hole center must be finite".into());
            }
            if let HoleRadius::Explicit(r) = h.radius {
                if !(r.is_finite() && r > 0.0) {
                    return bad(format!("hole radius must be > 0, got {r}"));
                }
            }
        }
        for c in &self.clips {
            match *c {
                ClipSpec::HalfPlane { normal, offset } => {
                    if !(finite(normal) && normal.norm() > 0.0 && offset.is_finite()) {
                        return bad("half-plane needs a nonzero normal".into());
                    }
                }
                ClipSpec::Disk { center, radius } => {
                    if !(finite(center) && radius.is_finite() && radius > 0.0) {
                        return bad(format!("clip radius must be > 0, got {radius}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Rule weights of the holes when every hole uses a rule radius.
    pub fn rule_weights(&self) -> Option<Vec<u32>> {
        self.holes
            .iter()
            .map(|h| match h.radius {
                HoleRadius::Rule(r) => Some(r.weight()),
                HoleRadius::Explicit(_) => None,
            })
            .collect()
    }
}

/// A hole with its resolved radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Disk {
    #[serde(with = "complex_serde")]
    pub center: C64,
    pub radius: f64,
    pub rule: Option<RadiusRule>,
}

/// Numerical knobs for region construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionOptions {
    pub n_angles: usize,
    /// Points per axis of the pseudospectrum scan.
    pub grid: usize,
    pub window: Option<Window>,
    /// Points per axis of the connectivity flood fill.
    pub flood_resolution: usize,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self {
            n_angles: 512,
            grid: 300,
            window: None,
            flood_resolution: 400,
        }
    }
}

/// A constructed region.
#[derive(Clone, Debug)]
pub struct Region {
    pub path: BoundaryPath,
    pub disks: Vec<Disk>,
    pub components: usize,
    /// Margin added to `W(A)` because an eigenvalue sat on its boundary.
    pub margin_applied: Option<f64>,
    /// True when `W(A)` has empty interior.
    pub degenerate: bool,
    pub eps: Option<f64>,
    pub window: Option<Window>,
}

/// Boundary of the numerical range as a single counter-clockwise loop.
#[derive(Clone, Debug)]
pub struct NumericalRangeBoundary {
    pub path: BoundaryPath,
    pub degenerate: bool,
}

pub fn numerical_range_boundary(a: &ComplexMatrix, n_angles: usize) -> Result<NumericalRangeBoundary, Error> {
    let (lp, degenerate) = numrange::numerical_range_loop(a, n_angles.max(64), 0.0)?;
    let path = BoundaryPath::new(vec![lp])?;
    Ok(NumericalRangeBoundary { path, degenerate })
}

/// Hole radius by the norm or numerical-radius rule.
pub fn disk_radius(a: &ComplexMatrix, xi: C64, rule: RadiusRule) -> Result<f64, Error> {
    let r = matops::resolvent(a, xi).map_err(|e| match e {
        LinalgError::SingularShift { .. } => Error::from(RegionError::CenterIsEigenvalue { center: xi }),
        other => other.into(),
    })?;
    let size = match rule {
        RadiusRule::Norm => matops::operator_norm(r.as_dmatrix())?,
        RadiusRule::Numrad => matops::numerical_radius(r.as_dmatrix())?,
    };
    Ok(1.0 / size)
}

/// Removes each disk in turn from the region bounded by `base`.
pub fn remove_disks(base: &BoundaryPath, disks: &[Disk]) -> Result<BoundaryPath, Error> {
    let mut loops = base.loops().to_vec();
    for d in disks {
        let cutter = Cutter::Disk {
            center: d.center,
            radius: d.radius,
        };
        let (next, changed) = cut::cut(&loops, &cutter, false)?;
        if !changed {
            return Err(RegionError::DiskMissesRegion {
                center: d.center,
                radius: d.radius,
            }
            .into());
        }
        if next.is_empty() {
            return Err(RegionError::DiskCoversRegion {
                center: d.center,
                radius: d.radius,
            }
            .into());
        }
        loops = next;
    }
    Ok(BoundaryPath::new(loops)?)
}

/// Intersects the region bounded by `base` with a half-plane or disk.
pub fn clip_region(base: &BoundaryPath, clip: &Cutter) -> Result<BoundaryPath, Error> {
    let (loops, _) = cut::cut(base.loops(), clip, true)?;
    if loops.is_empty() {
        return Err(RegionError::EmptyIntersection.into());
    }
    Ok(BoundaryPath::new(loops)?)
}

fn default_window(a: &ComplexMatrix, eps: f64) -> Result<Window, Error> {
    let (x0, x1, y0, y1) = numrange::bounding_box(a)?;
    let pad = 2.0 * eps + 0.02 * (x1 - x0).max(y1 - y0);
    Ok(Window {
        re_min: x0 - pad,
        re_max: x1 + pad,
        im_min: y0 - pad,
        im_max: y1 + pad,
    })
}

/// The `eps`-pseudospectrum boundary: one loop per component (and per hole).
pub fn pseudospectrum_contour(
    a: &ComplexMatrix,
    eps: f64,
    grid: usize,
    window: Option<Window>,
) -> Result<Contour, Error> {
    let schur = ShiftedSchur::new(a)?;
    let window = match window {
        Some(w) => w,
        None => default_window(a, eps)?,
    };
    Ok(pseudo::contour(&schur, eps, window, grid.max(8))?)
}

/// Number of connected components: counter-clockwise loops, checked
/// against a flood fill of the region indicator.
pub fn connectivity_components(path: &BoundaryPath, resolution: usize) -> Result<usize, RegionError> {
    let loops = path.outer_loops().len();
    let flood = flood_fill_components(path, resolution);
    if loops != flood {
        return Err(RegionError::ConnectivityMismatch { loops, flood });
    }
    Ok(loops)
}

/// Connected components of the rasterized region (4-connectivity).
pub fn flood_fill_components(path: &BoundaryPath, resolution: usize) -> usize {
    let res = resolution.max(4);
    let (x0, x1, y0, y1) = path.bounding_box();
    let pad = 0.01 * (x1 - x0).max(y1 - y0);
    let (x0, x1, y0, y1) = (x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let dx = (x1 - x0) / res as f64;
    let dy = (y1 - y0) / res as f64;
    let mut inside = vec![false; res * res];
    // Nonzero winding by scanlines through pixel centres.
    let edges: Vec<(C64, C64)> = (0..path.loop_count())
        .flat_map(|k| {
            let nodes = path.loop_nodes(k);
            let m = nodes.len();
            (0..m).map(move |i| (nodes[i].z, nodes[(i + 1) % m].z))
        })
        .collect();
    for row in 0..res {
        let y = y0 + (row as f64 + 0.5) * dy;
        let mut hits: Vec<(f64, i32)> = edges
            .iter()
            .filter_map(|&(a, b)| {
                let up = a.im <= y && b.im > y;
                let down = b.im <= y && a.im > y;
                if !(up || down) {
                    return None;
                }
                let t = (y - a.im) / (b.im - a.im);
                Some((a.re + t * (b.re - a.re), if up { 1 } else { -1 }))
            })
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut wind = 0;
        let mut h = 0;
        for col in 0..res {
            let x = x0 + (col as f64 + 0.5) * dx;
            while h < hits.len() && hits[h].0 < x {
                wind += hits[h].1;
                h += 1;
            }
            inside[row * res + col] = wind != 0;
        }
    }
    let mut label = vec![false; res * res];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..res * res {
        if !inside[start] || label[start] {
            continue;
        }
        count += 1;
        label[start] = true;
        stack.push(start);
        while let Some(p) = stack.pop() {
            let (r, c) = (p / res, p % res);
            let mut visit = |q: usize| {
                if inside[q] && !label[q] {
                    label[q] = true;
                    stack.push(q);
                }
            };
            if r > 0 {
                visit(p - res);
            }
            if r + 1 < res {
                visit(p + res);
            }
            if c > 0 {
                visit(p - 1);
            }
            if c + 1 < res {
                visit(p + 1);
            }
        }
    }
    count
}

fn scale_of(a: &ComplexMatrix) -> f64 {
    a.frobenius_norm().max(1.0)
}

fn polygon_loop(vertices: &[C64]) -> Loop {
    let m = vertices.len();
    let lp = Loop::new(
        (0..m)
            .map(|k| {
                Piece::new(
                    Curve::Segment {
                        a: vertices[k],
                        b: vertices[(k + 1) % m],
                    },
                    Label::Base,
                )
            })
            .collect(),
    );
    if lp.signed_area() < 0.0 {
        lp.reversed()
    } else {
        lp
    }
}

/// Builds the region described by `spec` for the matrix `a`.
pub fn build_region(a: &ComplexMatrix, spec: &RegionSpec, opts: &RegionOptions) -> Result<Region, Error> {
    spec.validate()?;
    let eigenvalues = ShiftedSchur::new(a)?.eigenvalues();
    let mut margin_applied = None;
    let mut degenerate = false;
    let mut eps = None;
    let mut window = None;
    let base_loops: Vec<Loop> = match &spec.base {
        BaseSpec::NumericalRange | BaseSpec::ConvexHullMargin { .. } => {
            let margin = match spec.base {
                BaseSpec::ConvexHullMargin { margin } => margin,
                _ => 0.0,
            };
            let (lp, flat) = numrange::numerical_range_loop(a, opts.n_angles.max(64), margin)?;
            degenerate = flat;
            let path = BoundaryPath::new(vec![lp.clone()]);
            let scale = scale_of(a);
            let touching = match &path {
                Ok(p) => eigenvalues
                    .iter()
                    .any(|&l| p.winding_number(l) != 1 || p.distance(l) < 1e-8 * scale),
                Err(_) => true,
            };
            if touching && margin == 0.0 {
                // Normal or degenerate cases put eigenvalues on the boundary.
                let diameter = path.as_ref().map(|p| p.diameter()).unwrap_or(0.0);
                let m = if diameter > 1e-12 * scale {
                    1e-2 * diameter
                } else {
                    1e-2 * scale
                };
                margin_applied = Some(m);
                vec![numrange::numerical_range_loop(a, opts.n_angles.max(64), m)?.0]
            } else {
                vec![lp]
            }
        }
        BaseSpec::Pseudospectrum { eps: e } => {
            let c = pseudospectrum_contour(a, *e, opts.grid, opts.window)?;
            eps = Some(*e);
            window = Some(c.window);
            c.loops
        }
        BaseSpec::ExplicitPolygon { vertices } => vec![polygon_loop(vertices)],
        BaseSpec::Disk { center, radius } => {
            vec![Loop::new(vec![Piece::new(Curve::circle(*center, *radius, false), Label::Base)])]
        }
    };
    let mut path = BoundaryPath::new(base_loops)?;

    let mut disks = Vec::with_capacity(spec.holes.len());
    for h in &spec.holes {
        let (radius, rule) = match h.radius {
            HoleRadius::Rule(rule) => (disk_radius(a, h.center, rule)?, Some(rule)),
            HoleRadius::Explicit(r) => (r, None),
        };
        if let Some(&lambda) = eigenvalues.iter().find(|&&l| (l - h.center).norm() < radius) {
            return Err(RegionError::SpectrumNotInside { lambda }.into());
        }
        disks.push(Disk {
            center: h.center,
            radius,
            rule,
        });
    }
    if !disks.is_empty() {
        path = remove_disks(&path, &disks)?;
    }
    for c in &spec.clips {
        let cutter = match *c {
            ClipSpec::HalfPlane { normal, offset } => Cutter::half_plane(normal, offset),
            ClipSpec::Disk { center, radius } => Cutter::Disk { center, radius },
        };
        path = clip_region(&path, &cutter)?;
    }
    for &lambda in &eigenvalues {
        if path.winding_number(lambda) != 1 || path.distance(lambda) <= 0.0 {
            return Err(RegionError::SpectrumNotInside { lambda }.into());
        }
    }
    let components = connectivity_components(&path, opts.flood_resolution)?;
    Ok(Region {
        path,
        disks,
        components,
        margin_applied,
        degenerate,
        eps,
        window,
    })
}

/// Replaces every convex corner by a circular arc of radius `delta` around
/// it after pushing all pieces outward by `delta`, so the new region
/// contains the old one.
pub fn smooth_corners(path: &BoundaryPath, delta: f64) -> Result<BoundaryPath, Error> {
    let mut loops = Vec::new();
    for lp in path.loops() {
        if lp.is_periodic() || lp.corner_count() == 0 {
            loops.push(offset_loop(lp, delta)?);
            continue;
        }
        let m = lp.pieces.len();
        let mut pieces = Vec::new();
        for k in 0..m {
            let p = &lp.pieces[k];
            let q = &lp.pieces[(k + 1) % m];
            let moved = Piece {
                curve: p.curve.offset(delta).ok_or_else(|| {
                    RegionError::InvalidSpec("boundary piece cannot be offset for smoothing".into())
                })?,
                ..p.clone()
            };
            pieces.push(moved);
            let out = p.eval(1.0).1;
            let inn = q.eval(0.0).1;
            let (to, ti) = (out / out.norm(), inn / inn.norm());
            let turn = (ti * to.conj()).arg();
            if turn.abs() <= 1e-8 {
                continue;
            }
            if turn < 0.0 {
                return Err(RegionError::ReflexCorner { at: p.end() }.into());
            }
            // Outward normals -i t; the arc sweeps from one to the other.
            let start = (-matops::i_times(to)).arg();
            pieces.push(Piece::new(
                Curve::Arc {
                    center: p.end(),
                    radius: delta,
                    start,
                    sweep: turn,
                },
                p.label,
            ));
        }
        loops.push(Loop::new(pieces));
    }
    Ok(BoundaryPath::new(loops)?)
}

fn offset_loop(lp: &Loop, delta: f64) -> Result<Loop, Error> {
    let pieces = lp
        .pieces
        .iter()
        .map(|p| {
            Ok(Piece {
                curve: p.curve.offset(delta).ok_or_else(|| {
                    RegionError::InvalidSpec("boundary piece cannot be offset for smoothing".into())
                })?,
                ..p.clone()
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Loop::new(pieces))
}
