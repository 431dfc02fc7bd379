//! Removing a disk from, or intersecting with a disk or half-plane, a region
//! given by its boundary loops.

use std::f64::consts::TAU;

use crate::boundary::{BoundaryPath, Curve, Label, Loop, Piece};
use crate::error::RegionError;
use crate::matops::{self, C64};

/// A disk or closed half-plane `Re(conj(normal) z) <= offset` (unit normal).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutter {
    Disk { center: C64, radius: f64 },
    HalfPlane { normal: C64, offset: f64 },
}

impl Cutter {
    pub fn half_plane(normal: C64, offset: f64) -> Self {
        let len = normal.norm();
        Cutter::HalfPlane {
            normal: normal / len,
            offset: offset / len,
        }
    }

    /// Negative inside the cutter, positive outside; a signed distance.
    pub fn level(&self, z: C64) -> f64 {
        match *self {
            Cutter::Disk { center, radius } => (z - center).norm() - radius,
            Cutter::HalfPlane { normal, offset } => (normal.conj() * z).re - offset,
        }
    }

    /// Boundary pieces of the cutter between consecutive crossing points,
    /// oriented so that the kept side is on the left.
    fn boundary_pieces(&self, crossings: &[C64], keep_inside: bool) -> Vec<Piece> {
        match *self {
            Cutter::Disk { center, radius } => {
                let mut angles: Vec<f64> = crossings.iter().map(|z| (z - center).arg()).collect();
                angles.sort_by(f64::total_cmp);
                angles.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
                if angles.is_empty() {
                    return vec![Piece::new(Curve::circle(center, radius, !keep_inside), Label::Cut)];
                }
                let m = angles.len();
                (0..m)
                    .map(|k| {
                        let a0 = angles[k];
                        let a1 = if k + 1 == m { angles[0] + TAU } else { angles[k + 1] };
                        let curve = if keep_inside {
                            Curve::Arc {
                                center,
                                radius,
                                start: a0,
                                sweep: a1 - a0,
                            }
                        } else {
                            Curve::Arc {
                                center,
                                radius,
                                start: a1,
                                sweep: a0 - a1,
                            }
                        };
                        Piece::new(curve, Label::Cut)
                    })
                    .collect()
            }
            Cutter::HalfPlane { normal, offset } => {
                // The inside is on the left when travelling along i * normal.
                let dir = matops::i_times(normal);
                let base = normal * offset;
                let mut ts: Vec<f64> = crossings.iter().map(|z| (dir.conj() * (z - base)).re).collect();
                ts.sort_by(f64::total_cmp);
                ts.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + b.abs()));
                ts.windows(2)
                    .map(|w| {
                        let (p, q) = (base + dir * w[0], base + dir * w[1]);
                        let curve = if keep_inside {
                            Curve::Segment { a: p, b: q }
                        } else {
                            Curve::Segment { a: q, b: p }
                        };
                        Piece::new(curve, Label::Cut)
                    })
                    .collect()
            }
        }
    }
}

const SCAN: usize = 256;

/// Parameters in `(0, 1)` where the piece crosses the cutter boundary.
fn crossings(piece: &Piece, cutter: &Cutter) -> Vec<f64> {
    let g = |u: f64| cutter.level(piece.eval(u).0);
    let mut roots = Vec::new();
    let mut u_prev = 0.0;
    let mut g_prev = g(0.0);
    for k in 1..=SCAN {
        let u = k as f64 / SCAN as f64;
        let gu = g(u);
        if (g_prev < 0.0) != (gu < 0.0) {
            // Bisection to full double precision in the parameter.
            let (mut lo, mut hi, mut glo) = (u_prev, u, g_prev);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let gm = g(mid);
                if (gm < 0.0) == (glo < 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            let root = if glo.abs() <= g(hi).abs() { lo } else { hi };
            if root > 0.0 && root < 1.0 {
                roots.push(root);
            }
        }
        u_prev = u;
        g_prev = gu;
    }
    roots
}

/// Whether a cutter piece lies inside the old region, judged at a sample
/// point away from the old boundary (tangent contacts sit at midpoints).
fn inside_old(old: &BoundaryPath, piece: &Piece, tol: f64) -> bool {
    [0.5, 0.3, 0.7, 0.1, 0.9]
        .iter()
        .map(|&u| piece.eval(u).0)
        .find(|&z| old.distance(z) > tol)
        .is_some_and(|z| old.contains(z))
}

/// Joins pieces end to start into closed loops.
pub(crate) fn stitch(mut pieces: Vec<Piece>, tol: f64) -> Result<Vec<Loop>, RegionError> {
    let mut loops = Vec::new();
    while !pieces.is_empty() {
        let first = pieces.remove(0);
        let start = first.start();
        let mut chain = vec![first];
        loop {
            let end = chain.last().expect("nonempty").end();
            if (end - start).norm() <= tol {
                break;
            }
            let next = pieces
                .iter()
                .enumerate()
                .map(|(k, p)| (k, (p.start() - end).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match next {
                Some((k, d)) if d <= tol => chain.push(pieces.remove(k)),
                _ => {
                    return Err(RegionError::Stitch(format!(
                        "no piece continues from {end} (gap to nearest {:.3e})",
                        next.map_or(f64::INFINITY, |n| n.1)
                    )))
                }
            }
        }
        loops.push(Loop::new(chain));
    }
    Ok(loops)
}

/// The region described by `loops` intersected with the cutter
/// (`keep_inside`) or with its complement. The flag reports whether the
/// region changed at all.
pub(crate) fn cut(loops: &[Loop], cutter: &Cutter, keep_inside: bool) -> Result<(Vec<Loop>, bool), RegionError> {
    let keep = |g: f64| if keep_inside { g < 0.0 } else { g > 0.0 };
    let old = BoundaryPath::at_level(loops.to_vec(), 1).map_err(|e| RegionError::Stitch(e.to_string()))?;
    let scale = old.diameter().max(1e-300);

    let mut whole = Vec::new();
    let mut open = Vec::new();
    let mut points = Vec::new();
    for lp in loops {
        let mut any = false;
        let mut parts = Vec::new();
        for piece in &lp.pieces {
            let roots = crossings(piece, cutter);
            any |= !roots.is_empty();
            let mut cuts = vec![0.0];
            cuts.extend(&roots);
            cuts.push(1.0);
            for w in cuts.windows(2) {
                let mid = piece.eval(0.5 * (w[0] + w[1])).0;
                if keep(cutter.level(mid)) {
                    parts.push(piece.sub(w[0], w[1]));
                }
            }
            points.extend(roots.iter().map(|&u| piece.eval(u).0));
        }
        if any {
            open.extend(parts);
        } else if keep(cutter.level(lp.pieces[0].start())) {
            whole.push(lp.clone());
        }
    }

    let added: Vec<Piece> = cutter
        .boundary_pieces(&points, keep_inside)
        .into_iter()
        .filter(|p| inside_old(&old, p, 1e-9 * scale))
        .collect();
    if points.is_empty() && added.is_empty() && whole.len() == loops.len() {
        // Cutter boundary misses the region and nothing was removed.
        return Ok((whole, false));
    }
    let mut pieces = open;
    let mut closed = Vec::new();
    for p in added {
        if p.is_closed_loop() {
            closed.push(Loop::new(vec![p]));
        } else {
            pieces.push(p);
        }
    }
    let mut result = whole;
    result.extend(closed);
    result.extend(stitch(pieces, 1e-9 * scale)?);
    Ok((result, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(c: C64, r: f64) -> Vec<Loop> {
        vec![Loop::new(vec![Piece::new(Curve::circle(c, r, false), Label::Base)])]
    }

    #[test]
    fn interior_hole_gives_annulus() {
        let out = cut(
            &circle(C64::new(0.0, 0.0), 3.0),
            &Cutter::Disk {
                center: C64::new(0.0, 0.0),
                radius: 1.0,
            },
            false,
        )
        .unwrap()
        .0;
        let p = BoundaryPath::new(out).unwrap();
        let mut lengths: Vec<f64> = (0..2).map(|k| p.loop_length(k)).collect();
        lengths.sort_by(f64::total_cmp);
        assert!((lengths[0] - 2.0 * PI).abs() < 1e-12);
        assert!((lengths[1] - 6.0 * PI).abs() < 1e-12);
        assert_eq!(p.winding_number(C64::new(2.0, 0.0)), 1);
        assert_eq!(p.winding_number(C64::new(0.0, 0.0)), 0);
    }

    #[test]
    fn half_plane_clip_of_unit_disk() {
        let out = cut(
            &circle(C64::new(0.0, 0.0), 1.0),
            &Cutter::half_plane(C64::new(1.0, 0.0), 0.0),
            true,
        )
        .unwrap()
        .0;
        assert_eq!(out.len(), 1);
        let p = BoundaryPath::new(out).unwrap();
        assert!((p.perimeter() - (PI + 2.0)).abs() < 1e-12);
        let cut_len: f64 = p.nodes().iter().filter(|n| n.label == Label::Cut).map(|n| n.ds).sum();
        assert!((cut_len - 2.0).abs() < 1e-12);
        assert_eq!(p.corner_count(), 2);
    }
}
