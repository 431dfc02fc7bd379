use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specset::diagnostics::{rank_one_maps, rank_one_reduction, smallest_singular_value_drift, stewart_singular_subspace_bound};
use specset::gallery::{grcar, rank_one_pair};
use specset::matops::{self, eigen_decomposition};
use specset::regions::{pseudospectrum_contour, Window};
use specset::{ComplexMatrix, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
    let v = DVector::from_fn(n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    v.unscale(v.norm())
}

/// Unit vectors with `|y* x| = delta` and a random phase.
fn random_pair(rng: &mut ChaCha8Rng, n: usize, delta: f64) -> (DVector<C64>, DVector<C64>) {
    let x = random_unit(rng, n);
    let w = random_unit(rng, n);
    let w = &w - &x * x.dotc(&w);
    let w = w.unscale(w.norm());
    let phase = matops_unit(rng.random::<f64>() * std::f64::consts::TAU);
    let y = &x * (phase * delta) + w.scale((1.0 - delta * delta).sqrt());
    (x, y)
}

fn matops_unit(t: f64) -> C64 {
    c(t.cos(), t.sin())
}

#[test]
fn orthogonal_pair_gives_the_nilpotent_model() {
    let (x, y) = rank_one_pair(5, 0.0);
    let r = rank_one_reduction(&x, &y).unwrap();
    let b = r.two_by_two.as_dmatrix();
    assert!((b - DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])).norm() <= 1e-12);
    assert!(r.e_norm <= 1e-12);
    assert!((matops::numerical_radius(b).unwrap() - 0.5).abs() < 1e-10);
    assert!((matops::operator_norm(b).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn deviation_scales_quadratically() {
    for delta in [1e-1, 1e-2, 1e-3] {
        let (x, y) = rank_one_pair(4, delta);
        let e1 = rank_one_reduction(&x, &y).unwrap().e_norm;
        let (x, y) = rank_one_pair(4, delta / 2.0);
        let e2 = rank_one_reduction(&x, &y).unwrap().e_norm;
        let ratio = e1 / e2;
        assert!((3.0..=5.0).contains(&ratio), "delta {delta}: ratio {ratio}");
        assert!(e1 <= 10.0 * delta * delta);
        let b = rank_one_reduction(&x, &y).unwrap();
        let norm = matops::operator_norm(b.two_by_two.as_dmatrix()).unwrap();
        assert!((norm - 1.0).abs() <= 10.0 * delta * delta);
    }
}

#[test]
fn reduction_is_a_unitary_similarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut constants = Vec::new();
    for delta in [1e-1, 1e-2, 1e-3] {
        for _ in 0..50 {
            let (x, y) = random_pair(&mut rng, 6, delta);
            let r = rank_one_reduction(&x, &y).unwrap();
            let n = 6;
            assert!((r.q.adjoint() * &r.q - DMatrix::<C64>::identity(n, n)).norm() < 1e-12);
            let mut block = DMatrix::<C64>::zeros(n, n);
            block.view_mut((0, 0), (2, 2)).copy_from(r.two_by_two.as_dmatrix());
            let rebuilt = &r.q * block * r.q.adjoint();
            assert!((rebuilt - &x * y.adjoint()).norm() < 1e-12);
            assert!(r.trailing < 1e-12);
            constants.push(r.e_norm / (delta * delta));
        }
    }
    let worst = constants.iter().cloned().fold(0.0, f64::max);
    assert!(worst < 10.0, "{worst}");
}

#[test]
fn normal_matrix_overlap_map_is_one() {
    let a = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5)]).unwrap();
    let w = Window {
        re_min: -2.05,
        re_max: 2.1,
        im_min: -2.03,
        im_max: 2.07,
    };
    let d = rank_one_maps(&a, w, 30).unwrap();
    for (o, r) in d.overlap_map.iter().zip(&d.ratio_map) {
        let (o, r) = (o.unwrap(), r.unwrap());
        assert!((o - 1.0).abs() < 1e-8, "{o}");
        assert!((0.0..=1.0 + 1e-10).contains(&r));
    }
    assert_eq!(d.masked, 0);
}

#[test]
fn nilpotent_overlap_is_small_near_zero() {
    let m = 1e3;
    let a = ComplexMatrix::from_real_rows(&[&[0.0, m], &[0.0, 0.0]]).unwrap();
    let w = Window {
        re_min: -0.013,
        re_max: 0.011,
        im_min: -0.012,
        im_max: 0.0125,
    };
    let d = rank_one_maps(&a, w, 9).unwrap();
    for o in d.overlap_map.iter().flatten() {
        assert!(*o <= 2.0 / m + 1e-6, "{o}");
    }
}

#[test]
fn eigenvalue_points_are_masked_not_nan() {
    let a = ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let w = Window {
        re_min: -1.0,
        re_max: 1.0,
        im_min: -1.0,
        im_max: 1.0,
    };
    let d = rank_one_maps(&a, w, 3).unwrap();
    assert_eq!(d.masked, 2);
    assert!(d.ratio_map.iter().flatten().all(|v| v.is_finite()));
}

/// The 0.01 level curve of the singular value ratio tracks the 1e-3
/// pseudospectrum boundary: along the boundary the ratio stays within an
/// order of magnitude of 0.01.
#[test]
fn grcar_ratio_level_curve_tracks_the_pseudospectrum_boundary() {
    let a = grcar(32, 3);
    let contour = pseudospectrum_contour(&a, 1e-3, 200, None).unwrap();
    let mut logs = Vec::new();
    for lp in &contour.loops {
        for k in 0..8 {
            let z = lp.pieces[0].eval(k as f64 / 8.0).0;
            let m = a.shifted(z).into_dmatrix();
            let s = matops::singular_values(&m).unwrap();
            let ratio = s[31] / s[30];
            assert!(ratio <= 0.1, "{z}: {ratio}");
            logs.push(ratio.log10());
        }
    }
    assert!(logs.len() >= 16);
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    assert!((-2.5..=-1.5).contains(&mean), "{mean}");

    let w = Window {
        re_min: -1.0,
        re_max: 3.0,
        im_min: -3.0,
        im_max: 3.0,
    };
    let d = rank_one_maps(&a, w, 40).unwrap();
    let small = d.ratio_map.iter().flatten().filter(|r| **r <= 0.01).count();
    assert!(small as f64 >= 0.1 * d.ratio_map.len() as f64, "{small}");
}

#[test]
fn stewart_bounds_on_normal_matrix() {
    let a = ComplexMatrix::diag(&[c(0.0, 0.0), c(2.0, 0.0), c(0.0, 3.0)]).unwrap();
    let b = stewart_singular_subspace_bound(&a, c(0.0, 0.0), c(0.1, 0.05)).unwrap();
    assert!((b.overlap_xy - 1.0).abs() < 1e-12);
    assert!(b.ratio_ok);
    assert!(b.overlap_bound.unwrap() >= 1.0);
}

#[test]
fn stewart_overlap_matches_condition_number() {
    let (m, e0) = (1e3, 1e-2);
    let a = ComplexMatrix::from_real_rows(&[&[0.0, m], &[0.0, e0]]).unwrap();
    let b = stewart_singular_subspace_bound(&a, c(0.0, 0.0), c(1e-6, 0.0)).unwrap();
    let spec = eigen_decomposition(&a).unwrap();
    let k = spec.nearest(c(0.0, 0.0));
    let cond = spec.condition_numbers[k].unwrap();
    assert!((b.overlap_xy - 1.0 / cond).abs() < 1e-10);
    assert!((b.overlap_xy - e0 / (e0 * e0 + m * m).sqrt()).abs() < 1e-12);
}

#[test]
fn stewart_invariants_and_limit() {
    let a = grcar(16, 3);
    let lambda = eigen_decomposition(&a).unwrap().eigenvalues[0];
    let mut last_gamma = f64::INFINITY;
    for step in [1e-2, 1e-4, 1e-6, 1e-8] {
        let zeta = lambda + c(step, step / 3.0);
        let b = stewart_singular_subspace_bound(&a, lambda, zeta).unwrap();
        let d = (zeta - lambda).norm();
        assert!(b.gamma <= 2f64.sqrt() * d + 1e-12);
        assert!(b.delta >= b.sigma_second - d * (1.0 + b.overlap_xy) - 1e-12);
        assert!(b.gamma < last_gamma);
        last_gamma = b.gamma;
        if step <= 1e-6 {
            let pq = b.pq_norm_bound.unwrap();
            assert!(pq < 1e-4);
            assert!((b.overlap_bound.unwrap() - b.overlap_xy).abs() < 1e-3);
        }
    }
}

#[test]
fn drift_is_zero_for_normal_matrices() {
    let a = ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 1.0)]).unwrap();
    let t = smallest_singular_value_drift(&a, c(0.0, 0.0), &[1e-2, 1e-3]).unwrap();
    assert!((t.overlap_xy - 1.0).abs() < 1e-12);
    for r in &t.rows {
        assert!(r.residual < 1e-14);
    }
}

#[test]
fn drift_is_quadratic_for_ill_conditioned_eigenvalue() {
    let m = 1e2;
    let a = ComplexMatrix::from_real_rows(&[&[0.0, m], &[0.0, 1.0]]).unwrap();
    let t = smallest_singular_value_drift(&a, c(0.0, 0.0), &[1e-2, 5e-3, 2.5e-3, 1.25e-3]).unwrap();
    assert!((t.overlap_xy - 1.0 / (1.0 + m * m).sqrt()).abs() < 1e-12);
    let slope = t.slope.unwrap();
    assert!((slope - 2.0).abs() < 0.1, "{slope}");
}

#[test]
fn drift_quarters_on_grcar_near_rightmost_eigenvalue() {
    let a = grcar(32, 3);
    let eig = eigen_decomposition(&a).unwrap().eigenvalues;
    let lambda = *eig.iter().max_by(|p, q| p.re.total_cmp(&q.re)).unwrap();
    let radii = [1e-4, 5e-5, 2.5e-5];
    let t = smallest_singular_value_drift(&a, lambda, &radii).unwrap();
    for w in t.rows.windows(2) {
        let ratio = w[0].residual / w[1].residual;
        assert!((3.0..=5.0).contains(&ratio), "{ratio} {:?}", t.rows);
    }
}
