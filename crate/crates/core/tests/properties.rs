use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use specset::blaschke::BlaschkeProduct;
use specset::boundary::{mu_min, BoundaryPath, KernelTable};
use specset::bounds::k_from_c;
use specset::diagnostics::rank_one_reduction;
use specset::gallery::GallerySpec;
use specset::io::{format_complex, parse_complex, read_matrix_market, write_matrix_market};
use specset::matops::{self, hermitian_part_extremes, matrix_exponential};
use specset::regions::RegionSpec;
use specset::{ComplexMatrix, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn matrix(max_n: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n)
            .prop_map(move |v| ComplexMatrix::from_fn(n, |i, j| c(v[i * n + j].0, v[i * n + j].1)).unwrap())
    })
}

fn unit_vector(n: usize) -> impl Strategy<Value = DVector<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n).prop_filter_map("nonzero", |v| {
        let x = DVector::from_iterator(v.len(), v.iter().map(|&(a, b)| c(a, b)));
        let norm = x.norm();
        (norm > 1e-3).then(|| x.unscale(norm))
    })
}

fn norm(b: &DMatrix<C64>) -> f64 {
    matops::operator_norm(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn numerical_radius_between_half_norm_and_norm(b in matrix(20)) {
        let w = matops::numerical_radius(b.as_dmatrix()).unwrap();
        let n = norm(b.as_dmatrix());
        prop_assert!(w >= n / 2.0 - 1e-8 * n);
        prop_assert!(w <= n + 1e-8 * n);
    }

    #[test]
    fn numerical_radius_of_hermitian_part_is_its_norm(b in matrix(12)) {
        let h = b.hermitian_part();
        let w = matops::numerical_radius(&h).unwrap();
        let n = norm(&h);
        prop_assert!((w - n).abs() <= 1e-8 * n.max(1e-300));
    }

    #[test]
    fn hermitian_extremes_reproduce_rayleigh_quotients(b in matrix(12)) {
        let e = hermitian_part_extremes(&b).unwrap();
        let h = b.hermitian_part();
        let scale = norm(b.as_dmatrix()).max(1e-300);
        let rq = |v: &DVector<C64>| v.dotc(&(&h * v)).re;
        prop_assert!((rq(&e.v_min) - e.lambda_min).abs() <= 1e-10 * scale);
        prop_assert!((rq(&e.v_max) - e.lambda_max).abs() <= 1e-10 * scale);
        prop_assert!(e.lambda_min <= e.lambda_max);
        let herm = (&h - h.adjoint()).norm();
        prop_assert!(herm <= 1e-14 * scale);
    }

    #[test]
    fn resolvent_residual(b in matrix(12), re in 1.5..3.0f64, th in 0.0..(2.0 * PI)) {
        // |zeta| > ||B|| is not guaranteed; stay outside the Frobenius ball instead.
        let zeta = matops_unit(th) * (re * (1.0 + b.frobenius_norm()));
        let r = matops::resolvent(&b, zeta).unwrap();
        let n = b.dim();
        let shifted = -b.shifted(zeta).into_dmatrix();
        let residual = norm(&(&shifted * r.as_dmatrix() - DMatrix::<C64>::identity(n, n)));
        prop_assert!(residual <= 1e-10 * norm(r.as_dmatrix()) * norm(&shifted));
    }

    #[test]
    fn exponential_semigroup(b in matrix(10), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let est = matrix_exponential(&b, s + t).unwrap();
        let es = matrix_exponential(&b, s).unwrap();
        let et = matrix_exponential(&b, t).unwrap();
        let diff = norm(&(est.as_dmatrix() - es.as_dmatrix() * et.as_dmatrix()));
        prop_assert!(diff <= 1e-8 * norm(est.as_dmatrix()));
    }

    #[test]
    fn k_from_c_is_monotone(c1 in 0.0..10.0f64, c2 in 0.0..10.0f64, d1 in 0.0..5.0f64, d2 in 0.0..5.0f64) {
        let k = k_from_c(c1, c2);
        prop_assert!(k_from_c(c1 + d1, c2) >= k);
        prop_assert!(k_from_c(c1, c2 + d2) >= k);
    }

    #[test]
    fn blaschke_products_are_unimodular_on_the_circle(
        roots in prop::collection::vec((0.0..0.999f64, 0.0..(2.0 * PI)), 0..8)
    ) {
        let b = BlaschkeProduct::new(roots.iter().map(|&(r, t)| matops_unit(t) * r).collect()).unwrap();
        for k in 0..64 {
            let z = matops_unit(2.0 * PI * k as f64 / 64.0);
            prop_assert!((b.eval(z).norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn rank_one_reduction_is_unitary(x in unit_vector(5), y in unit_vector(5)) {
        prop_assume!(y.dotc(&x).norm() < 0.99);
        let r = rank_one_reduction(&x, &y).unwrap();
        let q = &r.q;
        prop_assert!((q.adjoint() * q - DMatrix::<C64>::identity(5, 5)).norm() <= 1e-12);
        let mut block = DMatrix::<C64>::zeros(5, 5);
        block.view_mut((0, 0), (2, 2)).copy_from(r.two_by_two.as_dmatrix());
        prop_assert!((q * block * q.adjoint() - &x * y.adjoint()).norm() <= 1e-12);
    }

    #[test]
    fn kernel_samples_respect_numerical_radius(b in matrix(6), radius in 1.2..3.0f64) {
        let scale = 1.0 + norm(b.as_dmatrix());
        let path = BoundaryPath::circle(c(0.0, 0.0), radius * scale);
        let table = KernelTable::build(&b, &path, true).unwrap();
        for s in table.samples.iter().step_by(7) {
            let w = s.numerical_radius_resolvent.unwrap();
            prop_assert!(s.mu_lambda_min.abs() <= w / PI + 1e-10);
            prop_assert!(w >= s.resolvent_norm / 2.0 - 1e-8 * s.resolvent_norm);
            prop_assert!(w <= s.resolvent_norm * (1.0 + 1e-8));
            let direct = mu_min(&b, s.zeta, s.tangent).unwrap();
            prop_assert!((direct - s.mu_lambda_min).abs() <= 1e-12 * s.resolvent_norm);
        }
    }

    #[test]
    fn circle_paths_are_consistent(re in -5.0..5.0f64, im in -5.0..5.0f64, r in 0.01..10.0f64, level in 0u32..3) {
        let center = c(re, im);
        let path = BoundaryPath::circle(center, r).with_level(level);
        for n in path.nodes() {
            prop_assert!((n.tangent.norm() - 1.0).abs() <= 1e-12);
        }
        prop_assert!((path.perimeter() - 2.0 * PI * r).abs() <= 1e-12 * 2.0 * PI * r);
        prop_assert_eq!(path.winding_number(center), 1);
    }

    #[test]
    fn complex_literals_round_trip(re in -1e6..1e6f64, im in -1e6..1e6f64) {
        let z = c(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn matrix_market_round_trips(b in matrix(6)) {
        let text = write_matrix_market(&b, "property test");
        let back = read_matrix_market(&text).unwrap();
        prop_assert_eq!(back.as_dmatrix(), b.as_dmatrix());
    }

    #[test]
    fn text_front_ends_never_panic(s in "\\PC{0,40}") {
        let _ = parse_complex(&s);
        let _ = read_matrix_market(&s);
        let _ = RegionSpec::from_flag(&s);
        let _ = RegionSpec::from_json(&s);
        let _ = GallerySpec::parse(&s);
    }

    #[test]
    fn structured_flags_never_panic(
        s in "(w|numerical_range|margin:[0-9.e-]{0,6}|pseudospectrum:[0-9.e-]{0,6}|disk:[0-9.i+-]{0,6}:[0-9.]{0,4}|polygon:[0-9;.i+-]{0,20}|wminus:disk@[0-9.i+-]{0,5}:(norm|numrad|[0-9.]{0,4})|whalf(:[0-9.-]{0,4})?|wdisk(:[0-9.]{0,4})?)"
    ) {
        if let Ok(spec) = RegionSpec::from_flag(&s) {
            let _ = spec.validate();
        }
    }

    #[test]
    fn gallery_strings_never_panic(
        s in "(grcar:[0-9]{0,4}(:[0-9]{0,2})?|block:(fig4|fig5|fig6|x)(:[0-9]{0,3})?|jordan:[0-9]{0,3}:[0-9.i+-]{0,5}|normal:diag\\([0-9,.i+-]{0,20}\\)|rankone:[0-9]{0,3}:[0-9.]{0,4})"
    ) {
        if let Ok(g) = GallerySpec::parse(&s) {
            if g.validate().is_ok() {
                if let Ok(a) = g.build() {
                    prop_assert!(a.dim() >= 1);
                }
            }
        }
    }
}

fn matops_unit(t: f64) -> C64 {
    c(t.cos(), t.sin())
}
