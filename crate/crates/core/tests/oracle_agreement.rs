mod common;

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use g2_core::catalog::{catalog, phi_std};
use g2_core::curvature::{ricci, star_ricci};
use g2_core::exterior::HodgeStar;
use g2_core::g2::G2Structure;
use g2_core::{KForm, LieAlgebra};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn close(a: &KForm, b: &KForm, tol: f64) -> bool {
    a.approx_eq(b, tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wedge_matches_oracle(
        (a, b) in (0usize..4, 0usize..3)
            .prop_flat_map(|(k, l)| (common::arb_form(6, k), common::arb_form(6, l)))
    ) {
        prop_assert!(close(&a.wedge(&b).unwrap(), &common::wedge(&a, &b), 1e-12));
    }

    #[test]
    fn interior_matches_oracle(a in common::arb_form(7, 3), v in prop::collection::vec(-1.0..1.0f64, 7)) {
        prop_assert!(close(&a.interior(&v).unwrap(), &common::interior(&v, &a), 1e-12));
    }

    #[test]
    fn star_matches_oracle(g in common::arb_metric(5), k in 0usize..=5, seed in 0usize..1000) {
        let len = g2_core::exterior::basis_len(5, k);
        let coeffs: Vec<f64> = (0..len).map(|i| (((i + 1) * (seed + 7)) % 13) as f64 / 6.0 - 1.0).collect();
        let a = KForm::from_coeffs(5, k, coeffs).unwrap();
        let hs = HodgeStar::with_orientation(&g, 1.0).unwrap();
        let expected = common::star(g.matrix(), &a);
        prop_assert!(close(&hs.star(&a).unwrap(), &expected, 1e-9));
        let ip = hs.inner(&a, &a).unwrap();
        prop_assert!((ip - common::inner(g.matrix(), &a, &a)).abs() < 1e-9 * ip.abs().max(1.0));
    }

    #[test]
    fn differential_matches_oracle(idx in 0usize..16, k in 0usize..4, seed in any::<u64>()) {
        let algs = common::catalog_algebras();
        let (_, alg) = &algs[idx % algs.len()];
        let n = alg.dim();
        let len = g2_core::exterior::basis_len(n, k);
        let coeffs: Vec<f64> = (0..len)
            .map(|i| ((seed.wrapping_mul(i as u64 + 3) >> 7) % 17) as f64 / 8.0 - 1.0)
            .collect();
        let a = KForm::from_coeffs(n, k, coeffs).unwrap();
        prop_assert!(close(&alg.ce_diff(&a).unwrap(), &common::ce_diff(alg, &a), 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ricci_matches_oracle(idx in 0usize..16, g in common::arb_metric(7)) {
        let algs = common::seven_dim_algebras();
        let (_, alg) = &algs[idx % algs.len()];
        let lib = ricci(alg, &g).unwrap();
        let oracle = common::ricci(alg, g.matrix());
        prop_assert!((lib - oracle).amax() < 1e-9);
    }

    #[test]
    fn g2_metric_matches_oracle(a in common::arb_near_identity(7)) {
        let phi = phi_std().pullback(&a).unwrap();
        let g2 = G2Structure::new(Arc::new(LieAlgebra::abelian(7).unwrap()), phi.clone()).unwrap();
        let oracle = common::g2_metric(&phi);
        prop_assert!((g2.metric().matrix() - &oracle).amax() < 1e-10);
        // pulling back φ_std by A gives the metric AᵀA
        prop_assert!((oracle - a.transpose() * &a).amax() < 1e-10);
    }
}

#[test]
fn star_ricci_matches_oracle_on_nilsolitons() {
    for name in ["n2", "n4", "s_ext_h2"] {
        let e = catalog(name).unwrap();
        let alg = e.algebra().unwrap();
        let phi = e.form("phi").unwrap();
        let g2 = G2Structure::new(Arc::new(alg.clone()), phi.clone()).unwrap();
        let lib = star_ricci(&g2).unwrap();
        let oracle = common::star_ricci(&alg, g2.metric().matrix(), phi);
        assert!((&lib.matrix - &oracle).amax() < 1e-10, "{name}");
        assert!((&lib.matrix - lib.matrix.transpose()).amax() < 1e-10);
    }
}

#[test]
fn star_ricci_with_non_orthonormal_metric() {
    let e = catalog("n2").unwrap();
    let alg = e.algebra().unwrap();
    let mut a = DMatrix::identity(7, 7);
    a[(6, 6)] = 2.0;
    a[(0, 1)] = 0.5;
    let phi = e.form("phi").unwrap().pullback(&a).unwrap();
    let g2 = G2Structure::new(Arc::new(alg.clone()), phi.clone()).unwrap();
    assert!((g2.metric().matrix() - a.transpose() * &a).amax() < 1e-12);
    let lib = star_ricci(&g2).unwrap();
    let oracle = common::star_ricci(&alg, g2.metric().matrix(), &phi);
    assert!((&lib.matrix - &oracle).amax() < 1e-10);
    let trace = (g2.metric().inverse().unwrap() * &lib.matrix).trace();
    assert_abs_diff_eq!(lib.scal, trace, epsilon = 1e-10);
}

/// Regression values for `Ric*` of `φ₂` on `n2`, first computed with the oracle above.
#[test]
fn star_ricci_snapshot_n2() {
    let e = catalog("n2").unwrap();
    let g2 = G2Structure::new(
        Arc::new(e.algebra().unwrap()),
        e.form("phi").unwrap().clone(),
    )
    .unwrap();
    let r = star_ricci(&g2).unwrap();
    let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[
        2.0, 3.0, 3.0, -2.0, -1.0, -1.0, -2.0,
    ]));
    assert!((&r.matrix - expected).amax() < 1e-10, "{}", r.matrix);
    assert_abs_diff_eq!(r.scal, 2.0, epsilon = 1e-10);
}
