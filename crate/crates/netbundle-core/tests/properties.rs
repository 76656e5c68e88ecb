//! Property-based checks that tie the analytic layers together: copula
//! bounds, closed-form catalogs versus raw fixed-point iteration, and the
//! step-curve identities of the two-point model.

use netbundle_core::comparison::{
    classify_delta, compare, AffinityModel, Delta, Scenario, ServiceParams, DEFAULT_DELTA_TOL,
};
use netbundle_core::continuous::{
    adoption_prob_cont, effective_rho, indep_curve, joint_cdf, negcorr_curve, poscorr_curve,
    realized_corr, separate_curve, sum_cdf, CopulaParams,
};
use netbundle_core::curve::AdoptionCurve;
use netbundle_core::discrete::{adoption_prob_disc_bundle, bundle_levels};
use netbundle_core::equilibrium::{
    equilibria_bundle_indep, lseq_bundle_discrete, lseq_bundle_negcorr, lseq_bundle_poscorr,
    lseq_by_iteration, lseq_separate_continuous, lseq_separate_discrete, lower_branch_roots,
    upper_branch_roots,
};
use proptest::prelude::*;

const MARGIN: f64 = 0.05;
const ITER_TOL: f64 = 1e-12;
const MAX_ITER: u64 = 1_000_000;

fn iterate(curve: &AdoptionCurve) -> f64 {
    lseq_by_iteration(curve, ITER_TOL, MAX_ITER).expect("iteration should settle")
}

proptest! {
    // cheap closed-form properties get the full default case count

    #[test]
    fn separate_catalog_matches_iteration(c in 0.0..3.0f64, e in 0.0..3.0f64) {
        prop_assume!((c - 1.0).abs() >= MARGIN);
        prop_assume!((e - c).abs() >= MARGIN);
        prop_assume!((e - 1.0).abs() >= MARGIN);
        let catalog = lseq_separate_continuous(c, e);
        let iter = iterate(&separate_curve(c, e));
        prop_assert!((catalog - iter).abs() <= 1e-9, "catalog {catalog} vs iteration {iter}");
    }

    #[test]
    fn poscorr_bundle_is_rescaled_separate(c in 0.0..4.0f64, e in 0.0..4.0f64) {
        let bundle = lseq_bundle_poscorr(c, e);
        let rescaled = lseq_separate_continuous(0.5 * c, 0.5 * e);
        prop_assert!((bundle - rescaled).abs() <= 1e-14);
    }

    #[test]
    fn poscorr_catalog_matches_iteration(c in 0.0..4.0f64, e in 0.0..4.0f64) {
        prop_assume!((c - 2.0).abs() >= MARGIN);
        prop_assume!((e - c).abs() >= MARGIN);
        prop_assume!((e - 2.0).abs() >= MARGIN);
        let catalog = lseq_bundle_poscorr(c, e);
        let iter = iterate(&poscorr_curve(c, e));
        prop_assert!((catalog - iter).abs() <= 1e-9);
    }

    #[test]
    fn negcorr_catalog_matches_iteration(c in 0.0..3.0f64, e in 0.0..3.0f64) {
        prop_assume!((c - 1.0).abs() >= MARGIN);
        let catalog = lseq_bundle_negcorr(c, e);
        let iter = iterate(&negcorr_curve(c, e));
        prop_assert_eq!(catalog, iter);
    }

    #[test]
    fn discrete_catalogs_match_iteration(
        c1 in 0.0..3.0f64, e1 in 0.0..3.0f64,
        c2 in 0.0..3.0f64, e2 in 0.0..3.0f64,
        rho in -0.95..0.95f64,
    ) {
        prop_assume!((c1 - 1.0).abs() >= MARGIN && (e1 - 2.0 * c1).abs() >= MARGIN);
        let sep = lseq_separate_discrete(c1, e1);
        let sep_iter = iterate(&AdoptionCurve::Step(netbundle_core::discrete::separate_curve(c1, e1)));
        prop_assert_eq!(sep, sep_iter);

        let (c, e) = (c1 + c2, e1 + e2);
        prop_assume!((c - 2.0).abs() >= MARGIN);
        prop_assume!(((1.0 + rho) * e - 4.0 * (c - 1.0)).abs() >= MARGIN);
        prop_assume!(((3.0 - rho) * e - 4.0 * c).abs() >= MARGIN);
        let bun = lseq_bundle_discrete(c, e, rho);
        let bun_iter = iterate(&AdoptionCurve::Step(netbundle_core::discrete::bundle_curve(c, e, rho)));
        prop_assert_eq!(bun, bun_iter);
    }

    #[test]
    fn indep_catalog_matches_iteration(c in 0.0..3.0f64, e in 0.01..3.0f64) {
        prop_assume!((c - 2.0).abs() >= MARGIN);
        prop_assume!((e - c).abs() >= MARGIN);
        // stay clear of tangencies so the fixed point attracts at a
        // uniform rate
        prop_assume!((2.0 * (c - 2.0) * e + 1.0).abs() >= MARGIN);
        prop_assume!((2.0 * (e - c) * e + 1.0).abs() >= MARGIN);
        let catalog = equilibria_bundle_indep(c, e).lseq;
        let iter = iterate(&indep_curve(c, e));
        prop_assert!((catalog - iter).abs() <= 1e-8, "catalog {catalog} vs iteration {iter}");
    }

    #[test]
    fn indep_interior_roots_are_fixed_points(c in 0.1..3.0f64, e in 0.05..3.0f64) {
        // roots are fixed points only inside their branch window; stay a
        // little off the window edges, where the other branch takes over
        let curve = indep_curve(c, e);
        let (l, m, r) = ((c - 2.0) / e, (c - 1.0) / e, c / e);
        if let Some((a, b)) = lower_branch_roots(c, e) {
            for xi in [a, b] {
                if (0.0..=1.0).contains(&xi) && xi > l + 1e-3 && xi < m - 1e-3 {
                    prop_assert!((curve.eval(xi) - xi).abs() <= 1e-9);
                }
            }
        }
        if let Some((a, b)) = upper_branch_roots(c, e) {
            for xi in [a, b] {
                if (0.0..=1.0).contains(&xi) && xi > m + 1e-3 && xi < r - 1e-3 {
                    prop_assert!((curve.eval(xi) - xi).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn discrete_bundle_is_three_atom_mixture(
        c in 0.0..4.0f64, e in 0.01..4.0f64,
        rho in -1.0..=1.0f64, x in 0.0..=1.0f64,
    ) {
        let h = adoption_prob_disc_bundle(x, c, e, rho);
        let (l, m, r) = ((c - 2.0) / e, (c - 1.0) / e, c / e);
        let top = 0.25 * (1.0 + rho);
        let mid = 0.5 * (1.0 - rho);
        let mixture = top * f64::from(u8::from(x > l))
            + mid * f64::from(u8::from(x > m))
            + top * f64::from(u8::from(x > r));
        prop_assert!((h - mixture).abs() <= 1e-12, "h {h} vs mixture {mixture}");
        prop_assert!(bundle_levels(rho).contains(&h));
    }

    #[test]
    fn correlation_maps_round_trip(rho in -1.0..=1.0f64) {
        let realized = realized_corr(rho).unwrap();
        prop_assert!((realized - rho).abs() <= 0.0181);
        let back = effective_rho(realized).unwrap();
        prop_assert!((back - rho).abs() <= 1e-12);
    }

    #[test]
    fn correlation_map_is_monotone(a in -1.0..=1.0f64, b in -1.0..=1.0f64) {
        prop_assume!(a < b);
        prop_assert!(realized_corr(a).unwrap() < realized_corr(b).unwrap());
    }

    #[test]
    fn closed_form_curves_are_monotone(
        c in 0.0..4.0f64, e in 0.0..4.0f64,
        x1 in 0.0..=1.0f64, x2 in 0.0..=1.0f64,
    ) {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        for curve in [
            separate_curve(c, e),
            poscorr_curve(c, e),
            negcorr_curve(c, e),
            indep_curve(c, e),
        ] {
            prop_assert!(curve.eval(lo) <= curve.eval(hi) + 1e-12);
            prop_assert!((0.0..=1.0).contains(&curve.eval(lo)));
        }
    }

    #[test]
    fn delta_classification_is_antisymmetric(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let ab = classify_delta(a, b, DEFAULT_DELTA_TOL);
        let ba = classify_delta(b, a, DEFAULT_DELTA_TOL);
        let flipped = match ab {
            Delta::Win => Delta::Lose,
            Delta::Lose => Delta::Win,
            Delta::Same => Delta::Same,
        };
        prop_assert_eq!(ba, flipped);
    }

    #[test]
    fn compare_symmetry_catalog_paths(
        c1 in 0.0..3.0f64, e1 in 0.0..3.0f64,
        c2 in 0.0..3.0f64, e2 in 0.0..3.0f64,
        rho_disc in -0.99..0.99f64,
        rho_pick in 0usize..4,
    ) {
        let (model, rho) = match rho_pick {
            0 => (AffinityModel::Continuous, 1.0),
            1 => (AffinityModel::Continuous, -1.0),
            2 => (AffinityModel::Continuous, 0.0),
            _ => (AffinityModel::Discrete, rho_disc),
        };
        let sc = Scenario {
            s1: ServiceParams { c: c1, e: e1 },
            s2: ServiceParams { c: c2, e: e2 },
            model,
            rho,
        };
        let swapped = Scenario { s1: sc.s2, s2: sc.s1, ..sc };
        let a = compare(&sc, DEFAULT_DELTA_TOL).unwrap();
        let b = compare(&swapped, DEFAULT_DELTA_TOL).unwrap();
        prop_assert_eq!(a.xb, b.xb);
        prop_assert_eq!(a.x1, b.x2);
        prop_assert_eq!(a.x2, b.x1);
        prop_assert_eq!(a.delta1, b.delta2);
        prop_assert_eq!(a.delta2, b.delta1);
    }
}

proptest! {
    // quadrature-backed properties: a handful of cases each
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn joint_cdf_respects_frechet_bounds(
        u1 in 0.02..0.98f64, u2 in 0.02..0.98f64,
        rho in -0.95..0.95f64,
    ) {
        let params = CopulaParams::new(rho).unwrap();
        let c = joint_cdf(u1, u2, &params).unwrap();
        let lower = (u1 + u2 - 1.0).max(0.0);
        let upper = u1.min(u2);
        prop_assert!(c >= lower - 1e-7 && c <= upper + 1e-7, "C = {c} outside [{lower}, {upper}]");
        let swapped = joint_cdf(u2, u1, &params).unwrap();
        prop_assert!((c - swapped).abs() <= 1e-7);
    }

    #[test]
    fn sum_cdf_is_symmetric_about_one(t in 0.02..0.98f64, rho in -0.9..0.9f64) {
        let params = CopulaParams::new(rho).unwrap();
        let lo = sum_cdf(1.0 - t, &params).unwrap();
        let hi = sum_cdf(1.0 + t, &params).unwrap();
        prop_assert!((lo + hi - 1.0).abs() <= 1e-6, "F(1-t) = {lo}, F(1+t) = {hi}");
    }

    #[test]
    fn adoption_prob_cont_is_monotone_in_x(
        c in 0.0..3.0f64, e in 0.0..3.0f64,
        x1 in 0.0..=1.0f64, x2 in 0.0..=1.0f64,
        rho in -0.9..0.9f64,
    ) {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let params = CopulaParams::new(rho).unwrap();
        let a = adoption_prob_cont(lo, c, e, &params).unwrap();
        let b = adoption_prob_cont(hi, c, e, &params).unwrap();
        prop_assert!(a <= b + 1e-7, "h({lo}) = {a} > h({hi}) = {b}");
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&a));
    }
}
