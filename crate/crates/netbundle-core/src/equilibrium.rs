//! Fixed points of adoption curves: generic iteration and scan solvers
//! plus closed-form equilibrium catalogs for each offering model.

use alloc::vec::Vec;

use crate::continuous::{bundle_thresholds, indep_curve};
use crate::curve::AdoptionCurve;
use crate::discrete::bundle_levels;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// A fixed point of an adoption curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub x_star: f64,
    pub stability: Stability,
}

/// All located fixed points, in increasing order, together with the
/// lowest stable one (falling back to the lowest overall when none is
/// two-sided stable).
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub equilibria: Vec<Equilibrium>,
    pub lseq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::OutOfRange {
                what: "solver tolerance",
                value: self.tol,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if self.max_iter == 0 {
            return Err(Error::OutOfRange {
                what: "solver iteration budget",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        Ok(())
    }
}

/// How a lowest-equilibrium value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LseqMethod {
    Iteration,
    ScanFallback,
}

/// Iterates `x <- h(x)` from zero until the step is at most `tol`.
///
/// For a nondecreasing curve the iterates rise monotonically to the
/// lowest fixed point. Near a tangency the steps can shrink below `tol`
/// before the fixed point is reached, so the returned value is accurate
/// to about `tol / (1 - h'(x*))` rather than `tol` itself.
pub fn lseq_by_iteration(curve: &AdoptionCurve, tol: f64, max_iter: u64) -> Result<f64> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::OutOfRange {
            what: "iteration tolerance",
            value: tol,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let mut x = 0.0f64;
    for _ in 0..max_iter {
        let next = curve.eval(x);
        if (next - x).abs() <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::MaxIterations { last: x })
}

// One-sided attraction probes; a plateau of fixed points counts as
// attracting since nearby iterates are not repelled.
fn probe_stability(curve: &AdoptionCurve, x: f64, delta: f64) -> Stability {
    let below_ok = x <= delta || curve.eval(x - delta) >= x - delta;
    let above_ok = x >= 1.0 - delta || curve.eval(x + delta) <= x + delta;
    if below_ok && above_ok {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

fn dedupe_sorted(xs: &mut Vec<f64>, tol: f64) {
    xs.sort_unstable_by(f64::total_cmp);
    xs.dedup_by(|b, a| (*b - *a).abs() <= tol);
}

fn report_from(curve: &AdoptionCurve, mut xs: Vec<f64>, probe_delta: f64) -> EquilibriumReport {
    dedupe_sorted(&mut xs, 1e-9);
    let equilibria: Vec<Equilibrium> = xs
        .iter()
        .map(|&x| Equilibrium {
            x_star: x,
            stability: probe_stability(curve, x, probe_delta),
        })
        .collect();
    let lseq = equilibria
        .iter()
        .find(|eq| eq.stability == Stability::Stable)
        .or(equilibria.first())
        .map_or(0.0, |eq| eq.x_star);
    EquilibriumReport { equilibria, lseq }
}

/// Locates the fixed points of a nondecreasing adoption curve on [0, 1].
///
/// Step curves are solved exactly: a plateau level is a fixed point iff
/// the curve returns it at that abscissa. Continuous curves are scanned
/// on a grid of 10^4 points and each sign change of `h(x) - x` is
/// bisected to `tol`; interior tangencies without a sign change, and
/// curves that coincide with the diagonal on a whole interval, report
/// only the crossings the scan can see.
pub fn find_equilibria(curve: &AdoptionCurve, tol: f64) -> EquilibriumReport {
    assert!(tol.is_finite() && tol > 0.0, "tolerance must be positive");
    let mut xs: Vec<f64> = Vec::new();
    if curve.is_step() {
        for &level in match curve {
            AdoptionCurve::Step(s) => s.levels(),
            AdoptionCurve::Continuous(_) => unreachable!(),
        } {
            if curve.eval(level) == level {
                xs.push(level);
            }
        }
        return report_from(curve, xs, 1e-9);
    }
    const N: usize = 10_000;
    if curve.eval(0.0) == 0.0 {
        xs.push(0.0);
    }
    if curve.eval(1.0) == 1.0 {
        xs.push(1.0);
    }
    let g = |x: f64| curve.eval(x) - x;
    let mut ga = g(0.0);
    for i in 1..=N {
        let b = i as f64 / N as f64;
        let gb = g(b);
        if gb == 0.0 && b < 1.0 {
            xs.push(b);
        } else if ga * gb < 0.0 {
            let mut lo = (i - 1) as f64 / N as f64;
            let mut hi = b;
            let mut glo = ga;
            for _ in 0..200 {
                if hi - lo <= tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if (gm > 0.0) == (glo > 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            xs.push(0.5 * (lo + hi));
        }
        ga = gb;
    }
    report_from(curve, xs, 1e-6)
}

/// Lowest equilibrium by iteration, falling back to the scan solver when
/// the iteration budget runs out (which happens near tangencies, where
/// steps shrink below any fixed budget).
pub fn solve_lseq(curve: &AdoptionCurve, cfg: &SolverConfig) -> Result<(f64, LseqMethod)> {
    cfg.validate()?;
    match lseq_by_iteration(curve, cfg.tol, cfg.max_iter) {
        Ok(x) => Ok((x, LseqMethod::Iteration)),
        Err(Error::MaxIterations { .. }) => {
            Ok((find_equilibria(curve, cfg.tol).lseq, LseqMethod::ScanFallback))
        }
        Err(e) => Err(e),
    }
}

pub(crate) fn sep_cont_labeled(c: f64, e: f64) -> (&'static str, f64) {
    if c >= 1.0 {
        ("0", 0.0)
    } else if e < c {
        ("interior", (1.0 - c) / (1.0 - e))
    } else {
        ("1", 1.0)
    }
}

/// Lowest stable adoption of one continuously-valued service sold
/// separately: zero for costs above the affinity range, the interior
/// crossing `(1-c)/(1-e)` for weak externalities, full adoption when the
/// externality outweighs the cost.
pub fn lseq_separate_continuous(c: f64, e: f64) -> f64 {
    sep_cont_labeled(c, e).1
}

pub(crate) fn bun_pos_labeled(c: f64, e: f64) -> (&'static str, f64) {
    if c >= 2.0 {
        ("0", 0.0)
    } else if e < c {
        ("interior", (2.0 - c) / (2.0 - e))
    } else {
        ("1", 1.0)
    }
}

/// Lowest stable adoption of the bundle under perfectly positively
/// correlated affinities; identical to a single service with cost and
/// externality halved.
pub fn lseq_bundle_poscorr(c: f64, e: f64) -> f64 {
    bun_pos_labeled(c, e).1
}

pub(crate) fn bun_neg_labeled(c: f64, e: f64) -> (&'static str, f64) {
    if c > 1.0 {
        ("0", 0.0)
    } else if c < 1.0 || e > 0.0 {
        ("1", 1.0)
    } else {
        // c = 1 with no externality: the common utility 1 - c never wins
        ("0", 0.0)
    }
}

/// Lowest stable adoption of the bundle under perfectly negatively
/// correlated affinities: every user holds aggregate affinity 1, so the
/// bundle cost alone decides between none and all.
pub fn lseq_bundle_negcorr(c: f64, e: f64) -> f64 {
    bun_neg_labeled(c, e).1
}

pub(crate) fn sep_disc_labeled(c: f64, e: f64) -> (&'static str, f64) {
    if c >= 1.0 {
        ("0", 0.0)
    } else if e <= 2.0 * c {
        ("half", 0.5)
    } else {
        ("1", 1.0)
    }
}

/// Lowest stable adoption of one two-point service sold separately.
pub fn lseq_separate_discrete(c: f64, e: f64) -> f64 {
    sep_disc_labeled(c, e).1
}

pub(crate) fn bun_disc_labeled(c: f64, e: f64, rho: f64) -> (&'static str, f64) {
    let levels = bundle_levels(rho);
    // division-free form of the threshold comparisons so rho = -1 and
    // rho = 1 need no special casing
    if c >= 2.0 {
        ("0", levels[0])
    } else if (1.0 + rho) * e <= 4.0 * (c - 1.0) {
        ("low", levels[1])
    } else if (3.0 - rho) * e <= 4.0 * c {
        ("high", levels[2])
    } else {
        ("1", levels[3])
    }
}

/// Lowest stable adoption of the two-point bundle with affinity
/// correlation `rho`: one of the plateaus `0`, `(1+rho)/4`, `(3-rho)/4`
/// or `1`, picked by how the externality compares with the per-plateau
/// cost thresholds.
pub fn lseq_bundle_discrete(c: f64, e: f64, rho: f64) -> f64 {
    bun_disc_labeled(c, e, rho).1
}

/// Interior fixed-point candidates on the convex branch of the
/// independent-affinity bundle curve; `None` when the discriminant
/// `2(c-2)e + 1` is negative or there is no externality.
pub fn lower_branch_roots(c: f64, e: f64) -> Option<(f64, f64)> {
    if e == 0.0 {
        return None;
    }
    let disc = 2.0 * (c - 2.0) * e + 1.0;
    if disc < 0.0 {
        return None;
    }
    let s = libm::sqrt(disc);
    let base = (c - 2.0) * e + 1.0;
    Some(((base - s) / (e * e), (base + s) / (e * e)))
}

/// Interior fixed-point candidates on the concave branch; `None` when
/// the discriminant `2(e-c)e + 1` is negative or there is no externality.
pub fn upper_branch_roots(c: f64, e: f64) -> Option<(f64, f64)> {
    if e == 0.0 {
        return None;
    }
    let disc = 2.0 * (e - c) * e + 1.0;
    if disc < 0.0 {
        return None;
    }
    let s = libm::sqrt(disc);
    let base = c * e - 1.0;
    Some(((base - s) / (e * e), (base + s) / (e * e)))
}

fn in_lower_window(xi: f64, l: f64, m: f64) -> bool {
    xi > l && xi <= m && (0.0..=1.0).contains(&xi)
}

fn in_upper_window(xi: f64, m: f64, r: f64) -> bool {
    xi > m && xi <= r && (0.0..=1.0).contains(&xi)
}

/// Every equilibrium of the independent-affinity bundle, built from the
/// closed-form branch roots rather than a scan.
///
/// Boundary equilibria exist iff the curve pins them (`h(0) = 0` iff
/// `c >= 2`, `h(1) = 1` iff `e >= c`); each quadratic root counts only
/// inside its own branch window. Stability is probed on the curve.
pub fn equilibria_bundle_indep(c: f64, e: f64) -> EquilibriumReport {
    let curve = indep_curve(c, e);
    if e == 0.0 {
        // flat curve: the constant adoption level is the unique, stable
        // fixed point
        let v = curve.eval(0.0);
        return EquilibriumReport {
            equilibria: alloc::vec![Equilibrium {
                x_star: v,
                stability: Stability::Stable,
            }],
            lseq: v,
        };
    }
    let (l, m, r) = bundle_thresholds(c, e);
    let mut xs: Vec<f64> = Vec::new();
    if c >= 2.0 {
        xs.push(0.0);
    }
    if let Some((lo, hi)) = lower_branch_roots(c, e) {
        for xi in [lo, hi] {
            if in_lower_window(xi, l, m) {
                xs.push(xi);
            }
        }
    }
    if let Some((lo, hi)) = upper_branch_roots(c, e) {
        for xi in [lo, hi] {
            if in_upper_window(xi, m, r) {
                xs.push(xi);
            }
        }
    }
    if e >= c {
        xs.push(1.0);
    }
    report_from(&curve, xs, 1e-7)
}

/// Which closed-form family a region-map point belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumModel {
    SeparateContinuous,
    SeparateDiscrete,
    BundlePosCorr,
    BundleNegCorr,
    BundleIndep,
    BundleDiscrete(f64),
}

/// One `(c, e)` point of a region map: the lowest-equilibrium label and
/// value, plus the four branch-root existence flags (lower -, lower +,
/// upper -, upper +) for the independent-affinity bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub label: &'static str,
    pub lseq: f64,
    pub regions: Option<[bool; 4]>,
}

/// Classifies the lowest equilibrium at `(c, e)` for the given model.
pub fn region_class(c: f64, e: f64, model: EquilibriumModel) -> RegionPoint {
    let (label, lseq, regions) = match model {
        EquilibriumModel::SeparateContinuous => {
            let (label, lseq) = sep_cont_labeled(c, e);
            (label, lseq, None)
        }
        EquilibriumModel::SeparateDiscrete => {
            let (label, lseq) = sep_disc_labeled(c, e);
            (label, lseq, None)
        }
        EquilibriumModel::BundlePosCorr => {
            let (label, lseq) = bun_pos_labeled(c, e);
            (label, lseq, None)
        }
        EquilibriumModel::BundleNegCorr => {
            let (label, lseq) = bun_neg_labeled(c, e);
            (label, lseq, None)
        }
        EquilibriumModel::BundleDiscrete(rho) => {
            let (label, lseq) = bun_disc_labeled(c, e, rho);
            (label, lseq, None)
        }
        EquilibriumModel::BundleIndep => {
            let lseq = equilibria_bundle_indep(c, e).lseq;
            let label = if lseq == 0.0 {
                "0"
            } else if lseq == 1.0 {
                "1"
            } else if lseq <= 0.5 {
                "low"
            } else {
                "high"
            };
            let (l, m, r) = bundle_thresholds(c, e);
            let (ll, lh) = lower_branch_roots(c, e).unwrap_or((f64::NAN, f64::NAN));
            let (ul, uh) = upper_branch_roots(c, e).unwrap_or((f64::NAN, f64::NAN));
            let flags = [
                in_lower_window(ll, l, m),
                in_lower_window(lh, l, m),
                in_upper_window(ul, m, r),
                in_upper_window(uh, m, r),
            ];
            (label, lseq, Some(flags))
        }
    };
    RegionPoint {
        label,
        lseq,
        regions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::{negcorr_curve, poscorr_curve, separate_curve};
    use crate::curve::{ContinuousCurve, StepCurve};
    use crate::discrete;

    fn assert_close(got: f64, want: f64, tol: f64) {
        let diff = (got - want).abs();
        assert!(
            diff <= tol,
            "got {got}, want {want} (diff {diff})"
        );
    }

    #[test]
    fn iteration_walks_up_step_levels() {
        // 0 -> 1/4 -> 3/4 -> 1 for the uncorrelated two-point bundle
        let curve = AdoptionCurve::Step(discrete::bundle_curve(5.0 / 3.0, 10.0 / 3.0, 0.0));
        assert_eq!(lseq_by_iteration(&curve, 0.0, 10).unwrap(), 1.0);
        let sep = AdoptionCurve::Step(discrete::separate_curve(0.5, 0.25));
        assert_eq!(lseq_by_iteration(&sep, 0.0, 10).unwrap(), 0.5);
    }

    #[test]
    fn iteration_reports_budget_exhaustion() {
        let slow = AdoptionCurve::Continuous(ContinuousCurve::new(|x| x + 0.1 * (1.0 - x)));
        let err = lseq_by_iteration(&slow, 1e-18, 10).unwrap_err();
        match err {
            Error::MaxIterations { last } => assert!(last > 0.5 && last < 1.0),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(lseq_by_iteration(&slow, f64::NAN, 10).is_err());
    }

    #[test]
    fn separate_continuous_catalog() {
        assert_eq!(lseq_separate_continuous(1.2, 0.5), 0.0);
        assert_close(lseq_separate_continuous(0.5, 0.25), 2.0 / 3.0, 1e-15);
        assert_eq!(lseq_separate_continuous(0.5, 0.75), 1.0);
        assert_eq!(lseq_separate_continuous(1.0, 0.5), 0.0);
        // matched cost and externality still tip to full adoption
        assert_eq!(lseq_separate_continuous(0.5, 0.5), 1.0);
    }

    #[test]
    fn bundle_poscorr_catalog() {
        assert_eq!(lseq_bundle_poscorr(2.5, 1.0), 0.0);
        assert_close(lseq_bundle_poscorr(1.0, 0.5), 2.0 / 3.0, 1e-15);
        assert_eq!(lseq_bundle_poscorr(1.0, 1.5), 1.0);
        assert_eq!(lseq_bundle_poscorr(2.0, 1.0), 0.0);
        // halved-parameter equivalence with a single service
        for (c, e) in [(1.3, 0.4), (0.7, 1.1), (2.4, 0.2)] {
            assert_eq!(
                lseq_bundle_poscorr(c, e),
                lseq_separate_continuous(c / 2.0, e / 2.0)
            );
        }
    }

    #[test]
    fn bundle_negcorr_catalog() {
        assert_eq!(lseq_bundle_negcorr(1.4, 2.0), 0.0);
        assert_eq!(lseq_bundle_negcorr(0.9, 0.1), 1.0);
        assert_eq!(lseq_bundle_negcorr(0.9, 0.0), 1.0);
        // externality only matters on the cost knife edge
        assert_eq!(lseq_bundle_negcorr(1.0, 0.5), 1.0);
        assert_eq!(lseq_bundle_negcorr(1.0, 0.0), 0.0);
    }

    #[test]
    fn separate_discrete_catalog() {
        for e in [0.0, 0.5, 3.0] {
            assert_eq!(lseq_separate_discrete(4.0 / 3.0, e), 0.0);
        }
        assert_eq!(lseq_separate_discrete(1.0 / 3.0, 1.0 / 3.0), 0.5);
        assert_eq!(lseq_separate_discrete(0.4, 1.0), 1.0);
        assert_eq!(lseq_separate_discrete(1.0, 1.0), 0.0);
        assert_eq!(lseq_separate_discrete(0.5, 1.0), 0.5);
    }

    #[test]
    fn bundle_discrete_catalog() {
        assert_eq!(lseq_bundle_discrete(5.0 / 3.0, 10.0 / 3.0, 0.0), 1.0);
        assert_close(lseq_bundle_discrete(5.0 / 3.0, 10.0 / 3.0, -0.6), 0.1, 1e-15);
        for rho in [-1.0, 0.0, 1.0] {
            assert_eq!(lseq_bundle_discrete(2.2, 1.0, rho), 0.0);
        }
        // perfectly negative correlation pins aggregate affinity at 1
        assert_eq!(lseq_bundle_discrete(1.0, 2.0, -1.0), 0.0);
        assert_eq!(lseq_bundle_discrete(0.9, 0.3, -1.0), 1.0);
        assert_eq!(lseq_bundle_discrete(1.2, 0.8, 1.0), 0.5);
    }

    #[test]
    fn indep_equilibria_on_branch_seam() {
        // e = 2(c-1): the convex-branch double root lands exactly on the
        // branch boundary
        let report = equilibria_bundle_indep(1.5, 1.0);
        assert_eq!(report.equilibria.len(), 1);
        assert_eq!(report.equilibria[0].x_star, 0.5);
        assert_eq!(report.equilibria[0].stability, Stability::Stable);
        assert_eq!(report.lseq, 0.5);
    }

    #[test]
    fn indep_equilibria_generic_cases() {
        let report = equilibria_bundle_indep(1.2, 0.5);
        assert_eq!(report.equilibria.len(), 1);
        assert_close(report.equilibria[0].x_star, 0.59089023002066449, 1e-12);
        assert_eq!(report.equilibria[0].stability, Stability::Stable);

        // full S-shape: stable rest points at both extremes
        let report = equilibria_bundle_indep(2.5, 2.6);
        assert_eq!(report.equilibria.len(), 3);
        assert_eq!(report.equilibria[0].x_star, 0.0);
        assert_eq!(report.equilibria[0].stability, Stability::Stable);
        assert_close(report.equilibria[1].x_star, 0.63123035494174628, 1e-12);
        assert_eq!(report.equilibria[1].stability, Stability::Unstable);
        assert_eq!(report.equilibria[2].x_star, 1.0);
        assert_eq!(report.equilibria[2].stability, Stability::Stable);
        assert_eq!(report.lseq, 0.0);

        let report = equilibria_bundle_indep(1.0, 1.0);
        assert_eq!(report.equilibria.len(), 1);
        assert_eq!(report.equilibria[0].x_star, 1.0);
        assert_eq!(report.lseq, 1.0);

        let report = equilibria_bundle_indep(2.5, 0.1);
        assert_eq!(report.equilibria.len(), 1);
        assert_eq!(report.equilibria[0].x_star, 0.0);

        // no externality: the flat curve fixes its own constant level
        let report = equilibria_bundle_indep(1.0, 0.0);
        assert_eq!(report.equilibria.len(), 1);
        assert_eq!(report.equilibria[0].x_star, 0.5);
        assert_eq!(report.lseq, 0.5);
    }

    #[test]
    fn scan_matches_closed_forms() {
        let report = find_equilibria(&separate_curve(1.5, 2.0), 1e-10);
        assert_eq!(report.equilibria.len(), 3);
        assert_eq!(report.equilibria[0].x_star, 0.0);
        assert_eq!(report.equilibria[0].stability, Stability::Stable);
        assert_close(report.equilibria[1].x_star, 0.5, 1e-9);
        assert_eq!(report.equilibria[1].stability, Stability::Unstable);
        assert_eq!(report.equilibria[2].x_star, 1.0);
        assert_eq!(report.equilibria[2].stability, Stability::Stable);
        assert_eq!(report.lseq, 0.0);

        let report = find_equilibria(&poscorr_curve(1.0, 0.5), 1e-10);
        assert_eq!(report.equilibria.len(), 1);
        assert_close(report.equilibria[0].x_star, 2.0 / 3.0, 1e-9);
        assert_eq!(report.equilibria[0].stability, Stability::Stable);

        let report = find_equilibria(&negcorr_curve(1.4, 1.0), 1e-10);
        assert_eq!(report.equilibria.len(), 2);
        assert_eq!(report.equilibria[0].x_star, 0.0);
        assert_eq!(report.equilibria[1].x_star, 1.0);
        assert_eq!(report.lseq, 0.0);

        let scan = find_equilibria(&indep_curve(1.2, 0.5), 1e-10);
        let analytic = equilibria_bundle_indep(1.2, 0.5);
        assert_eq!(scan.equilibria.len(), analytic.equilibria.len());
        assert_close(scan.lseq, analytic.lseq, 1e-8);

        let report = find_equilibria(
            &AdoptionCurve::Step(discrete::bundle_curve(5.0 / 3.0, 10.0 / 3.0, -0.6)),
            1e-10,
        );
        let xs: Vec<f64> = report.equilibria.iter().map(|eq| eq.x_star).collect();
        assert_eq!(xs, alloc::vec![0.25 * 0.4, 1.0]);
        assert_eq!(report.lseq, 0.25 * 0.4);
    }

    #[test]
    fn scan_handles_degenerate_diagonal() {
        // h(x) = x everywhere: only the pinned endpoints are reported
        let diag = AdoptionCurve::Continuous(ContinuousCurve::new(|x| x));
        let report = find_equilibria(&diag, 1e-10);
        assert!(report.equilibria.iter().any(|eq| eq.x_star == 0.0));
        assert!(report.equilibria.iter().any(|eq| eq.x_star == 1.0));
        assert_eq!(report.lseq, 0.0);
    }

    #[test]
    fn solve_lseq_reports_method() {
        let cfg = SolverConfig::default();
        let (x, method) = solve_lseq(&poscorr_curve(1.0, 0.5), &cfg).unwrap();
        assert_close(x, 2.0 / 3.0, 1e-8);
        assert_eq!(method, LseqMethod::Iteration);

        let tight = SolverConfig {
            tol: 1e-14,
            max_iter: 5,
        };
        let (x, method) = solve_lseq(&poscorr_curve(1.0, 0.5), &tight).unwrap();
        assert_close(x, 2.0 / 3.0, 1e-8);
        assert_eq!(method, LseqMethod::ScanFallback);

        assert!(solve_lseq(
            &poscorr_curve(1.0, 0.5),
            &SolverConfig {
                tol: 0.0,
                max_iter: 5
            }
        )
        .is_err());
    }

    #[test]
    fn region_labels_by_model() {
        let p = region_class(1.2, 0.5, EquilibriumModel::SeparateContinuous);
        assert_eq!((p.label, p.lseq), ("0", 0.0));
        let p = region_class(0.5, 0.25, EquilibriumModel::SeparateContinuous);
        assert_eq!(p.label, "interior");
        let p = region_class(0.5, 1.0, EquilibriumModel::SeparateDiscrete);
        assert_eq!((p.label, p.lseq), ("half", 0.5));
        let p = region_class(1.0, 0.5, EquilibriumModel::BundlePosCorr);
        assert_eq!(p.label, "interior");
        let p = region_class(1.4, 2.0, EquilibriumModel::BundleNegCorr);
        assert_eq!((p.label, p.lseq), ("0", 0.0));
        let p = region_class(5.0 / 3.0, 10.0 / 3.0, EquilibriumModel::BundleDiscrete(-0.6));
        assert_eq!(p.label, "low");
        assert_close(p.lseq, 0.1, 1e-15);
        assert_eq!(p.regions, None);

        let p = region_class(2.5, 2.6, EquilibriumModel::BundleIndep);
        assert_eq!(p.label, "0");
        assert_eq!(p.regions, Some([false, false, true, false]));
        let p = region_class(1.2, 0.5, EquilibriumModel::BundleIndep);
        assert_eq!(p.label, "high");
        assert_eq!(p.regions, Some([false, false, false, true]));
        let p = region_class(1.5, 1.0, EquilibriumModel::BundleIndep);
        assert_eq!(p.label, "low");
        assert_eq!(p.regions, Some([true, true, false, false]));
        let p = region_class(1.0, 1.0, EquilibriumModel::BundleIndep);
        assert_eq!(p.label, "1");
        assert_eq!(p.regions, Some([false, false, false, true]));
    }

    #[test]
    fn probe_classifies_plateau_as_stable() {
        let flat = AdoptionCurve::Step(StepCurve::constant(0.3));
        let report = find_equilibria(&flat, 1e-10);
        assert_eq!(report.equilibria.len(), 1);
        assert_eq!(report.equilibria[0].x_star, 0.3);
        assert_eq!(report.equilibria[0].stability, Stability::Stable);
    }
}
