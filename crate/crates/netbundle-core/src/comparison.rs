//! Separate-versus-bundle equilibrium comparison and feasibility tables.
//!
//! A scenario pairs two services; `compare` puts each service's separate
//! lowest stable equilibrium next to the bundle's and classifies the move
//! as Win, Lose or Same per service. `feasibility_table` then checks, per
//! combination of separate-equilibria row and bundle-equilibrium column,
//! which (delta1, delta2) marks actually occur: annotated cells are
//! settled by condition algebra, the rest by rejection-sampled witnesses.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::continuous::{bundle_curve, CopulaParams};
use crate::equilibrium::{
    bun_disc_labeled, bun_neg_labeled, bun_pos_labeled, equilibria_bundle_indep,
    lseq_bundle_discrete, lseq_bundle_negcorr, lseq_bundle_poscorr, lseq_separate_continuous,
    lseq_separate_discrete, sep_cont_labeled, sep_disc_labeled, solve_lseq, SolverConfig,
};
use crate::error::{Error, Result};
use crate::numerics::QuadratureConfig;
use crate::simulation::mix64;

/// Default tolerance band for Win/Lose/Same classification. Catalog
/// equilibria are exact closed forms, so real ties sit well inside it.
pub const DEFAULT_DELTA_TOL: f64 = 1e-9;

/// Cost and externality of one service (or of the bundle, summed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceParams {
    pub c: f64,
    pub e: f64,
}

impl ServiceParams {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [("cost", self.c), ("externality", self.e)] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what, value: v });
            }
            if v < 0.0 {
                return Err(Error::OutOfRange {
                    what,
                    value: v,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        Ok(())
    }
}

/// How user affinities are distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AffinityModel {
    /// Correlated uniforms on (0,1) from the Gaussian construction.
    Continuous,
    /// Symmetric two-point affinities in {0,1} with P(U=1) = 1/2.
    Discrete,
}

/// Two services, the affinity model, and the affinity correlation.
/// Bundle parameters are the sums c1+c2 and e1+e2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub s1: ServiceParams,
    pub s2: ServiceParams,
    pub model: AffinityModel,
    pub rho: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.s1.validate()?;
        self.s2.validate()?;
        if self.rho.is_nan() || !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::OutOfRange {
                what: "rho",
                value: self.rho,
                lo: -1.0,
                hi: 1.0,
            });
        }
        Ok(())
    }

    /// Additive bundle parameters; no economies of scope.
    pub fn bundle(&self) -> ServiceParams {
        ServiceParams {
            c: self.s1.c + self.s2.c,
            e: self.s1.e + self.s2.e,
        }
    }
}

/// Direction a service's adoption moves when sold in the bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Delta {
    Win,
    Lose,
    Same,
}

impl Delta {
    pub fn letter(self) -> char {
        match self {
            Delta::Win => 'W',
            Delta::Lose => 'L',
            Delta::Same => 'S',
        }
    }
}

/// Separate equilibria, bundle equilibrium, and the per-service verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeTriple {
    pub x1: f64,
    pub x2: f64,
    pub xb: f64,
    pub delta1: Delta,
    pub delta2: Delta,
}

impl OutcomeTriple {
    /// Two-letter mark, e.g. "WL" for service 1 winning, service 2 losing.
    pub fn mark(&self) -> [u8; 2] {
        [self.delta1.letter() as u8, self.delta2.letter() as u8]
    }
}

/// Win iff the bundle clears the separate level by more than `tol`, Lose
/// iff it falls short by more than `tol`, Same inside the band.
pub fn classify_delta(x_sep: f64, x_bun: f64, tol: f64) -> Delta {
    if x_bun > x_sep + tol {
        Delta::Win
    } else if x_bun < x_sep - tol {
        Delta::Lose
    } else {
        Delta::Same
    }
}

/// Compares separate and bundled equilibria with default solver and
/// quadrature settings.
pub fn compare(sc: &Scenario, tol: f64) -> Result<OutcomeTriple> {
    compare_with(sc, tol, &SolverConfig::default(), &QuadratureConfig::default())
}

/// As `compare`, with explicit solver and quadrature configuration for
/// the general-correlation continuous bundle (the only path that needs
/// numerics; every other case has a closed-form catalog).
pub fn compare_with(
    sc: &Scenario,
    tol: f64,
    solver: &SolverConfig,
    quad: &QuadratureConfig,
) -> Result<OutcomeTriple> {
    sc.validate()?;
    let b = sc.bundle();
    let (x1, x2, xb) = match sc.model {
        AffinityModel::Discrete => (
            lseq_separate_discrete(sc.s1.c, sc.s1.e),
            lseq_separate_discrete(sc.s2.c, sc.s2.e),
            lseq_bundle_discrete(b.c, b.e, sc.rho),
        ),
        AffinityModel::Continuous => {
            let x1 = lseq_separate_continuous(sc.s1.c, sc.s1.e);
            let x2 = lseq_separate_continuous(sc.s2.c, sc.s2.e);
            let xb = if sc.rho == 1.0 {
                lseq_bundle_poscorr(b.c, b.e)
            } else if sc.rho == -1.0 {
                lseq_bundle_negcorr(b.c, b.e)
            } else if sc.rho == 0.0 {
                equilibria_bundle_indep(b.c, b.e).lseq
            } else {
                let params = CopulaParams::with_quad(sc.rho, *quad)?;
                let curve = bundle_curve(b.c, b.e, &params)?;
                solve_lseq(&curve, solver)?.0
            };
            (x1, x2, xb)
        }
    };
    Ok(OutcomeTriple {
        x1,
        x2,
        xb,
        delta1: classify_delta(x1, xb, tol),
        delta2: classify_delta(x2, xb, tol),
    })
}

/// Which printed comparison table to verify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableModel {
    /// Continuous affinities at correlation +1; columns 0, interior, 1.
    PosCorr,
    /// Continuous affinities at correlation -1; columns 0, 1.
    NegCorr,
    /// Two-point affinities at the given correlation; columns are the
    /// four bundle plateaus. Requires |rho| < 1: at the extremes two
    /// plateaus coincide and the marks lose their meaning.
    Discrete(f64),
}

impl TableModel {
    fn tag(self) -> u64 {
        match self {
            TableModel::PosCorr => mix64(101, 0),
            TableModel::NegCorr => mix64(102, 0),
            TableModel::Discrete(rho) => mix64(103, rho.to_bits()),
        }
    }

    pub fn n_cols(self) -> usize {
        match self {
            TableModel::PosCorr => 3,
            TableModel::NegCorr => 2,
            TableModel::Discrete(_) => 4,
        }
    }

    pub fn row_labels(self) -> &'static [&'static str] {
        match self {
            TableModel::PosCorr | TableModel::NegCorr => &[
                "(0,0)",
                "(0,int)",
                "(0,1)",
                "(int,0)",
                "(1,0)",
                "(int,int)",
                "(int,1)",
                "(1,int)",
                "(1,1)",
            ],
            TableModel::Discrete(_) => &[
                "(0,0)",
                "(0,1/2)",
                "(0,1)",
                "(1/2,0)",
                "(1,0)",
                "(1/2,1/2)",
                "(1/2,1)",
                "(1,1/2)",
                "(1,1)",
            ],
        }
    }

    pub fn col_labels(self) -> &'static [&'static str] {
        match self {
            TableModel::PosCorr => &["0", "interior", "1"],
            TableModel::NegCorr => &["0", "1"],
            TableModel::Discrete(_) => &["0", "(1+rho)/4", "(3-rho)/4", "1"],
        }
    }
}

/// A parameter point that landed in a cell, with its full outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessPoint {
    pub scenario: Scenario,
    pub outcome: OutcomeTriple,
}

/// What the verifier concluded about one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// Annotated always-holds and the implication follows from the row
    /// and column conditions alone.
    ConfirmedTrue,
    /// Annotated never-occurs and no sample landed in the cell.
    ConfirmedFalse,
    /// Unannotated cell with at least one constructive witness.
    Witnessed(WitnessPoint),
    /// Unannotated cell no sample reached; not a claim of infeasibility.
    NotFound,
    /// The table's printed claim failed: a sample landed in a never-occurs
    /// cell, produced a mark outside the printed set, or an always-holds
    /// implication did not verify.
    Discrepancy(Option<WitnessPoint>),
}

/// One row-column cell of a feasibility table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableCell {
    /// Marks the printed table allows for this cell (possible
    /// (delta1, delta2) letter pairs).
    pub allowed_marks: &'static [&'static str],
    /// True/False when the printed table annotates the cell as
    /// always-holds/never-occurs, None otherwise.
    pub annotation: Option<bool>,
    /// How many accepted samples landed here.
    pub hits: u64,
    pub verdict: Verdict,
}

/// Verified feasibility table for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityTable {
    pub model: TableModel,
    cells: Vec<TableCell>,
}

impl FeasibilityTable {
    pub fn cell(&self, row: usize, col: usize) -> &TableCell {
        &self.cells[row * self.model.n_cols() + col]
    }

    pub fn cells(&self) -> &[TableCell] {
        &self.cells
    }

    pub fn has_discrepancy(&self) -> bool {
        self.cells
            .iter()
            .any(|c| matches!(c.verdict, Verdict::Discrepancy(_)))
    }
}

/// Separate-equilibrium class index per service: 0 = zero adoption,
/// 1 = middle (interior crossing or the half plateau), 2 = full adoption.
/// Rows pair two of these, in the printed order.
const ROW_CLASSES: [(usize, usize); 9] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (1, 0),
    (2, 0),
    (1, 1),
    (1, 2),
    (2, 1),
    (2, 2),
];

const POS_MARKS: [&[&str]; 27] = [
    &["SS"], &["WW"], &["WW"],
    &["SL"], &["WL", "WW"], &["WW"],
    &["SL"], &["WL"], &["WS"],
    &["LS"], &["LW", "WW"], &["WW"],
    &["LS"], &["LW"], &["SW"],
    &["LL"], &["WL", "LW"], &["WW"],
    &["LL"], &["WL"], &["WS"],
    &["LL"], &["LW"], &["SW"],
    &["LL"], &["LL"], &["SS"],
];

const POS_ANN: [Option<bool>; 27] = [
    Some(true), Some(false), Some(false),
    None, None, None,
    None, None, None,
    None, None, None,
    None, None, None,
    Some(false), None, Some(false),
    Some(false), None, None,
    Some(false), None, None,
    Some(false), Some(false), Some(true),
];

const NEG_MARKS: [&[&str]; 18] = [
    &["SS"], &["WW"],
    &["SL"], &["WW"],
    &["SL"], &["WS"],
    &["LS"], &["WW"],
    &["LS"], &["SW"],
    &["LL"], &["WW"],
    &["LL"], &["WS"],
    &["LL"], &["SW"],
    &["LL"], &["SS"],
];

const NEG_ANN: [Option<bool>; 18] = [
    Some(true), Some(false),
    Some(true), Some(false),
    Some(true), Some(false),
    Some(true), Some(false),
    Some(true), Some(false),
    None, None,
    None, None,
    None, None,
    None, None,
];

const DISC_MARKS: [&[&str]; 36] = [
    &["SS"], &["WW"], &["WW"], &["WW"],
    &["SL"], &["WL"], &["WW"], &["WW"],
    &["SL"], &["WL"], &["WL"], &["WS"],
    &["LS"], &["LW"], &["WW"], &["WW"],
    &["LS"], &["LW"], &["LW"], &["SW"],
    &["LL"], &["LL"], &["WW"], &["WW"],
    &["LL"], &["LL"], &["WL"], &["WS"],
    &["LL"], &["LL"], &["LW"], &["SW"],
    &["LL"], &["LL"], &["LL"], &["SS"],
];

const DISC_ANN: [Option<bool>; 36] = [
    Some(true), Some(false), Some(false), Some(false),
    None, None, None, None,
    None, None, None, None,
    None, None, None, None,
    None, None, None, None,
    Some(false), None, None, None,
    Some(false), None, None, None,
    Some(false), None, None, None,
    Some(false), None, None, None,
];

/// What one separate-equilibrium class implies about its service's
/// parameters, in the strict form the row conditions print. Boundary
/// points (e.g. c exactly 1) have sampling probability zero.
struct ClassBounds {
    c_gt: f64,
    c_lt: f64,
    e_lt_c: bool,
    e_gt_c: bool,
}

fn class_bounds(model: TableModel, class: usize) -> ClassBounds {
    let continuous = !matches!(model, TableModel::Discrete(_));
    match class {
        0 => ClassBounds {
            c_gt: 1.0,
            c_lt: f64::INFINITY,
            e_lt_c: false,
            e_gt_c: false,
        },
        1 => ClassBounds {
            c_gt: 0.0,
            c_lt: 1.0,
            e_lt_c: continuous,
            e_gt_c: false,
        },
        _ => ClassBounds {
            c_gt: 0.0,
            c_lt: 1.0,
            e_lt_c: false,
            e_gt_c: continuous,
        },
    }
}

/// Bundle-parameter facts implied by a row: strict bounds on c = c1+c2
/// and whether e < c or e > c holds throughout the row.
struct RowFacts {
    c_gt: f64,
    c_lt: f64,
    e_lt_c: bool,
    e_gt_c: bool,
}

fn row_facts(model: TableModel, row: usize) -> RowFacts {
    let (a, b) = ROW_CLASSES[row];
    let (ba, bb) = (class_bounds(model, a), class_bounds(model, b));
    RowFacts {
        c_gt: ba.c_gt + bb.c_gt,
        c_lt: ba.c_lt + bb.c_lt,
        e_lt_c: ba.e_lt_c && bb.e_lt_c,
        e_gt_c: ba.e_gt_c && bb.e_gt_c,
    }
}

enum Algebra {
    Forced,
    Excluded,
    Open,
}

/// Decides a column purely from the row's parameter bounds: Forced when
/// the row conditions imply the column's, Excluded when they contradict
/// them, Open otherwise.
fn col_algebra(model: TableModel, facts: &RowFacts, col: usize) -> Algebra {
    match model {
        TableModel::PosCorr => match col {
            // bundle column conditions: c >= 2 / e < c < 2 / e >= c, c < 2
            0 => {
                if facts.c_gt >= 2.0 {
                    Algebra::Forced
                } else if facts.c_lt <= 2.0 {
                    Algebra::Excluded
                } else {
                    Algebra::Open
                }
            }
            1 => {
                if facts.c_lt <= 2.0 && facts.e_lt_c {
                    Algebra::Forced
                } else if facts.c_gt >= 2.0 || facts.e_gt_c {
                    Algebra::Excluded
                } else {
                    Algebra::Open
                }
            }
            _ => {
                if facts.c_lt <= 2.0 && facts.e_gt_c {
                    Algebra::Forced
                } else if facts.c_gt >= 2.0 || facts.e_lt_c {
                    Algebra::Excluded
                } else {
                    Algebra::Open
                }
            }
        },
        TableModel::NegCorr => {
            // columns: c > 1 / c < 1
            let (gt, lt) = (facts.c_gt >= 1.0, facts.c_lt <= 1.0);
            match (col, gt, lt) {
                (0, true, _) | (1, _, true) => Algebra::Forced,
                (0, _, true) | (1, true, _) => Algebra::Excluded,
                _ => Algebra::Open,
            }
        }
        TableModel::Discrete(_) => {
            // only the cost bound is decidable from the row classes; the
            // three partial-adoption columns also involve e versus rho
            if col == 0 {
                if facts.c_gt >= 2.0 {
                    Algebra::Forced
                } else if facts.c_lt <= 2.0 {
                    Algebra::Excluded
                } else {
                    Algebra::Open
                }
            } else if facts.c_gt >= 2.0 {
                Algebra::Excluded
            } else {
                Algebra::Open
            }
        }
    }
}

fn class_of(model: TableModel, c: f64, e: f64) -> usize {
    let label = match model {
        TableModel::Discrete(_) => sep_disc_labeled(c, e).0,
        _ => sep_cont_labeled(c, e).0,
    };
    match label {
        "0" => 0,
        "interior" | "half" => 1,
        _ => 2,
    }
}

/// Separate equilibria plus the bundle's column index and value.
fn eval_point(model: TableModel, c1: f64, e1: f64, c2: f64, e2: f64) -> (f64, f64, usize, f64) {
    let (c, e) = (c1 + c2, e1 + e2);
    match model {
        TableModel::PosCorr => {
            let (label, xb) = bun_pos_labeled(c, e);
            let col = match label {
                "0" => 0,
                "interior" => 1,
                _ => 2,
            };
            (
                lseq_separate_continuous(c1, e1),
                lseq_separate_continuous(c2, e2),
                col,
                xb,
            )
        }
        TableModel::NegCorr => {
            let (label, xb) = bun_neg_labeled(c, e);
            let col = if label == "0" { 0 } else { 1 };
            (
                lseq_separate_continuous(c1, e1),
                lseq_separate_continuous(c2, e2),
                col,
                xb,
            )
        }
        TableModel::Discrete(rho) => {
            let (label, xb) = bun_disc_labeled(c, e, rho);
            let col = match label {
                "0" => 0,
                "low" => 1,
                "high" => 2,
                _ => 3,
            };
            (
                lseq_separate_discrete(c1, e1),
                lseq_separate_discrete(c2, e2),
                col,
                xb,
            )
        }
    }
}

fn table_consts(model: TableModel) -> (&'static [&'static [&'static str]], &'static [Option<bool>]) {
    match model {
        TableModel::PosCorr => (&POS_MARKS, &POS_ANN),
        TableModel::NegCorr => (&NEG_MARKS, &NEG_ANN),
        TableModel::Discrete(_) => (&DISC_MARKS, &DISC_ANN),
    }
}

/// Verifies one printed comparison table.
///
/// For every row, draws parameter quadruples uniformly from [0,3]^4 and
/// keeps those whose separate equilibria land in the row, until
/// `samples_per_row` are accepted (or an attempt cap is hit, leaving
/// unreached cells NotFound rather than silently complete). Each accepted
/// draw is compared with tolerance `DEFAULT_DELTA_TOL` and binned by the
/// bundle's column; marks outside the printed set, or any sample in a
/// never-occurs cell, flag a discrepancy. Row searches use seeds derived
/// from `(seed, model, row)`, so results do not depend on row order.
pub fn feasibility_table(
    model: TableModel,
    samples_per_row: u32,
    seed: u64,
) -> Result<FeasibilityTable> {
    if samples_per_row == 0 {
        return Err(Error::OutOfRange {
            what: "samples_per_row",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    if let TableModel::Discrete(rho) = model {
        if rho.is_nan() || !(-1.0..=1.0).contains(&rho) {
            return Err(Error::OutOfRange {
                what: "rho",
                value: rho,
                lo: -1.0,
                hi: 1.0,
            });
        }
        if rho == 1.0 || rho == -1.0 {
            return Err(Error::DegenerateCorrelation { rho });
        }
    }

    let (marks, annotations) = table_consts(model);
    let n_cols = model.n_cols();
    let scenario_model = match model {
        TableModel::Discrete(_) => AffinityModel::Discrete,
        _ => AffinityModel::Continuous,
    };
    let scenario_rho = match model {
        TableModel::PosCorr => 1.0,
        TableModel::NegCorr => -1.0,
        TableModel::Discrete(rho) => rho,
    };

    let mut hits = alloc::vec![0u64; 9 * n_cols];
    let mut witnesses: Vec<Option<WitnessPoint>> = alloc::vec![None; 9 * n_cols];
    let mut mark_violation: Vec<Option<WitnessPoint>> = alloc::vec![None; 9 * n_cols];

    for (row, &(want_a, want_b)) in ROW_CLASSES.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(mix64(seed, model.tag()), row as u64));
        let mut accepted = 0u32;
        let mut attempts: u64 = 0;
        let cap = u64::from(samples_per_row) * 20_000;
        while accepted < samples_per_row && attempts < cap {
            attempts += 1;
            let c1 = 3.0 * rng.random::<f64>();
            let e1 = 3.0 * rng.random::<f64>();
            let c2 = 3.0 * rng.random::<f64>();
            let e2 = 3.0 * rng.random::<f64>();
            if class_of(model, c1, e1) != want_a || class_of(model, c2, e2) != want_b {
                continue;
            }
            accepted += 1;
            let (x1, x2, col, xb) = eval_point(model, c1, e1, c2, e2);
            let outcome = OutcomeTriple {
                x1,
                x2,
                xb,
                delta1: classify_delta(x1, xb, DEFAULT_DELTA_TOL),
                delta2: classify_delta(x2, xb, DEFAULT_DELTA_TOL),
            };
            let witness = WitnessPoint {
                scenario: Scenario {
                    s1: ServiceParams { c: c1, e: e1 },
                    s2: ServiceParams { c: c2, e: e2 },
                    model: scenario_model,
                    rho: scenario_rho,
                },
                outcome,
            };
            let idx = row * n_cols + col;
            hits[idx] += 1;
            let mark = outcome.mark();
            let mark_ok = marks[idx].iter().any(|&m| m.as_bytes() == mark);
            if !mark_ok && mark_violation[idx].is_none() {
                mark_violation[idx] = Some(witness);
            }
            if witnesses[idx].is_none() {
                witnesses[idx] = Some(witness);
            }
        }
    }

    let mut cells = Vec::with_capacity(9 * n_cols);
    for row in 0..9 {
        let facts = row_facts(model, row);
        for col in 0..n_cols {
            let idx = row * n_cols + col;
            let algebra = col_algebra(model, &facts, col);
            let verdict = if let Some(w) = mark_violation[idx] {
                Verdict::Discrepancy(Some(w))
            } else {
                match annotations[idx] {
                    Some(true) => {
                        if matches!(algebra, Algebra::Forced) {
                            Verdict::ConfirmedTrue
                        } else {
                            Verdict::Discrepancy(witnesses[idx])
                        }
                    }
                    Some(false) => {
                        if hits[idx] == 0 {
                            Verdict::ConfirmedFalse
                        } else {
                            Verdict::Discrepancy(witnesses[idx])
                        }
                    }
                    None => match witnesses[idx] {
                        Some(w) => Verdict::Witnessed(w),
                        None => Verdict::NotFound,
                    },
                }
            };
            cells.push(TableCell {
                allowed_marks: marks[idx],
                annotation: annotations[idx],
                hits: hits[idx],
                verdict,
            });
        }
    }
    Ok(FeasibilityTable { model, cells })
}
