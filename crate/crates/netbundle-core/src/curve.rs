//! Adoption-probability curves on `[0, 1]`.
//!
//! An adoption curve maps an anticipated adoption level `x` to the fraction
//! of the population that prefers adopting at that level. Curves come in
//! two shapes: piecewise-constant steps (finitely many affinity values) and
//! continuous functions (affinity densities). The equilibrium machinery in
//! [`crate::equilibrium`] only needs evaluation plus, for steps, the jump
//! structure.

use alloc::boxed::Box;
use alloc::vec::Vec;

/// One jump location of a step curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    /// `true` when the level to the left extends to `x` itself, i.e. the
    /// curve jumps just after `x`; `false` when the jump lands on `x`.
    pub left_closed: bool,
}

/// Piecewise-constant curve: `levels[k]` on the k-th interval between
/// consecutive breakpoints.
#[derive(Debug, Clone)]
pub struct StepCurve {
    breakpoints: Vec<Breakpoint>,
    levels: Vec<f64>,
}

impl StepCurve {
    /// Breakpoints must be finite and strictly increasing; there must be
    /// exactly one more level than breakpoints, every level in `[0, 1]`.
    pub fn new(breakpoints: Vec<Breakpoint>, levels: Vec<f64>) -> Self {
        assert_eq!(levels.len(), breakpoints.len() + 1, "levels/breakpoints mismatch");
        for w in breakpoints.windows(2) {
            assert!(w[0].x < w[1].x, "breakpoints must be strictly increasing");
        }
        for b in &breakpoints {
            assert!(b.x.is_finite(), "breakpoint must be finite");
        }
        for &l in &levels {
            assert!((0.0..=1.0).contains(&l), "level {l} outside [0, 1]");
        }
        StepCurve { breakpoints, levels }
    }

    /// Constant curve without jumps.
    pub fn constant(level: f64) -> Self {
        StepCurve::new(Vec::new(), alloc::vec![level])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let passed = self
            .breakpoints
            .iter()
            .take_while(|b| x > b.x || (x == b.x && !b.left_closed))
            .count();
        self.levels[passed]
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }
}

/// Curve backed by an arbitrary continuous function of `x`.
pub struct ContinuousCurve {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ContinuousCurve {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ContinuousCurve { f: Box::new(f) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl core::fmt::Debug for ContinuousCurve {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("ContinuousCurve")
    }
}

/// Either curve shape, with uniform evaluation.
#[derive(Debug)]
pub enum AdoptionCurve {
    Step(StepCurve),
    Continuous(ContinuousCurve),
}

impl AdoptionCurve {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            AdoptionCurve::Step(s) => s.eval(x),
            AdoptionCurve::Continuous(c) => c.eval(x),
        }
    }

    pub fn is_step(&self) -> bool {
        matches!(self, AdoptionCurve::Step(_))
    }

    /// Jump locations for step curves, empty for continuous ones.
    pub fn breakpoints(&self) -> &[Breakpoint] {
        match self {
            AdoptionCurve::Step(s) => s.breakpoints(),
            AdoptionCurve::Continuous(_) => &[],
        }
    }
}
