//! Two-point affinity model: each service is either a good fit (affinity 1)
//! or a poor fit (affinity 0), with uniform marginals and a tunable
//! correlation between the two services' fits.

use alloc::vec;
use alloc::vec::Vec;

use crate::curve::{Breakpoint, StepCurve};
use crate::error::{Error, Result};

/// Joint law of a pair of {0,1} affinities with uniform marginals.
///
/// `p` is the total mass of the mixed cells (0,1) and (1,0), split evenly
/// between them; the matched cells (0,0) and (1,1) share the remainder.
/// Marginals are 1/2 each for every `p`, so `p` alone pins down the
/// dependence: the correlation is `1 - 2p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliJoint {
    p: f64,
}

impl BernoulliJoint {
    pub fn from_p(p: f64) -> Result<Self> {
        if p.is_nan() || !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                what: "mixed-cell mass",
                value: p,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Self { p })
    }

    pub fn from_corr(rho: f64) -> Result<Self> {
        if rho.is_nan() || !(-1.0..=1.0).contains(&rho) {
            return Err(Error::OutOfRange {
                what: "affinity correlation",
                value: rho,
                lo: -1.0,
                hi: 1.0,
            });
        }
        Ok(Self {
            p: 0.5 * (1.0 - rho),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn corr(&self) -> f64 {
        corr(self.p)
    }

    /// Probability of the cell `(u1, u2)`; affinities must be 0 or 1.
    pub fn cell_mass(&self, u1: u8, u2: u8) -> f64 {
        assert!(u1 <= 1 && u2 <= 1, "affinities are 0 or 1");
        if u1 == u2 {
            0.5 * (1.0 - self.p)
        } else {
            0.5 * self.p
        }
    }

    /// Draws one affinity pair using a single uniform variate.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> (u8, u8) {
        let matched = 0.5 * (1.0 - self.p);
        let u: f64 = rng.random();
        if u < matched {
            (0, 0)
        } else if u < matched + 0.5 * self.p {
            (0, 1)
        } else if u < matched + self.p {
            (1, 0)
        } else {
            (1, 1)
        }
    }
}

/// Correlation of the affinity pair as a function of the mixed-cell mass.
pub fn corr(p: f64) -> f64 {
    1.0 - 2.0 * p
}

/// Draws one correlated affinity pair; `rho` must lie in `[-1, 1]`.
pub fn sample_pair_disc<R: rand::Rng + ?Sized>(rng: &mut R, rho: f64) -> Result<(u8, u8)> {
    Ok(BernoulliJoint::from_corr(rho)?.sample(rng))
}

/// The four adoption plateaus of the bundle, in increasing order:
/// `[0, (1+rho)/4, (3-rho)/4, 1]`.
///
/// Shared by the adoption function, the curve builder, and the equilibrium
/// catalog so that all three agree bit for bit.
pub fn bundle_levels(rho: f64) -> [f64; 4] {
    [0.0, 0.25 * (1.0 + rho), 0.25 * (3.0 - rho), 1.0]
}

/// Fraction adopting a single service sold separately when a fraction `x`
/// already participates.
///
/// Half the population has affinity 1 and joins once `x` clears
/// `(c - 1) / e`; the other half has affinity 0 and needs `x` above
/// `c / e`. With no externality the affinity alone decides.
pub fn adoption_prob_disc_separate(x: f64, c: f64, e: f64) -> f64 {
    if e == 0.0 {
        return if c >= 1.0 { 0.0 } else { 0.5 };
    }
    let l = (c - 1.0) / e;
    let r = c / e;
    if x <= l {
        0.0
    } else if x <= r {
        0.5
    } else {
        1.0
    }
}

/// Fraction adopting the bundle at participation `x` when the affinity
/// correlation is `rho`.
///
/// Bundle affinity is 2, 1, or 0 with masses `(1+rho)/4`, `(1-rho)/2`,
/// `(1+rho)/4`, adopted past the thresholds `(c-2)/e`, `(c-1)/e`, `c/e`
/// respectively.
pub fn adoption_prob_disc_bundle(x: f64, c: f64, e: f64, rho: f64) -> f64 {
    let levels = bundle_levels(rho);
    if e == 0.0 {
        return if c >= 2.0 {
            levels[0]
        } else if c >= 1.0 {
            levels[1]
        } else {
            levels[2]
        };
    }
    let l = (c - 2.0) / e;
    let m = (c - 1.0) / e;
    let r = c / e;
    if x <= l {
        levels[0]
    } else if x <= m {
        levels[1]
    } else if x <= r {
        levels[2]
    } else {
        levels[3]
    }
}

// Thresholds sit 1/e apart, but extreme c/e ratios can round adjacent ones
// onto the same float; merge such sub-ulp bands, keeping the upper level.
fn step_from(breaks: &[f64], levels: &[f64]) -> StepCurve {
    let mut bps: Vec<Breakpoint> = Vec::new();
    let mut lvls: Vec<f64> = vec![levels[0]];
    for (i, &b) in breaks.iter().enumerate() {
        if bps.last().is_none_or(|prev| prev.x < b) {
            bps.push(Breakpoint {
                x: b,
                left_closed: true,
            });
            lvls.push(levels[i + 1]);
        } else {
            *lvls.last_mut().expect("seeded above") = levels[i + 1];
        }
    }
    StepCurve::new(bps, lvls)
}

/// Adoption curve of one service sold separately; `c` and `e` must be
/// finite with `e >= 0`.
pub fn separate_curve(c: f64, e: f64) -> StepCurve {
    if e == 0.0 {
        return StepCurve::constant(if c >= 1.0 { 0.0 } else { 0.5 });
    }
    step_from(&[(c - 1.0) / e, c / e], &[0.0, 0.5, 1.0])
}

/// Adoption curve of the bundle; `c` and `e` must be finite with `e >= 0`.
pub fn bundle_curve(c: f64, e: f64, rho: f64) -> StepCurve {
    let levels = bundle_levels(rho);
    if e == 0.0 {
        return StepCurve::constant(adoption_prob_disc_bundle(0.0, c, e, rho));
    }
    step_from(&[(c - 2.0) / e, (c - 1.0) / e, c / e], &levels)
}
