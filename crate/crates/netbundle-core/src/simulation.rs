//! Agent-based Monte-Carlo oracle for the analytic equilibria.
//!
//! A finite population of agents draws its affinities once, then plays
//! synchronous best-response rounds starting from zero adoption: at round
//! t+1 an agent adopts iff its utility at the round-t adoption level is
//! positive. Because the adoption curve is nondecreasing, the adopter set
//! only grows, and the empirical trajectory tracks the deterministic
//! iteration x_{t+1} = h(x_t) up to sampling error.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::comparison::{AffinityModel, Scenario};
use crate::continuous::{sample_pair, AffinityPair, CopulaParams};
use crate::discrete::BernoulliJoint;
use crate::error::{Error, Result};

/// Which offering a simulation run adopts over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimMode {
    /// Service 1 on its own: cost c1, externality e1, affinity u1.
    Separate1,
    /// Service 2 on its own.
    Separate2,
    /// The bundle: cost c1+c2, externality e1+e2, affinity u1+u2.
    Bundle,
}

impl SimMode {
    fn tag(self) -> u64 {
        match self {
            SimMode::Separate1 => 1,
            SimMode::Separate2 => 2,
            SimMode::Bundle => 3,
        }
    }
}

/// SplitMix64 finalizer over `state ^ input`; the stated mix used to fold
/// scenario data into per-run seeds so sweeps are order-independent.
pub(crate) fn mix64(state: u64, input: u64) -> u64 {
    let mut z = (state ^ input).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the RNG seed for one run from the base seed, the scenario
/// parameters, and the mode. Parameters enter via their IEEE-754 bits, so
/// any change to the scenario changes the stream.
pub fn scenario_seed(seed: u64, sc: &Scenario, mode: SimMode) -> u64 {
    let model_tag = match sc.model {
        AffinityModel::Continuous => 1u64,
        AffinityModel::Discrete => 2u64,
    };
    let mut h = mix64(seed, model_tag);
    for v in [sc.s1.c, sc.s1.e, sc.s2.c, sc.s2.e, sc.rho] {
        h = mix64(h, v.to_bits());
    }
    mix64(h, mode.tag())
}

/// Frozen affinity draws for one population.
#[derive(Debug, Clone, PartialEq)]
pub enum Affinities {
    Continuous(Vec<AffinityPair>),
    Discrete(Vec<(u8, u8)>),
}

/// A population of agents with fixed affinities; only the adoption state
/// evolves during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    affinities: Affinities,
    seed: u64,
}

impl Population {
    /// Draws `n` affinity pairs for the given model at correlation `rho`.
    pub fn generate(model: AffinityModel, rho: f64, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyPopulation);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let affinities = match model {
            AffinityModel::Continuous => {
                let params = CopulaParams::new(rho)?;
                let mut pairs = Vec::with_capacity(n);
                for _ in 0..n {
                    pairs.push(sample_pair(&params, &mut rng));
                }
                Affinities::Continuous(pairs)
            }
            AffinityModel::Discrete => {
                let joint = BernoulliJoint::from_corr(rho)?;
                let mut pairs = Vec::with_capacity(n);
                for _ in 0..n {
                    pairs.push(joint.sample(&mut rng));
                }
                Affinities::Discrete(pairs)
            }
        };
        Ok(Population { affinities, seed })
    }

    pub fn len(&self) -> usize {
        match &self.affinities {
            Affinities::Continuous(p) => p.len(),
            Affinities::Discrete(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn affinities(&self) -> &Affinities {
        &self.affinities
    }

    /// The sampled pairs as plain reals, for correlation estimates.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        match &self.affinities {
            Affinities::Continuous(p) => p.iter().map(|a| (a.u1, a.u2)).collect(),
            Affinities::Discrete(p) => p
                .iter()
                .map(|&(a, b)| (f64::from(a), f64::from(b)))
                .collect(),
        }
    }

    /// Stand-alone utilities' intrinsic part for one mode, unsorted.
    fn affinity_values(&self, mode: SimMode) -> Vec<f64> {
        match &self.affinities {
            Affinities::Continuous(p) => p
                .iter()
                .map(|a| match mode {
                    SimMode::Separate1 => a.u1,
                    SimMode::Separate2 => a.u2,
                    SimMode::Bundle => a.u1 + a.u2,
                })
                .collect(),
            Affinities::Discrete(p) => p
                .iter()
                .map(|&(a, b)| match mode {
                    SimMode::Separate1 => f64::from(a),
                    SimMode::Separate2 => f64::from(b),
                    SimMode::Bundle => f64::from(a) + f64::from(b),
                })
                .collect(),
        }
    }
}

/// Round-by-round adoption levels of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Adoption fraction per round, starting at 0.
    pub levels: Vec<f64>,
    /// False when max_rounds ran out before the adopter set stabilized.
    pub converged: bool,
}

impl Trajectory {
    pub fn final_level(&self) -> f64 {
        *self.levels.last().expect("levels start at 0")
    }

    pub fn rounds(&self) -> usize {
        self.levels.len() - 1
    }
}

fn mode_params(sc: &Scenario, mode: SimMode) -> (f64, f64) {
    match mode {
        SimMode::Separate1 => (sc.s1.c, sc.s1.e),
        SimMode::Separate2 => (sc.s2.c, sc.s2.e),
        SimMode::Bundle => (sc.s1.c + sc.s2.c, sc.s1.e + sc.s2.e),
    }
}

/// Runs synchronous best-response dynamics from zero adoption on an
/// already-drawn population.
///
/// An agent with affinity u adopts at level x iff u + e·x − c > 0. Since
/// the threshold c − e·x is nonincreasing in x, adopters never leave and
/// the run stops the first time a round changes nothing; that happens
/// within n+1 rounds unless max_rounds cuts it short.
pub fn simulate_on(
    pop: &Population,
    sc: &Scenario,
    mode: SimMode,
    max_rounds: u32,
) -> Result<Trajectory> {
    sc.validate()?;
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let (c, e) = mode_params(sc, mode);
    let mut values = pop.affinity_values(mode);
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    let n_f = n as f64;

    let mut levels = alloc::vec![0.0f64];
    let mut x = 0.0f64;
    let mut converged = false;
    for _ in 0..max_rounds {
        let threshold = c - e * x;
        // strict utility comparison: adopt iff u > c - e*x
        let adopters = n - values.partition_point(|&u| u <= threshold);
        let next = adopters as f64 / n_f;
        if next == x {
            converged = true;
            break;
        }
        levels.push(next);
        x = next;
    }
    Ok(Trajectory { levels, converged })
}

/// Draws a fresh population with a seed derived from `(seed, sc, mode)`
/// and simulates it; the full entry point used by sweeps.
pub fn simulate_adoption(
    sc: &Scenario,
    mode: SimMode,
    n: usize,
    seed: u64,
    max_rounds: u32,
) -> Result<Trajectory> {
    sc.validate()?;
    let pop = Population::generate(sc.model, sc.rho, n, scenario_seed(seed, sc, mode))?;
    simulate_on(&pop, sc, mode, max_rounds)
}

/// Product-moment correlation of the population's affinity pairs.
pub fn empirical_corr(pop: &Population) -> Result<f64> {
    let pairs = pop.pairs();
    let n = pairs.len();
    if n < 2 {
        return Err(Error::DegenerateVariance);
    }
    let n_f = n as f64;
    let (mut m1, mut m2) = (0.0f64, 0.0f64);
    for &(a, b) in &pairs {
        m1 += a;
        m2 += b;
    }
    m1 /= n_f;
    m2 /= n_f;
    let (mut s11, mut s22, mut s12) = (0.0f64, 0.0f64, 0.0f64);
    for &(a, b) in &pairs {
        let (d1, d2) = (a - m1, b - m2);
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
    }
    if s11 == 0.0 || s22 == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(s12 / libm::sqrt(s11 * s22))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::ServiceParams;
    use crate::continuous::realized_corr;

    fn scenario(c1: f64, e1: f64, c2: f64, e2: f64, model: AffinityModel, rho: f64) -> Scenario {
        Scenario {
            s1: ServiceParams { c: c1, e: e1 },
            s2: ServiceParams { c: c2, e: e2 },
            model,
            rho,
        }
    }

    #[test]
    fn identical_inputs_identical_trajectories() {
        let sc = scenario(4.0 / 3.0, 3.0, 1.0 / 3.0, 1.0 / 3.0, AffinityModel::Discrete, 0.0);
        let a = simulate_adoption(&sc, SimMode::Bundle, 5000, 42, 100).unwrap();
        let b = simulate_adoption(&sc, SimMode::Bundle, 5000, 42, 100).unwrap();
        assert_eq!(a, b);
        let c = simulate_adoption(&sc, SimMode::Bundle, 5000, 43, 100).unwrap();
        assert_ne!(a.levels, c.levels);
    }

    #[test]
    fn seeds_differ_by_mode_and_scenario() {
        let sc = scenario(0.5, 0.25, 0.5, 0.25, AffinityModel::Continuous, 0.3);
        let s1 = scenario_seed(9, &sc, SimMode::Separate1);
        let s2 = scenario_seed(9, &sc, SimMode::Separate2);
        let sb = scenario_seed(9, &sc, SimMode::Bundle);
        assert_ne!(s1, s2);
        assert_ne!(s1, sb);
        let mut other = sc;
        other.rho = 0.4;
        assert_ne!(scenario_seed(9, &other, SimMode::Bundle), sb);
    }

    #[test]
    fn levels_monotone_and_in_unit_interval() {
        let cases = [
            scenario(0.9, 1.1, 0.4, 0.2, AffinityModel::Continuous, 0.5),
            scenario(0.75, 1.5, 0.5, 0.75, AffinityModel::Discrete, -0.4),
            scenario(1.2, 0.3, 0.8, 2.0, AffinityModel::Continuous, -0.7),
        ];
        for sc in &cases {
            for mode in [SimMode::Separate1, SimMode::Separate2, SimMode::Bundle] {
                let t = simulate_adoption(sc, mode, 20_000, 11, 200).unwrap();
                assert!(t.converged);
                for w in t.levels.windows(2) {
                    assert!(w[1] >= w[0], "levels must not decrease: {:?}", t.levels);
                }
                for &l in &t.levels {
                    assert!((0.0..=1.0).contains(&l));
                }
            }
        }
    }

    #[test]
    fn costly_offering_stays_at_zero() {
        // bundle cost above 2: no agent can ever gain, final = 0 after one round
        let sc = scenario(1.3, 2.0, 0.9, 2.0, AffinityModel::Continuous, 0.0);
        let t = simulate_adoption(&sc, SimMode::Bundle, 10_000, 3, 50).unwrap();
        assert!(t.converged);
        assert_eq!(t.final_level(), 0.0);
        assert_eq!(t.rounds(), 0);
        // separate cost above 1 likewise
        let sc = scenario(1.3, 2.0, 0.9, 2.0, AffinityModel::Discrete, 0.0);
        let t = simulate_adoption(&sc, SimMode::Separate1, 10_000, 3, 50).unwrap();
        assert_eq!(t.final_level(), 0.0);
    }

    #[test]
    fn discrete_bundle_reaches_full_adoption() {
        // c=5/3, e=10/3, rho=0: analytic iterates 0, 1/4, 3/4, 1
        let sc = scenario(4.0 / 3.0, 3.0, 1.0 / 3.0, 1.0 / 3.0, AffinityModel::Discrete, 0.0);
        let t = simulate_adoption(&sc, SimMode::Bundle, 100_000, 42, 100).unwrap();
        assert!(t.converged);
        assert!((t.final_level() - 1.0).abs() <= 0.01);
    }

    #[test]
    fn discrete_bundle_negative_rho_partial_adoption() {
        // c=5/3, e=10/3, rho=-0.6: lseq = (1+rho)/4 = 0.1
        let sc = scenario(4.0 / 3.0, 3.0, 1.0 / 3.0, 1.0 / 3.0, AffinityModel::Discrete, -0.6);
        let t = simulate_adoption(&sc, SimMode::Bundle, 100_000, 7, 100).unwrap();
        assert!(t.converged);
        assert!((t.final_level() - 0.1).abs() <= 0.01, "got {}", t.final_level());
    }

    #[test]
    fn continuous_bundle_low_cost_full_adoption() {
        // c=0.9, e=1, rho=0: lseq = 1 and the threshold goes negative en route
        let sc = scenario(0.45, 0.5, 0.45, 0.5, AffinityModel::Continuous, 0.0);
        let t = simulate_adoption(&sc, SimMode::Bundle, 100_000, 5, 100).unwrap();
        assert!(t.converged);
        assert!((t.final_level() - 1.0).abs() <= 0.01);
    }

    #[test]
    fn continuous_separate_matches_interior_lseq() {
        // c=0.5, e=0.25: separate lseq = (1-c)/(1-e) = 2/3; slope e < 1 keeps
        // the sampling error of the fixed point near 3*0.5/sqrt(n)
        let sc = scenario(0.5, 0.25, 0.5, 0.25, AffinityModel::Continuous, 0.0);
        let t = simulate_adoption(&sc, SimMode::Separate1, 100_000, 12, 1000).unwrap();
        assert!(t.converged);
        assert!((t.final_level() - 2.0 / 3.0).abs() <= 0.01, "got {}", t.final_level());
    }

    #[test]
    fn empirical_corr_tracks_realized_corr() {
        let n = 200_000;
        for rho in [-0.8, 0.0, 0.8] {
            let pop = Population::generate(AffinityModel::Continuous, rho, n, 99).unwrap();
            let got = empirical_corr(&pop).unwrap();
            let want = realized_corr(rho).unwrap();
            assert!((got - want).abs() <= 0.01, "rho={rho}: got {got}, want {want}");
        }
    }

    #[test]
    fn empirical_corr_discrete_extremes() {
        let pop = Population::generate(AffinityModel::Discrete, 1.0, 10_000, 4).unwrap();
        let got = empirical_corr(&pop).unwrap();
        assert!((got - 1.0).abs() <= 1e-12);
        let pop = Population::generate(AffinityModel::Discrete, -0.5, 200_000, 4).unwrap();
        let got = empirical_corr(&pop).unwrap();
        assert!((got + 0.5).abs() <= 0.01, "got {got}");
    }

    #[test]
    fn degenerate_populations_are_rejected() {
        assert!(matches!(
            Population::generate(AffinityModel::Discrete, 0.0, 0, 1),
            Err(Error::EmptyPopulation)
        ));
        let pop = Population::generate(AffinityModel::Discrete, 1.0, 1, 1).unwrap();
        assert!(matches!(empirical_corr(&pop), Err(Error::DegenerateVariance)));
    }

    #[test]
    fn max_rounds_zero_flags_nonconvergence() {
        let sc = scenario(0.5, 0.25, 0.5, 0.25, AffinityModel::Continuous, 0.0);
        let t = simulate_adoption(&sc, SimMode::Separate1, 100, 1, 0).unwrap();
        assert!(!t.converged);
        assert_eq!(t.levels, alloc::vec![0.0]);
    }
}
