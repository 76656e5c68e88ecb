//! Continuous affinity model: a pair of uniform affinities on [0, 1] with
//! correlation parameter `rho`, built by applying the standard normal CDF
//! to linearly correlated standard normals.
//!
//! The module exposes the correlation maps between the latent parameter
//! `rho` and the realized product-moment correlation of the uniforms, the
//! joint CDF/PDF of the pair, the CDF/PDF of the sum `U = U1 + U2`, and
//! the resulting bundle adoption probability
//! `h(x) = P(U > c - e x)`.
//!
//! All distribution evaluations dispatch to closed forms at
//! `rho in {-1, 0, +1}` (degenerate or independent cases) and to adaptive
//! quadrature otherwise. The `_integral` variants expose the quadrature
//! route for any `|rho| < 1` so the closed forms can be cross-checked.

use crate::curve::{AdoptionCurve, Breakpoint, ContinuousCurve, StepCurve};
use crate::error::{Error, Result};
use crate::numerics::{integrate, norm_cdf, norm_quantile_clamped, QuadratureConfig};

/// Correlation parameter plus the quadrature settings used whenever an
/// evaluation has no closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopulaParams {
    pub rho: f64,
    pub quad: QuadratureConfig,
}

impl CopulaParams {
    pub fn new(rho: f64) -> Result<Self> {
        Self::with_quad(rho, QuadratureConfig::default())
    }

    pub fn with_quad(rho: f64, quad: QuadratureConfig) -> Result<Self> {
        let params = CopulaParams { rho, quad };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho.is_finite() {
            return Err(Error::NonFinite {
                what: "rho",
                value: self.rho,
            });
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::OutOfRange {
                what: "rho",
                value: self.rho,
                lo: -1.0,
                hi: 1.0,
            });
        }
        self.quad.validate()
    }
}

/// One sampled affinity pair; both coordinates lie in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinityPair {
    pub u1: f64,
    pub u2: f64,
}

impl AffinityPair {
    /// Transform two independent standard normals into a correlated
    /// uniform pair: `u1 = Phi(z1)`, `u2 = Phi(rho z1 + sqrt(1-rho^2) z2)`.
    pub fn from_normals(z1: f64, z2: f64, rho: f64) -> Self {
        let y2 = rho * z1 + libm::sqrt(1.0 - rho * rho) * z2;
        AffinityPair {
            u1: norm_cdf(z1),
            u2: norm_cdf(y2),
        }
    }
}

/// Latent parameter producing an exact target product-moment correlation
/// between the uniforms: `rho = 2 sin(pi t / 6)`.
pub fn effective_rho(target_corr: f64) -> Result<f64> {
    check_corr("target_corr", target_corr)?;
    Ok(2.0 * libm::sin(core::f64::consts::PI * target_corr / 6.0))
}

/// Product-moment correlation of the uniform pair realized by latent
/// parameter `rho`: `rho_U = (6/pi) asin(rho / 2)`.
pub fn realized_corr(rho: f64) -> Result<f64> {
    check_corr("rho", rho)?;
    Ok(6.0 / core::f64::consts::PI * libm::asin(rho / 2.0))
}

fn check_corr(what: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { what, value });
    }
    if !(-1.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            what,
            value,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(())
}

fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { what, value });
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            what,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Draw one affinity pair using two uniform deviates from `rng`.
pub fn sample_pair<R: rand::Rng + ?Sized>(params: &CopulaParams, rng: &mut R) -> AffinityPair {
    let eps = params.quad.clamp_eps;
    let z1 = norm_quantile_clamped(rng.random::<f64>(), eps);
    let z2 = norm_quantile_clamped(rng.random::<f64>(), eps);
    AffinityPair::from_normals(z1, z2, params.rho)
}

/// Joint CDF `P(U1 <= u1, U2 <= u2)`.
///
/// Closed forms at `rho in {-1, 0, +1}` (the Frechet bounds and the
/// product), quadrature otherwise.
pub fn joint_cdf(u1: f64, u2: f64, params: &CopulaParams) -> Result<f64> {
    params.validate()?;
    check_unit("u1", u1)?;
    check_unit("u2", u2)?;
    if params.rho == 1.0 {
        return Ok(u1.min(u2));
    }
    if params.rho == -1.0 {
        return Ok((u1 + u2 - 1.0).max(0.0));
    }
    if params.rho == 0.0 {
        return Ok(u1 * u2);
    }
    // Exact marginal recovery at the edges keeps the quadrature route off
    // the quantile clamp.
    if u1 == 0.0 || u2 == 0.0 {
        return Ok(0.0);
    }
    if u2 == 1.0 {
        return Ok(u1);
    }
    if u1 == 1.0 {
        return Ok(u2);
    }
    let rho = params.rho;
    let s = libm::sqrt(1.0 - rho * rho);
    let eps = params.quad.clamp_eps;
    let b = norm_quantile_clamped(u2, eps);
    integrate(
        |v| norm_cdf((b - rho * norm_quantile_clamped(v, eps)) / s),
        0.0,
        u1,
        &params.quad,
    )
}

/// Joint density of the pair at `(u1, u2)`, both strictly inside (0, 1).
///
/// `|rho| = 1` is rejected: the mass concentrates on a line and no
/// density exists.
pub fn joint_pdf(u1: f64, u2: f64, params: &CopulaParams) -> Result<f64> {
    params.validate()?;
    if libm::fabs(params.rho) == 1.0 {
        return Err(Error::DegenerateCorrelation { rho: params.rho });
    }
    check_open_unit("u1", u1)?;
    check_open_unit("u2", u2)?;
    if params.rho == 0.0 {
        return Ok(1.0);
    }
    let rho = params.rho;
    let s = libm::sqrt(1.0 - rho * rho);
    let eps = params.quad.clamp_eps;
    let b = norm_quantile_clamped(u2, eps);
    let a = (b - rho * norm_quantile_clamped(u1, eps)) / s;
    // phi(a) / (s phi(b)) without evaluating either density.
    Ok(libm::exp(0.5 * (b * b - a * a)) / s)
}

fn check_open_unit(what: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { what, value });
    }
    if value <= 0.0 || value >= 1.0 {
        return Err(Error::OutOfRange {
            what,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// CDF of the aggregate affinity `U = U1 + U2` at `u in [0, 2]`.
///
/// Dispatch: `rho = -1` steps at 1, `rho = 0` is piecewise quadratic,
/// `rho = +1` is `u/2`; otherwise quadrature via [`sum_cdf_integral`].
pub fn sum_cdf(u: f64, params: &CopulaParams) -> Result<f64> {
    params.validate()?;
    check_sum_arg(u)?;
    match params.rho {
        1.0 => Ok(u / 2.0),
        -1.0 => Ok(if u >= 1.0 { 1.0 } else { 0.0 }),
        0.0 => Ok(sum_cdf_indep(u)),
        _ => sum_cdf_integral(u, params),
    }
}

/// The `rho = 0` closed form on [0, 2].
fn sum_cdf_indep(u: f64) -> f64 {
    if u <= 1.0 {
        0.5 * u * u
    } else {
        1.0 - 0.5 * (2.0 - u) * (2.0 - u)
    }
}

fn check_sum_arg(u: f64) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::NonFinite { what: "u", value: u });
    }
    if !(0.0..=2.0).contains(&u) {
        return Err(Error::OutOfRange {
            what: "u",
            value: u,
            lo: 0.0,
            hi: 2.0,
        });
    }
    Ok(())
}

/// Quadrature evaluation of the sum CDF, valid for any `|rho| < 1`
/// including 0. Kept public so the closed-form dispatch of [`sum_cdf`]
/// can be cross-checked against the integral it replaces.
pub fn sum_cdf_integral(u: f64, params: &CopulaParams) -> Result<f64> {
    params.validate()?;
    check_sum_arg(u)?;
    if libm::fabs(params.rho) == 1.0 {
        return Err(Error::DegenerateCorrelation { rho: params.rho });
    }
    let rho = params.rho;
    let s = libm::sqrt(1.0 - rho * rho);
    let eps = params.quad.clamp_eps;
    let psi = move |v: f64| {
        let num = norm_quantile_clamped(u - v, eps) - rho * norm_quantile_clamped(v, eps);
        norm_cdf(num / s)
    };
    if u <= 1.0 {
        integrate(psi, 0.0, u, &params.quad)
    } else {
        Ok(u - 1.0 + integrate(psi, u - 1.0, 1.0, &params.quad)?)
    }
}

/// Density of the aggregate affinity at `u in (0, 2)`.
///
/// `|rho| = 1` is rejected (point mass / uniform-on-a-line degeneracies
/// live in the CDF); `rho = 0` uses the triangular closed form.
pub fn sum_pdf(u: f64, params: &CopulaParams) -> Result<f64> {
    params.validate()?;
    check_sum_open(u)?;
    if libm::fabs(params.rho) == 1.0 {
        return Err(Error::DegenerateCorrelation { rho: params.rho });
    }
    if params.rho == 0.0 {
        return Ok(if u <= 1.0 { u } else { 2.0 - u });
    }
    sum_pdf_integral(u, params)
}

fn check_sum_open(u: f64) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::NonFinite { what: "u", value: u });
    }
    if u <= 0.0 || u >= 2.0 {
        return Err(Error::OutOfRange {
            what: "u",
            value: u,
            lo: 0.0,
            hi: 2.0,
        });
    }
    Ok(())
}

/// Quadrature evaluation of the sum density for any `|rho| < 1`.
///
/// The defining integral over `v` has power singularities at its
/// endpoints when `rho < 0` (the joint density blows up at the corners
/// of the unit square), so it is evaluated after substituting
/// `v = Phi(t)`: the integrand becomes a smooth Gaussian-type function of
/// `t` and one of the two quantile evaluations drops out. The infinite
/// `t`-range is truncated where the integrand's slowest decay rate,
/// `exp(-t^2 (1+rho) / (2(1-rho)))`, is negligible; the truncation bite
/// exceeds quadrature tolerance only for `rho` within about 0.01 of -1,
/// where the density is collapsing onto its point-mass limit anyway.
pub fn sum_pdf_integral(u: f64, params: &CopulaParams) -> Result<f64> {
    params.validate()?;
    check_sum_open(u)?;
    if libm::fabs(params.rho) == 1.0 {
        return Err(Error::DegenerateCorrelation { rho: params.rho });
    }
    // (U1,U2) -> (1-U1,1-U2) preserves the construction, so f_U(u) = f_U(2-u).
    let u = if u > 1.0 { 2.0 - u } else { u };
    let rho = params.rho;
    let s = libm::sqrt(1.0 - rho * rho);
    let eps = params.quad.clamp_eps;
    let kappa = (1.0f64).min((1.0 + rho) / (1.0 - rho));
    let t_max = libm::sqrt(90.0 / kappa).clamp(9.0, 60.0);
    let t_hi = if u == 1.0 {
        t_max
    } else {
        norm_quantile_clamped(u, eps)
    };
    let f = move |t: f64| {
        // b = Phi^{-1}(u - Phi(t)); at u = 1 this is exactly -t
        let b = if u == 1.0 {
            -t
        } else {
            norm_quantile_clamped(u - norm_cdf(t), eps)
        };
        let a = (b - rho * t) / s;
        // exponents fused: the factors can overflow/underflow separately
        libm::exp(0.5 * (b * b - a * a - t * t)) / crate::numerics::SQRT_2PI
    };
    integrate(f, -t_max, t_hi, &params.quad).map(|v| v / s)
}

/// Adoption thresholds for one separately offered service:
/// `l = (c-1)/e`, `r = c/e`. Plain IEEE division, so `e = 0` yields
/// infinite (or NaN at `c = 1` resp. `c = 0`) sentinels.
pub fn separate_thresholds(c: f64, e: f64) -> (f64, f64) {
    ((c - 1.0) / e, c / e)
}

/// Bundle adoption thresholds `l = (c-2)/e`, `m = (c-1)/e`, `r = c/e`,
/// with the same `e = 0` sentinel convention.
pub fn bundle_thresholds(c: f64, e: f64) -> (f64, f64, f64) {
    ((c - 2.0) / e, (c - 1.0) / e, c / e)
}

fn check_cost_ext(c: f64, e: f64) -> Result<()> {
    if !c.is_finite() {
        return Err(Error::NonFinite { what: "c", value: c });
    }
    if !e.is_finite() {
        return Err(Error::NonFinite { what: "e", value: e });
    }
    if c < 0.0 {
        return Err(Error::OutOfRange {
            what: "c",
            value: c,
            lo: 0.0,
            hi: f64::MAX,
        });
    }
    if e < 0.0 {
        return Err(Error::OutOfRange {
            what: "e",
            value: e,
            lo: 0.0,
            hi: f64::MAX,
        });
    }
    Ok(())
}

/// Bundle adoption probability `h(x) = P(U > c - e x)` at anticipated
/// adoption level `x`.
///
/// Branch structure in `u = c - e x`: 0 for `u >= 2`, 1 for `u <= 0`,
/// `1 - sum_cdf(u)` in between. At `rho = -1` the aggregate affinity is
/// the constant 1 and `h` steps from 0 to 1 at `x = m = (c-1)/e`, with
/// `h(m) = 1`; for every other `rho`, `h(m) = 1/2`.
pub fn adoption_prob_cont(x: f64, c: f64, e: f64, params: &CopulaParams) -> Result<f64> {
    params.validate()?;
    check_unit("x", x)?;
    check_cost_ext(c, e)?;
    if params.rho == -1.0 {
        if e == 0.0 {
            // every user sees utility 1 - c
            return Ok(if c < 1.0 { 1.0 } else { 0.0 });
        }
        // step lands on m: u <= 1 <=> x >= m
        return Ok(if c - e * x <= 1.0 { 1.0 } else { 0.0 });
    }
    let u = c - e * x;
    if u >= 2.0 {
        return Ok(0.0);
    }
    if u <= 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - sum_cdf(u, params)?)
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Adoption curve of one separately offered service with uniform
/// affinity: `h_i(x) = clamp(e x + 1 - c, 0, 1)`.
pub fn separate_curve(c: f64, e: f64) -> AdoptionCurve {
    AdoptionCurve::Continuous(ContinuousCurve::new(move |x| clamp01(e * x + 1.0 - c)))
}

/// Bundle adoption curve at `rho = +1`: the aggregate affinity is
/// uniform on [0, 2], so `h(x) = clamp((e x + 2 - c)/2, 0, 1)`.
pub fn poscorr_curve(c: f64, e: f64) -> AdoptionCurve {
    AdoptionCurve::Continuous(ContinuousCurve::new(move |x| {
        clamp01(0.5 * (e * x + 2.0 - c))
    }))
}

/// Bundle adoption curve at `rho = -1`: every user values the bundle at
/// exactly 1, so `h` steps from 0 to 1 at `m = (c-1)/e` (the step lands
/// on `m`).
pub fn negcorr_curve(c: f64, e: f64) -> AdoptionCurve {
    if e == 0.0 {
        return AdoptionCurve::Step(StepCurve::constant(if c < 1.0 { 1.0 } else { 0.0 }));
    }
    let m = (c - 1.0) / e;
    AdoptionCurve::Step(StepCurve::new(
        alloc::vec![Breakpoint {
            x: m,
            left_closed: false,
        }],
        alloc::vec![0.0, 1.0],
    ))
}

/// Bundle adoption curve at `rho = 0` using the piecewise-quadratic sum
/// CDF: in `u = c - e x`, `h = (2-u)^2/2` for `u in [1,2)` and
/// `h = (2-u^2)/2` for `u in (0,1)`.
pub fn indep_curve(c: f64, e: f64) -> AdoptionCurve {
    AdoptionCurve::Continuous(ContinuousCurve::new(move |x| {
        let u = c - e * x;
        if u >= 2.0 {
            0.0
        } else if u > 1.0 {
            0.5 * (2.0 - u) * (2.0 - u)
        } else if u > 0.0 {
            0.5 * (2.0 - u * u)
        } else {
            1.0
        }
    }))
}

/// Bundle adoption curve for arbitrary correlation.
///
/// `rho in {-1, 0, +1}` dispatch to the closed-form curves above. For
/// other `rho` the curve evaluates `adoption_prob_cont` by quadrature;
/// construction probes the quadrature once mid-range so a configuration
/// that cannot meet tolerance fails here rather than deep inside a
/// solver. Should a later evaluation still exhaust its budget, the
/// curve uses the best available estimate (clamped to [0, 1]).
pub fn bundle_curve(c: f64, e: f64, params: &CopulaParams) -> Result<AdoptionCurve> {
    params.validate()?;
    check_cost_ext(c, e)?;
    match params.rho {
        1.0 => return Ok(poscorr_curve(c, e)),
        -1.0 => return Ok(negcorr_curve(c, e)),
        0.0 => return Ok(indep_curve(c, e)),
        _ => {}
    }
    // u ranges over [c - e, c] clipped to (0, 2) as x runs through [0, 1]
    let lo = (c - e).max(0.0);
    let hi = c.min(2.0);
    if lo < hi {
        sum_cdf(0.5 * (lo + hi), params)?;
    }
    let params = *params;
    Ok(AdoptionCurve::Continuous(ContinuousCurve::new(move |x| {
        let u = c - e * x;
        if u >= 2.0 {
            0.0
        } else if u <= 0.0 {
            1.0
        } else {
            match sum_cdf(u, &params) {
                Ok(f) => 1.0 - f,
                Err(err) => clamp01(1.0 - err.best_estimate().unwrap_or(0.5)),
            }
        }
    })))
}
