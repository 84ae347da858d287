//! Pass/fail checks of the individual inequalities on one test function.

use serde::{Deserialize, Serialize};

use crate::constants::{remainder_big_c_p, remainder_c_p, sharp_constant_flat};
use crate::error::{Error, Result};
use crate::functions::{ground_state_split, norm_k, TestFunction};
use crate::params::{HardyParams, Regime, SobolevParams, SobolevVariant};
use crate::quadrature::functionals::{joint_pair_mc, pair_integral, remainder_form, PairForm};
use crate::quadrature::mc::McOutput;
use crate::quadrature::{weighted_lp, EngineKind, LogWeight, QuadratureSpec, RemainderKind};
use crate::verify::report::{TheoremId, VerificationReport};
use crate::Estimate;

/// Relative tolerance of the `p = 2` identity with a deterministic engine.
pub const IDENTITY_REL_TOL: f64 = 1e-3;

/// Which Hardy-Sobolev inequality to check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum HardySobolevForm {
    /// Left side in the `E_omega` form.
    Ineq1,
    /// Left side in the `W_r` form (`p = 2`).
    Ineq2 { r: f64 },
}

pub(crate) fn rss(parts: &[f64]) -> f64 {
    parts.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Rejects degenerate tuples, dimension mismatches and functions outside the
/// admissible class of the regime.
pub(crate) fn require_class(u: &TestFunction, hp: &HardyParams) -> Result<()> {
    hp.require_nondegenerate()?;
    if u.dim() != hp.d() {
        return Err(Error::domain(format!(
            "function lives in dimension {} but the parameters have d = {}",
            u.dim(),
            hp.d()
        )));
    }
    if hp.regime() == Regime::Supercritical && !u.is_zero() && !(u.k_gap(hp.k()) > 0.0) {
        return Err(Error::precondition("in the supercritical regime u must vanish in a neighbourhood of K"));
    }
    Ok(())
}

/// `int |u|^p |x_k|^-(sp - alpha - beta) dx`.
pub fn hardy_term(u: &TestFunction, hp: &HardyParams, spec: &QuadratureSpec) -> Result<Estimate> {
    weighted_lp(u, hp.p(), hp.hardy_weight_exponent(), None, hp, spec)
}

/// Pair integrals sharing samples (Monte Carlo) or computed one by one.
enum Joint {
    Mc(McOutput),
    Det(Vec<Estimate>),
}

impl Joint {
    fn estimate(&self, i: usize) -> Estimate {
        match self {
            Joint::Mc(o) => o.estimate(i),
            Joint::Det(v) => v[i],
        }
    }

    fn combination(&self, coeffs: &[f64]) -> Estimate {
        match self {
            Joint::Mc(o) => o.combination(coeffs),
            Joint::Det(v) => {
                let value = v.iter().zip(coeffs).map(|(e, c)| c * e.value).sum();
                let err = v.iter().zip(coeffs).map(|(e, c)| c.abs() * e.std_error).sum();
                let samples = v.iter().map(|e| e.samples_used).sum();
                Estimate { value, std_error: err, samples_used: samples }
            }
        }
    }
}

fn joint(terms: &[(&TestFunction, PairForm)], hp: &HardyParams, spec: &QuadratureSpec) -> Result<Joint> {
    if spec.engine == EngineKind::MonteCarlo {
        spec.validate()?;
        return joint_pair_mc(terms, hp, spec).map(Joint::Mc);
    }
    terms.iter().map(|(u, f)| pair_integral(u, f, hp, spec)).collect::<Result<Vec<_>>>().map(Joint::Det)
}

/// Sharp Hardy inequality `[u]^p >= C int |u|^p / |x_k|^(sp-alpha-beta)`.
///
/// `remainder_or_rhs` is zero; the margin is `lhs - C * hardy_term`.
pub fn check_hardy(u: &TestFunction, hp: &HardyParams, spec: &QuadratureSpec) -> Result<VerificationReport> {
    require_class(u, hp)?;
    let c = sharp_constant_flat(hp)?;
    let mut rep = VerificationReport::zero(TheoremId::Hardy, *hp, u.describe(), spec.seed);
    rep.constant = c.value;
    rep.constant_error = c.std_error;
    if u.is_zero() {
        return Ok(rep);
    }
    let lhs = pair_integral(u, &PairForm::gagliardo(hp), hp, spec)?;
    let hardy = hardy_term(u, hp, spec)?;
    rep.lhs = lhs;
    rep.hardy_term = hardy;
    let margin = lhs.value - c.value * hardy.value;
    let sigma = rss(&[lhs.std_error, c.value * hardy.std_error, c.std_error * hardy.value]);
    Ok(rep.settle(margin, sigma))
}

/// Hardy inequality with the remainder `c_p E_omega[v]`, `v = |x_k|^gamma u`,
/// for `p >= 2`.
pub fn check_remainder_p_ge2(u: &TestFunction, hp: &HardyParams, spec: &QuadratureSpec) -> Result<VerificationReport> {
    if !(hp.p() >= 2.0) {
        return Err(Error::domain("the E_omega remainder requires p >= 2"));
    }
    let cp = remainder_c_p(hp.p())?;
    remainder_check(u, hp, spec, TheoremId::RemainderPGe2, RemainderKind::EOmega, cp)
}

/// Hardy inequality with the remainder `C_p E_tilde[v]` for `1 < p < 2`.
/// Uses `C_p = p - 1` when `u` is nonnegative and
/// `max{(p-1)/p, p(p-1)/2}` otherwise.
pub fn check_remainder_p_lt2(u: &TestFunction, hp: &HardyParams, spec: &QuadratureSpec) -> Result<VerificationReport> {
    check_remainder_p_lt2_with(u, hp, spec, u.is_nonnegative())
}

/// [`check_remainder_p_lt2`] with an explicit choice of constant.
pub fn check_remainder_p_lt2_with(
    u: &TestFunction,
    hp: &HardyParams,
    spec: &QuadratureSpec,
    nonnegative_constant: bool,
) -> Result<VerificationReport> {
    if !(hp.p() > 1.0 && hp.p() < 2.0) {
        return Err(Error::domain("the E_tilde remainder requires 1 < p < 2"));
    }
    if nonnegative_constant && !u.is_nonnegative() {
        return Err(Error::precondition("the constant p - 1 requires a nonnegative u"));
    }
    let cp = remainder_big_c_p(hp.p(), nonnegative_constant)?;
    remainder_check(u, hp, spec, TheoremId::RemainderPLt2, RemainderKind::ETilde, cp)
}

fn remainder_check(
    u: &TestFunction,
    hp: &HardyParams,
    spec: &QuadratureSpec,
    id: TheoremId,
    kind: RemainderKind,
    cp: f64,
) -> Result<VerificationReport> {
    require_class(u, hp)?;
    let c = sharp_constant_flat(hp)?;
    let mut rep = VerificationReport::zero(id, *hp, u.describe(), spec.seed);
    rep.constant = c.value;
    rep.constant_error = c.std_error;
    rep.remainder_constant = cp;
    if u.is_zero() {
        return Ok(rep);
    }
    let (v, _) = ground_state_split(u, hp);
    let form = remainder_form(hp, kind)?;
    let j = joint(&[(u, PairForm::gagliardo(hp)), (&v, form)], hp, spec)?;
    let hardy = hardy_term(u, hp, spec)?;
    rep.lhs = j.estimate(0);
    rep.remainder_or_rhs = j.estimate(1);
    rep.hardy_term = hardy;
    let diff = j.combination(&[1.0, -cp]);
    let margin = diff.value - c.value * hardy.value;
    let sigma = rss(&[diff.std_error, c.value * hardy.std_error, c.std_error * hardy.value]);
    Ok(rep.settle(margin, sigma))
}

/// The `p = 2` identity `[u]^2 - C hardy = E_omega[v]`.
///
/// The report's margin is `-|residual|`, so it passes exactly when the
/// residual is within `3 sigma`. With a deterministic engine `sigma` is
/// floored at `IDENTITY_REL_TOL * lhs / 3`.
pub fn check_ground_state_identity(
    u: &TestFunction,
    hp: &HardyParams,
    spec: &QuadratureSpec,
) -> Result<VerificationReport> {
    if hp.p() != 2.0 {
        return Err(Error::domain("the ground-state identity requires p = 2"));
    }
    let mut rep = check_remainder_p_ge2(u, hp, spec)?;
    rep.theorem_id = TheoremId::GroundStateIdentity;
    let mut sigma = rep.sigma;
    if spec.engine.is_deterministic() {
        sigma = sigma.max(IDENTITY_REL_TOL * rep.lhs.value.abs() / 3.0);
    }
    let residual = rep.margin;
    Ok(rep.settle(-residual.abs(), sigma))
}

/// Relative error of `x^t` given the relative error of `x`.
fn power_estimate(e: &Estimate, t: f64) -> Estimate {
    let value = e.value.powf(t);
    let rel = if e.value != 0.0 { e.std_error / e.value.abs() } else { 0.0 };
    Estimate { value, std_error: value.abs() * t.abs() * rel, samples_used: e.samples_used }
}

/// Weighted fractional Hardy-Sobolev inequality for `1 <= k < d`.
///
/// The constant is existential, so the report carries
/// `empirical_ratio = lhs^(1/p) / rhs^(1/q)` (with `p = 2` for the `W_r`
/// form); the margin is the left side itself.
pub fn check_hardy_sobolev(
    u: &TestFunction,
    sob: &SobolevParams,
    spec: &QuadratureSpec,
    form: HardySobolevForm,
) -> Result<VerificationReport> {
    let hp = sob.base();
    if hp.k() == hp.d() {
        return Err(Error::domain("the Hardy-Sobolev inequality does not hold when k = d"));
    }
    if u.dim() != hp.d() {
        return Err(Error::domain("function dimension differs from d"));
    }
    let (k, s, p, q) = (hp.k() as f64, hp.s(), hp.p(), sob.q());
    let (id, pair, weight, power) = match form {
        HardySobolevForm::Ineq1 => {
            let w = sob.theta() + (k - hp.sp()) * q / p;
            (TheoremId::HardySobolevIneq1, PairForm::e_omega(hp), w, p)
        }
        HardySobolevForm::Ineq2 { r } => {
            if p != 2.0 {
                return Err(Error::domain("the W_r form is stated for p = 2"));
            }
            let w = sob.theta() + (k - 2.0 * s) * q / 2.0;
            (TheoremId::HardySobolevIneq2, remainder_form(hp, RemainderKind::WrForm { r })?, w, 2.0)
        }
    };
    let mut rep = VerificationReport::zero(id, *hp, u.describe(), spec.seed);
    rep.sobolev = Some(*sob);
    if u.is_zero() {
        rep.skipped = true;
        return Ok(rep);
    }
    let lhs = pair_integral(u, &pair, hp, spec)?;
    let rhs = weighted_lp(u, q, weight, None, hp, spec)?;
    rep.lhs = lhs;
    rep.remainder_or_rhs = rhs;
    let a = power_estimate(&lhs, 1.0 / power);
    let b = power_estimate(&rhs, 1.0 / q);
    let ratio = a.value / b.value;
    rep.empirical_ratio = Some(ratio);
    rep.ratio_sigma = Some(ratio.abs() * rss(&[a.std_error / a.value, b.std_error / b.value]));
    Ok(rep.settle(lhs.value, lhs.std_error))
}

/// Largest `|x|` on the support of `u`.
pub fn support_radius(u: &TestFunction) -> f64 {
    match u {
        TestFunction::Bump { center, radius, .. } => norm_k(center, center.len()) + radius,
        _ if u.is_radial() => u.radial_support().1,
        _ => {
            let (lo, hi) = u.support_box();
            lo.iter().zip(&hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt()
        }
    }
}

/// Hardy-Sobolev-Maz'ya inequality: `1 <= k < d` with the flat weight, or
/// `k = d` with the logarithmic weight `ln^q(4R/|x|)`.
///
/// `empirical_ratio = (lhs - C hardy) / rhs^(p/q)` where `rhs` is the weighted
/// `L^q` mass; the margin is the numerator `lhs - C hardy`. For the
/// logarithmic variant `R` defaults to twice the support radius.
pub fn check_hsm(
    u: &TestFunction,
    sob: &SobolevParams,
    spec: &QuadratureSpec,
    log_variant: bool,
    r: Option<f64>,
) -> Result<VerificationReport> {
    let hp = sob.base();
    if log_variant {
        if hp.k() != hp.d() || sob.variant() != SobolevVariant::Log {
            return Err(Error::domain("the logarithmic variant requires k = d"));
        }
    } else if hp.k() == hp.d() || sob.variant() != SobolevVariant::Flat {
        return Err(Error::domain(
            "the flat Hardy-Sobolev-Maz'ya inequality fails when k = d; use the logarithmic variant",
        ));
    }
    require_class(u, hp)?;
    let id = if log_variant { TheoremId::HsmLog } else { TheoremId::HsmFlat };
    let c = sharp_constant_flat(hp)?;
    let mut rep = VerificationReport::zero(id, *hp, u.describe(), spec.seed);
    rep.sobolev = Some(*sob);
    rep.constant = c.value;
    rep.constant_error = c.std_error;
    let log = if log_variant {
        let radius = r.unwrap_or_else(|| 2.0 * support_radius(u));
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain("R must be positive and finite"));
        }
        rep.log_radius = Some(radius);
        Some(LogWeight { r: radius, q: sob.q() })
    } else {
        None
    };
    if u.is_zero() {
        rep.skipped = true;
        return Ok(rep);
    }
    let (p, q) = (hp.p(), sob.q());
    let lhs = pair_integral(u, &PairForm::gagliardo(hp), hp, spec)?;
    let hardy = hardy_term(u, hp, spec)?;
    let weight = sob.theta() - q * (hp.alpha() + hp.beta()) / p;
    let mass = weighted_lp(u, q, weight, log, hp, spec)?;
    let rhs = power_estimate(&mass, p / q);
    rep.lhs = lhs;
    rep.hardy_term = hardy;
    rep.remainder_or_rhs = rhs;
    let numerator = lhs.value - c.value * hardy.value;
    let sigma = rss(&[lhs.std_error, c.value * hardy.std_error, c.std_error * hardy.value]);
    let ratio = numerator / rhs.value;
    rep.empirical_ratio = Some(ratio);
    rep.ratio_sigma = Some(rss(&[sigma, ratio * rhs.std_error]) / rhs.value);
    Ok(rep.settle(numerator, sigma))
}
