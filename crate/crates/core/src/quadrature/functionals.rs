//! Weighted Gagliardo seminorms and the remainder functionals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{norm_k, TestFunction};
use crate::params::HardyParams;
use crate::quadrature::mc::{mc_double_integral, McDesign, McOutput, SwapRule};
use crate::quadrature::radial::RadialPair;
use crate::quadrature::{EngineKind, QuadratureSpec};
use crate::special_fns::french_power;
use crate::Estimate;

/// Which remainder form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemainderKind {
    /// `int int |v(x)-v(y)|^p K |x_k|^(-(k-a+b-sp)/2) |y_k|^(-(k+a-b-sp)/2)`.
    EOmega,
    /// `int int (v(x)^<p/2> - v(y)^<p/2>)^2 K W |x_k|^a |y_k|^b` with
    /// `W = min(w(x), w(y)) max(w(x), w(y))^(p-1)`, `w = |x_k|^-gamma`.
    ETilde,
    /// `int int |v(x)-v(y)|^2 |x-y|^(-d-2s) W_r |x_k|^a |y_k|^b` with
    /// `W_r` built from `|x_k|^(-(k+a+b-2s)/r)`; requires `p = 2`.
    WrForm { r: f64 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum PairKind {
    /// `|a - b|^p`.
    Power(f64),
    /// `(a^<h> - b^<h>)^2`.
    FrenchSquare(f64),
}

/// `pair(u(x), u(y)) |x_k|^wa |y_k|^wb [W(x, y)]` against `|x-y|^(-d-sigma)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairForm {
    pub kind: PairKind,
    pub sigma: f64,
    pub wa: f64,
    pub wb: f64,
    /// `(c, r)`: `W = min(|x_k|^-c, |y_k|^-c) max(|x_k|^-c, |y_k|^-c)^(r-1)`.
    pub min_max: Option<(f64, f64)>,
}

impl PairForm {
    pub fn gagliardo(hp: &HardyParams) -> Self {
        Self { kind: PairKind::Power(hp.p()), sigma: hp.sp(), wa: hp.alpha(), wb: hp.beta(), min_max: None }
    }

    pub fn e_omega(hp: &HardyParams) -> Self {
        let (k, a, b, sp) = (hp.k() as f64, hp.alpha(), hp.beta(), hp.sp());
        Self {
            kind: PairKind::Power(hp.p()),
            sigma: sp,
            wa: -(k - a + b - sp) / 2.0,
            wb: -(k + a - b - sp) / 2.0,
            min_max: None,
        }
    }

    #[inline]
    pub fn value(&self, a: f64, b: f64, rx: f64, ry: f64) -> f64 {
        let diff = match self.kind {
            PairKind::Power(p) => {
                let t = (a - b).abs();
                if p == 2.0 {
                    t * t
                } else {
                    t.powf(p)
                }
            }
            PairKind::FrenchSquare(h) => {
                let t = french_power(a, h) - french_power(b, h);
                t * t
            }
        };
        if diff == 0.0 {
            return 0.0;
        }
        let mut w = diff;
        if self.wa != 0.0 {
            w *= rx.powf(self.wa);
        }
        if self.wb != 0.0 {
            w *= ry.powf(self.wb);
        }
        if let Some((c, r)) = self.min_max {
            let (ox, oy) = (rx.powf(-c), ry.powf(-c));
            w *= ox.min(oy) * ox.max(oy).powf(r - 1.0);
        }
        w
    }

    /// Exponent of `pair(u(x), u(x+h))` in `|h|` for smooth `u`.
    fn diff_power(&self) -> f64 {
        match self.kind {
            PairKind::Power(p) => p,
            PairKind::FrenchSquare(h) => (2.0 * h).min(2.0),
        }
    }

    /// Growth exponent of the pair in the size of its arguments.
    fn value_power(&self) -> f64 {
        match self.kind {
            PairKind::Power(p) => p,
            PairKind::FrenchSquare(h) => 2.0 * h,
        }
    }

    fn min_max_spread(&self) -> f64 {
        self.min_max.map_or(0.0, |(c, r)| c.abs() * (r - 1.0).abs().max(1.0))
    }

    fn min_max_total(&self) -> f64 {
        self.min_max.map_or(0.0, |(c, r)| -c * r)
    }
}

/// Raw double integral `int int |u(x)-u(y)|^p |x-y|^(-d-sp) |x_k|^a |y_k|^b`
/// (the `p`-th power of the seminorm), with the engine chosen by `spec`.
///
/// Monte Carlo handles any function; the radial reduction requires `k = d`
/// and a radial `u`. The deterministic engines fall back to an error for
/// non-radial inputs.
pub fn gagliardo(u: &TestFunction, hp: &HardyParams, spec: &QuadratureSpec) -> Result<Estimate> {
    pair_integral(u, &PairForm::gagliardo(hp), hp, spec)
}

/// [`gagliardo`] with the Monte Carlo engine.
pub fn gagliardo_mc(u: &TestFunction, hp: &HardyParams, spec: &QuadratureSpec) -> Result<Estimate> {
    let spec = spec.with_engine(EngineKind::MonteCarlo);
    pair_integral(u, &PairForm::gagliardo(hp), hp, &spec)
}

/// [`gagliardo`] through the angular reduction (`k = d`, radial `u`).
pub fn gagliardo_radial(u: &TestFunction, hp: &HardyParams, spec: &QuadratureSpec) -> Result<Estimate> {
    let spec = spec.with_engine(EngineKind::RadialReduction);
    pair_integral(u, &PairForm::gagliardo(hp), hp, &spec)
}

/// Evaluates the selected remainder form on `v`.
pub fn remainder_functional(
    v: &TestFunction,
    hp: &HardyParams,
    kind: RemainderKind,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let form = remainder_form(hp, kind)?;
    pair_integral(v, &form, hp, spec)
}

pub(crate) fn remainder_form(hp: &HardyParams, kind: RemainderKind) -> Result<PairForm> {
    let (k, a, b, s, p) = (hp.k() as f64, hp.alpha(), hp.beta(), hp.s(), hp.p());
    match kind {
        RemainderKind::EOmega => Ok(PairForm::e_omega(hp)),
        RemainderKind::ETilde => {
            if !(p > 1.0 && p <= 2.0) {
                return Err(Error::domain("the E_tilde form requires 1 < p <= 2"));
            }
            Ok(PairForm {
                kind: PairKind::FrenchSquare(p / 2.0),
                sigma: hp.sp(),
                wa: a,
                wb: b,
                min_max: Some((hp.gamma(), p)),
            })
        }
        RemainderKind::WrForm { r } => {
            if p != 2.0 {
                return Err(Error::domain("the W_r form requires p = 2"));
            }
            if !(r > 1.0) {
                return Err(Error::domain("the W_r form requires r > 1"));
            }
            Ok(PairForm {
                kind: PairKind::Power(2.0),
                sigma: 2.0 * s,
                wa: a,
                wb: b,
                min_max: Some(((k + a + b - 2.0 * s) / r, r)),
            })
        }
    }
}

fn is_truncated(u: &TestFunction) -> bool {
    match u {
        TestFunction::Counterexample { .. } => true,
        TestFunction::GroundStateProduct { inner, .. } | TestFunction::Dilated { inner, .. } => is_truncated(inner),
        TestFunction::LinearCombination { terms, .. } => terms.iter().any(|(_, t)| is_truncated(t)),
        _ => false,
    }
}

pub(crate) fn pair_integral(
    u: &TestFunction,
    form: &PairForm,
    hp: &HardyParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    if u.dim() != hp.d() {
        return Err(Error::domain(format!(
            "function lives in dimension {} but the parameters have d = {}",
            u.dim(),
            hp.d()
        )));
    }
    if u.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    match spec.engine {
        EngineKind::MonteCarlo => pair_mc(u, form, hp, spec).map(|o| o.estimate(0)),
        _ => pair_radial(u, form, hp, spec.rel_tol),
    }
}

fn pair_radial(u: &TestFunction, form: &PairForm, hp: &HardyParams, rel_tol: f64) -> Result<Estimate> {
    if hp.k() != hp.d() {
        return Err(Error::domain("the radial reduction requires k = d"));
    }
    if !u.is_radial() {
        return Err(Error::domain("the radial reduction requires a radial function"));
    }
    let d = hp.d() as f64;
    let sigma = form.sigma;
    let (inner, outer) = u.radial_support();
    let spread = form.min_max_spread();
    let lo = form.wa.min(form.wb) - spread;
    let hi = form.wa.max(form.wb) + spread;
    let t_left = (d - 1.0 + lo).min(sigma - 1.0 - hi).max(-0.9);
    let origin = u.radial_origin_order();
    let r_left = form.wa + form.wb + form.min_max_total() + d - 1.0 - sigma
        + if origin.is_finite() { form.value_power() * origin } else { 0.0 };
    let pair = |r: f64, rho: f64| {
        let a = u.radial_value(r);
        let b = u.radial_value(rho);
        if a == 0.0 && b == 0.0 {
            return 0.0;
        }
        form.value(a, b, r, rho)
    };
    let rp = RadialPair {
        d: hp.d(),
        sigma,
        pair: &pair,
        kinks: u.radial_kinks(),
        inner,
        outer,
        truncated: is_truncated(u),
        t_left,
        r_left: if inner > 0.0 { r_left.max(-0.9) } else { r_left },
        diff_power: form.diff_power(),
    };
    rp.integrate(rel_tol)
}

/// Monte Carlo design for a pair form on `u`.
pub(crate) fn design_for(u: &TestFunction, form: &PairForm, hp: &HardyParams, swap: SwapRule) -> McDesign {
    let (lo, hi) = u.support_box();
    let spread = form.min_max_spread();
    McDesign {
        d: hp.d(),
        k: hp.k(),
        sigma: form.sigma,
        diff_power: form.diff_power(),
        weight_lo: form.wa.min(form.wb) - spread,
        weight_hi: form.wa.max(form.wb) + form.min_max.map_or(0.0, |(c, r)| (-c).max(0.0) * (r - 1.0).max(1.0)),
        lo,
        hi,
        swap,
    }
}

pub(crate) fn pair_mc(u: &TestFunction, form: &PairForm, hp: &HardyParams, spec: &QuadratureSpec) -> Result<McOutput> {
    joint_pair_mc(&[(u, *form)], hp, spec)
}

/// Several pair integrals from common samples, so that differences carry
/// their covariance. All forms must share the kernel order.
pub(crate) fn joint_pair_mc(
    terms: &[(&TestFunction, PairForm)],
    hp: &HardyParams,
    spec: &QuadratureSpec,
) -> Result<McOutput> {
    let k = hp.k();
    let mut design: Option<McDesign> = None;
    for (u, form) in terms {
        let mut d = design_for(u, form, hp, SwapRule::All);
        if let TestFunction::GroundStateProduct { exponent, .. } = u {
            d.weight_lo += form.value_power() * exponent.min(0.0);
        }
        design = Some(match design {
            None => d,
            Some(acc) => {
                if acc.sigma != d.sigma {
                    return Err(Error::domain("jointly sampled forms must share the kernel order"));
                }
                McDesign {
                    diff_power: acc.diff_power.min(d.diff_power),
                    weight_lo: acc.weight_lo.min(d.weight_lo),
                    weight_hi: acc.weight_hi.max(d.weight_hi),
                    lo: acc.lo.iter().zip(&d.lo).map(|(a, b)| a.min(*b)).collect(),
                    hi: acc.hi.iter().zip(&d.hi).map(|(a, b)| a.max(*b)).collect(),
                    ..acc
                }
            }
        });
    }
    let design = design.ok_or_else(|| Error::domain("no terms to integrate"))?;
    mc_double_integral(
        &design,
        terms.len(),
        |x: &[f64], y: &[f64], out: &mut [f64]| {
            let (rx, ry) = (norm_k(x, k), norm_k(y, k));
            for (slot, (u, form)) in out.iter_mut().zip(terms) {
                let a = u.eval(x);
                let b = u.eval(y);
                *slot = if a == 0.0 && b == 0.0 { 0.0 } else { form.value(a, b, rx, ry) };
            }
        },
        spec,
    )
}
