//! Multi-function studies: the minimizing tensor sequence, the failure of
//! the Hardy-Sobolev-Maz'ya inequality for `k = d`, and inversion duality.

use serde::{Deserialize, Serialize};

use crate::constants::{sharp_constant_flat, sharp_constant_point, sharp_constant_point_shifted, transverse_prefactor};
use crate::error::{Error, Result};
use crate::functions::{make_counterexample, make_sharpness_sequence, norm_k, Profile, TestFunction};
use crate::params::{HardyParams, SobolevParams};
use crate::quadrature::adaptive::{integrate_1d, Endpoints};
use crate::quadrature::functionals::{pair_integral, PairForm};
use crate::quadrature::mc::{mc_double_integral, McDesign, SwapRule};
use crate::quadrature::{gagliardo_radial, weighted_lp, QuadratureSpec};
use crate::special_fns::sphere_surface;
use crate::verify::checks::{hardy_term, rss};
use crate::Estimate;

/// Relative slack on the limiting ratio of the sharpness study.
pub const SHARPNESS_TOLERANCE: f64 = 0.15;

/// Accepted band for the fitted slope, as a multiple of `p/q`.
pub const SLOPE_BAND: (f64, f64) = (0.85, 1.15);

/// One member `u_N` of the tensor sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub n: f64,
    pub lhs: Estimate,
    pub hardy: Estimate,
    pub ratio: f64,
    pub ratio_sigma: f64,
    /// `lhs - C hardy`.
    pub margin: f64,
    pub margin_sigma: f64,
    /// `p`-th powers of the two Minkowski pieces.
    pub i1p: Estimate,
    pub i2p: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessStudy {
    pub params: HardyParams,
    pub eta: Profile,
    pub constant: f64,
    pub prefactor: f64,
    /// `[eta]^p` and the Hardy term of `eta` in `R^k`.
    pub eta_seminorm: Estimate,
    pub eta_hardy: Estimate,
    /// `prefactor * [eta]^p / hardy(eta)`, the limit of `ratio(N)`.
    pub target: f64,
    pub rows: Vec<SharpnessRow>,
    /// `ratio(N)` non-increasing within `3 sigma`.
    pub ratio_monotone: bool,
    /// `|ratio(N_max) / target - 1| <= SHARPNESS_TOLERANCE`.
    pub final_within_tolerance: bool,
    /// `I_2^p` strictly decreasing in `N`.
    pub i2_decreasing: bool,
    /// Least-squares slope of `ln I_2^p` against `ln N`.
    pub i2_rate: f64,
    /// Every `I_1^p` within `3 sigma` of `prefactor * [eta]^p`.
    pub i1_consistent: bool,
    pub seed: u64,
}

impl SharpnessStudy {
    pub fn pass(&self) -> bool {
        self.ratio_monotone && self.final_within_tolerance && self.i2_decreasing
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Evaluates `ratio(N) = [u_N]^p / hardy(u_N)` along the tensor sequence
/// `u_N = eta(|x_k|) phi_N(x_{d-k})` together with the Minkowski pieces
/// `I_1^p` and `I_2^p`.
pub fn sharpness_study(
    hp: &HardyParams,
    eta: &Profile,
    phi_radius: f64,
    phi_m: u32,
    n_list: &[f64],
    spec: &QuadratureSpec,
) -> Result<SharpnessStudy> {
    if hp.k() >= hp.d() {
        return Err(Error::domain("the sharpness study needs d - k >= 1"));
    }
    if n_list.is_empty() {
        return Err(Error::domain("N list must not be empty"));
    }
    hp.require_nondegenerate()?;
    let (k, p) = (hp.k(), hp.p());
    let c = sharp_constant_flat(hp)?;
    let prefactor = transverse_prefactor(hp.d(), k, hp.s(), p)?;
    let hp_k = HardyParams::new(k, hp.s(), p, k, hp.alpha(), hp.beta())?;
    let eta_fn = TestFunction::Radial { dim: k, profile: eta.clone() };
    let det = QuadratureSpec::radial(1e-7);
    let eta_seminorm = gagliardo_radial(&eta_fn, &hp_k, &det)?;
    let eta_hardy = hardy_term(&eta_fn, &hp_k, &det)?;
    let target = prefactor * eta_seminorm.value / eta_hardy.value;

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let u = make_sharpness_sequence(hp, eta.clone(), phi_radius, phi_m, n)?;
        let TestFunction::Tensor(t) = &u else { unreachable!() };
        let lhs = pair_integral(&u, &PairForm::gagliardo(hp), hp, spec)?;
        let hardy = hardy_term(&u, hp, spec)?;
        let ratio = lhs.value / hardy.value;
        let ratio_sigma = ratio.abs() * rss(&[lhs.std_error / lhs.value, hardy.std_error / hardy.value]);
        let margin = lhs.value - c.value * hardy.value;
        let margin_sigma = rss(&[lhs.std_error, c.value * hardy.std_error, c.std_error * hardy.value]);
        let (lo, hi) = u.support_box();
        let design = |swap| McDesign {
            d: hp.d(),
            k,
            sigma: hp.sp(),
            diff_power: p,
            weight_lo: hp.alpha().min(hp.beta()),
            weight_hi: hp.alpha().max(hp.beta()),
            lo: lo.clone(),
            hi: hi.clone(),
            swap,
        };
        let (a, b) = (hp.alpha(), hp.beta());
        let weight = |x: &[f64], y: &[f64]| norm_k(x, k).powf(a) * norm_k(y, k).powf(b);
        let i1p = mc_double_integral(
            &design(SwapRule::KPart),
            1,
            |x: &[f64], y: &[f64], out: &mut [f64]| {
                let f = t.phi_n(&x[k..]);
                let de = t.eta_at(&x[..k]) - t.eta_at(&y[..k]);
                out[0] = if f == 0.0 || de == 0.0 { 0.0 } else { (f.abs() * de.abs()).powf(p) * weight(x, y) };
            },
            spec,
        )?
        .estimate(0);
        let i2p = mc_double_integral(
            &design(SwapRule::TransversePart),
            1,
            |x: &[f64], y: &[f64], out: &mut [f64]| {
                let e = t.eta_at(&x[..k]);
                let df = t.phi_n(&x[k..]) - t.phi_n(&y[k..]);
                out[0] = if e == 0.0 || df == 0.0 { 0.0 } else { (e.abs() * df.abs()).powf(p) * weight(x, y) };
            },
            spec,
        )?
        .estimate(0);
        rows.push(SharpnessRow { n, lhs, hardy, ratio, ratio_sigma, margin, margin_sigma, i1p, i2p });
    }

    let ratio_monotone =
        rows.windows(2).all(|w| w[1].ratio <= w[0].ratio + 3.0 * rss(&[w[0].ratio_sigma, w[1].ratio_sigma]));
    let last = rows.last().expect("nonempty");
    let final_within_tolerance = (last.ratio / target - 1.0).abs() <= SHARPNESS_TOLERANCE;
    let i2_decreasing = rows.windows(2).all(|w| w[1].i2p.value < w[0].i2p.value);
    let i2_rate = if rows.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| r.n.ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.i2p.value.ln()).collect();
        fit_slope(&x, &y)
    } else {
        f64::NAN
    };
    let i1_exact = prefactor * eta_seminorm.value;
    let i1_consistent = rows
        .iter()
        .all(|r| (r.i1p.value - i1_exact).abs() <= 3.0 * rss(&[r.i1p.std_error, prefactor * eta_seminorm.std_error]));
    Ok(SharpnessStudy {
        params: *hp,
        eta: eta.clone(),
        constant: c.value,
        prefactor,
        eta_seminorm,
        eta_hardy,
        target,
        rows,
        ratio_monotone,
        final_within_tolerance,
        i2_decreasing,
        i2_rate,
        i1_consistent,
        seed: spec.seed,
    })
}

/// One `eps` of the counterexample study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub eps: f64,
    pub lhs: Estimate,
    pub hardy: Estimate,
    /// `|S^(d-1)| (1/(2(d+alpha+beta-sp)) + 1/(p eps))`.
    pub hardy_closed_form: f64,
    pub hardy_rel_error: f64,
    /// `(int |u|^q |x|^(q(alpha+beta)/p))^(p/q)`.
    pub sobolev: Estimate,
    /// `(|S^(d-1)|/q)^(p/q) eps^(-p/q)`.
    pub sobolev_lower_bound: f64,
    pub numerator: f64,
    pub psi: f64,
    pub psi_sigma: f64,
    /// The shifted constant by two-dimensional quadrature, and its
    /// one-dimensional cross-check through the angular kernel.
    pub c_eps: Estimate,
    pub c_eps_1d: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleStudy {
    /// Parameters the family was evaluated on (the inversion dual when
    /// `gamma < 0`).
    pub params: HardyParams,
    pub used_dual: bool,
    pub q: f64,
    pub constant: f64,
    pub rows: Vec<CounterexampleRow>,
    pub slope: f64,
    /// `p / q`.
    pub slope_target: f64,
    pub slope_in_band: bool,
    /// `Psi` decreasing along decreasing `eps`.
    pub psi_monotone: bool,
    pub c_eps_exceeds_constant: bool,
    pub sobolev_bound_holds: bool,
}

impl CounterexampleStudy {
    pub fn pass(&self) -> bool {
        self.slope_in_band && self.psi_monotone && self.c_eps_exceeds_constant && self.sobolev_bound_holds
    }
}

/// `C_eps = |S^(d-2)| int_0^1 int_{-1}^1 |1 - r^(gamma+eps)|^p r^(sp-1)
/// (r^-alpha + r^-beta) (1-t^2)^((d-3)/2) (1 - 2rt + r^2)^(-(d+sp)/2) dt dr`
/// by nested adaptive quadrature (`t = cos phi`). For `d = 1` the sphere
/// is `{-1, 1}` and the inner integral is a two-point sum.
pub fn shifted_constant_2d(hp: &HardyParams, eps: f64, rel_tol: f64) -> Result<Estimate> {
    if hp.k() != hp.d() {
        return Err(Error::domain("the shifted constant is defined for k = d"));
    }
    hp.require_nondegenerate()?;
    let (d, p, sp, a, b) = (hp.d(), hp.p(), hp.sp(), hp.alpha(), hp.beta());
    let g = hp.gamma() + eps;
    if g == 0.0 {
        return Err(Error::DegenerateRegime);
    }
    let e = -0.5 * (d as f64 + sp);
    let inner_tol = 0.1 * rel_tol;
    let angular = |r: f64| -> f64 {
        if d == 1 {
            return (1.0 - r).abs().powf(2.0 * e) + (1.0 + r).powf(2.0 * e);
        }
        let f = |phi: f64| {
            let base = 1.0 - 2.0 * r * phi.cos() + r * r;
            phi.sin().powi(d as i32 - 2) * base.powf(e)
        };
        let w = (1.0 - r).max(1e-300);
        let mut cuts = vec![0.0];
        for c in [w, 4.0 * w, 16.0 * w] {
            if c < std::f64::consts::PI {
                cuts.push(c);
            }
        }
        cuts.push(std::f64::consts::PI);
        let mut acc = 0.0;
        for s in cuts.windows(2) {
            acc += integrate_1d(f, s[0], s[1], Endpoints::regular(), inner_tol).map(|v| v.value).unwrap_or(f64::NAN);
        }
        sphere_surface::<f64>(d - 2) * acc
    };
    let outer = |r: f64| {
        if r <= 0.0 || r >= 1.0 {
            return 0.0;
        }
        let lr = r.ln();
        let diff = (g * lr).exp_m1().abs().powf(p);
        diff * r.powf(sp - 1.0) * ((-a * lr).exp() + (-b * lr).exp()) * angular(r)
    };
    let left = if g > 0.0 { sp - 1.0 - a.max(b) } else { d as f64 - 1.0 + a.min(b) };
    let right = p * (1.0 - hp.s()) - 1.0;
    let lo = integrate_1d(outer, 0.0, 0.5, Endpoints::left(left), rel_tol)?;
    let hi = integrate_1d(outer, 0.5, 1.0, Endpoints::right(right), rel_tol)?;
    let total = lo.add(&hi);
    if !total.value.is_finite() {
        return Err(Error::non_integrable("shifted constant quadrature diverged"));
    }
    Ok(Estimate { std_error: total.std_error + inner_tol * total.value.abs(), ..total })
}

/// `Psi(u_eps) = ([u_eps]^p - C hardy(u_eps)) / (int |u_eps|^q |x|^(q(alpha+beta)/p))^(p/q)`
/// along `eps_list` with `q = dp/(d - sp)`, with the radial engine.
pub fn hsm_failure_study(
    hp: &HardyParams,
    sob: &SobolevParams,
    eps_list: &[f64],
    rel_tol: f64,
) -> Result<CounterexampleStudy> {
    if hp.k() != hp.d() {
        return Err(Error::domain("the counterexample study requires k = d"));
    }
    if sob.base() != hp {
        return Err(Error::domain("Sobolev parameters must share the Hardy tuple"));
    }
    let d = hp.d() as f64;
    if !(hp.sp() < d) {
        return Err(Error::domain("the counterexample study requires sp < d"));
    }
    let qc = d * hp.p() / (d - hp.sp());
    if (sob.q() - qc).abs() > 1e-12 * qc {
        return Err(Error::domain("the counterexample study requires q = dp/(d - sp)"));
    }
    if eps_list.len() < 2 || eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::domain("eps list needs at least two positive values"));
    }
    let gamma = hp.gamma();
    if gamma.abs() < 1e-12 {
        return Err(Error::domain("gamma = 0: alpha+beta+sp must differ from d"));
    }
    let used_dual = gamma < 0.0;
    let hp = if used_dual { hp.inversion_dual()? } else { *hp };
    let (p, q) = (hp.p(), sob.q());
    let c = sharp_constant_point(hp.d(), hp.s(), p, hp.alpha(), hp.beta())?;
    let spec = QuadratureSpec::radial(rel_tol);
    let surface = sphere_surface::<f64>(hp.d() - 1);
    let ab = hp.alpha() + hp.beta();

    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let u = make_counterexample(eps, &hp)?;
        let lhs = gagliardo_radial(&u, &hp, &spec)?;
        let hardy = hardy_term(&u, &hp, &spec)?;
        let closed = surface * (1.0 / (2.0 * (d + ab - hp.sp())) + 1.0 / (p * eps));
        let mass = weighted_lp(&u, q, -q * ab / p, None, &hp, &spec)?;
        let sobolev = Estimate {
            value: mass.value.powf(p / q),
            std_error: mass.value.powf(p / q) * (p / q) * mass.std_error / mass.value,
            samples_used: 0,
        };
        let numerator = lhs.value - c.value * hardy.value;
        let num_sigma = rss(&[lhs.std_error, c.value * hardy.std_error, c.std_error * hardy.value]);
        let psi = numerator / sobolev.value;
        let psi_sigma = rss(&[num_sigma, psi * sobolev.std_error]) / sobolev.value;
        let c_eps = shifted_constant_2d(&hp, eps, 1e-9)?;
        let c_eps_1d = sharp_constant_point_shifted(hp.d(), hp.s(), p, hp.alpha(), hp.beta(), eps)?;
        rows.push(CounterexampleRow {
            eps,
            lhs,
            hardy,
            hardy_closed_form: closed,
            hardy_rel_error: (hardy.value / closed - 1.0).abs(),
            sobolev,
            sobolev_lower_bound: (surface / q).powf(p / q) * eps.powf(-p / q),
            numerator,
            psi,
            psi_sigma,
            c_eps,
            c_eps_1d,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.psi.ln()).collect();
    let slope = fit_slope(&x, &y);
    let slope_target = p / q;
    let slope_in_band = slope >= SLOPE_BAND.0 * slope_target && slope <= SLOPE_BAND.1 * slope_target;
    let mut by_eps: Vec<&CounterexampleRow> = rows.iter().collect();
    by_eps.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let psi_monotone = by_eps.windows(2).all(|w| w[1].psi < w[0].psi);
    let c_eps_exceeds_constant = rows.iter().all(|r| r.c_eps.value > c.value);
    let sobolev_bound_holds = rows.iter().all(|r| r.sobolev.value >= r.sobolev_lower_bound * (1.0 - 1e-9));
    Ok(CounterexampleStudy {
        params: hp,
        used_dual,
        q,
        constant: c.value,
        rows,
        slope,
        slope_target,
        slope_in_band,
        psi_monotone,
        c_eps_exceeds_constant,
        sobolev_bound_holds,
    })
}

/// Outcome of comparing `C_1(alpha, beta)` with `C_1(sp-alpha-d, sp-beta-d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityOutcome {
    pub params: HardyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<HardyParams>,
    pub constant: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_diff: Option<f64>,
    /// `None` when the dual tuple is inadmissible (skipped).
    pub agrees: Option<bool>,
}

/// Relative agreement required by [`duality_check`].
pub const DUALITY_TOL: f64 = 1e-6;

/// Checks the inversion identity of the point constant (`k = d`).
pub fn duality_check(hp: &HardyParams) -> Result<DualityOutcome> {
    if hp.k() != hp.d() {
        return Err(Error::domain("inversion duality concerns k = d"));
    }
    let c = sharp_constant_point(hp.d(), hp.s(), hp.p(), hp.alpha(), hp.beta())?;
    let Ok(dual) = hp.inversion_dual() else {
        return Ok(DualityOutcome {
            params: *hp,
            dual: None,
            constant: c.value,
            dual_constant: None,
            rel_diff: None,
            agrees: None,
        });
    };
    let cd = sharp_constant_point(dual.d(), dual.s(), dual.p(), dual.alpha(), dual.beta())?;
    let rel = (cd.value / c.value - 1.0).abs();
    Ok(DualityOutcome {
        params: *hp,
        dual: Some(dual),
        constant: c.value,
        dual_constant: Some(cd.value),
        rel_diff: Some(rel),
        agrees: Some(rel < DUALITY_TOL),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SobolevVariant;

    #[test]
    fn slope_of_a_line() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, 1.5, 2.0];
        assert!((fit_slope(&x, &y) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn shifted_constant_agrees_with_kernel_form() {
        let hp = HardyParams::point(2, 0.5, 2.0, 0.0, 0.0).unwrap();
        let two = shifted_constant_2d(&hp, 0.1, 1e-9).unwrap();
        let one = sharp_constant_point_shifted(2, 0.5, 2.0, 0.0, 0.0, 0.1).unwrap();
        assert!((two.value / one.value - 1.0).abs() < 1e-7, "{two:?} {one:?}");
        let base = shifted_constant_2d(&hp, 0.0, 1e-9).unwrap();
        assert!((base.value - 2.871_080_044_184_52).abs() < 1e-7);
    }

    #[test]
    fn self_dual_point_is_degenerate() {
        let (d, s, p) = (2usize, 0.5, 2.0);
        let a = (s * p - d as f64) / 2.0;
        let hp = HardyParams::point(d, s, p, a, a).unwrap();
        assert_eq!(duality_check(&hp), Err(Error::DegenerateRegime));
    }

    #[test]
    fn admissible_dual_pair_agrees() {
        let hp = HardyParams::point(2, 0.5, 2.0, -0.3, -0.2).unwrap();
        let out = duality_check(&hp).unwrap();
        assert_eq!(out.agrees, Some(true), "{out:?}");
    }

    #[test]
    fn inadmissible_dual_is_skipped() {
        let hp = HardyParams::point(2, 0.5, 2.0, 0.0, 0.0).unwrap();
        let out = duality_check(&hp).unwrap();
        assert_eq!(out.agrees, None);
    }

    #[test]
    fn failure_study_rejects_bad_inputs() {
        let hp = HardyParams::new(2, 0.5, 2.0, 1, 0.0, 0.0).unwrap();
        let sob = SobolevParams::critical(hp, SobolevVariant::Flat).unwrap();
        assert!(hsm_failure_study(&hp, &sob, &[0.1, 0.05], 1e-8).is_err());
    }
}
