//! Weighted `L^P` masses `int |u|^P |x_k|^(-w) [/ ln^q(4R/|x|)] dx`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{bump_power_integral, norm_k, Profile, TensorSharpness, TestFunction};
use crate::params::HardyParams;
use crate::quadrature::adaptive::{integrate_1d, AdaptiveOptions, Endpoints};
use crate::quadrature::radial::{breakpoints, integrate_segments, radial_mass};
use crate::quadrature::QuadratureSpec;
use crate::special_fns::{gamma_fn, sphere_surface};
use crate::Estimate;

/// Divides the integrand by `ln^q(4R/|x|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogWeight {
    pub r: f64,
    pub q: f64,
}

impl LogWeight {
    fn factor(&self, rho: f64) -> f64 {
        (4.0 * self.r / rho).ln().powf(self.q)
    }
}

/// `int |u(x)|^power |x_k|^(-weight_exponent) [/ ln^q(4R/|x|)] dx`.
///
/// Always deterministic: radial functions with `k = d` reduce to one radial
/// integral, the tensor sequence factorizes, bumps use the closed-form
/// transverse integral, and everything else falls back to nested adaptive
/// quadrature over the support box.
pub fn weighted_lp(
    u: &TestFunction,
    power: f64,
    weight_exponent: f64,
    log: Option<LogWeight>,
    hp: &HardyParams,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if u.dim() != hp.d() {
        return Err(Error::domain(format!(
            "function lives in dimension {} but the parameters have d = {}",
            u.dim(),
            hp.d()
        )));
    }
    if !(power >= 1.0) {
        return Err(Error::domain("power must be at least 1"));
    }
    if let Some(lw) = log {
        if !(lw.r > 0.0) {
            return Err(Error::domain("R must be positive"));
        }
        let (lo, hi) = u.support_box();
        let reach = lo.iter().zip(&hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt();
        let outer = if u.is_radial() { u.radial_support().1 } else { reach };
        if outer > lw.r * (1.0 + 1e-12) {
            return Err(Error::precondition(format!("support radius {outer} exceeds R = {}", lw.r)));
        }
    }
    if u.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    let tol = spec.rel_tol;
    let k = hp.k();
    if k == hp.d() && u.is_radial() {
        return radial_lp(u, power, weight_exponent, log, tol);
    }
    if log.is_some() {
        return general_lp(u, power, weight_exponent, log, hp, tol);
    }
    match u {
        TestFunction::Tensor(t) => tensor_lp(t, power, weight_exponent, tol),
        TestFunction::Bump { center, radius, m } => {
            bump_lp(hp.d(), k, center, *radius, *m as f64 * power, weight_exponent, tol)
        }
        _ => general_lp(u, power, weight_exponent, None, hp, tol),
    }
}

fn require_integrable(expo: f64) -> Result<()> {
    if expo > -1.0 {
        Ok(())
    } else {
        Err(Error::non_integrable(format!("integrand behaves like r^{expo} near the singular set")))
    }
}

fn radial_lp(u: &TestFunction, power: f64, w: f64, log: Option<LogWeight>, tol: f64) -> Result<Estimate> {
    let d = u.dim();
    let (inner, outer) = u.radial_support();
    let left = power * u.radial_origin_order() - w;
    if inner == 0.0 {
        require_integrable(left + d as f64 - 1.0)?;
    }
    let f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let v = u.radial_value(r);
        if v == 0.0 {
            return 0.0;
        }
        let mut out = v.abs().powf(power) * r.powf(-w);
        if let Some(lw) = log {
            out /= lw.factor(r);
        }
        out
    };
    let pts = breakpoints(inner, outer, u.radial_kinks());
    let left = (inner == 0.0 && left.is_finite()).then_some(left);
    let est = radial_mass(d, &f, &pts, left, tol)?;
    Ok(with_tolerance(est, tol))
}

/// `|S^(n-1)| int_0^inf |f(r)|^P r^(n-1-w) dr`.
pub(crate) fn profile_lp(n: usize, profile: &Profile, power: f64, w: f64, tol: f64) -> Result<Estimate> {
    let u = TestFunction::Radial { dim: n, profile: profile.clone() };
    radial_lp(&u, power, w, None, tol)
}

fn tensor_lp(t: &TensorSharpness, power: f64, w: f64, tol: f64) -> Result<Estimate> {
    let eta = profile_lp(t.k, &t.eta, power, w, tol)?;
    let n = t.d - t.k;
    let amp = t.n.powf((t.k as f64 - t.d as f64) / t.p) / t.phi_norm;
    let phi = amp.powf(power) * bump_power_integral(n, t.phi_radius * t.n, t.phi_m as f64 * power);
    Ok(eta.scale(phi))
}

/// Integral of `(1 - |x-c|^2/R^2)_+^a |x_k|^(-w)` over `R^d`.
///
/// The transverse integral at fixed `x_k` is
/// `A^(a+(d-k)/2) R^(d-k) pi^((d-k)/2) Gamma(a+1) / Gamma(a+1+(d-k)/2)` with
/// `A = 1 - |x_k - c_k|^2/R^2`, leaving a `k`-dimensional integral over a
/// ball, done directly for `k = 1` and in polar coordinates about the
/// origin otherwise.
fn bump_lp(d: usize, k: usize, c: &[f64], radius: f64, a: f64, w: f64, tol: f64) -> Result<Estimate> {
    let m = (d - k) as f64;
    let e = a + 0.5 * m;
    let trans = if d == k {
        1.0
    } else {
        radius.powf(m) * std::f64::consts::PI.powf(0.5 * m) * gamma_fn(a + 1.0)? / gamma_fn(a + 1.0 + 0.5 * m)?
    };
    let r2 = radius * radius;
    let ck = &c[..k];
    let cn = norm_k(c, k);
    let crosses = cn < radius;
    if crosses {
        require_integrable(k as f64 - 1.0 - w)?;
    }
    let est = if k == 1 {
        let c0 = ck[0];
        let f = |x: f64| {
            let dx = x - c0;
            let aa = 1.0 - dx * dx / r2;
            if aa <= 0.0 || x == 0.0 {
                0.0
            } else {
                aa.powf(e) * x.abs().powf(-w)
            }
        };
        let (lo, hi) = (c0 - radius, c0 + radius);
        if lo < 0.0 && hi > 0.0 {
            let ew = (-w != 0.0).then_some(-w);
            let l = integrate_1d(f, lo, 0.0, Endpoints { left: None, right: ew }, tol)?;
            let r = integrate_1d(f, 0.0, hi, Endpoints { left: ew, right: None }, tol)?;
            l.add(&r)
        } else {
            integrate_1d(f, lo, hi, Endpoints::regular(), tol)?
        }
    } else {
        // Polar about the origin: |x_k| = rho, angle phi to c_k.
        let s_km2 = sphere_surface::<f64>(k - 2);
        let s_km1 = sphere_surface::<f64>(k - 1);
        let km2 = (k - 2) as i32;
        let angular = |rho: f64| -> f64 {
            if cn == 0.0 {
                let aa = 1.0 - rho * rho / r2;
                return if aa > 0.0 { s_km1 * aa.powf(e) } else { 0.0 };
            }
            let cos_max = (rho * rho + cn * cn - r2) / (2.0 * rho * cn);
            if cos_max >= 1.0 {
                return 0.0;
            }
            let phi_max = if cos_max <= -1.0 { std::f64::consts::PI } else { cos_max.acos() };
            let g = |phi: f64| {
                let aa = 1.0 - (rho * rho - 2.0 * rho * cn * phi.cos() + cn * cn) / r2;
                if aa <= 0.0 {
                    0.0
                } else {
                    aa.powf(e) * phi.sin().powi(km2)
                }
            };
            integrate_1d(g, 0.0, phi_max, Endpoints::regular(), 0.1 * tol).map_or(f64::NAN, |v| v.value) * s_km2
        };
        let f = |rho: f64| {
            if rho <= 0.0 {
                return 0.0;
            }
            angular(rho) * rho.powf(k as f64 - 1.0 - w)
        };
        let lo = (cn - radius).max(0.0);
        let hi = cn + radius;
        let pts = breakpoints(lo, hi, [(radius - cn).abs()]);
        let left = (lo == 0.0).then_some(k as f64 - 1.0 - w);
        integrate_segments(&f, &pts, left, &AdaptiveOptions::relative(tol))?
    };
    Ok(with_tolerance(est.scale(trans), tol))
}

/// Bumps contributing breakpoints to the nested quadrature.
fn collect_bumps(u: &TestFunction, out: &mut Vec<(Vec<f64>, f64)>) {
    match u {
        TestFunction::Bump { center, radius, .. } => out.push((center.clone(), *radius)),
        TestFunction::Radial { dim, profile } => {
            for r in profile.kinks() {
                out.push((vec![0.0; *dim], r));
            }
        }
        TestFunction::GroundStateProduct { inner, .. } => collect_bumps(inner, out),
        TestFunction::LinearCombination { terms, .. } => terms.iter().for_each(|(_, t)| collect_bumps(t, out)),
        TestFunction::Dilated { inner, lambda } => {
            let mut tmp = Vec::new();
            collect_bumps(inner, &mut tmp);
            out.extend(tmp.into_iter().map(|(c, r)| (c.iter().map(|v| v / lambda).collect(), r / lambda)));
        }
        TestFunction::Counterexample { dim, .. } => out.push((vec![0.0; *dim], 1.0)),
        TestFunction::Tensor(_) => {}
    }
}

struct Nested<'a> {
    u: &'a TestFunction,
    d: usize,
    k: usize,
    power: f64,
    w: f64,
    log: Option<LogWeight>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    bumps: Vec<(Vec<f64>, f64)>,
    tol: f64,
}

impl Nested<'_> {
    fn integrand(&self, x: &[f64]) -> f64 {
        let v = self.u.eval(x);
        if v == 0.0 {
            return 0.0;
        }
        let mut out = v.abs().powf(self.power);
        if self.w != 0.0 {
            out *= norm_k(x, self.k).powf(-self.w);
        }
        if let Some(lw) = self.log {
            let rho = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            out /= lw.factor(rho);
        }
        out
    }

    fn level(&self, prefix: &[f64]) -> Result<Estimate> {
        let i = prefix.len();
        let mut interior = Vec::new();
        for (c, r) in &self.bumps {
            let used: f64 = prefix.iter().zip(c).map(|(x, ci)| (x - ci) * (x - ci)).sum();
            let rem = r * r - used;
            if rem > 0.0 {
                let h = rem.sqrt();
                interior.push(c[i] - h);
                interior.push(c[i] + h);
            }
        }
        if i < self.k {
            interior.push(0.0);
        }
        let pts = breakpoints(self.lo[i], self.hi[i], interior);
        let singular = if i == 0 && self.w > 0.0 {
            let e = (self.k as f64 - 1.0 - self.w).min(0.0);
            (e != 0.0).then_some(e)
        } else {
            None
        };
        let f = |t: f64| {
            let mut x = prefix.to_vec();
            x.push(t);
            if i + 1 == self.d {
                self.integrand(&x)
            } else {
                self.level(&x).map_or(f64::NAN, |e| e.value)
            }
        };
        let mut acc = Estimate::exact(0.0);
        for win in pts.windows(2) {
            let (a, b) = (win[0], win[1]);
            if !(b > a) {
                continue;
            }
            let mut ends = Endpoints::regular();
            if a == 0.0 {
                ends.left = singular;
            }
            if b == 0.0 {
                ends.right = singular;
            }
            acc = acc.add(&integrate_1d(f, a, b, ends, self.tol)?);
        }
        Ok(acc)
    }
}

fn general_lp(
    u: &TestFunction,
    power: f64,
    w: f64,
    log: Option<LogWeight>,
    hp: &HardyParams,
    tol: f64,
) -> Result<Estimate> {
    let d = hp.d();
    let k = hp.k();
    if d > 4 {
        return Err(Error::domain("nested quadrature supports d <= 4"));
    }
    if u.k_gap(k) == 0.0 && w > 0.0 {
        require_integrable(k as f64 - 1.0 - w)?;
    }
    let (lo, hi) = u.support_box();
    let mut bumps = Vec::new();
    collect_bumps(u, &mut bumps);
    let nested = Nested { u, d, k, power, w, log, lo, hi, bumps, tol };
    let est = nested.level(&[])?;
    if !est.value.is_finite() {
        return Err(Error::non_integrable("nested quadrature produced a non-finite value"));
    }
    Ok(with_tolerance(est, tol))
}

fn with_tolerance(est: Estimate, tol: f64) -> Estimate {
    let _ = tol;
    Estimate { std_error: est.std_error.max(4.0 * f64::EPSILON * est.value.abs()), ..est }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{make_bump, make_radial};

    fn hp(d: usize, k: usize) -> HardyParams {
        HardyParams::new(d, 0.5, 2.0, k, 0.0, 0.0).unwrap()
    }

    #[test]
    fn bump_mass_matches_closed_form() {
        let spec = QuadratureSpec::adaptive(1e-10);
        for (d, k) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)] {
            let mut c = vec![0.0; d];
            c[0] = 2.0;
            let u = make_bump(c, 0.7, 2).unwrap();
            let e = weighted_lp(&u, 2.0, 0.0, None, &hp(d, k), &spec).unwrap();
            let exact = bump_power_integral(d, 0.7, 4.0);
            assert!((e.value / exact - 1.0).abs() < 1e-9, "d={d} k={k}: {} vs {exact}", e.value);
        }
    }

    #[test]
    fn bump_with_singular_weight_agrees_with_nested() {
        let spec = QuadratureSpec::adaptive(1e-9);
        let h = hp(2, 1);
        let u = make_bump(vec![0.2, 0.1], 0.6, 2).unwrap();
        let closed = weighted_lp(&u, 2.0, 0.5, None, &h, &spec).unwrap();
        let combo = TestFunction::LinearCombination { dim: 2, terms: vec![(1.0, u)] };
        let nested = weighted_lp(&combo, 2.0, 0.5, None, &h, &spec).unwrap();
        assert!((closed.value / nested.value - 1.0).abs() < 1e-6, "{} {}", closed.value, nested.value);
    }

    #[test]
    fn polar_bump_agrees_with_nested_in_codimension_two() {
        let spec = QuadratureSpec::adaptive(1e-8);
        let h = hp(2, 2);
        let u = make_bump(vec![0.3, -0.2], 0.5, 2).unwrap();
        let closed = weighted_lp(&u, 2.0, 0.5, None, &h, &spec).unwrap();
        let combo = TestFunction::LinearCombination { dim: 2, terms: vec![(1.0, u)] };
        let nested = weighted_lp(&combo, 2.0, 0.5, None, &h, &spec).unwrap();
        assert!((closed.value / nested.value - 1.0).abs() < 1e-5, "{} {}", closed.value, nested.value);
    }

    #[test]
    fn radial_annulus_mass() {
        let spec = QuadratureSpec::adaptive(1e-10);
        let u = make_radial(2, Profile::Annulus { inner: 1.0, outer: 2.0, m: 1 }).unwrap();
        let e = weighted_lp(&u, 1.0, 0.0, None, &hp(2, 2), &spec).unwrap();
        // 2 pi int_1^2 (1 - (2r-3)^2) r dr = 2 pi
        assert!((e.value - 2.0 * std::f64::consts::PI).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn zero_function_has_zero_mass() {
        let spec = QuadratureSpec::adaptive(1e-8);
        let e = weighted_lp(&TestFunction::zero(2), 2.0, 0.5, None, &hp(2, 1), &spec).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.std_error, 0.0);
    }
}
