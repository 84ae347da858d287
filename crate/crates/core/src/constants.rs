//! Sharp constants, remainder constants and exponent bookkeeping.

use crate::error::{Error, Result};
use crate::params::{HardyParams, SobolevParams, SobolevVariant};
use crate::quadrature::adaptive::{integrate_1d, integrate_to_infinity, Endpoints};
use crate::special_fns::{gamma_fn, phi_from_gap, sphere_surface};
use crate::{Estimate, Real};

/// Relative tolerance used for the one-dimensional constant integrals.
const CONSTANT_TOL: f64 = 1e-10;

/// `C_1(d, s, p, alpha, beta) = int_0^1 r^(sp-1) (r^-alpha + r^-beta)
/// |1 - r^gamma|^p Phi_{d,s,p}(r) dr` with `gamma = (d + alpha + beta - sp)/p`.
///
/// Requires `alpha, beta, alpha + beta` in `(-d, sp)` and a nondegenerate
/// regime.
pub fn sharp_constant_point(d: usize, s: f64, p: f64, alpha: f64, beta: f64) -> Result<Estimate> {
    let hp = HardyParams::point(d, s, p, alpha, beta)?;
    hp.require_nondegenerate()?;
    point_integral(&hp, hp.gamma())
}

/// The constant `C_eps` of the counterexample family: the integral defining
/// `C_1` with `gamma` replaced by `gamma + eps`.
pub fn sharp_constant_point_shifted(d: usize, s: f64, p: f64, alpha: f64, beta: f64, eps: f64) -> Result<Estimate> {
    let hp = HardyParams::point(d, s, p, alpha, beta)?;
    hp.require_nondegenerate()?;
    if !(eps >= 0.0) {
        return Err(Error::domain("eps must be nonnegative"));
    }
    let g = hp.gamma() + eps;
    if g == 0.0 {
        return Err(Error::DegenerateRegime);
    }
    point_integral(&hp, g)
}

fn point_integral(hp: &HardyParams, gamma: f64) -> Result<Estimate> {
    let (d, p, sp) = (hp.d(), hp.p(), hp.sp());
    let (a, b) = (hp.alpha(), hp.beta());
    let f = |r: f64| {
        if r <= 0.0 || r >= 1.0 {
            return 0.0;
        }
        let lr = r.ln();
        let weight = (-a * lr).exp() + (-b * lr).exp();
        let diff = (gamma * lr).exp_m1().abs().powf(p);
        r.powf(sp - 1.0) * weight * diff * phi_from_gap(d, sp, 1.0 - r)
    };
    let left = if gamma > 0.0 { sp - 1.0 - a.max(b) } else { d as f64 - 1.0 + a.min(b) };
    let right = p * (1.0 - hp.s()) - 1.0;
    let lo = integrate_1d(f, 0.0, 0.5, Endpoints::left(left), CONSTANT_TOL)?;
    let hi = integrate_1d(f, 0.5, 1.0, Endpoints::right(right), CONSTANT_TOL)?;
    let total = lo.add(&hi);
    // Inner kernel quadrature runs at ~1e-13 relative.
    let kernel_err = 1e-12 * total.value.abs();
    Ok(Estimate { std_error: total.std_error + kernel_err, ..total })
}

/// `pi^((d-k)/2) Gamma((k+sp)/2) / Gamma((d+sp)/2)`, the value of
/// `int_{R^(d-k)} (1 + |y|^2)^(-(d+sp)/2) dy`. Exactly 1 when `k = d`.
pub fn transverse_prefactor(d: usize, k: usize, s: f64, p: f64) -> Result<f64> {
    if k < 1 || k > d {
        return Err(Error::domain("k must lie in [1, d]"));
    }
    if k == d {
        return Ok(1.0);
    }
    let sp = s * p;
    let m = (d - k) as f64;
    Ok(std::f64::consts::PI.powf(0.5 * m) * gamma_fn(0.5 * (k as f64 + sp))? / gamma_fn(0.5 * (d as f64 + sp))?)
}

/// Direct quadrature of `int_{R^(d-k)} (1 + |y|^2)^(-(d+sp)/2) dy` in polar
/// coordinates; the numerical companion of [`transverse_prefactor`].
pub fn transverse_integral(d: usize, k: usize, s: f64, p: f64, rel_tol: f64) -> Result<Estimate> {
    if k < 1 || k > d {
        return Err(Error::domain("k must lie in [1, d]"));
    }
    if k == d {
        return Ok(Estimate::exact(1.0));
    }
    let m = d - k;
    let sp = s * p;
    let e = -0.5 * (d as f64 + sp);
    let mm1 = m as f64 - 1.0;
    let f = |rho: f64| rho.powf(mm1) * (1.0 + rho * rho).powf(e);
    let left = if m > 1 { Some(mm1) } else { None };
    let decay = d as f64 + sp - mm1;
    let est = integrate_to_infinity(f, 0.0, 1.0, left, decay, rel_tol)?;
    Ok(est.scale(sphere_surface::<f64>(m - 1)))
}

/// `C(d, s, p, k, alpha, beta) = prefactor * C_1(k, s, p, alpha, beta)`.
pub fn sharp_constant_flat(hp: &HardyParams) -> Result<Estimate> {
    hp.require_nondegenerate()?;
    let c1 = sharp_constant_point(hp.k(), hp.s(), hp.p(), hp.alpha(), hp.beta())?;
    let pre = transverse_prefactor(hp.d(), hp.k(), hp.s(), hp.p())?;
    Ok(c1.scale(pre))
}

/// `g(tau) = (1 - tau)^p - tau^p + p tau^(p-1)`.
pub fn remainder_profile<F: Real>(p: F, tau: F) -> F {
    (F::one() - tau).powf(p) - tau.powf(p) + p * tau.powf(p - F::one())
}

/// `c_p = min over (0, 1/2) of g(tau)` for `p >= 2`.
///
/// A 1000-point grid locates the smallest sample, golden-section search
/// refines inside the neighbouring bracket to `|dtau| < 1e-10`, and a dense
/// grid takes over if the refined value is not below the grid minimum
/// (the bracket was not unimodal).
pub fn remainder_c_p(p: f64) -> Result<f64> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(Error::domain("remainder_c_p requires p >= 2"));
    }
    let g = |t: f64| remainder_profile(p, t);
    let n = 1000usize;
    let h = 0.5 / n as f64;
    let grid = |i: usize| i as f64 * h;
    // Interior samples only; the infimum at tau -> 0 is g(0+) = 1.
    let mut best_i = 1;
    let mut best = g(grid(1));
    for i in 2..=n {
        let v = g(grid(i));
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = grid(best_i - 1).max(f64::MIN_POSITIVE);
    let hi = grid((best_i + 1).min(n));
    let (_, v) = golden_section(&g, lo, hi, 1e-10);
    let refined = if v <= best { v.min(best) } else { dense_grid_min(&g, lo, hi, 100_000).min(best) };
    Ok(refined.min(1.0))
}

fn golden_section<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = g(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, g(t).min(fc).min(fd))
}

fn dense_grid_min<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, n: usize) -> f64 {
    (0..=n).map(|i| g(a + (b - a) * i as f64 / n as f64)).fold(f64::INFINITY, f64::min)
}

/// Remainder constant for `1 < p < 2`: `max{(p-1)/p, p(p-1)/2}`, or `p - 1`
/// for nonnegative functions.
pub fn remainder_big_c_p(p: f64, nonnegative_u: bool) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::domain("remainder_big_c_p requires 1 < p < 2"));
    }
    if nonnegative_u {
        Ok(p - 1.0)
    } else {
        Ok(((p - 1.0) / p).max(0.5 * p * (p - 1.0)))
    }
}

/// `theta = d + (sp - d) q / p`, exactly 0 at the critical exponent.
pub fn derive_theta(base: &HardyParams, q: f64, variant: SobolevVariant) -> Result<f64> {
    SobolevParams::new(*base, q, variant).map(|sp| sp.theta()).map_err(|e| Error::domain(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefactor_examples() {
        assert_eq!(transverse_prefactor(3, 3, 0.5, 2.0).unwrap(), 1.0);
        assert!((transverse_prefactor(2, 1, 0.5, 2.0).unwrap() - 2.0).abs() < 1e-13);
        assert!((transverse_prefactor(3, 1, 0.5, 2.0).unwrap() - std::f64::consts::PI).abs() < 1e-13);
        assert!(transverse_prefactor(2, 3, 0.5, 2.0).is_err());
    }

    #[test]
    fn degenerate_point_constant_is_rejected() {
        assert_eq!(sharp_constant_point(1, 0.5, 2.0, 0.0, 0.0), Err(Error::DegenerateRegime));
    }

    #[test]
    fn c2_is_one() {
        assert!((remainder_c_p(2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c3_matches_stationary_point() {
        let t = 1.0 - 1.0 / 2f64.sqrt();
        let exact = remainder_profile(3.0, t);
        assert!((remainder_c_p(3.0).unwrap() / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn big_c_p_examples() {
        assert!((remainder_big_c_p(1.5, false).unwrap() - 0.375).abs() < 1e-15);
        assert!((remainder_big_c_p(1.5, true).unwrap() - 0.5).abs() < 1e-15);
        assert!((remainder_big_c_p(2.0 - 1e-12, false).unwrap() - 1.0).abs() < 1e-9);
        assert!(remainder_big_c_p(2.0, false).is_err());
    }

    #[test]
    fn theta_example() {
        let hp = HardyParams::new(2, 0.5, 2.0, 1, 0.0, 0.0).unwrap();
        assert!((derive_theta(&hp, 3.0, SobolevVariant::Flat).unwrap() - 0.5).abs() < 1e-15);
        assert!(derive_theta(&hp, 9.0, SobolevVariant::Flat).is_err());
    }
}
