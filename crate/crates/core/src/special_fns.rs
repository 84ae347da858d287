//! Gamma function, sphere measures, the angular kernel `Phi_{d,s,p}`, the
//! French power and two elementary inequalities used as test predicates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive::{integrate_1d, Endpoints};
use crate::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive arguments (Lanczos approximation with
/// reflection below 1/2).
pub fn gamma_fn<F: Real>(x: F) -> Result<F> {
    if !(x > F::zero()) || !x.is_finite() {
        return Err(Error::domain(format!("gamma_fn requires a positive finite argument, got {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked<F: Real>(x: F) -> F {
    let half = F::lit(0.5);
    if x < half {
        let pi = F::PI();
        return pi / ((pi * x).sin() * gamma_unchecked(F::one() - x));
    }
    let x = x - F::one();
    let mut a = F::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + F::lit(c) / (x + F::lit(i as f64));
    }
    let t = x + F::lit(LANCZOS_G) + half;
    (F::lit(2.0) * F::PI()).sqrt() * t.powf(x + half) * (-t).exp() * a
}

/// Surface measure of the unit sphere `S^m` in `R^(m+1)`:
/// `2 pi^((m+1)/2) / Gamma((m+1)/2)`. `S^0` is two points.
pub fn sphere_surface<F: Real>(m: usize) -> F {
    let h = F::lit((m as f64 + 1.0) * 0.5);
    F::lit(2.0) * F::PI().powf(h) / gamma_unchecked(h)
}

/// The `(d, s, p)` triple entering the angular kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams<F> {
    pub d: usize,
    pub s: F,
    pub p: F,
}

impl<F: Real> KernelParams<F> {
    pub fn new(d: usize, s: F, p: F) -> Result<Self> {
        if d < 1 {
            return Err(Error::domain("d must be at least 1"));
        }
        if !(s >= F::zero() && s < F::one()) {
            return Err(Error::domain("s must lie in [0, 1)"));
        }
        if !(p >= F::one()) || !p.is_finite() {
            return Err(Error::domain("p must be at least 1"));
        }
        Ok(Self { d, s, p })
    }

    pub fn sp(&self) -> F {
        self.s * self.p
    }
}

/// Largest `r` accepted by [`phi_kernel`].
pub const PHI_R_MAX: f64 = 1.0 - 1e-12;

/// `Phi_{d,s,p}(r)`, the spherical average of `|e - r omega|^(-d-sp)` times
/// `|S^(d-1)|`.
///
/// For `d >= 2` this is `|S^(d-2)| int_0^pi sin^(d-2)(phi)
/// ((1-r)^2 + 4 r sin^2(phi/2))^(-(d+sp)/2) dphi`, integrated on panels that
/// grow geometrically away from `phi = 0` where the integrand peaks. For
/// `d = 1` the two-point closed form is returned.
pub fn phi_kernel<F: Real>(kp: &KernelParams<F>, r: F) -> Result<F> {
    if !(r >= F::zero()) {
        return Err(Error::domain(format!("phi_kernel requires r >= 0, got {r}")));
    }
    if !(r <= F::lit(PHI_R_MAX)) {
        return Err(Error::domain(format!(
            "phi_kernel requires r <= 1 - 1e-12 (the kernel diverges at r = 1), got {r}"
        )));
    }
    Ok(phi_from_gap(kp.d, kp.sp(), F::one() - r))
}

/// `Phi` with general kernel order `sigma` in place of `sp`, evaluated from
/// the gap `w = 1 - r` in `(0, 1]`. Below `w = 1e-12` the leading asymptotic
/// `pi^((d-1)/2) Gamma((1+sigma)/2) / Gamma((d+sigma)/2) w^(-1-sigma)` is used.
pub fn phi_from_gap<F: Real>(d: usize, sigma: F, w: F) -> F {
    let one = F::one();
    let expo = -one - sigma;
    if d == 1 {
        return w.powf(expo) + (F::lit(2.0) - w).powf(expo);
    }
    if w < F::lit(1e-12) {
        return near_diagonal_coefficient(d, sigma) * w.powf(expo);
    }
    let r = one - w;
    let dm2 = (d - 2) as i32;
    let half_expo = -F::lit(0.5) * (F::lit(d as f64) + sigma);
    let four_r = F::lit(4.0) * r;
    let f = |phi: F| {
        let sh = (phi * F::lit(0.5)).sin();
        let base = w * w + four_r * sh * sh;
        let ang = if dm2 == 0 { one } else { phi.sin().powi(dm2) };
        ang * base.powf(half_expo)
    };
    let tol = F::lit(1e-13).max(F::lit(1e3) * F::epsilon());
    let pi = F::PI();
    let mut acc = F::zero();
    let mut a = F::zero();
    let mut b = w.min(pi);
    loop {
        // Smooth panel integrands; the quadrature cannot fail here.
        if let Ok(e) = integrate_1d(f, a, b, Endpoints::regular(), tol) {
            acc = acc + e.value;
        }
        if b >= pi {
            break;
        }
        a = b;
        b = (b * F::lit(2.0)).min(pi);
    }
    sphere_surface::<F>(d - 2) * acc
}

/// `int_{R^(d-1)} (1 + |z|^2)^(-(d+sigma)/2) dz`, the coefficient of
/// `(1-r)^(-1-sigma)` in `Phi` as `r -> 1`.
pub fn near_diagonal_coefficient<F: Real>(d: usize, sigma: F) -> F {
    let half = F::lit(0.5);
    let dd = F::lit(d as f64);
    F::PI().powf(half * (dd - F::one())) * gamma_unchecked(half * (F::one() + sigma))
        / gamma_unchecked(half * (dd + sigma))
}

/// French power `a^<t> = |a|^t sgn(a)`.
pub fn french_power<F: Real>(a: F, t: F) -> F {
    if a == F::zero() {
        F::zero()
    } else {
        a.abs().powf(t) * a.signum()
    }
}

fn slack<F: Real>() -> F {
    F::lit(1e-12).max(F::lit(64.0) * F::epsilon())
}

/// Truth of `(|a| + |b|)^q <= c |a|^q + (1 - c^(-1/(q-1)))^(1-q) |b|^q`
/// for `q > 1`, `c > 1` (up to rounding slack).
pub fn check_split_inequality<F: Real>(a: F, b: F, q: F, c: F) -> Result<bool> {
    if !(q > F::one()) {
        return Err(Error::domain("check_split_inequality requires q > 1"));
    }
    if !(c > F::one()) {
        return Err(Error::domain("check_split_inequality requires c > 1"));
    }
    let one = F::one();
    let (a, b) = (a.abs(), b.abs());
    let lhs = (a + b).powf(q);
    let coef = (one - c.powf(-one / (q - one))).powf(one - q);
    let rhs = c * a.powf(q) + coef * b.powf(q);
    Ok(lhs <= rhs * (one + slack::<F>()) + F::min_positive_value())
}

/// Truth of `sum |a_l|^gamma <= (sum |a_l|)^gamma` for `gamma >= 1`.
pub fn check_power_sum_inequality<F: Real>(values: &[F], gamma: F) -> Result<bool> {
    if !(gamma >= F::one()) {
        return Err(Error::domain("check_power_sum_inequality requires gamma >= 1"));
    }
    let lhs = values.iter().fold(F::zero(), |s, v| s + v.abs().powf(gamma));
    let rhs = values.iter().fold(F::zero(), |s, v| s + v.abs()).powf(gamma);
    Ok(lhs <= rhs * (F::one() + slack::<F>()) + F::min_positive_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_values() {
        assert!((gamma_fn(1.0f64).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_fn(0.5f64).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(5.0f64).unwrap() / 24.0 - 1.0).abs() < 1e-13);
        assert!((gamma_fn(0.1f64).unwrap() / 9.513_507_698_668_732 - 1.0).abs() < 1e-13);
        assert!((gamma_fn(30.5f64).unwrap() / 4.822_696_933_490_908_6e31 - 1.0).abs() < 1e-12);
        assert!(gamma_fn(0.0f64).is_err());
        assert!(gamma_fn(-1.5f64).is_err());
    }

    #[test]
    fn sphere_measures() {
        assert!((sphere_surface::<f64>(0) - 2.0).abs() < 1e-14);
        assert!((sphere_surface::<f64>(1) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_surface::<f64>(2) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn phi_one_dimensional_branch() {
        let kp = KernelParams::<f64>::new(1, 0.5, 2.0).unwrap();
        assert!((phi_kernel(&kp, 0.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((phi_kernel(&kp, 0.5).unwrap() - (4.0 + 4.0 / 9.0)).abs() < 1e-13);
    }

    #[test]
    fn phi_three_dimensional_closed_form() {
        let kp = KernelParams::new(3, 0.35, 2.0).unwrap();
        let sp = kp.sp();
        for i in 1..10 {
            let r = i as f64 / 10.0;
            let exact = 2.0 * PI * ((1.0 - r).powf(-1.0 - sp) - (1.0 + r).powf(-1.0 - sp)) / (r * (1.0 + sp));
            let got = phi_kernel(&kp, r).unwrap();
            assert!((got / exact - 1.0).abs() < 1e-9, "r={r} got={got} exact={exact}");
        }
    }

    #[test]
    fn phi_near_one_matches_asymptotic_scale() {
        let kp = KernelParams::<f64>::new(2, 0.5, 2.0).unwrap();
        let w: f64 = 1e-7;
        let got = phi_kernel(&kp, 1.0 - w).unwrap();
        let lead = near_diagonal_coefficient(2, 1.0) * w.powf(-2.0);
        assert!((got / lead - 1.0).abs() < 1e-5);
    }

    #[test]
    fn phi_domain_errors() {
        let kp = KernelParams::<f64>::new(2, 0.5, 2.0).unwrap();
        assert!(phi_kernel(&kp, -0.1).is_err());
        assert!(phi_kernel(&kp, 1.0).is_err());
        assert!(phi_kernel(&kp, 1.0 - 1e-13).is_err());
    }

    #[test]
    fn french_power_examples() {
        assert_eq!(french_power(-2.0f64, 2.0), -4.0);
        assert_eq!(french_power(0.0f64, 0.7), 0.0);
        assert!((french_power(3.0f64, 0.5) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inequality_examples() {
        assert!(check_split_inequality(1.0f64, 1.0, 2.0, 2.0).unwrap());
        assert!(check_split_inequality(0.0f64, 5.0, 3.0, 2.0).unwrap());
        assert!(check_split_inequality(1.0f64, 1.0, 1.0, 2.0).is_err());
        assert!(check_power_sum_inequality(&[1.0f64], 2.0).unwrap());
        assert!(check_power_sum_inequality(&[1.0f64, 1.0], 2.0).unwrap());
        assert!(check_power_sum_inequality(&[1.0f64], 0.5).is_err());
    }

    #[test]
    fn kernel_in_single_precision() {
        let kp = KernelParams::new(3, 0.5f32, 2.0).unwrap();
        let r = 0.5f32;
        let sp = 1.0f32;
        let exact =
            2.0 * std::f32::consts::PI * ((1.0 - r).powf(-1.0 - sp) - (1.0 + r).powf(-1.0 - sp)) / (r * (1.0 + sp));
        assert!((phi_kernel(&kp, r).unwrap() / exact - 1.0).abs() < 1e-4);
    }
}
