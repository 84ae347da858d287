//! Test-function families: bumps, radial profiles, the tensor sequence
//! `u_N = eta * phi_N`, the two-branch counterexample family and the
//! ground-state product `u = omega v`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::HardyParams;
use crate::special_fns::gamma_fn;

/// Euclidean norm of the first `k` coordinates.
#[inline]
pub fn norm_k(x: &[f64], k: usize) -> f64 {
    x[..k].iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// The singular set `K = {x : x_k = 0}` (`K = {0}` when `k = d`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatSubmanifold {
    pub k: usize,
}

impl FlatSubmanifold {
    pub fn distance(&self, x: &[f64]) -> f64 {
        norm_k(x, self.k)
    }
}

/// One-dimensional radial profiles `f(r)`, `r >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `(1 - r^2/R^2)_+^m`.
    Bump { radius: f64, m: u32 },
    /// `(1 - ((r - c)/h)^2)_+^m` with `c, h` the centre and half-width of
    /// `[inner, outer]`.
    Annulus { inner: f64, outer: f64, m: u32 },
    /// `r^power (1 - (ln r / L)^2)_+^m`, supported in `[e^-L, e^L]`. With
    /// `power = -gamma` and large `L` this approaches the Hardy extremal.
    LogCutoffPower { power: f64, log_width: f64, m: u32 },
    /// `r^gamma` on `r < 1` and `r^(-gamma-eps)` on `r >= 1`.
    TwoBranchPower { gamma: f64, eps: f64 },
}

impl Profile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Profile::Bump { radius, m } => {
                let t = r / radius;
                let b = 1.0 - t * t;
                if b > 0.0 {
                    b.powi(m as i32)
                } else {
                    0.0
                }
            }
            Profile::Annulus { inner, outer, m } => {
                if r <= inner || r >= outer {
                    return 0.0;
                }
                let c = 0.5 * (inner + outer);
                let h = 0.5 * (outer - inner);
                let t = (r - c) / h;
                let b = 1.0 - t * t;
                if b > 0.0 {
                    b.powi(m as i32)
                } else {
                    0.0
                }
            }
            Profile::LogCutoffPower { power, log_width, m } => {
                if r <= 0.0 {
                    return 0.0;
                }
                let t = r.ln() / log_width;
                let b = 1.0 - t * t;
                if b > 0.0 {
                    r.powf(power) * b.powi(m as i32)
                } else {
                    0.0
                }
            }
            Profile::TwoBranchPower { gamma, eps } => {
                if r < 1.0 {
                    r.powf(gamma)
                } else {
                    r.powf(-gamma - eps)
                }
            }
        }
    }

    /// Radii where the profile is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            Profile::Bump { radius, .. } => vec![radius],
            Profile::Annulus { inner, outer, .. } => vec![inner, outer],
            Profile::LogCutoffPower { log_width, .. } => vec![(-log_width).exp(), log_width.exp()],
            Profile::TwoBranchPower { .. } => vec![1.0],
        }
    }

    /// The profile vanishes on `[0, inner_radius]`.
    pub fn inner_radius(&self) -> f64 {
        match *self {
            Profile::Bump { .. } | Profile::TwoBranchPower { .. } => 0.0,
            Profile::Annulus { inner, .. } => inner,
            Profile::LogCutoffPower { log_width, .. } => (-log_width).exp(),
        }
    }

    /// The profile vanishes beyond `outer_radius` (may be infinite).
    pub fn outer_radius(&self) -> f64 {
        match *self {
            Profile::Bump { radius, .. } => radius,
            Profile::Annulus { outer, .. } => outer,
            Profile::LogCutoffPower { log_width, .. } => log_width.exp(),
            Profile::TwoBranchPower { .. } => f64::INFINITY,
        }
    }

    /// Exponent `e` with `|f(r)| <= C r^e` near the origin (infinite when
    /// the profile vanishes near 0).
    pub fn origin_order(&self) -> f64 {
        match *self {
            Profile::Bump { .. } => 0.0,
            Profile::TwoBranchPower { gamma, .. } => gamma,
            _ => f64::INFINITY,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        true
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Bump { radius, m } => radius > 0.0 && radius.is_finite() && m >= 1,
            Profile::Annulus { inner, outer, m } => inner > 0.0 && outer > inner && outer.is_finite() && m >= 1,
            Profile::LogCutoffPower { power, log_width, m } => {
                power.is_finite() && log_width > 0.0 && log_width.is_finite() && m >= 1
            }
            Profile::TwoBranchPower { gamma, eps } => gamma > 0.0 && eps > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid profile {self:?}")))
        }
    }
}

/// The tensor sequence `u_N(x) = eta(|x_k|) phi_N(x_{d-k})` with
/// `phi_N(z) = N^((k-d)/p) / ||phi||_p phi(z/N)` and `phi` a centred bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorSharpness {
    pub d: usize,
    pub k: usize,
    pub p: f64,
    pub eta: Profile,
    pub phi_radius: f64,
    pub phi_m: u32,
    pub n: f64,
    /// `||phi||_{L^p(R^(d-k))}` of the unscaled bump.
    pub phi_norm: f64,
}

impl TensorSharpness {
    pub fn phi(&self, z: &[f64]) -> f64 {
        Profile::Bump { radius: self.phi_radius, m: self.phi_m }.eval(norm(z))
    }

    pub fn phi_n(&self, z: &[f64]) -> f64 {
        let n = self.n;
        let amp = n.powf((self.k as f64 - self.d as f64) / self.p) / self.phi_norm;
        let r = norm(z) / n;
        amp * Profile::Bump { radius: self.phi_radius, m: self.phi_m }.eval(r)
    }

    pub fn eta_at(&self, x_k: &[f64]) -> f64 {
        self.eta.eval(norm(x_k))
    }
}

/// `||(1 - |z|^2/R^2)_+^m||_{L^p(R^n)}`.
pub fn bump_lp_norm(n: usize, radius: f64, m: u32, p: f64) -> f64 {
    bump_power_integral(n, radius, m as f64 * p).powf(1.0 / p)
}

/// `int_{R^n} (1 - |z|^2/R^2)_+^a dz = R^n pi^(n/2) Gamma(a+1) / Gamma(a+1+n/2)`.
pub fn bump_power_integral(n: usize, radius: f64, a: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let h = 0.5 * n as f64;
    let g = gamma_fn(a + 1.0).unwrap_or(f64::NAN) / gamma_fn(a + 1.0 + h).unwrap_or(f64::NAN);
    radius.powi(n as i32) * std::f64::consts::PI.powf(h) * g
}

/// Compactly supported (or analytically truncated) evaluable functions on
/// `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestFunction {
    /// `(1 - |x - c|^2/R^2)_+^m`.
    Bump {
        center: Vec<f64>,
        radius: f64,
        m: u32,
    },
    /// `f(|x|)` on `R^dim`.
    Radial {
        dim: usize,
        profile: Profile,
    },
    Tensor(TensorSharpness),
    /// The two-branch family `|x|^gamma` / `|x|^(-gamma-eps)`. Integrals are
    /// truncated at `r_trunc`, where the dropped tail is below `1e-9` of the
    /// total.
    Counterexample {
        dim: usize,
        gamma: f64,
        eps: f64,
        r_trunc: f64,
    },
    /// `|x_k|^exponent * inner(x)`.
    GroundStateProduct {
        inner: Box<TestFunction>,
        k: usize,
        exponent: f64,
    },
    /// `sum c_i u_i`.
    LinearCombination {
        dim: usize,
        terms: Vec<(f64, TestFunction)>,
    },
    /// `inner(lambda x)`.
    Dilated {
        inner: Box<TestFunction>,
        lambda: f64,
    },
}

/// Relative tail budget of truncated families.
pub const TRUNCATION_BUDGET: f64 = 1e-9;

impl TestFunction {
    /// The zero function on `R^dim`.
    pub fn zero(dim: usize) -> Self {
        TestFunction::LinearCombination { dim, terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Bump { center, .. } => center.len(),
            TestFunction::Radial { dim, .. } => *dim,
            TestFunction::Tensor(t) => t.d,
            TestFunction::Counterexample { dim, .. } => *dim,
            TestFunction::GroundStateProduct { inner, .. } => inner.dim(),
            TestFunction::LinearCombination { dim, .. } => *dim,
            TestFunction::Dilated { inner, .. } => inner.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Bump { center, radius, m } => {
                let mut r2 = 0.0;
                for (xi, ci) in x.iter().zip(center) {
                    let t = xi - ci;
                    r2 += t * t;
                }
                let b = 1.0 - r2 / (radius * radius);
                if b > 0.0 {
                    b.powi(*m as i32)
                } else {
                    0.0
                }
            }
            TestFunction::Radial { profile, .. } => profile.eval(norm(x)),
            TestFunction::Tensor(t) => {
                let e = t.eta_at(&x[..t.k]);
                if e == 0.0 {
                    0.0
                } else {
                    e * t.phi_n(&x[t.k..])
                }
            }
            TestFunction::Counterexample { gamma, eps, .. } => {
                Profile::TwoBranchPower { gamma: *gamma, eps: *eps }.eval(norm(x))
            }
            TestFunction::GroundStateProduct { inner, k, exponent } => {
                let v = inner.eval(x);
                if v == 0.0 {
                    0.0
                } else {
                    norm_k(x, *k).powf(*exponent) * v
                }
            }
            TestFunction::LinearCombination { terms, .. } => terms.iter().map(|(c, u)| c * u.eval(x)).sum(),
            TestFunction::Dilated { inner, lambda } => {
                let y: Vec<f64> = x.iter().map(|v| v * lambda).collect();
                inner.eval(&y)
            }
        }
    }

    /// Axis-aligned box outside which the function vanishes (the truncation
    /// box for the counterexample family). The zero function returns an
    /// empty box at the origin.
    pub fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        match self {
            TestFunction::Bump { center, radius, .. } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            TestFunction::Radial { profile, .. } => {
                let r = profile.outer_radius();
                (vec![-r; d], vec![r; d])
            }
            TestFunction::Tensor(t) => {
                let re = t.eta.outer_radius();
                let rp = t.phi_radius * t.n;
                let mut lo = vec![-re; d];
                let mut hi = vec![re; d];
                for i in t.k..d {
                    lo[i] = -rp;
                    hi[i] = rp;
                }
                (lo, hi)
            }
            TestFunction::Counterexample { r_trunc, .. } => (vec![-r_trunc; d], vec![*r_trunc; d]),
            TestFunction::GroundStateProduct { inner, .. } => inner.support_box(),
            TestFunction::LinearCombination { terms, .. } => {
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for (_, u) in terms {
                    let (l, h) = u.support_box();
                    for i in 0..d {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                if terms.is_empty() {
                    (vec![0.0; d], vec![0.0; d])
                } else {
                    (lo, hi)
                }
            }
            TestFunction::Dilated { inner, lambda } => {
                let (l, h) = inner.support_box();
                (l.iter().map(|v| v / lambda).collect(), h.iter().map(|v| v / lambda).collect())
            }
        }
    }

    /// True when the function is identically zero by construction.
    pub fn is_zero(&self) -> bool {
        match self {
            TestFunction::LinearCombination { terms, .. } => terms.iter().all(|(c, u)| *c == 0.0 || u.is_zero()),
            TestFunction::GroundStateProduct { inner, .. } | TestFunction::Dilated { inner, .. } => inner.is_zero(),
            _ => false,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            TestFunction::Bump { .. } | TestFunction::Counterexample { .. } => true,
            TestFunction::Radial { profile, .. } => profile.is_nonnegative(),
            TestFunction::Tensor(t) => t.eta.is_nonnegative(),
            TestFunction::GroundStateProduct { inner, .. } | TestFunction::Dilated { inner, .. } => {
                inner.is_nonnegative()
            }
            TestFunction::LinearCombination { terms, .. } => terms.iter().all(|(c, u)| *c >= 0.0 && u.is_nonnegative()),
        }
    }

    /// Radial about the origin (a function of `|x|` only).
    pub fn is_radial(&self) -> bool {
        match self {
            TestFunction::Bump { center, .. } => center.iter().all(|c| *c == 0.0),
            TestFunction::Radial { .. } | TestFunction::Counterexample { .. } => true,
            TestFunction::Tensor(_) => false,
            TestFunction::GroundStateProduct { inner, k, .. } => *k == inner.dim() && inner.is_radial(),
            TestFunction::LinearCombination { terms, .. } => terms.iter().all(|(_, u)| u.is_radial()),
            TestFunction::Dilated { inner, .. } => inner.is_radial(),
        }
    }

    /// Value at radius `r` of a radial function (see [`Self::is_radial`]).
    pub fn radial_value(&self, r: f64) -> f64 {
        match self {
            TestFunction::Bump { radius, m, .. } => Profile::Bump { radius: *radius, m: *m }.eval(r),
            TestFunction::Radial { profile, .. } => profile.eval(r),
            TestFunction::Counterexample { gamma, eps, .. } => {
                Profile::TwoBranchPower { gamma: *gamma, eps: *eps }.eval(r)
            }
            TestFunction::GroundStateProduct { inner, exponent, .. } => {
                let v = inner.radial_value(r);
                if v == 0.0 {
                    0.0
                } else {
                    r.powf(*exponent) * v
                }
            }
            TestFunction::LinearCombination { terms, .. } => terms.iter().map(|(c, u)| c * u.radial_value(r)).sum(),
            TestFunction::Dilated { inner, lambda } => inner.radial_value(r * lambda),
            TestFunction::Tensor(_) => {
                let mut x = vec![0.0; self.dim()];
                x[0] = r;
                self.eval(&x)
            }
        }
    }

    /// Non-smooth radii of a radial function, sorted and deduplicated.
    pub fn radial_kinks(&self) -> Vec<f64> {
        let mut out = match self {
            TestFunction::Bump { radius, .. } => vec![*radius],
            TestFunction::Radial { profile, .. } => profile.kinks(),
            TestFunction::Counterexample { .. } => vec![1.0],
            TestFunction::GroundStateProduct { inner, .. } => inner.radial_kinks(),
            TestFunction::LinearCombination { terms, .. } => terms.iter().flat_map(|(_, u)| u.radial_kinks()).collect(),
            TestFunction::Dilated { inner, lambda } => inner.radial_kinks().into_iter().map(|k| k / lambda).collect(),
            TestFunction::Tensor(_) => Vec::new(),
        };
        out.retain(|v| v.is_finite() && *v > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `(inner, outer)` radii of the radial support; the function vanishes on
    /// `|x| < inner` and `|x| > outer`. The counterexample family reports its
    /// truncation radius as `outer`.
    pub fn radial_support(&self) -> (f64, f64) {
        match self {
            TestFunction::Bump { radius, .. } => (0.0, *radius),
            TestFunction::Radial { profile, .. } => (profile.inner_radius(), profile.outer_radius()),
            TestFunction::Counterexample { r_trunc, .. } => (0.0, *r_trunc),
            TestFunction::GroundStateProduct { inner, .. } => inner.radial_support(),
            TestFunction::LinearCombination { terms, .. } => {
                if terms.is_empty() {
                    return (0.0, 0.0);
                }
                terms.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, u)| {
                    let (a, b) = u.radial_support();
                    (lo.min(a), hi.max(b))
                })
            }
            TestFunction::Dilated { inner, lambda } => {
                let (a, b) = inner.radial_support();
                (a / lambda, b / lambda)
            }
            TestFunction::Tensor(t) => (0.0, t.eta.outer_radius().hypot(t.phi_radius * t.n)),
        }
    }

    /// Exponent `e` with `|u(x)| <= C |x|^e` near the origin for radial
    /// functions (infinite when `u` vanishes near 0).
    pub fn radial_origin_order(&self) -> f64 {
        match self {
            TestFunction::Bump { .. } => 0.0,
            TestFunction::Radial { profile, .. } => profile.origin_order(),
            TestFunction::Counterexample { gamma, .. } => *gamma,
            TestFunction::GroundStateProduct { inner, exponent, .. } => inner.radial_origin_order() + exponent,
            TestFunction::LinearCombination { terms, .. } => {
                terms.iter().map(|(_, u)| u.radial_origin_order()).fold(f64::INFINITY, f64::min)
            }
            TestFunction::Dilated { inner, .. } => inner.radial_origin_order(),
            TestFunction::Tensor(_) => 0.0,
        }
    }

    /// A lower bound for `|x_k|` on the support (0 when the support may meet
    /// the singular set).
    pub fn k_gap(&self, k: usize) -> f64 {
        match self {
            TestFunction::Bump { center, radius, .. } => (norm_k(center, k) - radius).max(0.0),
            TestFunction::Radial { profile, dim } => {
                if k == *dim {
                    profile.inner_radius()
                } else {
                    0.0
                }
            }
            TestFunction::Tensor(t) => {
                if k == t.k {
                    t.eta.inner_radius()
                } else {
                    0.0
                }
            }
            TestFunction::Counterexample { .. } => 0.0,
            TestFunction::GroundStateProduct { inner, .. } => inner.k_gap(k),
            TestFunction::LinearCombination { terms, .. } => {
                if terms.is_empty() {
                    return f64::INFINITY;
                }
                terms.iter().map(|(_, u)| u.k_gap(k)).fold(f64::INFINITY, f64::min)
            }
            TestFunction::Dilated { inner, lambda } => inner.k_gap(k) / lambda,
        }
    }

    /// `u(lambda x)`, simplified for bumps.
    pub fn dilate(&self, lambda: f64) -> TestFunction {
        match self {
            TestFunction::Bump { center, radius, m } => TestFunction::Bump {
                center: center.iter().map(|c| c / lambda).collect(),
                radius: radius / lambda,
                m: *m,
            },
            other => TestFunction::Dilated { inner: Box::new(other.clone()), lambda },
        }
    }

    /// Short human-readable label.
    pub fn describe(&self) -> String {
        match self {
            TestFunction::Bump { center, radius, m } => {
                let c: Vec<String> = center.iter().map(|v| format!("{v}")).collect();
                format!("bump(c=[{}],R={radius},m={m})", c.join(";"))
            }
            TestFunction::Radial { profile, .. } => match profile {
                Profile::Bump { radius, m } => format!("radial_bump(R={radius},m={m})"),
                Profile::Annulus { inner, outer, m } => format!("annulus({inner},{outer},m={m})"),
                Profile::LogCutoffPower { power, log_width, m } => {
                    format!("log_cutoff_power(a={power},L={log_width},m={m})")
                }
                Profile::TwoBranchPower { gamma, eps } => format!("two_branch(g={gamma},eps={eps})"),
            },
            TestFunction::Tensor(t) => format!("tensor(N={})", t.n),
            TestFunction::Counterexample { eps, .. } => format!("counterexample(eps={eps})"),
            TestFunction::GroundStateProduct { inner, exponent, .. } => {
                format!("|x_k|^{exponent}*{}", inner.describe())
            }
            TestFunction::LinearCombination { terms, .. } => {
                if terms.is_empty() {
                    return "zero".to_string();
                }
                let parts: Vec<String> = terms.iter().map(|(c, u)| format!("{c}*{}", u.describe())).collect();
                parts.join("+")
            }
            TestFunction::Dilated { inner, lambda } => format!("{}({lambda}x)", inner.describe()),
        }
    }
}

/// `(1 - |x - center|^2/radius^2)_+^m`; `C^1` for `m >= 2`, Lipschitz for `m = 1`.
pub fn make_bump(center: Vec<f64>, radius: f64, m: u32) -> Result<TestFunction> {
    if center.is_empty() {
        return Err(Error::domain("bump center must have at least one coordinate"));
    }
    if !(radius > 0.0 && radius.is_finite()) || m < 1 || center.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("bump requires a finite center, radius > 0 and m >= 1"));
    }
    Ok(TestFunction::Bump { center, radius, m })
}

pub fn make_radial(dim: usize, profile: Profile) -> Result<TestFunction> {
    if dim < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    profile.validate()?;
    Ok(TestFunction::Radial { dim, profile })
}

/// Default `eta` for the supercritical regime: a bump in the radius
/// supported on `(0.5, 1.5)`, away from the singular set.
pub fn default_supercritical_eta() -> Profile {
    Profile::Annulus { inner: 0.5, outer: 1.5, m: 2 }
}

/// `u_N(x) = eta(|x_k|) phi_N(x_{d-k})` with `phi` the bump
/// `(1 - |z|^2/phi_radius^2)_+^phi_m` and `||phi_N||_p = 1`.
pub fn make_sharpness_sequence(
    hp: &HardyParams,
    eta: Profile,
    phi_radius: f64,
    phi_m: u32,
    n: f64,
) -> Result<TestFunction> {
    if hp.k() >= hp.d() {
        return Err(Error::domain("the tensor sequence needs d - k >= 1"));
    }
    eta.validate()?;
    if !(n > 0.0 && n.is_finite()) || !(phi_radius > 0.0) || phi_m < 1 {
        return Err(Error::domain("tensor sequence requires N > 0, phi_radius > 0, phi_m >= 1"));
    }
    if hp.regime() == crate::Regime::Supercritical && !(eta.inner_radius() > 0.0) {
        return Err(Error::precondition("in the supercritical regime eta must vanish near the origin"));
    }
    let phi_norm = bump_lp_norm(hp.d() - hp.k(), phi_radius, phi_m, hp.p());
    Ok(TestFunction::Tensor(TensorSharpness { d: hp.d(), k: hp.k(), p: hp.p(), eta, phi_radius, phi_m, n, phi_norm }))
}

/// Radius beyond which the counterexample tail `int_R^inf r^(-1-p eps) dr`
/// is below `TRUNCATION_BUDGET` of its full value: `R = budget^(-1/(p eps))`.
pub fn counterexample_truncation(p: f64, eps: f64) -> Result<f64> {
    let r = (TRUNCATION_BUDGET.ln() / (-p * eps)).exp();
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::domain(format!("truncation radius overflows for eps = {eps}")))
    }
}

/// The family `u_eps = |x|^gamma` on the unit ball, `|x|^(-gamma-eps)`
/// outside, for `k = d` and `gamma = (d + alpha + beta - sp)/p > 0`.
pub fn make_counterexample(eps: f64, hp: &HardyParams) -> Result<TestFunction> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    if hp.k() != hp.d() {
        return Err(Error::domain("the counterexample family requires k = d"));
    }
    let d = hp.d() as f64;
    if !(hp.sp() < d) {
        return Err(Error::domain("the counterexample family requires sp < d"));
    }
    if (hp.alpha() + hp.beta() + hp.sp() - d).abs() < 1e-12 {
        return Err(Error::domain("the counterexample family requires alpha+beta+sp != d"));
    }
    let gamma = hp.gamma();
    if !(gamma > 0.0) {
        return Err(Error::precondition("gamma <= 0: evaluate the family on the inversion dual parameters instead"));
    }
    let r_trunc = counterexample_truncation(hp.p(), eps)?;
    Ok(TestFunction::Counterexample { dim: hp.d(), gamma, eps, r_trunc })
}

/// Power weight `|x_k|^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerWeight {
    pub k: usize,
    pub exponent: f64,
}

impl PowerWeight {
    pub fn eval(&self, x: &[f64]) -> f64 {
        norm_k(x, self.k).powf(self.exponent)
    }
}

/// Splits `u = omega v` with `omega = |x_k|^-gamma` and `v = |x_k|^gamma u`.
pub fn ground_state_split(u: &TestFunction, hp: &HardyParams) -> (TestFunction, PowerWeight) {
    let g = hp.gamma();
    let v = TestFunction::GroundStateProduct { inner: Box::new(u.clone()), k: hp.k(), exponent: g };
    (v, PowerWeight { k: hp.k(), exponent: -g })
}

/// `ln^q(4R/|x|)` for `0 < |x| < 4R`.
pub fn log_weight(x: &[f64], r: f64, q: f64) -> Result<f64> {
    log_weight_radial(norm(x), r, q)
}

/// [`log_weight`] as a function of `|x|`.
pub fn log_weight_radial(rho: f64, r: f64, q: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain("R must be positive"));
    }
    if !(rho > 0.0) {
        return Err(Error::domain("log_weight requires |x| > 0"));
    }
    if rho >= 4.0 * r {
        return Err(Error::domain("log_weight requires |x| < 4R"));
    }
    Ok((4.0 * r / rho).ln().powf(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        let u = make_bump(vec![1.0, 2.0], 2.0, 1).unwrap();
        assert_eq!(u.eval(&[1.0, 2.0]), 1.0);
        assert_eq!(u.eval(&[3.0, 2.0]), 0.0);
        let h = 2.0 / 2f64.sqrt();
        assert!((u.eval(&[1.0 + h, 2.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_weight_examples() {
        let r = 1.5;
        assert!((log_weight(&[r, 0.0], r, 2.0).unwrap() - 4f64.ln().powi(2)).abs() < 1e-14);
        let e = std::f64::consts::E;
        assert!((log_weight(&[0.0, 4.0 * r / e], r, 3.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((log_weight(&[r / 4.0], r, 2.0).unwrap() - 7.687_248_222_691_74).abs() < 1e-10);
        assert!(log_weight(&[4.0 * r, 0.0], r, 1.0).is_err());
    }

    #[test]
    fn counterexample_is_continuous_at_the_unit_sphere() {
        let hp = HardyParams::point(2, 0.5, 2.0, 0.0, 0.0).unwrap();
        let u = make_counterexample(0.1, &hp).unwrap();
        assert_eq!(u.eval(&[1.0, 0.0]), 1.0);
        assert!((u.eval(&[1.0 - 1e-12, 0.0]) - 1.0).abs() < 1e-11);
        let neg = HardyParams::point(2, 0.5, 2.0, -0.8, -0.8).unwrap();
        assert!(matches!(make_counterexample(0.1, &neg), Err(Error::Precondition(_))));
    }

    #[test]
    fn supercritical_eta_must_avoid_origin() {
        let hp = HardyParams::new(2, 0.6, 2.0, 1, 0.0, 0.0).unwrap();
        let bad = make_sharpness_sequence(&hp, Profile::Bump { radius: 1.0, m: 2 }, 1.0, 2, 4.0);
        assert!(matches!(bad, Err(Error::Precondition(_))));
        assert!(make_sharpness_sequence(&hp, default_supercritical_eta(), 1.0, 2, 4.0).is_ok());
    }

    #[test]
    fn tensor_structure() {
        let hp = HardyParams::new(2, 0.6, 2.0, 1, 0.0, 0.0).unwrap();
        let u = make_sharpness_sequence(&hp, default_supercritical_eta(), 1.0, 2, 4.0).unwrap();
        let TestFunction::Tensor(t) = &u else { panic!() };
        let x = [1.1, 0.0];
        assert!((u.eval(&x) - t.eta.eval(1.1) * t.phi_n(&[0.0])).abs() < 1e-15);
    }

    #[test]
    fn ground_state_reconstruction() {
        let hp = HardyParams::new(2, 0.4, 2.0, 1, 0.1, 0.0).unwrap();
        let u = make_bump(vec![0.3, -0.2], 0.7, 2).unwrap();
        let (v, omega) = ground_state_split(&u, &hp);
        let x = [0.25, 0.1];
        assert!((omega.eval(&x) * v.eval(&x) / u.eval(&x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dilation_of_bump_is_a_bump() {
        let u = make_bump(vec![1.0, 0.5], 0.4, 2).unwrap();
        let v = u.dilate(2.0);
        let x = [0.52, 0.24];
        let y = [1.04, 0.48];
        assert!((v.eval(&x) - u.eval(&y)).abs() < 1e-15);
    }
}
