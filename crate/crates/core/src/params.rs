//! Parameter tuples and their admissibility rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fns::KernelParams;

/// Position of `sp` relative to `k + alpha + beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `sp < k + alpha + beta`: test functions may cross the singular set.
    Subcritical,
    /// `sp > k + alpha + beta`: test functions must vanish near the singular set.
    Supercritical,
    /// `sp = k + alpha + beta`: the sharp constant vanishes.
    Degenerate,
}

#[derive(Deserialize)]
struct RawHardy {
    d: usize,
    s: f64,
    p: f64,
    k: usize,
    alpha: f64,
    beta: f64,
}

/// The tuple `(d, s, p, k, alpha, beta)` of a weighted fractional Hardy
/// inequality with singular set `K = {x : x_k = 0}`.
///
/// Construction validates `d >= 1`, `0 <= s < 1`, `p >= 1`, `1 <= k <= d`
/// and `alpha, beta, alpha + beta` in `(-k, sp)`. The degenerate regime is
/// accepted here and rejected by the operations that need a nonzero constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHardy")]
pub struct HardyParams {
    d: usize,
    s: f64,
    p: f64,
    k: usize,
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawHardy> for HardyParams {
    type Error = Error;

    fn try_from(r: RawHardy) -> Result<Self> {
        HardyParams::new(r.d, r.s, r.p, r.k, r.alpha, r.beta)
    }
}

/// Relative slack used when comparing `sp` with `k + alpha + beta`.
const DEGENERACY_TOL: f64 = 1e-12;

impl HardyParams {
    pub fn new(d: usize, s: f64, p: f64, k: usize, alpha: f64, beta: f64) -> Result<Self> {
        if d < 1 {
            return Err(Error::invalid("d must be at least 1"));
        }
        if !(s.is_finite() && (0.0..1.0).contains(&s)) {
            return Err(Error::invalid("s must lie in [0, 1)"));
        }
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::invalid("p must be at least 1"));
        }
        if k < 1 || k > d {
            return Err(Error::invalid("k must lie in [1, d]"));
        }
        let sp = s * p;
        let lo = -(k as f64);
        let inside = |v: f64| v.is_finite() && v > lo && v < sp;
        if !inside(alpha) {
            return Err(Error::invalid("alpha must lie in (-k, sp)"));
        }
        if !inside(beta) {
            return Err(Error::invalid("beta must lie in (-k, sp)"));
        }
        if !inside(alpha + beta) {
            return Err(Error::invalid("alpha+beta must lie in (-k, sp)"));
        }
        Ok(Self { d, s, p, k, alpha, beta })
    }

    /// Point-singularity tuple (`k = d`).
    pub fn point(d: usize, s: f64, p: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(d, s, p, d, alpha, beta)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }

    /// `gamma = (k + alpha + beta - sp) / p`, the exponent of the ground state
    /// `omega(x) = |x_k|^(-gamma)`.
    pub fn gamma(&self) -> f64 {
        (self.k as f64 + self.alpha + self.beta - self.sp()) / self.p
    }

    /// Exponent `sp - alpha - beta` of the Hardy weight `|x_k|^-(sp - alpha - beta)`.
    pub fn hardy_weight_exponent(&self) -> f64 {
        self.sp() - self.alpha - self.beta
    }

    pub fn regime(&self) -> Regime {
        let crit = self.k as f64 + self.alpha + self.beta;
        let sp = self.sp();
        let scale = crit.abs().max(sp.abs()).max(1.0);
        if (sp - crit).abs() <= DEGENERACY_TOL * scale {
            Regime::Degenerate
        } else if sp < crit {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        }
    }

    /// Fails with [`Error::DegenerateRegime`] when `sp = k + alpha + beta`.
    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.regime() == Regime::Degenerate {
            Err(Error::DegenerateRegime)
        } else {
            Ok(())
        }
    }

    pub fn kernel(&self) -> KernelParams<f64> {
        KernelParams { d: self.d, s: self.s, p: self.p }
    }

    /// Same exponents with `alpha` and `beta` exchanged.
    pub fn swapped(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha, ..*self }
    }

    /// Image under the inversion `x -> x / |x|^2` for `k = d`:
    /// `(alpha, beta) -> (sp - alpha - d, sp - beta - d)`.
    pub fn inversion_dual(&self) -> Result<Self> {
        if self.k != self.d {
            return Err(Error::precondition("the inversion map requires k = d"));
        }
        let sp = self.sp();
        let d = self.d as f64;
        Self::new(self.d, self.s, self.p, self.k, sp - self.alpha - d, sp - self.beta - d)
    }
}

/// Which family of Sobolev-type inequalities a [`SobolevParams`] serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolevVariant {
    /// `1 <= k < d`, `d >= 2`, `p < q <= dp/(d - sp)` (or `q > p` when `sp = d`).
    Flat,
    /// `k = d` with the logarithmic weight: `p <= q <= dp/(d - sp)`
    /// (or `q >= p` when `sp = d`).
    Log,
}

#[derive(Deserialize)]
struct RawSobolev {
    base: HardyParams,
    q: f64,
    variant: SobolevVariant,
}

/// A Hardy tuple together with a target exponent `q` and the derived
/// `theta = d + (sp - d) q / p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSobolev")]
pub struct SobolevParams {
    base: HardyParams,
    q: f64,
    theta: f64,
    variant: SobolevVariant,
}

impl TryFrom<RawSobolev> for SobolevParams {
    type Error = Error;

    fn try_from(r: RawSobolev) -> Result<Self> {
        SobolevParams::new(r.base, r.q, r.variant)
    }
}

impl SobolevParams {
    pub fn new(base: HardyParams, q: f64, variant: SobolevVariant) -> Result<Self> {
        let d = base.d as f64;
        let p = base.p;
        let sp = base.sp();
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::invalid("q must exceed 1"));
        }
        if sp > d {
            return Err(Error::invalid("sp must not exceed d"));
        }
        match variant {
            SobolevVariant::Flat => {
                if base.d < 2 {
                    return Err(Error::invalid("d must be at least 2"));
                }
                if base.k >= base.d {
                    return Err(Error::invalid("k must be less than d"));
                }
                if !(q > p) {
                    return Err(Error::invalid("q must exceed p"));
                }
            }
            SobolevVariant::Log => {
                if base.k != base.d {
                    return Err(Error::invalid("the logarithmic variant requires k = d"));
                }
                if q < p {
                    return Err(Error::invalid("q must be at least p"));
                }
            }
        }
        let critical = critical_exponent(base.d, sp, p);
        if let Some(qc) = critical {
            if q > qc * (1.0 + 1e-12) {
                return Err(Error::invalid("q must not exceed dp/(d-sp)"));
            }
        }
        let theta = match critical {
            Some(qc) if (q - qc).abs() <= 1e-12 * qc => 0.0,
            _ => d + (sp - d) * q / p,
        };
        Ok(Self { base, q, theta, variant })
    }

    /// The critical exponent `q = dp/(d - sp)` (requires `sp < d`).
    pub fn critical(base: HardyParams, variant: SobolevVariant) -> Result<Self> {
        let qc = critical_exponent(base.d, base.sp(), base.p)
            .ok_or_else(|| Error::invalid("the critical exponent requires sp < d"))?;
        Self::new(base, qc, variant)
    }

    pub fn base(&self) -> &HardyParams {
        &self.base
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn variant(&self) -> SobolevVariant {
        self.variant
    }
}

/// `dp/(d - sp)` when `sp < d`, otherwise `None`.
pub fn critical_exponent(d: usize, sp: f64, p: f64) -> Option<f64> {
    let d = d as f64;
    (sp < d).then(|| d * p / (d - sp))
}
