//! Integral estimation: adaptive 1-D quadrature, the radial reduction engine
//! for `k = d`, weighted `L^p` quadrature and a seeded Monte Carlo engine for
//! the singular double integrals.

pub mod adaptive;
pub mod functionals;
pub mod lp;
pub mod mc;
pub mod radial;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

pub use adaptive::{integrate_1d, integrate_to_infinity, Endpoints};
pub use functionals::{gagliardo, gagliardo_mc, gagliardo_radial, remainder_functional, RemainderKind};
pub use lp::{weighted_lp, LogWeight};

/// Value, uncertainty and cost of an integral estimate.
///
/// `std_error` is a standard error for Monte Carlo estimates and an error
/// bound for the deterministic engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate<F> {
    pub value: F,
    pub std_error: F,
    pub samples_used: u64,
}

impl<F: Real> IntegralEstimate<F> {
    pub fn exact(value: F) -> Self {
        Self { value, std_error: F::zero(), samples_used: 0 }
    }

    /// Sum with errors added linearly (deterministic bounds).
    pub fn add(&self, other: &Self) -> Self {
        Self {
            value: self.value + other.value,
            std_error: self.std_error + other.std_error,
            samples_used: self.samples_used + other.samples_used,
        }
    }

    pub fn scale(&self, c: F) -> Self {
        Self { value: self.value * c, std_error: self.std_error * c.abs(), ..*self }
    }

    pub fn relative_error(&self) -> F {
        if self.value == F::zero() {
            F::zero()
        } else {
            (self.std_error / self.value).abs()
        }
    }
}

/// Integration engine selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Adaptive1d,
    Adaptive2d,
    MonteCarlo,
    RadialReduction,
}

impl EngineKind {
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, EngineKind::MonteCarlo)
    }
}

/// Engine, budgets, tolerances and seed for one estimate.
///
/// Identical specs on identical inputs give bit-identical estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub engine: EngineKind,
    pub rel_tol: f64,
    pub samples: u64,
    pub seed: u64,
    /// Exponent of `|h|` in the Monte Carlo proposal for `h = y - x` near the
    /// diagonal. `None` selects `p - sp - d`.
    pub proposal_exponent: Option<f64>,
}

pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const DEFAULT_SAMPLES: u64 = 200_000;
pub const DEFAULT_SEED: u64 = 0x5eed_2025;

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            engine: EngineKind::MonteCarlo,
            rel_tol: DEFAULT_REL_TOL,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            proposal_exponent: None,
        }
    }
}

impl QuadratureSpec {
    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Self { engine: EngineKind::MonteCarlo, samples, seed, ..Self::default() }
    }

    pub fn radial(rel_tol: f64) -> Self {
        Self { engine: EngineKind::RadialReduction, rel_tol, samples: 0, ..Self::default() }
    }

    pub fn adaptive(rel_tol: f64) -> Self {
        Self { engine: EngineKind::Adaptive1d, rel_tol, samples: 0, ..Self::default() }
    }

    pub fn with_engine(self, engine: EngineKind) -> Self {
        Self { engine, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 0.1) {
            return Err(Error::invalid("rel_tol must lie in (0, 0.1]"));
        }
        if self.engine == EngineKind::MonteCarlo && self.samples < 1000 {
            return Err(Error::invalid("samples must be at least 1000 for the Monte Carlo engine"));
        }
        Ok(())
    }
}
