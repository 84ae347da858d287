//! Sharp constants and numerical verification for weighted fractional Hardy
//! inequalities whose singular set is a flat submanifold
//! `K = {x : x_k = 0}` of codimension `k` in `R^d`.
//!
//! The crate is layered bottom-up:
//!
//! * [`special_fns`]: Gamma function, sphere measures, the angular kernel
//!   `Phi_{d,s,p}`, the French power and two elementary inequalities.
//! * [`constants`]: the sharp constants, the remainder constants and the
//!   Sobolev exponent bookkeeping.
//! * [`functions`]: the concrete test-function families.
//! * [`quadrature`]: adaptive Gauss-Kronrod, the radial reduction engine for
//!   `k = d`, tensor quadrature for weighted `L^p` terms, and a seeded Monte
//!   Carlo engine for the singular double integrals.
//! * [`verify`]: inequality checks, the sharpness study and the
//!   counterexample study.
//!
//! The exact-formula layer and the 1-D quadrature core are generic over the
//! scalar type (see [`Real`]); the engines and the harness work in `f64`.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constants;
pub mod error;
pub mod functions;
pub mod params;
pub mod quadrature;
pub mod special_fns;
pub mod verify;

pub use error::{Error, Result};
pub use params::{HardyParams, Regime, SobolevParams, SobolevVariant};

/// Floating point scalar accepted by the generic numerical layer.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Working precision of the engines and the verification harness.
pub type Scalar = f64;

/// Kernel parameters at working precision.
pub type Kernel = special_fns::KernelParams<Scalar>;

/// Integral estimate at working precision.
pub type Estimate = quadrature::IntegralEstimate<Scalar>;

/// Library version embedded into serialized reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
