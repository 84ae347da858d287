//! Inequality checks, studies and default suites.
//!
//! Every check returns a [`VerificationReport`] whose verdict follows one
//! rule: `pass` holds exactly when `margin >= -3 sigma`. Constants that are
//! only known to exist are handled through empirical ratios, recorded per
//! function and summarized per suite.

pub mod checks;
pub mod report;
pub mod studies;
pub mod suites;

pub use checks::{
    check_ground_state_identity, check_hardy, check_hardy_sobolev, check_hsm, check_remainder_p_ge2,
    check_remainder_p_lt2, check_remainder_p_lt2_with, hardy_term, HardySobolevForm,
};
pub use report::{passes, SuiteSummary, TheoremId, VerificationReport};
pub use studies::{
    duality_check, fit_slope, hsm_failure_study, sharpness_study, shifted_constant_2d, CounterexampleStudy,
    DualityOutcome, SharpnessStudy,
};
pub use suites::{
    default_suites, hardy_grid, random_bumps, sign_changing_pairs, SuiteDef, SuiteKind, DEFAULT_SUITE_SIZE,
};
