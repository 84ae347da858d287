use serde::{Deserialize, Serialize};

use crate::params::{HardyParams, SobolevParams};
use crate::Estimate;

/// Which inequality a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Sharp weighted Hardy inequality on a flat submanifold.
    Hardy,
    /// Hardy inequality with the `c_p E_omega[v]` remainder, `p >= 2`.
    RemainderPGe2,
    /// Hardy inequality with the `C_p E_tilde[v]` remainder, `1 < p < 2`.
    RemainderPLt2,
    /// The `p = 2` ground-state identity (equality with `c_2 = 1`).
    GroundStateIdentity,
    /// Hardy-Sobolev inequality in the `E_omega` form, `1 <= k < d`.
    HardySobolevIneq1,
    /// Hardy-Sobolev inequality in the `W_r` form, `1 <= k < d`.
    HardySobolevIneq2,
    /// Logarithmic Hardy-Sobolev inequality in the `E_omega` form, `k = d`.
    LogHardySobolev,
    /// Hardy-Sobolev-Maz'ya inequality, `1 <= k < d`.
    HsmFlat,
    /// Logarithmic Hardy-Sobolev-Maz'ya inequality, `k = d`.
    HsmLog,
}

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Hardy => "hardy",
            TheoremId::RemainderPGe2 => "remainder_p_ge2",
            TheoremId::RemainderPLt2 => "remainder_p_lt2",
            TheoremId::GroundStateIdentity => "ground_state_identity",
            TheoremId::HardySobolevIneq1 => "hardy_sobolev_ineq1",
            TheoremId::HardySobolevIneq2 => "hardy_sobolev_ineq2",
            TheoremId::LogHardySobolev => "log_hardy_sobolev",
            TheoremId::HsmFlat => "hsm_flat",
            TheoremId::HsmLog => "hsm_log",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        const ALL: [TheoremId; 9] = [
            TheoremId::Hardy,
            TheoremId::RemainderPGe2,
            TheoremId::RemainderPLt2,
            TheoremId::GroundStateIdentity,
            TheoremId::HardySobolevIneq1,
            TheoremId::HardySobolevIneq2,
            TheoremId::LogHardySobolev,
            TheoremId::HsmFlat,
            TheoremId::HsmLog,
        ];
        ALL.into_iter().find(|t| t.as_str() == name)
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one inequality check on one function.
///
/// `margin = lhs - constant * hardy_term - remainder_constant * remainder_or_rhs`
/// for the Hardy-type checks; for the Hardy-Sobolev and HSM checks, whose
/// constants are existential, `margin` is the left side of the inequality
/// minus the Hardy term and `empirical_ratio` carries the evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_id: TheoremId,
    pub params: HardyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobolev: Option<SobolevParams>,
    pub function: String,
    pub lhs: Estimate,
    pub hardy_term: Estimate,
    pub constant: f64,
    pub constant_error: f64,
    pub remainder_or_rhs: Estimate,
    pub remainder_constant: f64,
    pub margin: f64,
    pub sigma: f64,
    pub pass: bool,
    /// Degenerate input (e.g. `u = 0` in a ratio check); `pass` is true.
    pub skipped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_sigma: Option<f64>,
    /// `R` of the logarithmic weight `ln^q(4R/|x|)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_radius: Option<f64>,
    pub seed: u64,
}

/// The acceptance rule: `margin >= -3 sigma`.
pub fn passes(margin: f64, sigma: f64) -> bool {
    margin >= -3.0 * sigma
}

impl VerificationReport {
    /// A report with every term zero.
    pub(crate) fn zero(theorem_id: TheoremId, params: HardyParams, function: String, seed: u64) -> Self {
        Self {
            theorem_id,
            params,
            sobolev: None,
            function,
            lhs: Estimate::exact(0.0),
            hardy_term: Estimate::exact(0.0),
            constant: 0.0,
            constant_error: 0.0,
            remainder_or_rhs: Estimate::exact(0.0),
            remainder_constant: 0.0,
            margin: 0.0,
            sigma: 0.0,
            pass: true,
            skipped: false,
            empirical_ratio: None,
            ratio_sigma: None,
            log_radius: None,
            seed,
        }
    }

    /// Sets `margin`, `sigma` and `pass` together.
    pub(crate) fn settle(mut self, margin: f64, sigma: f64) -> Self {
        self.margin = margin;
        self.sigma = sigma;
        self.pass = passes(margin, sigma);
        self
    }

    /// `empirical_ratio - 3 ratio_sigma`, the ratio's one-sided lower bound.
    pub fn ratio_lower_bound(&self) -> Option<f64> {
        self.empirical_ratio.map(|r| r - 3.0 * self.ratio_sigma.unwrap_or(0.0))
    }
}

/// Reports of one suite with its aggregate verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub name: String,
    pub theorem_id: TheoremId,
    pub params: HardyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobolev: Option<SobolevParams>,
    pub reports: Vec<VerificationReport>,
    pub all_pass: bool,
    /// Smallest and median empirical ratio over non-skipped members.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_ratio: Option<f64>,
    /// Smallest `ratio - 3 sigma`; positive when the ratios are bounded away
    /// from zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_ratio_lower: Option<f64>,
}

impl SuiteSummary {
    pub fn new(
        name: impl Into<String>,
        theorem_id: TheoremId,
        params: HardyParams,
        sobolev: Option<SobolevParams>,
        reports: Vec<VerificationReport>,
    ) -> Self {
        let mut ratios: Vec<f64> = reports.iter().filter(|r| !r.skipped).filter_map(|r| r.empirical_ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let min_ratio = ratios.first().copied();
        let median_ratio = (!ratios.is_empty()).then(|| {
            let n = ratios.len();
            if n % 2 == 1 {
                ratios[n / 2]
            } else {
                0.5 * (ratios[n / 2 - 1] + ratios[n / 2])
            }
        });
        let min_ratio_lower =
            reports.iter().filter(|r| !r.skipped).filter_map(|r| r.ratio_lower_bound()).min_by(f64::total_cmp);
        let ratio_ok = min_ratio_lower.is_none_or(|v| v > 0.0);
        let all_pass = reports.iter().all(|r| r.pass) && ratio_ok;
        Self {
            name: name.into(),
            theorem_id,
            params,
            sobolev,
            reports,
            all_pass,
            min_ratio,
            median_ratio,
            min_ratio_lower,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_is_exact() {
        assert!(passes(0.0, 0.0));
        assert!(passes(-3.0, 1.0));
        assert!(!passes(-3.000_000_1, 1.0));
        assert!(!passes(-1e-300, 0.0));
    }

    #[test]
    fn theorem_names_round_trip() {
        for name in ["hardy", "remainder_p_ge2", "hsm_log", "ground_state_identity"] {
            assert_eq!(TheoremId::parse(name).unwrap().as_str(), name);
        }
        assert!(TheoremId::parse("nope").is_none());
    }

    #[test]
    fn suite_ratio_statistics() {
        let hp = HardyParams::new(2, 0.6, 2.0, 1, 0.0, 0.0).unwrap();
        let mut reports = Vec::new();
        for (i, r) in [0.5, 0.2, 0.9].into_iter().enumerate() {
            let mut rep = VerificationReport::zero(TheoremId::HsmFlat, hp, format!("f{i}"), 0);
            rep.empirical_ratio = Some(r);
            rep.ratio_sigma = Some(0.01);
            reports.push(rep);
        }
        let s = SuiteSummary::new("t", TheoremId::HsmFlat, hp, None, reports);
        assert_eq!(s.min_ratio, Some(0.2));
        assert_eq!(s.median_ratio, Some(0.5));
        assert!((s.min_ratio_lower.unwrap() - 0.17).abs() < 1e-12);
        assert!(s.all_pass);
    }
}
