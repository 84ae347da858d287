//! Seeded property suites: random bumps on a parameter grid, run through one
//! of the checks, summarized per tuple.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{make_bump, TestFunction};
use crate::params::{HardyParams, Regime, SobolevParams, SobolevVariant};
use crate::quadrature::QuadratureSpec;
use crate::verify::checks::{
    check_ground_state_identity, check_hardy, check_hardy_sobolev, check_hsm, check_remainder_p_ge2,
    check_remainder_p_lt2_with, HardySobolevForm,
};
use crate::verify::report::{SuiteSummary, TheoremId, VerificationReport};

/// Members per suite.
pub const DEFAULT_SUITE_SIZE: usize = 20;

/// `count` bumps `(1 - |x-c|^2/r^2)_+^2` with `r ~ U[0.25, 0.6]` and
/// transverse coordinates `~ U[-0.5, 0.5]`. The distance of `c_k` from `K` is
/// drawn from `U[r + 0.1, r + 1]` in the supercritical regime (so the bump
/// stays off `K`) and from `U[0, r + 0.5]` otherwise.
pub fn random_bumps(hp: &HardyParams, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (d, k) = (hp.d(), hp.k());
    let supercritical = hp.regime() == Regime::Supercritical;
    (0..count)
        .map(|_| {
            let r: f64 = rng.gen_range(0.25..0.6);
            let dist = if supercritical { rng.gen_range(r + 0.1..r + 1.0) } else { rng.gen_range(0.0..r + 0.5) };
            let dir = unit_vector(&mut rng, k);
            let mut center: Vec<f64> = dir.iter().map(|v| v * dist).collect();
            center.extend((k..d).map(|_| rng.gen_range(-0.5..0.5)));
            make_bump(center, r, 2).expect("valid bump")
        })
        .collect()
}

fn unit_vector(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Sign-changing members `b - 0.7 b'`, where `b'` is `b` moved outward from
/// `K` by `2r + 0.2`, so the two supports are disjoint.
pub fn sign_changing_pairs(hp: &HardyParams, count: usize, seed: u64) -> Vec<TestFunction> {
    let k = hp.k();
    random_bumps(hp, count, seed)
        .into_iter()
        .map(|b| {
            let TestFunction::Bump { center, radius, m } = &b else { unreachable!() };
            let nk = center[..k].iter().map(|x| x * x).sum::<f64>().sqrt();
            let shift = 2.0 * radius + 0.2;
            let mut moved = center.clone();
            for (i, c) in moved[..k].iter_mut().enumerate() {
                let dir = if nk > 1e-12 {
                    center[i] / nk
                } else if i == 0 {
                    1.0
                } else {
                    0.0
                };
                *c += shift * dir;
            }
            let b2 = make_bump(moved, *radius, *m).expect("valid bump");
            TestFunction::LinearCombination { dim: hp.d(), terms: vec![(1.0, b), (-0.7, b2)] }
        })
        .collect()
}

/// The Hardy grid: three supercritical and three subcritical tuples.
pub fn hardy_grid() -> Vec<HardyParams> {
    [
        (2, 0.6, 2.0, 1, 0.0, 0.0),
        (2, 0.3, 2.0, 1, 0.0, 0.0),
        (2, 0.5, 3.0, 1, 0.2, 0.1),
        (2, 0.4, 1.5, 1, 0.1, 0.1),
        (3, 0.5, 2.0, 2, 0.0, 0.0),
        (2, 0.7, 2.0, 2, -0.5, -0.3),
    ]
    .into_iter()
    .map(|(d, s, p, k, a, b)| HardyParams::new(d, s, p, k, a, b).expect("grid tuple is admissible"))
    .collect()
}

/// What a suite checks on each member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuiteKind {
    Hardy,
    RemainderPGe2,
    GroundStateIdentity,
    /// `nonnegative_constant` selects `C_p = p - 1` on nonnegative bumps;
    /// otherwise the general constant on sign-changing members.
    RemainderPLt2 {
        nonnegative_constant: bool,
    },
    HardySobolev {
        form: HardySobolevForm,
    },
    Hsm {
        log_variant: bool,
    },
}

/// A named suite: kind, parameters and member count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteDef {
    pub name: String,
    pub kind: SuiteKind,
    pub params: HardyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobolev: Option<SobolevParams>,
    pub size: usize,
}

impl SuiteDef {
    pub fn new(name: impl Into<String>, kind: SuiteKind, params: HardyParams) -> Self {
        Self { name: name.into(), kind, params, sobolev: None, size: DEFAULT_SUITE_SIZE }
    }

    pub fn with_sobolev(self, sob: SobolevParams) -> Self {
        Self { params: *sob.base(), sobolev: Some(sob), ..self }
    }

    pub fn with_size(self, size: usize) -> Self {
        Self { size, ..self }
    }

    pub fn theorem_id(&self) -> TheoremId {
        match self.kind {
            SuiteKind::Hardy => TheoremId::Hardy,
            SuiteKind::RemainderPGe2 => TheoremId::RemainderPGe2,
            SuiteKind::GroundStateIdentity => TheoremId::GroundStateIdentity,
            SuiteKind::RemainderPLt2 { .. } => TheoremId::RemainderPLt2,
            SuiteKind::HardySobolev { form: HardySobolevForm::Ineq1 } => TheoremId::HardySobolevIneq1,
            SuiteKind::HardySobolev { form: HardySobolevForm::Ineq2 { .. } } => TheoremId::HardySobolevIneq2,
            SuiteKind::Hsm { log_variant: false } => TheoremId::HsmFlat,
            SuiteKind::Hsm { log_variant: true } => TheoremId::HsmLog,
        }
    }

    /// The members generated from `seed`.
    pub fn members(&self, seed: u64) -> Vec<TestFunction> {
        match self.kind {
            SuiteKind::RemainderPLt2 { nonnegative_constant: false } => {
                sign_changing_pairs(&self.params, self.size, seed)
            }
            _ => random_bumps(&self.params, self.size, seed),
        }
    }

    /// Runs every member; member `i` uses seed `spec.seed + i`.
    pub fn run(&self, spec: &QuadratureSpec) -> Result<SuiteSummary> {
        let needs_sobolev = matches!(self.kind, SuiteKind::HardySobolev { .. } | SuiteKind::Hsm { .. });
        let sob = match (needs_sobolev, self.sobolev) {
            (true, None) => return Err(Error::invalid("this suite needs a Sobolev exponent q")),
            (_, s) => s,
        };
        let hp = &self.params;
        let reports = self
            .members(spec.seed)
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let spec = spec.with_seed(spec.seed.wrapping_add(i as u64));
                self.check(u, hp, sob.as_ref(), &spec)
            })
            .collect::<Result<Vec<VerificationReport>>>()?;
        Ok(SuiteSummary::new(self.name.clone(), self.theorem_id(), *hp, sob, reports))
    }

    fn check(
        &self,
        u: &TestFunction,
        hp: &HardyParams,
        sob: Option<&SobolevParams>,
        spec: &QuadratureSpec,
    ) -> Result<VerificationReport> {
        match self.kind {
            SuiteKind::Hardy => check_hardy(u, hp, spec),
            SuiteKind::RemainderPGe2 => check_remainder_p_ge2(u, hp, spec),
            SuiteKind::GroundStateIdentity => check_ground_state_identity(u, hp, spec),
            SuiteKind::RemainderPLt2 { nonnegative_constant } => {
                check_remainder_p_lt2_with(u, hp, spec, nonnegative_constant)
            }
            SuiteKind::HardySobolev { form } => check_hardy_sobolev(u, sob.expect("checked"), spec, form),
            SuiteKind::Hsm { log_variant } => check_hsm(u, sob.expect("checked"), spec, log_variant, None),
        }
    }
}

/// Every default suite: the Hardy grid, the remainder suites, the
/// Hardy-Sobolev suite and both Hardy-Sobolev-Maz'ya suites.
pub fn default_suites() -> Vec<SuiteDef> {
    let mut out: Vec<SuiteDef> = hardy_grid()
        .into_iter()
        .map(|hp| {
            let name = format!(
                "hardy d={} k={} s={} p={} alpha={} beta={}",
                hp.d(),
                hp.k(),
                hp.s(),
                hp.p(),
                hp.alpha(),
                hp.beta()
            );
            SuiteDef::new(name, SuiteKind::Hardy, hp)
        })
        .collect();
    let p3 = HardyParams::new(2, 0.5, 3.0, 1, 0.2, 0.1).expect("admissible");
    out.push(SuiteDef::new("remainder p=3", SuiteKind::RemainderPGe2, p3));
    let p15 = HardyParams::new(2, 0.4, 1.5, 1, 0.1, 0.1).expect("admissible");
    out.push(SuiteDef::new(
        "remainder p=1.5 nonnegative",
        SuiteKind::RemainderPLt2 { nonnegative_constant: true },
        p15,
    ));
    out.push(SuiteDef::new(
        "remainder p=1.5 sign-changing",
        SuiteKind::RemainderPLt2 { nonnegative_constant: false },
        p15,
    ));
    let flat = HardyParams::new(2, 0.6, 2.0, 1, 0.0, 0.0).expect("admissible");
    let hs = SobolevParams::new(flat, 3.0, SobolevVariant::Flat).expect("admissible");
    out.push(
        SuiteDef::new("hardy-sobolev q=3", SuiteKind::HardySobolev { form: HardySobolevForm::Ineq1 }, flat)
            .with_sobolev(hs),
    );
    let hsm = SobolevParams::critical(flat, SobolevVariant::Flat).expect("admissible");
    out.push(SuiteDef::new("hsm flat critical", SuiteKind::Hsm { log_variant: false }, flat).with_sobolev(hsm));
    let point = HardyParams::new(2, 0.5, 2.0, 2, 0.0, 0.0).expect("admissible");
    let log = SobolevParams::critical(point, SobolevVariant::Log).expect("admissible");
    out.push(SuiteDef::new("hsm log critical", SuiteKind::Hsm { log_variant: true }, point).with_sobolev(log));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::norm_k;

    #[test]
    fn bumps_are_seeded_and_respect_the_regime() {
        for hp in hardy_grid() {
            let a = random_bumps(&hp, 20, 11);
            assert_eq!(a, random_bumps(&hp, 20, 11));
            assert_ne!(a, random_bumps(&hp, 20, 12));
            for u in &a {
                let TestFunction::Bump { center, radius, .. } = u else { panic!() };
                assert!((0.25..0.6).contains(radius));
                if hp.regime() == Regime::Supercritical {
                    assert!(norm_k(center, hp.k()) - radius >= 0.1 - 1e-12);
                    assert!(u.k_gap(hp.k()) > 0.0);
                }
            }
        }
    }

    #[test]
    fn pairs_change_sign() {
        let hp = HardyParams::new(2, 0.6, 2.0, 1, 0.0, 0.0).unwrap();
        for u in sign_changing_pairs(&hp, 5, 3) {
            assert!(!u.is_nonnegative());
            assert!(u.k_gap(1) > 0.0);
        }
    }

    #[test]
    fn grid_covers_both_regimes() {
        let g = hardy_grid();
        assert_eq!(g.len(), 6);
        let sup = g.iter().filter(|h| h.regime() == Regime::Supercritical).count();
        assert_eq!(sup, 3);
    }

    #[test]
    fn default_suites_are_well_formed() {
        let all = default_suites();
        assert_eq!(all.len(), 12);
        for s in &all {
            let needs = matches!(s.kind, SuiteKind::HardySobolev { .. } | SuiteKind::Hsm { .. });
            assert_eq!(needs, s.sobolev.is_some(), "{}", s.name);
        }
    }
}
