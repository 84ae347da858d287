//! Acceptance run: one line per criterion, nonzero exit on any failure.
//!
//! A criterion passes only when its numerical check holds and it finishes
//! inside its time budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use frachardy::constants::{
    remainder_c_p, remainder_profile, sharp_constant_flat, transverse_integral, transverse_prefactor,
};
use frachardy::functions::{default_supercritical_eta, make_bump, make_radial, Profile};
use frachardy::quadrature::{gagliardo_mc, gagliardo_radial, QuadratureSpec};
use frachardy::verify::{
    check_ground_state_identity, default_suites, duality_check, hsm_failure_study, sharpness_study, SuiteKind,
    SuiteSummary,
};
use frachardy::{HardyParams, SobolevParams, SobolevVariant};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hp(d: usize, s: f64, p: f64, k: usize, a: f64, b: f64) -> HardyParams {
    HardyParams::new(d, s, p, k, a, b).expect("admissible tuple")
}

fn prefactor_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, k) in [(2, 1), (3, 1), (3, 2)] {
        for sp in [0.5, 1.0, 1.5] {
            let exact = transverse_prefactor(d, k, sp / 2.0, 2.0).map_err(|e| e.to_string())?;
            let num = transverse_integral(d, k, sp / 2.0, 2.0, 1e-11).map_err(|e| e.to_string())?;
            worst = worst.max((num.value / exact - 1.0).abs());
        }
    }
    ensure(worst <= 1e-8, format!("max rel err {worst:.2e} over 9 cases"))
}

fn remainder_constants() -> Outcome {
    let c2 = remainder_c_p(2.0).map_err(|e| e.to_string())?;
    let mut detail = format!("|c_2 - 1| = {:.1e}", (c2 - 1.0).abs());
    let mut ok = (c2 - 1.0).abs() <= 1e-12;
    for p in [2.0, 2.5, 3.0, 4.0] {
        let c = remainder_c_p(p).map_err(|e| e.to_string())?;
        let n = 2_000_000;
        let oracle =
            (1..=n).map(|i| remainder_profile(p, 0.5 * i as f64 / n as f64)).fold(f64::INFINITY, f64::min).min(1.0);
        let rel = (c / oracle - 1.0).abs();
        ok &= c > 0.0 && c <= 1.0 && rel <= 1e-6;
        detail.push_str(&format!("; c_{p} = {c:.10} (grid rel {rel:.1e})"));
    }
    ensure(ok, detail)
}

fn inversion_duality() -> Outcome {
    let tuples = [
        hp(1, 0.6, 2.0, 1, 0.0, 0.0),
        hp(2, 0.5, 2.0, 2, -0.3, -0.2),
        hp(1, 0.4, 2.5, 1, 0.1, -0.2),
        hp(3, 0.8, 2.0, 3, -1.0, -0.8),
        hp(2, 0.7, 1.5, 2, 0.2, -0.5),
        hp(1, 0.3, 3.0, 1, 0.2, 0.3),
    ];
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for t in &tuples {
        let out = duality_check(t).map_err(|e| e.to_string())?;
        match (out.agrees, out.rel_diff) {
            (Some(true), Some(r)) => {
                compared += 1;
                worst = worst.max(r);
            }
            _ => return Err(format!("tuple {t:?}: {out:?}")),
        }
    }
    ensure(compared >= 5 && worst <= 1e-6, format!("{compared} tuples, max rel diff {worst:.2e}"))
}

fn ground_state_identity() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (d, s) in [(1, 0.3), (2, 0.5), (3, 0.5)] {
        let h = hp(d, s, 2.0, d, 0.0, 0.0);
        let u = make_radial(d, Profile::Bump { radius: 1.0, m: 2 }).map_err(|e| e.to_string())?;
        let rep = check_ground_state_identity(&u, &h, &QuadratureSpec::radial(1e-7)).map_err(|e| e.to_string())?;
        let rel = rep.margin.abs() / rep.lhs.value;
        ok &= rel <= 1e-3;
        detail.push(format!("radial d={d} rel {rel:.1e}"));
    }
    let h = hp(2, 0.6, 2.0, 1, 0.0, 0.0);
    let u = make_bump(vec![0.9, 0.1], 0.5, 2).map_err(|e| e.to_string())?;
    let rep = check_ground_state_identity(&u, &h, &QuadratureSpec::monte_carlo(1_000_000, 2024))
        .map_err(|e| e.to_string())?;
    ok &= rep.pass;
    detail.push(format!("mc d=2 k=1 |residual| {:.3e} <= 3 x {:.3e}", rep.margin.abs(), rep.sigma));
    ensure(ok, detail.join("; "))
}

fn run_suites(filter: impl Fn(&SuiteKind) -> bool, seed: u64) -> Result<Vec<SuiteSummary>, String> {
    default_suites()
        .into_iter()
        .filter(|s| filter(&s.kind))
        .map(|s| s.run(&QuadratureSpec::monte_carlo(200_000, seed)).map_err(|e| format!("{}: {e}", s.name)))
        .collect()
}

fn worst_z(suites: &[SuiteSummary]) -> f64 {
    suites
        .iter()
        .flat_map(|s| &s.reports)
        .filter(|r| r.sigma > 0.0)
        .map(|r| r.margin / r.sigma)
        .fold(f64::INFINITY, f64::min)
}

fn summarize(suites: &[SuiteSummary]) -> Outcome {
    let members: usize = suites.iter().map(|s| s.reports.len()).sum();
    let failed: Vec<&str> = suites.iter().filter(|s| !s.all_pass).map(|s| s.name.as_str()).collect();
    let detail = format!(
        "{} suites, {members} members, min margin/sigma {:.1}, failing: {failed:?}",
        suites.len(),
        worst_z(suites)
    );
    ensure(failed.is_empty() && members > 0, detail)
}

fn hardy_suites() -> Outcome {
    let suites = run_suites(|k| matches!(k, SuiteKind::Hardy), 1001)?;
    if suites.len() != 6 || suites.iter().any(|s| s.reports.len() != 20) {
        return Err("expected 6 tuples x 20 bumps".into());
    }
    summarize(&suites)
}

fn remainder_suites() -> Outcome {
    let suites = run_suites(|k| matches!(k, SuiteKind::RemainderPGe2 | SuiteKind::RemainderPLt2 { .. }), 2002)?;
    if suites.len() != 3 {
        return Err("expected p=3, p=1.5 nonnegative and p=1.5 general".into());
    }
    summarize(&suites)
}

fn sharpness() -> Outcome {
    let h = hp(2, 0.6, 2.0, 1, 0.0, 0.0);
    let study = sharpness_study(
        &h,
        &default_supercritical_eta(),
        1.0,
        2,
        &[1.0, 4.0, 16.0, 64.0],
        &QuadratureSpec::monte_carlo(1_000_000, 3),
    )
    .map_err(|e| e.to_string())?;
    let ratios: Vec<String> = study.rows.iter().map(|r| format!("{:.3}", r.ratio)).collect();
    let last = study.rows.last().expect("rows");
    let detail = format!(
        "ratios [{}], target {:.3} (off {:.1}%), I2^p {:.3e} -> {:.3e}, monotone {}, I2 decreasing {}",
        ratios.join(", "),
        study.target,
        100.0 * (last.ratio / study.target - 1.0),
        study.rows[0].i2p.value,
        last.i2p.value,
        study.ratio_monotone,
        study.i2_decreasing
    );
    ensure(study.pass(), detail)
}

fn counterexample() -> Outcome {
    let h = hp(2, 0.5, 2.0, 2, 0.0, 0.0);
    let sob = SobolevParams::critical(h, SobolevVariant::Log).map_err(|e| e.to_string())?;
    if sob.q() != 4.0 {
        return Err(format!("critical q = {}", sob.q()));
    }
    let study = hsm_failure_study(&h, &sob, &[0.2, 0.1, 0.05, 0.025], 1e-7).map_err(|e| e.to_string())?;
    let hardy_err = study.rows.iter().map(|r| r.hardy_rel_error).fold(0.0, f64::max);
    let c = sharp_constant_flat(&h).map_err(|e| e.to_string())?.value;
    let c_eps_ok = study.rows.iter().all(|r| r.c_eps.value > c);
    let detail = format!(
        "slope {:.4} (band [{:.3}, {:.3}]), psi monotone {}, C_eps > C {} , hardy rel err {hardy_err:.1e}",
        study.slope,
        0.85 * study.slope_target,
        1.15 * study.slope_target,
        study.psi_monotone,
        c_eps_ok
    );
    ensure(study.pass() && c_eps_ok && hardy_err <= 1e-6, detail)
}

fn cross_engine() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    let mc = QuadratureSpec::monte_carlo(1_000_000, 77);
    let det = QuadratureSpec::radial(1e-8);
    for h in [hp(2, 0.5, 2.0, 2, 0.0, 0.0), hp(2, 0.6, 2.0, 2, 0.2, 0.1), hp(2, 0.4, 1.5, 2, -0.2, 0.3)] {
        let u = make_radial(2, Profile::Bump { radius: 1.0, m: 2 }).map_err(|e| e.to_string())?;
        let r = gagliardo_radial(&u, &h, &det).map_err(|e| e.to_string())?;
        let m = gagliardo_mc(&u, &h, &mc).map_err(|e| e.to_string())?;
        let sigma = m.std_error.hypot(r.std_error);
        let z = (m.value - r.value) / sigma;
        ok &= z.abs() <= 3.0;
        detail.push(format!("agree z={z:.2}"));
        let expo = h.sp() - 2.0 - h.alpha() - h.beta();
        for lambda in [0.5, 2.0] {
            let v = u.dilate(lambda);
            let rs = gagliardo_radial(&v, &h, &det).map_err(|e| e.to_string())?;
            let rel = (rs.value / (r.value * lambda.powf(expo)) - 1.0).abs();
            ok &= rel <= 1e-4;
            let ms = gagliardo_mc(&v, &h, &mc.with_seed(78)).map_err(|e| e.to_string())?;
            let scale = lambda.powf(expo);
            let zs = (ms.value - scale * m.value) / ms.std_error.hypot(scale * m.std_error);
            ok &= zs.abs() <= 3.0;
            detail.push(format!("lambda={lambda} radial rel {rel:.1e} mc z={zs:.2}"));
        }
    }
    ensure(ok, detail.join("; "))
}

fn hsm_suites() -> Outcome {
    let suites = run_suites(|k| matches!(k, SuiteKind::Hsm { .. }), 3003)?;
    if suites.len() != 2 {
        return Err("expected the flat and the logarithmic suite".into());
    }
    let numerators_ok = suites.iter().all(|s| s.reports.iter().all(|r| r.pass));
    let ratios_ok = suites.iter().all(|s| s.min_ratio_lower.is_some_and(|v| v > 0.0));
    let mins: Vec<String> = suites
        .iter()
        .map(|s| {
            format!(
                "{} min ratio {:.4} (lower {:.4})",
                s.name,
                s.min_ratio.unwrap_or(f64::NAN),
                s.min_ratio_lower.unwrap_or(f64::NAN)
            )
        })
        .collect();
    ensure(numerators_ok && ratios_ok, format!("{}; min margin/sigma {:.1}", mins.join(", "), worst_z(&suites)))
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "prefactor identity", 5, prefactor_identity),
        (2, "remainder constants", 120, remainder_constants),
        (3, "inversion duality", 30, inversion_duality),
        (4, "p=2 ground-state identity", 120, ground_state_identity),
        (5, "hardy property suites", 180, hardy_suites),
        (6, "remainder suites", 120, remainder_suites),
        (7, "sharpness study", 120, sharpness),
        (8, "counterexample study", 120, counterexample),
        (9, "cross-engine agreement and scaling", 120, cross_engine),
        (10, "hsm empirical-ratio suites", 180, hsm_suites),
    ];
    let mut failures = 0;
    for (n, name, budget, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        let timing = format!("{:.2}s of {budget}s", elapsed.as_secs_f64());
        println!("[{}] criterion {n} {name}: {detail} ({timing})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
