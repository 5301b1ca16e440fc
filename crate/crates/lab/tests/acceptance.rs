//! Acceptance criteria 1-13. One PASS/FAIL line per criterion; the process
//! exits non-zero when any criterion fails.
//!
//! Criteria 1-12 run with `THREADS` workers. Criterion 13 runs all of them
//! again on one worker and compares the JSON outputs byte for byte.

use std::time::Instant;

use persistence_core::specfun::{cross_check_tolerance, goldman_constant, kappa_tau_closed, oscillating_integral};
use persistence_core::stats::MomentTrend;
use persistence_core::{FunctionalParams, StableParams};
use persistence_lab::identities::{
    check_bingham_supremum, check_fgb, check_kp_inequality, check_positivity_a1, split_report, symmetry_report,
    CheckConfig, Corruption, IdentityReport,
};
use persistence_lab::montecarlo::{
    estimate_survival, estimate_zt_tail, fit_exponent, sample_xi, with_threads, zt_moment_probes, zt_truncations,
    MonteCarloConfig, SurvivalRun, TailEstimate,
};
use persistence_lab::output::{document, to_json};
use persistence_lab::LabResult;
use serde_json::json;

const THREADS: usize = 4;
const SEED: u64 = 20_241;

// Extended-precision value of 𝒦₁ (mpmath, 40 digits).
const GOLDMAN_REFERENCE: f64 = 0.718_238_478_122_552_1;

struct Outcome {
    pass: bool,
    detail: String,
    /// JSON documents produced by the criterion's runs.
    outputs: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String, outputs: Vec<String>) -> Self {
        Self { pass, detail, outputs }
    }
}

fn params(alpha: f64, kappa: f64, chi: f64) -> StableParams {
    StableParams::new(alpha, kappa, chi).expect("valid parameters")
}

fn json_doc(kind: &str, config: &impl serde::Serialize, payload: &impl serde::Serialize) -> String {
    to_json(&document(kind, config, payload).expect("serializable")).expect("serializable")
}

fn survival(
    p: StableParams,
    beta: Option<f64>,
    level: f64,
    paths: usize,
    steps: usize,
    horizon: f64,
) -> LabResult<(SurvivalRun, TailEstimate)> {
    let f = beta
        .map(|b| FunctionalParams::with_grid_default(&p, b, horizon / steps as f64))
        .transpose()?;
    let cfg = MonteCarloConfig::new(p, f, level, paths, steps, horizon, SEED)?;
    let run = estimate_survival(&cfg)?;
    let tail = fit_exponent(&run)?;
    Ok((run, tail))
}

fn theta_line(tail: &TailEstimate, target: f64, band: f64) -> (bool, String) {
    let ok = (tail.theta_hat - target).abs() <= band;
    (
        ok,
        format!(
            "theta_hat {:.4} ± {:.4} (target {target:.4} ± {band}), window t in [{:.1}, {:.1}], resolution {:?}",
            tail.theta_hat,
            tail.theta_stderr,
            tail.t_grid[tail.fit_window.0],
            tail.t_grid[tail.fit_window.1 - 1],
            tail.resolution_check
        ),
    )
}

fn report_line(r: &IdentityReport) -> String {
    format!(
        "{} {:.4} vs {:.4} ({:?}, n {})",
        r.name, r.statistic, r.threshold, r.verdict, r.n_samples
    )
}

// Runs shared by more than one criterion.
struct Shared {
    brownian: (SurvivalRun, TailEstimate),
    stable_positive: (SurvivalRun, TailEstimate),
}

fn shared() -> LabResult<Shared> {
    Ok(Shared {
        brownian: survival(params(2.0, 0.5, 0.0), Some(1.0), 1.0, 200_000, 4096, 400.0)?,
        stable_positive: survival(params(1.5, 1.0, 1.0), Some(1.0), 1.0, 200_000, 4096, 400.0)?,
    })
}

fn criterion_1(s: &Shared) -> LabResult<Outcome> {
    let tail = &s.brownian.1;
    let (ok, detail) = theta_line(tail, 0.25, 0.03);
    let flag = tail.theory_agreement == Some(true);
    Ok(Outcome::new(
        ok && flag,
        format!("{detail}, theory agreement {:?}", tail.theory_agreement),
        vec![json_doc("theta", &s.brownian.0.config, tail)],
    ))
}

fn criterion_2(s: &Shared) -> LabResult<Outcome> {
    let tail = &s.stable_positive.1;
    let (ok, detail) = theta_line(tail, 1.0 / 6.0, 0.04);
    Ok(Outcome::new(
        ok,
        detail,
        vec![json_doc("theta", &s.stable_positive.0.config, tail)],
    ))
}

fn criterion_3() -> LabResult<Outcome> {
    let mut pass = true;
    let mut details = Vec::new();
    let mut outputs = Vec::new();
    for (chi, target, band) in [(0.0, 0.5, 0.03), (-1.0, 2.0 / 3.0, 0.04)] {
        let (run, tail) = survival(params(1.5, 1.0, chi), None, 1.0, 200_000, 4096, 400.0)?;
        let (ok, d) = theta_line(&tail, target, band);
        pass &= ok;
        details.push(format!("chi {chi}: {d}"));
        outputs.push(json_doc("theta", &run.config, &tail));
    }
    Ok(Outcome::new(pass, details.join("; "), outputs))
}

fn criterion_4(s: &Shared) -> LabResult<Outcome> {
    let k1 = goldman_constant();
    let rel_k1 = (k1 / GOLDMAN_REFERENCE - 1.0).abs();
    let prefactors = s.brownian.1.prefactors(0.25);
    let worst = prefactors
        .iter()
        .map(|&(_, c)| (c / k1 - 1.0).abs())
        .fold(0.0, f64::max);
    let pass = rel_k1 <= 1e-12 && worst <= 0.2 && !prefactors.is_empty();
    Ok(Outcome::new(
        pass,
        format!(
            "K1 {k1:.15} (rel error {rel_k1:.1e} vs reference), worst prefactor deviation {:.1}% over {} window points",
            100.0 * worst,
            prefactors.len()
        ),
        vec![json_doc(
            "report",
            &json!({"criterion": 4}),
            &json!({"k1": k1, "prefactors": prefactors}),
        )],
    ))
}

fn criterion_5() -> LabResult<Outcome> {
    let tol = cross_check_tolerance("kappa_tau");
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut all = true;
    for alpha in [1.2, 1.5, 1.8, 2.0] {
        for chi in [-1.0, 0.0, 1.0] {
            for kappa in [0.5, 1.0, 2.0] {
                let r = kappa_tau_closed(&params(alpha, kappa, chi));
                match r.rel_error {
                    Some(e) => worst = worst.max(e),
                    None => all = false,
                }
                count += 1;
            }
        }
    }
    Ok(Outcome::new(
        all && worst <= tol,
        format!("{count} lattice points, worst relative error {worst:.2e} (tolerance {tol:.0e})"),
        Vec::new(),
    ))
}

fn criterion_6() -> LabResult<Outcome> {
    let tol = cross_check_tolerance("oscillating_integral");
    let mut worst: f64 = 0.0;
    let mut all = true;
    for delta in [0.25, 0.5, 2.0 / 3.0, 1.0, 1.5, 1.75] {
        match oscillating_integral(delta)?.rel_error {
            Some(e) => worst = worst.max(e),
            None => all = false,
        }
    }
    Ok(Outcome::new(
        all && worst <= tol,
        format!("6 deltas, worst relative error {worst:.2e} (tolerance {tol:.0e})"),
        Vec::new(),
    ))
}

fn criterion_7() -> LabResult<Outcome> {
    let mut brownian = CheckConfig::new(params(2.0, 0.5, 0.0), -1.0, 20_000, 1 << 14, 16.0, SEED);
    brownian.extension = 64;
    let stable = CheckConfig::new(params(1.5, 1.0, 0.0), -1.0, 20_000, 1 << 14, 16.0, SEED);
    let reports = [check_fgb(&brownian)?, check_fgb(&stable)?];
    Ok(Outcome::new(
        reports.iter().all(IdentityReport::passed),
        reports.iter().map(report_line).collect::<Vec<_>>().join("; "),
        reports.iter().map(|r| json_doc("verify", &r.config, r)).collect(),
    ))
}

fn criterion_8() -> LabResult<Outcome> {
    let brownian = CheckConfig::new(params(2.0, 0.5, 0.0), 1.0, 100_000, 1 << 16, 1.0, SEED);
    let stable = CheckConfig::new(params(1.5, 1.0, -1.0), 1.0, 100_000, 4096, 1.0, SEED);
    let reports = [check_bingham_supremum(&brownian)?, check_bingham_supremum(&stable)?];
    Ok(Outcome::new(
        reports.iter().all(IdentityReport::passed),
        reports.iter().map(report_line).collect::<Vec<_>>().join("; "),
        reports.iter().map(|r| json_doc("verify", &r.config, r)).collect(),
    ))
}

fn criterion_9() -> LabResult<Outcome> {
    let mut reports = Vec::new();
    for (alpha, kappa) in [(1.5, 1.0), (2.0, 0.5)] {
        let cfg = CheckConfig::new(params(alpha, kappa, 1.0), 1.0, 24_000, 1024, 16.0, SEED);
        reports.push(check_kp_inequality(&cfg)?);
    }
    let pass = reports.iter().all(|r| r.passed() && r.n_samples >= 10_000);
    Ok(Outcome::new(
        pass,
        reports.iter().map(report_line).collect::<Vec<_>>().join("; "),
        reports.iter().map(|r| json_doc("verify", &r.config, r)).collect(),
    ))
}

fn criterion_10() -> LabResult<Outcome> {
    let mut cfg = CheckConfig::new(params(1.5, 1.0, 1.0), 1.0, 23_000, 1024, 16.0, SEED);
    cfg.extension = 256;
    let samples = sample_xi(&cfg.xi_config()?)?;
    let clean = symmetry_report(&cfg, &samples)?;
    let shifted = symmetry_report(
        &CheckConfig {
            corruption: Corruption::ShiftXi(0.2),
            ..cfg
        },
        &samples,
    )?;
    let split = split_report(&cfg, &samples)?;
    let doubled = split_report(
        &CheckConfig {
            corruption: Corruption::DoublePositive,
            ..cfg
        },
        &samples,
    )?;
    let pass = clean.passed() && clean.n_samples >= 20_000 && !shifted.passed() && split.passed() && !doubled.passed();
    let reports = [clean, shifted, split, doubled];
    Ok(Outcome::new(
        pass,
        format!(
            "{} [ks {:.4}/{:.4}, probe {:.3} ± {:.3}]; controls must fail: {}",
            report_line(&reports[0]),
            reports[0].diagnostics["ks_statistic"],
            reports[0].diagnostics["ks_critical"],
            reports[0].diagnostics["probe_mean"],
            reports[0].diagnostics["probe_stderr"],
            reports[1..].iter().map(report_line).collect::<Vec<_>>().join("; ")
        ),
        reports.iter().map(|r| json_doc("verify", &r.config, r)).collect(),
    ))
}

fn criterion_11() -> LabResult<Outcome> {
    let mut reports = Vec::new();
    for (alpha, kappa, chi) in [(2.0, 0.5, 0.0), (1.5, 1.0, 1.0), (1.5, 1.0, -0.5)] {
        let cfg = CheckConfig::new(params(alpha, kappa, chi), 1.0, 100_000, 1024, 1.0, SEED);
        reports.push(check_positivity_a1(&cfg)?);
    }
    Ok(Outcome::new(
        reports.iter().all(IdentityReport::passed),
        reports
            .iter()
            .map(|r| {
                format!(
                    "{} (p_hat {:.4}, rho {:.4})",
                    report_line(r),
                    r.diagnostics["p_hat"],
                    r.diagnostics["rho"]
                )
            })
            .collect::<Vec<_>>()
            .join("; "),
        reports.iter().map(|r| json_doc("verify", &r.config, r)).collect(),
    ))
}

fn criterion_12(s: &Shared) -> LabResult<Outcome> {
    let zt = estimate_zt_tail(&s.stable_positive.0)?;
    let tail_ok = zt.exponent >= 0.20;
    let p = params(2.0, 0.5, 0.0);
    let (steps, horizon) = (1 << 16, 400.0);
    let f = FunctionalParams::with_grid_default(&p, 1.0, horizon / steps as f64)?;
    let cfg = MonteCarloConfig::new(p, Some(f), 1e-3, 200_000, steps, horizon, SEED)?;
    let run = estimate_survival(&cfg)?;
    let probes = zt_moment_probes(&run, &[0.4, 0.5], &zt_truncations(&cfg))?;
    let moments_ok = probes[0].trend == MomentTrend::Stabilizing && probes[1].trend == MomentTrend::Diverging;
    Ok(Outcome::new(
        tail_ok && moments_ok,
        format!(
            "Z_T tail exponent {:.3} ± {:.3} (need >= 0.20, {} crossed); Brownian growth slopes k=0.4 {:.3} ({:?}), k=0.5 {:.3} ({:?})",
            zt.exponent,
            zt.exponent_stderr,
            zt.n_crossed,
            probes[0].growth_slope,
            probes[0].trend,
            probes[1].growth_slope,
            probes[1].trend
        ),
        vec![
            json_doc("report", &s.stable_positive.0.config, &zt),
            json_doc("report", &cfg, &probes),
        ],
    ))
}

const TITLES: [&str; 12] = [
    "integrated Brownian motion exponent",
    "spectrally positive stable functional exponent",
    "stable process exponents",
    "Brownian prefactor and K1",
    "kappa_tau closed form vs quadrature",
    "oscillating integral closed form vs quadrature",
    "FGB characteristic function",
    "supremum tails",
    "key inequality",
    "symmetry of xi_1 with negative controls",
    "positivity of A^(1)",
    "Z_T tail and moment criterion",
];

fn evaluate(threads: usize) -> Vec<(Result<Outcome, String>, f64)> {
    let timed = |f: &(dyn Fn() -> LabResult<Outcome> + Sync)| {
        let start = Instant::now();
        let r = with_threads(threads, f).and_then(|r| r).map_err(|e| e.to_string());
        (r, start.elapsed().as_secs_f64())
    };
    let start = Instant::now();
    let shared = with_threads(threads, shared).and_then(|r| r);
    let shared_secs = start.elapsed().as_secs_f64();
    let with_shared = |f: fn(&Shared) -> LabResult<Outcome>| match &shared {
        Ok(s) => timed(&|| f(s)),
        Err(e) => (Err(e.to_string()), 0.0),
    };
    let mut out = vec![
        with_shared(criterion_1),
        with_shared(criterion_2),
        timed(&criterion_3),
        with_shared(criterion_4),
        timed(&criterion_5),
        timed(&criterion_6),
        timed(&criterion_7),
        timed(&criterion_8),
        timed(&criterion_9),
        timed(&criterion_10),
        timed(&criterion_11),
        with_shared(criterion_12),
    ];
    // the shared runs are charged to the first criterion using each
    out[0].1 += shared_secs;
    out
}

fn main() {
    let mut failed = 0;
    let first = evaluate(THREADS);
    for (i, (outcome, secs)) in first.iter().enumerate() {
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass, o.detail.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2}: {} {} ({:.0} s): {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            TITLES[i],
            secs
        );
    }

    let start = Instant::now();
    let second = evaluate(1);
    let mismatched: Vec<usize> = first
        .iter()
        .zip(&second)
        .enumerate()
        .filter(|(_, ((a, _), (b, _)))| match (a, b) {
            (Ok(a), Ok(b)) => a.outputs != b.outputs || a.detail != b.detail,
            (Err(a), Err(b)) => a != b,
            _ => true,
        })
        .map(|(i, _)| i + 1)
        .collect();
    let n_docs: usize = first
        .iter()
        .filter_map(|(o, _)| o.as_ref().ok())
        .map(|o| o.outputs.len())
        .sum();
    let pass = mismatched.is_empty();
    failed += usize::from(!pass);
    println!(
        "criterion 13: {} determinism ({:.0} s): {n_docs} JSON documents and all detail lines from criteria 1-12 at {THREADS} threads vs 1 thread{}",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        if pass {
            ", byte-identical".to_string()
        } else {
            format!(", differing criteria {mismatched:?}")
        }
    );
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
