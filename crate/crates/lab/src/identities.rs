//! Statistical checks of distributional identities and pathwise
//! inequalities. Each check returns an [`IdentityReport`] whose verdict is
//! `pass` exactly when its statistic is at most its threshold.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use persistence_core::functionals::{default_bandwidth, default_jump_threshold, FunctionalParams};
use persistence_core::kernels::{excursion_kernel, path_summary, Grid};
use persistence_core::specfun::theorem_a_constant;
use persistence_core::stable::{sample_stable, simulate_path};
use persistence_core::stats::{binomial_stderr, mean_stderr, stopped_charfn, KsTest};
use persistence_core::tail::{fit_exponent, log_grid, natural_time_scale, SurvivalCurve};
use persistence_core::{RngStream, StableParams};
use serde::Serialize;

use crate::error::{LabError, LabResult};
use crate::montecarlo::{map_paths, sample_xi, split_failures, XiConfig, XiSamples, MAX_CENSORED_FRACTION};

/// Level of every two-sample KS test.
pub const KS_LEVEL: f64 = 0.01;
pub const FGB_LAMBDAS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
pub const FGB_THRESHOLD_BROWNIAN: f64 = 0.05;
pub const FGB_THRESHOLD_STABLE: f64 = 0.08;
pub const KP_THRESHOLD: f64 = 1e-3;
/// Censored fraction above which the key-inequality check is inconclusive.
pub const KP_MAX_CENSORED: f64 = 0.5;
pub const BINGHAM_X: [f64; 3] = [0.5, 1.0, 2.0];
/// Number of standard errors tolerated by the Bingham, positivity and
/// joint-probe comparisons.
pub const Z_THRESHOLD: f64 = 3.0;
pub const TAUBERIAN_TOLERANCE: f64 = 0.05;
pub const TAUBERIAN_PREFACTOR_TOLERANCE: f64 = 0.25;
/// Single-increment samples per path in the Bingham check.
pub const BINGHAM_SINGLE_PER_PATH: usize = 10;

// Stream ids at and above this value are reserved for draws that are not
// paths (single increments), so they never overlap a path stream.
const AUX_STREAM_BASE: u64 = 1 << 63;
const SINGLE_CHUNK: usize = 4096;
const JUMP_DIAGNOSTIC_PATHS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "amount")]
pub enum Corruption {
    None,
    /// Adds a constant to every `ξ₁` sample.
    ShiftXi(f64),
    /// Doubles the integrand on `{Z > 0}`.
    DoublePositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckConfig {
    pub params: StableParams,
    pub beta: f64,
    /// Level of `A^(β)` for passage checks, local time `t` for `ξ_t` checks.
    pub level: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    /// Paths run up to `extension × horizon` where a stopping time may be late.
    pub extension: usize,
    pub seed: u64,
    pub pv_epsilon: Option<f64>,
    pub bandwidth: Option<f64>,
    pub corruption: Corruption,
}

impl CheckConfig {
    pub fn new(params: StableParams, beta: f64, n_paths: usize, n_steps: usize, horizon: f64, seed: u64) -> Self {
        Self {
            params,
            beta,
            level: 1.0,
            n_paths,
            n_steps,
            horizon,
            extension: 16,
            seed,
            pv_epsilon: None,
            bandwidth: None,
            corruption: Corruption::None,
        }
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn grid(&self) -> LabResult<Grid> {
        Ok(Grid::new(self.horizon, self.n_steps)?)
    }

    pub fn fparams(&self) -> LabResult<FunctionalParams> {
        Ok(match self.pv_epsilon {
            Some(eps) => FunctionalParams::new(&self.params, self.beta, eps)?,
            None => FunctionalParams::with_grid_default(&self.params, self.beta, self.dt())?,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
            .unwrap_or_else(|| default_bandwidth(&self.params, self.dt()))
    }

    fn max_steps(&self) -> usize {
        self.n_steps.saturating_mul(self.extension.max(1))
    }

    pub fn xi_config(&self) -> LabResult<XiConfig> {
        self.grid()?;
        Ok(XiConfig {
            params: self.params,
            fparams: self.fparams()?,
            local_time: self.level,
            n_paths: self.n_paths,
            n_steps: self.n_steps,
            horizon: self.horizon,
            extension: self.extension,
            bandwidth: self.bandwidth(),
            seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub n_samples: usize,
    /// Reported for information only; never counts as a failure.
    pub exploratory: bool,
    pub config: CheckConfig,
    pub diagnostics: BTreeMap<String, f64>,
    pub note: Option<String>,
}

impl IdentityReport {
    fn new(name: &str, statistic: f64, threshold: f64, n_samples: usize, config: &CheckConfig) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            verdict: if statistic <= threshold {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            n_samples,
            exploratory: false,
            config: *config,
            diagnostics: BTreeMap::new(),
            note: None,
        }
    }

    fn inconclusive(name: &str, threshold: f64, n_samples: usize, config: &CheckConfig, note: String) -> Self {
        Self {
            verdict: Verdict::Inconclusive,
            note: Some(note),
            ..Self::new(name, f64::NAN, threshold, n_samples, config)
        }
    }

    fn diag(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.into(), value);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn usage(msg: &str) -> LabError {
    LabError::Usage(msg.into())
}

fn censoring_note(fraction: f64, max: f64) -> String {
    format!("censored fraction {fraction:.3} above {max}")
}

/// `ξ₁` samples after the configured corruption.
fn corrupted_xi(config: &CheckConfig, samples: &XiSamples) -> Vec<f64> {
    samples
        .values
        .iter()
        .map(|v| match config.corruption {
            Corruption::None => v.xi,
            Corruption::ShiftXi(s) => v.xi + s,
            Corruption::DoublePositive => 2.0 * v.plus - v.minus,
        })
        .collect()
}

// Independent halves: the first half of the paths against the second.
fn halves<T>(v: &[T]) -> (&[T], &[T]) {
    let m = v.len() / 2;
    (&v[..m], &v[m..2 * m])
}

/// `(τ₁, ξ₁)` against `(τ₁, −ξ₁)`: KS between `ξ₁` on the first half of the
/// paths and `−ξ₁` on the second half, and the odd probe
/// `E[τ₁·sgn(ξ₁)·min(|ξ₁|, 1)]`. The statistic is the larger of `D/D_crit`
/// and `|probe|/(3·stderr)`, with threshold 1.
pub fn check_symmetry_lemma(config: &CheckConfig) -> LabResult<IdentityReport> {
    let samples = sample_xi(&config.xi_config()?)?;
    symmetry_report(config, &samples)
}

pub fn symmetry_report(config: &CheckConfig, samples: &XiSamples) -> LabResult<IdentityReport> {
    const NAME: &str = "symmetry";
    let n = samples.values.len();
    let censored = samples.censored_fraction();
    if censored > MAX_CENSORED_FRACTION {
        return Ok(IdentityReport::inconclusive(
            NAME,
            1.0,
            n,
            config,
            censoring_note(censored, MAX_CENSORED_FRACTION),
        ));
    }
    let xi = corrupted_xi(config, samples);
    let (a, b) = halves(&xi);
    let b: Vec<f64> = b.iter().map(|x| -x).collect();
    let ks = KsTest::run(a, &b, KS_LEVEL)?;
    let probe: Vec<f64> = samples
        .values
        .iter()
        .zip(&xi)
        .map(|(v, x)| v.tau * x.signum() * x.abs().min(1.0))
        .collect();
    let (mean, se) = mean_stderr(&probe)?;
    let statistic = (ks.statistic / ks.critical).max(mean.abs() / (Z_THRESHOLD * se));
    Ok(IdentityReport::new(NAME, statistic, 1.0, n, config)
        .diag("ks_statistic", ks.statistic)
        .diag("ks_critical", ks.critical)
        .diag("probe_mean", mean)
        .diag("probe_stderr", se)
        .diag("censored_fraction", censored))
}

/// KS between `ξ⁺₁` on the first half of the paths and `ξ⁻₁` on the second.
/// Also reports the fraction of excursions that move both parts at once.
pub fn check_xi_split_symmetry(config: &CheckConfig) -> LabResult<IdentityReport> {
    if !(config.beta > -1.0) {
        return Err(usage("the split check needs beta > -1"));
    }
    let samples = sample_xi(&config.xi_config()?)?;
    split_report(config, &samples)
}

pub fn split_report(config: &CheckConfig, samples: &XiSamples) -> LabResult<IdentityReport> {
    const NAME: &str = "split";
    let n = samples.values.len();
    let censored = samples.censored_fraction();
    if censored > MAX_CENSORED_FRACTION {
        let note = censoring_note(censored, MAX_CENSORED_FRACTION);
        return Ok(IdentityReport::inconclusive(NAME, f64::NAN, n, config, note));
    }
    let scale = if config.corruption == Corruption::DoublePositive {
        2.0
    } else {
        1.0
    };
    let (a, b) = halves(&samples.values);
    let plus: Vec<f64> = a.iter().map(|v| scale * v.plus).collect();
    let minus: Vec<f64> = b.iter().map(|v| v.minus).collect();
    let ks = KsTest::run(&plus, &minus, KS_LEVEL)?;
    Ok(IdentityReport::new(NAME, ks.statistic, ks.critical, n, config)
        .diag("censored_fraction", censored)
        .diag("jump_coincidence", jump_coincidence(config)?))
}

/// Fraction of zero-to-zero excursions on the grid during which both the
/// positive and the negative part of the functional grow. Zero visits are
/// sign changes by at most the jump threshold, as in the excursion tracker.
fn jump_coincidence(config: &CheckConfig) -> LabResult<f64> {
    let integrand = config.fparams()?.integrand();
    let threshold = default_jump_threshold(&config.params, config.dt());
    let n = config.n_paths.min(JUMP_DIAGNOSTIC_PATHS);
    let results = map_paths(n, |i| {
        let path = simulate_path(
            &config.params,
            config.horizon,
            config.n_steps,
            RngStream::new(config.seed, i),
        )?;
        let z = path.values();
        let (mut both, mut total) = (0u64, 0u64);
        let (mut pos, mut neg) = (false, false);
        for w in z.windows(2) {
            let g = integrand.eval(w[0]);
            pos |= g > 0.0;
            neg |= g < 0.0;
            if (w[0] >= 0.0) != (w[1] >= 0.0) && (w[1] - w[0]).abs() <= threshold {
                if pos || neg {
                    total += 1;
                    both += u64::from(pos && neg);
                }
                pos = false;
                neg = false;
            }
        }
        Ok((both, total))
    });
    let (counts, _) = split_failures(results)?;
    let (both, total) = counts.iter().fold((0, 0), |(b, t), (x, y)| (b + x, t + y));
    Ok(if total == 0 { 0.0 } else { both as f64 / total as f64 })
}

/// Empirical characteristic function of `ξ_t` (with censored paths
/// handled by optional stopping) against `e^{−πt|λ|}`. The statistic is the
/// largest real-part deviation; an imaginary part more than 3 stderr from 0
/// raises it to `threshold × |im|/(3·stderr)`.
pub fn check_fgb(config: &CheckConfig) -> LabResult<IdentityReport> {
    const NAME: &str = "fgb";
    if config.beta != -1.0 {
        return Err(usage("the FGB check needs beta = -1"));
    }
    let threshold = if config.params.is_gaussian() {
        FGB_THRESHOLD_BROWNIAN
    } else {
        FGB_THRESHOLD_STABLE
    };
    let samples = sample_xi(&config.xi_config()?)?;
    let n = samples.values.len() + samples.censored.len();
    let censored = samples.censored_fraction();
    if censored > MAX_CENSORED_FRACTION {
        let note = censoring_note(censored, MAX_CENSORED_FRACTION);
        return Ok(IdentityReport::inconclusive(NAME, threshold, n, config, note));
    }
    let shift = match config.corruption {
        Corruption::ShiftXi(s) => s,
        _ => 0.0,
    };
    let stopped: Vec<(f64, f64)> = samples
        .stopped(config.level)
        .into_iter()
        .map(|(s, x)| (s, x + shift))
        .collect();
    let charfn = stopped_charfn(&stopped, &FGB_LAMBDAS)?;
    let mut report_pts = BTreeMap::new();
    let mut dev: f64 = 0.0;
    let mut im_z: f64 = 0.0;
    for pt in &charfn {
        let want = (-PI * config.level * pt.lambda).exp();
        dev = dev.max((pt.re - want).abs());
        if pt.stderr_im > 0.0 {
            im_z = im_z.max(pt.im.abs() / pt.stderr_im);
        }
        report_pts.insert(format!("re_at_{}", pt.lambda), pt.re);
        report_pts.insert(format!("im_at_{}", pt.lambda), pt.im);
    }
    let statistic = dev.max(threshold * im_z / Z_THRESHOLD);
    let mut report = IdentityReport::new(NAME, statistic, threshold, n, config)
        .diag("max_re_deviation", dev)
        .diag("max_im_z", im_z)
        .diag("censored_fraction", censored);
    report.diagnostics.extend(report_pts);
    Ok(report)
}

/// Tail of `sup_{[0,1]} Z` against `α` times the tail of `Z₁` at
/// [`BINGHAM_X`]. The statistic is the largest deviation in pooled stderr.
/// `Z₁` is drawn directly, `BINGHAM_SINGLE_PER_PATH` draws per path.
pub fn check_bingham_supremum(config: &CheckConfig) -> LabResult<IdentityReport> {
    let p = &config.params;
    if !(p.is_gaussian() || p.no_positive_jumps()) {
        return Err(usage("the Bingham check needs alpha = 2 or chi = -1"));
    }
    let n = config.n_paths;
    let grid = Grid::new(1.0, config.n_steps)?;
    // the functional is not used; β = 1 keeps the per-step work minimal
    let fparams = FunctionalParams::new(p, 1.0, 0.0)?;
    let (sups, failed) = split_failures(map_paths(n, |i| {
        path_summary(p, &fparams, grid, RngStream::new(config.seed, i)).map(|s| s.z_sup)
    }))?;
    let n_single = n * BINGHAM_SINGLE_PER_PATH;
    let chunks = n_single.div_ceil(SINGLE_CHUNK);
    let mut singles = Vec::with_capacity(n_single);
    for chunk in map_paths(chunks, |c| {
        let len = SINGLE_CHUNK.min(n_single - c as usize * SINGLE_CHUNK);
        sample_stable(p, len, RngStream::new(config.seed, AUX_STREAM_BASE + c))
    }) {
        singles.extend(chunk?);
    }
    let alpha = p.alpha();
    let ns = sups.len() as u64;
    let nz = singles.len() as u64;
    let mut report = IdentityReport::new("bingham", 0.0, Z_THRESHOLD, sups.len(), config);
    let mut worst: f64 = 0.0;
    for x in BINGHAM_X {
        let ps = sups.iter().filter(|&&s| s >= x).count() as f64 / ns as f64;
        let pz = singles.iter().filter(|&&z| z >= x).count() as f64 / nz as f64;
        let se = binomial_stderr(ps, ns).hypot(alpha * binomial_stderr(pz, nz));
        let dev = ps - alpha * pz;
        worst = worst.max(if se > 0.0 { dev.abs() / se } else { f64::INFINITY });
        report.diagnostics.insert(format!("deviation_at_{x}"), dev);
        report.diagnostics.insert(format!("stderr_at_{x}"), se);
    }
    let mass = alpha * singles.iter().filter(|&&z| z >= 0.0).count() as f64 / nz as f64;
    report.statistic = worst;
    report.verdict = if worst <= Z_THRESHOLD {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(report.diag("total_mass", mass).diag("failed_paths", failed as f64))
}

/// Fraction of crossed paths with `T < τ_{Θ−} − 2Δ`. With negative jumps
/// the check runs as an exploratory control.
pub fn check_kp_inequality(config: &CheckConfig) -> LabResult<IdentityReport> {
    const NAME: &str = "kp";
    if config.beta < 0.0 {
        return Err(usage("the key-inequality check needs beta >= 0"));
    }
    let passages = excursions(config)?;
    let dt = config.dt();
    let mut crossed = 0usize;
    let mut violations = 0usize;
    for e in &passages {
        if let (Some(t), Some(start)) = (e.passage, e.tau_theta_minus) {
            crossed += 1;
            violations += usize::from(t < start - 2.0 * dt);
        }
    }
    let censored = 1.0 - crossed as f64 / passages.len() as f64;
    let mut report = if censored > KP_MAX_CENSORED {
        IdentityReport::inconclusive(
            NAME,
            KP_THRESHOLD,
            crossed,
            config,
            censoring_note(censored, KP_MAX_CENSORED),
        )
    } else {
        IdentityReport::new(NAME, violations as f64 / crossed as f64, KP_THRESHOLD, crossed, config)
    };
    if !config.params.no_negative_jumps() {
        report.exploratory = true;
        report.note = Some("negative jumps present: control run, reported only".into());
    }
    Ok(report
        .diag("violations", violations as f64)
        .diag("censored_fraction", censored))
}

fn excursions(config: &CheckConfig) -> LabResult<Vec<persistence_core::functionals::ExcursionPassage>> {
    let fparams = config.fparams()?;
    let dt = config.dt();
    let threshold = default_jump_threshold(&config.params, dt);
    let max_steps = config.max_steps();
    let (out, _) = split_failures(map_paths(config.n_paths, |i| {
        excursion_kernel(
            &config.params,
            &fparams,
            dt,
            config.level,
            threshold,
            max_steps,
            RngStream::new(config.seed, i),
        )
    }))?;
    Ok(out)
}

/// Exponent of `P[τ_Θ > t]` against `γ/2`; when the tail constant is known
/// in closed form, the mean of `t^{γ/2} P̂` over the fit window is also
/// compared with it. The statistic is the larger of `|θ̂ − γ/2|` and the
/// relative prefactor error scaled onto the exponent tolerance.
pub fn check_tauberian_tail(config: &CheckConfig) -> LabResult<IdentityReport> {
    const NAME: &str = "tauberian";
    let p = &config.params;
    if !(p.is_gaussian() || p.no_negative_jumps()) {
        return Err(usage("the Tauberian check needs alpha = 2 or chi = 1"));
    }
    let fparams = config.fparams()?;
    let times: Vec<Option<f64>> = excursions(config)?.iter().map(|e| e.tau_theta).collect();
    let cap = config.horizon * config.extension.max(1) as f64;
    let t_grid = log_grid(10.0 * config.dt(), cap, 40)?;
    let curve = SurvivalCurve::from_times(t_grid.clone(), &times)?;
    let t_min = natural_time_scale(p, Some(&fparams), config.level);
    let fit = match fit_exponent(&curve, t_min) {
        Ok(f) => f,
        Err(e) => {
            return Ok(IdentityReport::inconclusive(
                NAME,
                TAUBERIAN_TOLERANCE,
                times.len(),
                config,
                e.to_string(),
            ))
        }
    };
    let target = p.subordinator_index() / 2.0;
    let mut statistic = (fit.theta_hat - target).abs();
    let p_hat = curve.p_hat();
    let window = fit.fit_window.0..fit.fit_window.1;
    let prefactor = window.clone().map(|i| t_grid[i].powf(target) * p_hat[i]).sum::<f64>() / window.len() as f64;
    let mut report = IdentityReport::new(NAME, 0.0, TAUBERIAN_TOLERANCE, times.len(), config)
        .diag("theta_hat", fit.theta_hat)
        .diag("theta_stderr", fit.theta_stderr)
        .diag("theta_target", target)
        .diag("prefactor", prefactor);
    if let Some(c) = theorem_a_constant(p, &fparams).value() {
        let rel = prefactor / c - 1.0;
        statistic = statistic.max(TAUBERIAN_TOLERANCE * rel.abs() / TAUBERIAN_PREFACTOR_TOLERANCE);
        report = report.diag("tail_constant", c).diag("prefactor_rel_error", rel);
    }
    report.statistic = statistic;
    report.verdict = if statistic <= TAUBERIAN_TOLERANCE {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(report)
}

/// `P̂[A^(1)_1 > 0]` against `ρ`, in binomial stderr at `ρ`.
pub fn check_positivity_a1(config: &CheckConfig) -> LabResult<IdentityReport> {
    if config.beta != 1.0 {
        return Err(usage("the positivity check needs beta = 1"));
    }
    let fparams = config.fparams()?;
    let grid = Grid::new(1.0, config.n_steps)?;
    let (values, failed) = split_failures(map_paths(config.n_paths, |i| {
        path_summary(&config.params, &fparams, grid, RngStream::new(config.seed, i)).map(|s| s.functional)
    }))?;
    let n = values.len() as u64;
    let p_hat = values.iter().filter(|&&a| a > 0.0).count() as f64 / n as f64;
    let rho = config.params.rho();
    let statistic = (p_hat - rho).abs() / binomial_stderr(rho, n);
    Ok(
        IdentityReport::new("positivity", statistic, Z_THRESHOLD, values.len(), config)
            .diag("p_hat", p_hat)
            .diag("rho", rho)
            .diag("failed_paths", failed as f64),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Symmetry,
    Fgb,
    Bingham,
    Kp,
    Tauberian,
    Positivity,
    Split,
}

impl std::str::FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> LabResult<Self> {
        Ok(match s {
            "all" => Self::All,
            "symmetry" => Self::Symmetry,
            "fgb" => Self::Fgb,
            "bingham" => Self::Bingham,
            "kp" => Self::Kp,
            "tauberian" => Self::Tauberian,
            "positivity" => Self::Positivity,
            "split" => Self::Split,
            other => {
                return Err(usage(&format!(
                    "unknown suite {other:?} (expected all, symmetry, fgb, bingham, kp, tauberian, positivity or split)"
                )))
            }
        })
    }
}

impl Suite {
    const EACH: [Suite; 7] = [
        Self::Symmetry,
        Self::Split,
        Self::Fgb,
        Self::Bingham,
        Self::Kp,
        Self::Tauberian,
        Self::Positivity,
    ];

    fn applies(self, c: &CheckConfig) -> bool {
        let p = &c.params;
        match self {
            Self::All | Self::Symmetry => true,
            Self::Split => c.beta > -1.0,
            Self::Fgb => c.beta == -1.0,
            Self::Bingham => p.is_gaussian() || p.no_positive_jumps(),
            Self::Kp => c.beta >= 0.0,
            Self::Tauberian => p.is_gaussian() || p.no_negative_jumps(),
            Self::Positivity => c.beta == 1.0,
        }
    }

    fn run(self, c: &CheckConfig) -> LabResult<Vec<IdentityReport>> {
        Ok(vec![match self {
            Self::All => return run_suite(self, c),
            Self::Symmetry => check_symmetry_lemma(c)?,
            Self::Split => check_xi_split_symmetry(c)?,
            Self::Fgb => check_fgb(c)?,
            Self::Bingham => check_bingham_supremum(c)?,
            Self::Kp => check_kp_inequality(c)?,
            Self::Tauberian => check_tauberian_tail(c)?,
            Self::Positivity => check_positivity_a1(c)?,
        }])
    }
}

/// Runs one check, or with [`Suite::All`] every check whose preconditions
/// hold for the configuration.
pub fn run_suite(suite: Suite, config: &CheckConfig) -> LabResult<Vec<IdentityReport>> {
    if suite != Suite::All {
        return suite.run(config);
    }
    let mut out = Vec::new();
    for s in Suite::EACH.into_iter().filter(|s| s.applies(config)) {
        out.extend(s.run(config)?);
    }
    Ok(out)
}
