//! Many-path runs: survival curves and their exponents, the law of `Z_T`,
//! samples of `ξ₁` and the empirical scaling constant `κ_ξ`.
//!
//! Path `i` always draws from the stream `(seed, i)` and results are
//! collected in path order, so output does not depend on the number of
//! worker threads.

use persistence_core::functionals::{FunctionalParams, XiValue};
use persistence_core::kernels::{two_grid_passage, xi_at_local_time, Grid, TwoGridPassage, XiOutcome};
use persistence_core::stats::{moment_probe, stopped_charfn, weighted_line, CharfnPoint, MomentProbe};
use persistence_core::tail::{
    fit_exponent as fit_curve, fit_on_window, log_grid, natural_time_scale, theoretical_theta, PassageKind,
    ResolutionCheck, SurvivalCurve,
};
use persistence_core::{Error, RngStream, StableParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, LabResult};

/// Runs `f` on a dedicated pool of `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> LabResult<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}

/// Maps `f` over path indices `0..n` in parallel, keeping index order.
pub fn map_paths<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Largest tolerated fraction of numerically failed paths.
pub const MAX_FAILED_FRACTION: f64 = 1e-3;

/// Separates numerically failed paths from the rest; any other error is
/// returned as is.
pub fn split_failures<T>(results: Vec<Result<T, Error>>) -> LabResult<(Vec<T>, usize)> {
    let n = results.len();
    let mut ok = Vec::with_capacity(n);
    let mut failed = 0;
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(Error::NonFinite(_)) => failed += 1,
            Err(e) => return Err(e.into()),
        }
    }
    if failed as f64 > MAX_FAILED_FRACTION * n as f64 {
        return Err(LabError::NumericFailures { failed, n_paths: n });
    }
    Ok((ok, failed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloConfig {
    pub params: StableParams,
    /// `None` stops `Z` itself at the level.
    pub fparams: Option<FunctionalParams>,
    pub level: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    pub seed: u64,
    pub t_grid: Vec<f64>,
}

/// Grid points per decade of the default time grid.
pub const GRID_PER_DECADE: f64 = 10.0;

impl MonteCarloConfig {
    pub fn new(
        params: StableParams,
        fparams: Option<FunctionalParams>,
        level: f64,
        n_paths: usize,
        n_steps: usize,
        horizon: f64,
        seed: u64,
    ) -> LabResult<Self> {
        let grid = Grid::new(horizon, n_steps)?;
        let t_grid = default_t_grid(grid)?;
        Self::with_t_grid(params, fparams, level, n_paths, n_steps, horizon, seed, t_grid)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_t_grid(
        params: StableParams,
        fparams: Option<FunctionalParams>,
        level: f64,
        n_paths: usize,
        n_steps: usize,
        horizon: f64,
        seed: u64,
        t_grid: Vec<f64>,
    ) -> LabResult<Self> {
        Grid::new(horizon, n_steps)?;
        let bad = |m: &str| Err(LabError::Config(m.into()));
        if !(level > 0.0 && level.is_finite()) {
            return bad("level must be positive and finite");
        }
        if n_paths < 100 {
            return bad("n_paths must be at least 100");
        }
        if !n_steps.is_multiple_of(2) {
            return bad("n_steps must be even (the coarse grid keeps every second point)");
        }
        if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(t_grid[0] > 0.0) {
            return bad("t_grid must be positive and strictly increasing");
        }
        if t_grid[t_grid.len() - 1] > horizon {
            return bad("t_grid must end at or before the horizon");
        }
        if let Some(f) = &fparams {
            FunctionalParams::new(&params, f.beta(), f.pv_epsilon())?;
        }
        Ok(Self {
            params,
            fparams,
            level,
            n_paths,
            n_steps,
            horizon,
            seed,
            t_grid,
        })
    }

    pub fn grid(&self) -> Grid {
        Grid {
            horizon: self.horizon,
            n_steps: self.n_steps,
        }
    }

    pub fn kind(&self) -> PassageKind {
        if self.fparams.is_some() {
            PassageKind::Functional
        } else {
            PassageKind::Process
        }
    }

    /// Start of the fit range: ten times the time the stopped quantity
    /// needs to reach the level.
    pub fn transient_cutoff(&self) -> f64 {
        10.0 * natural_time_scale(&self.params, self.fparams.as_ref(), self.level)
    }
}

/// Log-spaced grid from `max(2Δ, horizon/1000)` to the horizon.
pub fn default_t_grid(grid: Grid) -> LabResult<Vec<f64>> {
    let lo = (2.0 * grid.dt()).max(grid.horizon * 1e-3);
    let decades = (grid.horizon / lo).log10();
    let n = ((decades * GRID_PER_DECADE).round() as usize + 1).max(2);
    Ok(log_grid(lo, grid.horizon, n)?)
}

/// Raw passage data of a run at both grid resolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalRun {
    pub config: MonteCarloConfig,
    pub fine: SurvivalCurve,
    pub coarse: SurvivalCurve,
    /// Fine-grid passage times in path order (`None` = censored).
    pub times: Vec<Option<f64>>,
    /// `Z` at the passage bracket of every crossed path.
    pub z_at_passage: Vec<f64>,
    pub failed_paths: usize,
}

pub fn passages(config: &MonteCarloConfig) -> LabResult<(Vec<TwoGridPassage>, usize)> {
    let grid = config.grid();
    let results = map_paths(config.n_paths, |i| {
        two_grid_passage(
            &config.params,
            config.fparams.as_ref(),
            config.level,
            grid,
            RngStream::new(config.seed, i),
        )
    });
    split_failures(results)
}

/// Empirical `P[T > t]` on the configured grid, at both resolutions.
pub fn estimate_survival(config: &MonteCarloConfig) -> LabResult<SurvivalRun> {
    let (runs, failed_paths) = passages(config)?;
    let times: Vec<Option<f64>> = runs.iter().map(|r| r.fine).collect();
    let coarse: Vec<Option<f64>> = runs.iter().map(|r| r.coarse).collect();
    Ok(SurvivalRun {
        fine: SurvivalCurve::from_times(config.t_grid.clone(), &times)?,
        coarse: SurvivalCurve::from_times(config.t_grid.clone(), &coarse)?,
        z_at_passage: runs.iter().filter_map(|r| r.z_at_passage).collect(),
        times,
        config: config.clone(),
        failed_paths,
    })
}

/// Largest distance of `θ̂` from the theoretical value counted as agreement.
pub const THEORY_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Passed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub t_grid: Vec<f64>,
    pub survivors: Vec<u64>,
    pub n_paths: u64,
    pub survival: Vec<f64>,
    pub stderr: Vec<f64>,
    pub t_min: f64,
    pub theta_hat: f64,
    pub theta_stderr: f64,
    pub intercept: f64,
    pub fit_window: (usize, usize),
    pub resolution_check: Resolution,
    pub coarse_theta_hat: Option<f64>,
    pub coarse_theta_stderr: Option<f64>,
    pub theoretical_theta: Option<f64>,
    pub theory_agreement: Option<bool>,
    /// Set when theory makes no prediction for this configuration.
    pub exploratory: bool,
    pub failed_paths: usize,
}

impl TailEstimate {
    /// `t^{θ} P̂[T > t]` over the fit window, with `θ` fixed by the caller.
    pub fn prefactors(&self, theta: f64) -> Vec<(f64, f64)> {
        (self.fit_window.0..self.fit_window.1)
            .map(|i| (self.t_grid[i], self.t_grid[i].powf(theta) * self.survival[i]))
            .collect()
    }
}

/// Fits the exponent on the fine curve, then refits the coarse curve on
/// the same window for the two-resolution check.
pub fn fit_exponent(run: &SurvivalRun) -> LabResult<TailEstimate> {
    let t_min = run.config.transient_cutoff();
    let fine = fit_curve(&run.fine, t_min)?;
    let coarse = fit_on_window(&run.coarse, fine.fit_window).ok();
    let resolution_check = match coarse {
        Some(c) if ResolutionCheck::new(fine, c).passed => Resolution::Passed,
        _ => Resolution::Failed,
    };
    let theory = theoretical_theta(&run.config.params, run.config.kind());
    Ok(TailEstimate {
        t_grid: run.fine.t_grid.clone(),
        survivors: run.fine.survivors.iter().map(|&s| s as u64).collect(),
        n_paths: run.fine.n_paths,
        survival: run.fine.p_hat(),
        stderr: run.fine.stderr(),
        t_min,
        theta_hat: fine.theta_hat,
        theta_stderr: fine.theta_stderr,
        intercept: fine.intercept,
        fit_window: fine.fit_window,
        resolution_check,
        coarse_theta_hat: coarse.map(|c| c.theta_hat),
        coarse_theta_stderr: coarse.map(|c| c.theta_stderr),
        theoretical_theta: theory,
        theory_agreement: theory.map(|t| (fine.theta_hat - t).abs() <= THEORY_TOLERANCE),
        exploratory: theory.is_none(),
        failed_paths: run.failed_paths,
    })
}

/// Minimum number of crossed paths for the `Z_T` tail.
pub const MIN_CROSSED: usize = 1_000;

/// Tolerance below `(α−1)/2` still counted as consistent with the bound.
pub const ZT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZtTail {
    pub u_grid: Vec<f64>,
    pub survivors: Vec<u64>,
    pub n_crossed: u64,
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub fit_window: (usize, usize),
    /// `(α−1)/2`.
    pub bound: f64,
    pub consistent: bool,
}

/// Tail exponent of `P[Z_T > u]` over crossed paths.
pub fn estimate_zt_tail(run: &SurvivalRun) -> LabResult<ZtTail> {
    let params = &run.config.params;
    let beta_ok = run.config.fparams.is_some_and(|f| f.beta() >= 0.0);
    if !params.no_negative_jumps() || !beta_ok {
        return Err(LabError::Usage(
            "the Z_T tail needs a process without negative jumps and beta >= 0".into(),
        ));
    }
    let z = &run.z_at_passage;
    if z.len() < MIN_CROSSED {
        return Err(LabError::Insufficient(format!(
            "{} crossed paths, need {MIN_CROSSED}",
            z.len()
        )));
    }
    let mut sorted: Vec<f64> = z.iter().copied().filter(|v| *v > 0.0).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    // keep at least MIN_SURVIVORS values above the top of the grid
    let top = sorted[sorted.len().saturating_sub(31)];
    let u_grid = log_grid(median, top.max(2.0 * median), 30)?;
    let times: Vec<Option<f64>> = z.iter().map(|&v| Some(v)).collect();
    let curve = SurvivalCurve::from_times(u_grid.clone(), &times)?;
    let fit = fit_curve(&curve, median)?;
    let bound = (params.alpha() - 1.0) / 2.0;
    Ok(ZtTail {
        u_grid,
        survivors: curve.survivors.iter().map(|&s| s as u64).collect(),
        n_crossed: z.len() as u64,
        exponent: fit.theta_hat,
        exponent_stderr: fit.theta_stderr,
        fit_window: fit.fit_window,
        bound,
        consistent: fit.theta_hat >= bound - ZT_TOLERANCE,
    })
}

/// Doubling truncation levels `m₀ 2^j` up to `m_max`.
pub fn doubling(m0: f64, m_max: f64) -> Vec<f64> {
    let mut out = vec![m0];
    while out[out.len() - 1] * 2.0 <= m_max * (1.0 + 1e-12) {
        out.push(out[out.len() - 1] * 2.0);
    }
    out
}

/// Growth slope below which a truncated moment of `Z_T` counts as
/// stabilizing: halfway between the `k − 1/2` slopes at `k = 0.4` and
/// `k = 0.5` for Brownian motion.
pub const ZT_MOMENT_THRESHOLD: f64 = -0.05;

/// Truncation levels for the `Z_T` moment probe: doubling from ten
/// increments' scale `10 (κΔ)^{1/α}` up to half the horizon's scale.
pub fn zt_truncations(config: &MonteCarloConfig) -> Vec<f64> {
    let a = config.params.alpha();
    let k = config.params.kappa();
    let scale = |t: f64| (k * t).powf(1.0 / a);
    doubling(10.0 * scale(config.grid().dt()), 0.5 * scale(config.horizon))
}

/// Censored paths have `Z_T` beyond the horizon's reach and count as
/// exceeding every truncation level. Dropping them would keep only the
/// short passages, whose `Z_T` is small.
pub fn zt_moment_probes(run: &SurvivalRun, ks: &[f64], truncations: &[f64]) -> LabResult<Vec<MomentProbe>> {
    let censored = run.times.iter().filter(|t| t.is_none()).count();
    let mut z = run.z_at_passage.clone();
    z.extend(std::iter::repeat_n(f64::INFINITY, censored));
    ks.iter()
        .map(|&k| Ok(moment_probe(&z, k, truncations, ZT_MOMENT_THRESHOLD)?))
        .collect()
}

/// Truncated moments `E[min(T, M)^k]` along doubling `M ≤ horizon`, at one
/// order below and one above `θ̂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryCheck {
    pub below: MomentProbe,
    pub above: MomentProbe,
    pub passed: bool,
}

/// Orders are placed `3·stderr + margin` away from `θ̂`; censored paths
/// contribute `M` exactly, since `min(T, M) = M` for them.
pub fn corollary_check(run: &SurvivalRun, tail: &TailEstimate, margin: f64) -> LabResult<CorollaryCheck> {
    let h = run.config.horizon;
    let samples: Vec<f64> = run.times.iter().map(|t| t.unwrap_or(h)).collect();
    let truncations = doubling(tail.t_min, h);
    let gap = 3.0 * tail.theta_stderr + margin;
    let below = moment_probe(&samples, (tail.theta_hat - gap).max(0.01), &truncations, 0.0)?;
    let above = moment_probe(&samples, tail.theta_hat + gap, &truncations, 0.0)?;
    use persistence_core::stats::MomentTrend::*;
    let passed = below.trend == Stabilizing && above.trend == Diverging;
    Ok(CorollaryCheck { below, above, passed })
}

/// Settings for sampling `ξ` at a local-time level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiConfig {
    pub params: StableParams,
    pub fparams: FunctionalParams,
    /// Local-time level `t` of `ξ_t`.
    pub local_time: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    /// Paths continue up to `extension × horizon` before being censored.
    pub extension: usize,
    pub bandwidth: f64,
    pub seed: u64,
}

impl XiConfig {
    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }
}

/// Censored fraction above which `ξ` statistics are inconclusive.
pub const MAX_CENSORED_FRACTION: f64 = 0.2;

/// A path whose local time stayed below the target within the step budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoredXi {
    pub local_time: f64,
    pub at_cap: XiValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XiSamples {
    /// Paths that reached the target local time, in path order.
    pub values: Vec<XiValue>,
    pub censored: Vec<CensoredXi>,
    pub failed_paths: usize,
}

impl XiSamples {
    pub fn censored_fraction(&self) -> f64 {
        self.censored.len() as f64 / (self.values.len() + self.censored.len()) as f64
    }

    pub fn xi(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.xi).collect()
    }

    /// Every path stopped at `min(τ_t, cap)`, as `(local time / t, ξ)`.
    pub fn stopped(&self, local_time: f64) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .map(|v| (1.0, v.xi))
            .chain(
                self.censored
                    .iter()
                    .map(|c| ((c.local_time / local_time).min(1.0), c.at_cap.xi)),
            )
            .collect()
    }
}

pub fn sample_xi(config: &XiConfig) -> LabResult<XiSamples> {
    let dt = config.dt();
    let max_steps = config.n_steps.saturating_mul(config.extension.max(1));
    let results = map_paths(config.n_paths, |i| {
        xi_at_local_time(
            &config.params,
            &config.fparams,
            dt,
            config.bandwidth,
            config.local_time,
            max_steps,
            RngStream::new(config.seed, i),
        )
    });
    let (outcomes, failed_paths) = split_failures(results)?;
    let mut values = Vec::with_capacity(outcomes.len());
    let mut censored = Vec::new();
    for o in outcomes {
        match o {
            XiOutcome::Reached(v) => values.push(v),
            XiOutcome::Censored { local_time, at_cap } => censored.push(CensoredXi { local_time, at_cap }),
        }
    }
    Ok(XiSamples {
        values,
        censored,
        failed_paths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaXiEstimate {
    /// Fit of `−log|φ(λ)| = κ_ξ t λ^δ` with `δ` fixed at `(α−1)/(α+β)`.
    pub kappa_xi: f64,
    pub kappa_xi_stderr: f64,
    /// Free fit of the exponent.
    pub delta_hat: f64,
    pub delta_theory: f64,
    pub charfn: Vec<CharfnPoint>,
    pub censored_fraction: f64,
}

pub const KAPPA_XI_LAMBDAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Fits the scaling constant of the symmetric stable law of `ξ_t`.
pub fn estimate_kappa_xi(config: &XiConfig, samples: &XiSamples, lambdas: &[f64]) -> LabResult<KappaXiEstimate> {
    let censored_fraction = samples.censored_fraction();
    if censored_fraction > MAX_CENSORED_FRACTION {
        return Err(LabError::Insufficient(format!(
            "censored fraction {censored_fraction:.3} above {MAX_CENSORED_FRACTION}"
        )));
    }
    let charfn = stopped_charfn(&samples.stopped(config.local_time), lambdas)?;
    let delta = config.fparams.delta();
    let t = config.local_time;
    // per-λ estimates of κ_ξ from the real part (ξ is symmetric)
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    let mut kappas = Vec::new();
    for pt in &charfn {
        let r = pt.re;
        if !(r > 0.0 && r < 1.0) || pt.stderr_re <= 0.0 {
            continue;
        }
        let ln = -r.ln();
        // δ-method variance of log(−log r)
        let se = pt.stderr_re / (r * ln);
        xs.push(pt.lambda.ln());
        ys.push(ln.ln());
        ws.push(1.0 / (se * se));
        let k = ln / (t * pt.lambda.powf(delta));
        let k_se = pt.stderr_re / r / (t * pt.lambda.powf(delta));
        kappas.push((k, k_se));
    }
    if kappas.len() < 2 {
        return Err(LabError::Insufficient(
            "fewer than two usable characteristic-function points".into(),
        ));
    }
    let line = weighted_line(&xs, &ys, &ws)?;
    let wsum: f64 = kappas.iter().map(|(_, s)| 1.0 / (s * s)).sum();
    let kappa_xi = kappas.iter().map(|(k, s)| k / (s * s)).sum::<f64>() / wsum;
    Ok(KappaXiEstimate {
        kappa_xi,
        kappa_xi_stderr: (1.0 / wsum).sqrt(),
        delta_hat: line.slope,
        delta_theory: delta,
        charfn,
        censored_fraction,
    })
}

/// Survival CSV with columns `t, survivors, n_paths, p_hat, stderr`.
pub fn survival_csv(tail: &TailEstimate) -> String {
    let mut out = String::from("t,survivors,n_paths,p_hat,stderr\n");
    for i in 0..tail.t_grid.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            tail.t_grid[i], tail.survivors[i], tail.n_paths, tail.survival[i], tail.stderr[i]
        ));
    }
    out
}
