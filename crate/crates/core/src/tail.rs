//! Survival curves `P[T > t]` on a time grid and their power-law exponent.
//!
//! `θ̂` is minus the weighted least-squares slope of `log P̂[T > t]` against
//! `log t`, with delta-method weights `n p / (1 − p)`. Its standard error
//! accounts for the nesting of the events `{T > t}`: for `t_i ≤ t_j`,
//! `Cov(log P̂_i, log P̂_j) = (1 − p_i)/(n p_i)`.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::functionals::FunctionalParams;
use crate::stable::StableParams;
use crate::stats::{binomial_stderr, weighted_line};

/// Points with fewer survivors than this are too noisy to fit.
pub const MIN_SURVIVORS: f64 = 30.0;

/// `n` log-spaced points from `t_min` to `t_max` inclusive.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(domain("t_min", t_min, "0 < t_min < t_max"));
    }
    if n < 2 {
        return Err(domain("n", n as f64, "at least 2"));
    }
    let ratio = libm::log(t_max / t_min) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| t_min * libm::exp(ratio * i as f64)).collect();
    grid[n - 1] = t_max;
    Ok(grid)
}

/// Empirical survival function on a time grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SurvivalCurve {
    pub t_grid: Vec<f64>,
    /// Number of paths with `T > t` at each grid time. Synthetic curves may
    /// carry fractional counts.
    pub survivors: Vec<f64>,
    pub n_paths: u64,
}

impl SurvivalCurve {
    pub fn new(t_grid: Vec<f64>, survivors: Vec<f64>, n_paths: u64) -> Result<Self> {
        if t_grid.len() != survivors.len() {
            return Err(Error::Length {
                expected: t_grid.len(),
                got: survivors.len(),
            });
        }
        if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("t_grid", t_grid[0], "strictly increasing"));
        }
        if n_paths == 0 {
            return Err(domain("n_paths", 0.0, "positive"));
        }
        Ok(Self {
            t_grid,
            survivors,
            n_paths,
        })
    }

    /// Counts `T_i > t` for every grid time; `None` marks a censored path,
    /// which survives the whole grid.
    pub fn from_times(t_grid: Vec<f64>, times: &[Option<f64>]) -> Result<Self> {
        let mut sorted: Vec<f64> = times.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
        sorted.sort_by(f64::total_cmp);
        let survivors = t_grid
            .iter()
            .map(|&t| (sorted.len() - sorted.partition_point(|&x| x <= t)) as f64)
            .collect();
        Self::new(t_grid, survivors, times.len() as u64)
    }

    /// Exact power law `c·t^{−θ}` as a synthetic curve with `n` paths.
    pub fn synthetic(t_grid: Vec<f64>, n_paths: u64, survival: impl Fn(f64) -> f64) -> Result<Self> {
        let survivors = t_grid.iter().map(|&t| survival(t) * n_paths as f64).collect();
        Self::new(t_grid, survivors, n_paths)
    }

    pub fn p_hat(&self) -> Vec<f64> {
        self.survivors.iter().map(|s| s / self.n_paths as f64).collect()
    }

    pub fn stderr(&self) -> Vec<f64> {
        self.p_hat().iter().map(|&p| binomial_stderr(p, self.n_paths)).collect()
    }

    /// Rescales time by `c`, keeping the counts.
    pub fn rescaled(&self, c: f64) -> Self {
        Self {
            t_grid: self.t_grid.iter().map(|t| t * c).collect(),
            ..self.clone()
        }
    }
}

/// A fitted exponent together with the grid points it used.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExponentFit {
    pub theta_hat: f64,
    pub theta_stderr: f64,
    pub intercept: f64,
    /// Half-open index range `[start, end)` into the curve's grid.
    pub fit_window: (usize, usize),
}

/// The fit could not be made; carries what was available.
#[derive(Debug, Clone, PartialEq)]
pub struct FitError {
    pub usable: Vec<usize>,
    pub reason: &'static str,
}

impl core::fmt::Display for FitError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} ({} usable grid points)", self.reason, self.usable.len())
    }
}

impl core::error::Error for FitError {}

struct Points {
    idx: Vec<usize>,
    x: Vec<f64>,
    y: Vec<f64>,
    p: Vec<f64>,
    n: f64,
}

impl Points {
    fn window_fit(&self, a: usize, b: usize) -> Result<(f64, f64, f64)> {
        let w: Vec<f64> = self.p[a..b].iter().map(|&p| self.n * p / (1.0 - p)).collect();
        let line = weighted_line(&self.x[a..b], &self.y[a..b], &w)?;
        let c: Vec<f64> = (a..b).map(|i| line.slope_weight(self.x[i], w[i - a])).collect();
        let mut var = 0.0;
        for (i, ci) in c.iter().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                let early = self.p[a + i.min(j)];
                var += ci * cj * (1.0 - early) / (self.n * early);
            }
        }
        Ok((line.slope, libm::sqrt(var), line.intercept))
    }

    fn local_slope(&self, i: usize) -> (f64, f64) {
        let dx = self.x[i + 1] - self.x[i];
        let slope = (self.y[i + 1] - self.y[i]) / dx;
        let cond = self.p[i + 1] / self.p[i];
        let var = (1.0 - cond) / (cond * self.n * self.p[i]);
        (slope, libm::sqrt(var) / dx)
    }

    fn stable(&self, a: usize, b: usize) -> Option<(f64, f64, f64)> {
        let (slope, se, intercept) = self.window_fit(a, b).ok()?;
        let ok = (a..b - 1).all(|i| {
            let (s, s_se) = self.local_slope(i);
            (s - slope).abs() <= 2.0 * libm::sqrt(s_se * s_se + se * se)
        });
        ok.then_some((slope, se, intercept))
    }
}

/// Fits `P[T > t] ≈ C t^{−θ}` on the widest window of usable points
/// (`t ≥ t_min`, at least [`MIN_SURVIVORS`] survivors, `0 < p < 1`) whose
/// local two-point slopes all lie within two pooled standard errors of the
/// window slope. Ties go to the later window.
pub fn fit_exponent(curve: &SurvivalCurve, t_min: f64) -> core::result::Result<ExponentFit, FitError> {
    let n = curve.n_paths as f64;
    let p = curve.p_hat();
    let usable: Vec<usize> = (0..curve.t_grid.len())
        .filter(|&i| curve.t_grid[i] >= t_min && curve.survivors[i] >= MIN_SURVIVORS && p[i] > 0.0 && p[i] < 1.0)
        .collect();
    // keep the first contiguous run
    let run = usable
        .iter()
        .enumerate()
        .take_while(|(k, &i)| i == usable[0] + k)
        .count();
    if run < 3 {
        return Err(FitError {
            usable,
            reason: "fewer than 3 contiguous usable grid points",
        });
    }
    let idx: Vec<usize> = usable[..run].to_vec();
    let pts = Points {
        x: idx.iter().map(|&i| libm::log(curve.t_grid[i])).collect(),
        y: idx.iter().map(|&i| libm::log(p[i])).collect(),
        p: idx.iter().map(|&i| p[i]).collect(),
        idx,
        n,
    };
    for width in (3..=run).rev() {
        for a in (0..=run - width).rev() {
            if let Some((slope, se, intercept)) = pts.stable(a, a + width) {
                return Ok(ExponentFit {
                    theta_hat: -slope,
                    theta_stderr: se,
                    intercept,
                    fit_window: (pts.idx[a], pts.idx[a + width - 1] + 1),
                });
            }
        }
    }
    // three-point windows can still fail the rule; fall back to the last one
    let a = run - 3;
    let (slope, se, intercept) = pts.window_fit(a, run).map_err(|_| FitError {
        usable: pts.idx.clone(),
        reason: "degenerate fit window",
    })?;
    Ok(ExponentFit {
        theta_hat: -slope,
        theta_stderr: se,
        intercept,
        fit_window: (pts.idx[a], pts.idx[run - 1] + 1),
    })
}

/// Fit on a fixed half-open window of grid indices, without the usability
/// and stability rules.
pub fn fit_on_window(curve: &SurvivalCurve, window: (usize, usize)) -> core::result::Result<ExponentFit, FitError> {
    let (a, b) = window;
    let p = curve.p_hat();
    let idx: Vec<usize> = (a..b.min(p.len())).collect();
    let bad = |reason| FitError {
        usable: idx.clone(),
        reason,
    };
    if idx.len() < 2 {
        return Err(bad("window shorter than 2 points"));
    }
    if idx.iter().any(|&i| !(p[i] > 0.0 && p[i] < 1.0)) {
        return Err(bad("survival of 0 or 1 inside the window"));
    }
    let pts = Points {
        x: idx.iter().map(|&i| libm::log(curve.t_grid[i])).collect(),
        y: idx.iter().map(|&i| libm::log(p[i])).collect(),
        p: idx.iter().map(|&i| p[i]).collect(),
        idx: idx.clone(),
        n: curve.n_paths as f64,
    };
    let (slope, se, intercept) = pts
        .window_fit(0, pts.idx.len())
        .map_err(|_| bad("degenerate fit window"))?;
    Ok(ExponentFit {
        theta_hat: -slope,
        theta_stderr: se,
        intercept,
        fit_window: window,
    })
}

/// Slopes from two grid resolutions agree when their difference is within
/// the combined standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ResolutionCheck {
    pub fine: ExponentFit,
    pub coarse: ExponentFit,
    pub passed: bool,
}

impl ResolutionCheck {
    pub fn new(fine: ExponentFit, coarse: ExponentFit) -> Self {
        let tol = libm::sqrt(fine.theta_stderr * fine.theta_stderr + coarse.theta_stderr * coarse.theta_stderr);
        Self {
            fine,
            coarse,
            passed: (fine.theta_hat - coarse.theta_hat).abs() <= tol,
        }
    }
}

/// What is being stopped at the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PassageKind {
    Process,
    Functional,
}

/// Persistence exponent predicted by theory, or `None` when it is open
/// (a functional of a process with negative jumps, `α < 2`).
pub fn theoretical_theta(params: &StableParams, kind: PassageKind) -> Option<f64> {
    match kind {
        PassageKind::Process => Some(params.rho()),
        PassageKind::Functional if params.no_negative_jumps() => Some((params.alpha() - 1.0) / (2.0 * params.alpha())),
        PassageKind::Functional => None,
    }
}

/// Time scale on which the stopped quantity reaches the level: `A^(β)_t` is
/// of order `κ^{β/α} t^{1+β/α}`, `Z_t` of order `κ^{1/α} t^{1/α}`.
pub fn natural_time_scale(params: &StableParams, fparams: Option<&FunctionalParams>, level: f64) -> f64 {
    let alpha = params.alpha();
    match fparams {
        Some(f) => {
            let size = libm::pow(params.kappa(), f.beta() / alpha);
            libm::pow(level / size, 1.0 / f.hurst())
        }
        None => libm::pow(level / params.scale(), alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_and_counts() {
        let g = log_grid(1.0, 100.0, 3).unwrap();
        assert_abs_diff_eq!(g[1], 10.0, epsilon = 1e-12);
        assert_eq!(g[2], 100.0);
        let c = SurvivalCurve::from_times(vec![1.0, 2.0, 3.0], &[Some(0.5), Some(2.0), Some(2.5), None]).unwrap();
        assert_eq!(c.survivors, vec![3.0, 2.0, 1.0]);
        assert_eq!(c.p_hat(), vec![0.75, 0.5, 0.25]);
        assert!(SurvivalCurve::new(vec![2.0, 1.0], vec![1.0, 1.0], 2).is_err());
    }

    use alloc::vec;

    #[test]
    fn exact_power_law() {
        let grid = log_grid(1.0, 1e4, 25).unwrap();
        let curve = SurvivalCurve::synthetic(grid, 1_000_000, |t| 0.9 * libm::pow(t, -0.25)).unwrap();
        let fit = fit_exponent(&curve, 1.0).unwrap();
        assert_abs_diff_eq!(fit.theta_hat, 0.25, epsilon = 1e-12);
        assert_eq!(fit.fit_window, (0, 25));
        let fixed = fit_on_window(&curve, (3, 10)).unwrap();
        assert_abs_diff_eq!(fixed.theta_hat, 0.25, epsilon = 1e-12);
        assert!(fit_on_window(&curve, (3, 4)).is_err());
        let moved = fit_exponent(&curve.rescaled(7.0), 7.0).unwrap();
        assert_abs_diff_eq!(moved.theta_hat, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(moved.intercept, fit.intercept + 0.25 * libm::log(7.0), epsilon = 1e-10);
    }

    #[test]
    fn slow_correction() {
        let grid = log_grid(1e2, 1e4, 20).unwrap();
        let curve = SurvivalCurve::synthetic(grid, 1_000_000, |t| {
            0.8 * libm::pow(t, -0.5) * (1.0 + 0.1 / libm::log(t))
        })
        .unwrap();
        let fit = fit_exponent(&curve, 1.0).unwrap();
        assert!((fit.theta_hat - 0.5).abs() < 0.02, "{fit:?}");
    }

    #[test]
    fn transient_and_noise_cuts() {
        let grid = log_grid(0.1, 1e4, 30).unwrap();
        let curve = SurvivalCurve::synthetic(grid, 10_000, |t| libm::pow(t.max(1.0), -0.5)).unwrap();
        let fit = fit_exponent(&curve, 1.0).unwrap();
        let (a, b) = fit.fit_window;
        assert!(curve.t_grid[a] >= 1.0);
        assert!(curve.survivors[b - 1] >= MIN_SURVIVORS);
        assert_abs_diff_eq!(fit.theta_hat, 0.5, epsilon = 1e-9);
        let err = fit_exponent(&curve, 5e3).unwrap_err();
        assert!(err.usable.len() < 3);
    }

    #[test]
    fn theory_table() {
        let bm = StableParams::brownian();
        assert_eq!(theoretical_theta(&bm, PassageKind::Functional), Some(0.25));
        let sp = StableParams::new(1.5, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            theoretical_theta(&sp, PassageKind::Functional).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-15
        );
        let sym = StableParams::new(1.5, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            theoretical_theta(&sym, PassageKind::Process).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_eq!(theoretical_theta(&sym, PassageKind::Functional), None);
        let f = FunctionalParams::new(&bm, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            natural_time_scale(&bm, Some(&f), 1.0),
            libm::pow(2.0, 1.0 / 3.0),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(natural_time_scale(&sp, None, 2.0), libm::pow(2.0, 1.5), epsilon = 1e-12);
    }
}
