//! Sample statistics shared by the Monte Carlo checks: two-sample
//! Kolmogorov–Smirnov tests, empirical characteristic functions, weighted
//! line fits and the growth rate of truncated moments.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

/// `sqrt(p(1−p)/n)`.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    libm::sqrt(p * (1.0 - p) / n as f64)
}

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(domain("sample", f64::NAN, "no NaN values"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Length { expected: 1, got: 0 });
    }
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// `P[D_{n,n} ≥ k/n]` for two samples of equal size `n` (Gnedenko–Korolyuk).
pub fn ks_equal_tail(n: usize, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let lg = |x: usize| libm::lgamma(x as f64 + 1.0);
    let base = 2.0 * lg(n);
    let mut sum = 0.0;
    let mut j = 1;
    while j * k <= n {
        let term = libm::exp(base - lg(n - j * k) - lg(n + j * k));
        sum += if j % 2 == 1 { term } else { -term };
        j += 1;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic Kolmogorov coefficient `c(a)` with `P[√(nm/(n+m)) D > c] = a`.
pub fn kolmogorov_coefficient(level: f64) -> f64 {
    libm::sqrt(-0.5 * libm::log(level / 2.0))
}

/// Critical value of the two-sample KS test: the smallest `d` with
/// `P[D ≥ d] ≤ level`. Exact for equal sizes; otherwise the asymptotic
/// Kolmogorov value.
pub fn ks_critical_value(n: usize, m: usize, level: f64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::Length { expected: 1, got: 0 });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(domain("level", level, "in (0, 1)"));
    }
    if n == m {
        // tail probability is decreasing in k
        let k = (1..=n).find(|&k| ks_equal_tail(n, k) <= level).unwrap_or(n + 1);
        return Ok(k as f64 / n as f64);
    }
    let (n, m) = (n as f64, m as f64);
    Ok(kolmogorov_coefficient(level) * libm::sqrt((n + m) / (n * m)))
}

/// Outcome of a two-sample KS test at a given level.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KsTest {
    pub statistic: f64,
    pub critical: f64,
    pub n: usize,
    pub m: usize,
}

impl KsTest {
    pub fn run(a: &[f64], b: &[f64], level: f64) -> Result<Self> {
        Ok(Self {
            statistic: ks_statistic(a, b)?,
            critical: ks_critical_value(a.len(), b.len(), level)?,
            n: a.len(),
            m: b.len(),
        })
    }

    pub fn passes(&self) -> bool {
        self.statistic < self.critical
    }
}

/// `E[exp(iλX)]` estimated at one `λ`, with jackknife standard errors of
/// the real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CharfnPoint {
    pub lambda: f64,
    pub re: f64,
    pub im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
}

impl CharfnPoint {
    pub fn modulus(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

// For a sample mean the delete-one jackknife variance equals s²/n.
fn mean_and_jackknife(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, libm::sqrt(ss / (nf - 1.0) / nf))
}

pub fn empirical_charfn(samples: &[f64], lambdas: &[f64]) -> Result<Vec<CharfnPoint>> {
    if samples.len() < 2 {
        return Err(Error::Length {
            expected: 2,
            got: samples.len(),
        });
    }
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let (re, stderr_re) = mean_and_jackknife(samples.iter().map(|x| libm::cos(lambda * x)), samples.len());
            let (im, stderr_im) = mean_and_jackknife(samples.iter().map(|x| libm::sin(lambda * x)), samples.len());
            CharfnPoint {
                lambda,
                re,
                im,
                stderr_re,
                stderr_im,
            }
        })
        .collect())
}

/// Characteristic function at local time `t` of a symmetric Lévy process
/// observed at bounded stopping times `S_i ≤ t`, given as pairs
/// `(S_i / t, x_i)`.
///
/// Solves `mean(cos(λx_i)·φ^{−s_i}) = 1` for `φ` per `λ`, which is the
/// optional-stopping identity for the martingale `e^{iλX_s}/φ(λ)^{s}`. With
/// every `s_i = 1` this is the plain empirical characteristic function.
/// When the stopped sample carries no positive signal (`φ` indistinguishable
/// from 0) the real part is reported as 0.
pub fn stopped_charfn(samples: &[(f64, f64)], lambdas: &[f64]) -> Result<Vec<CharfnPoint>> {
    if samples.len() < 2 {
        return Err(Error::Length {
            expected: 2,
            got: samples.len(),
        });
    }
    if let Some(&(s, _)) = samples.iter().find(|(s, _)| !(0.0..=1.0).contains(s)) {
        return Err(domain("stopped fraction", s, "in [0, 1]"));
    }
    let n = samples.len();
    let nf = n as f64;
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let g = |u: f64| {
                samples
                    .iter()
                    .map(|(s, x)| libm::cos(lambda * x) * libm::exp(u * s))
                    .sum::<f64>()
                    / nf
            };
            // u = −ln φ; g(0) ≤ 1 and g grows like e^u when the unstopped
            // paths have positive mean cosine
            let u = if g(0.0) >= 1.0 { Some(0.0) } else { bracket_root(&g) };
            let sines = |u: f64| {
                samples
                    .iter()
                    .map(move |(s, x)| libm::sin(lambda * x) * libm::exp(u * s))
            };
            match u {
                Some(u) => {
                    let phi = libm::exp(-u);
                    let ys = samples.iter().map(|(s, x)| libm::cos(lambda * x) * libm::exp(u * s));
                    let (_, se_g) = mean_and_jackknife(ys, n);
                    let slope = samples
                        .iter()
                        .map(|(s, x)| s * libm::cos(lambda * x) * libm::exp(u * s))
                        .sum::<f64>()
                        / nf;
                    let (im, se_im) = mean_and_jackknife(sines(u), n);
                    CharfnPoint {
                        lambda,
                        re: phi,
                        im: phi * im,
                        stderr_re: if slope > 0.0 { phi * se_g / slope } else { f64::INFINITY },
                        stderr_im: phi * se_im,
                    }
                }
                None => {
                    let (_, stderr_re) = mean_and_jackknife(samples.iter().map(|(_, x)| libm::cos(lambda * x)), n);
                    let (im, stderr_im) = mean_and_jackknife(sines(0.0), n);
                    CharfnPoint {
                        lambda,
                        re: 0.0,
                        im,
                        stderr_re,
                        stderr_im,
                    }
                }
            }
        })
        .collect())
}

// Smallest doubling bracket with g(hi) ≥ 1, then bisection.
fn bracket_root(g: &impl Fn(f64) -> f64) -> Option<f64> {
    let (mut lo, mut hi, mut step) = (0.0, 0.125, 0.125);
    while g(hi) < 1.0 {
        if step > 64.0 {
            return None;
        }
        lo = hi;
        step *= 2.0;
        hi += step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Mean with its standard error.
pub fn mean_stderr(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Length {
            expected: 2,
            got: values.len(),
        });
    }
    Ok(mean_and_jackknife(values.iter().copied(), values.len()))
}

/// Weighted least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    x_mean: f64,
    sxx: f64,
}

impl LineFit {
    /// Coefficient `c_i` of `y_i` in `slope = Σ c_i y_i`.
    pub fn slope_weight(&self, x: f64, w: f64) -> f64 {
        w * (x - self.x_mean) / self.sxx
    }
}

pub fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(Error::Length {
            expected: x.len(),
            got: y.len().min(w.len()),
        });
    }
    if x.len() < 2 {
        return Err(Error::Length {
            expected: 2,
            got: x.len(),
        });
    }
    let sw: f64 = w.iter().sum();
    let x_mean = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let y_mean = y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(x, w)| w * (x - x_mean) * (x - x_mean)).sum();
    if !(sxx > 0.0) {
        return Err(domain("x spread", sxx, "at least two distinct x"));
    }
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((x, y), w)| w * (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: y_mean - slope * x_mean,
        x_mean,
        sxx,
    })
}

/// How `E[min(X, M)^k]` behaves as `M` doubles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MomentTrend {
    Diverging,
    Stabilizing,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MomentProbe {
    pub k: f64,
    pub truncations: Vec<f64>,
    pub moments: Vec<f64>,
    /// Slope of log increments against log truncation. A tail `x^{−θ}`
    /// gives `k − θ`.
    pub growth_slope: f64,
    pub trend: MomentTrend,
}

/// Truncated moments `E[min(X, M)^k]` of nonnegative samples along
/// `truncations`, classified as diverging when the growth slope of their
/// increments is at least `threshold`.
pub fn moment_probe(samples: &[f64], k: f64, truncations: &[f64], threshold: f64) -> Result<MomentProbe> {
    if truncations.len() < 3 {
        return Err(Error::Length {
            expected: 3,
            got: truncations.len(),
        });
    }
    if truncations.windows(2).any(|w| !(w[1] > w[0])) || !(truncations[0] > 0.0) {
        return Err(domain("truncations", truncations[0], "positive and increasing"));
    }
    if samples.is_empty() {
        return Err(Error::Length { expected: 1, got: 0 });
    }
    let n = samples.len() as f64;
    let moments: Vec<f64> = truncations
        .iter()
        .map(|&m| samples.iter().map(|&x| libm::pow(x.max(0.0).min(m), k)).sum::<f64>() / n)
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, w) in moments.windows(2).enumerate() {
        let inc = w[1] - w[0];
        if inc > 0.0 {
            xs.push(libm::log(truncations[i]));
            ys.push(libm::log(inc));
        }
    }
    let growth_slope = if xs.len() >= 2 {
        let ones = alloc::vec![1.0; xs.len()];
        weighted_line(&xs, &ys, &ones)?.slope
    } else {
        // increments vanish: the moment has stopped moving
        f64::NEG_INFINITY
    };
    Ok(MomentProbe {
        k,
        truncations: truncations.to_vec(),
        moments,
        growth_slope,
        trend: if growth_slope >= threshold {
            MomentTrend::Diverging
        } else {
            MomentTrend::Stabilizing
        },
    })
}
