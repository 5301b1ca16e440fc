//! Additive functionals of a discretized path: the signed homogeneous
//! functional `A^(β)_t = ∫₀ᵗ |Z_s|^β sgn(Z_s) ds`, occupation-density local
//! time at 0, its right-continuous inverse and the time-changed process
//! `ξ_t = A^(β)_{τ_t}`.
//!
//! Every integral is a left-endpoint Riemann sum over the grid values. Below
//! `β = −1` the integrand is truncated to `|z| > ε` (principal value).

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::stable::{PathGrid, StableParams};

/// Homogeneity `β` of the functional together with its principal-value
/// radius `ε` (0 means no truncation).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FunctionalParams {
    beta: f64,
    delta: f64,
    hurst: f64,
    pv_epsilon: f64,
}

impl FunctionalParams {
    pub fn new(params: &StableParams, beta: f64, pv_epsilon: f64) -> Result<Self> {
        let alpha = params.alpha();
        let bound = -(alpha + 1.0) / 2.0;
        if !(beta > bound && beta.is_finite()) {
            return Err(Error::Beta { beta, bound });
        }
        if !(pv_epsilon >= 0.0 && pv_epsilon.is_finite()) {
            return Err(domain("pv_epsilon", pv_epsilon, "finite and >= 0"));
        }
        if beta <= -1.0 && pv_epsilon == 0.0 {
            return Err(Error::PrincipalValue(beta));
        }
        Ok(Self {
            beta,
            delta: (alpha - 1.0) / (alpha + beta),
            hurst: 1.0 + beta / alpha,
            pv_epsilon,
        })
    }

    /// Uses the grid default radius when `β ≤ −1` and no truncation otherwise.
    pub fn with_grid_default(params: &StableParams, beta: f64, dt: f64) -> Result<Self> {
        let eps = if beta <= -1.0 {
            default_pv_epsilon(params, dt)
        } else {
            0.0
        };
        Self::new(params, beta, eps)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Index `(α−1)/(α+β)` of the symmetric stable process `ξ`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Self-similarity index `1 + β/α` of `A^(β)`.
    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn pv_epsilon(&self) -> f64 {
        self.pv_epsilon
    }

    pub fn integrand(&self) -> Integrand {
        Integrand::new(self.beta, self.pv_epsilon)
    }
}

/// One grid step's natural displacement, `Δ^{1/α} κ^{1/α}`; also the default
/// principal-value radius.
pub fn default_pv_epsilon(params: &StableParams, dt: f64) -> f64 {
    libm::pow(dt, 1.0 / params.alpha()) * params.scale()
}

/// Default local-time window half-width, twice the step displacement.
pub fn default_bandwidth(params: &StableParams, dt: f64) -> f64 {
    2.0 * default_pv_epsilon(params, dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Linear,
    Sign,
    Power(f64),
}

/// `g(z) = |z|^β sgn(z) 1{|z| > ε}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrand {
    shape: Shape,
    epsilon: f64,
}

impl Integrand {
    pub fn new(beta: f64, epsilon: f64) -> Self {
        let shape = if beta == 1.0 {
            Shape::Linear
        } else if beta == 0.0 {
            Shape::Sign
        } else {
            Shape::Power(beta)
        };
        Self { shape, epsilon }
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        if z == 0.0 || z.abs() <= self.epsilon {
            return 0.0;
        }
        match self.shape {
            Shape::Linear => z,
            Shape::Sign => z.signum(),
            Shape::Power(beta) => libm::pow(z.abs(), beta).copysign(z),
        }
    }
}

/// Running left-endpoint sums of the positive and negative parts of `g`.
/// The functional itself is always reported as `plus − minus`.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalAccumulator {
    integrand: Integrand,
    dt: f64,
    plus: f64,
    minus: f64,
}

impl FunctionalAccumulator {
    pub fn new(integrand: Integrand, dt: f64) -> Self {
        Self {
            integrand,
            dt,
            plus: 0.0,
            minus: 0.0,
        }
    }

    /// Adds the contribution of the step starting at value `z`.
    #[inline]
    pub fn push(&mut self, z: f64) {
        let g = self.integrand.eval(z);
        if g > 0.0 {
            self.plus += g * self.dt;
        } else if g < 0.0 {
            self.minus -= g * self.dt;
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.plus - self.minus
    }

    pub fn plus(&self) -> f64 {
        self.plus
    }

    pub fn minus(&self) -> f64 {
        self.minus
    }
}

/// Values of `A^(β)` at the grid times of a path, with its positive and
/// negative parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSeries {
    horizon: f64,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl FunctionalSeries {
    /// A synthetic series with the given values, all carried by the
    /// positive part.
    pub fn from_values(horizon: f64, x_values: &[f64]) -> Result<Self> {
        if x_values.len() < 2 {
            return Err(Error::Length {
                expected: 2,
                got: x_values.len(),
            });
        }
        if !(horizon > 0.0) {
            return Err(domain("horizon", horizon, "positive"));
        }
        let minus = alloc::vec![0.0; x_values.len()];
        Ok(Self {
            horizon,
            plus: x_values.to_vec(),
            minus,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.plus.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps() as f64
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, index: usize) -> f64 {
        self.plus[index] - self.minus[index]
    }

    pub fn plus(&self, index: usize) -> f64 {
        self.plus[index]
    }

    pub fn minus(&self, index: usize) -> f64 {
        self.minus[index]
    }

    pub fn x_values(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.value(j)).collect()
    }
}

/// Left-endpoint quadrature of `g(Z_s)` along the path.
pub fn homogeneous_functional(path: &PathGrid, fparams: &FunctionalParams) -> Result<FunctionalSeries> {
    check_alpha(path, fparams)?;
    let mut acc = FunctionalAccumulator::new(fparams.integrand(), path.dt());
    let mut plus = Vec::with_capacity(path.values().len());
    let mut minus = Vec::with_capacity(path.values().len());
    plus.push(0.0);
    minus.push(0.0);
    for &z in &path.values()[..path.n_steps()] {
        acc.push(z);
        plus.push(acc.plus());
        minus.push(acc.minus());
    }
    Ok(FunctionalSeries {
        horizon: path.horizon(),
        plus,
        minus,
    })
}

fn check_alpha(path: &PathGrid, fparams: &FunctionalParams) -> Result<()> {
    // Parameters built for another α would carry the wrong validity bound.
    FunctionalParams::new(path.params(), fparams.beta, fparams.pv_epsilon).map(|_| ())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PassageStatus {
    Crossed,
    Censored,
}

/// First passage above a level, bracketed by two grid times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageTime {
    pub status: PassageStatus,
    /// Grid index of the first value strictly above the level.
    pub index: Option<usize>,
    pub t_lower: f64,
    pub t_upper: f64,
    pub horizon: f64,
}

impl PassageTime {
    fn crossed(index: usize, dt: f64, horizon: f64) -> Self {
        Self {
            status: PassageStatus::Crossed,
            index: Some(index),
            t_lower: (index - 1) as f64 * dt,
            t_upper: index as f64 * dt,
            horizon,
        }
    }

    fn censored(horizon: f64) -> Self {
        Self {
            status: PassageStatus::Censored,
            index: None,
            t_lower: horizon,
            t_upper: f64::INFINITY,
            horizon,
        }
    }

    pub fn is_crossed(&self) -> bool {
        self.status == PassageStatus::Crossed
    }

    /// `1{T > t}` with `T` read at the upper bracket end.
    pub fn survives(&self, t: f64) -> bool {
        self.t_upper > t
    }
}

pub fn first_passage(series: &FunctionalSeries, level: f64) -> Result<PassageTime> {
    if !(level > 0.0) {
        return Err(domain("level", level, "positive"));
    }
    let dt = series.dt();
    Ok((1..series.len())
        .find(|&j| series.value(j) > level)
        .map_or(PassageTime::censored(series.horizon()), |j| {
            PassageTime::crossed(j, dt, series.horizon())
        }))
}

/// First passage of the path values themselves above `level`.
pub fn path_first_passage(path: &PathGrid, level: f64) -> Result<PassageTime> {
    if !(level > 0.0) {
        return Err(domain("level", level, "positive"));
    }
    Ok((1..path.values().len())
        .find(|&j| path.values()[j] > level)
        .map_or(PassageTime::censored(path.horizon()), |j| {
            PassageTime::crossed(j, path.dt(), path.horizon())
        }))
}

pub fn running_sup(series: &FunctionalSeries) -> f64 {
    (0..series.len())
        .map(|j| series.value(j))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Occupation-density estimate of `L(t, 0)` at grid times.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeCurve {
    bandwidth: f64,
    dt: f64,
    counts: Vec<u64>,
}

impl LocalTimeCurve {
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    #[inline]
    pub fn value(&self, index: usize) -> f64 {
        local_time_from_count(self.counts[index], self.dt, self.bandwidth)
    }

    pub fn l_values(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.value(j)).collect()
    }

    pub fn last(&self) -> f64 {
        self.value(self.len() - 1)
    }
}

#[inline]
pub(crate) fn local_time_from_count(count: u64, dt: f64, bandwidth: f64) -> f64 {
    count as f64 * dt / (2.0 * bandwidth)
}

/// `L_j = (2h)^{-1} Δ #{k < j : |Z_k| < h}`.
pub fn local_time_zero(path: &PathGrid, bandwidth: f64) -> Result<LocalTimeCurve> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(domain("bandwidth", bandwidth, "positive and finite"));
    }
    let mut counts = Vec::with_capacity(path.values().len());
    let mut count = 0u64;
    counts.push(0);
    for &z in &path.values()[..path.n_steps()] {
        if z.abs() < bandwidth {
            count += 1;
        }
        counts.push(count);
    }
    Ok(LocalTimeCurve {
        bandwidth,
        dt: path.dt(),
        counts,
    })
}

/// Grid index of `τ_level = inf{u : L_u > level}`, `None` if censored.
pub fn inverse_local_time_index(curve: &LocalTimeCurve, level: f64) -> Option<usize> {
    // counts are nondecreasing, so the first index is found by bisection
    let idx = curve
        .counts
        .partition_point(|&c| local_time_from_count(c, curve.dt, curve.bandwidth) <= level);
    (idx < curve.len()).then_some(idx)
}

pub fn inverse_local_time(curve: &LocalTimeCurve, level: f64) -> Result<Option<f64>> {
    if !(level >= 0.0) {
        return Err(domain("level", level, ">= 0"));
    }
    Ok(inverse_local_time_index(curve, level).map(|j| j as f64 * curve.dt))
}

/// `ξ_t` together with its positive and negative parts and the clock `τ_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct XiValue {
    pub tau: f64,
    pub xi: f64,
    pub plus: f64,
    pub minus: f64,
}

/// `ξ_t = A^(β)_{τ_t}`; `None` when `τ_t` lies beyond the path.
pub fn xi_process(
    path: &PathGrid,
    fparams: &FunctionalParams,
    curve: &LocalTimeCurve,
    t: f64,
) -> Result<Option<XiValue>> {
    if curve.len() != path.values().len() {
        return Err(Error::Length {
            expected: path.values().len(),
            got: curve.len(),
        });
    }
    let series = homogeneous_functional(path, fparams)?;
    Ok(inverse_local_time(curve, t)?.map(|tau| {
        let j = inverse_local_time_index(curve, t).expect("tau exists");
        XiValue {
            tau,
            xi: series.value(j),
            plus: series.plus(j),
            minus: series.minus(j),
        }
    }))
}

/// Zero visits of a discretized path and the excursion that first carries
/// `ξ` to a level.
///
/// A step `k → k+1` is a zero visit when the sign changes with a step no
/// larger than `jump_threshold`; larger sign changes are jumps across 0.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExcursionPassage {
    /// Upper grid time of the first passage `T` of `A^(β)` above the level.
    pub passage: Option<f64>,
    /// Path value at that grid time.
    pub z_at_passage: Option<f64>,
    /// End of the excursion during which `ξ` first reaches the level, `τ_Θ`.
    pub tau_theta: Option<f64>,
    /// Start of that excursion, `τ_{Θ−}`.
    pub tau_theta_minus: Option<f64>,
}

/// Default jump threshold: eight step displacements.
pub fn default_jump_threshold(params: &StableParams, dt: f64) -> f64 {
    8.0 * default_pv_epsilon(params, dt)
}

/// Streaming tracker for [`ExcursionPassage`]; see [`excursion_passage`].
#[derive(Debug, Clone)]
pub struct ExcursionTracker {
    acc: FunctionalAccumulator,
    level: f64,
    jump_threshold: f64,
    dt: f64,
    step: usize,
    z: f64,
    last_visit_end: usize,
    result: ExcursionPassage,
}

impl ExcursionTracker {
    pub fn new(integrand: Integrand, dt: f64, level: f64, jump_threshold: f64) -> Self {
        Self {
            acc: FunctionalAccumulator::new(integrand, dt),
            level,
            jump_threshold,
            dt,
            step: 0,
            z: 0.0,
            last_visit_end: 0,
            result: ExcursionPassage {
                passage: None,
                z_at_passage: None,
                tau_theta: None,
                tau_theta_minus: None,
            },
        }
    }

    /// Advances one grid step to the value `z_next`; returns true once `Θ`
    /// has been found.
    #[inline]
    pub fn advance(&mut self, z_next: f64) -> bool {
        self.acc.push(self.z);
        self.step += 1;
        let a = self.acc.value();
        if self.result.passage.is_none() && a > self.level {
            self.result.passage = Some(self.step as f64 * self.dt);
            self.result.z_at_passage = Some(z_next);
        }
        let crossing = (self.z >= 0.0) != (z_next >= 0.0);
        if crossing && (z_next - self.z).abs() <= self.jump_threshold {
            if a >= self.level {
                self.result.tau_theta = Some(self.step as f64 * self.dt);
                self.result.tau_theta_minus = Some(self.last_visit_end as f64 * self.dt);
                self.z = z_next;
                return true;
            }
            self.last_visit_end = self.step;
        }
        self.z = z_next;
        false
    }

    pub fn finish(&self) -> ExcursionPassage {
        self.result
    }
}

pub fn excursion_passage(
    path: &PathGrid,
    fparams: &FunctionalParams,
    level: f64,
    jump_threshold: f64,
) -> Result<ExcursionPassage> {
    check_alpha(path, fparams)?;
    if !(level > 0.0) {
        return Err(domain("level", level, "positive"));
    }
    let mut tracker = ExcursionTracker::new(fparams.integrand(), path.dt(), level, jump_threshold);
    for &z in &path.values()[1..] {
        if tracker.advance(z) {
            break;
        }
    }
    Ok(tracker.finish())
}
