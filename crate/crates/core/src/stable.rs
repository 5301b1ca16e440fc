//! Strictly α-stable laws with Lévy exponent
//! `Ψ(λ) = κ|λ|^α (1 − iχ sgn(λ) tan(πα/2))`, their exact samplers and
//! discretized paths.
//!
//! The sampler uses the Chambers–Mallows–Stuck representation with scale
//! `σ = κ^{1/α}` and skewness `b = χ`, which reproduces `Ψ` exactly. The
//! Gaussian case `α = 2` is a separate branch with variance `2κ`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{domain, Error, Result};

/// Index, scale and skewness of a strictly α-stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StableParams {
    alpha: f64,
    kappa: f64,
    chi: f64,
}

impl StableParams {
    pub fn new(alpha: f64, kappa: f64, chi: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::Alpha(alpha));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Kappa(kappa));
        }
        if !(-1.0..=1.0).contains(&chi) {
            return Err(Error::Chi(chi));
        }
        Ok(Self { alpha, kappa, chi })
    }

    /// Standard Brownian motion: `α = 2`, `κ = 1/2`.
    pub fn brownian() -> Self {
        Self {
            alpha: 2.0,
            kappa: 0.5,
            chi: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn is_gaussian(&self) -> bool {
        self.alpha == 2.0
    }

    /// True when the process has no negative jumps (`χ = 1`, or `α = 2`).
    pub fn no_negative_jumps(&self) -> bool {
        self.is_gaussian() || self.chi == 1.0
    }

    /// True when the process has no positive jumps (`χ = -1`, or `α = 2`).
    pub fn no_positive_jumps(&self) -> bool {
        self.is_gaussian() || self.chi == -1.0
    }

    /// `tan(πα/2)`, exactly zero in the Gaussian case.
    pub fn skew_tan(&self) -> f64 {
        if self.is_gaussian() {
            0.0
        } else {
            libm::tan(FRAC_PI_2 * self.alpha)
        }
    }

    /// Scale of the standard parameterization, `κ^{1/α}`.
    pub fn scale(&self) -> f64 {
        libm::pow(self.kappa, 1.0 / self.alpha)
    }

    /// Index `(α−1)/α` of the inverse local time subordinator.
    pub fn subordinator_index(&self) -> f64 {
        (self.alpha - 1.0) / self.alpha
    }

    pub fn rho(&self) -> f64 {
        positivity_parameter(self)
    }

    /// Law of `-Z`: same index and scale, opposite skewness.
    pub fn mirrored(&self) -> Self {
        Self {
            chi: -self.chi,
            ..*self
        }
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.alpha, kappa, self.chi)
    }
}

/// `ρ = P[Z_t > 0] = 1/2 + (πα)^{-1} arctan(χ tan(πα/2))`.
pub fn positivity_parameter(params: &StableParams) -> f64 {
    if params.is_gaussian() {
        return 0.5;
    }
    0.5 + libm::atan(params.chi * params.skew_tan()) / (PI * params.alpha)
}

/// The characteristic exponent `Ψ(λ) = −log E[exp(iλZ₁)]`.
pub fn levy_exponent(params: &StableParams, lambda: f64) -> Complex64 {
    if lambda == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let modulus = params.kappa * libm::pow(lambda.abs(), params.alpha);
    let sign = if lambda > 0.0 { 1.0 } else { -1.0 };
    Complex64::new(modulus, -modulus * params.chi * sign * params.skew_tan())
}

/// Identifies one reproducible random stream: a global seed plus the index
/// of the path (or worker task) that consumes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

/// Generator behind every [`RngStream`].
pub type StreamRng = ChaCha8Rng;

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// ChaCha keyed by the seed, with the stream id selecting one of its
    /// 2^64 independent counter streams.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Gaussian,
    Cms {
        alpha: f64,
        inv_alpha: f64,
        tail_power: f64,
        shift: f64,
        factor: f64,
    },
}

/// Draws `scale · Z₁`-distributed values, where `scale` is fixed at
/// construction (typically `Δ^{1/α}` for path increments).
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    kernel: Kernel,
    scale: f64,
}

impl StableSampler {
    pub fn new(params: &StableParams) -> Self {
        Self::for_step(params, 1.0)
    }

    /// Sampler for increments over a time step `dt`, i.e. `dt^{1/α} Z₁`.
    pub fn for_step(params: &StableParams, dt: f64) -> Self {
        let step_scale = libm::pow(dt, 1.0 / params.alpha);
        if params.is_gaussian() {
            return Self {
                kernel: Kernel::Gaussian,
                scale: step_scale * libm::sqrt(2.0 * params.kappa),
            };
        }
        let alpha = params.alpha;
        let skew = params.chi * params.skew_tan();
        Self {
            kernel: Kernel::Cms {
                alpha,
                inv_alpha: 1.0 / alpha,
                tail_power: (1.0 - alpha) / alpha,
                shift: libm::atan(skew) / alpha,
                factor: libm::pow(1.0 + skew * skew, 0.5 / alpha),
            },
            scale: step_scale * params.scale(),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let standard = match self.kernel {
            Kernel::Gaussian => rng.sample::<f64, _>(StandardNormal),
            Kernel::Cms {
                alpha,
                inv_alpha,
                tail_power,
                shift,
                factor,
            } => {
                let u: f64 = rng.sample(Open01);
                let v = PI * (u - 0.5);
                let w: f64 = rng.sample(Exp1);
                let phase = alpha * (v + shift);
                factor * libm::sin(phase) / libm::pow(libm::cos(v), inv_alpha)
                    * libm::pow(libm::cos(v - phase) / w, tail_power)
            }
        };
        self.scale * standard
    }
}

/// Endless stream of i.i.d. path increments over a fixed time step.
#[derive(Debug, Clone)]
pub struct Increments {
    sampler: StableSampler,
    rng: StreamRng,
}

impl Increments {
    pub fn new(params: &StableParams, dt: f64, stream: RngStream) -> Self {
        Self {
            sampler: StableSampler::for_step(params, dt),
            rng: stream.rng(),
        }
    }
}

impl Iterator for Increments {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(self.sampler.sample(&mut self.rng))
    }
}

/// `n` i.i.d. draws of `Z₁`.
pub fn sample_stable(params: &StableParams, n: usize, stream: RngStream) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(domain("n", 0.0, "at least one draw"));
    }
    Ok(Increments::new(params, 1.0, stream).take(n).collect())
}

/// A path observed at the times `jΔ`, `Δ = horizon / n_steps`, starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    params: StableParams,
    horizon: f64,
    values: Vec<f64>,
}

impl PathGrid {
    /// Wraps externally produced values; `values[0]` must be 0.
    pub fn from_values(params: StableParams, horizon: f64, values: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(domain("horizon", horizon, "positive and finite"));
        }
        if values.len() < 2 {
            return Err(Error::Length {
                expected: 2,
                got: values.len(),
            });
        }
        if values[0] != 0.0 {
            return Err(domain("values[0]", values[0], "paths start at 0"));
        }
        Ok(Self {
            params,
            horizon,
            values,
        })
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps() as f64
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 * self.dt()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The same path observed at every `factor`-th grid time.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.n_steps().is_multiple_of(factor) {
            return Err(domain("factor", factor as f64, "a positive divisor of n_steps"));
        }
        let values = self.values.iter().step_by(factor).copied().collect();
        Self::from_values(self.params, self.horizon, values)
    }

    /// Mirror image `-Z`, a path of the mirrored law.
    pub fn negated(&self) -> Self {
        Self {
            params: self.params.mirrored(),
            horizon: self.horizon,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Exact-in-law discretization: cumulative sums of `n_steps` independent
/// `Δ^{1/α} Z₁` increments.
pub fn simulate_path(params: &StableParams, horizon: f64, n_steps: usize, stream: RngStream) -> Result<PathGrid> {
    if n_steps == 0 {
        return Err(domain("n_steps", 0.0, "at least one step"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain("horizon", horizon, "positive and finite"));
    }
    let dt = horizon / n_steps as f64;
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(0.0);
    let mut z = 0.0;
    for dz in Increments::new(params, dt, stream).take(n_steps) {
        z += dz;
        values.push(z);
    }
    PathGrid::from_values(*params, horizon, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(alpha: f64, kappa: f64, chi: f64) -> StableParams {
        StableParams::new(alpha, kappa, chi).unwrap()
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert_eq!(StableParams::new(0.9, 1.0, 0.0), Err(Error::Alpha(0.9)));
        assert_eq!(StableParams::new(1.0, 1.0, 0.0), Err(Error::Alpha(1.0)));
        assert_eq!(StableParams::new(2.1, 1.0, 0.0), Err(Error::Alpha(2.1)));
        assert_eq!(StableParams::new(1.5, 0.0, 0.0), Err(Error::Kappa(0.0)));
        assert_eq!(StableParams::new(1.5, 1.0, 1.2), Err(Error::Chi(1.2)));
        assert!(StableParams::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn positivity_parameter_examples() {
        assert_eq!(positivity_parameter(&params(2.0, 1.0, 0.7)), 0.5);
        assert_abs_diff_eq!(params(1.5, 1.0, -1.0).rho(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(params(1.5, 1.0, 1.0).rho(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn one_sided_cases_hit_the_interval_ends() {
        for &alpha in &[1.1, 1.3, 1.5, 1.8, 1.95] {
            let pos = params(alpha, 1.0, 1.0).rho();
            let neg = params(alpha, 1.0, -1.0).rho();
            assert_abs_diff_eq!(pos, 1.0 - 1.0 / alpha, epsilon = 1e-14);
            assert_abs_diff_eq!(neg, 1.0 / alpha, epsilon = 1e-14);
        }
    }

    #[test]
    fn levy_exponent_examples() {
        let psi = levy_exponent(&params(2.0, 0.5, 0.3), 2.0);
        assert_eq!(psi, Complex64::new(2.0, 0.0));
        assert_eq!(levy_exponent(&params(1.5, 1.0, 0.4), 0.0), Complex64::new(0.0, 0.0));
        let psi = levy_exponent(&params(1.5, 1.0, 1.0), 1.0);
        assert_abs_diff_eq!(psi.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn increments_scale_with_step() {
        let p = params(1.5, 1.0, 0.3);
        let stream = RngStream::new(3, 9);
        let unit: Vec<f64> = Increments::new(&p, 1.0, stream).take(50).collect();
        let small: Vec<f64> = Increments::new(&p, 0.125, stream).take(50).collect();
        for (u, s) in unit.iter().zip(&small) {
            assert_abs_diff_eq!(s / u, 0.125f64.powf(1.0 / 1.5), epsilon = 1e-12);
        }
    }

    #[test]
    fn distinct_streams_differ_and_equal_streams_repeat() {
        let p = params(1.7, 1.0, 0.0);
        let a = sample_stable(&p, 64, RngStream::new(1, 0)).unwrap();
        let b = sample_stable(&p, 64, RngStream::new(1, 0)).unwrap();
        let c = sample_stable(&p, 64, RngStream::new(1, 1)).unwrap();
        let d = sample_stable(&p, 64, RngStream::new(2, 0)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn single_step_path_is_one_draw() {
        let p = params(1.5, 1.0, 0.0);
        let stream = RngStream::new(11, 4);
        let path = simulate_path(&p, 1.0, 1, stream).unwrap();
        let draw = sample_stable(&p, 1, stream).unwrap();
        assert_eq!(path.values(), &[0.0, draw[0]]);
    }

    #[test]
    fn coarsening_keeps_every_other_point() {
        let p = params(2.0, 0.5, 0.0);
        let path = simulate_path(&p, 2.0, 8, RngStream::new(0, 0)).unwrap();
        let coarse = path.coarsen(2).unwrap();
        assert_eq!(coarse.n_steps(), 4);
        assert_eq!(coarse.values()[3], path.values()[6]);
        assert!(path.coarsen(3).is_err());
    }

    #[test]
    fn path_constructor_checks_origin() {
        let p = params(2.0, 0.5, 0.0);
        assert!(PathGrid::from_values(p, 1.0, alloc::vec![0.1, 0.2]).is_err());
        assert!(PathGrid::from_values(p, 1.0, alloc::vec![0.0]).is_err());
        assert!(simulate_path(&p, 0.0, 4, RngStream::new(0, 0)).is_err());
        assert!(simulate_path(&p, 1.0, 0, RngStream::new(0, 0)).is_err());
    }
}
