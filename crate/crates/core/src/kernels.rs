//! Per-path kernels that draw increments on the fly and stop as soon as the
//! quantity of interest is known.
//!
//! Each kernel performs the same floating-point operations, in the same
//! order, as the corresponding grid functions applied to
//! [`simulate_path`](crate::stable::simulate_path) with the same stream, so
//! the results agree bit for bit.

use crate::error::{domain, Error, Result};
use crate::functionals::{
    local_time_from_count, ExcursionPassage, ExcursionTracker, FunctionalAccumulator, FunctionalParams, XiValue,
};
use crate::stable::{Increments, RngStream, StableParams};

/// A uniform grid `jΔ`, `Δ = horizon / n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Grid {
    pub horizon: f64,
    pub n_steps: usize,
}

impl Grid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(domain("horizon", horizon, "positive and finite"));
        }
        if n_steps == 0 {
            return Err(domain("n_steps", 0.0, "at least one step"));
        }
        Ok(Self { horizon, n_steps })
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }
}

// A non-finite value never crosses anything and persists, so checking the
// final state catches it.
fn finite(z: f64, stream: RngStream) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(stream.stream_id))
    }
}

/// First-passage times on the fine grid and on the grid of every second
/// point of the same path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGridPassage {
    /// Upper bracket time on the fine grid, `None` when censored.
    pub fine: Option<f64>,
    pub coarse: Option<f64>,
    /// `Z` at the fine upper bracket time.
    pub z_at_passage: Option<f64>,
}

/// First passage above `level` of `A^(β)` (or of `Z` itself when `fparams`
/// is `None`), observed at both resolutions. `grid.n_steps` must be even.
pub fn two_grid_passage(
    params: &StableParams,
    fparams: Option<&FunctionalParams>,
    level: f64,
    grid: Grid,
    stream: RngStream,
) -> Result<TwoGridPassage> {
    if !grid.n_steps.is_multiple_of(2) {
        return Err(domain("n_steps", grid.n_steps as f64, "even"));
    }
    if !(level > 0.0) {
        return Err(domain("level", level, "positive"));
    }
    let dt = grid.dt();
    let dt_coarse = Grid::new(grid.horizon, grid.n_steps / 2)?.dt();
    let mut out = TwoGridPassage {
        fine: None,
        coarse: None,
        z_at_passage: None,
    };
    let mut fine = fparams.map(|f| FunctionalAccumulator::new(f.integrand(), dt));
    let mut coarse = fparams.map(|f| FunctionalAccumulator::new(f.integrand(), dt_coarse));
    let mut z = 0.0;
    let mut z_even = 0.0;
    for (j, dz) in (1..=grid.n_steps).zip(Increments::new(params, dt, stream)) {
        let z_prev = z;
        z += dz;
        if out.fine.is_none() {
            let x = match fine.as_mut() {
                Some(acc) => {
                    acc.push(z_prev);
                    acc.value()
                }
                None => z,
            };
            if x > level {
                out.fine = Some(j as f64 * dt);
                out.z_at_passage = Some(z);
            }
        }
        if j % 2 == 0 {
            if out.coarse.is_none() {
                let x = match coarse.as_mut() {
                    Some(acc) => {
                        acc.push(z_even);
                        acc.value()
                    }
                    None => z,
                };
                if x > level {
                    out.coarse = Some((j / 2) as f64 * dt_coarse);
                }
            }
            z_even = z;
            if out.fine.is_some() && out.coarse.is_some() {
                break;
            }
        }
    }
    finite(z, stream)?;
    Ok(out)
}

/// `A^(β)` at the horizon, `Z` at the horizon and the grid supremum of `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSummary {
    pub functional: f64,
    pub z_end: f64,
    pub z_sup: f64,
}

pub fn path_summary(
    params: &StableParams,
    fparams: &FunctionalParams,
    grid: Grid,
    stream: RngStream,
) -> Result<PathSummary> {
    let dt = grid.dt();
    let mut acc = FunctionalAccumulator::new(fparams.integrand(), dt);
    let mut z = 0.0;
    let mut sup: f64 = 0.0;
    for dz in Increments::new(params, dt, stream).take(grid.n_steps) {
        acc.push(z);
        z += dz;
        sup = sup.max(z);
    }
    finite(z, stream)?;
    Ok(PathSummary {
        functional: acc.value(),
        z_end: z,
        z_sup: sup,
    })
}

/// `ξ` at a local-time level, or the local time and functional reached by
/// the end of the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiOutcome {
    Reached(XiValue),
    Censored { local_time: f64, at_cap: XiValue },
}

/// Runs the path on steps of size `dt` until the occupation-density local
/// time at 0 (box half-width `bandwidth`) exceeds `level`, for at most
/// `max_steps` steps.
pub fn xi_at_local_time(
    params: &StableParams,
    fparams: &FunctionalParams,
    dt: f64,
    bandwidth: f64,
    level: f64,
    max_steps: usize,
    stream: RngStream,
) -> Result<XiOutcome> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(domain("bandwidth", bandwidth, "positive and finite"));
    }
    if !(level >= 0.0) {
        return Err(domain("level", level, ">= 0"));
    }
    let mut acc = FunctionalAccumulator::new(fparams.integrand(), dt);
    let mut count = 0u64;
    let mut z = 0.0;
    let mut steps = 0;
    for (j, dz) in (1..=max_steps).zip(Increments::new(params, dt, stream)) {
        steps = j;
        acc.push(z);
        if z.abs() < bandwidth {
            count += 1;
        }
        z += dz;
        if local_time_from_count(count, dt, bandwidth) > level {
            return Ok(XiOutcome::Reached(XiValue {
                tau: j as f64 * dt,
                xi: acc.value(),
                plus: acc.plus(),
                minus: acc.minus(),
            }));
        }
    }
    finite(z, stream)?;
    Ok(XiOutcome::Censored {
        local_time: local_time_from_count(count, dt, bandwidth),
        at_cap: XiValue {
            tau: steps as f64 * dt,
            xi: acc.value(),
            plus: acc.plus(),
            minus: acc.minus(),
        },
    })
}

/// Streams [`ExcursionTracker`] for at most `max_steps` steps.
pub fn excursion_kernel(
    params: &StableParams,
    fparams: &FunctionalParams,
    dt: f64,
    level: f64,
    jump_threshold: f64,
    max_steps: usize,
    stream: RngStream,
) -> Result<ExcursionPassage> {
    if !(level > 0.0) {
        return Err(domain("level", level, "positive"));
    }
    let mut tracker = ExcursionTracker::new(fparams.integrand(), dt, level, jump_threshold);
    let mut z = 0.0;
    for dz in Increments::new(params, dt, stream).take(max_steps) {
        z += dz;
        if tracker.advance(z) {
            break;
        }
    }
    finite(z, stream)?;
    Ok(tracker.finish())
}
