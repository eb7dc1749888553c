//! Exogenous calibration: solve q so a level's simulated share hits a
//! published fixed point, and size market potentials from registrations.

use serde::{Deserialize, Serialize};

use crate::diffusion::{simulate_level, BassParams};
use crate::error::{Error, Result};
use crate::level::AutomationLevel;
use crate::series::RegistrationSeries;

/// Share of new registrations a level should reach in a given year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub year: i32,
    pub target_share: f64,
}

impl FixedPoint {
    pub fn validate_for(&self, params: &BassParams) -> Result<()> {
        if !(self.target_share > 0.0 && self.target_share < 1.0) {
            return Err(Error::InvalidParams(format!(
                "fixed-point share must lie in (0, 1), got {}",
                self.target_share
            )));
        }
        if self.year <= params.period_start || self.year >= params.period_end {
            return Err(Error::InvalidParams(format!(
                "fixed-point year {} must lie strictly inside the period {}-{}",
                self.year, params.period_start, params.period_end
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Accepted |achieved − target| on the share.
    pub tolerance: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    pub max_iterations: u32,
    /// Bisection keeps halving until the q bracket is narrower than this,
    /// so the returned q is pinned well below the share tolerance.
    pub q_resolution: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            q_lo: 0.0,
            q_hi: 2.0,
            max_iterations: 200,
            q_resolution: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub q: f64,
    pub achieved_share: f64,
    pub iterations: u32,
    pub residual: f64,
}

/// Raw share of new registrations at `year` for the given parameters.
pub fn share_at(params: &BassParams, registrations: &RegistrationSeries, year: i32) -> Result<f64> {
    let traj = simulate_level(AutomationLevel::L0, params, registrations)?;
    traj.state(year)
        .map(|_| traj.raw_share_at(year))
        .ok_or(Error::MissingYear { year })
}

/// Bisection on q → raw_share(fixed_point.year).
///
/// The share at a fixed year rises with q until the market saturates before
/// that year, after which it falls again. When the upper bound already lies
/// on the falling side (share below target) it is halved towards `q_lo`
/// until the target is bracketed; this keeps the default bound usable for
/// fixed points late in a period.
pub fn calibrate_q(
    base: &BassParams,
    registrations: &RegistrationSeries,
    fixed_point: FixedPoint,
    options: &CalibrationOptions,
) -> Result<CalibrationResult> {
    base.with_q(options.q_lo.max(0.0)).validate()?;
    fixed_point.validate_for(base)?;
    if !(options.tolerance > 0.0) {
        return Err(Error::InvalidParams("tolerance must be > 0".into()));
    }
    if !(options.q_lo >= 0.0 && options.q_hi > options.q_lo) {
        return Err(Error::InvalidParams(format!(
            "q bounds must satisfy 0 <= q_lo < q_hi, got [{}, {}]",
            options.q_lo, options.q_hi
        )));
    }

    let target = fixed_point.target_share;
    let share = |q: f64| share_at(&base.with_q(q), registrations, fixed_point.year);

    let mut lo = options.q_lo;
    let mut hi = options.q_hi;
    let share_lo = share(lo)?;
    let mut share_hi = share(hi)?;

    let bracket_error = |share_hi: f64| Error::Bracket {
        year: fixed_point.year,
        target,
        q_lo: options.q_lo,
        q_hi: options.q_hi,
        share_lo,
        share_hi,
    };

    if share_lo > target {
        return Err(bracket_error(share_hi));
    }
    let mut contractions = 0;
    while share_hi < target {
        if contractions >= 64 {
            return Err(bracket_error(share_hi));
        }
        hi = lo + 0.5 * (hi - lo);
        share_hi = share(hi)?;
        contractions += 1;
        if hi - lo < options.q_resolution {
            return Err(bracket_error(share_hi));
        }
    }

    let mut best = if (share_lo - target).abs() <= (share_hi - target).abs() {
        (lo, share_lo)
    } else {
        (hi, share_hi)
    };
    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        let mid = lo + 0.5 * (hi - lo);
        let s = share(mid)?;
        if (s - target).abs() <= (best.1 - target).abs() {
            best = (mid, s);
        }
        if s == target {
            break;
        }
        if s < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= options.q_resolution {
            break;
        }
    }

    let (q, _) = best;
    let achieved_share = share(q)?;
    let residual = (achieved_share - target).abs();
    if residual > options.tolerance {
        return Err(Error::NonConvergence {
            iterations,
            q,
            residual,
        });
    }
    Ok(CalibrationResult {
        q,
        achieved_share,
        iterations,
        residual,
    })
}

/// N̄ as a share of all registrations within the period.
pub fn derive_market_potential(
    registrations: &RegistrationSeries,
    period_start: i32,
    period_end: i32,
    potential_share: f64,
) -> Result<f64> {
    if !(potential_share > 0.0 && potential_share <= 1.0) {
        return Err(Error::Domain(format!(
            "potential share must lie in (0, 1], got {potential_share}"
        )));
    }
    if period_start > period_end {
        return Err(Error::Domain(format!(
            "period start {period_start} is after period end {period_end}"
        )));
    }
    Ok(potential_share * registrations.period_sum(period_start, period_end)?)
}
