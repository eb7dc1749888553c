//! Discrete Bass diffusion.
//!
//! Annual recursion, launch-year cumulative zero:
//!
//! ```text
//! n(t)   = p·N̄ + (q − p)·N(t) − (q / N̄)·N(t)²
//! N(t+1) = N(t) + n(t)
//! ```
//!
//! `n(t)` is evaluated from the cumulative count at the *start* of year `t`
//! and is clamped into `[0, N̄ − N(t)]`, so saturation is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::level::AutomationLevel;
use crate::series::RegistrationSeries;

/// Bass coefficients and estimation window for one level in one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BassParams {
    /// Coefficient of innovation, per year.
    pub p: f64,
    /// Coefficient of imitation, per year.
    pub q: f64,
    /// N̄, in vehicles.
    pub market_potential: f64,
    pub period_start: i32,
    pub period_end: i32,
}

impl BassParams {
    pub fn new(p: f64, q: f64, market_potential: f64, period_start: i32, period_end: i32) -> Result<Self> {
        let params = Self {
            p,
            q,
            market_potential,
            period_start,
            period_end,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::InvalidParams(format!("p must be > 0, got {}", self.p)));
        }
        if !(self.q.is_finite() && self.q >= 0.0) {
            return Err(Error::InvalidParams(format!("q must be >= 0, got {}", self.q)));
        }
        if !(self.market_potential.is_finite() && self.market_potential > 0.0) {
            return Err(Error::InvalidParams(format!(
                "market potential must be > 0, got {}",
                self.market_potential
            )));
        }
        if self.period_start > self.period_end {
            return Err(Error::InvalidParams(format!(
                "period start {} is after period end {}",
                self.period_start, self.period_end
            )));
        }
        Ok(())
    }

    pub fn with_q(&self, q: f64) -> Self {
        Self { q, ..*self }
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.period_start..=self.period_end
    }

    pub fn period_len(&self) -> usize {
        (self.period_end - self.period_start + 1) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdoptionState {
    pub year: i32,
    /// n(t), vehicles adopting during the year.
    pub new_adopters: f64,
    /// N after this year's adopters are added.
    pub cumulative_adopters: f64,
}

/// One level's adoption path over its period.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrajectory {
    pub level: AutomationLevel,
    pub states: Vec<AdoptionState>,
    /// `new_adopters / registrations`; may exceed 1 for pathological parameters.
    pub raw_share: Vec<f64>,
    /// Share left to this level after displacement by higher levels.
    pub allocated_share: Vec<f64>,
}

impl LevelTrajectory {
    pub fn first_year(&self) -> i32 {
        self.states.first().map(|s| s.year).unwrap_or(0)
    }

    pub fn last_year(&self) -> i32 {
        self.states.last().map(|s| s.year).unwrap_or(-1)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn index(&self, year: i32) -> Option<usize> {
        if self.states.is_empty() || year < self.first_year() || year > self.last_year() {
            None
        } else {
            Some((year - self.first_year()) as usize)
        }
    }

    pub fn state(&self, year: i32) -> Option<&AdoptionState> {
        self.index(year).map(|i| &self.states[i])
    }

    /// Raw share in `year`, zero outside the period.
    pub fn raw_share_at(&self, year: i32) -> f64 {
        self.index(year).map_or(0.0, |i| self.raw_share[i])
    }

    /// Allocated share in `year`, zero outside the period.
    pub fn allocated_share_at(&self, year: i32) -> f64 {
        self.index(year).map_or(0.0, |i| self.allocated_share[i])
    }

    pub fn final_cumulative(&self) -> f64 {
        self.states.last().map_or(0.0, |s| s.cumulative_adopters)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.states.iter().map(|s| s.year)
    }
}

/// Raw (unclamped) annual adopter increment at cumulative level `cumulative`.
pub fn bass_increment(params: &BassParams, cumulative: f64) -> Result<f64> {
    let potential = params.market_potential;
    if !(cumulative >= 0.0 && cumulative <= potential) {
        return Err(Error::Domain(format!(
            "cumulative adopters {cumulative} outside [0, {potential}]"
        )));
    }
    let BassParams { p, q, .. } = *params;
    Ok(p * potential + (q - p) * cumulative - (q / potential) * cumulative * cumulative)
}

/// Runs the annual recursion over the parameter period. `allocated_share`
/// starts out equal to `raw_share`.
pub fn simulate_level(
    level: AutomationLevel,
    params: &BassParams,
    registrations: &RegistrationSeries,
) -> Result<LevelTrajectory> {
    params.validate()?;
    registrations.require_span(params.period_start, params.period_end)?;

    let potential = params.market_potential;
    let mut states = Vec::with_capacity(params.period_len());
    let mut raw_share = Vec::with_capacity(params.period_len());
    let mut cumulative = 0.0_f64;

    for year in params.years() {
        let increment = bass_increment(params, cumulative)?;
        let mut adopters = increment.min(potential - cumulative).max(0.0);
        let mut next = cumulative + adopters;
        // Rounding in `cumulative + (potential - cumulative)` can land one ulp
        // above N̄; step the increment down until the sum stays in range.
        while next > potential && adopters > 0.0 {
            adopters = f64::from_bits(adopters.to_bits() - 1);
            next = cumulative + adopters;
        }
        cumulative = next;

        let registered = registrations.require(year)?;
        states.push(AdoptionState {
            year,
            new_adopters: adopters,
            cumulative_adopters: cumulative,
        });
        raw_share.push(adopters / registered);
    }

    Ok(LevelTrajectory {
        level,
        states,
        allocated_share: raw_share.clone(),
        raw_share,
    })
}

/// Continuous-time Bass CDF: fraction of N̄ adopted `t` years after launch.
pub fn bass_closed_form(p: f64, q: f64, t: f64) -> Result<f64> {
    if !(p > 0.0) || !(p + q > 0.0) {
        return Err(Error::Domain(format!(
            "closed form needs p > 0 and p + q > 0, got p={p}, q={q}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time since launch must be >= 0, got {t}")));
    }
    let decay = (-(p + q) * t).exp();
    Ok((1.0 - decay) / (1.0 + (q / p) * decay))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_series(first: i32, last: i32, count: f64) -> RegistrationSeries {
        RegistrationSeries::new(first, vec![count; (last - first + 1) as usize]).unwrap()
    }

    fn l3_baseline() -> BassParams {
        BassParams::new(0.002, 0.335, 143_879_000.0, 2025, 2041).unwrap()
    }

    #[test]
    fn increment_at_zero_is_innovation_term() {
        let n = bass_increment(&l3_baseline(), 0.0).unwrap();
        assert!((n - 287_758.0).abs() < 1e-6);
    }

    #[test]
    fn increment_vanishes_at_market_potential() {
        for params in [
            l3_baseline(),
            BassParams::new(0.01, 0.0, 5.0e6, 2020, 2030).unwrap(),
            BassParams::new(0.002, 1.7, 9.9e7, 2020, 2030).unwrap(),
        ] {
            let n = bass_increment(&params, params.market_potential).unwrap();
            assert!(n.abs() <= 1e-9 * params.market_potential, "{n}");
        }
    }

    #[test]
    fn increment_at_ten_million_matches_hand_evaluation() {
        // 0.002·143,879,000 + 0.333·10,000,000 − (0.335/143,879,000)·10¹⁴
        //   = 287,758 + 3,330,000 − 232,834.5345...
        let expected = 287_758.0 + 3_330_000.0 - 0.335e14 / 143_879_000.0;
        let n = bass_increment(&l3_baseline(), 10_000_000.0).unwrap();
        assert!((n - expected).abs() < 1e-6);
        assert!((n - 3_384_923.465_425_8).abs() < 1e-3);
    }

    #[test]
    fn increment_rejects_out_of_domain_cumulative() {
        let params = l3_baseline();
        assert!(matches!(bass_increment(&params, -1.0), Err(Error::Domain(_))));
        assert!(matches!(
            bass_increment(&params, params.market_potential * 1.01),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn params_validation() {
        assert!(BassParams::new(0.0, 0.3, 1e6, 2020, 2030).is_err());
        assert!(BassParams::new(0.002, -0.1, 1e6, 2020, 2030).is_err());
        assert!(BassParams::new(0.002, 0.3, 0.0, 2020, 2030).is_err());
        assert!(BassParams::new(0.002, 0.3, 1e6, 2031, 2030).is_err());
        assert!(BassParams::new(0.002, 0.0, 1e6, 2030, 2030).is_ok());
    }

    #[test]
    fn no_imitation_decays_geometrically() {
        // q = 0 leaves n = p·(N̄ − N): every year removes the fraction p of
        // what is left, so n(t) = p·N̄·(1 − p)^t.
        let params = BassParams::new(0.1, 0.0, 1.0e6, 2020, 2035).unwrap();
        let traj = simulate_level(AutomationLevel::L2, &params, &flat_series(2020, 2035, 1.0e7)).unwrap();
        for (t, s) in traj.states.iter().enumerate() {
            let expected = 0.1 * 1.0e6 * 0.9_f64.powi(t as i32);
            assert!((s.new_adopters - expected).abs() <= 1e-9 * expected, "{t}");
        }
    }

    #[test]
    fn no_imitation_with_huge_potential_is_nearly_constant() {
        let params = BassParams::new(0.002, 0.0, 1.0e12, 2020, 2030).unwrap();
        let traj = simulate_level(AutomationLevel::L2, &params, &flat_series(2020, 2030, 1.0e7)).unwrap();
        for s in &traj.states {
            assert!((s.new_adopters / 2.0e9 - 1.0).abs() < 0.025);
        }
        assert_eq!(traj.states[0].new_adopters, 2.0e9);
    }

    #[test]
    fn clamp_saturates_exactly() {
        // A single step would overshoot N̄ more than threefold.
        let params = BassParams::new(0.5, 1.9, 1.0e6, 2020, 2025).unwrap();
        let traj = simulate_level(AutomationLevel::L2, &params, &flat_series(2020, 2025, 1.0e7)).unwrap();
        assert_eq!(traj.states[0].new_adopters, 500_000.0);
        assert_eq!(traj.states[1].cumulative_adopters, 1.0e6);
        assert!(traj.states[2..].iter().all(|s| s.new_adopters == 0.0));
    }

    #[test]
    fn allocated_share_starts_equal_to_raw() {
        let traj = simulate_level(AutomationLevel::L3, &l3_baseline(), &RegistrationSeries::reference()).unwrap();
        assert_eq!(traj.raw_share, traj.allocated_share);
        assert_eq!(traj.first_year(), 2025);
        assert_eq!(traj.last_year(), 2041);
    }

    #[test]
    fn missing_registration_year_is_reported() {
        let params = BassParams::new(0.002, 0.3, 1e8, 2020, 2030).unwrap();
        let series = flat_series(2020, 2027, 1.0e7);
        assert!(matches!(
            simulate_level(AutomationLevel::L3, &params, &series),
            Err(Error::MissingYear { year: 2028 })
        ));
    }

    #[test]
    fn pathological_params_report_share_above_one() {
        let params = BassParams::new(0.5, 0.0, 1.0e8, 2020, 2021).unwrap();
        let traj = simulate_level(AutomationLevel::L4, &params, &flat_series(2020, 2021, 1.0e7)).unwrap();
        assert!(traj.raw_share[0] > 1.0);
    }

    #[test]
    fn closed_form_edges() {
        assert_eq!(bass_closed_form(0.002, 0.3, 0.0).unwrap(), 0.0);
        assert!((bass_closed_form(0.002, 0.3, 200.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(bass_closed_form(0.002, 0.3, -1.0).is_err());
        assert!(bass_closed_form(0.0, 0.3, 1.0).is_err());
    }

    #[test]
    fn share_values_outside_period_are_zero() {
        let traj = simulate_level(AutomationLevel::L3, &l3_baseline(), &RegistrationSeries::reference()).unwrap();
        assert_eq!(traj.allocated_share_at(2024), 0.0);
        assert_eq!(traj.raw_share_at(2042), 0.0);
        assert!(traj.raw_share_at(2025) > 0.0);
    }
}
