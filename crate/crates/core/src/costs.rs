//! Experience-curve production costs for automation packages.
//!
//! Cost per vehicle follows `C(V) = C_mm · (1 − lr)^log2(V / V_mm)`, i.e. a
//! fixed reduction per doubling of cumulative volume, anchored at the volume
//! reached in the mass-market entry year. The curve is applied backwards too
//! (uncapped) and forwards down to `floor_ratio · C_mm`.

use serde::{Deserialize, Serialize};

use crate::diffusion::LevelTrajectory;
use crate::error::{Error, Result};
use crate::level::AutomationLevel;
use crate::scenario::mass_market_year;
use crate::series::RegistrationSeries;

pub const DEFAULT_LEARNING_RATE: f64 = 0.20;
pub const DEFAULT_FLOOR_RATIO: f64 = 0.30;
pub const DEFAULT_MARKUP: f64 = 0.50;
/// Fallback anchor: this share of registrations `FALLBACK_ANCHOR_OFFSET` years after entry.
pub const FALLBACK_ANCHOR_SHARE: f64 = 0.10;
pub const FALLBACK_ANCHOR_OFFSET: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub level: AutomationLevel,
    /// Production cost per vehicle at mass-market entry, 2022 EUR.
    pub mass_market_cost: f64,
    pub learning_rate: f64,
    pub floor_ratio: f64,
    pub markup: f64,
    pub hw_share: f64,
    pub sw_share: f64,
}

impl CostParams {
    /// Package cost and hardware share per level; `None` for L0.
    pub fn default_for(level: AutomationLevel) -> Option<Self> {
        let (cost, hw) = match level {
            AutomationLevel::L0 => return None,
            AutomationLevel::L1 => (814.0, 0.80),
            AutomationLevel::L2 => (1_628.0, 0.80),
            AutomationLevel::L3 => (3_579.0, 0.65),
            AutomationLevel::L4 => (6_301.0, 0.50),
            AutomationLevel::L5 => (10_934.0, 0.50),
        };
        Some(Self {
            level,
            mass_market_cost: cost,
            learning_rate: DEFAULT_LEARNING_RATE,
            floor_ratio: DEFAULT_FLOOR_RATIO,
            markup: DEFAULT_MARKUP,
            hw_share: hw,
            sw_share: 1.0 - hw,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(format!("{} costs: {msg}", self.level)));
        if !(self.mass_market_cost.is_finite() && self.mass_market_cost > 0.0) {
            return fail(format!("mass-market cost must be > 0, got {}", self.mass_market_cost));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return fail(format!("learning rate must lie in (0, 1), got {}", self.learning_rate));
        }
        if !(self.floor_ratio > 0.0 && self.floor_ratio <= 1.0) {
            return fail(format!("floor ratio must lie in (0, 1], got {}", self.floor_ratio));
        }
        if !(self.markup.is_finite() && self.markup >= 0.0) {
            return fail(format!("markup must be >= 0, got {}", self.markup));
        }
        if !((0.0..=1.0).contains(&self.hw_share) && (0.0..=1.0).contains(&self.sw_share)) {
            return fail("hardware and software shares must lie in [0, 1]".into());
        }
        if (self.hw_share + self.sw_share - 1.0).abs() > 1e-9 {
            return fail(format!(
                "hardware and software shares must sum to 1, got {} + {}",
                self.hw_share, self.sw_share
            ));
        }
        Ok(())
    }

    pub fn floor(&self) -> f64 {
        self.floor_ratio * self.mass_market_cost
    }

    /// Splits an amount into (hardware, software) so the parts add back to
    /// `amount` exactly: the larger part is multiplied out and the smaller
    /// taken as the (exact) difference.
    pub fn split(&self, amount: f64) -> (f64, f64) {
        if self.hw_share >= self.sw_share {
            let hw = amount * self.hw_share;
            (hw, amount - hw)
        } else {
            let sw = amount * self.sw_share;
            (amount - sw, sw)
        }
    }
}

/// Production cost per vehicle at cumulative volume `cumulative_volume`.
pub fn unit_cost(params: &CostParams, cumulative_volume: f64, mass_market_volume: f64) -> Result<f64> {
    if !(cumulative_volume > 0.0) || !(mass_market_volume > 0.0) {
        return Err(Error::Domain(format!(
            "volumes must be > 0, got cumulative {cumulative_volume}, mass-market {mass_market_volume}"
        )));
    }
    let doublings = (cumulative_volume / mass_market_volume).log2();
    let learned = params.mass_market_cost * (1.0 - params.learning_rate).powf(doublings);
    Ok(learned.max(params.floor()))
}

/// How the mass-market anchor volume was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorSource {
    /// Cumulative volume in the first year at 10% share.
    MassMarketYear,
    /// Cumulative volume in a configured year.
    Override,
    /// 10% of registrations five years after entry.
    EntryFallback,
}

/// Inputs for resolving the anchor beyond the trajectory itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnchorRule {
    pub mass_market_year_override: Option<i32>,
    pub entry_year: Option<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostPoint {
    pub year: i32,
    pub cumulative_volume: f64,
    pub unit_production_cost: f64,
    pub unit_price: f64,
    pub hw_price: f64,
    pub sw_price: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    pub level: AutomationLevel,
    pub params: CostParams,
    pub anchor_year: Option<i32>,
    pub anchor_volume: f64,
    pub anchor_source: AnchorSource,
    pub points: Vec<CostPoint>,
}

impl CostCurve {
    pub fn point(&self, year: i32) -> Option<&CostPoint> {
        let first = self.points.first()?.year;
        if year < first {
            return None;
        }
        self.points.get((year - first) as usize)
    }
}

/// Cost and price per vehicle for every year of `trajectory`, with volume
/// measured as cumulative allocated vehicles (at least one).
pub fn build_cost_curve(
    params: &CostParams,
    trajectory: &LevelTrajectory,
    registrations: &RegistrationSeries,
    rule: AnchorRule,
) -> Result<CostCurve> {
    params.validate()?;
    if params.level != trajectory.level {
        return Err(Error::LevelMismatch(format!(
            "cost parameters for {} applied to {} trajectory",
            params.level, trajectory.level
        )));
    }

    let mut cumulative = Vec::with_capacity(trajectory.len());
    let mut running = 0.0;
    for year in trajectory.years() {
        running += trajectory.allocated_share_at(year) * registrations.require(year)?;
        cumulative.push((year, running));
    }
    let cumulative_at = |year: i32| cumulative.iter().find(|(y, _)| *y == year).map(|&(_, v)| v);

    let anchor_error = |reason: String| Error::Anchor {
        level: trajectory.level,
        reason,
    };

    let (anchor_year, anchor_volume, anchor_source) = if let Some(year) = rule.mass_market_year_override {
        let v =
            cumulative_at(year).ok_or_else(|| anchor_error(format!("override year {year} outside the trajectory")))?;
        (Some(year), v, AnchorSource::Override)
    } else if let Some(year) = mass_market_year(trajectory) {
        (
            Some(year),
            cumulative_at(year).unwrap_or(0.0),
            AnchorSource::MassMarketYear,
        )
    } else {
        let entry = rule
            .entry_year
            .ok_or_else(|| anchor_error("never reaches 10% share and no entry year is known".into()))?;
        let year = (entry + FALLBACK_ANCHOR_OFFSET).min(registrations.last_year());
        let regs = registrations
            .get(year)
            .ok_or_else(|| anchor_error(format!("no registrations for fallback year {year}")))?;
        (None, FALLBACK_ANCHOR_SHARE * regs, AnchorSource::EntryFallback)
    };
    if !(anchor_volume > 0.0) {
        return Err(anchor_error(format!("anchor volume {anchor_volume} is not positive")));
    }

    let mut points = Vec::with_capacity(cumulative.len());
    for (year, volume) in cumulative {
        let volume = volume.max(1.0);
        let cost = unit_cost(params, volume, anchor_volume)?;
        let price = cost * (1.0 + params.markup);
        let (hw_price, sw_price) = params.split(price);
        points.push(CostPoint {
            year,
            cumulative_volume: volume,
            unit_production_cost: cost,
            unit_price: price,
            hw_price,
            sw_price,
        });
    }

    Ok(CostCurve {
        level: trajectory.level,
        params: *params,
        anchor_year,
        anchor_volume,
        anchor_source,
        points,
    })
}
