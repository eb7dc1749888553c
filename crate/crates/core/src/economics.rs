//! Value added: equipped vehicles times unit value, per year and level.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::costs::CostCurve;
use crate::diffusion::LevelTrajectory;
use crate::error::{Error, Result};
use crate::level::AutomationLevel;
use crate::scenario::Horizon;
use crate::series::RegistrationSeries;

/// Unit value applied to each equipped vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VaBasis {
    /// Production cost plus markup.
    #[default]
    Price,
    /// Production cost only.
    Cost,
}

impl VaBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            VaBasis::Price => "price",
            VaBasis::Cost => "cost",
        }
    }
}

impl fmt::Display for VaBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VaBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "price" => Ok(VaBasis::Price),
            "cost" => Ok(VaBasis::Cost),
            _ => Err(Error::Config(format!("unknown value-added basis '{s}' (price|cost)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VaCell {
    pub year: i32,
    pub level: AutomationLevel,
    pub vehicles: f64,
    /// EUR per vehicle on the table's basis.
    pub unit_value: f64,
    pub va_total: f64,
    pub va_hw: f64,
    pub va_sw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueAddedTable {
    pub scenario_name: String,
    pub horizon: Horizon,
    pub basis: VaBasis,
    /// Digest of the registration series the table was computed from.
    pub registrations_digest: String,
    /// Ordered by year, then level.
    pub cells: Vec<VaCell>,
    pub level_totals: BTreeMap<AutomationLevel, f64>,
    pub horizon_total: f64,
}

impl ValueAddedTable {
    pub fn annual_total(&self, year: i32) -> f64 {
        self.cells.iter().filter(|c| c.year == year).map(|c| c.va_total).sum()
    }

    pub fn annual_totals(&self) -> Vec<(i32, f64)> {
        self.horizon.years().map(|y| (y, self.annual_total(y))).collect()
    }

    pub fn hw_total(&self) -> f64 {
        self.cells.iter().map(|c| c.va_hw).sum()
    }

    pub fn sw_total(&self) -> f64 {
        self.cells.iter().map(|c| c.va_sw).sum()
    }

    pub fn cell(&self, year: i32, level: AutomationLevel) -> Option<&VaCell> {
        self.cells.iter().find(|c| c.year == year && c.level == level)
    }
}

/// Value added over `horizon` for L1–L5. Every non-L0 trajectory needs a
/// cost curve and vice versa.
pub fn value_added(
    scenario_name: &str,
    trajectories: &BTreeMap<AutomationLevel, LevelTrajectory>,
    cost_curves: &BTreeMap<AutomationLevel, CostCurve>,
    registrations: &RegistrationSeries,
    horizon: Horizon,
    basis: VaBasis,
) -> Result<ValueAddedTable> {
    let traj_levels: Vec<_> = trajectories
        .keys()
        .copied()
        .filter(|&l| l != AutomationLevel::L0)
        .collect();
    let curve_levels: Vec<_> = cost_curves.keys().copied().collect();
    if traj_levels != curve_levels {
        return Err(Error::LevelMismatch(format!(
            "trajectories {traj_levels:?} vs cost curves {curve_levels:?}"
        )));
    }
    registrations.require_span(horizon.first, horizon.last)?;

    let mut cells = Vec::new();
    let mut level_totals: BTreeMap<AutomationLevel, f64> = traj_levels.iter().map(|&l| (l, 0.0)).collect();
    let mut horizon_total = 0.0;

    for year in horizon.years() {
        let registered = registrations.require(year)?;
        for &level in &traj_levels {
            let curve = &cost_curves[&level];
            let Some(point) = curve.point(year) else {
                continue;
            };
            let vehicles = trajectories[&level].allocated_share_at(year) * registered;
            let unit_value = match basis {
                VaBasis::Price => point.unit_price,
                VaBasis::Cost => point.unit_production_cost,
            };
            let va_total = vehicles * unit_value;
            let (va_hw, va_sw) = curve.params.split(va_total);
            *level_totals.get_mut(&level).expect("level present") += va_total;
            horizon_total += va_total;
            cells.push(VaCell {
                year,
                level,
                vehicles,
                unit_value,
                va_total,
                va_hw,
                va_sw,
            });
        }
    }

    Ok(ValueAddedTable {
        scenario_name: scenario_name.to_string(),
        horizon,
        basis,
        registrations_digest: crate::manifest::digest_hex(registrations.to_csv_string().as_bytes()),
        cells,
        level_totals,
        horizon_total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioTotal {
    pub scenario: String,
    pub total_eur: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioComparison {
    pub horizon_first: i32,
    pub horizon_last: i32,
    pub basis: VaBasis,
    pub totals: Vec<ScenarioTotal>,
    /// `slow <= baseline <= fast`, when all three are present.
    pub ordered: Option<bool>,
    /// `slow < baseline < fast`, when all three are present.
    pub strictly_ordered: Option<bool>,
}

impl ScenarioComparison {
    pub fn total(&self, scenario: &str) -> Option<f64> {
        self.totals.iter().find(|t| t.scenario == scenario).map(|t| t.total_eur)
    }
}

/// Horizon totals of several tables plus the slow/baseline/fast ordering.
pub fn compare_scenarios(tables: &[&ValueAddedTable]) -> Result<ScenarioComparison> {
    if tables.len() < 2 {
        return Err(Error::Config(format!(
            "comparison needs at least 2 value-added tables, got {}",
            tables.len()
        )));
    }
    let first = tables[0];
    for t in &tables[1..] {
        if t.horizon != first.horizon {
            return Err(Error::HorizonMismatch(format!(
                "{} covers {} but {} covers {}",
                first.scenario_name, first.horizon, t.scenario_name, t.horizon
            )));
        }
        if t.registrations_digest != first.registrations_digest {
            return Err(Error::HorizonMismatch(format!(
                "{} and {} use different registration series",
                first.scenario_name, t.scenario_name
            )));
        }
        if t.basis != first.basis {
            return Err(Error::Config(format!(
                "{} uses {} basis but {} uses {}",
                first.scenario_name, first.basis, t.scenario_name, t.basis
            )));
        }
    }

    let totals: Vec<ScenarioTotal> = tables
        .iter()
        .map(|t| ScenarioTotal {
            scenario: t.scenario_name.clone(),
            total_eur: t.horizon_total,
        })
        .collect();
    let find = |name: &str| totals.iter().find(|t| t.scenario == name).map(|t| t.total_eur);
    let (ordered, strictly_ordered) = match (find("slow"), find("baseline"), find("fast")) {
        (Some(s), Some(b), Some(f)) => (Some(s <= b && b <= f), Some(s < b && b < f)),
        _ => (None, None),
    };

    Ok(ScenarioComparison {
        horizon_first: first.horizon.first,
        horizon_last: first.horizon.last,
        basis: first.basis,
        totals,
        ordered,
        strictly_ordered,
    })
}
