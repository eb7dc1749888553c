//! Scenario → cost curves → value added, for one resolved scenario.

use std::collections::BTreeMap;

use crate::config::ResolvedScenario;
use crate::costs::{build_cost_curve, AnchorRule, CostCurve};
use crate::economics::{value_added, VaBasis, ValueAddedTable};
use crate::error::{Error, Result};
use crate::level::AutomationLevel;
use crate::scenario::{entry_year, run_scenario, Horizon, ScenarioRun};
use crate::series::RegistrationSeries;

/// Default value-added accounting window.
pub const VA_FIRST_YEAR: i32 = 2020;
pub const VA_LAST_YEAR: i32 = 2050;

pub fn default_va_horizon() -> Horizon {
    Horizon {
        first: VA_FIRST_YEAR,
        last: VA_LAST_YEAR,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub run: ScenarioRun,
    pub cost_curves: BTreeMap<AutomationLevel, CostCurve>,
    pub va: ValueAddedTable,
}

/// One cost curve per non-L0 trajectory of `run`.
pub fn cost_curves_for(
    resolved: &ResolvedScenario,
    run: &ScenarioRun,
    registrations: &RegistrationSeries,
) -> Result<BTreeMap<AutomationLevel, CostCurve>> {
    let mut curves = BTreeMap::new();
    for (&level, traj) in &run.trajectories {
        if level == AutomationLevel::L0 {
            continue;
        }
        let params = resolved
            .costs
            .get(&level)
            .ok_or_else(|| Error::Config(format!("no cost parameters for {level}")))?;
        let rule = match resolved.spec.level(level) {
            Some(config) => AnchorRule {
                mass_market_year_override: config.mass_market_year_override,
                entry_year: Some(config.entry_year),
            },
            None => AnchorRule {
                mass_market_year_override: None,
                entry_year: entry_year(traj).or(traj.states.first().map(|s| s.year)),
            },
        };
        curves.insert(level, build_cost_curve(params, traj, registrations, rule)?);
    }
    Ok(curves)
}

pub fn evaluate(
    resolved: &ResolvedScenario,
    registrations: &RegistrationSeries,
    va_horizon: Horizon,
    basis: VaBasis,
) -> Result<ScenarioOutcome> {
    let run = run_scenario(&resolved.spec, registrations)?;
    let cost_curves = cost_curves_for(resolved, &run, registrations)?;
    let va = value_added(
        &resolved.spec.name,
        &run.trajectories,
        &cost_curves,
        registrations,
        va_horizon,
        basis,
    )?;
    Ok(ScenarioOutcome { run, cost_curves, va })
}
