//! CSV emission. Every file starts with a `# avdiff run <hash>` comment line
//! naming the run manifest hash, followed by a fixed header.

use crate::diffusion::LevelTrajectory;
use crate::economics::{ScenarioComparison, ValueAddedTable};
use crate::error::Result;
use crate::level::AutomationLevel;
use crate::pipeline::ScenarioOutcome;
use crate::scenario::{mass_market_year, retirement_year, ScenarioRun, ScenarioSpec, ENTRY_SHARE};
use crate::series::RegistrationSeries;

pub const TRAJECTORY_HEADER: [&str; 6] = [
    "year",
    "level",
    "new_adopters",
    "cumulative",
    "raw_share",
    "allocated_share",
];

pub const VA_HEADER: [&str; 7] = [
    "year",
    "level",
    "vehicles",
    "unit_price_eur",
    "va_eur",
    "va_hw_eur",
    "va_sw_eur",
];

/// Half-up rounding to whole vehicles.
pub fn round_vehicles(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

fn run_line(manifest_hash: &str) -> String {
    format!("# avdiff run {manifest_hash}\n")
}

fn finish(mut text: String, wtr: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = wtr.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    text.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(text)
}

/// One row per level and horizon year inside the level's period.
/// Bass levels report their own n(t)/N(t); pooled levels report allocated vehicles.
pub fn trajectories_csv(run: &ScenarioRun, manifest_hash: &str) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(TRAJECTORY_HEADER)?;
    for year in run.horizon.years() {
        for (level, traj) in &run.trajectories {
            let Some(state) = traj.state(year) else {
                continue;
            };
            wtr.write_record([
                year.to_string(),
                level.to_string(),
                round_vehicles(state.new_adopters).to_string(),
                round_vehicles(state.cumulative_adopters).to_string(),
                traj.raw_share_at(year).to_string(),
                traj.allocated_share_at(year).to_string(),
            ])?;
        }
    }
    finish(run_line(manifest_hash), wtr)
}

pub fn va_csv(table: &ValueAddedTable, manifest_hash: &str) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(VA_HEADER)?;
    for cell in &table.cells {
        wtr.write_record([
            cell.year.to_string(),
            cell.level.to_string(),
            round_vehicles(cell.vehicles).to_string(),
            cell.unit_value.to_string(),
            cell.va_total.to_string(),
            cell.va_hw.to_string(),
            cell.va_sw.to_string(),
        ])?;
    }
    finish(run_line(manifest_hash), wtr)
}

/// Bass coefficients of the given scenarios.
pub fn presets_csv(specs: &[&ScenarioSpec], manifest_hash: &str) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "scenario",
        "level",
        "p",
        "q",
        "market_potential",
        "period_start",
        "period_end",
        "entry_year",
        "fixed_point_year",
        "fixed_point_share",
    ])?;
    for spec in specs {
        for config in spec.levels.values() {
            let b = &config.bass;
            wtr.write_record([
                spec.name.clone(),
                config.level.to_string(),
                b.p.to_string(),
                b.q.to_string(),
                b.market_potential.to_string(),
                b.period_start.to_string(),
                b.period_end.to_string(),
                config.entry_year.to_string(),
                config.fixed_point.map(|f| f.year.to_string()).unwrap_or_default(),
                config
                    .fixed_point
                    .map(|f| f.target_share.to_string())
                    .unwrap_or_default(),
            ])?;
        }
    }
    finish(run_line(manifest_hash), wtr)
}

fn first_reaching(traj: &LevelTrajectory, threshold: f64) -> Option<i32> {
    crate::scenario::first_year_reaching(traj, threshold)
}

fn opt(year: Option<i32>) -> String {
    year.map(|y| y.to_string()).unwrap_or_default()
}

/// Declared versus achieved milestones per scenario and Bass level.
pub fn milestones_csv(outcomes: &[(&ScenarioSpec, &ScenarioOutcome)], manifest_hash: &str) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "scenario",
        "level",
        "declared_entry_year",
        "entry_year",
        "mass_market_year",
        "off_market_year",
        "anchor_source",
        "anchor_volume",
    ])?;
    for (spec, outcome) in outcomes {
        for (level, traj) in &outcome.run.trajectories {
            if *level == AutomationLevel::L0 {
                continue;
            }
            let declared = spec.level(*level).map(|c| c.entry_year);
            let curve = &outcome.cost_curves[level];
            wtr.write_record([
                spec.name.clone(),
                level.to_string(),
                opt(declared),
                opt(first_reaching(traj, ENTRY_SHARE)),
                opt(mass_market_year(traj)),
                opt(retirement_year(traj, outcome.run.horizon)),
                serde_json::to_value(curve.anchor_source)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                curve.anchor_volume.to_string(),
            ])?;
        }
    }
    finish(run_line(manifest_hash), wtr)
}

/// Horizon totals in EUR and billions, one row per scenario and basis.
pub fn summary_csv(comparisons: &[&ScenarioComparison], manifest_hash: &str) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["scenario", "basis", "horizon", "va_eur", "va_billion_eur"])?;
    for cmp in comparisons {
        for total in &cmp.totals {
            wtr.write_record([
                total.scenario.clone(),
                cmp.basis.to_string(),
                format!("{}-{}", cmp.horizon_first, cmp.horizon_last),
                total.total_eur.to_string(),
                format!("{:.2}", total.total_eur / 1e9),
            ])?;
        }
    }
    finish(run_line(manifest_hash), wtr)
}

/// Registration series as written next to the outputs.
pub fn registrations_csv(series: &RegistrationSeries, manifest_hash: &str) -> String {
    let mut text = run_line(manifest_hash);
    text.push_str(&series.to_csv_string());
    text
}
