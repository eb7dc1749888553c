//! Automated-vehicle uptake scenarios for EU27+UK new registrations.
//!
//! Per-level Bass diffusion runs calibrated on single fixed points are
//! combined into scenarios with top-down share displacement, priced through
//! an experience curve, and aggregated into value added.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod config;
pub mod costs;
pub mod diffusion;
pub mod economics;
pub mod error;
pub mod level;
pub mod manifest;
pub mod output;
pub mod pipeline;
pub mod report;
pub mod scenario;
pub mod series;
pub mod svg;

pub use calibration::{calibrate_q, derive_market_potential, CalibrationOptions, CalibrationResult, FixedPoint};
pub use config::{ResolvedScenario, ScenarioDocument};
pub use costs::{build_cost_curve, unit_cost, AnchorRule, CostCurve, CostParams};
pub use diffusion::{bass_closed_form, bass_increment, simulate_level, AdoptionState, BassParams, LevelTrajectory};
pub use economics::{compare_scenarios, value_added, ScenarioComparison, VaBasis, ValueAddedTable};
pub use error::{Error, Result};
pub use level::AutomationLevel;
pub use manifest::RunManifest;
pub use pipeline::{evaluate, ScenarioOutcome};
pub use scenario::{builtin_preset, mass_market_year, run_scenario, Horizon, Preset, ScenarioRun, ScenarioSpec};
pub use series::RegistrationSeries;
