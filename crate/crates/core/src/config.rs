//! JSON scenario documents.
//!
//! A document lists levels with either a direct `q` or a `fixed_point` to
//! calibrate against, and either a direct `market_potential` or a
//! `potential_share` of period registrations. Cost entries override the
//! per-level defaults field by field.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate_q, derive_market_potential, CalibrationOptions, CalibrationResult, FixedPoint};
use crate::costs::CostParams;
use crate::diffusion::BassParams;
use crate::error::{Error, Result};
use crate::level::AutomationLevel;
use crate::scenario::{builtin_preset, Horizon, LevelConfig, Preset, ScenarioSpec, DEFAULT_L1_RESIDUAL_FRACTION};
use crate::series::RegistrationSeries;

fn default_l1_fraction() -> f64 {
    DEFAULT_L1_RESIDUAL_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub horizon: [i32; 2],
    #[serde(default = "default_l1_fraction")]
    pub l1_residual_fraction: f64,
    pub levels: Vec<LevelDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub costs: Vec<CostDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDocument {
    pub level: AutomationLevel,
    pub p: f64,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub market_potential: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_share: Option<f64>,
    pub period: [i32; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<FixedPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_market_year_override: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostDocument {
    pub level: AutomationLevel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_market_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markup: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hw_share: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sw_share: Option<f64>,
}

impl CostDocument {
    fn full(params: &CostParams) -> Self {
        Self {
            level: params.level,
            mass_market_cost: Some(params.mass_market_cost),
            learning_rate: Some(params.learning_rate),
            floor_ratio: Some(params.floor_ratio),
            markup: Some(params.markup),
            hw_share: Some(params.hw_share),
            sw_share: Some(params.sw_share),
        }
    }

    fn apply(&self, base: &CostParams) -> CostParams {
        let hw_share = self.hw_share.unwrap_or(base.hw_share);
        // Setting one share alone implies the other.
        let sw_share = match (self.hw_share, self.sw_share) {
            (_, Some(sw)) => sw,
            (Some(hw), None) => 1.0 - hw,
            (None, None) => base.sw_share,
        };
        let hw_share = match (self.hw_share, self.sw_share) {
            (None, Some(sw)) => 1.0 - sw,
            _ => hw_share,
        };
        CostParams {
            level: base.level,
            mass_market_cost: self.mass_market_cost.unwrap_or(base.mass_market_cost),
            learning_rate: self.learning_rate.unwrap_or(base.learning_rate),
            floor_ratio: self.floor_ratio.unwrap_or(base.floor_ratio),
            markup: self.markup.unwrap_or(base.markup),
            hw_share,
            sw_share,
        }
    }
}

/// A document with calibrations done and cost defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub spec: ScenarioSpec,
    /// Cost parameters for L1–L5.
    pub costs: BTreeMap<AutomationLevel, CostParams>,
    /// Levels whose q came from a fixed point.
    pub calibrations: BTreeMap<AutomationLevel, CalibrationResult>,
}

impl ResolvedScenario {
    pub fn from_preset(preset: Preset) -> Self {
        Self {
            spec: builtin_preset(preset),
            costs: default_costs(),
            calibrations: BTreeMap::new(),
        }
    }
}

pub fn default_costs() -> BTreeMap<AutomationLevel, CostParams> {
    AutomationLevel::ALL
        .iter()
        .filter_map(|&l| CostParams::default_for(l).map(|c| (l, c)))
        .collect()
}

impl ScenarioDocument {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: origin.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario document serializes");
        text.push('\n');
        text
    }

    /// Document form of a resolved scenario, with every value explicit.
    pub fn from_resolved(resolved: &ResolvedScenario) -> Self {
        let spec = &resolved.spec;
        Self {
            name: spec.name.clone(),
            description: spec.description.clone(),
            horizon: [spec.horizon.first, spec.horizon.last],
            l1_residual_fraction: spec.l1_residual_fraction,
            levels: spec
                .levels
                .values()
                .map(|c| LevelDocument {
                    level: c.level,
                    p: c.bass.p,
                    q: Some(c.bass.q),
                    market_potential: Some(c.bass.market_potential),
                    potential_share: None,
                    period: [c.bass.period_start, c.bass.period_end],
                    fixed_point: c.fixed_point,
                    entry_year: Some(c.entry_year),
                    mass_market_year_override: c.mass_market_year_override,
                })
                .collect(),
            costs: resolved.costs.values().map(CostDocument::full).collect(),
        }
    }

    /// Validates the document, derives market potentials, and calibrates q
    /// for levels that give a fixed point instead.
    pub fn resolve(
        &self,
        registrations: &RegistrationSeries,
        options: &CalibrationOptions,
    ) -> Result<ResolvedScenario> {
        let horizon = Horizon::new(self.horizon[0], self.horizon[1])?;
        let mut levels = BTreeMap::new();
        let mut calibrations = BTreeMap::new();

        for doc in &self.levels {
            if levels.contains_key(&doc.level) {
                return Err(Error::Config(format!("level {} is configured twice", doc.level)));
            }
            let [start, end] = doc.period;
            let market_potential = match (doc.market_potential, doc.potential_share) {
                (Some(n), None) => n,
                (None, Some(share)) => derive_market_potential(registrations, start, end, share)?,
                (Some(_), Some(_)) => {
                    return Err(Error::Config(format!(
                        "{}: give either market_potential or potential_share, not both",
                        doc.level
                    )))
                }
                (None, None) => {
                    return Err(Error::Config(format!(
                        "{}: market_potential or potential_share is required",
                        doc.level
                    )))
                }
            };
            let mut bass = BassParams {
                p: doc.p,
                q: doc.q.unwrap_or(0.0),
                market_potential,
                period_start: start,
                period_end: end,
            };
            match (doc.q, doc.fixed_point) {
                (Some(_), _) => {}
                (None, Some(fp)) => {
                    let result = calibrate_q(&bass, registrations, fp, options)?;
                    bass.q = result.q;
                    calibrations.insert(doc.level, result);
                }
                (None, None) => {
                    return Err(Error::Config(format!(
                        "{}: either q or a fixed_point to calibrate is required",
                        doc.level
                    )))
                }
            }
            levels.insert(
                doc.level,
                LevelConfig {
                    level: doc.level,
                    bass,
                    fixed_point: doc.fixed_point,
                    entry_year: doc.entry_year.unwrap_or(start),
                    mass_market_year_override: doc.mass_market_year_override,
                },
            );
        }

        let spec = ScenarioSpec {
            name: self.name.clone(),
            description: self.description.clone(),
            horizon,
            levels,
            l1_residual_fraction: self.l1_residual_fraction,
        };
        spec.validate()?;

        let mut costs = default_costs();
        let mut seen = Vec::new();
        for doc in &self.costs {
            if seen.contains(&doc.level) {
                return Err(Error::Config(format!("costs for {} are given twice", doc.level)));
            }
            seen.push(doc.level);
            let base = costs
                .get(&doc.level)
                .ok_or_else(|| Error::Config(format!("{} carries no automation package cost", doc.level)))?;
            let params = doc.apply(base);
            params.validate()?;
            costs.insert(doc.level, params);
        }

        Ok(ResolvedScenario {
            spec,
            costs,
            calibrations,
        })
    }
}
