//! Scenario assembly: per-level Bass runs, top-down share allocation,
//! and the bundled presets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::calibration::FixedPoint;
use crate::diffusion::{simulate_level, AdoptionState, BassParams, LevelTrajectory};
use crate::error::{Error, Result};
use crate::level::AutomationLevel;
use crate::series::RegistrationSeries;

/// Share of new registrations at which a level counts as on the market.
pub const ENTRY_SHARE: f64 = 0.01;
/// Share of new registrations marking mass-market entry.
pub const MASS_MARKET_SHARE: f64 = 0.10;
/// Below this share for [`RETIREMENT_RUN`] consecutive years a level is off market.
pub const RETIREMENT_SHARE: f64 = 0.005;
pub const RETIREMENT_RUN: usize = 2;
/// Portion of the unallocated share attributed to L1 when L1 has no Bass run.
pub const DEFAULT_L1_RESIDUAL_FRACTION: f64 = 0.69;

/// Reporting window every preset is clipped to.
pub const REPORT_FIRST_YEAR: i32 = 2015;
pub const REPORT_LAST_YEAR: i32 = 2050;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizon {
    pub first: i32,
    pub last: i32,
}

impl Horizon {
    pub fn new(first: i32, last: i32) -> Result<Self> {
        if first > last {
            return Err(Error::Config(format!("horizon {first}-{last} is empty")));
        }
        Ok(Self { first, last })
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.first..=self.last
    }

    pub fn contains(&self, year: i32) -> bool {
        year >= self.first && year <= self.last
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.first, self.last)
    }
}

impl FromStr for Horizon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['-', ':'])
            .ok_or_else(|| Error::Config(format!("horizon '{s}' must look like 2020-2050")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<i32>()
                .map_err(|_| Error::Config(format!("invalid horizon year '{v}'")))
        };
        Horizon::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelConfig {
    pub level: AutomationLevel,
    pub bass: BassParams,
    pub fixed_point: Option<FixedPoint>,
    /// Declared year the level reaches [`ENTRY_SHARE`].
    pub entry_year: i32,
    pub mass_market_year_override: Option<i32>,
}

impl LevelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.level == AutomationLevel::L0 {
            return Err(Error::Config("L0 cannot be given a Bass process".into()));
        }
        self.bass
            .validate()
            .map_err(|e| Error::Config(format!("{}: {e}", self.level)))?;
        if !self.bass.years().contains(&self.entry_year) {
            return Err(Error::Config(format!(
                "{}: entry year {} outside period {}-{}",
                self.level, self.entry_year, self.bass.period_start, self.bass.period_end
            )));
        }
        if let Some(fp) = &self.fixed_point {
            fp.validate_for(&self.bass)
                .map_err(|e| Error::Config(format!("{}: {e}", self.level)))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub description: String,
    pub horizon: Horizon,
    pub levels: BTreeMap<AutomationLevel, LevelConfig>,
    pub l1_residual_fraction: f64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Config("scenario name is empty".into()));
        }
        if !(0.0..=1.0).contains(&self.l1_residual_fraction) {
            return Err(Error::Config(format!(
                "l1_residual_fraction must lie in [0, 1], got {}",
                self.l1_residual_fraction
            )));
        }
        for (&key, config) in &self.levels {
            if key != config.level {
                return Err(Error::Config(format!(
                    "level config for {} is keyed as {key}",
                    config.level
                )));
            }
            config.validate()?;
            let start = config.bass.period_start.max(REPORT_FIRST_YEAR);
            let end = config.bass.period_end.min(REPORT_LAST_YEAR);
            if start <= end && (start < self.horizon.first || end > self.horizon.last) {
                return Err(Error::Config(format!(
                    "horizon {} does not cover the {} period {}-{}",
                    self.horizon, key, config.bass.period_start, config.bass.period_end
                )));
            }
        }
        Ok(())
    }

    pub fn level(&self, level: AutomationLevel) -> Option<&LevelConfig> {
        self.levels.get(&level)
    }
}

/// Trajectories of one scenario with displacement applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub name: String,
    pub horizon: Horizon,
    /// Bass levels plus the L0/L1 residual pool, keyed by level.
    pub trajectories: BTreeMap<AutomationLevel, LevelTrajectory>,
    /// Levels whose trajectory is a share of the residual rather than a Bass run.
    pub pooled: BTreeSet<AutomationLevel>,
    /// Share not taken by any Bass level, per horizon year.
    pub residual_share: Vec<f64>,
}

impl ScenarioRun {
    pub fn trajectory(&self, level: AutomationLevel) -> Option<&LevelTrajectory> {
        self.trajectories.get(&level)
    }

    pub fn residual_at(&self, year: i32) -> f64 {
        if self.horizon.contains(year) {
            self.residual_share[(year - self.horizon.first) as usize]
        } else {
            0.0
        }
    }

    /// Allocated vehicles summed over years `<= year`.
    pub fn cumulative_allocated(
        &self,
        levels: &[AutomationLevel],
        year: i32,
        registrations: &RegistrationSeries,
    ) -> f64 {
        levels
            .iter()
            .filter_map(|l| self.trajectories.get(l))
            .flat_map(|t| {
                t.years()
                    .filter(move |&y| y <= year)
                    .map(move |y| t.allocated_share_at(y) * registrations.get(y).unwrap_or(0.0))
            })
            .sum()
    }
}

/// Simulates every configured level and allocates shares top-down by rank.
///
/// In each year the highest level keeps `min(raw, 1)`, each lower level keeps
/// `min(raw, remaining)`. What is left goes to the L0/L1 pool: L1 takes
/// `l1_residual_fraction` of it unless L1 has its own Bass run, L0 the rest.
pub fn run_scenario(spec: &ScenarioSpec, registrations: &RegistrationSeries) -> Result<ScenarioRun> {
    spec.validate()?;
    registrations.require_span(spec.horizon.first, spec.horizon.last)?;

    let mut trajectories = BTreeMap::new();
    for (&level, config) in &spec.levels {
        trajectories.insert(level, simulate_level(level, &config.bass, registrations)?);
    }

    let first = trajectories
        .values()
        .map(LevelTrajectory::first_year)
        .chain(std::iter::once(spec.horizon.first))
        .min()
        .unwrap_or(spec.horizon.first);
    let last = trajectories
        .values()
        .map(LevelTrajectory::last_year)
        .chain(std::iter::once(spec.horizon.last))
        .max()
        .unwrap_or(spec.horizon.last);

    let mut residual_share = Vec::with_capacity((spec.horizon.last - spec.horizon.first + 1) as usize);
    for year in first..=last {
        let mut capacity = 1.0_f64;
        for traj in trajectories.values_mut().rev() {
            let start = traj.first_year();
            if year < start || year > traj.last_year() {
                continue;
            }
            let idx = (year - start) as usize;
            let kept = traj.raw_share[idx].min(capacity).max(0.0);
            traj.allocated_share[idx] = kept;
            capacity = (capacity - kept).max(0.0);
        }
        if spec.horizon.contains(year) {
            residual_share.push(capacity);
        }
    }

    let mut pooled = BTreeSet::new();
    let l1_fraction = if trajectories.contains_key(&AutomationLevel::L1) {
        0.0
    } else {
        spec.l1_residual_fraction
    };
    let l1_share: Vec<f64> = residual_share.iter().map(|r| r * l1_fraction).collect();
    let l0_share: Vec<f64> = residual_share
        .iter()
        .zip(&l1_share)
        .map(|(r, l1)| (r - l1).max(0.0))
        .collect();

    if let std::collections::btree_map::Entry::Vacant(slot) = trajectories.entry(AutomationLevel::L1) {
        slot.insert(pool_trajectory(
            AutomationLevel::L1,
            spec.horizon,
            &l1_share,
            registrations,
        )?);
        pooled.insert(AutomationLevel::L1);
    }
    trajectories.insert(
        AutomationLevel::L0,
        pool_trajectory(AutomationLevel::L0, spec.horizon, &l0_share, registrations)?,
    );
    pooled.insert(AutomationLevel::L0);

    Ok(ScenarioRun {
        name: spec.name.clone(),
        horizon: spec.horizon,
        trajectories,
        pooled,
        residual_share,
    })
}

fn pool_trajectory(
    level: AutomationLevel,
    horizon: Horizon,
    shares: &[f64],
    registrations: &RegistrationSeries,
) -> Result<LevelTrajectory> {
    let mut cumulative = 0.0;
    let mut states = Vec::with_capacity(shares.len());
    for (year, &share) in horizon.years().zip(shares) {
        let vehicles = share * registrations.require(year)?;
        cumulative += vehicles;
        states.push(AdoptionState {
            year,
            new_adopters: vehicles,
            cumulative_adopters: cumulative,
        });
    }
    Ok(LevelTrajectory {
        level,
        states,
        raw_share: shares.to_vec(),
        allocated_share: shares.to_vec(),
    })
}

/// First year the allocated share reaches `threshold`.
pub fn first_year_reaching(trajectory: &LevelTrajectory, threshold: f64) -> Option<i32> {
    trajectory
        .years()
        .zip(&trajectory.allocated_share)
        .find(|(_, &s)| s >= threshold)
        .map(|(y, _)| y)
}

/// First year with allocated share of at least 10%.
pub fn mass_market_year(trajectory: &LevelTrajectory) -> Option<i32> {
    first_year_reaching(trajectory, MASS_MARKET_SHARE)
}

/// First year with allocated share of at least 1%.
pub fn entry_year(trajectory: &LevelTrajectory) -> Option<i32> {
    first_year_reaching(trajectory, ENTRY_SHARE)
}

/// First year of a run of [`RETIREMENT_RUN`] years below [`RETIREMENT_SHARE`]
/// after the level entered the market, looking across `horizon` (years outside
/// the level's period count as zero share).
pub fn retirement_year(trajectory: &LevelTrajectory, horizon: Horizon) -> Option<i32> {
    let entered = entry_year(trajectory)?;
    let mut run_start = None;
    let mut run_len = 0;
    for year in (entered + 1)..=horizon.last {
        if trajectory.allocated_share_at(year) < RETIREMENT_SHARE {
            run_start.get_or_insert(year);
            run_len += 1;
            if run_len >= RETIREMENT_RUN {
                return run_start;
            }
        } else {
            run_start = None;
            run_len = 0;
        }
    }
    None
}

/// Names of the bundled scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Preset {
    PreliminaryBaseline,
    Slow,
    Baseline,
    Fast,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::PreliminaryBaseline,
        Preset::Slow,
        Preset::Baseline,
        Preset::Fast,
    ];

    /// The three final scenarios compared in value-added reporting.
    pub const FINAL: [Preset; 3] = [Preset::Slow, Preset::Baseline, Preset::Fast];

    pub fn name(self) -> &'static str {
        match self {
            Preset::PreliminaryBaseline => "preliminary-baseline",
            Preset::Slow => "slow",
            Preset::Baseline => "baseline",
            Preset::Fast => "fast",
        }
    }

    /// Declared first year at 1% share for L3–L5; `None` when the level is
    /// absent from the scenario.
    pub fn declared_entry_years(self) -> [(AutomationLevel, Option<i32>); 3] {
        use AutomationLevel::*;
        match self {
            Preset::PreliminaryBaseline => [(L3, Some(2025)), (L4, Some(2035)), (L5, Some(2040))],
            Preset::Slow => [(L3, Some(2030)), (L4, Some(2040)), (L5, None)],
            Preset::Baseline => [(L3, Some(2025)), (L4, Some(2035)), (L5, Some(2045))],
            // L3 "before 2025": the last year that qualifies.
            Preset::Fast => [(L3, Some(2024)), (L4, Some(2030)), (L5, Some(2035))],
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "preliminary-baseline" | "preliminary" => Ok(Preset::PreliminaryBaseline),
            "slow" => Ok(Preset::Slow),
            "baseline" => Ok(Preset::Baseline),
            "fast" => Ok(Preset::Fast),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

const P: f64 = 0.002;

struct PresetRow {
    level: AutomationLevel,
    q: f64,
    market_potential: f64,
    period: (i32, i32),
    entry_year: i32,
    fixed_point: Option<(i32, f64)>,
}

fn preset_rows(preset: Preset) -> Vec<PresetRow> {
    use AutomationLevel::*;
    let row = |level, q, market_potential, period, entry_year, fixed_point| PresetRow {
        level,
        q,
        market_potential,
        period,
        entry_year,
        fixed_point,
    };
    match preset {
        Preset::PreliminaryBaseline => vec![
            row(L2, 0.325, 181_040_000.0, (2015, 2029), 2015, Some((2025, 0.39))),
            row(L3, 0.3, 206_769_000.0, (2025, 2039), 2025, Some((2030, 0.08))),
            row(L4, 0.3, 220_949_000.0, (2035, 2049), 2035, None),
            row(L5, 0.3, 164_194_000.0, (2040, 2050), 2040, None),
        ],
        Preset::Slow => vec![
            row(L2, 0.26, 285_823_000.0, (2015, 2030), 2015, None),
            row(L3, 0.26, 146_134_000.0, (2030, 2050), 2030, None),
            row(L4, 0.26, 146_134_000.0, (2040, 2050), 2040, None),
        ],
        Preset::Baseline => vec![
            row(L2, 0.285, 238_186_000.0, (2015, 2030), 2015, Some((2025, 0.39))),
            row(L3, 0.335, 143_879_000.0, (2025, 2041), 2025, Some((2030, 0.08))),
            row(L4, 0.335, 111_026_000.0, (2035, 2050), 2035, None),
            row(L5, 0.335, 111_026_000.0, (2045, 2050), 2045, None),
        ],
        Preset::Fast => vec![
            row(L2, 0.04, 163_321_000.0, (2015, 2027), 2015, None),
            row(L3, 0.04, 170_148_000.0, (2023, 2035), 2024, None),
            row(L4, 0.04, 146_134_000.0, (2030, 2043), 2030, None),
            row(L5, 0.04, 133_231_000.0, (2035, 2050), 2035, None),
        ],
    }
}

fn preset_description(preset: Preset) -> &'static str {
    match preset {
        Preset::PreliminaryBaseline => {
            "Literature-based baseline before expert review: L3 from 2025, L4 from 2035, L5 from 2040."
        }
        Preset::Slow => "Delayed uptake: L3 enters in 2030, L4 in 2040, no L5 before 2050; L2 keeps a large market.",
        Preset::Baseline => "Reviewed central case: larger L2 potential, L3 from 2025, L4 from 2035, L5 from 2045.",
        Preset::Fast => "Accelerated uptake: L3 before 2025, L4 in 2030, L5 in 2035; L2 leaves the market early.",
    }
}

/// Bundled scenario with the published coefficients.
pub fn builtin_preset(preset: Preset) -> ScenarioSpec {
    let levels = preset_rows(preset)
        .into_iter()
        .map(|r| {
            let config = LevelConfig {
                level: r.level,
                bass: BassParams {
                    p: P,
                    q: r.q,
                    market_potential: r.market_potential,
                    period_start: r.period.0,
                    period_end: r.period.1,
                },
                fixed_point: r
                    .fixed_point
                    .map(|(year, target_share)| FixedPoint { year, target_share }),
                entry_year: r.entry_year,
                mass_market_year_override: None,
            };
            (r.level, config)
        })
        .collect();
    ScenarioSpec {
        name: preset.name().to_string(),
        description: preset_description(preset).to_string(),
        horizon: Horizon {
            first: REPORT_FIRST_YEAR,
            last: REPORT_LAST_YEAR,
        },
        levels,
        l1_residual_fraction: DEFAULT_L1_RESIDUAL_FRACTION,
    }
}

/// [`builtin_preset`] by name.
pub fn builtin_preset_named(name: &str) -> Result<ScenarioSpec> {
    Ok(builtin_preset(name.parse()?))
}
