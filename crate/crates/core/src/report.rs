//! Command-level workflows shared by the CLI and the test suites: input
//! resolution, artifact emission and the all-presets report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::calibration::{calibrate_q, CalibrationOptions, CalibrationResult, FixedPoint};
use crate::config::{ResolvedScenario, ScenarioDocument};
use crate::economics::{compare_scenarios, ScenarioComparison, VaBasis};
use crate::error::{Error, Result};
use crate::level::AutomationLevel;
use crate::manifest::{digest_hex, InputRecord, RunManifest};
use crate::output;
use crate::pipeline::{evaluate, ScenarioOutcome};
use crate::scenario::{builtin_preset, Horizon, Preset};
use crate::series::RegistrationSeries;
use crate::svg;

/// Where the registration series comes from; `ref` selects the bundled one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegistrationsSource {
    Reference,
    File(PathBuf),
}

impl RegistrationsSource {
    pub fn parse(arg: &str) -> Self {
        match arg {
            "ref" | "reference" => RegistrationsSource::Reference,
            path => RegistrationsSource::File(PathBuf::from(path)),
        }
    }

    pub fn load(&self) -> Result<(RegistrationSeries, InputRecord)> {
        let (series, path) = match self {
            RegistrationsSource::Reference => (RegistrationSeries::reference(), None),
            RegistrationsSource::File(p) => (RegistrationSeries::load(p)?, Some(p.display().to_string())),
        };
        let record = InputRecord {
            name: "registrations".into(),
            path,
            sha256: digest_hex(series.to_csv_string().as_bytes()),
        };
        Ok((series, record))
    }
}

/// A preset name or a path to a JSON scenario document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioSource {
    Preset(Preset),
    File(PathBuf),
}

impl ScenarioSource {
    pub fn parse(arg: &str) -> Result<Self> {
        if let Ok(preset) = arg.parse::<Preset>() {
            return Ok(ScenarioSource::Preset(preset));
        }
        let path = PathBuf::from(arg);
        if path.is_file() {
            Ok(ScenarioSource::File(path))
        } else {
            Err(Error::Config(format!(
                "unknown scenario file or preset '{arg}' (presets: preliminary-baseline, slow, baseline, fast)"
            )))
        }
    }

    pub fn resolve(
        &self,
        registrations: &RegistrationSeries,
        options: &CalibrationOptions,
    ) -> Result<(ResolvedScenario, InputRecord)> {
        let resolved = match self {
            ScenarioSource::Preset(p) => ResolvedScenario::from_preset(*p),
            ScenarioSource::File(path) => ScenarioDocument::load(path)?.resolve(registrations, options)?,
        };
        let canonical = ScenarioDocument::from_resolved(&resolved).to_json();
        let record = InputRecord {
            name: format!("scenario:{}", resolved.spec.name),
            path: match self {
                ScenarioSource::Preset(_) => None,
                ScenarioSource::File(p) => Some(p.display().to_string()),
            },
            sha256: digest_hex(canonical.as_bytes()),
        };
        Ok((resolved, record))
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub outcome: ScenarioOutcome,
    pub manifest: RunManifest,
}

/// Trajectories CSV and share chart for one scenario.
pub fn simulate_command(
    scenario: &ScenarioSource,
    registrations: &RegistrationsSource,
    out_dir: &Path,
) -> Result<SimulateOutput> {
    let (series, regs_record) = registrations.load()?;
    let (resolved, scenario_record) = scenario.resolve(&series, &CalibrationOptions::default())?;
    let outcome = evaluate(
        &resolved,
        &series,
        crate::pipeline::default_va_horizon(),
        VaBasis::Price,
    )?;

    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new(
        "simulate",
        vec![resolved.spec.name.clone()],
        vec![regs_record, scenario_record],
        BTreeMap::new(),
        out_dir,
    );
    let hash = manifest.input_hash.clone();
    let stem = file_stem(&resolved.spec.name);
    manifest.write_artifact(
        out_dir,
        &format!("{stem}_trajectories.csv"),
        &output::trajectories_csv(&outcome.run, &hash)?,
    )?;
    manifest.write_artifact(
        out_dir,
        &format!("{stem}_shares.svg"),
        &svg::shares_svg(&outcome.run, &hash),
    )?;
    manifest.write(out_dir)?;
    Ok(SimulateOutput { outcome, manifest })
}

/// Value-added CSV and stacked-area chart for one scenario.
pub fn va_command(
    scenario: &ScenarioSource,
    registrations: &RegistrationsSource,
    out_dir: &Path,
    horizon: Horizon,
    basis: VaBasis,
) -> Result<SimulateOutput> {
    let (series, regs_record) = registrations.load()?;
    let (resolved, scenario_record) = scenario.resolve(&series, &CalibrationOptions::default())?;
    let outcome = evaluate(&resolved, &series, horizon, basis)?;

    ensure_dir(out_dir)?;
    let overrides = [
        ("horizon".to_string(), horizon.to_string()),
        ("va_basis".to_string(), basis.to_string()),
    ]
    .into_iter()
    .collect();
    let mut manifest = RunManifest::new(
        "va",
        vec![resolved.spec.name.clone()],
        vec![regs_record, scenario_record],
        overrides,
        out_dir,
    );
    let hash = manifest.input_hash.clone();
    let stem = file_stem(&resolved.spec.name);
    manifest.write_artifact(out_dir, &format!("{stem}_va.csv"), &output::va_csv(&outcome.va, &hash)?)?;
    manifest.write_artifact(
        out_dir,
        &format!("{stem}_va.svg"),
        &svg::va_stacked_svg(&outcome.va, &hash),
    )?;
    manifest.write(out_dir)?;
    Ok(SimulateOutput { outcome, manifest })
}

/// Calibrates q for one level of a scenario against a target share.
pub fn calibrate_command(
    scenario: &ScenarioSource,
    registrations: &RegistrationsSource,
    level: AutomationLevel,
    fixed_point: FixedPoint,
    options: &CalibrationOptions,
) -> Result<CalibrationResult> {
    let (series, _) = registrations.load()?;
    let (resolved, _) = scenario.resolve(&series, options)?;
    let config = resolved.spec.level(level).ok_or_else(|| {
        Error::Config(format!(
            "scenario '{}' has no {level} configuration",
            resolved.spec.name
        ))
    })?;
    calibrate_q(&config.bass, &series, fixed_point, options)
}

/// Human-readable table of the bundled presets.
pub fn presets_listing() -> String {
    let mut text = String::new();
    for preset in Preset::ALL {
        let spec = builtin_preset(preset);
        let _ = writeln!(text, "{}  ({})", spec.name, spec.description);
        let _ = writeln!(
            text,
            "  {:<5} {:>6} {:>6} {:>15} {:>11} {:>6} {:>12}",
            "level", "p", "q", "N", "period", "entry", "fixed point"
        );
        for c in spec.levels.values() {
            let fp = c
                .fixed_point
                .map(|f| format!("{:.0}% in {}", f.target_share * 100.0, f.year))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                text,
                "  {:<5} {:>6} {:>6} {:>15} {:>11} {:>6} {:>12}",
                c.level.to_string(),
                c.bass.p,
                c.bass.q,
                format!("{:.0}", c.bass.market_potential),
                format!("{}-{}", c.bass.period_start, c.bass.period_end),
                c.entry_year,
                fp
            );
        }
        if preset == Preset::Slow {
            let _ = writeln!(text, "  L5    not introduced before 2050");
        }
        text.push('\n');
    }
    text
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub registrations: RegistrationsSource,
    pub out_dir: PathBuf,
    pub va_horizon: Horizon,
    /// Basis of the per-scenario VA tables and charts; summaries carry both.
    pub basis: VaBasis,
}

#[derive(Debug, Clone)]
pub struct ReportOutput {
    pub outcomes: BTreeMap<Preset, ScenarioOutcome>,
    /// Slow/baseline/fast comparison on the price basis.
    pub price_comparison: ScenarioComparison,
    /// Slow/baseline/fast comparison on the cost basis.
    pub cost_comparison: ScenarioComparison,
    pub manifest: RunManifest,
    pub summary: String,
}

/// Runs every preset end to end and writes all tables, charts, a summary
/// and the run manifest into `options.out_dir`.
pub fn report_command(options: &ReportOptions) -> Result<ReportOutput> {
    let (series, regs_record) = options.registrations.load()?;

    let resolved: Vec<(Preset, ResolvedScenario)> = Preset::ALL
        .iter()
        .map(|&p| (p, ResolvedScenario::from_preset(p)))
        .collect();

    // Presets are independent; evaluate them on separate threads.
    let evaluated: Vec<Result<(Preset, ScenarioOutcome, ScenarioOutcome)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = resolved
            .iter()
            .map(|(preset, r)| {
                let series = &series;
                let horizon = options.va_horizon;
                scope.spawn(move || {
                    let price = evaluate(r, series, horizon, VaBasis::Price)?;
                    let cost = evaluate(r, series, horizon, VaBasis::Cost)?;
                    Ok((*preset, price, cost))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario worker panicked"))
            .collect()
    });

    let mut price_outcomes = BTreeMap::new();
    let mut cost_outcomes = BTreeMap::new();
    for result in evaluated {
        let (preset, price, cost) = result?;
        price_outcomes.insert(preset, price);
        cost_outcomes.insert(preset, cost);
    }

    let final_tables = |outcomes: &BTreeMap<Preset, ScenarioOutcome>| -> Result<ScenarioComparison> {
        let tables: Vec<_> = Preset::FINAL.iter().map(|p| &outcomes[p].va).collect();
        compare_scenarios(&tables)
    };
    let price_comparison = final_tables(&price_outcomes)?;
    let cost_comparison = final_tables(&cost_outcomes)?;

    let out_dir = &options.out_dir;
    ensure_dir(out_dir)?;
    let mut inputs = vec![regs_record];
    for (_, r) in &resolved {
        inputs.push(InputRecord {
            name: format!("scenario:{}", r.spec.name),
            path: None,
            sha256: digest_hex(ScenarioDocument::from_resolved(r).to_json().as_bytes()),
        });
    }
    let overrides = [
        ("horizon".to_string(), options.va_horizon.to_string()),
        ("va_basis".to_string(), options.basis.to_string()),
    ]
    .into_iter()
    .collect();
    let mut manifest = RunManifest::new(
        "report",
        Preset::ALL.iter().map(|p| p.name().to_string()).collect(),
        inputs,
        overrides,
        out_dir,
    );
    let hash = manifest.input_hash.clone();

    let selected = match options.basis {
        VaBasis::Price => &price_outcomes,
        VaBasis::Cost => &cost_outcomes,
    };
    for preset in Preset::ALL {
        let outcome = &selected[&preset];
        let stem = file_stem(preset.name());
        manifest.write_artifact(
            out_dir,
            &format!("{stem}_trajectories.csv"),
            &output::trajectories_csv(&outcome.run, &hash)?,
        )?;
        manifest.write_artifact(
            out_dir,
            &format!("{stem}_shares.svg"),
            &svg::shares_svg(&outcome.run, &hash),
        )?;
        manifest.write_artifact(out_dir, &format!("{stem}_va.csv"), &output::va_csv(&outcome.va, &hash)?)?;
        manifest.write_artifact(
            out_dir,
            &format!("{stem}_va.svg"),
            &svg::va_stacked_svg(&outcome.va, &hash),
        )?;
    }

    let specs: Vec<_> = resolved.iter().map(|(_, r)| &r.spec).collect();
    manifest.write_artifact(out_dir, "presets.csv", &output::presets_csv(&specs, &hash)?)?;
    let milestones: Vec<_> = resolved.iter().map(|(p, r)| (&r.spec, &price_outcomes[p])).collect();
    manifest.write_artifact(out_dir, "milestones.csv", &output::milestones_csv(&milestones, &hash)?)?;
    manifest.write_artifact(
        out_dir,
        "summary.csv",
        &output::summary_csv(&[&price_comparison, &cost_comparison], &hash)?,
    )?;
    manifest.write_artifact(out_dir, "registrations.csv", &output::registrations_csv(&series, &hash))?;

    let summary = summary_text(&hash, options, &price_outcomes, &price_comparison, &cost_comparison);
    manifest.write_artifact(out_dir, "summary.txt", &summary)?;
    manifest.write(out_dir)?;

    Ok(ReportOutput {
        outcomes: price_outcomes,
        price_comparison,
        cost_comparison,
        manifest,
        summary,
    })
}

fn billions(eur: f64) -> String {
    format!("{:.2}", eur / 1e9)
}

fn flag(value: Option<bool>) -> &'static str {
    match value {
        Some(true) => "yes",
        Some(false) => "no",
        None => "n/a",
    }
}

fn summary_text(
    hash: &str,
    options: &ReportOptions,
    outcomes: &BTreeMap<Preset, ScenarioOutcome>,
    price: &ScenarioComparison,
    cost: &ScenarioComparison,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "avdiff report, run {hash}");
    let regs = match &options.registrations {
        RegistrationsSource::Reference => "bundled reference series".to_string(),
        RegistrationsSource::File(p) => p.display().to_string(),
    };
    let _ = writeln!(s, "registrations: {regs}");
    let _ = writeln!(s);
    let _ = writeln!(s, "Value added {}, billion EUR", options.va_horizon);
    let _ = writeln!(s, "{:<22} {:>12} {:>12}", "scenario", "price basis", "cost basis");
    for total in &price.totals {
        let cost_total = cost.total(&total.scenario).unwrap_or(f64::NAN);
        let _ = writeln!(
            s,
            "{:<22} {:>12} {:>12}",
            total.scenario,
            billions(total.total_eur),
            billions(cost_total)
        );
    }
    let _ = writeln!(s, "slow <= baseline <= fast (price basis): {}", flag(price.ordered));
    let _ = writeln!(
        s,
        "slow < baseline < fast (price basis): {}",
        flag(price.strictly_ordered)
    );
    let _ = writeln!(s);

    let _ = writeln!(s, "Annual value added (price basis), billion EUR");
    let _ = writeln!(
        s,
        "{:<22} {:>10} {:>10}",
        "scenario", options.va_horizon.first, options.va_horizon.last
    );
    for (preset, outcome) in outcomes {
        let _ = writeln!(
            s,
            "{:<22} {:>10} {:>10}",
            preset.name(),
            billions(outcome.va.annual_total(options.va_horizon.first)),
            billions(outcome.va.annual_total(options.va_horizon.last))
        );
    }
    let _ = writeln!(s);

    let _ = writeln!(s, "Market entry (first year at 1% share), declared / achieved");
    for (preset, outcome) in outcomes {
        let mut parts = Vec::new();
        for (level, declared) in preset.declared_entry_years() {
            let achieved = outcome.run.trajectory(level).and_then(crate::scenario::entry_year);
            let show = |y: Option<i32>| y.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
            parts.push(format!("{level} {}/{}", show(declared), show(achieved)));
        }
        let _ = writeln!(s, "{:<22} {}", preset.name(), parts.join("  "));
    }
    s
}
