use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use avdiff_core::config::{ResolvedScenario, ScenarioDocument};
use avdiff_core::report::{
    calibrate_command, presets_listing, report_command, simulate_command, va_command, RegistrationsSource,
    ReportOptions, ScenarioSource,
};
use avdiff_core::{AutomationLevel, CalibrationOptions, Error, FixedPoint, Horizon, Preset, VaBasis};
use clap::{Args, Parser, Subcommand};

/// Automated-vehicle uptake scenarios for EU27+UK new registrations.
#[derive(Parser)]
#[command(name = "avdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Registration series CSV (`year,new_registrations`), or `ref` for the bundled one.
    #[arg(long, default_value = "ref")]
    registrations: String,
    /// Output directory.
    #[arg(long, env = "AVDIFF_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// List the bundled scenario presets.
    Presets {
        /// Print the named preset as a JSON scenario document instead.
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
    },
    /// Run one scenario and write trajectories and a share chart.
    Simulate {
        /// Preset name or path to a JSON scenario document.
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// Solve q for one level so its share hits a target in a given year.
    Calibrate {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        level: AutomationLevel,
        #[arg(long)]
        target_share: f64,
        #[arg(long)]
        target_year: i32,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 0.0)]
        q_lo: f64,
        #[arg(long, default_value_t = 2.0)]
        q_hi: f64,
        #[arg(long, default_value_t = 200)]
        max_iterations: u32,
        #[arg(long, default_value = "ref")]
        registrations: String,
    },
    /// Value added per level and year for one scenario.
    Va {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value = "2020-2050")]
        horizon: Horizon,
        #[arg(long, default_value = "price")]
        va_basis: VaBasis,
        #[command(flatten)]
        common: Common,
    },
    /// Run every preset and write all tables, charts and a summary.
    Report {
        #[arg(long, default_value = "2020-2050")]
        horizon: Horizon,
        #[arg(long, default_value = "price")]
        va_basis: VaBasis,
        #[command(flatten)]
        common: Common,
    },
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: Cli) -> avdiff_core::Result<()> {
    match cli.command {
        Command::Presets { dump: None } => emit(&presets_listing()),
        Command::Presets { dump: Some(name) } => {
            let preset: Preset = name.parse()?;
            let doc = ScenarioDocument::from_resolved(&ResolvedScenario::from_preset(preset));
            emit(&format!("{}\n", doc.to_json()));
        }
        Command::Simulate { scenario, common } => {
            let scenario = ScenarioSource::parse(&scenario)?;
            let out = simulate_command(
                &scenario,
                &RegistrationsSource::parse(&common.registrations),
                &common.out,
            )?;
            emit(&format!(
                "simulated '{}' -> {} (run {})\n",
                out.outcome.run.name,
                common.out.display(),
                out.manifest.input_hash
            ));
        }
        Command::Calibrate {
            scenario,
            level,
            target_share,
            target_year,
            tolerance,
            q_lo,
            q_hi,
            max_iterations,
            registrations,
        } => {
            let options = CalibrationOptions {
                tolerance,
                q_lo,
                q_hi,
                max_iterations,
                ..CalibrationOptions::default()
            };
            let result = calibrate_command(
                &ScenarioSource::parse(&scenario)?,
                &RegistrationsSource::parse(&registrations),
                level,
                FixedPoint {
                    year: target_year,
                    target_share,
                },
                &options,
            )?;
            emit(&format!(
                "{level}: q = {:.9}, share({target_year}) = {:.9}, residual = {:.3e}, iterations = {}\n",
                result.q, result.achieved_share, result.residual, result.iterations
            ));
        }
        Command::Va {
            scenario,
            horizon,
            va_basis,
            common,
        } => {
            let scenario = ScenarioSource::parse(&scenario)?;
            let out = va_command(
                &scenario,
                &RegistrationsSource::parse(&common.registrations),
                &common.out,
                horizon,
                va_basis,
            )?;
            emit(&format!(
                "value added '{}' {horizon} ({va_basis} basis): {:.2} billion EUR -> {}\n",
                out.outcome.run.name,
                out.outcome.va.horizon_total / 1e9,
                common.out.display()
            ));
        }
        Command::Report {
            horizon,
            va_basis,
            common,
        } => {
            let out = report_command(&ReportOptions {
                registrations: RegistrationsSource::parse(&common.registrations),
                out_dir: common.out.clone(),
                va_horizon: horizon,
                basis: va_basis,
            })?;
            emit(&format!(
                "{}artifacts written to {}\n",
                out.summary,
                common.out.display()
            ));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("avdiff: error: {err}");
            if let Error::Bracket { .. } = err {
                eprintln!("hint: widen --q-lo/--q-hi or pick a target the level can reach");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
