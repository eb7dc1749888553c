//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use avdiff_core::calibration::share_at;
use avdiff_core::level::AutomationLevel::{self, *};
use avdiff_core::pipeline::{default_va_horizon, evaluate};
use avdiff_core::report::{report_command, RegistrationsSource, ReportOptions};
use avdiff_core::scenario::{builtin_preset, first_year_reaching, ENTRY_SHARE};
use avdiff_core::{
    bass_closed_form, calibrate_q, run_scenario, simulate_level, unit_cost, BassParams, CalibrationOptions, CostParams,
    FixedPoint, Preset, RegistrationSeries, ResolvedScenario, VaBasis,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bass_mechanics() -> Outcome {
    let regs = RegistrationSeries::reference();
    let mut levels = 0;
    let mut worst_gap: f64 = 0.0;
    for preset in Preset::ALL {
        for config in builtin_preset(preset).levels.values() {
            levels += 1;
            let b = &config.bass;
            let traj = simulate_level(config.level, b, &regs).map_err(|e| e.to_string())?;
            let mut sum = 0.0;
            let mut prev = 0.0;
            for s in &traj.states {
                if s.new_adopters < 0.0 {
                    return Err(format!("{preset} {}: negative increment in {}", config.level, s.year));
                }
                sum += s.new_adopters;
                if sum != s.cumulative_adopters || s.cumulative_adopters < prev {
                    return Err(format!("{preset} {}: conservation broken in {}", config.level, s.year));
                }
                prev = s.cumulative_adopters;
            }
            if traj.final_cumulative() > b.market_potential {
                return Err(format!("{preset} {}: exceeds market potential", config.level));
            }
            let years = b.period_len() as f64;
            let fine = common::fine_step_fraction(b.p, b.q, years, 1000);
            let closed = bass_closed_form(b.p, b.q, years).map_err(|e| e.to_string())?;
            worst_gap = worst_gap.max((fine - closed).abs());
        }
    }
    check(
        worst_gap <= 0.005,
        format!(
            "{levels} preset levels conserve exactly; worst fine-step gap {:.3} pp",
            worst_gap * 100.0
        ),
    )
}

fn calibration_roundtrip() -> Outcome {
    let regs = RegistrationSeries::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(20_231_115);
    let options = CalibrationOptions {
        q_lo: 0.0,
        q_hi: 1.0,
        ..CalibrationOptions::default()
    };
    let mut accepted = 0;
    let mut worst_share: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    while accepted < 50 {
        let cap = rng.gen_range(8.0e7..2.5e8);
        let start = rng.gen_range(2015..=2035);
        let end = (start + 14).min(2050);
        let year = start + rng.gen_range(2..=6);
        let q_star = rng.gen_range(0.05..0.7);
        let base = BassParams::new(0.002, q_star, cap, start, end).map_err(|e| e.to_string())?;
        let target = share_at(&base, &regs, year).map_err(|e| e.to_string())?;
        let (grid_q, shares) = common::grid_search(&base, &regs, year, target, options.q_lo, options.q_hi, 1e-4);
        // Feasible means in (0, 1) with a share monotone over the bounds.
        if !(target > 0.0 && target < 1.0) || shares.windows(2).any(|w| w[1] < w[0]) {
            continue;
        }
        accepted += 1;
        let fp = FixedPoint {
            year,
            target_share: target,
        };
        let r = calibrate_q(&base.with_q(0.0), &regs, fp, &options).map_err(|e| e.to_string())?;
        let achieved = share_at(&base.with_q(r.q), &regs, year).map_err(|e| e.to_string())?;
        worst_share = worst_share.max((achieved - target).abs());
        worst_q = worst_q.max((r.q - grid_q).abs());
    }
    check(
        worst_share <= 1e-6 && worst_q <= 1e-4,
        format!("50 targets; worst |share error| {worst_share:.2e}, worst |q - grid q| {worst_q:.2e}"),
    )
}

fn fixed_point_reproduction() -> Outcome {
    let regs = RegistrationSeries::reference();
    let mut spec = builtin_preset(Preset::Baseline);
    let mut parts = Vec::new();
    let mut ok = true;
    for (level, year, target, published) in [(L2, 2025, 0.39, 0.285), (L3, 2030, 0.08, 0.335)] {
        let config = spec.levels.get_mut(&level).unwrap();
        let fp = FixedPoint {
            year,
            target_share: target,
        };
        let r = calibrate_q(&config.bass, &regs, fp, &CalibrationOptions::default()).map_err(|e| e.to_string())?;
        ok &= (r.q - published).abs() <= 0.05;
        config.bass.q = r.q;
        parts.push(format!("{level} q {:.4} (published {published})", r.q));
    }
    let run = run_scenario(&spec, &regs).map_err(|e| e.to_string())?;
    for (level, year, target) in [(L2, 2025, 0.39), (L3, 2030, 0.08)] {
        let share = run.trajectories[&level].allocated_share_at(year);
        ok &= (share - target).abs() <= 0.01;
        parts.push(format!("{level} {year} share {:.2}%", share * 100.0));
    }
    check(ok, parts.join(", "))
}

fn entry_years() -> Outcome {
    let regs = RegistrationSeries::reference();
    let mut parts = Vec::new();
    let mut ok = true;
    for preset in Preset::ALL {
        let run = run_scenario(&builtin_preset(preset), &regs).map_err(|e| e.to_string())?;
        for (level, declared) in preset.declared_entry_years() {
            let achieved = run.trajectory(level).and_then(|t| first_year_reaching(t, ENTRY_SHARE));
            let hit = match (declared, achieved) {
                (Some(d), Some(a)) => (a - d).abs() <= 2,
                (None, None) => true,
                _ => false,
            };
            ok &= hit;
            if !hit || declared != achieved {
                parts.push(format!("{preset} {level} declared {declared:?} achieved {achieved:?}"));
            }
        }
    }
    let detail = if parts.is_empty() {
        "all declared entry years reproduced exactly".to_string()
    } else {
        parts.join("; ")
    };
    check(ok, detail)
}

fn cost_curve() -> Outcome {
    let published: [(AutomationLevel, f64, f64); 5] = [
        (L1, 814.0, 0.80),
        (L2, 1_628.0, 0.80),
        (L3, 3_579.0, 0.65),
        (L4, 6_301.0, 0.50),
        (L5, 10_934.0, 0.50),
    ];
    for (level, c_mm, hw) in published {
        let p = CostParams::default_for(level).unwrap();
        if p.mass_market_cost != c_mm || p.hw_share != hw {
            return Err(format!("{level}: defaults differ from the published table"));
        }
        for v_mm in [1.0, 12_345.0, 2.5e6, 7.0e7] {
            let at = unit_cost(&p, v_mm, v_mm).map_err(|e| e.to_string())?;
            let doubled = unit_cost(&p, 2.0 * v_mm, v_mm).map_err(|e| e.to_string())?;
            if at != c_mm || doubled != 0.8 * c_mm {
                return Err(format!("{level}: anchor {at} / doubling {doubled}"));
            }
        }
    }
    let regs = RegistrationSeries::reference();
    let mut points = 0;
    for preset in Preset::ALL {
        let o = evaluate(
            &ResolvedScenario::from_preset(preset),
            &regs,
            default_va_horizon(),
            VaBasis::Price,
        )
        .map_err(|e| e.to_string())?;
        for curve in o.cost_curves.values() {
            for pt in &curve.points {
                points += 1;
                let fail = pt.unit_production_cost < 0.3 * curve.params.mass_market_cost
                    || pt.unit_price != 1.5 * pt.unit_production_cost
                    || pt.hw_price + pt.sw_price != pt.unit_price
                    || (pt.hw_price / pt.unit_price - curve.params.hw_share).abs() > 1e-12;
                if fail {
                    return Err(format!("{preset} {} {}: {pt:?}", curve.level, pt.year));
                }
            }
            if let Some(year) = curve.anchor_year {
                if curve.point(year).unwrap().unit_production_cost != curve.params.mass_market_cost {
                    return Err(format!("{preset} {}: curve misses C_mm at its anchor", curve.level));
                }
            }
        }
    }
    Ok(format!(
        "anchor and doubling exact for L1-L5; {points} curve points within floor, markup and split"
    ))
}

fn value_added_totals() -> Outcome {
    let regs = RegistrationSeries::reference();
    let expected = [
        (Preset::Slow, 0.95e12),
        (Preset::Baseline, 1.5e12),
        (Preset::Fast, 2.6e12),
    ];
    let mut totals = BTreeMap::new();
    let mut parts = Vec::new();
    let mut ok = true;
    let mut baseline_2050 = 0.0;
    for (preset, target) in expected {
        let o = evaluate(
            &ResolvedScenario::from_preset(preset),
            &regs,
            default_va_horizon(),
            VaBasis::Price,
        )
        .map_err(|e| e.to_string())?;
        let total = o.va.horizon_total;
        let within = (total / target - 1.0).abs() <= 0.25;
        ok &= within;
        parts.push(format!(
            "{preset} {:.0} bn (target {:.0} +/-25%{})",
            total / 1e9,
            target / 1e9,
            if within { "" } else { ", out" }
        ));
        totals.insert(preset, total);
        if preset == Preset::Baseline {
            baseline_2050 = o.va.annual_total(2050);
        }
    }
    let ordered =
        totals[&Preset::Slow] < totals[&Preset::Baseline] && totals[&Preset::Baseline] < totals[&Preset::Fast];
    ok &= ordered;
    parts.push(format!("strict ordering {}", if ordered { "holds" } else { "fails" }));
    let annual_ok = (baseline_2050 / 18e9 - 1.0).abs() <= 0.5;
    ok &= annual_ok;
    parts.push(format!(
        "baseline 2050 {:.1} bn (target 18 +/-50%)",
        baseline_2050 / 1e9
    ));
    check(ok, parts.join(", "))
}

fn reference_series() -> Outcome {
    let regs = RegistrationSeries::reference();
    let mut worst: f64 = 0.0;
    for (first, last, potential) in [
        (2015, 2029, 181_040_000.0),
        (2025, 2039, 206_769_000.0),
        (2035, 2049, 220_949_000.0),
        (2040, 2050, 164_194_000.0),
    ] {
        let sum = regs.period_sum(first, last).map_err(|e| e.to_string())?;
        worst = worst.max((sum / potential - 1.0).abs());
    }
    check(worst <= 0.02, format!("worst period-sum deviation {:.2e}", worst))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |sub: &str| {
        report_command(&ReportOptions {
            registrations: RegistrationsSource::Reference,
            out_dir: dir.path().join(sub),
            va_horizon: default_va_horizon(),
            basis: VaBasis::Price,
        })
        .map_err(|e| e.to_string())
    };
    let a = run("a")?;
    let b = run("b")?;
    if a.manifest.input_hash != b.manifest.input_hash || a.manifest.artifacts != b.manifest.artifacts {
        return Err("manifest hashes differ".into());
    }
    let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
    let mut csvs = 0;
    for artifact in &a.manifest.artifacts {
        let x = read(&dir.path().join("a").join(&artifact.file))?;
        let y = read(&dir.path().join("b").join(&artifact.file))?;
        if x != y {
            return Err(format!("{} differs between runs", artifact.file));
        }
        csvs += artifact.file.ends_with(".csv") as usize;
    }
    Ok(format!(
        "{csvs} CSVs and {} artifacts byte-identical, run {}",
        a.manifest.artifacts.len(),
        &a.manifest.input_hash[..12]
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("bass mechanics", bass_mechanics),
        ("calibration roundtrip", calibration_roundtrip),
        ("fixed-point reproduction", fixed_point_reproduction),
        ("entry years", entry_years),
        ("cost curve", cost_curve),
        ("value-added totals", value_added_totals),
        ("reference series", reference_series),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
