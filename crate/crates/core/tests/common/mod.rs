//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use avdiff_core::{AutomationLevel, BassParams, RegistrationSeries};
use num::{BigRational, Signed, ToPrimitive, Zero};

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Cumulative adopters per year, computed in exact rational arithmetic from
/// the f64 inputs. Keep periods short: denominators grow quickly.
pub fn rational_cumulative(params: &BassParams) -> Vec<f64> {
    let p = exact(params.p);
    let q = exact(params.q);
    let cap = exact(params.market_potential);
    let mut n_cum = BigRational::zero();
    let mut out = Vec::new();
    for _ in params.years() {
        let raw = &p * &cap + (&q - &p) * &n_cum - (&q / &cap) * &n_cum * &n_cum;
        let room = &cap - &n_cum;
        let n = if raw.is_negative() {
            BigRational::zero()
        } else if raw > room {
            room
        } else {
            raw
        };
        n_cum += n;
        out.push(n_cum.to_f64().unwrap());
    }
    out
}

/// Cumulative fraction of N̄ after `years`, integrating the continuous Bass
/// equation with `substeps` explicit Euler steps per year.
pub fn fine_step_fraction(p: f64, q: f64, years: f64, substeps: usize) -> f64 {
    let steps = (years * substeps as f64).round() as usize;
    let dt = 1.0 / substeps as f64;
    let mut f = 0.0f64;
    for _ in 0..steps {
        f += dt * (p + q * f) * (1.0 - f);
        f = f.min(1.0);
    }
    f
}

/// Raw share at `year` computed with a separate loop (no clamping shortcuts
/// shared with the library).
pub fn share_oracle(params: &BassParams, regs: &RegistrationSeries, year: i32) -> f64 {
    let mut n_cum = 0.0f64;
    for y in params.years() {
        let raw = params.p * params.market_potential + (params.q - params.p) * n_cum
            - params.q / params.market_potential * n_cum * n_cum;
        let n = raw.clamp(0.0, params.market_potential - n_cum);
        if y == year {
            return n / regs.get(y).unwrap();
        }
        n_cum += n;
    }
    panic!("year {year} outside period")
}

/// q on the grid `q_lo, q_lo + step, ..` whose share is closest to `target`,
/// together with all grid shares.
pub fn grid_search(
    base: &BassParams,
    regs: &RegistrationSeries,
    year: i32,
    target: f64,
    q_lo: f64,
    q_hi: f64,
    step: f64,
) -> (f64, Vec<f64>) {
    let n = ((q_hi - q_lo) / step).round() as usize;
    let shares: Vec<f64> = (0..=n)
        .map(|i| share_oracle(&base.with_q(q_lo + i as f64 * step), regs, year))
        .collect();
    let best = shares
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .map(|(i, _)| i)
        .unwrap();
    (q_lo + best as f64 * step, shares)
}

/// Top-down allocation re-derived from raw shares: highest level first,
/// each level capped by what is left.
pub fn allocate_oracle(raw: &BTreeMap<AutomationLevel, f64>) -> BTreeMap<AutomationLevel, f64> {
    let mut left = 1.0f64;
    let mut out = BTreeMap::new();
    for (&level, &share) in raw.iter().rev() {
        let take = share.min(left).max(0.0);
        left -= take;
        out.insert(level, take);
    }
    out
}

/// Experience curve written in exp/ln form.
pub fn unit_cost_oracle(c_mm: f64, learning_rate: f64, floor_ratio: f64, v: f64, v_mm: f64) -> f64 {
    let doublings = (v / v_mm).ln() / std::f64::consts::LN_2;
    let cost = c_mm * (doublings * (1.0 - learning_rate).ln()).exp();
    cost.max(floor_ratio * c_mm)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Proptest settings for integration tests (no regression files next to
/// test sources).
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: Some(Box::new(proptest::test_runner::FileFailurePersistence::Off)),
        ..proptest::test_runner::Config::default()
    }
}
