mod common;

use avdiff_core::level::AutomationLevel::{self, *};
use avdiff_core::pipeline::evaluate;
use avdiff_core::{unit_cost, CostParams, Preset, RegistrationSeries, ResolvedScenario, VaBasis};
use proptest::prelude::*;

const LEVELS: [AutomationLevel; 5] = [L1, L2, L3, L4, L5];

#[test]
fn matches_exp_ln_oracle() {
    for level in LEVELS {
        let p = CostParams::default_for(level).unwrap();
        for ratio in [0.01, 0.3, 1.0, 1.7, 8.0, 50.0, 1e4] {
            let v_mm = 3.0e6;
            let got = unit_cost(&p, ratio * v_mm, v_mm).unwrap();
            let want = common::unit_cost_oracle(p.mass_market_cost, 0.2, 0.3, ratio * v_mm, v_mm);
            assert!(common::rel_diff(got, want) <= 1e-12, "{level} {ratio}: {got} vs {want}");
        }
    }
}

#[test]
fn preset_curves_hold_price_and_split_identities() {
    let regs = RegistrationSeries::reference();
    for preset in Preset::ALL {
        let outcome = evaluate(
            &ResolvedScenario::from_preset(preset),
            &regs,
            avdiff_core::pipeline::default_va_horizon(),
            VaBasis::Price,
        )
        .unwrap();
        for curve in outcome.cost_curves.values() {
            let floor = curve.params.floor();
            let mut prev = f64::INFINITY;
            for pt in &curve.points {
                assert!(pt.unit_production_cost >= floor);
                assert!(pt.unit_production_cost <= prev, "{preset} {} {}", curve.level, pt.year);
                prev = pt.unit_production_cost;
                assert_eq!(pt.unit_price, pt.unit_production_cost * 1.5);
                assert_eq!(pt.hw_price + pt.sw_price, pt.unit_price);
            }
            if let Some(year) = curve.anchor_year {
                assert_eq!(
                    curve.point(year).unwrap().unit_production_cost,
                    curve.params.mass_market_cost
                );
            }
        }
    }
}

fn level_strategy() -> impl Strategy<Value = AutomationLevel> {
    prop::sample::select(LEVELS.to_vec())
}

proptest! {
    #![proptest_config(common::proptest_config(512))]

    #[test]
    fn cost_falls_with_volume(level in level_strategy(), v1 in 1.0f64..1e9, v2 in 1.0f64..1e9, v_mm in 1e4f64..1e8) {
        let p = CostParams::default_for(level).unwrap();
        let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        prop_assert!(unit_cost(&p, lo, v_mm).unwrap() >= unit_cost(&p, hi, v_mm).unwrap());
    }

    #[test]
    fn doubling_multiplies_by_point_eight(level in level_strategy(), v in 1.0f64..1e9, v_mm in 1e4f64..1e8) {
        let p = CostParams::default_for(level).unwrap();
        let a = unit_cost(&p, v, v_mm).unwrap();
        let b = unit_cost(&p, 2.0 * v, v_mm).unwrap();
        prop_assume!(b > p.floor());
        prop_assert!((b / a - 0.8).abs() <= 1e-12, "{}", b / a);
    }

    #[test]
    fn floor_is_never_crossed(level in level_strategy(), v in 1.0f64..1e15, v_mm in 1.0f64..1e8) {
        let p = CostParams::default_for(level).unwrap();
        prop_assert!(unit_cost(&p, v, v_mm).unwrap() >= 0.3 * p.mass_market_cost);
    }

    #[test]
    fn split_is_exact(level in level_strategy(), hw in 0.0f64..=1.0, amount in 0.0f64..1e12) {
        let mut p = CostParams::default_for(level).unwrap();
        p.hw_share = hw;
        p.sw_share = 1.0 - hw;
        let (h, s) = p.split(amount);
        prop_assert_eq!(h + s, amount);
        prop_assert!(h >= 0.0 && s >= 0.0);
    }
}
