// SPDX-License-Identifier: MIT OR Apache-2.0

use notseg::{
    draw_ensemble, not_detect, select_on_path, solution_path, ssic_score, ChangePointSet, DetectionConfig, Scenario,
    TimeSeries,
};
use proptest::prelude::*;

fn series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 12..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn detection_ignores_a_constant_shift(y in series(), c in -100.0f64..100.0, zeta in 0.5f64..4.0, seed in 0u64..50) {
        let sc = Scenario::PcwsConstMean;
        let ens = draw_ensemble(y.len(), 60, sc, seed).unwrap();
        let cfg = DetectionConfig::new(zeta, sc, ens);
        let a = not_detect(&TimeSeries::new(y.clone()).unwrap(), &cfg).unwrap();
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let b = not_detect(&TimeSeries::new(shifted).unwrap(), &cfg).unwrap();
        // Shifting perturbs contrasts by rounding only; compare away from
        // the path's breakpoints.
        let path = solution_path(&TimeSeries::new(y).unwrap(), &cfg.ensemble, sc).unwrap();
        let near = path.thresholds().iter().chain([path.end_threshold()].iter()).any(|t| (t - zeta).abs() < 1e-6);
        prop_assume!(!near);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn path_thresholds_scale_with_the_data(y in series(), k in 0.1f64..10.0, seed in 0u64..50) {
        let sc = Scenario::PcwsLinMean;
        let ens = draw_ensemble(y.len(), 40, sc, seed).unwrap();
        let a = solution_path(&TimeSeries::new(y.clone()).unwrap(), &ens, sc).unwrap();
        let b = solution_path(&TimeSeries::new(y.iter().map(|v| v * k).collect()).unwrap(), &ens, sc).unwrap();
        prop_assert!((b.end_threshold() - k * a.end_threshold()).abs() <= 1e-8 * (1.0 + b.end_threshold()));
    }

    #[test]
    fn selection_is_scale_invariant(y in series(), k in 0.1f64..10.0, seed in 0u64..50) {
        let sc = Scenario::PcwsConstMean;
        let ens = draw_ensemble(y.len(), 50, sc, seed).unwrap();
        let ya = TimeSeries::new(y.clone()).unwrap();
        let yb = TimeSeries::new(y.iter().map(|v| v * k).collect()).unwrap();
        let path = solution_path(&ya, &ens, sc).unwrap();
        let a = select_on_path(&ya, &path, sc, 1.0, 25).unwrap();
        let b = select_on_path(&yb, &path, sc, 1.0, 25).unwrap();
        // Scores shift by T·log k²; the argmin is unchanged unless two
        // candidates are within rounding of each other.
        let gap = path
            .small_models(25)
            .map(|(_, c)| ssic_score(&ya, &c, sc, 1.0).unwrap().ssic - a.ssic)
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-6);
        prop_assert_eq!(a.cps, b.cps);
        prop_assert!((b.ssic - a.ssic - y.len() as f64 * (k * k).ln()).abs() < 1e-6 * (1.0 + a.ssic.abs()));
    }

    #[test]
    fn path_models_are_valid_and_ordered(y in series(), seed in 0u64..50) {
        for sc in Scenario::ALL {
            let ens = draw_ensemble(y.len(), 30, sc, seed).unwrap();
            let path = solution_path(&TimeSeries::new(y.clone()).unwrap(), &ens, sc).unwrap();
            prop_assert!(path.thresholds().windows(2).all(|w| w[0] < w[1]));
            let mut prev: Option<ChangePointSet> = None;
            for m in path.models() {
                prop_assert_eq!(m.series_len(), y.len());
                prop_assert!(prev.as_ref() != Some(&m));
                prev = Some(m);
            }
        }
    }
}
