use std::fmt::Write as _;
use std::io::Cursor;

use endure::endurance::{EnduranceModel, HybridConfig};
use endure::telemetry::{
    parse_power_log, reduce_test, sliding_mean, PowerColumns, PowerSample, TemperatureSample,
    TestInputs,
};
use endure::{make_fraction, GeneratorDesign, PlatformRegistry};
use proptest::prelude::*;

fn flat_temps(seconds: usize) -> Vec<TemperatureSample> {
    (0..=seconds)
        .map(|s| TemperatureSample {
            t: s as f64,
            t_hot: 330.0,
            t_cold: 70.0,
            t_ambient: 22.0,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sliding_mean_keeps_the_mean(
        noise in prop::collection::vec(-1.0..1.0f64, 200..2000),
        frac in 0.0..0.1f64,
    ) {
        let xs: Vec<f64> = noise.iter().map(|e| 10.0 + e).collect();
        let w = ((xs.len() as f64 * frac) as usize).max(1);
        let smooth = sliding_mean(&xs, w).unwrap();
        prop_assert_eq!(smooth.len(), xs.len());
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        prop_assert!((mean(&smooth) - mean(&xs)).abs() <= 0.005 * mean(&xs));
    }

    #[test]
    fn line_endings_do_not_matter(volts in prop::collection::vec(0.0..5.0f64, 2..50)) {
        let mut lf = String::from("time_s,voltage_V,current_A\n");
        for (i, v) in volts.iter().enumerate() {
            let _ = writeln!(lf, "{},{v},1.5", 2 * i);
        }
        let crlf = lf.replace('\n', "\r\n");
        let parse = |s: String| parse_power_log(Cursor::new(s.into_bytes()), &PowerColumns::default(), b',').unwrap();
        prop_assert_eq!(parse(lf), parse(crlf));
    }

    #[test]
    fn reduction_identities(
        watts in 0.5..50.0f64,
        hours in 0.5..5.0f64,
        grams in 10.0..500.0f64,
        eta_exh in 0.1..1.0f64,
        measured in prop::option::of(5.0..300.0f64),
    ) {
        let span = (hours * 3600.0).round() as usize;
        let powers: Vec<_> = (0..=span / 2).map(|i| PowerSample::new(2.0 * i as f64, watts, 1.0)).collect();
        let temps = flat_temps(powers.last().unwrap().t as usize);
        let mut inputs = TestInputs::new(grams / 1e3, 0.4, 0.227);
        inputs.exhaust_efficiency = make_fraction(eta_exh).unwrap();
        inputs.measured_burn_rate = measured.map(|g| g / 1e3);
        let s = reduce_test(&temps, &powers, &inputs).unwrap();
        prop_assert_eq!(s.device_efficiency * eta_exh, s.system_efficiency);
        prop_assert_eq!(s.delivered_power + s.exhaust_loss, s.thermal_power);
        let thermal = s.burn_rate * inputs.fuel.specific_energy;
        prop_assert!((thermal - s.thermal_power).abs() <= 1e-9 * s.thermal_power);
        prop_assert!((s.energy - s.avg_power * s.duration).abs() <= 0.005 * s.energy);
    }

    #[test]
    fn max_fuel_is_the_feasibility_edge(eta in 0.06..0.5f64, which in 0usize..5) {
        let reg = PlatformRegistry::bundled();
        let p = &reg.platforms[which];
        let model = EnduranceModel::with_defaults(p, &GeneratorDesign::reference(eta).unwrap()).unwrap();
        if let Ok(max) = model.max_fuel_volume() {
            prop_assert!(max.result.feasible);
            let step = 2.0 * model.constraints().volume_resolution;
            let over = model.evaluate(&HybridConfig::fuel_only(max.volume + step).unwrap()).unwrap();
            prop_assert!(!over.feasible);
        }
    }
}
