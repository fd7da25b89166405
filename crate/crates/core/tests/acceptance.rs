//! Acceptance gate. Runs every criterion, prints one line each and exits
//! non-zero if any fails.

use std::cell::Cell;

use endure::endurance::{BindingConstraint, ConstraintSet, EnduranceModel, HybridConfig};
use endure::parity::{required_efficiency, SolverOptions};
use endure::platform::{PlatformClass, PlatformRegistry, PlatformSpec};
use endure::powerplant::{
    burn_rate_for_thermal_power, canister_duration, exhaust_split, heat_sink_flow,
    min_fuel_mass_fraction, parity_specific_efficiency, scale_with_delta_t, system_specific_energy,
    FuelSpec, GeneratorDesign,
};
use endure::telemetry::{
    extrapolate_efficiency, reduce_test, PowerSample, TemperatureSample, TestInputs, TestSummary,
};
use endure::{make_fraction, parity_table, ConstraintSettings, Fraction};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<String, String> {
    let shown = if got != 0.0 && got.abs() < 1e-3 {
        format!("{got:.3e}")
    } else {
        format!("{got:.6}")
    };
    let line = format!("{name} {shown} (want {want} ± {tol:e})");
    if (got - want).abs() <= tol {
        Ok(line)
    } else {
        Err(line)
    }
}

fn all(parts: Vec<Result<String, String>>) -> Outcome {
    let failed: Vec<_> = parts
        .iter()
        .filter_map(|p| p.as_ref().err())
        .cloned()
        .collect();
    if failed.is_empty() {
        Ok(parts
            .into_iter()
            .map(Result::unwrap)
            .collect::<Vec<_>>()
            .join("; "))
    } else {
        Err(failed.join("; "))
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn f(x: f64) -> Fraction {
    make_fraction(x).unwrap()
}

fn registry() -> PlatformRegistry {
    PlatformRegistry::bundled()
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn c1_fuel_fraction() -> Outcome {
    let fmf = min_fuel_mass_fraction(150.0, &FuelSpec::butane(), f(0.12), f(0.40)).map_err(err)?;
    within("fmf", fmf.get(), 0.2298, 0.002)
}

fn c2_parity_quotients() -> Outcome {
    let mut parts = Vec::new();
    for (pack, printed) in [(150.0, 0.01103), (200.0, 0.01471)] {
        let got = parity_specific_efficiency(pack, 13_600.0)
            .map_err(err)?
            .get();
        parts.push(within(
            &format!("{pack} Wh/kg quotient"),
            got,
            pack / 13_600.0,
            1e-6,
        ));
        // the printed value is the quotient at five decimals
        let rounded = (got * 1e5).round() / 1e5;
        parts.push(within(
            &format!("{pack} Wh/kg at 5 dp"),
            rounded,
            printed,
            1e-12,
        ));
    }
    all(parts)
}

fn campaign() -> Result<TestSummary, String> {
    let powers: Vec<_> = (0..=4680)
        .map(|i| {
            // ±0.2 W ripple with zero mean over the run
            let v = 2.0 + 0.1 * (std::f64::consts::TAU * i as f64 / 468.0).sin();
            PowerSample::new(2.0 * i as f64, v, 2.3)
        })
        .collect();
    let temps: Vec<_> = (0..=9360)
        .map(|s| TemperatureSample {
            t: s as f64,
            t_hot: 340.0,
            t_cold: 74.0,
            t_ambient: 25.0,
        })
        .collect();
    let mut inputs = TestInputs::new(0.1217, 0.413, 0.227);
    inputs.exhaust_efficiency = f(0.40);
    inputs.measured_burn_rate = Some(0.0463);
    reduce_test(&temps, &powers, &inputs).map_err(err)
}

fn c3_reduction() -> Outcome {
    let s = campaign()?;
    all(vec![
        within("avg power W", s.avg_power, 4.6, 0.01),
        within("duration h", s.duration, 2.6, 1e-9),
        within("system mass g", s.system_mass * 1e3, 746.0, 1.0),
        within("energy Wh", s.energy, 12.0, 0.1),
        within("chemical Wh", s.chemical_energy, 1655.0, 2.0),
        within("system eff %", s.system_efficiency * 100.0, 0.72, 0.03),
        within("device eff %", s.device_efficiency * 100.0, 1.81, 0.06),
        within("thermal W", s.thermal_power, 629.7, 1.0),
        within("delivered W", s.delivered_power, 252.0, 1.0),
        within("lost W", s.exhaust_loss, 378.0, 1.0),
        within("extrapolated Wh", s.extrapolated_energy, 22.4, 0.4),
        within("specific energy Wh/kg", s.specific_energy, 30.0, 0.5),
        within("specific power W/kg", s.specific_power, 6.2, 0.2),
    ])
}

fn c4_extrapolation() -> Outcome {
    let s = campaign()?;
    let (se, sp) = extrapolate_efficiency(&s, 0.018, 0.12).map_err(err)?;
    all(vec![
        within("Wh/kg", se, 200.0, 10.0),
        within("W/kg", sp, 40.0, 2.0),
    ])
}

fn c5_airflow() -> Outcome {
    within(
        "m³/min",
        heat_sink_flow(0.070, 0.038, 6.0).map_err(err)?,
        0.958,
        0.005,
    )
}

fn c6_canister() -> Outcome {
    let butane = FuelSpec::butane();
    let full = burn_rate_for_thermal_power(2600.0, &butane).map_err(err)?;
    all(vec![
        within(
            "h at 46.3 g/h",
            canister_duration(0.227, 0.0463).map_err(err)?,
            4.90,
            0.01,
        ),
        within(
            "h at 2600 W",
            canister_duration(0.227, full).map_err(err)?,
            1.19,
            0.02,
        ),
        within("flow ratio", 0.0463 / full, 0.242, 0.0005),
    ])
}

fn puma() -> PlatformSpec {
    registry().find("puma").unwrap().clone()
}

fn c7_closure() -> Outcome {
    let p = puma();
    let model = EnduranceModel::with_defaults(&p, &GeneratorDesign::reference(0.105).map_err(err)?)
        .map_err(err)?;
    let r = model
        .evaluate(&HybridConfig::battery_only(p.battery_energy).map_err(err)?)
        .map_err(err)?;
    within("relative error", (r.endurance - 2.0).abs() / 2.0, 0.0, 1e-6)
}

fn c8_surface() -> Outcome {
    let model =
        EnduranceModel::with_defaults(&puma(), &GeneratorDesign::reference(0.105).map_err(err)?)
            .map_err(err)?;
    let grid = model.sweep(50, 50, None).map_err(err)?;
    let corner = grid.cell(0, 49).endurance();
    let stock = grid.cell(49, 0).endurance();
    let dip = (1..50)
        .map(|i| grid.cell(49, i))
        .filter(|c| c.endurance() < stock)
        .min_by(|a, b| a.endurance().total_cmp(&b.endurance()));
    let dip_line = match dip {
        Some(c) => Ok(format!(
            "dip to {:.3} h at {:.0} mL (stock {stock:.3} h)",
            c.endurance(),
            c.fuel_volume * 1e3
        )),
        None => Err("no fuel volume lowers endurance at stock battery".into()),
    };
    all(vec![
        Ok(format!("{} cells", grid.cells.len())),
        within("pure-fuel corner h", corner, 2.0, 0.3),
        dip_line,
    ])
}

fn c9_table() -> Outcome {
    let reg = registry();
    let rows = parity_table(
        &reg.platforms,
        &GeneratorDesign::reference(0.12).map_err(err)?,
        &ConstraintSettings::default(),
        &[1.0, 2.0],
        &SolverOptions::default(),
        None,
    )
    .map_err(err)?;
    let mut parts = Vec::new();
    let mut worst_fixed_point: f64 = 0.0;
    for row in &rows {
        let one = row.entry(1.0).unwrap().result.as_ref().map_err(err)?;
        let two = row.entry(2.0).unwrap().result.as_ref().map_err(err)?;
        for r in [one, two] {
            worst_fixed_point = worst_fixed_point
                .max((r.achieved_endurance - r.target_endurance).abs() / r.target_endurance);
        }
        if two.required_efficiency <= one.required_efficiency {
            parts.push(Err(format!(
                "{}: double {} <= parity {}",
                row.platform, two.required_efficiency, one.required_efficiency
            )));
        }
        match row.platform.as_str() {
            "Puma" => parts.push(within(
                "Puma parity %",
                one.required_efficiency * 100.0,
                10.5,
                3.0,
            )),
            "Trinity" => parts.push(within(
                "Trinity parity %",
                one.required_efficiency * 100.0,
                11.8,
                3.0,
            )),
            _ => {}
        }
    }
    parts.push(Ok(format!("double > parity for {} platforms", rows.len())));
    parts.push(within(
        "worst fixed-point residual",
        worst_fixed_point,
        0.0,
        1e-6,
    ));
    all(parts)
}

fn c10_fuel_caps() -> Outcome {
    let p = puma();
    let c = ConstraintSet::for_platform(&p);
    let template = GeneratorDesign::reference(0.12).map_err(err)?;
    let parity = required_efficiency(&p, &template, 1.0, &c).map_err(err)?;
    let model = EnduranceModel::new(
        &p,
        &template
            .with_device_efficiency(parity.required_efficiency)
            .map_err(err)?,
        &c,
    )
    .map_err(err)?;
    let max = model.max_fuel_volume().map_err(err)?;

    let talon = registry().find("talon").unwrap().clone();
    let tc = ConstraintSet::for_platform(&talon);
    let tparity = required_efficiency(&talon, &template, 1.0, &tc).map_err(err)?;
    let tmodel = EnduranceModel::new(
        &talon,
        &template
            .with_device_efficiency(tparity.required_efficiency)
            .map_err(err)?,
        &tc,
    )
    .map_err(err)?;
    let tmax = tmodel.max_fuel_volume().map_err(err)?;
    let bound = if tmax.binding == BindingConstraint::VolumeCap {
        Ok("Talon volume-bound".to_owned())
    } else {
        Err(format!("Talon bound by {}", tmax.binding))
    };
    all(vec![
        within("Puma max fuel mL", max.volume * 1e3, 925.0, 175.0),
        within("Puma parity fmf", parity.fuel_mass_fraction, 0.23, 0.04),
        within("Talon max fuel L", tmax.volume, 4.95, 0.05 * 4.95),
        bound,
    ])
}

prop_compose! {
    fn arb_platform()(
        sp in 2.0..100.0f64,
        wh_per_kg in 100.0..250.0f64,
        battery_mass in 0.2..10.0f64,
        kg_per_l in 1.5..2.5f64,
        airframe_ratio in 0.3..10.0f64,
    ) -> PlatformSpec {
        let energy = wh_per_kg * battery_mass;
        PlatformSpec {
            name: "random".into(),
            class: PlatformClass::FixedWing,
            specific_power_req: sp,
            battery_energy: energy,
            battery_mass,
            battery_volume: battery_mass / kg_per_l,
            stated_endurance: energy / (sp * battery_mass * (1.0 + airframe_ratio)),
            empty_mass: None,
            provenance: None,
        }
    }
}

fn c11_properties() -> Outcome {
    let mut parts = Vec::new();
    let report = |name: &str, r: Result<(), String>| match r {
        Ok(()) => Ok(format!("{name} ok")),
        Err(e) => Err(format!("{name}: {e}")),
    };

    let eq2 = runner(100).run(
        &(
            5_000.0..50_000.0f64,
            0.01..1.0f64,
            0.005..0.5f64,
            0.1..1.0f64,
        ),
        |(e_fuel, fmf, eta_dev, eta_exh)| {
            let fuel = FuelSpec {
                specific_energy: e_fuel,
                ..FuelSpec::butane()
            };
            let e = system_specific_energy(&fuel, f(fmf), f(eta_dev), f(eta_exh)).unwrap();
            let back = min_fuel_mass_fraction(e, &fuel, f(eta_dev), f(eta_exh))
                .unwrap()
                .get();
            prop_assert!((back - fmf).abs() <= 1e-12 * fmf, "{back} vs {fmf}");
            Ok(())
        },
    );
    parts.push(report("round trip", eq2.map_err(err)));

    let split = runner(100).run(&(0.0..1e5f64, 0.0..=1.0f64), |(p, eta)| {
        let s = exhaust_split(p, f(eta)).unwrap();
        prop_assert_eq!(s.delivered + s.lost, p);
        Ok(())
    });
    parts.push(report("exhaust split", split.map_err(err)));

    let eta_mono = runner(100).run(
        &(
            arb_platform(),
            0.05..1.0f64,
            0.0..1.0f64,
            0.01..0.5f64,
            0.0..0.3f64,
        ),
        |(p, b, v, eta, d)| {
            let c = ConstraintSet::for_platform(&p);
            let cfg = HybridConfig::new(b * p.battery_energy, v * p.battery_volume).unwrap();
            let at = |e: f64| {
                EnduranceModel::new(&p, &GeneratorDesign::reference(e).unwrap(), &c)
                    .and_then(|m| m.evaluate(&cfg))
                    .unwrap()
                    .endurance
            };
            let (lo, hi) = (at(eta), at(eta + d));
            prop_assert!(hi >= lo * (1.0 - 1e-12), "{lo} -> {hi}");
            Ok(())
        },
    );
    parts.push(report("monotone in η_dev", eta_mono.map_err(err)));

    let mass_mono = runner(100).run(
        &(
            arb_platform(),
            0.05..1.0f64,
            0.0..1.0f64,
            0.01..0.5f64,
            0.0..5.0f64,
        ),
        |(p, b, v, eta, extra)| {
            let c = ConstraintSet::for_platform(&p);
            let cfg = HybridConfig::new(b * p.battery_energy, v * p.battery_volume).unwrap();
            let base = endure::mass_closure(&p).unwrap().empty_mass;
            let design = GeneratorDesign::reference(eta).unwrap();
            let at = |m: f64| {
                let q = PlatformSpec {
                    empty_mass: Some(m),
                    ..p.clone()
                };
                EnduranceModel::new(&q, &design, &c)
                    .and_then(|m| m.evaluate(&cfg))
                    .unwrap()
                    .endurance
            };
            let (light, heavy) = (at(base), at(base + extra));
            prop_assert!(heavy <= light * (1.0 + 1e-12), "{light} -> {heavy}");
            Ok(())
        },
    );
    parts.push(report("monotone in dead mass", mass_mono.map_err(err)));

    let order: Vec<(usize, usize)> = (0..8).flat_map(|b| (0..8).map(move |f| (b, f))).collect();
    let shuffled = runner(100).run(
        &(0.05..0.4f64, Just(order).prop_shuffle()),
        |(eta, order)| {
            let model =
                EnduranceModel::with_defaults(&puma(), &GeneratorDesign::reference(eta).unwrap())
                    .unwrap();
            let grid = match model.sweep(8, 8, Some(1)) {
                Ok(g) => g,
                Err(_) => return Ok(()),
            };
            for &(b, fi) in &order {
                let cell = grid.cell(b, fi);
                let again = model
                    .evaluate_cell(grid.battery_axis[b], grid.fuel_axis[fi])
                    .unwrap();
                prop_assert_eq!(&cell.result, &again);
            }
            let parallel = model.sweep(8, 8, Some(4)).unwrap();
            prop_assert_eq!(grid.to_csv().unwrap(), parallel.to_csv().unwrap());
            Ok(())
        },
    );
    parts.push(report("sweep order independence", shuffled.map_err(err)));

    let solved = Cell::new(0);
    let parity_mono = runner(100).run(&arb_platform(), |p| {
        let c = ConstraintSet::for_platform(&p);
        let d = GeneratorDesign::reference(0.12).unwrap();
        let Ok(one) = required_efficiency(&p, &d, 1.0, &c) else {
            return Ok(());
        };
        solved.set(solved.get() + 1);
        match required_efficiency(&p, &d, 2.0, &c) {
            Ok(two) => prop_assert!(two.required_efficiency > one.required_efficiency),
            // double needs more than the top of the bracket
            Err(endure::Error::NoStraddle {
                endurance_hi,
                target,
                ..
            }) => {
                prop_assert!(endurance_hi < target)
            }
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
        Ok(())
    });
    parts.push(report("parity monotone", parity_mono.map_err(err)));
    parts.push(if solved.get() >= 50 {
        Ok(format!(
            "{}/100 random platforms solvable at parity",
            solved.get()
        ))
    } else {
        Err(format!(
            "only {}/100 random platforms solvable at parity",
            solved.get()
        ))
    });
    all(parts)
}

fn c12_delta_t() -> Outcome {
    let doubling = runner(100).run(&(0.0..1e4f64, 0.0..0.5f64, 1.0..1e3f64), |(p, eta, dt)| {
        let s = scale_with_delta_t(p, f(eta), dt, 2.0 * dt).unwrap();
        prop_assert_eq!(s.power, 4.0 * p);
        prop_assert_eq!(s.efficiency.get(), 2.0 * eta);
        Ok(())
    });
    let composition = runner(100).run(
        &(
            0.0..1e4f64,
            0.0..0.019f64,
            10.0..500.0f64,
            10.0..500.0f64,
            10.0..500.0f64,
        ),
        |(p, eta, a, b, c)| {
            let direct = scale_with_delta_t(p, f(eta), a, c).unwrap();
            let mid = scale_with_delta_t(p, f(eta), a, b).unwrap();
            let two = scale_with_delta_t(mid.power, mid.efficiency, b, c).unwrap();
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
            prop_assert!(close(direct.power, two.power));
            prop_assert!(close(direct.efficiency.get(), two.efficiency.get()));
            Ok(())
        },
    );
    let example = scale_with_delta_t(20.0, f(0.05), 300.0, 600.0).map_err(err)?;
    all(vec![
        doubling.map(|_| "doubling exact".to_owned()).map_err(err),
        composition
            .map(|_| "composition within 1e-12".to_owned())
            .map_err(err),
        within("20 W at 600 °C ΔT", example.power, 80.0, 0.0),
        within("5 % at 600 °C ΔT", example.efficiency.get(), 0.10, 0.0),
    ])
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("parity fuel mass fraction", c1_fuel_fraction),
        ("parity specific efficiency", c2_parity_quotients),
        ("burner test reduction", c3_reduction),
        ("efficiency extrapolation", c4_extrapolation),
        ("heat sink airflow", c5_airflow),
        ("canister endurance", c6_canister),
        ("platform closure", c7_closure),
        ("hybrid surface shape", c8_surface),
        ("parity table", c9_table),
        ("fuel caps", c10_fuel_caps),
        ("property suites", c11_properties),
        ("ΔT scaling", c12_delta_t),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
