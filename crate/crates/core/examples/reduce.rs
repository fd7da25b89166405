//! Reduces a synthetic burner test: 4.6 W for 2.6 h with the hot side held
//! near 340 °C. The logs are written to disk first so the same files can be
//! fed to `endure reduce`.

use std::fmt::Write as _;
use std::fs::File;
use std::path::PathBuf;

use endure::telemetry::{
    extrapolate_efficiency, parse_power_log, parse_temperature_log, reduce_test, PowerColumns,
    TemperatureColumns, TestInputs,
};
use endure::Result;

fn main() -> Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("endure-logs")
            .display()
            .to_string()
    }));
    std::fs::create_dir_all(&dir)?;

    let mut temps = String::from("timestamp,T_hot_C,T_cold_C,T_amb_C\n");
    for s in 0..=9360 {
        let wobble = 5.0 * (s as f64 / 600.0).sin();
        let _ = writeln!(
            temps,
            "{s},{:.2},{:.2},25.0",
            340.0 + wobble,
            74.0 + 0.1 * wobble
        );
    }
    let mut power = String::from("time_s,voltage_V,current_A\n");
    for i in 0..=4680 {
        let ripple = 0.1 * (i as f64 / 50.0).sin();
        let _ = writeln!(power, "{},{:.4},2.3", 2 * i, 2.0 + ripple);
    }
    std::fs::write(dir.join("temps.csv"), temps)?;
    std::fs::write(dir.join("power.csv"), power)?;

    let t = parse_temperature_log(
        File::open(dir.join("temps.csv"))?,
        &TemperatureColumns::default(),
        b',',
    )?;
    let p = parse_power_log(
        File::open(dir.join("power.csv"))?,
        &PowerColumns::default(),
        b',',
    )?;
    let mut inputs = TestInputs::new(0.1217, 0.413, 0.227);
    inputs.measured_burn_rate = Some(0.0463);
    let summary = reduce_test(&t.samples, &p.samples, &inputs)?;
    print!("{}", summary.report());

    let (se, sp) = extrapolate_efficiency(&summary, summary.device_efficiency, 0.12)?;
    println!("at 12 % device efficiency: {se:.0} Wh/kg, {sp:.0} W/kg");
    println!(
        "CLI: endure reduce --temps {0}/temps.csv --power {0}/power.csv \
         --fuel-burned-g 121.7 --dry-mass-g 413 --canister-g 227 --burn-rate-gph 46.3",
        dir.display()
    );
    Ok(())
}
