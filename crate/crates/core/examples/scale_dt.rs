//! TE module output as the hot-to-cold temperature difference grows, plus the
//! heat-sink airflow and canister durations behind the burner test.

use endure::powerplant::{
    burn_rate_for_thermal_power, canister_duration, heat_sink_flow, scale_with_delta_t, FuelSpec,
};
use endure::{make_fraction, Result};

fn main() -> Result<()> {
    let eta = make_fraction(0.05)?;
    println!("{:>6} {:>8} {:>6}", "ΔT", "P (W)", "η");
    for dt in [150.0, 300.0, 450.0, 600.0] {
        let p = scale_with_delta_t(20.0, eta, 300.0, dt)?;
        println!("{dt:>6} {:>8.1} {:>6.3}", p.power, p.efficiency.get());
    }

    println!(
        "duct 70 x 38 mm at 6 m/s: {:.3} m³/min",
        heat_sink_flow(0.070, 0.038, 6.0)?
    );
    let butane = FuelSpec::butane();
    let full_flow = burn_rate_for_thermal_power(2600.0, &butane)?;
    println!(
        "227 g canister at 46.3 g/h: {:.2} h",
        canister_duration(0.227, 0.0463)?
    );
    println!(
        "227 g canister at 2600 W:   {:.2} h",
        canister_duration(0.227, full_flow)?
    );
    Ok(())
}
