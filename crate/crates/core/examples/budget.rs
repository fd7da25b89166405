//! Specific-energy budget: what a butane generator must achieve to match a
//! lithium pack, and the fuel fraction that implies.

use endure::powerplant::{
    min_fuel_mass_fraction, parity_specific_efficiency, system_specific_energy, FuelSpec,
};
use endure::{make_fraction, Result};

fn main() -> Result<()> {
    let butane = FuelSpec::butane();
    for pack in [150.0, 200.0] {
        let eta = parity_specific_efficiency(pack, butane.specific_energy)?;
        println!(
            "{pack} Wh/kg pack: fuel-to-electric parity efficiency {:.4}",
            eta.get()
        );
    }

    let (eta_dev, eta_exh) = (make_fraction(0.12)?, make_fraction(0.40)?);
    let fmf = min_fuel_mass_fraction(150.0, &butane, eta_dev, eta_exh)?;
    println!(
        "minimum fuel mass fraction at 12 % device efficiency: {:.4}",
        fmf.get()
    );

    for f in [0.2, 0.3, 0.4, 0.5] {
        let e = system_specific_energy(&butane, make_fraction(f)?, eta_dev, eta_exh)?;
        println!("  fuel fraction {f:.1} -> {e:.0} Wh/kg");
    }
    Ok(())
}
