//! Device efficiency each sample platform needs for equal and double endurance.

use endure::parity::{parity_table, SolverOptions};
use endure::{ConstraintSettings, GeneratorDesign, PlatformRegistry, Result};

fn main() -> Result<()> {
    let registry = PlatformRegistry::resolve(None)?;
    let rows = parity_table(
        &registry.platforms,
        &GeneratorDesign::reference(0.12)?,
        &ConstraintSettings::default(),
        &[1.0, 2.0],
        &SolverOptions::default(),
        None,
    )?;
    println!(
        "{:<12} {:>7} {:>9} {:>9}",
        "platform", "W/kg", "parity", "double"
    );
    for row in &rows {
        let cell = |m: f64| match row.entry(m).map(|e| &e.result) {
            Some(Ok(r)) => format!("{:.1} %", r.required_efficiency * 100.0),
            _ => "n/a".into(),
        };
        println!(
            "{:<12} {:>7} {:>9} {:>9}",
            row.platform,
            row.specific_power_req,
            cell(1.0),
            cell(2.0)
        );
    }
    Ok(())
}
