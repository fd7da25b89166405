//! Hybrid endurance grid for one platform, written as CSV plus a JSON sidecar.
//!
//! `cargo run --example sweep -- puma 0.105 out/`

use std::path::PathBuf;

use endure::output::write_atomic;
use endure::{EnduranceModel, GeneratorDesign, PlatformRegistry, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "puma".into());
    let eta: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.105);
    let out = PathBuf::from(
        args.next()
            .unwrap_or_else(|| std::env::temp_dir().display().to_string()),
    );

    let registry = PlatformRegistry::resolve(None)?;
    let platform = registry.find(&name)?;
    let model = EnduranceModel::with_defaults(platform, &GeneratorDesign::reference(eta)?)?;
    let grid = model.sweep(25, 25, None)?;

    let best = grid
        .cells
        .iter()
        .filter(|c| c.feasible())
        .max_by(|a, b| a.endurance().total_cmp(&b.endurance()))
        .expect("the stock battery cell is feasible");
    println!(
        "{}: max fuel {:.0} mL ({}), best feasible {:.2} h at {:.0} Wh + {:.0} mL",
        platform.name,
        grid.max_fuel.volume * 1e3,
        grid.max_fuel.binding,
        best.endurance(),
        best.battery_energy,
        best.fuel_volume * 1e3
    );

    // endurance along the stock-battery row shows the dead-weight dip
    let top = grid.battery_axis.len() - 1;
    for f in [0, 1, 2, grid.fuel_axis.len() - 1] {
        let c = grid.cell(top, f);
        println!(
            "  {:>6.0} mL -> {:.3} h",
            c.fuel_volume * 1e3,
            c.endurance()
        );
    }

    write_atomic(&out.join("sweep.csv"), &grid.to_csv()?)?;
    write_atomic(&out.join("sweep.meta.json"), grid.meta_json()?.as_bytes())?;
    println!("wrote {}", out.join("sweep.csv").display());
    Ok(())
}
