//! Fuel caps per platform, with the generator that fills the stock battery bay.

use endure::{EnduranceModel, GeneratorDesign, PlatformRegistry, Result};

fn main() -> Result<()> {
    let eta: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.12);
    let design = GeneratorDesign::reference(eta)?;
    for platform in &PlatformRegistry::resolve(None)?.platforms {
        let model = EnduranceModel::with_defaults(platform, &design)?;
        match model.max_fuel_volume() {
            Ok(max) => {
                let g = max
                    .result
                    .generator
                    .as_ref()
                    .expect("pure-fuel result carries a generator");
                println!(
                    "{:<12} {:>7.0} mL  {:<10} fmf {:.2}  TE side {:.1} cm  {:.2} h",
                    platform.name,
                    max.volume * 1e3,
                    max.binding.as_str(),
                    g.fuel_mass_fraction().get(),
                    g.te_array_side,
                    max.result.endurance
                );
            }
            Err(e) => println!("{:<12} {e}", platform.name),
        }
    }
    Ok(())
}
