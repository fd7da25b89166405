//! Fuels, batteries, thermoelectric modules and complete generator builds.
//!
//! The generator system specific energy is
//!
//! ```text
//! e_sys = e_fuel * m_fuel / (m_gen + m_fuel) * η_dev * η_exh
//! ```
//!
//! where `m_gen` is everything that is not fuel (hardware and tank). Parity
//! with a battery of specific energy `e_bat` needs the product of the last
//! three factors to reach `e_bat / e_fuel`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::{finite, non_negative, positive, positive_fraction, Fraction, ML_PER_L};

/// Butane liquid density, kg/L.
pub const BUTANE_LIQUID_DENSITY: f64 = 0.573;
/// Butane specific energy, Wh/kg.
pub const BUTANE_SPECIFIC_ENERGY: f64 = 13_600.0;
/// Canister tare per unit fuel mass: 8 oz canister, 333.4 g full with 227 g fuel.
pub const CANISTER_TARE_RATIO: f64 = 0.469;
/// Exhaust-loss efficiency commonly assumed for small burners.
pub const DEFAULT_EXHAUST_EFFICIENCY: f64 = 0.40;
/// Combustion chamber volume per watt of electrical power, mL/W.
pub const CC_VOLUME_PER_WATT_ML: f64 = 1.4;
/// Adapter, exhaust, ducts and circuit of the prototype, kg.
pub const FIXED_OVERHEAD_MASS: f64 = 0.083;
/// Heat sinks, module, insulation and compression hardware per module, kg.
pub const HARDWARE_MASS_PER_MODULE: f64 = 0.330;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelSpec {
    pub name: String,
    /// Wh/kg
    pub specific_energy: f64,
    /// kg/L
    pub liquid_density: f64,
    /// Tank grams per gram of fuel.
    pub tank_tare_ratio: f64,
}

impl FuelSpec {
    pub fn butane() -> Self {
        Self {
            name: "butane".into(),
            specific_energy: BUTANE_SPECIFIC_ENERGY,
            liquid_density: BUTANE_LIQUID_DENSITY,
            tank_tare_ratio: CANISTER_TARE_RATIO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("fuel specific_energy", self.specific_energy)?;
        positive("fuel liquid_density", self.liquid_density)?;
        non_negative("fuel tank_tare_ratio", self.tank_tare_ratio)?;
        Ok(())
    }

    /// Chemical energy of `mass_kg` of fuel, Wh.
    pub fn chemical_energy(&self, mass_kg: f64) -> f64 {
        mass_kg * self.specific_energy
    }

    pub fn mass_of_volume(&self, volume_l: f64) -> f64 {
        volume_l * self.liquid_density
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chemistry {
    LithiumPolymer,
    LithiumIon,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryRef {
    pub chemistry: Chemistry,
    /// Wh/kg
    pub specific_energy: f64,
    /// W/kg
    pub specific_power: f64,
}

impl BatteryRef {
    pub fn lithium_polymer() -> Self {
        Self {
            chemistry: Chemistry::LithiumPolymer,
            specific_energy: 150.0,
            specific_power: 3500.0,
        }
    }

    pub fn lithium_ion() -> Self {
        Self {
            chemistry: Chemistry::LithiumIon,
            specific_energy: 200.0,
            specific_power: 3500.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("battery specific_energy", self.specific_energy)?;
        non_negative("battery specific_power", self.specific_power)?;
        let expected = match self.chemistry {
            Chemistry::LithiumPolymer => Some(150.0),
            Chemistry::LithiumIon => Some(200.0),
            Chemistry::Custom => None,
        };
        match expected {
            Some(e) if self.specific_energy != e => Err(Error::OutOfRange {
                name: format!("{:?} specific_energy", self.chemistry),
                value: self.specific_energy,
                range: format!("{{{e}}} (use the custom chemistry for other values)"),
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeModuleSpec {
    pub name: String,
    /// W per module at the rated efficiency.
    pub rated_power: f64,
    pub rated_efficiency: Fraction,
    /// °C
    pub max_hot_temp: f64,
    /// cm
    pub side_length: f64,
    /// kg
    pub module_mass: f64,
    pub exhaust_efficiency_default: Fraction,
}

impl TeModuleSpec {
    /// TCS monTEG bismuth telluride module.
    pub fn monteg() -> Self {
        Self {
            name: "monteg".into(),
            rated_power: 20.0,
            rated_efficiency: Fraction::new(0.05).unwrap(),
            max_hot_temp: 340.0,
            side_length: 4.0,
            module_mass: 0.0262,
            exhaust_efficiency_default: Fraction::new(DEFAULT_EXHAUST_EFFICIENCY).unwrap(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("TE rated_power", self.rated_power)?;
        let eta = self.rated_efficiency.get();
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::OutOfRange {
                name: "TE rated_efficiency".into(),
                value: eta,
                range: "(0, 1)".into(),
            });
        }
        finite("TE max_hot_temp", self.max_hot_temp)?;
        positive("TE side_length", self.side_length)?;
        non_negative("TE module_mass", self.module_mass)?;
        Ok(())
    }

    /// cm²
    pub fn area(&self) -> f64 {
        self.side_length * self.side_length
    }
}

/// How the TE array covers a power demand.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArraySizing {
    /// Integer module count, rounded up.
    WholeModules,
    /// TE area (and the hardware that scales with it) tracks demand exactly,
    /// counted in module-area equivalents.
    #[default]
    FractionalArea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDesign {
    pub te_module: TeModuleSpec,
    pub device_efficiency: Fraction,
    pub exhaust_efficiency: Fraction,
    pub fuel: FuelSpec,
    /// kg
    pub fixed_overhead_mass: f64,
    /// kg
    pub hardware_mass_per_module: f64,
    /// mL/W
    pub cc_volume_per_watt: f64,
    #[serde(default)]
    pub array_sizing: ArraySizing,
}

impl GeneratorDesign {
    /// monTEG geometry and prototype mass model on butane at the given
    /// device efficiency.
    pub fn reference(device_efficiency: f64) -> Result<Self> {
        let design = Self {
            te_module: TeModuleSpec::monteg(),
            device_efficiency: Fraction::new(device_efficiency)?,
            exhaust_efficiency: Fraction::new(DEFAULT_EXHAUST_EFFICIENCY)?,
            fuel: FuelSpec::butane(),
            fixed_overhead_mass: FIXED_OVERHEAD_MASS,
            hardware_mass_per_module: HARDWARE_MASS_PER_MODULE,
            cc_volume_per_watt: CC_VOLUME_PER_WATT_ML,
            array_sizing: ArraySizing::FractionalArea,
        };
        design.validate()?;
        Ok(design)
    }

    /// The single-module bench prototype as tested (1.8 % device efficiency).
    pub fn prototype() -> Self {
        Self {
            array_sizing: ArraySizing::WholeModules,
            ..Self::reference(0.018).unwrap()
        }
    }

    pub fn with_device_efficiency(&self, device_efficiency: f64) -> Result<Self> {
        let mut d = self.clone();
        d.device_efficiency = Fraction::new(device_efficiency)?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        self.te_module.validate()?;
        self.fuel.validate()?;
        let eta = self.device_efficiency.get();
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::OutOfRange {
                name: "device_efficiency".into(),
                value: eta,
                range: "(0, 1)".into(),
            });
        }
        positive_fraction("exhaust_efficiency", self.exhaust_efficiency)?;
        non_negative("fixed_overhead_mass", self.fixed_overhead_mass)?;
        non_negative("hardware_mass_per_module", self.hardware_mass_per_module)?;
        positive("cc_volume_per_watt", self.cc_volume_per_watt)?;
        Ok(())
    }

    /// Electrical output of one module at this design's device efficiency,
    /// holding heat flux through the module constant.
    pub fn power_per_module(&self) -> f64 {
        self.te_module.rated_power * self.device_efficiency.get()
            / self.te_module.rated_efficiency.get()
    }

    /// Electrical energy per litre of fuel, Wh/L.
    pub fn electrical_energy_per_liter(&self) -> f64 {
        self.fuel.liquid_density
            * self.fuel.specific_energy
            * self.device_efficiency.get()
            * self.exhaust_efficiency.get()
    }
}

/// Module count or area covering a power demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeArray {
    /// Module-area equivalents; equals `n_modules` under whole-module sizing.
    pub module_equivalents: f64,
    pub n_modules: u32,
    /// cm, side of the square covering the array.
    pub side: f64,
    /// W
    pub max_electrical_power: f64,
}

impl TeArray {
    pub(crate) fn from_equivalents(equivalents: f64, design: &GeneratorDesign) -> Self {
        Self {
            module_equivalents: equivalents,
            n_modules: ceil_count(equivalents).max(1),
            side: design.te_module.side_length * equivalents.sqrt(),
            max_electrical_power: equivalents * design.power_per_module(),
        }
    }
}

/// Ceiling that ignores rounding noise just above an integer.
pub(crate) fn ceil_count(x: f64) -> u32 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u32
    } else {
        x.ceil() as u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBuild {
    pub n_modules: u32,
    pub module_equivalents: f64,
    /// kg
    pub dry_hardware_mass: f64,
    /// kg
    pub fuel_mass: f64,
    /// kg
    pub tank_mass: f64,
    /// L
    pub fuel_volume: f64,
    /// L
    pub cc_volume: f64,
    /// cm
    pub te_array_side: f64,
    /// W
    pub max_electrical_power: f64,
    /// Wh
    pub electrical_energy: f64,
}

impl GeneratorBuild {
    pub(crate) fn assemble(
        design: &GeneratorDesign,
        array: TeArray,
        fuel_volume: f64,
        cc_power: f64,
        cc_volume_per_watt: f64,
    ) -> Self {
        let fuel_mass = design.fuel.mass_of_volume(fuel_volume);
        Self {
            n_modules: array.n_modules,
            module_equivalents: array.module_equivalents,
            dry_hardware_mass: design.fixed_overhead_mass
                + design.hardware_mass_per_module * array.module_equivalents,
            fuel_mass,
            tank_mass: fuel_mass * design.fuel.tank_tare_ratio,
            fuel_volume,
            cc_volume: cc_volume_per_watt * cc_power / ML_PER_L,
            te_array_side: array.side,
            max_electrical_power: array.max_electrical_power,
            electrical_energy: fuel_volume * design.electrical_energy_per_liter(),
        }
    }

    /// Hardware, tank and fuel, kg.
    pub fn total_mass(&self) -> f64 {
        self.dry_hardware_mass + self.tank_mass + self.fuel_mass
    }

    /// Fuel over total generator mass; zero for an empty build.
    pub fn fuel_mass_fraction(&self) -> Fraction {
        fuel_mass_fraction(self.fuel_mass, self.dry_hardware_mass + self.tank_mass)
            .unwrap_or(Fraction::ZERO)
    }

    /// Fuel plus combustion chamber, L.
    pub fn occupied_volume(&self) -> f64 {
        self.fuel_volume + self.cc_volume
    }
}

/// Overall conversion efficiency needed for fuel to match a target specific
/// energy: `e_target / e_fuel`.
///
/// For butane this is 1.10 % against 150 Wh/kg lithium polymer and 1.47 %
/// against 200 Wh/kg lithium ion; the commonly quoted "1.5 %" is the latter.
pub fn parity_specific_efficiency(e_target: f64, e_fuel: f64) -> Result<Fraction> {
    positive("target specific energy", e_target)?;
    positive("fuel specific energy", e_fuel)?;
    if e_target > e_fuel {
        return Err(Error::ParityImpossible {
            target: e_target,
            fuel: e_fuel,
        });
    }
    Fraction::new(e_target / e_fuel)
}

/// Generator system specific energy, Wh/kg.
pub fn system_specific_energy(
    fuel: &FuelSpec,
    fuel_mass_fraction: Fraction,
    device_efficiency: Fraction,
    exhaust_efficiency: Fraction,
) -> Result<f64> {
    fuel.validate()?;
    positive_fraction("fuel_mass_fraction", fuel_mass_fraction)?;
    positive_fraction("device_efficiency", device_efficiency)?;
    positive_fraction("exhaust_efficiency", exhaust_efficiency)?;
    Ok(fuel.specific_energy
        * fuel_mass_fraction.get()
        * device_efficiency.get()
        * exhaust_efficiency.get())
}

/// Smallest fuel mass fraction reaching `e_target` Wh/kg.
pub fn min_fuel_mass_fraction(
    e_target: f64,
    fuel: &FuelSpec,
    device_efficiency: Fraction,
    exhaust_efficiency: Fraction,
) -> Result<Fraction> {
    positive("target specific energy", e_target)?;
    fuel.validate()?;
    positive_fraction("device_efficiency", device_efficiency)?;
    positive_fraction("exhaust_efficiency", exhaust_efficiency)?;
    let max_achievable = fuel.specific_energy * device_efficiency.get() * exhaust_efficiency.get();
    if e_target > max_achievable {
        return Err(Error::InfeasibleSpecificEnergy {
            target: e_target,
            max_achievable,
        });
    }
    Fraction::new(e_target / max_achievable)
}

/// `m_fuel / (m_dry + m_fuel)` where `dry_mass` covers hardware and tank.
pub fn fuel_mass_fraction(fuel_mass: f64, dry_mass: f64) -> Result<Fraction> {
    non_negative("fuel mass", fuel_mass)?;
    non_negative("dry mass", dry_mass)?;
    let total = fuel_mass + dry_mass;
    if total <= 0.0 {
        return Err(Error::NotPositive {
            name: "total generator mass".into(),
            value: total,
        });
    }
    Fraction::new(fuel_mass / total)
}

/// Electrical energy from a volume of fuel with explicit efficiencies, Wh.
pub fn fuel_energy(
    fuel_volume: f64,
    fuel: &FuelSpec,
    device_efficiency: Fraction,
    exhaust_efficiency: Fraction,
) -> Result<f64> {
    non_negative("fuel volume", fuel_volume)?;
    Ok(fuel.chemical_energy(fuel.mass_of_volume(fuel_volume))
        * device_efficiency.get()
        * exhaust_efficiency.get())
}

/// Electrical energy a design extracts from `fuel_volume` litres, Wh.
pub fn electrical_energy_from_fuel(fuel_volume: f64, design: &GeneratorDesign) -> Result<f64> {
    fuel_energy(
        fuel_volume,
        &design.fuel,
        design.device_efficiency,
        design.exhaust_efficiency,
    )
}

/// Burner thermal power for a fuel burn rate in kg/h, W.
pub fn burner_thermal_power(burn_rate: f64, fuel: &FuelSpec) -> Result<f64> {
    non_negative("burn rate", burn_rate)?;
    Ok(burn_rate * fuel.specific_energy)
}

/// Burn rate (kg/h) that produces `thermal_power` watts.
pub fn burn_rate_for_thermal_power(thermal_power: f64, fuel: &FuelSpec) -> Result<f64> {
    non_negative("thermal power", thermal_power)?;
    fuel.validate()?;
    Ok(thermal_power / fuel.specific_energy)
}

/// Hours a fuel load lasts at a burn rate.
pub fn canister_duration(fuel_mass: f64, burn_rate: f64) -> Result<f64> {
    non_negative("fuel mass", fuel_mass)?;
    positive("burn rate", burn_rate)?;
    Ok(fuel_mass / burn_rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExhaustSplit {
    /// W reaching the TE module
    pub delivered: f64,
    /// W leaving with exhaust gas
    pub lost: f64,
}

pub fn exhaust_split(thermal_power: f64, exhaust_efficiency: Fraction) -> Result<ExhaustSplit> {
    non_negative("thermal power", thermal_power)?;
    let lost = thermal_power - thermal_power * exhaust_efficiency.get();
    // recomputing from `lost` makes delivered + lost round back to the total
    Ok(ExhaustSplit {
        delivered: thermal_power - lost,
        lost,
    })
}

/// Whole-module array covering `required_power`.
pub fn size_te_array(required_power: f64, design: &GeneratorDesign) -> Result<TeArray> {
    positive("required power", required_power)?;
    design.validate()?;
    let n = ceil_count(required_power / design.power_per_module()).max(1);
    Ok(TeArray::from_equivalents(n as f64, design))
}

/// Array for `required_power` under the design's sizing rule.
pub fn size_array(required_power: f64, design: &GeneratorDesign) -> Result<TeArray> {
    match design.array_sizing {
        ArraySizing::WholeModules => size_te_array(required_power, design),
        ArraySizing::FractionalArea => {
            positive("required power", required_power)?;
            design.validate()?;
            Ok(TeArray::from_equivalents(
                required_power / design.power_per_module(),
                design,
            ))
        }
    }
}

/// Generator sized for `required_power` carrying `fuel_volume` litres.
///
/// Combustion chamber volume is charged against the electrical power.
pub fn build_generator(
    required_power: f64,
    fuel_volume: f64,
    design: &GeneratorDesign,
) -> Result<GeneratorBuild> {
    non_negative("fuel volume", fuel_volume)?;
    let array = size_array(required_power, design)?;
    Ok(GeneratorBuild::assemble(
        design,
        array,
        fuel_volume,
        required_power,
        design.cc_volume_per_watt,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    /// W
    pub power: f64,
    pub efficiency: Fraction,
}

/// Rescales TE power (∝ ΔT²) and efficiency (∝ ΔT) to a new temperature
/// difference.
pub fn scale_with_delta_t(
    power: f64,
    efficiency: Fraction,
    delta_t_ref: f64,
    delta_t_new: f64,
) -> Result<ScaledPoint> {
    non_negative("power", power)?;
    positive("reference ΔT", delta_t_ref)?;
    non_negative("new ΔT", delta_t_new)?;
    let ratio = delta_t_new / delta_t_ref;
    let eta = efficiency.get() * ratio;
    if eta > 1.0 {
        return Err(Error::EfficiencyAboveOne { efficiency: eta });
    }
    Ok(ScaledPoint {
        power: power * ratio * ratio,
        efficiency: Fraction::new(eta)?,
    })
}

/// Volumetric flow through a rectangular duct, m³/min.
pub fn heat_sink_flow(duct_width: f64, duct_height: f64, air_velocity: f64) -> Result<f64> {
    positive("duct width", duct_width)?;
    positive("duct height", duct_height)?;
    positive("air velocity", air_velocity)?;
    Ok(duct_width * duct_height * air_velocity * 60.0)
}

/// Cold-side thermal resistance from a steady temperature rise over ambient,
/// °C/W.
pub fn cold_side_resistance(t_cold: f64, t_ambient: f64, heat_rejected: f64) -> Result<f64> {
    finite("cold side temperature", t_cold)?;
    finite("ambient temperature", t_ambient)?;
    positive("heat rejected", heat_rejected)?;
    positive("cold side temperature rise", t_cold - t_ambient)?;
    Ok((t_cold - t_ambient) / heat_rejected)
}
