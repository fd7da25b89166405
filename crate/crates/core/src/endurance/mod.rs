//! Endurance of battery, fuel and hybrid configurations.
//!
//! A configuration is a (battery energy, fuel volume) pair on a fixed
//! airframe. Average power is the platform's specific power requirement times
//! total mass, and the generator's TE array is sized to that power, which in
//! turn depends on the array's own mass. Fuel burn-off is ignored: endurance
//! is usable energy over average power for the configuration as loaded.

mod sweep;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::platform::{mass_closure, PlatformSpec};
use crate::powerplant::CC_VOLUME_PER_WATT_ML;
use crate::powerplant::{ceil_count, ArraySizing, GeneratorBuild, GeneratorDesign, TeArray};
use crate::quantities::{non_negative, positive};

pub use sweep::{sweep, SweepCell, SweepGrid, SweepMeta, SWEEP_COLUMNS};

/// Iteration cap for whole-module sizing.
pub const MAX_SIZING_ITERATIONS: usize = 32;
/// Default allowance over the stock battery volume.
pub const DEFAULT_VOLUME_SLACK: f64 = 1.05;
/// Default max-fuel bisection resolution, L (1 mL).
pub const DEFAULT_VOLUME_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    /// Wh
    pub battery_energy: f64,
    /// L
    pub fuel_volume: f64,
}

impl HybridConfig {
    pub fn new(battery_energy: f64, fuel_volume: f64) -> Result<Self> {
        non_negative("battery energy", battery_energy)?;
        non_negative("fuel volume", fuel_volume)?;
        if battery_energy == 0.0 && fuel_volume == 0.0 {
            return Err(Error::EmptyConfiguration);
        }
        Ok(Self {
            battery_energy,
            fuel_volume,
        })
    }

    pub fn battery_only(battery_energy: f64) -> Result<Self> {
        Self::new(battery_energy, 0.0)
    }

    pub fn fuel_only(fuel_volume: f64) -> Result<Self> {
        Self::new(0.0, fuel_volume)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    /// kg, generator mass including fuel and tank may not exceed this
    pub mass_cap: f64,
    /// L, fuel plus combustion chamber
    pub volume_cap: f64,
    pub volume_slack: f64,
    /// mL/W
    pub cc_volume_per_watt: f64,
    /// L, max-fuel bisection stops at this bracket width
    pub volume_resolution: f64,
}

impl ConstraintSet {
    /// Stock battery mass and volume as caps, default slack and chamber coefficient.
    pub fn for_platform(platform: &PlatformSpec) -> Self {
        ConstraintSettings::default().apply(platform)
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass_cap", self.mass_cap)?;
        positive("volume_cap", self.volume_cap)?;
        positive("cc_volume_per_watt", self.cc_volume_per_watt)?;
        positive("volume_resolution", self.volume_resolution)?;
        if !(1.0..=1.25).contains(&self.volume_slack) {
            return Err(Error::OutOfRange {
                name: "volume_slack".into(),
                value: self.volume_slack,
                range: "[1, 1.25]".into(),
            });
        }
        Ok(())
    }

    /// L
    pub fn volume_limit(&self) -> f64 {
        self.volume_cap * self.volume_slack
    }
}

/// Platform-independent part of a [`ConstraintSet`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSettings {
    pub volume_slack: f64,
    pub cc_volume_per_watt: f64,
    pub volume_resolution: f64,
}

impl Default for ConstraintSettings {
    fn default() -> Self {
        Self {
            volume_slack: DEFAULT_VOLUME_SLACK,
            cc_volume_per_watt: CC_VOLUME_PER_WATT_ML,
            volume_resolution: DEFAULT_VOLUME_RESOLUTION,
        }
    }
}

impl ConstraintSettings {
    pub fn apply(&self, platform: &PlatformSpec) -> ConstraintSet {
        ConstraintSet {
            mass_cap: platform.battery_mass,
            volume_cap: platform.battery_volume,
            volume_slack: self.volume_slack,
            cc_volume_per_watt: self.cc_volume_per_watt,
            volume_resolution: self.volume_resolution,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassBreakdown {
    pub airframe: f64,
    pub battery: f64,
    pub generator_hardware: f64,
    pub tank: f64,
    pub fuel: f64,
    pub total: f64,
}

impl MassBreakdown {
    pub fn new(airframe: f64, battery: f64, generator_hardware: f64, tank: f64, fuel: f64) -> Self {
        Self {
            airframe,
            battery,
            generator_hardware,
            tank,
            fuel,
            total: airframe + battery + generator_hardware + tank + fuel,
        }
    }

    pub fn generator(&self) -> f64 {
        self.generator_hardware + self.tank + self.fuel
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingConstraint {
    #[default]
    None,
    MassCap,
    VolumeCap,
    TePower,
}

impl BindingConstraint {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::MassCap => "mass_cap",
            Self::VolumeCap => "volume_cap",
            Self::TePower => "te_power",
        }
    }
}

impl fmt::Display for BindingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnduranceResult {
    pub config: HybridConfig,
    /// h
    pub endurance: f64,
    /// W
    pub avg_power: f64,
    /// Wh counted toward endurance: battery plus fuel when usable.
    pub total_energy: f64,
    /// Wh the fuel would yield through the generator, usable or not.
    pub fuel_energy: f64,
    pub breakdown: MassBreakdown,
    pub feasible: bool,
    pub binding_constraint: BindingConstraint,
    pub fuel_usable: bool,
    /// L, fuel plus combustion chamber
    pub occupied_volume: f64,
    pub generator: Option<GeneratorBuild>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxFuel {
    /// L
    pub volume: f64,
    /// Constraint violated just above `volume`.
    pub binding: BindingConstraint,
    /// The pure-fuel configuration at `volume`.
    pub result: EnduranceResult,
}

/// A platform, generator design and constraint set ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EnduranceModel {
    platform: PlatformSpec,
    design: GeneratorDesign,
    constraints: ConstraintSet,
    airframe_mass: f64,
}

struct Sizing {
    array: TeArray,
    usable: bool,
}

impl EnduranceModel {
    pub fn new(
        platform: &PlatformSpec,
        design: &GeneratorDesign,
        constraints: &ConstraintSet,
    ) -> Result<Self> {
        design.validate()?;
        constraints.validate()?;
        let closure = mass_closure(platform)?;
        Ok(Self {
            platform: platform.clone(),
            design: design.clone(),
            constraints: *constraints,
            airframe_mass: closure.empty_mass,
        })
    }

    /// Model with the platform's default constraint set.
    pub fn with_defaults(platform: &PlatformSpec, design: &GeneratorDesign) -> Result<Self> {
        Self::new(platform, design, &ConstraintSet::for_platform(platform))
    }

    pub fn platform(&self) -> &PlatformSpec {
        &self.platform
    }

    pub fn design(&self) -> &GeneratorDesign {
        &self.design
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn airframe_mass(&self) -> f64 {
        self.airframe_mass
    }

    /// Largest array the generator mass allowance can hold, in module
    /// equivalents (whole modules when sizing by module).
    fn array_limit(&self) -> f64 {
        let m = self.design.hardware_mass_per_module;
        if m == 0.0 {
            return f64::INFINITY;
        }
        let limit = ((self.constraints.mass_cap - self.design.fixed_overhead_mass) / m).max(0.0);
        match self.design.array_sizing {
            ArraySizing::FractionalArea => limit,
            ArraySizing::WholeModules => (limit * (1.0 + 1e-12)).floor().max(1.0),
        }
    }

    /// Least array that carries the load it adds to, or `None` when each
    /// module weighs more than it can power.
    fn least_fixed_point(&self, other_mass: f64) -> Result<Option<f64>> {
        let p = self.platform.specific_power_req;
        let w = self.design.power_per_module();
        let m = self.design.hardware_mass_per_module;
        if w <= p * m {
            return Ok(None);
        }
        // n * w = p * (other_mass + m * n)
        let exact = p * other_mass / (w - p * m);
        match self.design.array_sizing {
            ArraySizing::FractionalArea => Ok(Some(exact)),
            ArraySizing::WholeModules => {
                let modules_for = |n: u32| ceil_count(p * (other_mass + m * n as f64) / w).max(1);
                let mut n = (exact.floor() as u32).max(1);
                for _ in 0..MAX_SIZING_ITERATIONS {
                    let next = modules_for(n);
                    if next == n {
                        return Ok(Some(n as f64));
                    }
                    n = next;
                }
                Err(Error::SizingDiverged {
                    iterations: MAX_SIZING_ITERATIONS,
                })
            }
        }
    }

    fn size(&self, other_mass: f64) -> Result<Sizing> {
        let limit = self.array_limit();
        Ok(match self.least_fixed_point(other_mass)? {
            Some(n) if n <= limit * (1.0 + 1e-12) => Sizing {
                array: TeArray::from_equivalents(n, &self.design),
                usable: true,
            },
            _ => Sizing {
                array: TeArray::from_equivalents(limit, &self.design),
                usable: false,
            },
        })
    }

    pub fn evaluate(&self, config: &HybridConfig) -> Result<EnduranceResult> {
        let HybridConfig {
            battery_energy,
            fuel_volume,
        } = HybridConfig::new(config.battery_energy, config.fuel_volume)?;
        let p = self.platform.specific_power_req;
        let battery_mass = self.platform.battery_mass_for(battery_energy);

        if fuel_volume == 0.0 {
            let breakdown = MassBreakdown::new(self.airframe_mass, battery_mass, 0.0, 0.0, 0.0);
            let avg_power = p * breakdown.total;
            return Ok(EnduranceResult {
                config: *config,
                endurance: battery_energy / avg_power,
                avg_power,
                total_energy: battery_energy,
                fuel_energy: 0.0,
                breakdown,
                feasible: true,
                binding_constraint: BindingConstraint::None,
                fuel_usable: false,
                occupied_volume: 0.0,
                generator: None,
            });
        }

        let fuel = &self.design.fuel;
        let fuel_mass = fuel.mass_of_volume(fuel_volume);
        let tank_mass = fuel_mass * fuel.tank_tare_ratio;
        let other_mass = self.airframe_mass
            + battery_mass
            + self.design.fixed_overhead_mass
            + fuel_mass
            + tank_mass;
        let Sizing { array, usable } = self.size(other_mass)?;
        let hardware = self.design.fixed_overhead_mass
            + self.design.hardware_mass_per_module * array.module_equivalents;
        let breakdown = MassBreakdown::new(
            self.airframe_mass,
            battery_mass,
            hardware,
            tank_mass,
            fuel_mass,
        );
        let avg_power = p * breakdown.total;
        let build = GeneratorBuild::assemble(
            &self.design,
            array,
            fuel_volume,
            avg_power,
            self.constraints.cc_volume_per_watt,
        );

        let cap = self.constraints.mass_cap;
        let binding = if hardware > cap * (1.0 + 1e-9) {
            BindingConstraint::MassCap
        } else if !usable {
            BindingConstraint::TePower
        } else if breakdown.generator() > cap {
            BindingConstraint::MassCap
        } else if build.occupied_volume() > self.constraints.volume_limit() {
            BindingConstraint::VolumeCap
        } else {
            BindingConstraint::None
        };

        let total_energy = if usable {
            battery_energy + build.electrical_energy
        } else {
            battery_energy
        };
        Ok(EnduranceResult {
            config: *config,
            endurance: total_energy / avg_power,
            avg_power,
            total_energy,
            fuel_energy: build.electrical_energy,
            breakdown,
            feasible: binding == BindingConstraint::None,
            binding_constraint: binding,
            fuel_usable: usable,
            occupied_volume: build.occupied_volume(),
            generator: Some(build),
        })
    }

    pub fn mass_breakdown(&self, config: &HybridConfig) -> Result<MassBreakdown> {
        Ok(self.evaluate(config)?.breakdown)
    }

    /// Largest pure-fuel load meeting every constraint, resolved to the
    /// constraint set's volume resolution.
    pub fn max_fuel_volume(&self) -> Result<MaxFuel> {
        self.max_fuel_volume_at(self.constraints.volume_resolution)
    }

    pub fn max_fuel_volume_at(&self, resolution: f64) -> Result<MaxFuel> {
        positive("volume resolution", resolution)?;
        let probe = |v: f64| self.evaluate(&HybridConfig::fuel_only(v)?);
        let fuel = &self.design.fuel;
        let mass_limited =
            self.constraints.mass_cap / (fuel.liquid_density * (1.0 + fuel.tank_tare_ratio));
        let hi_start = mass_limited.min(self.constraints.volume_limit());

        let at_top = probe(hi_start)?;
        if at_top.feasible {
            let binding = if mass_limited <= self.constraints.volume_limit() {
                BindingConstraint::MassCap
            } else {
                BindingConstraint::VolumeCap
            };
            return Ok(MaxFuel {
                volume: hi_start,
                binding,
                result: at_top,
            });
        }

        let first = probe(resolution.min(hi_start))?;
        if !first.feasible {
            return Err(Error::NoFeasibleFuel {
                binding: first.binding_constraint,
            });
        }

        let (mut lo, mut hi) = (resolution.min(hi_start), hi_start);
        let (mut lo_result, mut hi_result) = (first, at_top);
        while hi - lo > resolution {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let r = probe(mid)?;
            if r.feasible {
                lo = mid;
                lo_result = r;
            } else {
                hi = mid;
                hi_result = r;
            }
        }
        Ok(MaxFuel {
            volume: lo,
            binding: hi_result.binding_constraint,
            result: lo_result,
        })
    }
}

/// Evaluates one configuration under the platform's default constraints.
pub fn evaluate(
    platform: &PlatformSpec,
    design: &GeneratorDesign,
    config: &HybridConfig,
) -> Result<EnduranceResult> {
    EnduranceModel::with_defaults(platform, design)?.evaluate(config)
}

pub fn max_fuel_volume(
    platform: &PlatformSpec,
    design: &GeneratorDesign,
    constraints: &ConstraintSet,
) -> Result<MaxFuel> {
    EnduranceModel::new(platform, design, constraints)?.max_fuel_volume()
}

pub fn mass_breakdown(
    platform: &PlatformSpec,
    design: &GeneratorDesign,
    config: &HybridConfig,
) -> Result<MassBreakdown> {
    EnduranceModel::with_defaults(platform, design)?.mass_breakdown(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::platform::PlatformRegistry;
    use approx::assert_relative_eq;

    fn platform(name: &str) -> PlatformSpec {
        PlatformRegistry::bundled().find(name).unwrap().clone()
    }

    fn puma_model(eta: f64) -> EnduranceModel {
        EnduranceModel::with_defaults(&platform("puma"), &GeneratorDesign::reference(eta).unwrap())
            .unwrap()
    }

    #[test]
    fn empty_configuration_rejected() {
        assert_eq!(HybridConfig::new(0.0, 0.0), Err(Error::EmptyConfiguration));
        assert!(HybridConfig::new(-1.0, 0.2).is_err());
    }

    #[test]
    fn constraint_set_validation() {
        let mut c = ConstraintSet::for_platform(&platform("puma"));
        c.validate().unwrap();
        c.volume_slack = 1.3;
        assert!(c.validate().is_err());
        c.volume_slack = 0.99;
        assert!(c.validate().is_err());
    }

    #[test]
    fn stock_battery_reproduces_stated_endurance() {
        let r = puma_model(0.105)
            .evaluate(&HybridConfig::battery_only(297.0).unwrap())
            .unwrap();
        assert_relative_eq!(r.endurance, 2.0, max_relative = 1e-12);
        assert!(r.feasible);
    }

    #[test]
    fn pure_fuel_at_max_is_near_two_hours() {
        let model = puma_model(0.105);
        let max = model.max_fuel_volume().unwrap();
        let r = model
            .evaluate(&HybridConfig::fuel_only(max.volume).unwrap())
            .unwrap();
        assert!(r.fuel_usable && r.feasible);
        assert!((r.endurance - 2.0).abs() <= 0.15 * 2.0, "{}", r.endurance);
    }

    #[test]
    fn small_fuel_load_is_dead_weight() {
        let r = puma_model(0.105)
            .evaluate(&HybridConfig::new(297.0, 0.010).unwrap())
            .unwrap();
        assert!(r.endurance < 2.0, "{}", r.endurance);
    }

    #[test]
    fn puma_max_fuel_is_mass_bound() {
        let max = puma_model(0.105).max_fuel_volume().unwrap();
        assert!((0.75..=1.1).contains(&max.volume), "{}", max.volume);
        assert_eq!(max.binding, BindingConstraint::MassCap);
        assert!(max.result.occupied_volume < 1.5);
    }

    #[test]
    fn absurd_module_mass_leaves_no_fuel() {
        let heavy = GeneratorDesign {
            hardware_mass_per_module: 10.0,
            array_sizing: ArraySizing::WholeModules,
            ..GeneratorDesign::reference(0.105).unwrap()
        };
        let model = EnduranceModel::with_defaults(&platform("puma"), &heavy).unwrap();
        assert_eq!(
            model.max_fuel_volume().unwrap_err(),
            Error::NoFeasibleFuel {
                binding: BindingConstraint::MassCap
            }
        );

        // fractional sizing shrinks the array to fit instead, which then
        // cannot carry the load
        let heavy = GeneratorDesign {
            array_sizing: ArraySizing::FractionalArea,
            ..heavy
        };
        let model = EnduranceModel::with_defaults(&platform("puma"), &heavy).unwrap();
        assert_eq!(
            model.max_fuel_volume().unwrap_err(),
            Error::NoFeasibleFuel {
                binding: BindingConstraint::TePower
            }
        );
    }

    #[test]
    fn breakdown_cases() {
        let model = puma_model(0.105);
        let b = model
            .mass_breakdown(&HybridConfig::battery_only(297.0).unwrap())
            .unwrap();
        assert!((b.airframe - 4.9714).abs() < 1e-4);
        assert_eq!(
            (b.battery, b.generator_hardware, b.tank, b.fuel),
            (2.1, 0.0, 0.0, 0.0)
        );

        let b = model
            .mass_breakdown(&HybridConfig::fuel_only(0.3).unwrap())
            .unwrap();
        assert_eq!(b.battery, 0.0);
        assert_eq!(
            b.total,
            b.airframe + b.battery + b.generator_hardware + b.tank + b.fuel
        );

        // bench prototype: 413 g hardware, 106.4 g canister tare, 227 g fuel
        let proto = MassBreakdown::new(0.0, 0.0, 0.413, 0.1064, 0.227);
        assert!((proto.total - 0.746).abs() < 1e-3);
    }

    #[test]
    fn whole_module_sizing_converges_from_closed_form() {
        let d = GeneratorDesign {
            array_sizing: ArraySizing::WholeModules,
            ..GeneratorDesign::reference(0.105).unwrap()
        };
        let model = EnduranceModel::with_defaults(&platform("puma"), &d).unwrap();
        let r = model
            .evaluate(&HybridConfig::fuel_only(0.5).unwrap())
            .unwrap();
        let g = r.generator.unwrap();
        assert!(g.max_electrical_power >= r.avg_power);
        let one_fewer = (g.n_modules - 1) as f64 * d.power_per_module();
        assert!(one_fewer < r.avg_power);
    }

    #[test]
    fn overloaded_array_makes_fuel_dead_weight() {
        // at 3 % a module barely lifts its own mass on a 90 W/kg multicopter
        let model = EnduranceModel::with_defaults(
            &platform("aurelia x6"),
            &GeneratorDesign::reference(0.03).unwrap(),
        )
        .unwrap();
        let r = model
            .evaluate(&HybridConfig::new(300.0, 0.5).unwrap())
            .unwrap();
        assert!(!r.fuel_usable);
        assert_eq!(r.binding_constraint, BindingConstraint::TePower);
        assert_relative_eq!(r.endurance, 300.0 / r.avg_power);
    }
}
