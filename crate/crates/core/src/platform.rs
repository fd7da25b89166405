//! Sample unmanned platforms and mass closure from stated endurance.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::positive;

/// Environment variable naming a platform registry that replaces the bundled one.
pub const PLATFORMS_ENV: &str = "ENDURE_PLATFORMS";

const BUNDLED_PLATFORMS: &str = include_str!("../data/platforms.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlatformClass {
    Ground,
    Multicopter,
    FixedWing,
    FixedWingVtol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformSpec {
    pub name: String,
    pub class: PlatformClass,
    /// W/kg of total vehicle mass
    pub specific_power_req: f64,
    /// Wh
    pub battery_energy: f64,
    /// kg
    pub battery_mass: f64,
    /// L
    pub battery_volume: f64,
    /// h
    pub stated_endurance: f64,
    /// kg; derived by mass closure when absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empty_mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassClosure {
    /// kg, airframe without battery
    pub empty_mass: f64,
    /// kg, `battery_energy / (stated_endurance * specific_power_req)`
    pub closure_total_mass: f64,
    /// Provided minus derived empty mass, when the platform carries one.
    pub residual: Option<f64>,
}

impl PlatformSpec {
    pub fn validate(&self) -> Result<()> {
        positive("specific_power_req", self.specific_power_req)?;
        positive("battery_energy", self.battery_energy)?;
        positive("battery_mass", self.battery_mass)?;
        positive("battery_volume", self.battery_volume)?;
        positive("stated_endurance", self.stated_endurance)?;
        if let Some(m) = self.empty_mass {
            positive("empty_mass", m)?;
        }
        Ok(())
    }

    /// Pack specific energy of the stock battery, Wh/kg.
    pub fn battery_specific_energy(&self) -> f64 {
        self.battery_energy / self.battery_mass
    }

    /// Battery mass for an off-stock energy at the stock pack's Wh/kg.
    pub fn battery_mass_for(&self, energy: f64) -> f64 {
        self.battery_mass * (energy / self.battery_energy)
    }
}

pub fn mass_closure(spec: &PlatformSpec) -> Result<MassClosure> {
    spec.validate()?;
    let total = spec.battery_energy / (spec.stated_endurance * spec.specific_power_req);
    let derived = total - spec.battery_mass;
    if derived <= 0.0 && spec.empty_mass.is_none() {
        return Err(Error::InconsistentPlatform {
            platform: spec.name.clone(),
            battery_energy: spec.battery_energy,
            stated_endurance: spec.stated_endurance,
            specific_power: spec.specific_power_req,
            battery_mass: spec.battery_mass,
        });
    }
    Ok(match spec.empty_mass {
        Some(given) => MassClosure {
            empty_mass: given,
            closure_total_mass: total,
            residual: Some(given - derived),
        },
        None => MassClosure {
            empty_mass: derived,
            closure_total_mass: total,
            residual: None,
        },
    })
}

/// Average power in the stock configuration, W.
pub fn stock_power(spec: &PlatformSpec) -> Result<f64> {
    let closure = mass_closure(spec)?;
    Ok(spec.specific_power_req * (closure.empty_mass + spec.battery_mass))
}

/// Named collection of platforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlatformRegistry {
    pub platforms: Vec<PlatformSpec>,
}

impl PlatformRegistry {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_PLATFORMS).expect("bundled platforms.json is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let registry: Self = serde_json::from_str(text)?;
        for p in &registry.platforms {
            p.validate()?;
        }
        Ok(registry)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    /// `path` if given, else `$ENDURE_PLATFORMS`, else the bundled file.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            return Self::load(p);
        }
        match std::env::var_os(PLATFORMS_ENV) {
            Some(p) if !p.is_empty() => Self::load(p),
            _ => Ok(Self::bundled()),
        }
    }

    /// Case-insensitive lookup; spaces, dashes and underscores are ignored.
    pub fn find(&self, name: &str) -> Result<&PlatformSpec> {
        let key = normalize(name);
        self.platforms
            .iter()
            .find(|p| normalize(&p.name) == key)
            .ok_or_else(|| Error::UnknownPlatform(name.to_owned()))
    }
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| !matches!(c, ' ' | '-' | '_'))
        .flat_map(char::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn puma() -> PlatformSpec {
        PlatformRegistry::bundled().find("puma").unwrap().clone()
    }

    #[test]
    fn puma_closure() {
        // 297 / (2.0 × 21)
        let c = mass_closure(&puma()).unwrap();
        assert!((c.closure_total_mass - 7.0714).abs() < 1e-4);
        assert!((c.empty_mass - 4.9714).abs() < 1e-4);
        assert_eq!(c.residual, None);
    }

    #[test]
    fn negative_airframe_rejected() {
        let spec = PlatformSpec {
            battery_mass: 8.0,
            ..puma()
        };
        assert!(matches!(
            mass_closure(&spec),
            Err(Error::InconsistentPlatform { .. })
        ));
    }

    #[test]
    fn provided_empty_mass_reports_residual() {
        let derived = mass_closure(&puma()).unwrap().empty_mass;
        let spec = PlatformSpec {
            empty_mass: Some(derived),
            ..puma()
        };
        assert_eq!(mass_closure(&spec).unwrap().residual, Some(0.0));
    }

    #[test]
    fn puma_stock_power() {
        let p = stock_power(&puma()).unwrap();
        assert_relative_eq!(p, 148.5, max_relative = 1e-12);
        assert_relative_eq!(p * 2.0, 297.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_specific_power_rejected() {
        let spec = PlatformSpec {
            specific_power_req: 0.0,
            ..puma()
        };
        assert!(spec.validate().is_err());
        assert!(stock_power(&spec).is_err());
    }

    #[test]
    fn power_linear_in_empty_mass() {
        let base = PlatformSpec {
            empty_mass: Some(3.0),
            ..puma()
        };
        let double = PlatformSpec {
            empty_mass: Some(6.0),
            ..puma()
        };
        let p1 = stock_power(&base).unwrap();
        let p2 = stock_power(&double).unwrap();
        assert_relative_eq!(p2 - p1, 21.0 * 3.0, max_relative = 1e-12);
        assert_eq!(base.battery_energy, double.battery_energy);
    }

    #[test]
    fn bundled_registry_has_the_five_samples() {
        let reg = PlatformRegistry::bundled();
        let names: Vec<_> = reg.platforms.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["Talon", "Aurelia X6", "Raven", "Puma", "Trinity"]);
        assert!(reg.find("aurelia-x6").is_ok());
        assert!(reg.find("nosuch").is_err());
        for p in &reg.platforms {
            mass_closure(p).unwrap();
        }
    }
}
