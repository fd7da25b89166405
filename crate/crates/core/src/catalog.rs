//! Bundled component data: fuels, battery chemistries and TE modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::powerplant::{BatteryRef, FuelSpec, TeModuleSpec};

const BUNDLED_COMPONENTS: &str = include_str!("../data/components.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub fuels: Vec<FuelSpec>,
    pub batteries: Vec<BatteryRef>,
    pub te_modules: Vec<TeModuleSpec>,
}

impl Catalog {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_COMPONENTS).expect("bundled components.json is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let catalog: Self = serde_json::from_str(text)?;
        catalog.fuels.iter().try_for_each(FuelSpec::validate)?;
        catalog
            .batteries
            .iter()
            .try_for_each(BatteryRef::validate)?;
        catalog
            .te_modules
            .iter()
            .try_for_each(TeModuleSpec::validate)?;
        Ok(catalog)
    }

    pub fn fuel(&self, name: &str) -> Result<&FuelSpec> {
        self.fuels
            .iter()
            .find(|f| f.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownComponent {
                kind: "fuel",
                name: name.to_owned(),
            })
    }

    pub fn te_module(&self, name: &str) -> Result<&TeModuleSpec> {
        self.te_modules
            .iter()
            .find(|m| m.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownComponent {
                kind: "TE module",
                name: name.to_owned(),
            })
    }
}
