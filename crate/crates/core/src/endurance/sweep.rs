use serde::{Deserialize, Serialize};

use super::{
    BindingConstraint, ConstraintSet, EnduranceModel, EnduranceResult, HybridConfig, MaxFuel,
};
use crate::error::{Error, Result};
use crate::output::{format_sig, SCHEMA_VERSION};
use crate::platform::PlatformSpec;
use crate::powerplant::GeneratorDesign;
use crate::quantities::ML_PER_L;

pub const SWEEP_COLUMNS: [&str; 13] = [
    "battery_Wh",
    "fuel_mL",
    "endurance_h",
    "avg_power_W",
    "total_mass_kg",
    "m_airframe_kg",
    "m_battery_kg",
    "m_hardware_kg",
    "m_tank_kg",
    "m_fuel_kg",
    "feasible",
    "binding_constraint",
    "fuel_usable",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub battery_index: usize,
    pub fuel_index: usize,
    /// Wh
    pub battery_energy: f64,
    /// L
    pub fuel_volume: f64,
    /// `None` only at the empty origin.
    pub result: Option<EnduranceResult>,
}

impl SweepCell {
    pub fn endurance(&self) -> f64 {
        self.result.as_ref().map_or(0.0, |r| r.endurance)
    }

    pub fn feasible(&self) -> bool {
        self.result.as_ref().is_some_and(|r| r.feasible)
    }
}

/// Input echo written next to the CSV for plotting tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub schema_version: u32,
    pub platform: PlatformSpec,
    pub design: GeneratorDesign,
    pub constraints: ConstraintSet,
    pub airframe_mass_kg: f64,
    pub battery_steps: usize,
    pub fuel_steps: usize,
    pub battery_range_wh: [f64; 2],
    pub fuel_range_ml: [f64; 2],
    pub max_fuel_binding: BindingConstraint,
    pub columns: Vec<String>,
    pub row_order: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub battery_axis: Vec<f64>,
    pub fuel_axis: Vec<f64>,
    pub max_fuel: MaxFuel,
    /// Row-major, battery outer.
    pub cells: Vec<SweepCell>,
    pub meta: SweepMeta,
}

fn linspace(top: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                top
            } else {
                top * i as f64 / last
            }
        })
        .collect()
}

impl EnduranceModel {
    pub fn evaluate_cell(
        &self,
        battery_energy: f64,
        fuel_volume: f64,
    ) -> Result<Option<EnduranceResult>> {
        if battery_energy == 0.0 && fuel_volume == 0.0 {
            return Ok(None);
        }
        self.evaluate(&HybridConfig::new(battery_energy, fuel_volume)?)
            .map(Some)
    }

    /// Grid over `[0, stock battery] x [0, max fuel]`. Cells are independent;
    /// `jobs` bounds the worker threads (`None` uses the global pool) and
    /// never changes the output.
    pub fn sweep(
        &self,
        battery_steps: usize,
        fuel_steps: usize,
        jobs: Option<usize>,
    ) -> Result<SweepGrid> {
        for steps in [battery_steps, fuel_steps] {
            if steps < 2 {
                return Err(Error::GridTooSmall(steps));
            }
        }
        let max_fuel = self.max_fuel_volume()?;
        let battery_axis = linspace(self.platform().battery_energy, battery_steps);
        let fuel_axis = linspace(max_fuel.volume, fuel_steps);

        let coords: Vec<(usize, usize)> = (0..battery_steps)
            .flat_map(|b| (0..fuel_steps).map(move |f| (b, f)))
            .collect();
        let eval = |&(b, f): &(usize, usize)| -> Result<SweepCell> {
            Ok(SweepCell {
                battery_index: b,
                fuel_index: f,
                battery_energy: battery_axis[b],
                fuel_volume: fuel_axis[f],
                result: self.evaluate_cell(battery_axis[b], fuel_axis[f])?,
            })
        };
        let cells = match jobs {
            Some(1) => coords.iter().map(eval).collect::<Result<Vec<_>>>()?,
            _ => {
                use rayon::prelude::*;
                let run = || coords.par_iter().map(eval).collect::<Result<Vec<_>>>();
                match jobs {
                    Some(n) => rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build()
                        .map_err(|e| Error::Io(e.to_string()))?
                        .install(run)?,
                    None => run()?,
                }
            }
        };

        let meta = SweepMeta {
            schema_version: SCHEMA_VERSION,
            platform: self.platform().clone(),
            design: self.design().clone(),
            constraints: *self.constraints(),
            airframe_mass_kg: self.airframe_mass(),
            battery_steps,
            fuel_steps,
            battery_range_wh: [0.0, self.platform().battery_energy],
            fuel_range_ml: [0.0, max_fuel.volume * ML_PER_L],
            max_fuel_binding: max_fuel.binding,
            columns: SWEEP_COLUMNS.iter().map(|c| c.to_string()).collect(),
            row_order: "battery-major".into(),
        };
        Ok(SweepGrid {
            battery_axis,
            fuel_axis,
            max_fuel,
            cells,
            meta,
        })
    }
}

/// Sweep under an explicit constraint set, using the global thread pool.
pub fn sweep(
    platform: &PlatformSpec,
    design: &GeneratorDesign,
    battery_steps: usize,
    fuel_steps: usize,
    constraints: &ConstraintSet,
) -> Result<SweepGrid> {
    EnduranceModel::new(platform, design, constraints)?.sweep(battery_steps, fuel_steps, None)
}

impl SweepGrid {
    pub fn cell(&self, battery_index: usize, fuel_index: usize) -> &SweepCell {
        &self.cells[battery_index * self.fuel_axis.len() + fuel_index]
    }

    /// CSV with [`SWEEP_COLUMNS`], six significant digits.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SWEEP_COLUMNS)?;
        let airframe = self.meta.airframe_mass_kg;
        for cell in &self.cells {
            let s = |x: f64| format_sig(x, 6);
            let record = match &cell.result {
                Some(r) => {
                    let b = &r.breakdown;
                    [
                        s(cell.battery_energy),
                        s(cell.fuel_volume * ML_PER_L),
                        s(r.endurance),
                        s(r.avg_power),
                        s(b.total),
                        s(b.airframe),
                        s(b.battery),
                        s(b.generator_hardware),
                        s(b.tank),
                        s(b.fuel),
                        r.feasible.to_string(),
                        r.binding_constraint.to_string(),
                        r.fuel_usable.to_string(),
                    ]
                }
                None => [
                    s(0.0),
                    s(0.0),
                    s(0.0),
                    s(0.0),
                    s(airframe),
                    s(airframe),
                    s(0.0),
                    s(0.0),
                    s(0.0),
                    s(0.0),
                    "false".into(),
                    BindingConstraint::None.to_string(),
                    "false".into(),
                ],
            };
            w.write_record(&record)?;
        }
        w.into_inner().map_err(|e| Error::Csv(e.to_string()))
    }

    pub fn meta_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.meta)?)
    }

    /// Cells whose battery energy is below `reserve_wh`.
    pub fn below_reserve(&self, reserve_wh: f64) -> impl Iterator<Item = &SweepCell> {
        self.cells
            .iter()
            .filter(move |c| c.result.is_some() && c.battery_energy < reserve_wh)
    }
}
