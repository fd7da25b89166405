//! Device efficiency required for a generator to match (or multiply) a
//! platform's battery endurance.
//!
//! The objective is pure-fuel endurance at the maximum fuel load, re-solving
//! the fuel cap at every efficiency probe. It is non-decreasing in η_dev but
//! has a step where fuel stops being usable, so the solver is plain bisection
//! with an explicit bracket check.

use serde::{Deserialize, Serialize};

use crate::endurance::{
    BindingConstraint, ConstraintSet, ConstraintSettings, EnduranceModel, EnduranceResult,
};
use crate::error::{Error, Result};
use crate::platform::PlatformSpec;
use crate::powerplant::GeneratorDesign;
use crate::quantities::{finite, positive};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityObjective {
    /// Endurance with no battery and the maximum fuel load.
    PureFuel,
    /// Best cell of a `steps x steps` sweep, for sensitivity studies.
    BestHybrid { steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub efficiency_lo: f64,
    pub efficiency_hi: f64,
    /// Relative endurance tolerance.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// L; fuel cap resolution while probing
    pub volume_resolution: f64,
    pub objective: ParityObjective,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            efficiency_lo: 0.001,
            efficiency_hi: 0.95,
            tolerance: 1e-6,
            max_iterations: 200,
            volume_resolution: 1e-9,
            objective: ParityObjective::PureFuel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestFuel {
    /// h
    pub endurance: f64,
    /// L
    pub fuel_volume: f64,
    pub binding: BindingConstraint,
    /// `None` when no fuel load satisfies the constraints.
    pub result: Option<EnduranceResult>,
}

fn pure_fuel(model: &EnduranceModel, resolution: f64) -> Result<BestFuel> {
    match model.max_fuel_volume_at(resolution) {
        Ok(max) => Ok(BestFuel {
            endurance: max.result.endurance,
            fuel_volume: max.volume,
            binding: max.binding,
            result: Some(max.result),
        }),
        Err(Error::NoFeasibleFuel { binding }) => Ok(BestFuel {
            endurance: 0.0,
            fuel_volume: 0.0,
            binding,
            result: None,
        }),
        Err(e) => Err(e),
    }
}

fn best_hybrid(model: &EnduranceModel, steps: usize) -> Result<BestFuel> {
    let grid = match model.sweep(steps, steps, Some(1)) {
        Ok(g) => g,
        Err(Error::NoFeasibleFuel { .. }) => {
            let r = model.evaluate_cell(model.platform().battery_energy, 0.0)?;
            return Ok(BestFuel {
                endurance: r.as_ref().map_or(0.0, |r| r.endurance),
                fuel_volume: 0.0,
                binding: BindingConstraint::None,
                result: r,
            });
        }
        Err(e) => return Err(e),
    };
    let binding = grid.max_fuel.binding;
    let best = grid
        .cells
        .into_iter()
        .filter_map(|c| c.result)
        .filter(|r| r.feasible)
        .max_by(|a, b| a.endurance.total_cmp(&b.endurance));
    Ok(match best {
        Some(r) => BestFuel {
            endurance: r.endurance,
            fuel_volume: r.config.fuel_volume,
            binding,
            result: Some(r),
        },
        None => BestFuel {
            endurance: 0.0,
            fuel_volume: 0.0,
            binding,
            result: None,
        },
    })
}

/// Pure-fuel endurance at the maximum fuel load for the design's η_dev.
pub fn best_fuel_endurance(
    platform: &PlatformSpec,
    design: &GeneratorDesign,
    constraints: &ConstraintSet,
) -> Result<BestFuel> {
    let model = EnduranceModel::new(platform, design, constraints)?;
    pure_fuel(&model, SolverOptions::default().volume_resolution)
}

fn objective(
    platform: &PlatformSpec,
    template: &GeneratorDesign,
    constraints: &ConstraintSet,
    efficiency: f64,
    opts: &SolverOptions,
) -> Result<BestFuel> {
    let design = template.with_device_efficiency(efficiency)?;
    let model = EnduranceModel::new(platform, &design, constraints)?;
    match opts.objective {
        ParityObjective::PureFuel => pure_fuel(&model, opts.volume_resolution),
        ParityObjective::BestHybrid { steps } => best_hybrid(&model, steps),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityResult {
    pub platform_name: String,
    pub multiple: f64,
    /// h
    pub target_endurance: f64,
    pub required_efficiency: f64,
    /// h
    pub achieved_endurance: f64,
    /// L
    pub fuel_volume_at_solution: f64,
    pub fuel_mass_fraction: f64,
    /// Fuel plus combustion chamber over stock battery volume.
    pub volume_fraction: f64,
    /// kg
    pub generator_mass: f64,
    /// cm
    pub te_array_side: f64,
    pub max_fuel_binding: BindingConstraint,
    pub iterations: usize,
}

fn finish(
    platform: &PlatformSpec,
    multiple: f64,
    target: f64,
    efficiency: f64,
    best: BestFuel,
    iterations: usize,
) -> ParityResult {
    let generator = best.result.as_ref().and_then(|r| r.generator.as_ref());
    ParityResult {
        platform_name: platform.name.clone(),
        multiple,
        target_endurance: target,
        required_efficiency: efficiency,
        achieved_endurance: best.endurance,
        fuel_volume_at_solution: best.fuel_volume,
        fuel_mass_fraction: generator.map_or(0.0, |g| g.fuel_mass_fraction().get()),
        volume_fraction: generator.map_or(0.0, |g| g.occupied_volume() / platform.battery_volume),
        generator_mass: generator.map_or(0.0, |g| g.total_mass()),
        te_array_side: generator.map_or(0.0, |g| g.te_array_side),
        max_fuel_binding: best.binding,
        iterations,
    }
}

/// η_dev at which the objective endurance equals `multiple` times the
/// platform's stated endurance.
pub fn required_efficiency(
    platform: &PlatformSpec,
    template: &GeneratorDesign,
    multiple: f64,
    constraints: &ConstraintSet,
) -> Result<ParityResult> {
    required_efficiency_with(
        platform,
        template,
        multiple,
        constraints,
        &SolverOptions::default(),
    )
}

pub fn required_efficiency_with(
    platform: &PlatformSpec,
    template: &GeneratorDesign,
    multiple: f64,
    constraints: &ConstraintSet,
    opts: &SolverOptions,
) -> Result<ParityResult> {
    finite("endurance multiple", multiple)?;
    if multiple < 0.5 {
        return Err(Error::OutOfRange {
            name: "endurance multiple".into(),
            value: multiple,
            range: "[0.5, ∞)".into(),
        });
    }
    positive("tolerance", opts.tolerance)?;
    platform.validate()?;
    let target = multiple * platform.stated_endurance;
    let eval = |eta: f64| objective(platform, template, constraints, eta, opts);

    let (mut lo, mut hi) = (opts.efficiency_lo, opts.efficiency_hi);
    let at_lo = eval(lo)?;
    let at_hi = eval(hi)?;
    let within = |e: f64| (e - target).abs() <= opts.tolerance * target;
    if at_hi.endurance < target && !within(at_hi.endurance)
        || at_lo.endurance > target && !within(at_lo.endurance)
    {
        return Err(Error::NoStraddle {
            target,
            lo,
            hi,
            endurance_lo: at_lo.endurance,
            endurance_hi: at_hi.endurance,
        });
    }
    if within(at_lo.endurance) {
        return Ok(finish(platform, multiple, target, lo, at_lo, 0));
    }
    if within(at_hi.endurance) {
        return Ok(finish(platform, multiple, target, hi, at_hi, 0));
    }

    let mut last = at_hi;
    for iteration in 1..=opts.max_iterations {
        let mid = 0.5 * (lo + hi);
        let probe = eval(mid)?;
        if within(probe.endurance) {
            return Ok(finish(platform, multiple, target, mid, probe, iteration));
        }
        if probe.endurance < target {
            lo = mid;
        } else {
            hi = mid;
            last = probe;
        }
    }
    Err(Error::NotConverged {
        target,
        efficiency: hi,
        achieved: last.endurance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityEntry {
    pub multiple: f64,
    #[serde(with = "entry_result")]
    pub result: Result<ParityResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityRow {
    pub platform: String,
    pub specific_power_req: f64,
    pub entries: Vec<ParityEntry>,
}

impl ParityRow {
    pub fn succeeded(&self) -> usize {
        self.entries.iter().filter(|e| e.result.is_ok()).count()
    }

    pub fn entry(&self, multiple: f64) -> Option<&ParityEntry> {
        self.entries.iter().find(|e| e.multiple == multiple)
    }
}

/// Solves each platform at each multiple. Failures are recorded per entry;
/// only an empty platform list is an error. Rows are independent and may be
/// computed on `jobs` threads without changing the result.
pub fn parity_table(
    platforms: &[PlatformSpec],
    template: &GeneratorDesign,
    settings: &ConstraintSettings,
    multiples: &[f64],
    opts: &SolverOptions,
    jobs: Option<usize>,
) -> Result<Vec<ParityRow>> {
    if platforms.is_empty() {
        return Err(Error::EmptyPlatformList);
    }
    let row = |p: &PlatformSpec| ParityRow {
        platform: p.name.clone(),
        specific_power_req: p.specific_power_req,
        entries: multiples
            .iter()
            .map(|&multiple| ParityEntry {
                multiple,
                result: required_efficiency_with(p, template, multiple, &settings.apply(p), opts),
            })
            .collect(),
    };
    use rayon::prelude::*;
    Ok(match jobs {
        Some(1) => platforms.iter().map(row).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(|| platforms.par_iter().map(row).collect()),
        None => platforms.par_iter().map(row).collect(),
    })
}

mod entry_result {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::ParityResult;
    use crate::error::{Error, Result};

    #[derive(Serialize, Deserialize)]
    #[serde(rename_all = "snake_case")]
    enum Repr {
        Ok(ParityResult),
        Error(String),
    }

    pub fn serialize<S: Serializer>(r: &Result<ParityResult>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Ok(v) => Repr::Ok(v.clone()),
            Err(e) => Repr::Error(e.to_string()),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Result<ParityResult>, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Ok(v) => Ok(v),
            Repr::Error(msg) => Err(Error::Json(msg)),
        })
    }
}
