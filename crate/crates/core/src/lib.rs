//! Endurance trade studies for small unmanned systems powered by lithium
//! batteries, butane-fired thermoelectric generators, or a mix of both.
//!
//! * [`powerplant`]: fuel, battery and TE module data, generator mass model,
//!   specific-energy budget and thermal diagnostics.
//! * [`platform`]: sample vehicles and mass closure from stated endurance.
//! * [`endurance`]: hybrid configuration evaluation, fuel caps and sweeps.
//! * [`parity`]: device efficiency needed to match or multiply battery endurance.
//! * [`telemetry`]: burner-test log parsing and reduction.
//! * [`cli`]: the `endure` command-line front end.

pub mod catalog;
pub mod cli;
pub mod endurance;
pub mod error;
pub mod output;
pub mod parity;
pub mod platform;
pub mod powerplant;
pub mod quantities;
pub mod telemetry;

pub use endurance::{
    evaluate, mass_breakdown, max_fuel_volume, sweep, BindingConstraint, ConstraintSet,
    ConstraintSettings, EnduranceModel, EnduranceResult, HybridConfig, MassBreakdown, MaxFuel,
    SweepGrid,
};
pub use error::{Error, Result};
pub use parity::{best_fuel_endurance, parity_table, required_efficiency, ParityResult};

pub use platform::{mass_closure, stock_power, PlatformRegistry, PlatformSpec};
pub use powerplant::{FuelSpec, GeneratorBuild, GeneratorDesign, TeModuleSpec};
pub use quantities::{convert, make_fraction, Fraction, Unit};
pub use telemetry::{reduce_test, TestSummary};
