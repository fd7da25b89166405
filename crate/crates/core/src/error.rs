use crate::endurance::BindingConstraint;
use crate::quantities::Kind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} must be a finite number, got {value}")]
    NotFinite { name: String, value: f64 },

    #[error("{name} must be non-negative, got {value}")]
    Negative { name: String, value: f64 },

    #[error("{name} must be positive, got {value}")]
    NotPositive { name: String, value: f64 },

    #[error("fraction out of range [0, 1]: {value}")]
    FractionOutOfRange { value: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: String,
        value: f64,
        range: String,
    },

    #[error("cannot convert {from:?} to {to:?}")]
    IncompatibleUnits { from: Kind, to: Kind },

    #[error("parity impossible: target {target} Wh/kg exceeds fuel specific energy {fuel} Wh/kg")]
    ParityImpossible { target: f64, fuel: f64 },

    #[error(
        "target {target} Wh/kg is infeasible: at fuel mass fraction 1 the system reaches only {max_achievable} Wh/kg"
    )]
    InfeasibleSpecificEnergy { target: f64, max_achievable: f64 },

    #[error("scaled efficiency {efficiency} exceeds 1")]
    EfficiencyAboveOne { efficiency: f64 },

    #[error(
        "inconsistent platform '{platform}': battery energy {battery_energy} Wh, stated endurance {stated_endurance} h and \
         specific power {specific_power} W/kg give a total mass no larger than the battery mass {battery_mass} kg"
    )]
    InconsistentPlatform {
        platform: String,
        battery_energy: f64,
        stated_endurance: f64,
        specific_power: f64,
        battery_mass: f64,
    },

    #[error("hybrid configuration needs battery energy or fuel volume")]
    EmptyConfiguration,

    #[error("TE array sizing did not converge after {iterations} iterations")]
    SizingDiverged { iterations: usize },

    #[error("no fuel volume satisfies the constraints ({binding} binds with hardware alone)")]
    NoFeasibleFuel { binding: BindingConstraint },

    #[error(
        "efficiency bracket [{lo}, {hi}] does not straddle target {target} h (endurance {endurance_lo} h at lo, {endurance_hi} h at hi)"
    )]
    NoStraddle {
        target: f64,
        lo: f64,
        hi: f64,
        endurance_lo: f64,
        endurance_hi: f64,
    },

    #[error(
        "bisection stopped at efficiency {efficiency} with endurance {achieved} h against target {target} h (objective discontinuity)"
    )]
    NotConverged {
        target: f64,
        efficiency: f64,
        achieved: f64,
    },

    #[error("no platforms given")]
    EmptyPlatformList,

    #[error("unknown platform '{0}'")]
    UnknownPlatform(String),

    #[error("unknown {kind} '{name}'")]
    UnknownComponent { kind: &'static str, name: String },

    #[error("grid needs at least 2 steps per axis, got {0}")]
    GridTooSmall(usize),

    #[error("missing column '{0}'")]
    MissingColumn(String),

    #[error("log contains no usable rows")]
    EmptyLog,

    #[error("timestamp steps back by {step_back} s at row {row} (tolerance 2 s)")]
    NonMonotoneTime { row: usize, step_back: f64 },

    #[error("unparseable timestamp '{0}'")]
    BadTimestamp(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("empty series")]
    EmptySeries,

    #[error("window must be at least 1")]
    ZeroWindow,

    #[error("fuel burned must be positive")]
    NoFuelBurned,

    #[error("power and temperature logs overlap for only {overlap_s} s")]
    InsufficientOverlap { overlap_s: f64 },

    #[error("csv: {0}")]
    Csv(String),

    #[error("json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
