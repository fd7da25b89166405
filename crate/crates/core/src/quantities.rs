//! Scalar quantities, unit tags and conversions.
//!
//! Models work in a fixed canonical set: kg, Wh, W, L, h and °C. Values are
//! plain `f64` inside the model; [`Quantity`] and [`convert`] check unit
//! kinds at the edges (file input, CLI flags), and [`Fraction`] carries
//! efficiencies and mass fractions already validated to `[0, 1]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Mass,
    Energy,
    Power,
    Volume,
    Time,
    Temperature,
    SpecificEnergy,
    SpecificPower,
    Density,
    ArealPower,
    Fraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Kilogram,
    Gram,
    WattHour,
    KilowattHour,
    Joule,
    Watt,
    Kilowatt,
    Liter,
    Milliliter,
    CubicMeter,
    Hour,
    Minute,
    Second,
    Celsius,
    WattHourPerKilogram,
    WattPerKilogram,
    KilogramPerLiter,
    GramPerMilliliter,
    WattPerSquareCentimeter,
    WattPerSquareMeter,
    Ratio,
    Percent,
}

impl Unit {
    pub fn kind(self) -> Kind {
        use Unit::*;
        match self {
            Kilogram | Gram => Kind::Mass,
            WattHour | KilowattHour | Joule => Kind::Energy,
            Watt | Kilowatt => Kind::Power,
            Liter | Milliliter | CubicMeter => Kind::Volume,
            Hour | Minute | Second => Kind::Time,
            Celsius => Kind::Temperature,
            WattHourPerKilogram => Kind::SpecificEnergy,
            WattPerKilogram => Kind::SpecificPower,
            KilogramPerLiter | GramPerMilliliter => Kind::Density,
            WattPerSquareCentimeter | WattPerSquareMeter => Kind::ArealPower,
            Ratio | Percent => Kind::Fraction,
        }
    }

    /// Size of one unit in the canonical unit of its kind, as `num / den`.
    fn scale(self) -> (u64, u64) {
        use Unit::*;
        match self {
            Gram => (1, 1000),
            KilowattHour => (1000, 1),
            Joule => (1, 3600),
            Kilowatt => (1000, 1),
            Milliliter => (1, 1000),
            CubicMeter => (1000, 1),
            Minute => (1, 60),
            Second => (1, 3600),
            WattPerSquareMeter => (1, 10_000),
            Percent => (1, 100),
            _ => (1, 1),
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Kilogram => "kg",
            Gram => "g",
            WattHour => "Wh",
            KilowattHour => "kWh",
            Joule => "J",
            Watt => "W",
            Kilowatt => "kW",
            Liter => "L",
            Milliliter => "mL",
            CubicMeter => "m³",
            Hour => "h",
            Minute => "min",
            Second => "s",
            Celsius => "°C",
            WattHourPerKilogram => "Wh/kg",
            WattPerKilogram => "W/kg",
            KilogramPerLiter => "kg/L",
            GramPerMilliliter => "g/mL",
            WattPerSquareCentimeter => "W/cm²",
            WattPerSquareMeter => "W/m²",
            Ratio => "",
            Percent => "%",
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Converts `value` between two units of the same kind.
///
/// Every supported pair differs by an exact integer ratio, so the conversion
/// is a single multiplication or division by that integer.
pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64> {
    if from.kind() != to.kind() {
        return Err(Error::IncompatibleUnits {
            from: from.kind(),
            to: to.kind(),
        });
    }
    let (fn_, fd) = from.scale();
    let (tn, td) = to.scale();
    let (num, den) = (fn_ * td, fd * tn);
    let g = gcd(num, den);
    let (num, den) = (num / g, den / g);
    Ok(match (num, den) {
        (1, 1) => value,
        (k, 1) => value * k as f64,
        (1, k) => value / k as f64,
        (n, d) => value * n as f64 / d as f64,
    })
}

/// A value tagged with its unit, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    value: f64,
    unit: Unit,
}

impl Quantity {
    /// NaN is always rejected; negative magnitudes are rejected for every
    /// kind except temperature.
    pub fn new(value: f64, unit: Unit) -> Result<Self> {
        let name = format!("{:?} quantity", unit.kind());
        if !value.is_finite() {
            return Err(Error::NotFinite { name, value });
        }
        match unit.kind() {
            Kind::Temperature => {}
            Kind::Fraction => {
                let canonical = convert(value, unit, Unit::Ratio)?;
                Fraction::new(canonical)?;
            }
            _ if value < 0.0 => return Err(Error::Negative { name, value }),
            _ => {}
        }
        Ok(Self { value, unit })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn kind(&self) -> Kind {
        self.unit.kind()
    }

    pub fn to(&self, unit: Unit) -> Result<Quantity> {
        Ok(Quantity {
            value: convert(self.value, self.unit, unit)?,
            unit,
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit.symbol())
    }
}

/// Dimensionless value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Fraction(f64);

impl Fraction {
    pub const ZERO: Fraction = Fraction(0.0);
    pub const ONE: Fraction = Fraction(1.0);

    pub fn new(x: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&x) {
            Ok(Self(x))
        } else {
            Err(Error::FractionOutOfRange { value: x })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Strictly inside `(0, 1]`.
    pub fn is_positive(self) -> bool {
        self.0 > 0.0
    }
}

/// Shorthand for [`Fraction::new`].
pub fn make_fraction(x: f64) -> Result<Fraction> {
    Fraction::new(x)
}

impl TryFrom<f64> for Fraction {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        Fraction::new(x)
    }
}

impl From<Fraction> for f64 {
    fn from(f: Fraction) -> f64 {
        f.0
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub(crate) fn finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NotFinite {
            name: name.to_owned(),
            value,
        })
    }
}

pub(crate) fn non_negative(name: &str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value < 0.0 {
        return Err(Error::Negative {
            name: name.to_owned(),
            value,
        });
    }
    Ok(value)
}

pub(crate) fn positive(name: &str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value <= 0.0 {
        return Err(Error::NotPositive {
            name: name.to_owned(),
            value,
        });
    }
    Ok(value)
}

/// Rejects fractions of exactly zero where a quantity would divide by them.
pub(crate) fn positive_fraction(name: &str, f: Fraction) -> Result<Fraction> {
    if f.is_positive() {
        Ok(f)
    } else {
        Err(Error::NotPositive {
            name: name.to_owned(),
            value: f.get(),
        })
    }
}

pub const SECONDS_PER_HOUR: f64 = 3600.0;
pub const ML_PER_L: f64 = 1000.0;
pub const G_PER_KG: f64 = 1000.0;
