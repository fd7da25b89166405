//! Burner-test log ingestion and reduction.
//!
//! Temperature and electrical logs are CSV with a header row. Columns are
//! looked up by name, timestamps become elapsed seconds from the first kept
//! row, and rows whose fields do not parse are skipped and counted.

use std::fmt::Write as _;
use std::io::Read;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::{format_sig, SCHEMA_VERSION};
use crate::powerplant::{burner_thermal_power, cold_side_resistance, exhaust_split, FuelSpec};
use crate::quantities::{non_negative, positive, Fraction, G_PER_KG, SECONDS_PER_HOUR};

/// Backward timestamp steps up to this many seconds are dropped as jitter.
pub const TIME_TOLERANCE_S: f64 = 2.0;
/// Nearest-sample distance allowed when pairing the two logs.
pub const ALIGN_TOLERANCE_S: f64 = 5.0;
/// Relative V×I mismatch that raises a warning on an explicit power column.
pub const POWER_MISMATCH: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSample {
    /// s since the first sample
    pub t: f64,
    pub t_hot: f64,
    pub t_cold: f64,
    pub t_ambient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    /// s since the first sample
    pub t: f64,
    pub voltage: f64,
    pub current: f64,
    /// W, always voltage × current
    pub power: f64,
}

impl PowerSample {
    pub fn new(t: f64, voltage: f64, current: f64) -> Self {
        Self {
            t,
            voltage,
            current,
            power: voltage * current,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemperatureColumns {
    pub timestamp: String,
    pub hot: String,
    pub cold: String,
    pub ambient: String,
}

impl Default for TemperatureColumns {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            hot: "T_hot_C".into(),
            cold: "T_cold_C".into(),
            ambient: "T_amb_C".into(),
        }
    }
}

impl TemperatureColumns {
    /// Comma-separated `timestamp,hot,cold,ambient`.
    pub fn parse(spec: &str) -> Result<Self> {
        match split_names::<4>(spec)? {
            [timestamp, hot, cold, ambient] => Ok(Self {
                timestamp,
                hot,
                cold,
                ambient,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerColumns {
    pub time: String,
    pub voltage: String,
    pub current: String,
    /// Checked against V×I when present.
    pub power: Option<String>,
}

impl Default for PowerColumns {
    fn default() -> Self {
        Self {
            time: "time_s".into(),
            voltage: "voltage_V".into(),
            current: "current_A".into(),
            power: None,
        }
    }
}

impl PowerColumns {
    /// Comma-separated `time,voltage,current[,power]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let names: Vec<String> = spec.split(',').map(|s| s.trim().to_owned()).collect();
        match names.as_slice() {
            [t, v, i] => Ok(Self {
                time: t.clone(),
                voltage: v.clone(),
                current: i.clone(),
                power: None,
            }),
            [t, v, i, p] => Ok(Self {
                time: t.clone(),
                voltage: v.clone(),
                current: i.clone(),
                power: Some(p.clone()),
            }),
            _ => Err(Error::MissingColumn(format!(
                "power column map '{spec}' needs time,voltage,current[,power]"
            ))),
        }
    }
}

fn split_names<const N: usize>(spec: &str) -> Result<[String; N]> {
    let names: Vec<String> = spec.split(',').map(|s| s.trim().to_owned()).collect();
    names
        .try_into()
        .map_err(|_| Error::MissingColumn(format!("column map '{spec}' needs {N} names")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedLog<T> {
    pub samples: Vec<T>,
    /// Rows dropped for unparseable fields or small backward time steps.
    pub skipped: usize,
    /// Rows kept despite a consistency warning.
    pub warnings: usize,
}

/// Numeric seconds or an ISO-8601 date-time (offset optional).
pub fn parse_timestamp(field: &str) -> Result<f64> {
    let s = field.trim();
    if let Ok(x) = s.parse::<f64>() {
        if x.is_finite() {
            return Ok(x);
        }
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(epoch_seconds(dt.naive_utc()));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(epoch_seconds(dt));
        }
    }
    Err(Error::BadTimestamp(s.to_owned()))
}

fn epoch_seconds(dt: NaiveDateTime) -> f64 {
    let utc = dt.and_utc();
    utc.timestamp() as f64 + f64::from(utc.timestamp_subsec_nanos()) * 1e-9
}

struct Table {
    reader: csv::Reader<Box<dyn Read>>,
    headers: csv::StringRecord,
}

impl Table {
    fn open(input: impl Read + 'static, delimiter: u8) -> Result<Self> {
        let boxed: Box<dyn Read> = Box::new(input);
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(boxed);
        let headers = reader.headers()?.clone();
        if headers.iter().all(str::is_empty) {
            return Err(Error::EmptyLog);
        }
        Ok(Self { reader, headers })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    }
}

fn number(record: &csv::StringRecord, i: usize) -> Option<f64> {
    record
        .get(i)
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|x| x.is_finite())
}

/// Keeps samples whose time does not go backwards; larger steps back are an
/// error. Returns rebased samples and the count dropped.
fn rebase<T>(
    rows: Vec<(usize, f64, T)>,
    mut set_t: impl FnMut(&mut T, f64),
) -> Result<(Vec<T>, usize)> {
    let mut out = Vec::with_capacity(rows.len());
    let mut dropped = 0;
    let mut origin = None;
    let mut last = f64::NEG_INFINITY;
    for (row, t, mut sample) in rows {
        if t < last {
            if last - t > TIME_TOLERANCE_S {
                return Err(Error::NonMonotoneTime {
                    row,
                    step_back: last - t,
                });
            }
            dropped += 1;
            continue;
        }
        last = t;
        let t0 = *origin.get_or_insert(t);
        set_t(&mut sample, t - t0);
        out.push(sample);
    }
    if out.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok((out, dropped))
}

pub fn parse_temperature_log(
    input: impl Read + 'static,
    columns: &TemperatureColumns,
    delimiter: u8,
) -> Result<ParsedLog<TemperatureSample>> {
    let mut table = Table::open(input, delimiter)?;
    let it = table.index(&columns.timestamp)?;
    let ih = table.index(&columns.hot)?;
    let ic = table.index(&columns.cold)?;
    let ia = table.index(&columns.ambient)?;
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (i, record) in table.reader.records().enumerate() {
        let row = i + 2;
        let Ok(record) = record else {
            skipped += 1;
            continue;
        };
        let t = record.get(it).map(parse_timestamp);
        match (
            t,
            number(&record, ih),
            number(&record, ic),
            number(&record, ia),
        ) {
            (Some(Ok(t)), Some(t_hot), Some(t_cold), Some(t_ambient)) => rows.push((
                row,
                t,
                TemperatureSample {
                    t: 0.0,
                    t_hot,
                    t_cold,
                    t_ambient,
                },
            )),
            _ => skipped += 1,
        }
    }
    let (samples, dropped) = rebase(rows, |s, t| s.t = t)?;
    Ok(ParsedLog {
        samples,
        skipped: skipped + dropped,
        warnings: 0,
    })
}

pub fn parse_power_log(
    input: impl Read + 'static,
    columns: &PowerColumns,
    delimiter: u8,
) -> Result<ParsedLog<PowerSample>> {
    let mut table = Table::open(input, delimiter)?;
    let it = table.index(&columns.time)?;
    let iv = table.index(&columns.voltage)?;
    let ii = table.index(&columns.current)?;
    let ip = columns
        .power
        .as_deref()
        .map(|p| table.index(p))
        .transpose()?;
    let mut rows = Vec::new();
    let mut skipped = 0;
    let mut warnings = 0;
    for (i, record) in table.reader.records().enumerate() {
        let row = i + 2;
        let Ok(record) = record else {
            skipped += 1;
            continue;
        };
        let t = record.get(it).map(parse_timestamp);
        let (Some(Ok(t)), Some(v), Some(a)) = (t, number(&record, iv), number(&record, ii)) else {
            skipped += 1;
            continue;
        };
        let sample = PowerSample::new(t, v, a);
        if let Some(ip) = ip {
            match number(&record, ip) {
                Some(p) => {
                    let scale = sample.power.abs().max(p.abs());
                    if (p - sample.power).abs() > POWER_MISMATCH * scale {
                        warnings += 1;
                    }
                }
                None => warnings += 1,
            }
        }
        rows.push((row, t, sample));
    }
    let (samples, dropped) = rebase(rows, |s, t| s.t = t)?;
    Ok(ParsedLog {
        samples,
        skipped: skipped + dropped,
        warnings,
    })
}

/// Centered moving average. Index `i` averages `[i - w/2, i + (w-1)/2]`,
/// clipped to the series, so edges use a shrinking window.
pub fn sliding_mean(values: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::ZeroWindow);
    }
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = values.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + v);
    }
    let (back, ahead) = (window / 2, (window - 1) / 2);
    Ok((0..n)
        .map(|i| {
            if window == 1 {
                return values[i];
            }
            let lo = i.saturating_sub(back);
            let hi = (i + ahead).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect())
}

/// Trapezoidal energy of a power series, Wh.
pub fn integrate_energy(samples: &[PowerSample]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let joules: f64 = samples
        .windows(2)
        .map(|w| 0.5 * (w[0].power + w[1].power) * (w[1].t - w[0].t))
        .sum();
    Ok(joules / SECONDS_PER_HOUR)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestInputs {
    /// kg, weighed
    pub fuel_burned: f64,
    /// kg, generator without canister
    pub device_dry_mass: f64,
    /// kg of fuel in a full canister
    pub canister_fuel_capacity: f64,
    pub fuel: FuelSpec,
    pub exhaust_efficiency: Fraction,
    /// kg/h from a separate flow measurement; otherwise fuel burned over duration
    pub measured_burn_rate: Option<f64>,
    /// Smoothing window in samples.
    pub window: usize,
}

impl TestInputs {
    pub fn new(fuel_burned: f64, device_dry_mass: f64, canister_fuel_capacity: f64) -> Self {
        Self {
            fuel_burned,
            device_dry_mass,
            canister_fuel_capacity,
            fuel: FuelSpec::butane(),
            exhaust_efficiency: Fraction::new(crate::powerplant::DEFAULT_EXHAUST_EFFICIENCY)
                .expect("default exhaust efficiency is a fraction"),
            measured_burn_rate: None,
            window: 100,
        }
    }

    /// Dry device plus a full canister, kg.
    pub fn system_mass(&self) -> f64 {
        self.device_dry_mass + self.canister_fuel_capacity * (1.0 + self.fuel.tank_tare_ratio)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSummary {
    pub schema_version: u32,
    /// h
    pub duration: f64,
    /// W
    pub avg_power: f64,
    /// Wh
    pub energy: f64,
    /// kg
    pub fuel_burned: f64,
    /// kg/h
    pub burn_rate: f64,
    /// Wh
    pub chemical_energy: f64,
    /// W
    pub thermal_power: f64,
    /// W
    pub delivered_power: f64,
    /// W
    pub exhaust_loss: f64,
    pub system_efficiency: f64,
    pub device_efficiency: f64,
    /// Wh from one full canister at the test burn rate
    pub extrapolated_energy: f64,
    /// kg
    pub system_mass: f64,
    /// Wh/kg
    pub specific_energy: f64,
    /// W/kg
    pub specific_power: f64,
    /// °C, over aligned samples
    pub delta_t_mean: f64,
    /// °C/W; absent when the cold side never rose above ambient
    pub cold_side_resistance: Option<f64>,
    /// W, standard deviation of the smoothed power
    pub power_std: f64,
    /// W
    pub first_power: f64,
    /// W
    pub last_power: f64,
    pub aligned_samples: usize,
    pub window: usize,
}

fn duration_s<T>(samples: &[T], t: impl Fn(&T) -> f64) -> f64 {
    match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => t(b) - t(a),
        _ => 0.0,
    }
}

fn nearest(powers: &[PowerSample], t: f64) -> Option<&PowerSample> {
    let i = powers.partition_point(|p| p.t < t);
    [i.checked_sub(1), Some(i)]
        .into_iter()
        .flatten()
        .filter_map(|j| powers.get(j))
        .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
        .filter(|p| (p.t - t).abs() <= ALIGN_TOLERANCE_S)
}

pub fn reduce_test(
    temps: &[TemperatureSample],
    powers: &[PowerSample],
    inputs: &TestInputs,
) -> Result<TestSummary> {
    if powers.is_empty() || temps.is_empty() {
        return Err(Error::EmptySeries);
    }
    if inputs.fuel_burned.is_nan() || inputs.fuel_burned <= 0.0 {
        return Err(Error::NoFuelBurned);
    }
    positive("device dry mass", inputs.device_dry_mass)?;
    non_negative("canister fuel capacity", inputs.canister_fuel_capacity)?;
    inputs.fuel.validate()?;
    positive("exhaust efficiency", inputs.exhaust_efficiency.get())?;

    let energy = integrate_energy(powers)?;
    let span_p = duration_s(powers, |p| p.t);
    let span_t = duration_s(temps, |s| s.t);
    let overlap = span_p.min(span_t);
    if overlap < 0.5 * span_p.max(span_t) || overlap <= 0.0 {
        return Err(Error::InsufficientOverlap { overlap_s: overlap });
    }

    let duration = span_p / SECONDS_PER_HOUR;
    let avg_power = energy / duration;
    let burn_rate = match inputs.measured_burn_rate {
        Some(r) => {
            positive("measured burn rate", r)?;
            r
        }
        None => inputs.fuel_burned / duration,
    };
    let chemical_energy = inputs.fuel.chemical_energy(inputs.fuel_burned);
    let thermal_power = burner_thermal_power(burn_rate, &inputs.fuel)?;
    let split = exhaust_split(thermal_power, inputs.exhaust_efficiency)?;
    let eta_exh = inputs.exhaust_efficiency.get();
    let device_efficiency = energy / (chemical_energy * eta_exh);
    let system_efficiency = device_efficiency * eta_exh;
    let extrapolated_energy = avg_power * inputs.canister_fuel_capacity / burn_rate;
    let system_mass = inputs.system_mass();

    let aligned: Vec<&TemperatureSample> = temps
        .iter()
        .filter(|s| nearest(powers, s.t).is_some())
        .collect();
    if aligned.is_empty() {
        return Err(Error::InsufficientOverlap { overlap_s: 0.0 });
    }
    let k = aligned.len() as f64;
    let delta_t_mean = aligned.iter().map(|s| s.t_hot - s.t_cold).sum::<f64>() / k;
    let cold_mean = aligned.iter().map(|s| s.t_cold).sum::<f64>() / k;
    let ambient_mean = aligned.iter().map(|s| s.t_ambient).sum::<f64>() / k;
    let cold_side_resistance = cold_side_resistance(cold_mean, ambient_mean, split.delivered).ok();

    let raw: Vec<f64> = powers.iter().map(|p| p.power).collect();
    let smooth = sliding_mean(&raw, inputs.window)?;
    let mean = smooth.iter().sum::<f64>() / smooth.len() as f64;
    let power_std =
        (smooth.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / smooth.len() as f64).sqrt();

    Ok(TestSummary {
        schema_version: SCHEMA_VERSION,
        duration,
        avg_power,
        energy,
        fuel_burned: inputs.fuel_burned,
        burn_rate,
        chemical_energy,
        thermal_power,
        delivered_power: split.delivered,
        exhaust_loss: split.lost,
        system_efficiency,
        device_efficiency,
        extrapolated_energy,
        system_mass,
        specific_energy: extrapolated_energy / system_mass,
        specific_power: avg_power / system_mass,
        delta_t_mean,
        cold_side_resistance,
        power_std,
        first_power: raw[0],
        last_power: raw[raw.len() - 1],
        aligned_samples: aligned.len(),
        window: inputs.window,
    })
}

/// Specific energy and power a device at `target_efficiency` would reach with
/// the same burner, canister and mass, from a test run at `test_efficiency`.
pub fn extrapolate_efficiency(
    summary: &TestSummary,
    test_efficiency: f64,
    target_efficiency: f64,
) -> Result<(f64, f64)> {
    positive("test efficiency", test_efficiency)?;
    positive("target efficiency", target_efficiency)?;
    let k = target_efficiency / test_efficiency;
    Ok((summary.specific_energy * k, summary.specific_power * k))
}

impl TestSummary {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Two-column `label  value unit` report.
    pub fn report(&self) -> String {
        let pct = |x: f64| format!("{} %", format_sig(x * 100.0, 4));
        let v = |x: f64, unit: &str| format!("{} {unit}", format_sig(x, 5));
        let rows = [
            ("duration", v(self.duration, "h")),
            ("average power", v(self.avg_power, "W")),
            ("electrical energy", v(self.energy, "Wh")),
            ("fuel burned", v(self.fuel_burned * G_PER_KG, "g")),
            ("burn rate", v(self.burn_rate * G_PER_KG, "g/h")),
            ("chemical energy", v(self.chemical_energy, "Wh")),
            ("thermal power", v(self.thermal_power, "W")),
            ("delivered to module", v(self.delivered_power, "W")),
            ("exhaust loss", v(self.exhaust_loss, "W")),
            ("system efficiency", pct(self.system_efficiency)),
            ("device efficiency", pct(self.device_efficiency)),
            ("full canister energy", v(self.extrapolated_energy, "Wh")),
            ("system mass", v(self.system_mass * G_PER_KG, "g")),
            ("specific energy", v(self.specific_energy, "Wh/kg")),
            ("specific power", v(self.specific_power, "W/kg")),
            ("mean ΔT", v(self.delta_t_mean, "°C")),
            (
                "cold side resistance",
                self.cold_side_resistance
                    .map_or_else(|| "n/a".into(), |r| v(r, "°C/W")),
            ),
            ("smoothed power std", v(self.power_std, "W")),
            (
                "first / last power",
                format!(
                    "{} / {} W",
                    format_sig(self.first_power, 4),
                    format_sig(self.last_power, 4)
                ),
            ),
        ];
        let width = rows
            .iter()
            .map(|(k, _)| k.chars().count())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for (k, val) in rows {
            let pad = width - k.chars().count();
            let _ = writeln!(out, "{k}{}  {val}", " ".repeat(pad));
        }
        out
    }
}

/// `time_s,power_W,power_smoothed_W` for plotting.
pub fn smoothed_power_csv(samples: &[PowerSample], window: usize) -> Result<Vec<u8>> {
    let raw: Vec<f64> = samples.iter().map(|p| p.power).collect();
    let smooth = sliding_mean(&raw, window)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["time_s", "power_W", "power_smoothed_W"])?;
    for (p, s) in samples.iter().zip(smooth) {
        w.write_record([format_sig(p.t, 9), format_sig(p.power, 6), format_sig(s, 6)])?;
    }
    w.into_inner().map_err(|e| Error::Csv(e.to_string()))
}
