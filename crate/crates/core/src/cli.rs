//! The `endure` command-line front end.
//!
//! Settings resolve as built-in defaults, then a JSON `--config` file, then
//! flags. Exit codes: 0 success, 2 usage or configuration error, 3 model or
//! reduction error.

use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::endurance::{ConstraintSettings, EnduranceModel};
use crate::error::Error;
use crate::output::{format_sig, write_atomic, SCHEMA_VERSION};
use crate::parity::{parity_table, ParityRow, SolverOptions};
use crate::platform::{mass_closure, PlatformRegistry, PlatformSpec};
use crate::powerplant::{scale_with_delta_t, ArraySizing, GeneratorDesign};
use crate::quantities::{Fraction, G_PER_KG, ML_PER_L};
use crate::telemetry::{
    parse_power_log, parse_temperature_log, reduce_test, smoothed_power_csv, PowerColumns,
    TemperatureColumns, TestInputs,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MODEL: i32 = 3;

const DEFAULT_DEVICE_EFFICIENCY: f64 = 0.12;
const DEFAULT_STEPS: usize = 50;

#[derive(Debug, Parser)]
#[command(
    name = "endure",
    version,
    about = "Battery / thermoelectric hybrid endurance trade studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Endurance grid over battery energy and fuel volume.
    Sweep(SweepArgs),
    /// Device efficiency needed to match or multiply stated endurance.
    Parity(ParityArgs),
    /// Largest fuel load the battery mass and volume allow.
    Maxfuel(MaxfuelArgs),
    /// Reduce a burner test's temperature and power logs.
    Reduce(ReduceArgs),
    /// Rescale TE power and efficiency over a range of ΔT.
    ScaleDt(ScaleDtArgs),
    /// Platform registry.
    Platforms {
        #[command(subcommand)]
        action: PlatformsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum PlatformsAction {
    /// List the platforms with their derived airframe mass.
    List {
        /// Platform registry JSON (overrides $ENDURE_PLATFORMS).
        #[arg(long)]
        platforms: Option<PathBuf>,
    },
}

/// Options shared by the modelling subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct DesignArgs {
    /// JSON file with any of the run settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Platform registry JSON (overrides $ENDURE_PLATFORMS).
    #[arg(long)]
    pub platforms: Option<PathBuf>,
    #[arg(long)]
    pub eta_dev: Option<f64>,
    #[arg(long)]
    pub eta_exh: Option<f64>,
    /// Fuel name from the component catalog.
    #[arg(long)]
    pub fuel: Option<String>,
    /// TE module name from the component catalog.
    #[arg(long)]
    pub te_module: Option<String>,
    /// kg
    #[arg(long)]
    pub overhead_mass: Option<f64>,
    /// kg per module
    #[arg(long)]
    pub module_mass: Option<f64>,
    /// Combustion chamber mL per electrical W.
    #[arg(long)]
    pub cc_coeff: Option<f64>,
    #[arg(long)]
    pub volume_slack: Option<f64>,
    /// Size the TE array in whole modules.
    #[arg(long)]
    pub whole_modules: bool,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub platform: Option<String>,
    /// Steps on both axes.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub battery_steps: Option<usize>,
    #[arg(long)]
    pub fuel_steps: Option<usize>,
    #[command(flatten)]
    pub design: DesignArgs,
}

#[derive(Debug, Args)]
pub struct ParityArgs {
    /// Platform to solve; repeat for several.
    #[arg(long, conflicts_with = "all")]
    pub platform: Vec<String>,
    /// Every platform in the registry.
    #[arg(long)]
    pub all: bool,
    /// Endurance multiple; repeat for several. Defaults to 1 and 2.
    #[arg(long)]
    pub multiple: Vec<f64>,
    #[command(flatten)]
    pub design: DesignArgs,
}

#[derive(Debug, Args)]
pub struct MaxfuelArgs {
    #[arg(long)]
    pub platform: Option<String>,
    /// Print the result as JSON.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub design: DesignArgs,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Temperature log CSV.
    #[arg(long)]
    pub temps: PathBuf,
    /// Electrical log CSV.
    #[arg(long)]
    pub power: PathBuf,
    /// timestamp,hot,cold,ambient
    #[arg(long)]
    pub temp_columns: Option<String>,
    /// time,voltage,current[,power]
    #[arg(long)]
    pub power_columns: Option<String>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long)]
    pub fuel_burned_g: f64,
    #[arg(long)]
    pub dry_mass_g: f64,
    /// Fuel capacity of a full canister.
    #[arg(long)]
    pub canister_g: f64,
    /// Separately measured burn rate; defaults to fuel burned over duration.
    #[arg(long)]
    pub burn_rate_gph: Option<f64>,
    #[arg(long, default_value_t = crate::powerplant::DEFAULT_EXHAUST_EFFICIENCY)]
    pub eta_exh: f64,
    /// Smoothing window in samples.
    #[arg(long, default_value_t = 100)]
    pub window: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScaleDtArgs {
    /// W at the reference ΔT.
    #[arg(long)]
    pub power: f64,
    /// Efficiency at the reference ΔT.
    #[arg(long)]
    pub efficiency: f64,
    /// Reference ΔT, °C.
    #[arg(long)]
    pub delta_t: f64,
    /// Top of the ΔT range, °C.
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 7)]
    pub steps: usize,
}

/// Settings that may come from a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub platform: Option<String>,
    pub platforms_file: Option<PathBuf>,
    pub eta_dev: Option<f64>,
    pub eta_exh: Option<f64>,
    pub fuel: Option<String>,
    pub te_module: Option<String>,
    pub overhead_mass: Option<f64>,
    pub module_mass: Option<f64>,
    pub cc_coeff: Option<f64>,
    pub volume_slack: Option<f64>,
    pub array_sizing: Option<ArraySizing>,
    pub steps: Option<usize>,
    pub battery_steps: Option<usize>,
    pub fuel_steps: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::config(format!("config {}: {e}", path.display())))
    }

    /// Flag values replace file values.
    fn overlay(mut self, flags: &DesignArgs) -> Self {
        macro_rules! take {
            ($($f:ident <- $g:ident),*) => {
                $(if flags.$g.is_some() { self.$f = flags.$g.clone(); })*
            };
        }
        take!(platforms_file <- platforms, eta_dev <- eta_dev, eta_exh <- eta_exh,
              fuel <- fuel, te_module <- te_module, overhead_mass <- overhead_mass,
              module_mass <- module_mass, cc_coeff <- cc_coeff, volume_slack <- volume_slack,
              jobs <- jobs, out <- out);
        if flags.whole_modules {
            self.array_sizing = Some(ArraySizing::WholeModules);
        }
        self
    }

    fn settings(&self) -> Result<ConstraintSettings, Failure> {
        let mut s = ConstraintSettings::default();
        if let Some(x) = self.volume_slack {
            s.volume_slack = x;
        }
        if let Some(x) = self.cc_coeff {
            s.cc_volume_per_watt = x;
        }
        if !(1.0..=1.25).contains(&s.volume_slack) {
            return Err(Failure::config(format!(
                "volume_slack: {} outside [1, 1.25]",
                s.volume_slack
            )));
        }
        if !(s.cc_volume_per_watt > 0.0 && s.cc_volume_per_watt.is_finite()) {
            return Err(Failure::config(format!(
                "cc_coeff: {} must be positive",
                s.cc_volume_per_watt
            )));
        }
        Ok(s)
    }

    fn design(&self) -> Result<GeneratorDesign, Failure> {
        let catalog = Catalog::bundled();
        let field = |name: &'static str| move |e: Error| Failure::config(format!("{name}: {e}"));
        let eta = self.eta_dev.unwrap_or(DEFAULT_DEVICE_EFFICIENCY);
        let mut d = GeneratorDesign::reference(eta).map_err(field("eta_dev"))?;
        if let Some(x) = self.eta_exh {
            d.exhaust_efficiency = Fraction::new(x).map_err(field("eta_exh"))?;
        }
        if let Some(name) = &self.fuel {
            d.fuel = catalog.fuel(name).map_err(field("fuel"))?.clone();
        }
        if let Some(name) = &self.te_module {
            d.te_module = catalog.te_module(name).map_err(field("te_module"))?.clone();
        }
        if let Some(x) = self.overhead_mass {
            d.fixed_overhead_mass = x;
        }
        if let Some(x) = self.module_mass {
            d.hardware_mass_per_module = x;
        }
        if let Some(x) = self.cc_coeff {
            d.cc_volume_per_watt = x;
        }
        if let Some(s) = self.array_sizing {
            d.array_sizing = s;
        }
        d.validate().map_err(field("design"))?;
        Ok(d)
    }

    fn registry(&self) -> Result<PlatformRegistry, Failure> {
        PlatformRegistry::resolve(self.platforms_file.as_deref())
            .map_err(|e| Failure::config(format!("platforms: {e}")))
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

/// A message and the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn model(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MODEL,
            message: message.into(),
        }
    }
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(path, bytes).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

fn resolve(flags: &DesignArgs, platform: Option<&String>) -> Result<RunConfig, Failure> {
    let file = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut cfg = file.overlay(flags);
    if let Some(p) = platform {
        cfg.platform = Some(p.clone());
    }
    Ok(cfg)
}

fn pick_platform(cfg: &RunConfig) -> Result<PlatformSpec, Failure> {
    let name = cfg
        .platform
        .as_ref()
        .ok_or_else(|| Failure::config("platform: none given (--platform or config)"))?;
    let registry = cfg.registry()?;
    let p = registry
        .find(name)
        .map_err(|e| Failure::config(format!("platform: {e}")))?
        .clone();
    mass_closure(&p).map_err(|e| Failure::config(format!("platform: {e}")))?;
    Ok(p)
}

fn model_for(cfg: &RunConfig) -> Result<EnduranceModel, Failure> {
    let platform = pick_platform(cfg)?;
    let design = cfg.design()?;
    let constraints = cfg.settings()?.apply(&platform);
    EnduranceModel::new(&platform, &design, &constraints)
        .map_err(|e| Failure::config(e.to_string()))
}

fn cmd_sweep(args: &SweepArgs) -> Result<String, Failure> {
    let mut cfg = resolve(&args.design, args.platform.as_ref())?;
    if args.steps.is_some() {
        cfg.steps = args.steps;
    }
    if args.battery_steps.is_some() {
        cfg.battery_steps = args.battery_steps;
    }
    if args.fuel_steps.is_some() {
        cfg.fuel_steps = args.fuel_steps;
    }
    let steps = cfg.steps.unwrap_or(DEFAULT_STEPS);
    let (bs, fs) = (
        cfg.battery_steps.unwrap_or(steps),
        cfg.fuel_steps.unwrap_or(steps),
    );
    if bs < 2 || fs < 2 {
        return Err(Failure::config(format!(
            "steps: need at least 2 per axis, got {bs} x {fs}"
        )));
    }
    let model = model_for(&cfg)?;
    let grid = model
        .sweep(bs, fs, cfg.jobs)
        .map_err(|e| Failure::model(e.to_string()))?;
    let dir = cfg.out_dir();
    let csv = grid.to_csv().map_err(|e| Failure::model(e.to_string()))?;
    let meta = grid
        .meta_json()
        .map_err(|e| Failure::model(e.to_string()))?;
    write_out(&dir.join("sweep.csv"), &csv)?;
    write_out(&dir.join("sweep.meta.json"), meta.as_bytes())?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: {} x {} grid, max fuel {} mL ({}) -> {}",
        model.platform().name,
        bs,
        fs,
        format_sig(grid.max_fuel.volume * ML_PER_L, 6),
        grid.max_fuel.binding,
        dir.join("sweep.csv").display()
    );
    for (label, b, f) in [
        ("battery only", bs - 1, 0),
        ("fuel only", 0, fs - 1),
        ("both at max", bs - 1, fs - 1),
    ] {
        let c = grid.cell(b, f);
        let _ = writeln!(
            out,
            "  {label:<12} {:>9} Wh {:>9} mL  {:>8} h  {}",
            format_sig(c.battery_energy, 6),
            format_sig(c.fuel_volume * ML_PER_L, 6),
            format_sig(c.endurance(), 4),
            if c.feasible() {
                "feasible"
            } else {
                "infeasible"
            }
        );
    }
    Ok(out)
}

#[derive(Serialize)]
struct ParityReport<'a> {
    schema_version: u32,
    design: &'a GeneratorDesign,
    settings: &'a ConstraintSettings,
    rows: &'a [ParityRow],
}

const PARITY_COLUMNS: [&str; 12] = [
    "platform",
    "specific_power_W_per_kg",
    "multiple",
    "target_h",
    "required_eta_dev",
    "achieved_h",
    "max_fuel_mL",
    "fuel_mass_fraction",
    "generator_mass_kg",
    "volume_fraction",
    "binding_constraint",
    "error",
];

fn parity_csv(rows: &[ParityRow]) -> crate::error::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PARITY_COLUMNS)?;
    let s = |x: f64| format_sig(x, 6);
    for row in rows {
        for e in &row.entries {
            let mut rec = vec![
                row.platform.clone(),
                s(row.specific_power_req),
                s(e.multiple),
            ];
            match &e.result {
                Ok(r) => rec.extend([
                    s(r.target_endurance),
                    s(r.required_efficiency),
                    s(r.achieved_endurance),
                    s(r.fuel_volume_at_solution * ML_PER_L),
                    s(r.fuel_mass_fraction),
                    s(r.generator_mass),
                    s(r.volume_fraction),
                    r.max_fuel_binding.to_string(),
                    String::new(),
                ]),
                Err(err) => {
                    rec.extend(std::iter::repeat_n(String::new(), 8));
                    rec.push(err.to_string());
                }
            }
            w.write_record(&rec)?;
        }
    }
    w.into_inner().map_err(|e| Error::Csv(e.to_string()))
}

fn cmd_parity(args: &ParityArgs) -> Result<String, Failure> {
    let cfg = resolve(&args.design, None)?;
    let registry = cfg.registry()?;
    let platforms: Vec<PlatformSpec> =
        if args.all || args.platform.is_empty() && cfg.platform.is_none() {
            registry.platforms.clone()
        } else {
            let names: Vec<&String> = if args.platform.is_empty() {
                cfg.platform.iter().collect()
            } else {
                args.platform.iter().collect()
            };
            names
                .into_iter()
                .map(|n| registry.find(n).cloned())
                .collect::<crate::error::Result<_>>()
                .map_err(|e| Failure::config(format!("platform: {e}")))?
        };
    let multiples = if args.multiple.is_empty() {
        vec![1.0, 2.0]
    } else {
        args.multiple.clone()
    };
    if let Some(m) = multiples.iter().find(|m| !(**m >= 0.5 && m.is_finite())) {
        return Err(Failure::config(format!(
            "multiple: {m} must be at least 0.5"
        )));
    }
    let design = cfg.design()?;
    let settings = cfg.settings()?;
    let rows = parity_table(
        &platforms,
        &design,
        &settings,
        &multiples,
        &SolverOptions::default(),
        cfg.jobs,
    )
    .map_err(|e| Failure::config(e.to_string()))?;

    let dir = cfg.out_dir();
    let csv = parity_csv(&rows).map_err(|e| Failure::model(e.to_string()))?;
    let report = ParityReport {
        schema_version: SCHEMA_VERSION,
        design: &design,
        settings: &settings,
        rows: &rows,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::model(e.to_string()))?;
    write_out(&dir.join("parity.csv"), &csv)?;
    write_out(&dir.join("parity.json"), json.as_bytes())?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>7} {:>5} {:>8} {:>8} {:>9} {:>6} {:>8}  binding",
        "platform", "W/kg", "x", "η_dev", "h", "fuel mL", "fmf", "gen kg"
    );
    for row in &rows {
        for e in &row.entries {
            match &e.result {
                Ok(r) => {
                    let _ = writeln!(
                        out,
                        "{:<12} {:>7} {:>5} {:>7}% {:>8} {:>9} {:>6} {:>8}  {}",
                        row.platform,
                        format_sig(row.specific_power_req, 3),
                        format_sig(e.multiple, 3),
                        format_sig(r.required_efficiency * 100.0, 3),
                        format_sig(r.achieved_endurance, 4),
                        format_sig(r.fuel_volume_at_solution * ML_PER_L, 4),
                        format_sig(r.fuel_mass_fraction, 3),
                        format_sig(r.generator_mass, 3),
                        r.max_fuel_binding
                    );
                }
                Err(err) => {
                    let _ = writeln!(
                        out,
                        "{:<12} {:>7} {:>5}  error: {err}",
                        row.platform,
                        format_sig(row.specific_power_req, 3),
                        format_sig(e.multiple, 3)
                    );
                }
            }
        }
    }
    if rows.iter().all(|r| r.succeeded() == 0) {
        return Err(Failure::model(format!("{out}no platform could be solved")));
    }
    Ok(out)
}

#[derive(Serialize)]
struct MaxfuelReport<'a> {
    schema_version: u32,
    platform: &'a str,
    eta_dev: f64,
    max_fuel_ml: f64,
    binding_constraint: String,
    endurance_h: f64,
    fuel_mass_fraction: f64,
    generator_mass_kg: f64,
    occupied_volume_l: f64,
}

fn cmd_maxfuel(args: &MaxfuelArgs) -> Result<String, Failure> {
    let cfg = resolve(&args.design, args.platform.as_ref())?;
    let model = model_for(&cfg)?;
    let max = model
        .max_fuel_volume()
        .map_err(|e| Failure::model(e.to_string()))?;
    let g = max.result.generator.as_ref();
    let report = MaxfuelReport {
        schema_version: SCHEMA_VERSION,
        platform: &model.platform().name,
        eta_dev: model.design().device_efficiency.get(),
        max_fuel_ml: max.volume * ML_PER_L,
        binding_constraint: max.binding.to_string(),
        endurance_h: max.result.endurance,
        fuel_mass_fraction: g.map_or(0.0, |g| g.fuel_mass_fraction().get()),
        generator_mass_kg: g.map_or(0.0, |g| g.total_mass()),
        occupied_volume_l: max.result.occupied_volume,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::model(e.to_string()))?;
    if let Some(dir) = &cfg.out {
        write_out(&dir.join("maxfuel.json"), json.as_bytes())?;
    }
    if args.json {
        return Ok(json + "\n");
    }
    Ok(format!(
        "{}: max fuel {} mL ({}), pure-fuel endurance {} h, fuel mass fraction {}, generator {} kg\n",
        report.platform,
        format_sig(report.max_fuel_ml, 6),
        report.binding_constraint,
        format_sig(report.endurance_h, 4),
        format_sig(report.fuel_mass_fraction, 3),
        format_sig(report.generator_mass_kg, 4)
    ))
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

fn cmd_reduce(args: &ReduceArgs) -> Result<String, Failure> {
    let delimiter = u8::try_from(args.delimiter)
        .map_err(|_| Failure::config("delimiter: must be a single ASCII character"))?;
    let tcols = match &args.temp_columns {
        Some(s) => TemperatureColumns::parse(s),
        None => Ok(TemperatureColumns::default()),
    }
    .map_err(|e| Failure::config(format!("temp_columns: {e}")))?;
    let pcols = match &args.power_columns {
        Some(s) => PowerColumns::parse(s),
        None => Ok(PowerColumns::default()),
    }
    .map_err(|e| Failure::config(format!("power_columns: {e}")))?;
    let temps = parse_temperature_log(open(&args.temps)?, &tcols, delimiter)
        .map_err(|e| Failure::config(format!("{}: {e}", args.temps.display())))?;
    let powers = parse_power_log(open(&args.power)?, &pcols, delimiter)
        .map_err(|e| Failure::config(format!("{}: {e}", args.power.display())))?;
    let eta_exh =
        Fraction::new(args.eta_exh).map_err(|e| Failure::config(format!("eta_exh: {e}")))?;
    if args.window == 0 {
        return Err(Failure::config("window: must be at least 1"));
    }

    let mut inputs = TestInputs::new(
        args.fuel_burned_g / G_PER_KG,
        args.dry_mass_g / G_PER_KG,
        args.canister_g / G_PER_KG,
    );
    inputs.exhaust_efficiency = eta_exh;
    inputs.measured_burn_rate = args.burn_rate_gph.map(|r| r / G_PER_KG);
    inputs.window = args.window;
    let summary = reduce_test(&temps.samples, &powers.samples, &inputs)
        .map_err(|e| Failure::model(e.to_string()))?;

    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let json = summary
        .to_json()
        .map_err(|e| Failure::model(e.to_string()))?;
    let smooth = smoothed_power_csv(&powers.samples, args.window)
        .map_err(|e| Failure::model(e.to_string()))?;
    write_out(&dir.join("summary.json"), json.as_bytes())?;
    write_out(&dir.join("power_smoothed.csv"), &smooth)?;

    let mut out = summary.report();
    let _ = writeln!(
        out,
        "rows skipped: {} temperature, {} power; power warnings: {}",
        temps.skipped, powers.skipped, powers.warnings
    );
    Ok(out)
}

fn cmd_scale_dt(args: &ScaleDtArgs) -> Result<String, Failure> {
    let eta =
        Fraction::new(args.efficiency).map_err(|e| Failure::config(format!("efficiency: {e}")))?;
    // the range top carries the largest efficiency, so check it first
    scale_with_delta_t(args.power, eta, args.delta_t, args.to)
        .map_err(|e| Failure::config(format!("to: {e}")))?;
    let n = if args.to == args.delta_t {
        1
    } else {
        args.steps.max(2)
    };
    let mut out = format!("{:>10} {:>12} {:>10}\n", "ΔT °C", "power W", "η_dev");
    for i in 0..n {
        let dt = if n == 1 || i + 1 == n {
            args.to
        } else {
            args.delta_t + (args.to - args.delta_t) * i as f64 / (n - 1) as f64
        };
        let p = scale_with_delta_t(args.power, eta, args.delta_t, dt)
            .map_err(|e| Failure::config(format!("to: {e}")))?;
        let _ = writeln!(
            out,
            "{:>10} {:>12} {:>10}",
            format_sig(dt, 6),
            format_sig(p.power, 6),
            format_sig(p.efficiency.get(), 6)
        );
    }
    Ok(out)
}

fn cmd_platforms_list(file: Option<&Path>) -> Result<String, Failure> {
    let registry =
        PlatformRegistry::resolve(file).map_err(|e| Failure::config(format!("platforms: {e}")))?;
    let mut out = format!(
        "{:<12} {:<16} {:>6} {:>8} {:>7} {:>7} {:>6} {:>9}\n",
        "name", "class", "W/kg", "Wh", "kg", "L", "h", "empty kg"
    );
    for p in &registry.platforms {
        let empty =
            mass_closure(p).map_or_else(|e| format!("({e})"), |c| format_sig(c.empty_mass, 4));
        let class = serde_json::to_value(p.class)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<12} {:<16} {:>6} {:>8} {:>7} {:>7} {:>6} {:>9}",
            p.name,
            class,
            format_sig(p.specific_power_req, 4),
            format_sig(p.battery_energy, 5),
            format_sig(p.battery_mass, 4),
            format_sig(p.battery_volume, 4),
            format_sig(p.stated_endurance, 4),
            empty
        );
    }
    Ok(out)
}

/// Runs one parsed command, returning its stdout text.
pub fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Parity(a) => cmd_parity(a),
        Command::Maxfuel(a) => cmd_maxfuel(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::ScaleDt(a) => cmd_scale_dt(a),
        Command::Platforms {
            action: PlatformsAction::List { platforms },
        } => cmd_platforms_list(platforms.as_deref()),
    }
}

/// Parses `args` (program name first), runs the command and prints its
/// output. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("endure").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn every_subcommand_has_help() {
        use clap::CommandFactory;
        let cmd = Cli::command();
        cmd.clone().debug_assert();
        for sub in [
            "sweep",
            "parity",
            "maxfuel",
            "reduce",
            "scale-dt",
            "platforms",
        ] {
            assert!(cmd.find_subcommand(sub).is_some(), "{sub}");
        }
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"platform": "raven", "eta_dev": 0.2, "volume_slack": 1.1}"#,
        )
        .unwrap();
        let cli = parse(&[
            "sweep",
            "--config",
            path.to_str().unwrap(),
            "--eta-dev",
            "0.3",
        ]);
        let Command::Sweep(a) = &cli.command else {
            unreachable!()
        };
        let cfg = resolve(&a.design, a.platform.as_ref()).unwrap();
        assert_eq!(cfg.platform.as_deref(), Some("raven"));
        assert_eq!(cfg.eta_dev, Some(0.3));
        assert_eq!(cfg.settings().unwrap().volume_slack, 1.1);
        assert_eq!(cfg.design().unwrap().device_efficiency.get(), 0.3);
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"eta_deV": 0.2}"#).unwrap();
        assert_eq!(RunConfig::load(&path).unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn bad_efficiency_names_the_field() {
        let cfg = RunConfig {
            eta_dev: Some(1.5),
            ..RunConfig::default()
        };
        let f = cfg.design().unwrap_err();
        assert_eq!(f.code, EXIT_CONFIG);
        assert!(f.message.starts_with("eta_dev"), "{}", f.message);
    }

    #[test]
    fn scale_dt_table() {
        let cli = parse(&[
            "scale-dt",
            "--power",
            "20",
            "--efficiency",
            "0.05",
            "--delta-t",
            "300",
            "--to",
            "600",
            "--steps",
            "2",
        ]);
        let text = execute(&cli).unwrap();
        let last = text.lines().last().unwrap();
        assert_eq!(
            last.split_whitespace().collect::<Vec<_>>(),
            ["600", "80", "0.1"]
        );
        let same = parse(&[
            "scale-dt",
            "--power",
            "20",
            "--efficiency",
            "0.05",
            "--delta-t",
            "300",
            "--to",
            "300",
        ]);
        assert_eq!(execute(&same).unwrap().lines().count(), 2);
        let bad = parse(&[
            "scale-dt",
            "--power",
            "20",
            "--efficiency",
            "0.6",
            "--delta-t",
            "300",
            "--to",
            "600",
        ]);
        assert_eq!(execute(&bad).unwrap_err().code, EXIT_CONFIG);
    }
}
