use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optoent::grid::{FrequencyGrid, Spacing};
use optoent::output::{config_hash, Format, Table};
use optoent::params::{OptomechSystem, ParamSpec};

mod commands;

#[derive(Debug, Parser)]
#[command(name = "optoent", version, about = "Entangled sideband light from a three-mode optomechanical cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimized EPR spectral density against the SQL of 1.
    Spectrum(Common),
    /// Optimal combination angles for three pump imbalances.
    OptimalAngles(Common),
    /// Synodyne spectra next to the optimal one.
    Synodyne(Common),
    /// Matched-depth parametric amplifier bandwidths over an input-power sweep.
    CompareOpa(Common),
    /// Force noise of a back-action-evading sensor fed with the entangled light.
    Sensor {
        #[command(flatten)]
        common: Common,
        /// Feed the optimally weighted spectrum instead of the synodyne one.
        #[arg(long)]
        optimal_weights: bool,
    },
    /// Mean-field stability over pump detuning.
    StabilitySweep {
        #[command(flatten)]
        common: Common,
        /// Lower end of the sweep in units of gamma_0.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        from: f64,
        /// Upper end of the sweep in units of gamma_0.
        #[arg(long, default_value_t = 0.08, allow_negative_numbers = true)]
        to: f64,
    },
    /// Run the built-in invariant suites.
    Selftest(Common),
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Built-in parameter set (table1, fig1).
    #[arg(long, default_value = "table1", conflicts_with = "params")]
    preset: String,
    /// TOML parameter file.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Parameter override `key=value`, repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Lowest spectral frequency [rad/s].
    #[arg(long)]
    omega_min: Option<f64>,
    /// Highest spectral frequency [rad/s].
    #[arg(long)]
    omega_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, default_value = "log")]
    spacing: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Debug)]
pub struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: kind={} message={:?}", self.kind, self.message)
    }
}

impl From<optoent::Error> for CliError {
    fn from(e: optoent::Error) -> Self {
        Self::new(e.kind(), e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Where the parameters came from and how they were adjusted.
pub struct Resolved {
    pub spec: ParamSpec,
    pub sys: OptomechSystem,
    pub source: String,
    pub choice: &'static str,
}

/// `(G, G₊ − G₋)` in units of γ_m used by the spectral commands on the
/// `table1` preset unless a pump rate is overridden.
const SPECTRAL_PUMP: (f64, f64) = (2e6, 1e4);

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ParamUse {
    /// Spectral commands: the spectral pump replaces the `table1` pump.
    Spectral,
    /// Use the parameter set as given.
    AsGiven,
}

fn parse_overrides(raw: &[String]) -> CliResult<Vec<(String, f64)>> {
    raw.iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| CliError::new("parse", format!("override `{s}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::new("parse", format!("override `{s}` has a non-numeric value")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

impl Common {
    fn resolve(&self, usage: ParamUse) -> CliResult<Resolved> {
        let overrides = parse_overrides(&self.overrides)?;
        let (base, source) = match &self.params {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
                (ParamSpec::parse(&text)?, format!("file {}", path.display()))
            }
            None => (ParamSpec::preset(&self.preset)?, format!("preset {}", self.preset)),
        };
        let pump_overridden = overrides.iter().any(|(k, _)| k.starts_with("g_"));
        let spectral = usage == ParamUse::Spectral && self.params.is_none() && self.preset == "table1" && !pump_overridden;
        let (base, choice) = if spectral {
            (
                base.with_pump_in_gamma_m(SPECTRAL_PUMP.0, SPECTRAL_PUMP.1),
                "spectral pump G = 2e6 gamma_m, G+ - G- = 1e4 gamma_m replaces the preset pump",
            )
        } else {
            (base, "parameters as given")
        };
        let (spec, sys) = base.resolve(&overrides)?;
        Ok(Resolved { spec, sys, source, choice })
    }

    fn format(&self) -> CliResult<Format> {
        Ok(self.format.parse()?)
    }

    fn grid(&self, sys: &OptomechSystem) -> CliResult<FrequencyGrid> {
        let d = FrequencyGrid::default_for(&sys.response());
        let spacing: Spacing = self.spacing.parse()?;
        Ok(FrequencyGrid::new(
            self.omega_min.unwrap_or(d.omega_min),
            self.omega_max.unwrap_or(d.omega_max),
            self.points.unwrap_or(d.points),
            spacing,
        )?)
    }

    /// Canonical text of everything that determines the output data.
    fn canonical(&self, command: &str, r: &Resolved, extra: &str) -> String {
        format!(
            "command={command}\nsource={}\nchoice={}\noverrides={:?}\nomega_min={:?}\nomega_max={:?}\npoints={:?}\nspacing={}\nformat={}\n{extra}\n{}",
            r.source,
            r.choice,
            self.overrides,
            self.omega_min,
            self.omega_max,
            self.points,
            self.spacing,
            self.format,
            r.spec.to_text()
        )
    }

    fn emit(&self, command: &str, r: &Resolved, extra: &str, mut table: Table) -> CliResult<()> {
        let format = self.format()?;
        let body = std::mem::take(&mut table.metadata);
        table
            .meta("command", command)
            .meta("version", env!("CARGO_PKG_VERSION"))
            .meta("params_source", &r.source)
            .meta("params_choice", r.choice)
            .meta("config_hash", config_hash(&self.canonical(command, r, extra)));
        table.metadata.extend(body);
        write_out(self.out.as_ref(), &table.render(format))
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::new("io", format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Spectrum(c) => {
            let r = c.resolve(ParamUse::Spectral)?;
            let t = commands::spectrum(&r, &c.grid(&r.sys)?)?;
            c.emit("spectrum", &r, "", t)?;
        }
        Command::OptimalAngles(c) => {
            let r = c.resolve(ParamUse::Spectral)?;
            let t = commands::optimal_angles(&r, &c.grid(&r.sys)?)?;
            c.emit("optimal-angles", &r, "", t)?;
        }
        Command::Synodyne(c) => {
            let r = c.resolve(ParamUse::Spectral)?;
            let t = commands::synodyne(&r, &c.grid(&r.sys)?)?;
            c.emit("synodyne", &r, "", t)?;
        }
        Command::CompareOpa(c) => {
            let r = c.resolve(ParamUse::Spectral)?;
            let t = commands::compare_opa(&r, c.points.unwrap_or(5))?;
            c.emit("compare-opa", &r, "", t)?;
        }
        Command::Sensor { common: c, optimal_weights } => {
            let r = c.resolve(ParamUse::Spectral)?;
            let t = commands::sensor(&r, &c.grid(&r.sys)?, optimal_weights)?;
            c.emit("sensor", &r, &format!("optimal_weights={optimal_weights}"), t)?;
        }
        Command::StabilitySweep { common: c, from, to } => {
            let r = c.resolve(ParamUse::AsGiven)?;
            let t = commands::stability_sweep(&r, from, to, c.points.unwrap_or(41))?;
            c.emit("stability-sweep", &r, &format!("from={from:?}\nto={to:?}"), t)?;
        }
        Command::Selftest(c) => {
            let (t, passed) = commands::selftest();
            let format = c.format()?;
            write_out(c.out.as_ref(), &t.render(format))?;
            return Ok(passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
