use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::ValueEnum;
use ini::Ini;
use qbh::topology::MIN_WINDING_GRID;
use qbh::{CouplingSet64, Regime};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Spectrum,
    Winding,
    PhaseDiagram,
    Quench,
    Amplify,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Winding => "winding",
            Command::PhaseDiagram => "phase-diagram",
            Command::Quench => "quench",
            Command::Amplify => "amplify",
            Command::Check => "check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One documented configuration key.
pub struct Field {
    pub section: &'static str,
    pub key: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

const fn f(section: &'static str, key: &'static str, default: &'static str, doc: &'static str) -> Field {
    Field { section, key, default, doc }
}

pub const SCHEMA: &[Field] = &[
    f("run", "command", "check", "spectrum | winding | phase-diagram | quench | amplify | check"),
    f("run", "format", "csv", "csv | json"),
    f("run", "threads", "0", "worker threads, 0 = all cores"),
    f("run", "seed", "0", "reserved; every computation is deterministic"),
    f("model", "J", "1", "energy scale, > 0"),
    f("model", "delta", "0.5", "asymmetry of the single parameter point (winding loops, amplify heatmap)"),
    f("model", "theta", "0.4", "non-Hermiticity, >= 0"),
    f("model", "regime", "auto", "real | imaginary | auto (imaginary for amplify, real otherwise)"),
    f("model", "boundary", "pbc", "pbc | obc (spectrum only)"),
    f("model", "cells", "40", "unit cells of the open chain, >= 2"),
    f("grid", "nk", "101", "uniform momenta for PBC spectra"),
    f("grid", "winding_nk", "2001", "uniform momenta for windings, >= 401"),
    f("sweep", "delta_min", "-0.95", "first delta of the sweep"),
    f("sweep", "delta_max", "0.95", "last delta of the sweep (inclusive)"),
    f("sweep", "delta_step", "0.01", "delta spacing, > 0"),
    f("phase", "theta_min", "0", "first theta of the phase diagram"),
    f("phase", "theta_max", "1", "last theta of the phase diagram (inclusive)"),
    f("phase", "theta_step", "0.05", "theta spacing, > 0"),
    f("quench", "initial_J", "1", "pre-quench J"),
    f("quench", "initial_delta", "-0.9", "pre-quench delta"),
    f("quench", "initial_theta", "0", "pre-quench theta"),
    f("quench", "final_J", "1", "post-quench J"),
    f("quench", "final_delta", "0.9", "post-quench delta"),
    f("quench", "final_theta", "0.4", "post-quench theta"),
    f("quench", "t_max", "12", "last sampled time"),
    f("quench", "time_samples", "800", "times on [0, t_max], endpoints included"),
    f("quench", "half_zone", "1000", "momenta per half zone; the grid has 2*half_zone+1 points"),
    f("quench", "n_max", "9", "largest Fisher-zero index n searched for critical times"),
    f("quench", "pgp_k_stride", "10", "keep every n-th momentum in the PGP grid file"),
    f("quench", "pgp_t_stride", "4", "keep every n-th time in the PGP grid file"),
    f("amplify", "cells", "10", "unit cells of the amplifying chain, >= 2"),
];

/// Key listing for `--help` and usage errors.
pub fn schema_text() -> String {
    let mut out = String::from(
        "Config file: flat key=value lines grouped under [section] headers; '#' or ';' start a comment.\n\
         Every key is optional. Valid keys and defaults:\n",
    );
    let mut section = "";
    for fl in SCHEMA {
        if fl.section != section {
            section = fl.section;
            let _ = writeln!(out, "  [{section}]");
        }
        let _ = writeln!(out, "    {:<14} = {:<6} {}", fl.key, fl.default, fl.doc);
    }
    out
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("unknown config key [{section}] {key}")]
    UnknownKey { section: String, key: String },
    #[error("key [{section}] {key} given more than once")]
    Duplicate { section: String, key: String },
    #[error("[{section}] {key} = {value:?}: {reason}")]
    Invalid { section: String, key: String, value: String, reason: String },
}

impl ConfigError {
    /// Unknown keys print the full schema so the user sees the valid set.
    pub fn wants_schema(&self) -> bool {
        matches!(self, ConfigError::UnknownKey { .. } | ConfigError::Syntax(_))
    }
}

/// Raw `section.key -> value` table with defaults filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct RawConfig(BTreeMap<(String, String), String>);

impl Default for RawConfig {
    fn default() -> Self {
        RawConfig(
            SCHEMA.iter().map(|f| ((f.section.to_string(), f.key.to_string()), f.default.to_string())).collect(),
        )
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let mut cfg = RawConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("");
            for (key, value) in props.iter() {
                let id = (section.to_string(), key.to_string());
                if !cfg.0.contains_key(&id) {
                    return Err(ConfigError::UnknownKey { section: id.0, key: id.1 });
                }
                if !seen.insert(id.clone()) {
                    return Err(ConfigError::Duplicate { section: id.0, key: id.1 });
                }
                cfg.0.insert(id, value.trim().to_string());
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        self.0.insert((section.into(), key.into()), value.into());
    }

    fn get(&self, section: &str, key: &str) -> &str {
        &self.0[&(section.to_string(), key.to_string())]
    }

    /// Nested `{section: {key: value}}` view used by the manifest.
    pub fn echo(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        let mut out: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for ((s, k), v) in &self.0 {
            out.entry(s.clone()).or_default().insert(k.clone(), v.clone());
        }
        out
    }

    fn invalid(&self, section: &str, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            section: section.into(),
            key: key.into(),
            value: self.get(section, key).into(),
            reason: reason.into(),
        }
    }

    fn float(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        match self.get(section, key).parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(self.invalid(section, key, "expected a finite number")),
        }
    }

    fn uint(&self, section: &str, key: &str, min: usize) -> Result<usize, ConfigError> {
        match self.get(section, key).parse::<usize>() {
            Ok(x) if x >= min => Ok(x),
            _ => Err(self.invalid(section, key, format!("expected an integer >= {min}"))),
        }
    }

    fn choice<E: ValueEnum>(&self, section: &str, key: &str) -> Result<E, ConfigError> {
        E::from_str(self.get(section, key), true).map_err(|_| {
            let names: Vec<String> =
                E::value_variants().iter().filter_map(|v| v.to_possible_value()).map(|p| p.get_name().to_string()).collect();
            self.invalid(section, key, format!("expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RegimeChoice {
    Auto,
    Real,
    Imaginary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BoundaryChoice {
    Pbc,
    Obc,
}

/// An inclusive, evenly spaced axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    /// Grid points min + i·step, rounded to 12 decimals so that nominal
    /// values such as 0 or −0.12 come out exact.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| ((self.min + i as f64 * self.step) * 1e12).round() / 1e12).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuenchConfig {
    pub initial: CouplingSet64,
    pub final_couplings: CouplingSet64,
    pub t_max: f64,
    pub time_samples: usize,
    pub half_zone: usize,
    pub n_max: i64,
    pub pgp_k_stride: usize,
    pub pgp_t_stride: usize,
}

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub threads: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub point: CouplingSet64,
    pub regime: Regime,
    pub open_boundary: bool,
    pub cells: usize,
    pub nk: usize,
    pub winding_nk: usize,
    pub deltas: Axis,
    pub thetas: Axis,
    pub quench: QuenchConfig,
    pub amplify_cells: usize,
    pub raw: RawConfig,
}

fn axis(raw: &RawConfig, section: &str, name: &str) -> Result<Axis, ConfigError> {
    let (kmin, kmax, kstep) = (format!("{name}_min"), format!("{name}_max"), format!("{name}_step"));
    let a = Axis { min: raw.float(section, &kmin)?, max: raw.float(section, &kmax)?, step: raw.float(section, &kstep)? };
    if !(a.step > 0.0) {
        return Err(raw.invalid(section, &kstep, "step must be positive"));
    }
    if a.max < a.min {
        return Err(raw.invalid(section, &kmax, format!("must not be below {name}_min")));
    }
    if (a.max - a.min) / a.step > 1e6 {
        return Err(raw.invalid(section, &kstep, "more than a million grid points"));
    }
    Ok(a)
}

fn couplings(raw: &RawConfig, section: &str, prefix: &str) -> Result<CouplingSet64, ConfigError> {
    let key = |k: &str| format!("{prefix}{k}");
    let (j, d, th) = (raw.float(section, &key("J"))?, raw.float(section, &key("delta"))?, raw.float(section, &key("theta"))?);
    CouplingSet64::new(j, d, th).map_err(|e| {
        let bad = match e {
            qbh::model::ModelError::NonPositiveJ(_) => "J",
            qbh::model::ModelError::NegativeTheta(_) => "theta",
            _ => "delta",
        };
        raw.invalid(section, &key(bad), e.to_string())
    })
}

impl RunConfig {
    /// Fills nothing itself (defaults live in the raw table) but checks every
    /// value and every parameter point before any computation starts.
    pub fn validate(raw: RawConfig, out: PathBuf) -> Result<Self, ConfigError> {
        let command: Command = raw.choice("run", "command")?;
        let format: Format = raw.choice("run", "format")?;
        let threads = raw.uint("run", "threads", 0)?;
        let seed = raw.get("run", "seed").parse::<u64>().map_err(|_| raw.invalid("run", "seed", "expected an integer >= 0"))?;

        let point = couplings(&raw, "model", "")?;
        let regime = match (raw.choice::<RegimeChoice>("model", "regime")?, command) {
            (RegimeChoice::Auto, Command::Amplify) | (RegimeChoice::Imaginary, _) => Regime::Imaginary,
            _ => Regime::Real,
        };
        if command == Command::Amplify && regime == Regime::Real {
            return Err(raw.invalid("model", "regime", "quadratures do not decouple in the real regime"));
        }
        if command == Command::Quench && regime == Regime::Imaginary {
            return Err(raw.invalid("model", "regime", "quench dynamics are defined for the real regime only"));
        }
        let open_boundary = raw.choice::<BoundaryChoice>("model", "boundary")? == BoundaryChoice::Obc;
        let cells = raw.uint("model", "cells", 2)?;
        let nk = raw.uint("grid", "nk", 2)?;
        let winding_nk = raw.uint("grid", "winding_nk", MIN_WINDING_GRID)?;

        let deltas = axis(&raw, "sweep", "delta")?;
        let thetas = axis(&raw, "phase", "theta")?;
        if thetas.min < 0.0 {
            return Err(raw.invalid("phase", "theta_min", "theta must be non-negative"));
        }
        let j = point.j();
        for (key, d) in [("delta_min", deltas.min), ("delta_max", deltas.max)] {
            CouplingSet64::new(j, d, point.theta()).map_err(|e| raw.invalid("sweep", key, e.to_string()))?;
        }

        let t_max = raw.float("quench", "t_max")?;
        if !(t_max > 0.0) {
            return Err(raw.invalid("quench", "t_max", "must be positive"));
        }
        let quench = QuenchConfig {
            initial: couplings(&raw, "quench", "initial_")?,
            final_couplings: couplings(&raw, "quench", "final_")?,
            t_max,
            time_samples: raw.uint("quench", "time_samples", 2)?,
            half_zone: raw.uint("quench", "half_zone", 1)?,
            n_max: raw.uint("quench", "n_max", 0)? as i64,
            pgp_k_stride: raw.uint("quench", "pgp_k_stride", 1)?,
            pgp_t_stride: raw.uint("quench", "pgp_t_stride", 1)?,
        };
        let amplify_cells = raw.uint("amplify", "cells", 2)?;

        Ok(RunConfig {
            command,
            format,
            threads,
            seed,
            out,
            point,
            regime,
            open_boundary,
            cells,
            nk,
            winding_nk,
            deltas,
            thetas,
            quench,
            amplify_cells,
            raw,
        })
    }

    /// The resolved table echoed into the manifest, with `auto` replaced.
    pub fn echo(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        let mut raw = self.raw.clone();
        raw.set("model", "regime", self.regime.name());
        raw.echo()
    }
}
