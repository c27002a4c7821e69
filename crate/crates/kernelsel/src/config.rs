//! Line-oriented experiment configuration.
//!
//! ```text
//! # comment
//! [ar1]
//! process = ar1
//! a = 0.5
//! b = 3
//! sigma = 1
//! domain = 4, 8, 4, 8
//! families = histogram, trigonometric
//! n = 50, 100, 250, 500, 1000
//! replicates = 200
//! ```
//!
//! Each `[section]` is one experiment. A family entry `fx/fy` uses different
//! families on the two axes; a bare name is used on both.

use std::fmt::{self, Write as _};
use std::path::PathBuf;

use kernelsel_core::estimator::DEFAULT_PILOT_GRID;
use kernelsel_core::{BasisFamily, ChainSpec, PenaltyConfig, PenaltyMode, Rect};

/// A configuration problem, always tied to the offending key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error in `{key}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            line: None,
            message: message.into(),
        }
    }

    fn at(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }
}

/// `(key, value, line)` of one config line.
type Entry = (String, String, usize);

pub const DEFAULT_SURFACE_POINTS: usize = 60;
pub const DEFAULT_SECTION_POINTS: usize = 200;

/// One experiment: a process, its estimation setup and output settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub process: ChainSpec,
    pub domain: Rect,
    pub families: Vec<(BasisFamily, BasisFamily)>,
    pub n: Vec<usize>,
    pub replicates: usize,
    pub penalty: PenaltyConfig,
    pub isotropic: bool,
    pub seed: u64,
    pub quad_points: usize,
    pub out: PathBuf,
    pub surface_points: usize,
    pub section_points: usize,
    pub section_margin: f64,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
}

impl ExperimentConfig {
    /// Reference defaults for a process.
    pub fn for_process(name: &str, process: ChainSpec) -> Self {
        Self {
            name: name.to_string(),
            process,
            domain: process.default_domain(),
            families: vec![
                (BasisFamily::Histogram, BasisFamily::Histogram),
                (BasisFamily::Trigonometric, BasisFamily::Trigonometric),
            ],
            n: vec![50, 100, 250, 500, 1000],
            replicates: 200,
            penalty: PenaltyConfig::default(),
            isotropic: false,
            seed: 20_080_101,
            quad_points: 128,
            out: PathBuf::from("results"),
            surface_points: DEFAULT_SURFACE_POINTS,
            section_points: DEFAULT_SECTION_POINTS,
            section_margin: 0.0,
            x0: None,
            y0: None,
        }
    }
}

/// An ordered list of experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiments: Vec<ExperimentConfig>,
}

impl Config {
    /// AR(1), radial OU and ARCH with histogram and trigonometric bases.
    pub fn defaults() -> Self {
        Self {
            experiments: vec![
                ExperimentConfig::for_process("ar1", ChainSpec::ar1_default()),
                ExperimentConfig::for_process("sqrt_cir", ChainSpec::radial_ou_default()),
                ExperimentConfig::for_process("arch", ChainSpec::arch_default()),
            ],
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: Vec<(String, usize, Vec<Entry>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        ConfigError::new("section", "unterminated section header").at(lineno)
                    })?
                    .trim();
                if name.is_empty() {
                    return Err(ConfigError::new("section", "empty section name").at(lineno));
                }
                if sections.iter().any(|(n, _, _)| n == name) {
                    return Err(
                        ConfigError::new("section", format!("duplicate section [{name}]"))
                            .at(lineno),
                    );
                }
                sections.push((name.to_string(), lineno, Vec::new()));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(line, "expected `key = value`").at(lineno))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            let section = sections
                .last_mut()
                .ok_or_else(|| ConfigError::new(&key, "key outside of any [section]").at(lineno))?;
            if section.2.iter().any(|(k, _, _)| *k == key) {
                return Err(ConfigError::new(&key, "duplicate key").at(lineno));
            }
            section.2.push((key, value, lineno));
        }
        if sections.is_empty() {
            return Err(ConfigError::new("section", "no experiment sections"));
        }
        let experiments = sections
            .into_iter()
            .map(|(name, line, entries)| parse_experiment(&name, line, &entries))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { experiments })
    }

    /// Canonical text form; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.experiments.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            write_experiment(&mut out, e).expect("writing to a String");
        }
        out
    }

    pub fn find(&self, name: &str) -> Option<&ExperimentConfig> {
        self.experiments.iter().find(|e| e.name == name)
    }
}

fn lookup<'a>(entries: &'a [(String, String, usize)], key: &str) -> Option<(&'a str, usize)> {
    entries
        .iter()
        .find(|(k, _, _)| k == key)
        .map(|(_, v, l)| (v.as_str(), *l))
}

fn parse_value<T: std::str::FromStr>(
    entries: &[Entry],
    key: &str,
    default: T,
) -> Result<T, ConfigError> {
    match lookup(entries, key) {
        None => Ok(default),
        Some((v, line)) => v
            .parse::<T>()
            .map_err(|_| ConfigError::new(key, format!("cannot parse {v:?}")).at(line)),
    }
}

fn parse_list<T: std::str::FromStr>(
    key: &str,
    value: &str,
    line: usize,
) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| ConfigError::new(key, format!("cannot parse {:?}", s.trim())).at(line))
        })
        .collect()
}

const KNOWN_KEYS: &[&str] = &[
    "process",
    "a",
    "b",
    "sigma",
    "beta",
    "burn_in",
    "lo",
    "hi",
    "domain",
    "families",
    "n",
    "replicates",
    "penalty",
    "pen_const",
    "pilot_grid",
    "isotropic",
    "seed",
    "quad_points",
    "out",
    "surface_points",
    "section_points",
    "section_margin",
    "x0",
    "y0",
];

fn parse_process(entries: &[Entry], section_line: usize) -> Result<ChainSpec, ConfigError> {
    let (name, line) = lookup(entries, "process")
        .ok_or_else(|| ConfigError::new("process", "missing").at(section_line))?;
    let spec = match name {
        "ar1" => {
            let d = ChainSpec::ar1_default();
            let ChainSpec::Ar1 { a, b, sigma } = d else {
                unreachable!()
            };
            ChainSpec::Ar1 {
                a: parse_value(entries, "a", a)?,
                b: parse_value(entries, "b", b)?,
                sigma: parse_value(entries, "sigma", sigma)?,
            }
        }
        "radial_ou" | "sqrt_cir" => ChainSpec::RadialOu {
            a: parse_value(entries, "a", 0.5)?,
            beta: parse_value(entries, "beta", 3.0)?,
        },
        "arch" => ChainSpec::Arch {
            burn_in: parse_value(entries, "burn_in", kernelsel_core::chains::DEFAULT_BURN_IN)?,
        },
        "uniform" => ChainSpec::Uniform {
            lo: parse_value(entries, "lo", 0.0)?,
            hi: parse_value(entries, "hi", 1.0)?,
        },
        other => {
            return Err(ConfigError::new("process", format!("unknown process {other:?}")).at(line));
        }
    };
    let irrelevant: &[&str] = match spec {
        ChainSpec::Ar1 { .. } => &["beta", "burn_in", "lo", "hi"],
        ChainSpec::RadialOu { .. } => &["b", "sigma", "burn_in", "lo", "hi"],
        ChainSpec::Arch { .. } => &["a", "b", "sigma", "beta", "lo", "hi"],
        ChainSpec::Uniform { .. } => &["a", "b", "sigma", "beta", "burn_in"],
    };
    for key in irrelevant {
        if let Some((_, l)) = lookup(entries, key) {
            return Err(ConfigError::new(key, format!("not a parameter of process {name}")).at(l));
        }
    }
    spec.validate().map_err(|e| {
        let key = match spec {
            ChainSpec::Ar1 { a, .. } | ChainSpec::RadialOu { a, .. } if a.abs() >= 1.0 => "a",
            ChainSpec::Ar1 { .. } => "sigma",
            ChainSpec::Uniform { .. } => "lo",
            _ => "beta",
        };
        ConfigError::new(key, e.to_string())
    })?;
    Ok(spec)
}

fn parse_penalty(entries: &[Entry]) -> Result<PenaltyConfig, ConfigError> {
    let constant: f64 = parse_value(entries, "pen_const", 0.5)?;
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(ConfigError::new("pen_const", "must be a positive number"));
    }
    let grid_points: usize = parse_value(entries, "pilot_grid", DEFAULT_PILOT_GRID)?;
    let (mode, line) = lookup(entries, "penalty").unwrap_or(("simulation", 0));
    let bad = |msg: String| ConfigError::new("penalty", msg).at(line);
    let mode = match mode.split_once(':') {
        None if mode == "simulation" => PenaltyMode::Simulation,
        None if mode == "random" => PenaltyMode::Random {
            pilot_dim: None,
            grid_points,
        },
        Some(("fixed", bound)) => PenaltyMode::Fixed {
            sup_norm_bound: bound
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad sup-norm bound {bound:?}")))?,
        },
        Some(("random", dim)) => PenaltyMode::Random {
            pilot_dim: Some(
                dim.trim()
                    .parse()
                    .map_err(|_| bad(format!("bad pilot dimension {dim:?}")))?,
            ),
            grid_points,
        },
        _ => return Err(bad(format!("unknown penalty mode {mode:?}"))),
    };
    let cfg = PenaltyConfig { constant, mode };
    cfg.validate().map_err(|e| bad(e.to_string()))?;
    Ok(cfg)
}

fn parse_family_entry(entry: &str, line: usize) -> Result<(BasisFamily, BasisFamily), ConfigError> {
    let parse = |s: &str| {
        s.parse::<BasisFamily>()
            .map_err(|e| ConfigError::new("families", e.to_string()).at(line))
    };
    match entry.split_once('/') {
        Some((fx, fy)) => Ok((parse(fx)?, parse(fy)?)),
        None => {
            let f = parse(entry)?;
            Ok((f, f))
        }
    }
}

fn parse_experiment(
    name: &str,
    section_line: usize,
    entries: &[Entry],
) -> Result<ExperimentConfig, ConfigError> {
    if let Some((k, _, l)) = entries
        .iter()
        .find(|(k, _, _)| !KNOWN_KEYS.contains(&k.as_str()))
    {
        return Err(ConfigError::new(k, "unknown key").at(*l));
    }
    let process = parse_process(entries, section_line)?;
    let mut cfg = ExperimentConfig::for_process(name, process);

    if let Some((v, line)) = lookup(entries, "domain") {
        let vals: Vec<f64> = parse_list("domain", v, line)?;
        if vals.len() != 4 {
            return Err(ConfigError::new("domain", "expected x_lo, x_hi, y_lo, y_hi").at(line));
        }
        cfg.domain = Rect::new((vals[0], vals[1]), (vals[2], vals[3]))
            .map_err(|e| ConfigError::new("domain", e.to_string()).at(line))?;
    }
    if let Some((v, line)) = lookup(entries, "families") {
        cfg.families = v
            .split(',')
            .map(|s| parse_family_entry(s.trim(), line))
            .collect::<Result<_, _>>()?;
        if cfg.families.is_empty() {
            return Err(ConfigError::new("families", "empty list").at(line));
        }
    }
    if let Some((v, line)) = lookup(entries, "n") {
        cfg.n = parse_list("n", v, line)?;
        if cfg.n.is_empty() || cfg.n[0] == 0 || cfg.n.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::new(
                "n",
                "must be a nonempty increasing list of positive integers",
            )
            .at(line));
        }
    }
    cfg.replicates = parse_value(entries, "replicates", cfg.replicates)?;
    if cfg.replicates == 0 {
        return Err(ConfigError::new("replicates", "must be at least 1"));
    }
    cfg.penalty = parse_penalty(entries)?;
    cfg.isotropic = parse_value(entries, "isotropic", cfg.isotropic)?;
    cfg.seed = parse_value(entries, "seed", cfg.seed)?;
    cfg.quad_points = parse_value(entries, "quad_points", cfg.quad_points)?;
    if cfg.quad_points < 2 {
        return Err(ConfigError::new("quad_points", "must be at least 2"));
    }
    if let Some((v, _)) = lookup(entries, "out") {
        cfg.out = PathBuf::from(v);
    }
    cfg.surface_points = parse_value(entries, "surface_points", cfg.surface_points)?;
    cfg.section_points = parse_value(entries, "section_points", cfg.section_points)?;
    for (key, v) in [
        ("surface_points", cfg.surface_points),
        ("section_points", cfg.section_points),
    ] {
        if v < 2 {
            return Err(ConfigError::new(key, "must be at least 2"));
        }
    }
    cfg.section_margin = parse_value(entries, "section_margin", cfg.section_margin)?;
    if !(cfg.section_margin >= 0.0) {
        return Err(ConfigError::new("section_margin", "must be nonnegative"));
    }
    cfg.x0 = lookup(entries, "x0")
        .map(|_| parse_value(entries, "x0", 0.0))
        .transpose()?;
    cfg.y0 = lookup(entries, "y0")
        .map(|_| parse_value(entries, "y0", 0.0))
        .transpose()?;
    Ok(cfg)
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_experiment(out: &mut String, e: &ExperimentConfig) -> fmt::Result {
    writeln!(out, "[{}]", e.name)?;
    match e.process {
        ChainSpec::Ar1 { a, b, sigma } => {
            writeln!(out, "process = ar1")?;
            writeln!(out, "a = {a}")?;
            writeln!(out, "b = {b}")?;
            writeln!(out, "sigma = {sigma}")?;
        }
        ChainSpec::RadialOu { a, beta } => {
            writeln!(out, "process = radial_ou")?;
            writeln!(out, "a = {a}")?;
            writeln!(out, "beta = {beta}")?;
        }
        ChainSpec::Arch { burn_in } => {
            writeln!(out, "process = arch")?;
            writeln!(out, "burn_in = {burn_in}")?;
        }
        ChainSpec::Uniform { lo, hi } => {
            writeln!(out, "process = uniform")?;
            writeln!(out, "lo = {lo}")?;
            writeln!(out, "hi = {hi}")?;
        }
    }
    let d = e.domain;
    writeln!(
        out,
        "domain = {}, {}, {}, {}",
        d.x.lo, d.x.hi, d.y.lo, d.y.hi
    )?;
    let fams: Vec<String> = e
        .families
        .iter()
        .map(|(fx, fy)| {
            if fx == fy {
                fx.to_string()
            } else {
                format!("{fx}/{fy}")
            }
        })
        .collect();
    writeln!(out, "families = {}", fams.join(", "))?;
    writeln!(out, "n = {}", join(&e.n))?;
    writeln!(out, "replicates = {}", e.replicates)?;
    match e.penalty.mode {
        PenaltyMode::Simulation => writeln!(out, "penalty = simulation")?,
        PenaltyMode::Fixed { sup_norm_bound } => writeln!(out, "penalty = fixed:{sup_norm_bound}")?,
        PenaltyMode::Random {
            pilot_dim,
            grid_points,
        } => {
            match pilot_dim {
                Some(d) => writeln!(out, "penalty = random:{d}")?,
                None => writeln!(out, "penalty = random")?,
            }
            writeln!(out, "pilot_grid = {grid_points}")?;
        }
    }
    writeln!(out, "pen_const = {}", e.penalty.constant)?;
    writeln!(out, "isotropic = {}", e.isotropic)?;
    writeln!(out, "seed = {}", e.seed)?;
    writeln!(out, "quad_points = {}", e.quad_points)?;
    writeln!(out, "out = {}", e.out.display())?;
    writeln!(out, "surface_points = {}", e.surface_points)?;
    writeln!(out, "section_points = {}", e.section_points)?;
    writeln!(out, "section_margin = {}", e.section_margin)?;
    if let Some(x0) = e.x0 {
        writeln!(out, "x0 = {x0}")?;
    }
    if let Some(y0) = e.y0 {
        writeln!(out, "y0 = {y0}")?;
    }
    Ok(())
}
