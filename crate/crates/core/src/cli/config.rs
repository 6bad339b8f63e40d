//! Flat `key = value` experiment files with `[section]` headers.
//!
//! ```text
//! # benchmark discretization
//! [problem]
//! preset = nu0.499
//!
//! [discretization]
//! nx = 40
//! ny = 40
//! tau = 1
//! final_time = 32
//! ```
//!
//! Keys are addressed as `section.key`; keys before the first header live in
//! the empty section and are addressed by their bare name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::CliError;
use crate::linalg::SolverMethod;
use crate::mandel::{preset, MandelParams};
use crate::splitting::SplitMethod;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(k) => &raw[..k],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::config(line_no, "unterminated section header"))?
                    .trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(CliError::config(line_no, format!("bad section name '{name}'")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(line_no, format!("expected 'key = value', found '{line}'")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::config(line_no, "empty key"));
            }
            let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            if let Some((_, first)) = entries.get(&full) {
                return Err(CliError::config(line_no, format!("duplicate key '{full}' (first set on line {first})")));
            }
            entries.insert(full, (value.trim().to_string(), line_no));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::config(*line, format!("invalid value '{v}' for '{key}': {e}"))),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|e| CliError::config(*line, format!("invalid item '{s}' in '{key}': {e}"))))
                .collect::<Result<Vec<T>, _>>()
                .map(Some),
        }
    }

    /// Rejects keys outside `known`, reporting the first offender's line.
    pub fn check_keys(&self, known: &[&str]) -> Result<(), CliError> {
        let mut unknown: Vec<(usize, &str)> = self
            .entries
            .iter()
            .filter(|(k, _)| !known.contains(&k.as_str()))
            .map(|(k, (_, line))| (*line, k.as_str()))
            .collect();
        unknown.sort_unstable();
        match unknown.first() {
            Some((line, key)) => Err(CliError::config(*line, format!("unknown key '{key}'"))),
            None => Ok(()),
        }
    }
}

/// Stabilization parameter as written by the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LSpec {
    Value(f64),
    /// α² / (2G/d + λ)
    Phys,
    /// half of the physical value
    Min,
}

impl FromStr for LSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phys" | "phy" | "physical" => Ok(Self::Phys),
            "min" => Ok(Self::Min),
            other => other
                .parse::<f64>()
                .map_err(|_| format!("expected a number, 'phys' or 'min', found '{s}'"))
                .and_then(|v| {
                    if v >= 0.0 && v.is_finite() {
                        Ok(Self::Value(v))
                    } else {
                        Err(format!("L must be nonnegative, got {v}"))
                    }
                }),
        }
    }
}

impl LSpec {
    pub fn resolve(self, mp: &MandelParams) -> f64 {
        match self {
            Self::Value(v) => v,
            Self::Phys => mp.material.l_phys(),
            Self::Min => mp.material.l_min(),
        }
    }
}

pub const KNOWN_KEYS: &[&str] = &[
    "problem.preset",
    "problem.nu",
    "problem.alpha",
    "problem.youngs_modulus",
    "problem.biot_modulus",
    "problem.permeability",
    "problem.viscosity",
    "problem.skempton",
    "problem.a",
    "problem.b",
    "problem.force",
    "discretization.nx",
    "discretization.ny",
    "discretization.tau",
    "discretization.final_time",
    "solver.method",
    "solver.linear",
    "solver.L",
    "solver.workers",
    "solver.max_iter",
    "solver.tol",
    "solver.tol_p",
    "solver.tol_u",
    "output.dir",
    "output.probes",
    "sweep.exponents",
    "sweep.values",
    "sweep.methods",
    "refine.taus",
    "refine.hs",
    "refine.tau_preset",
    "refine.h_preset",
    "refine.tau_h",
    "bench.workers",
    "bench.presets",
    "analytic.times",
    "analytic.points",
];

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: String,
    pub params: MandelParams,
    pub nx: usize,
    pub ny: usize,
    pub tau: f64,
    pub final_time: f64,
    pub linear: SolverMethod,
    pub method: SplitMethod,
    pub l: LSpec,
    pub workers: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub tol_p: f64,
    pub tol_u: f64,
    pub out_dir: PathBuf,
    /// abscissas of the pressure probes on y = 0
    pub probes: Vec<f64>,
    pub sweep_exponents: Vec<i32>,
    pub sweep_values: Option<Vec<f64>>,
    pub sweep_methods: Vec<SplitMethod>,
    pub refine_taus: Vec<f64>,
    pub refine_hs: Vec<f64>,
    pub refine_tau_preset: String,
    pub refine_h_preset: String,
    /// vertical grid spacing of the τ block
    pub refine_tau_h: f64,
    pub bench_workers: Vec<usize>,
    pub bench_presets: Vec<String>,
    pub analytic_times: Vec<f64>,
    pub analytic_points: usize,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub method: Option<SplitMethod>,
    pub l: Option<LSpec>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults reproduce the benchmark discretization: 40×40 cells,
    /// τ = 1 s, T = 32 s, L = L_phy.
    pub fn from_file(file: &ConfigFile, ov: &Overrides) -> Result<Self, CliError> {
        file.check_keys(KNOWN_KEYS)?;
        let preset_name = match &ov.preset {
            Some(p) => p.clone(),
            None => file.get::<String>("problem.preset")?.unwrap_or_else(|| "fig3".to_string()),
        };
        let mut params = preset(&preset_name).map_err(|e| CliError::Invalid(e.to_string()))?;
        {
            let m = &mut params.material;
            let set = |target: &mut f64, key: &str| -> Result<(), CliError> {
                if let Some(v) = file.get::<f64>(key)? {
                    *target = v;
                }
                Ok(())
            };
            set(&mut m.poisson_ratio, "problem.nu")?;
            set(&mut m.biot_coefficient, "problem.alpha")?;
            set(&mut m.youngs_modulus, "problem.youngs_modulus")?;
            set(&mut m.biot_modulus, "problem.biot_modulus")?;
            set(&mut m.permeability, "problem.permeability")?;
            set(&mut m.fluid_viscosity, "problem.viscosity")?;
            set(&mut m.skempton, "problem.skempton")?;
            set(&mut params.a, "problem.a")?;
            set(&mut params.b, "problem.b")?;
            set(&mut params.force, "problem.force")?;
        }
        params.validate().map_err(|e| CliError::Invalid(e.to_string()))?;

        let cfg = Self {
            preset: preset_name,
            nx: file.get("discretization.nx")?.unwrap_or(40),
            ny: file.get("discretization.ny")?.unwrap_or(40),
            tau: file.get("discretization.tau")?.unwrap_or(1.0),
            final_time: file.get("discretization.final_time")?.unwrap_or(32.0),
            linear: file.get("solver.linear")?.unwrap_or(SolverMethod::DirectCholesky),
            method: ov.method.map_or_else(|| file.get("solver.method").map(|m| m.unwrap_or(SplitMethod::Pfs)), Ok)?,
            l: ov.l.map_or_else(|| file.get("solver.L").map(|l| l.unwrap_or(LSpec::Phys)), Ok)?,
            workers: ov.workers.map_or_else(|| file.get("solver.workers").map(|w| w.unwrap_or(1)), Ok)?,
            max_iter: file.get("solver.max_iter")?.unwrap_or(100),
            tol: file.get("solver.tol")?.unwrap_or(1e-8),
            tol_p: file.get("solver.tol_p")?.unwrap_or(1e-8),
            tol_u: file.get("solver.tol_u")?.unwrap_or(1e2),
            out_dir: ov.out.clone().or(file.get::<PathBuf>("output.dir")?).unwrap_or_else(|| PathBuf::from("out")),
            probes: file.list("output.probes")?.unwrap_or_else(|| {
                let a = params.a;
                vec![0.0, 0.25 * a, 0.5 * a, 0.75 * a, a]
            }),
            sweep_exponents: file.list("sweep.exponents")?.unwrap_or_else(|| (-3..=3).collect()),
            sweep_values: file.list("sweep.values")?,
            sweep_methods: file.list("sweep.methods")?.unwrap_or_else(|| vec![SplitMethod::Fs, SplitMethod::Pfs]),
            refine_taus: file.list("refine.taus")?.unwrap_or_else(|| vec![1.0, 0.5, 0.25, 0.125]),
            refine_hs: file.list("refine.hs")?.unwrap_or_else(|| vec![0.5, 0.25, 0.125, 0.0625]),
            refine_tau_preset: file.get("refine.tau_preset")?.unwrap_or_else(|| "nu0.49999".to_string()),
            refine_h_preset: file.get("refine.h_preset")?.unwrap_or_else(|| "nu0.499".to_string()),
            refine_tau_h: file.get("refine.tau_h")?.unwrap_or(0.25),
            bench_workers: file.list("bench.workers")?.unwrap_or_else(|| vec![1, 2, 4, 8]),
            bench_presets: file
                .list("bench.presets")?
                .unwrap_or_else(|| vec!["nu0.4".to_string(), "nu0.499".to_string(), "nu0.49999".to_string()]),
            analytic_times: file.list("analytic.times")?.unwrap_or_else(|| vec![1.0, 5.0, 10.0, 20.0, 30.0]),
            analytic_points: file.get("analytic.points")?.unwrap_or(101),
            params,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Invalid(m));
        if self.nx == 0 || self.ny == 0 {
            return bad(format!("cell counts must be positive (nx = {}, ny = {})", self.nx, self.ny));
        }
        if !(self.tau > 0.0 && self.final_time > 0.0) {
            return bad(format!("tau and final_time must be positive (tau = {}, T = {})", self.tau, self.final_time));
        }
        steps_for(self.tau, self.final_time)?;
        if self.workers == 0 || self.bench_workers.contains(&0) {
            return bad("worker counts must be at least 1".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.analytic_points < 2 {
            return bad("analytic.points must be at least 2".into());
        }
        if self.probes.iter().any(|&x| !(0.0..=self.params.a).contains(&x)) {
            return bad(format!("probes must lie in [0, {}]", self.params.a));
        }
        if let Some(v) = &self.sweep_values {
            if v.is_empty() || v.iter().any(|&l| !(l > 0.0)) {
                return bad("sweep.values must be a nonempty list of positive numbers".into());
            }
        }
        if self.refine_taus.is_empty() || self.refine_hs.is_empty() || self.bench_workers.is_empty() {
            return bad("refinement and bench lists must be nonempty".into());
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        steps_for(self.tau, self.final_time).expect("validated")
    }

    pub fn l_value(&self) -> f64 {
        self.l.resolve(&self.params)
    }
}

/// N with N τ = T, requiring T/τ to be an integer to 1e-12.
pub fn steps_for(tau: f64, final_time: f64) -> Result<usize, CliError> {
    let n = (final_time / tau).round();
    if n < 1.0 || (n * tau - final_time).abs() > 1e-12 * final_time.max(1.0) {
        return Err(CliError::Invalid(format!("final time {final_time} is not a whole number of steps of {tau}")));
    }
    Ok(n as usize)
}
