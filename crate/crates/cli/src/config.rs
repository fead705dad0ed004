//! Flat `key = value` run configuration.
//!
//! Lines starting with `#` and blank lines are ignored. The `case` key
//! selects the defaults every other key overrides; unknown keys are errors.

use std::fmt::Write as _;

use polyvem::element::{ConvectionMode, QuadDegrees};
use polyvem::postproc::FieldFormat;
use polyvem::NonlinearOptions;

use crate::cases::{find_case, BenchmarkCase};
use crate::error::CliError;
use crate::families::MeshFamily;

pub const KEYS: &[&str] = &[
    "case",
    "levels",
    "seed",
    "mode",
    "nu",
    "k",
    "family",
    "distortion",
    "picard_max",
    "newton_max",
    "tol_rel",
    "tol_abs",
    "damping",
    "picard_reduction",
    "continuation",
    "continuation_start",
    "quad_bilinear",
    "quad_trilinear",
    "quad_load",
    "export_fields",
    "export_matrix",
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: BenchmarkCase,
    pub levels: Vec<usize>,
    pub seed: u64,
    pub nu: f64,
    pub k: usize,
    pub family: MeshFamily,
    pub distortion: f64,
    pub solver: NonlinearOptions,
    pub degrees: QuadDegrees,
    pub export_fields: Option<FieldFormat>,
    pub export_matrix: bool,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| CliError::InvalidValue { key: key.into(), msg: format!("'{value}': {e}") })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::InvalidValue { key: key.into(), msg: format!("'{value}' is not a boolean") }),
    }
}

fn parse_degree(key: &str, value: &str) -> Result<Option<usize>, CliError> {
    if value == "auto" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

pub fn parse_levels(value: &str) -> Result<Vec<usize>, CliError> {
    let levels = value
        .split(',')
        .map(|s| parse::<usize>("levels", s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if levels.is_empty() || levels.contains(&0) {
        return Err(CliError::InvalidValue { key: "levels".into(), msg: "need positive subdivision counts".into() });
    }
    Ok(levels)
}

impl RunConfig {
    /// The case's registered defaults.
    pub fn for_case(name: &str) -> Result<Self, CliError> {
        let case = find_case(name)?;
        Ok(Self {
            levels: case.levels.clone(),
            seed: 1,
            nu: case.nu,
            k: 2,
            family: case.family,
            distortion: case.distortion,
            solver: NonlinearOptions { mode: case.mode, ..Default::default() },
            degrees: QuadDegrees::default(),
            export_fields: None,
            export_matrix: false,
            case,
        })
    }

    /// Applies one override. `case` cannot be changed this way.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let s = &mut self.solver;
        match key {
            "case" => {
                if value != self.case.name {
                    return Err(CliError::InvalidValue { key: key.into(), msg: "case given twice".into() });
                }
            }
            "levels" => self.levels = parse_levels(value)?,
            "seed" => self.seed = parse(key, value)?,
            "mode" => s.mode = parse::<ConvectionMode>(key, value)?,
            "nu" => self.nu = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "family" => self.family = parse(key, value)?,
            "distortion" => self.distortion = parse(key, value)?,
            "picard_max" => s.picard_max = parse(key, value)?,
            "newton_max" => s.newton_max = parse(key, value)?,
            "tol_rel" => s.tol_rel = parse(key, value)?,
            "tol_abs" => s.tol_abs = parse(key, value)?,
            "damping" => s.damping = parse(key, value)?,
            "picard_reduction" => s.picard_reduction = parse(key, value)?,
            "continuation" => s.continuation = parse_bool(key, value)?,
            "continuation_start" => s.continuation_start = parse(key, value)?,
            "quad_bilinear" => self.degrees.bilinear = parse_degree(key, value)?,
            "quad_trilinear" => self.degrees.trilinear = parse_degree(key, value)?,
            "quad_load" => self.degrees.load = parse_degree(key, value)?,
            "export_fields" => {
                self.export_fields = if value == "none" { None } else { Some(parse(key, value)?) };
            }
            "export_matrix" => self.export_matrix = parse_bool(key, value)?,
            _ => return Err(CliError::UnknownKey { line: 0, key: key.into() }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, msg: &str| Err(CliError::InvalidValue { key: key.into(), msg: msg.into() });
        if self.k < 2 {
            return bad("k", "order must be at least 2");
        }
        if !(self.nu > 0.0) {
            return bad("nu", "viscosity must be positive");
        }
        if !(0.0..1.0).contains(&self.distortion) {
            return bad("distortion", "must lie in [0, 1)");
        }
        if !self.family.supports(self.case.domain) {
            return bad("family", &format!("{} cannot mesh the domain of {}", self.family, self.case.name));
        }
        self.solver.validate()?;
        Ok(())
    }

    /// Parses a config file; `case` is required.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let Some((k, v)) = t.split_once('=') else {
                return Err(CliError::Config { line, msg: format!("expected 'key = value', got '{t}'") });
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::UnknownKey { line, key: k.into() });
            }
            if entries.iter().any(|(_, key, _)| *key == k) {
                return Err(CliError::Config { line, msg: format!("duplicate key '{k}'") });
            }
            entries.push((line, k, v));
        }
        let Some(&(_, _, name)) = entries.iter().find(|(_, k, _)| *k == "case") else {
            return Err(CliError::Config { line: 0, msg: "missing required key 'case'".into() });
        };
        let mut cfg = Self::for_case(name)?;
        for (line, k, v) in entries {
            cfg.set(k, v).map_err(|e| CliError::Config { line, msg: e.to_string() })?;
        }
        Ok(cfg)
    }

    /// Every key with its effective value; parses back to the same config.
    pub fn to_text(&self) -> String {
        let s = &self.solver;
        let deg = |d: Option<usize>| d.map_or("auto".to_string(), |d| d.to_string());
        let levels: Vec<String> = self.levels.iter().map(|n| n.to_string()).collect();
        let mut out = String::from("# results are deterministic for a given config, independent of thread count\n");
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("case", self.case.name.into());
        kv("levels", levels.join(","));
        kv("seed", self.seed.to_string());
        kv("mode", s.mode.to_string());
        kv("nu", format!("{:e}", self.nu));
        kv("k", self.k.to_string());
        kv("family", self.family.to_string());
        kv("distortion", self.distortion.to_string());
        kv("picard_max", s.picard_max.to_string());
        kv("newton_max", s.newton_max.to_string());
        kv("tol_rel", format!("{:e}", s.tol_rel));
        kv("tol_abs", format!("{:e}", s.tol_abs));
        kv("damping", s.damping.to_string());
        kv("picard_reduction", format!("{:e}", s.picard_reduction));
        kv("continuation", s.continuation.to_string());
        kv("continuation_start", format!("{:e}", s.continuation_start));
        kv("quad_bilinear", deg(self.degrees.bilinear));
        kv("quad_trilinear", deg(self.degrees.trilinear));
        kv("quad_load", deg(self.degrees.load));
        kv(
            "export_fields",
            match self.export_fields {
                None => "none".into(),
                Some(FieldFormat::Vtk) => "vtk".into(),
                Some(FieldFormat::Csv) => "csv".into(),
            },
        );
        kv("export_matrix", self.export_matrix.to_string());
        out
    }
}
