use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;

use super::ini::{ConfigError, Entry, Ini, Section};
use crate::algorithms::Method;
use crate::geometry::{FeasibleSet, ProxKind};
use crate::problems::{
    build_matrix_game, build_saddle_problem, estimate_operator_norm, floored_lipschitz_l,
    reference_instance, DiagonalQuadratic, Matrix, NoiseKind, ProblemSpec, SaddleProblem,
};
use crate::space::RngStream;

/// Relative slack when comparing configured Lipschitz constants with the
/// values measured from the problem data.
const CONSTANT_RTOL: f64 = 1e-9;
const OPERATOR_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "both" => Ok(Self::Both),
            _ => Err(format!("unknown format '{s}' (expected csv, json or both)")),
        }
    }
}

/// Whether `elapsed_seconds` holds wall-clock time or a constant zero (for
/// byte-reproducible output).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    Wall,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KSource {
    Random { seed: u64, norm: Option<f64> },
    Inline(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetConfig {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Simplex,
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Reference,
    Saddle {
        rows: usize,
        cols: usize,
        k: KSource,
        x_weights: Vec<f64>,
        x_targets: Vec<f64>,
        y_weights: Vec<f64>,
        y_targets: Vec<f64>,
        x_set: SetConfig,
        y_set: SetConfig,
        prox: ProxKind,
    },
    MatrixGame {
        rows: usize,
        cols: usize,
        k: KSource,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemConfig {
    pub family: Family,
    pub lipschitz_l: f64,
    pub lipschitz_m: f64,
    pub sigma: f64,
    pub noise: NoiseKind,
}

/// A problem built from its configuration.
#[derive(Debug, Clone)]
pub struct BuiltProblem {
    pub spec: ProblemSpec,
    pub saddle: Option<Arc<SaddleProblem>>,
    /// Set when the configured `L` was raised to the positive floor.
    pub l_floor_applied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub method: Method,
    /// Mirror-prox step; `None` uses the default `1/(sqrt(2)(L + M))`.
    pub step: Option<f64>,
    /// Multiplier applied to every `eta_k^t` of the sliding schedules.
    pub eta_scale: f64,
    /// Start point; `None` uses the prox-center of the set.
    pub start: Option<Vec<f64>>,
    pub sweep: Vec<usize>,
    pub seeds: Vec<u64>,
    pub format: OutputFormat,
    pub timing: Timing,
    pub out_dir: Option<PathBuf>,
}

const SECTIONS: &[&str] = &["problem", "solver", "sweep", "output"];
const PROBLEM_KEYS: &[&str] = &[
    "family",
    "rows",
    "cols",
    "k_source",
    "k_seed",
    "k_norm",
    "k",
    "x_weights",
    "x_targets",
    "y_weights",
    "y_targets",
    "x_set",
    "y_set",
    "x_lo",
    "x_hi",
    "y_lo",
    "y_hi",
    "x_center",
    "x_radius",
    "y_center",
    "y_radius",
    "prox",
    "lipschitz_l",
    "lipschitz_m",
    "sigma",
    "noise",
];
const SOLVER_KEYS: &[&str] = &["method", "step", "eta_scale", "start"];
const SWEEP_KEYS: &[&str] = &["n", "seeds"];
const OUTPUT_KEYS: &[&str] = &["format", "timing", "dir"];

fn require<'a>(section: &'a Section, key: &str) -> Result<&'a Entry, ConfigError> {
    section.get(key).ok_or_else(|| {
        ConfigError::at(
            section.line,
            1,
            format!("missing required key '{key}' in [{}]", section.name),
        )
    })
}

fn require_section<'a>(ini: &'a Ini, name: &str) -> Result<&'a Section, ConfigError> {
    ini.section(name)
        .ok_or_else(|| ConfigError::general(format!("missing required section [{name}]")))
}

fn nonneg(entry: &Entry) -> Result<f64, ConfigError> {
    let v: f64 = entry.parse("number")?;
    if !v.is_finite() || v < 0.0 {
        return Err(entry.error(format!("'{}' must be finite and >= 0", entry.key)));
    }
    Ok(v)
}

/// A list of `dim` numbers, or one number broadcast to all coordinates.
fn vector(
    section: &Section,
    key: &str,
    dim: usize,
    default: Option<f64>,
) -> Result<Vec<f64>, ConfigError> {
    let entry = match (section.get(key), default) {
        (Some(e), _) => e,
        (None, Some(d)) => return Ok(vec![d; dim]),
        (None, None) => return Err(require(section, key).unwrap_err()),
    };
    let v: Vec<f64> = entry.parse_list("number")?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(entry.error(format!("'{key}' entries must be finite")));
    }
    match v.len() {
        1 => Ok(vec![v[0]; dim]),
        n if n == dim => Ok(v),
        n => Err(entry.error(format!("'{key}' has {n} entries, expected 1 or {dim}"))),
    }
}

fn k_source(section: &Section, rows: usize, cols: usize) -> Result<KSource, ConfigError> {
    let kind = match section.get("k_source") {
        Some(e) => e.value.as_str(),
        None => "random",
    };
    match kind {
        "random" => {
            let seed = match section.get("k_seed") {
                Some(e) => e.parse("integer")?,
                None => 0,
            };
            let norm = match section.get("k_norm") {
                Some(e) => {
                    let v = nonneg(e)?;
                    if v == 0.0 {
                        return Err(e.error("'k_norm' must be > 0"));
                    }
                    Some(v)
                }
                None => None,
            };
            Ok(KSource::Random { seed, norm })
        }
        "inline" => {
            let e = require(section, "k")?;
            let mut out = Vec::new();
            for (i, row) in e.value.split(';').enumerate() {
                let vals: Result<Vec<f64>, _> = row
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(str::parse::<f64>)
                    .collect();
                let vals = vals.map_err(|_| {
                    e.error(format!("row {} of 'k' is not a list of numbers", i + 1))
                })?;
                if vals.len() != cols {
                    return Err(e.error(format!(
                        "row {} of 'k' has {} entries, expected cols = {cols}",
                        i + 1,
                        vals.len()
                    )));
                }
                out.push(vals);
            }
            if out.len() != rows {
                return Err(e.error(format!(
                    "'k' has {} rows, expected rows = {rows}",
                    out.len()
                )));
            }
            Ok(KSource::Inline(out))
        }
        other => {
            let e = section.get("k_source").expect("present");
            Err(e.error(format!(
                "unknown k_source '{other}' (expected random or inline)"
            )))
        }
    }
}

fn set_config(
    section: &Section,
    side: &str,
    dim: usize,
    default: &str,
) -> Result<SetConfig, ConfigError> {
    let key = format!("{side}_set");
    let (kind, entry) = match section.get(&key) {
        Some(e) => (e.value.as_str(), Some(e)),
        None => (default, None),
    };
    match kind {
        "box" => {
            let lo = vector(section, &format!("{side}_lo"), dim, Some(0.0))?;
            let hi = vector(section, &format!("{side}_hi"), dim, Some(1.0))?;
            Ok(SetConfig::Box { lo, hi })
        }
        "simplex" => Ok(SetConfig::Simplex),
        "ball" => {
            let center = vector(section, &format!("{side}_center"), dim, Some(0.0))?;
            let radius = match section.get(&format!("{side}_radius")) {
                Some(e) => nonneg(e)?,
                None => 1.0,
            };
            Ok(SetConfig::Ball { center, radius })
        }
        other => Err(entry.expect("default is valid").error(format!(
            "unknown set '{other}' (expected box, simplex or ball)"
        ))),
    }
}

fn dims(section: &Section) -> Result<(usize, usize), ConfigError> {
    let rows_e = require(section, "rows")?;
    let cols_e = require(section, "cols")?;
    let rows: usize = rows_e.parse("integer")?;
    let cols: usize = cols_e.parse("integer")?;
    if rows == 0 {
        return Err(rows_e.error("'rows' must be >= 1"));
    }
    if cols == 0 {
        return Err(cols_e.error("'cols' must be >= 1"));
    }
    Ok((rows, cols))
}

fn parse_problem(section: &Section) -> Result<ProblemConfig, ConfigError> {
    section.check_keys(PROBLEM_KEYS)?;
    let family_e = require(section, "family")?;
    let family = match family_e.value.as_str() {
        "reference" => Family::Reference,
        "saddle" => {
            let (rows, cols) = dims(section)?;
            let prox = match section.get("prox").map(|e| (e.value.as_str(), e)) {
                None | Some(("euclidean", _)) => ProxKind::Euclidean,
                Some(("entropy", _)) => ProxKind::Entropy,
                Some((other, e)) => {
                    return Err(e.error(format!(
                        "unknown prox '{other}' (expected euclidean or entropy)"
                    )))
                }
            };
            let default_set = if prox == ProxKind::Entropy {
                "simplex"
            } else {
                "box"
            };
            Family::Saddle {
                rows,
                cols,
                k: k_source(section, rows, cols)?,
                x_weights: vector(section, "x_weights", cols, Some(0.0))?,
                x_targets: vector(section, "x_targets", cols, Some(0.0))?,
                y_weights: vector(section, "y_weights", rows, Some(0.0))?,
                y_targets: vector(section, "y_targets", rows, Some(0.0))?,
                x_set: set_config(section, "x", cols, default_set)?,
                y_set: set_config(section, "y", rows, default_set)?,
                prox,
            }
        }
        "matrix_game" => {
            let (rows, cols) = dims(section)?;
            Family::MatrixGame {
                rows,
                cols,
                k: k_source(section, rows, cols)?,
            }
        }
        other => {
            return Err(family_e.error(format!(
                "unknown family '{other}' (expected reference, saddle or matrix_game)"
            )))
        }
    };
    let lipschitz_l = nonneg(require(section, "lipschitz_l")?)?;
    let lipschitz_m = nonneg(require(section, "lipschitz_m")?)?;
    let sigma = match section.get("sigma") {
        Some(e) => nonneg(e)?,
        None => 0.0,
    };
    let noise = match section.get("noise").map(|e| (e.value.as_str(), e)) {
        None | Some(("gaussian_additive", _)) => NoiseKind::GaussianAdditive,
        Some(("coordinate_sparsified", _)) => NoiseKind::CoordinateSparsified,
        Some((other, e)) => {
            return Err(e.error(format!(
                "unknown noise '{other}' (expected gaussian_additive or coordinate_sparsified)"
            )))
        }
    };
    Ok(ProblemConfig {
        family,
        lipschitz_l,
        lipschitz_m,
        sigma,
        noise,
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let ini = Ini::parse(text, SECTIONS)?;
        let problem = parse_problem(require_section(&ini, "problem")?)?;

        let solver = require_section(&ini, "solver")?;
        solver.check_keys(SOLVER_KEYS)?;
        let method_e = require(solver, "method")?;
        let method = match method_e.value.as_str() {
            "mps" => Method::Mps,
            "smps" => Method::Smps,
            "mirror_prox" => Method::MirrorProx,
            other => {
                return Err(method_e.error(format!(
                    "unknown method '{other}' (expected mps, smps or mirror_prox)"
                )))
            }
        };
        let step = match solver.get("step") {
            Some(e) => {
                let v = nonneg(e)?;
                if v == 0.0 {
                    return Err(e.error("'step' must be > 0"));
                }
                Some(v)
            }
            None => None,
        };
        let eta_scale = match solver.get("eta_scale") {
            Some(e) => {
                let v = nonneg(e)?;
                if v == 0.0 {
                    return Err(e.error("'eta_scale' must be > 0"));
                }
                v
            }
            None => 1.0,
        };

        let start = match solver.get("start") {
            None => None,
            Some(e) if e.value == "center" => None,
            Some(e) => {
                let v: Vec<f64> = e.parse_list("number")?;
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(e.error("'start' entries must be finite"));
                }
                Some(v)
            }
        };

        let sweep_s = require_section(&ini, "sweep")?;
        sweep_s.check_keys(SWEEP_KEYS)?;
        let n_e = require(sweep_s, "n")?;
        let sweep: Vec<usize> = n_e.parse_list("integer")?;
        if sweep[0] == 0 {
            return Err(n_e.error("sweep values must be >= 1"));
        }
        if sweep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(n_e.error("sweep values must be strictly increasing"));
        }
        let seeds: Vec<u64> = match sweep_s.get("seeds") {
            Some(e) => e.parse_list("64-bit seed")?,
            None if method == Method::Smps => {
                return Err(require(sweep_s, "seeds").unwrap_err());
            }
            None => vec![0],
        };

        let (mut format, mut timing, mut out_dir) = (OutputFormat::Both, Timing::Wall, None);
        if let Some(out) = ini.section("output") {
            out.check_keys(OUTPUT_KEYS)?;
            if let Some(e) = out.get("format") {
                format = e.value.parse().map_err(|m: String| e.error(m))?;
            }
            if let Some(e) = out.get("timing") {
                timing = match e.value.as_str() {
                    "wall" => Timing::Wall,
                    "none" => Timing::None,
                    other => {
                        return Err(
                            e.error(format!("unknown timing '{other}' (expected wall or none)"))
                        )
                    }
                };
            }
            if let Some(e) = out.get("dir") {
                out_dir = Some(PathBuf::from(&e.value));
            }
        }

        Ok(Self {
            problem,
            method,
            step,
            eta_scale,
            start,
            sweep,
            seeds,
            format,
            timing,
            out_dir,
        })
    }
}

fn build_k(k: &KSource, rows: usize, cols: usize) -> crate::Result<Matrix> {
    match k {
        KSource::Inline(data) => Matrix::from_rows(data),
        KSource::Random { seed, norm } => {
            let mut rng = RngStream::new(*seed, 0);
            let raw = Matrix::random_uniform(rows, cols, &mut rng);
            match norm {
                Some(target) => {
                    let current = estimate_operator_norm(&raw, OPERATOR_NORM_TOL)?;
                    Ok(raw.scaled(target / current))
                }
                None => Ok(raw),
            }
        }
    }
}

fn build_set(s: &SetConfig, dim: usize) -> crate::Result<FeasibleSet> {
    match s {
        SetConfig::Box { lo, hi } => FeasibleSet::new_box(lo.clone(), hi.clone()),
        SetConfig::Simplex => FeasibleSet::new_simplex(dim),
        SetConfig::Ball { center, radius } => FeasibleSet::new_ball(center.clone(), *radius),
    }
}

impl ProblemConfig {
    /// Builds the problem and installs the configured constants. Constants
    /// below the values measured from the data are rejected, since the
    /// schedules and bounds would then be unjustified.
    pub fn build(&self) -> Result<BuiltProblem, ConfigError> {
        let rt = |e: crate::Error| ConfigError::general(format!("cannot build problem: {e}"));
        let (spec, saddle) = match &self.family {
            Family::Reference => reference_instance().map_err(rt)?,
            Family::Saddle {
                rows,
                cols,
                k,
                x_weights,
                x_targets,
                y_weights,
                y_targets,
                x_set,
                y_set,
                prox,
            } => build_saddle_problem(
                build_k(k, *rows, *cols).map_err(rt)?,
                DiagonalQuadratic::new(x_weights.clone(), x_targets.clone()).map_err(rt)?,
                DiagonalQuadratic::new(y_weights.clone(), y_targets.clone()).map_err(rt)?,
                build_set(x_set, *cols).map_err(rt)?,
                build_set(y_set, *rows).map_err(rt)?,
                *prox,
            )
            .map_err(rt)?,
            Family::MatrixGame { rows, cols, k } => {
                build_matrix_game(build_k(k, *rows, *cols).map_err(rt)?).map_err(rt)?
            }
        };
        let (true_l, true_m) = match &self.family {
            Family::MatrixGame { .. } => (0.0, spec.lipschitz_m()),
            _ => (spec.lipschitz_l(), spec.lipschitz_m()),
        };
        for (key, given, measured) in [
            ("lipschitz_l", self.lipschitz_l, true_l),
            ("lipschitz_m", self.lipschitz_m, true_m),
        ] {
            if given < measured * (1.0 - CONSTANT_RTOL) {
                return Err(ConfigError::general(format!(
                    "'{key}' = {given} is below the value {measured} measured from the problem data"
                )));
            }
        }
        let l = floored_lipschitz_l(self.lipschitz_l, self.lipschitz_m);
        let spec = spec.with_lipschitz(l, self.lipschitz_m).map_err(rt)?;
        Ok(BuiltProblem {
            spec,
            saddle: Some(saddle),
            l_floor_applied: l != self.lipschitz_l,
        })
    }
}
