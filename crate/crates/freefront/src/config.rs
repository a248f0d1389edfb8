//! Run configuration: a `key = value` text document with strict key
//! checking, defaults, and CLI overrides. One config fully determines a run;
//! reruns of the same config are byte-identical.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ReferenceGrid;
use crate::model::{builtin_catalog, InitialData, PolyTerm, ProblemSpec, ReactionPair};
use crate::parabolic::StepParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Fixedpoint,
    Direct,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub f1_poly: Vec<PolyTerm>,
    pub f2_poly: Vec<PolyTerm>,
    pub h0: f64,
    pub d: f64,
    pub mu: f64,
    pub beta: f64,
    pub t_final: f64,
    pub init: String,
    pub amplitude_u: f64,
    pub amplitude_v: f64,
    pub u0_table: Vec<f64>,
    pub v0_table: Vec<f64>,
    pub n: usize,
    pub dt: f64,
    pub theta: f64,
    pub flux_order: usize,
    pub lock_fronts: bool,
    pub scheme: Scheme,
    pub tol_fp: f64,
    pub window: f64,
    pub max_iter: usize,
    pub snapshot_stride: usize,
    pub output_dir: PathBuf,
    pub strict_bounds: bool,
    pub slack: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: String::new(),
            params: BTreeMap::new(),
            f1_poly: Vec::new(),
            f2_poly: Vec::new(),
            h0: f64::NAN,
            d: 1.0,
            mu: 1.0,
            beta: 1.0,
            t_final: f64::NAN,
            init: "cosine".into(),
            amplitude_u: 0.5,
            amplitude_v: 0.5,
            u0_table: Vec::new(),
            v0_table: Vec::new(),
            n: 201,
            dt: 1e-3,
            theta: 1.0,
            flux_order: 2,
            lock_fronts: false,
            scheme: Scheme::Both,
            tol_fp: 1e-10,
            window: 0.05,
            max_iter: 30,
            snapshot_stride: 10,
            output_dir: PathBuf::from("out"),
            strict_bounds: false,
            slack: crate::bounds::DEFAULT_SLACK,
            seed: 0,
        }
    }
}

impl serde::Serialize for PolyTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        format!("{},{},{}", self.pow_u, self.pow_v, self.coeff).serialize(s)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("key '{key}': '{v}' is not a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::Config(format!("key '{key}': '{v}' is not a nonnegative integer")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("key '{key}': '{v}' is not a boolean"))),
    }
}

fn parse_poly(key: &str, v: &str) -> Result<Vec<PolyTerm>> {
    let mut terms = Vec::new();
    for chunk in v.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let parts: Vec<&str> = chunk.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "key '{key}': term '{chunk}' must be 'pow_u,pow_v,coeff'"
            )));
        }
        terms.push(PolyTerm {
            pow_u: parts[0]
                .parse()
                .map_err(|_| Error::Config(format!("key '{key}': bad power '{}'", parts[0])))?,
            pow_v: parts[1]
                .parse()
                .map_err(|_| Error::Config(format!("key '{key}': bad power '{}'", parts[1])))?,
            coeff: parse_f64(key, parts[2])?,
        });
    }
    Ok(terms)
}

fn parse_table(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(|c| parse_f64(key, c))
        .collect()
}

impl RunConfig {
    /// Parses a `key = value` document ('#' starts a comment). Unknown keys
    /// are rejected by name; missing keys take defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies a single `key = value` override (CLI flags beat the file).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(param) = key.strip_prefix("param.") {
            self.params.insert(param.to_string(), parse_f64(key, value)?);
            return Ok(());
        }
        match key {
            "model" => self.model = value.to_string(),
            "g_form" => {
                let flag = match value {
                    "linear" => 0.0,
                    "saturating" => 1.0,
                    _ => {
                        return Err(Error::Config(format!(
                            "key 'g_form': '{value}' must be linear or saturating"
                        )))
                    }
                };
                self.params.insert("G".into(), flag);
            }
            "f1_poly" => self.f1_poly = parse_poly(key, value)?,
            "f2_poly" => self.f2_poly = parse_poly(key, value)?,
            "h0" => self.h0 = parse_f64(key, value)?,
            "d" => self.d = parse_f64(key, value)?,
            "mu" => self.mu = parse_f64(key, value)?,
            "beta" => self.beta = parse_f64(key, value)?,
            "t_final" => self.t_final = parse_f64(key, value)?,
            "init" => self.init = value.to_string(),
            "amplitude" => {
                let a = parse_f64(key, value)?;
                self.amplitude_u = a;
                self.amplitude_v = a;
            }
            "amplitude_u" => self.amplitude_u = parse_f64(key, value)?,
            "amplitude_v" => self.amplitude_v = parse_f64(key, value)?,
            "u0_table" => self.u0_table = parse_table(key, value)?,
            "v0_table" => self.v0_table = parse_table(key, value)?,
            "n" => self.n = parse_usize(key, value)?,
            "dt" => self.dt = parse_f64(key, value)?,
            "theta" => self.theta = parse_f64(key, value)?,
            "flux_order" => self.flux_order = parse_usize(key, value)?,
            "lock_fronts" => self.lock_fronts = parse_bool(key, value)?,
            "scheme" => {
                self.scheme = match value {
                    "fixedpoint" => Scheme::Fixedpoint,
                    "direct" => Scheme::Direct,
                    "both" => Scheme::Both,
                    _ => {
                        return Err(Error::Config(format!(
                            "key 'scheme': '{value}' must be fixedpoint, direct, or both"
                        )))
                    }
                };
            }
            "tol_fp" => self.tol_fp = parse_f64(key, value)?,
            "window" => self.window = parse_f64(key, value)?,
            "max_iter" => self.max_iter = parse_usize(key, value)?,
            "snapshot_stride" => self.snapshot_stride = parse_usize(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "strict_bounds" => self.strict_bounds = parse_bool(key, value)?,
            "slack" => self.slack = parse_f64(key, value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("key 'seed': '{value}' is not an integer")))?
            }
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.model.is_empty() {
            return Err(Error::Config("key 'model' is required".into()));
        }
        let known = ["cooperative", "epidemic", "west-nile", "custom-polynomial"];
        if !known.contains(&self.model.as_str()) {
            return Err(Error::Config(format!(
                "key 'model': '{}' must be one of {}",
                self.model,
                known.join(", ")
            )));
        }
        if !(self.h0 > 0.0) {
            return Err(Error::Config(format!("h0 must be > 0, got {}", self.h0)));
        }
        if !(self.t_final >= 0.0) {
            return Err(Error::Config(format!("t_final must be >= 0, got {}", self.t_final)));
        }
        for (k, v) in [("d", self.d), ("mu", self.mu), ("beta", self.beta), ("dt", self.dt)] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{k} must be > 0, got {v}")));
            }
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must be in [0.5, 1], got {}", self.theta)));
        }
        if self.flux_order != 1 && self.flux_order != 2 {
            return Err(Error::Config(format!("flux_order must be 1 or 2, got {}", self.flux_order)));
        }
        if self.n < 11 {
            return Err(Error::Config(format!("n must be >= 11, got {}", self.n)));
        }
        if !(self.tol_fp > 0.0) {
            return Err(Error::Config(format!("tol_fp must be > 0, got {}", self.tol_fp)));
        }
        if !(self.window > 0.0) {
            return Err(Error::Config(format!("window must be > 0, got {}", self.window)));
        }
        if !["cosine", "parabola", "table"].contains(&self.init.as_str()) {
            return Err(Error::Config(format!(
                "init must be cosine, parabola, or table, got '{}'",
                self.init
            )));
        }
        if self.init == "table" && (self.u0_table.len() < 3 || self.v0_table.len() < 3) {
            return Err(Error::Config(
                "init = table requires u0_table and v0_table with >= 3 entries".into(),
            ));
        }
        Ok(())
    }

    pub fn reactions(&self) -> Result<ReactionPair> {
        if self.model == "custom-polynomial" {
            Ok(ReactionPair::polynomial(self.f1_poly.clone(), self.f2_poly.clone()))
        } else {
            builtin_catalog(&self.model, &self.params)
        }
    }

    /// Initial data sampled at 4x the solver grid resolution.
    pub fn initial_data(&self) -> Result<InitialData> {
        let h0 = self.h0;
        let samples = 4 * self.n + 1;
        match self.init.as_str() {
            "cosine" => {
                let (au, av) = (self.amplitude_u, self.amplitude_v);
                InitialData::from_fns(
                    h0,
                    |x| au * (PI * x / (2.0 * h0)).cos(),
                    |x| av * (PI * x / (2.0 * h0)).cos(),
                    samples,
                )
            }
            "parabola" => {
                let (au, av) = (self.amplitude_u, self.amplitude_v);
                InitialData::from_fns(
                    h0,
                    |x| au * (1.0 - (x / h0) * (x / h0)),
                    |x| av * (1.0 - (x / h0) * (x / h0)),
                    samples,
                )
            }
            "table" => InitialData::from_samples(h0, self.u0_table.clone(), self.v0_table.clone()),
            other => Err(Error::Config(format!("unknown init family '{other}'"))),
        }
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let spec = ProblemSpec {
            reactions: self.reactions()?,
            d: self.d,
            mu: self.mu,
            beta: self.beta,
            init: self.initial_data()?,
            t_final: self.t_final,
        };
        // The endpoint, positivity, and slope hypotheses drive the moving
        // fronts; a locked-front run (test fixture mode) has no use for them.
        if !self.lock_fronts {
            spec.validate()?;
        }
        Ok(spec)
    }

    pub fn grid(&self) -> ReferenceGrid {
        ReferenceGrid::new(self.n)
    }

    pub fn step_params(&self) -> StepParams {
        StepParams {
            dt: self.dt,
            theta: self.theta,
            flux_order: self.flux_order,
            lock_fronts: self.lock_fronts,
        }
    }
}
