//! Experiment configuration: one TOML document with a block per concern.
//!
//! Parsing reports every violation it finds, each tagged with the dotted path
//! of the offending key.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sidlab_core::dynamics::EPS_DEG;
use sidlab_core::{Grid, KernelSpec, SolverParams, TrigBasis, TrigTerm, Wavevector};

use crate::Command;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sde: Option<SdeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    /// Wavevector with one component per dimension; sets `v_k` and `v_{−k}`.
    pub k: Vec<i32>,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTermEntry {
    pub coef: f64,
    pub basis: TrigBasis,
    pub k: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelConfig {
    /// `a cos(x − y)` on the circle.
    CircleDot {
        a: f64,
    },
    Fourier {
        #[serde(default = "one")]
        dim: usize,
        coefficients: Vec<CoefficientEntry>,
    },
    Heat {
        #[serde(default = "one")]
        dim: usize,
        a: f64,
        tau: f64,
        k_max: i32,
    },
    Gaussian {
        beta: f64,
        sigma: f64,
    },
    TrigSum {
        terms: Vec<TrigTermEntry>,
    },
    Matrix {
        entries: Vec<Vec<f64>>,
    },
}

fn one() -> usize {
    1
}

impl KernelConfig {
    fn needs_grid(&self) -> bool {
        matches!(
            self,
            Self::Gaussian { .. } | Self::TrigSum { .. } | Self::Matrix { .. }
        )
    }

    fn translation_invariant(&self) -> bool {
        matches!(
            self,
            Self::CircleDot { .. } | Self::Fourier { .. } | Self::Heat { .. }
        )
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Self::CircleDot { .. } => Some(1),
            Self::Fourier { dim, .. } | Self::Heat { dim, .. } => Some(*dim),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(default = "one")]
    pub dim: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default = "defaults::n_starts")]
    pub n_starts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    #[serde(default = "defaults::damping")]
    pub damping: f64,
    #[serde(default = "defaults::dedupe_radius")]
    pub dedupe_radius: f64,
    #[serde(default = "defaults::eps_deg")]
    pub eps_deg: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_starts: defaults::n_starts(),
            seed: 0,
            tol: defaults::tol(),
            damping: defaults::damping(),
            dedupe_radius: defaults::dedupe_radius(),
            eps_deg: defaults::eps_deg(),
        }
    }
}

impl SolverConfig {
    pub fn params(&self) -> SolverParams {
        SolverParams {
            n_starts: self.n_starts,
            seed: self.seed,
            tol: self.tol,
            damping: self.damping,
            dedupe_radius: self.dedupe_radius,
            eps_deg: self.eps_deg,
            ..SolverParams::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowInit {
    Uniform,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    #[serde(default = "defaults::step")]
    pub step: f64,
    pub t_end: f64,
    #[serde(default = "defaults::init")]
    pub init: FlowInit,
    #[serde(default = "defaults::amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdeBlock {
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default = "defaults::t_warmup")]
    pub t_warmup: f64,
    pub t_end: f64,
    /// Defaults to the kernel support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<i32>,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to `[t_end]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub n_runs: usize,
    #[serde(default = "defaults::match_radius")]
    pub match_radius: f64,
    #[serde(default = "defaults::localized_mode1")]
    pub localized_mode1: f64,
    /// Enumerate fixed points first (needs `grid`) and classify against them.
    #[serde(default)]
    pub register_fixed_points: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default = "defaults::formats")]
    pub formats: Vec<Format>,
}

mod defaults {
    use super::{FlowInit, Format};

    pub fn n_starts() -> usize {
        32
    }
    pub fn tol() -> f64 {
        1e-10
    }
    pub fn damping() -> f64 {
        0.5
    }
    pub fn dedupe_radius() -> f64 {
        1e-4
    }
    pub fn eps_deg() -> f64 {
        super::EPS_DEG
    }
    pub fn step() -> f64 {
        0.1
    }
    pub fn init() -> FlowInit {
        FlowInit::Random
    }
    pub fn amplitude() -> f64 {
        1.0
    }
    pub fn dt() -> f64 {
        1e-2
    }
    pub fn t_warmup() -> f64 {
        1.0
    }
    pub fn match_radius() -> f64 {
        0.1
    }
    pub fn localized_mode1() -> f64 {
        0.2
    }
    pub fn formats() -> Vec<Format> {
        vec![Format::Json, Format::Csv]
    }
}

const BLOCKS: &[&str] = &[
    "kernel",
    "grid",
    "solver",
    "flow",
    "sde",
    "montecarlo",
    "output",
];
const KERNEL_TYPES: &[&str] = &[
    "circle_dot",
    "fourier",
    "heat",
    "gaussian",
    "trig_sum",
    "matrix",
];

fn block_keys(block: &str) -> &'static [&'static str] {
    match block {
        "grid" => &["dim", "n"],
        "solver" => &[
            "n_starts",
            "seed",
            "tol",
            "damping",
            "dedupe_radius",
            "eps_deg",
        ],
        "flow" => &["step", "t_end", "init", "amplitude", "seed"],
        "sde" => &[
            "dt",
            "t_warmup",
            "t_end",
            "k_max",
            "seed",
            "record_times",
            "x0",
        ],
        "montecarlo" => &[
            "n_runs",
            "match_radius",
            "localized_mode1",
            "register_fixed_points",
        ],
        "output" => &["directory", "formats"],
        _ => &[],
    }
}

fn kernel_keys(kind: &str) -> &'static [&'static str] {
    match kind {
        "circle_dot" => &["type", "a"],
        "fourier" => &["type", "dim", "coefficients"],
        "heat" => &["type", "dim", "a", "tau", "k_max"],
        "gaussian" => &["type", "beta", "sigma"],
        "trig_sum" => &["type", "terms"],
        "matrix" => &["type", "entries"],
        _ => &["type"],
    }
}

/// Closest candidate within a small edit distance.
fn suggest<'a>(word: &str, candidates: &[&'a str]) -> Option<&'a str> {
    candidates
        .iter()
        .map(|c| (strsim::damerau_levenshtein(word, c), *c))
        .filter(|(d, c)| *d <= 2.max(c.len() / 3))
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c)
}

fn unknown_key(path: &str, key: &str, candidates: &[&str]) -> ConfigError {
    let full = if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    };
    let message = match suggest(key, candidates) {
        Some(s) => format!("unknown key `{key}` (did you mean `{s}`?)"),
        None => format!(
            "unknown key `{key}` (expected one of: {})",
            candidates.join(", ")
        ),
    };
    ConfigError::new(full, message)
}

fn check_keys(path: &str, table: &toml::Table, allowed: &[&str], errors: &mut Vec<ConfigError>) {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            errors.push(unknown_key(path, key, allowed));
        }
    }
}

fn check_array_of_tables(
    path: &str,
    value: Option<&toml::Value>,
    allowed: &[&str],
    errors: &mut Vec<ConfigError>,
) {
    if let Some(toml::Value::Array(items)) = value {
        for (i, item) in items.iter().enumerate() {
            if let toml::Value::Table(t) = item {
                check_keys(&format!("{path}[{i}]"), t, allowed, errors);
            }
        }
    }
}

fn check_unknown_keys(root: &toml::Table, errors: &mut Vec<ConfigError>) {
    check_keys("", root, BLOCKS, errors);
    for (name, value) in root {
        let Some(table) = value.as_table() else {
            if BLOCKS.contains(&name.as_str()) {
                errors.push(ConfigError::new(name.clone(), "expected a table"));
            }
            continue;
        };
        if name == "kernel" {
            match table.get("type").and_then(toml::Value::as_str) {
                Some(kind) if KERNEL_TYPES.contains(&kind) => {
                    check_keys("kernel", table, kernel_keys(kind), errors);
                    check_array_of_tables(
                        "kernel.coefficients",
                        table.get("coefficients"),
                        &["k", "v"],
                        errors,
                    );
                    check_array_of_tables(
                        "kernel.terms",
                        table.get("terms"),
                        &["coef", "basis", "k"],
                        errors,
                    );
                }
                Some(kind) => {
                    let message = match suggest(kind, KERNEL_TYPES) {
                        Some(s) => format!("unknown kernel type `{kind}` (did you mean `{s}`?)"),
                        None => format!(
                            "unknown kernel type `{kind}` (expected one of: {})",
                            KERNEL_TYPES.join(", ")
                        ),
                    };
                    errors.push(ConfigError::new("kernel.type", message));
                }
                None => errors.push(ConfigError::new("kernel.type", "missing kernel type")),
            }
        } else if BLOCKS.contains(&name.as_str()) {
            check_keys(name, table, block_keys(name), errors);
        }
    }
}

fn decode<T: DeserializeOwned>(
    block: &str,
    value: &toml::Value,
    errors: &mut Vec<ConfigError>,
) -> Option<T> {
    match serde_path_to_error::deserialize::<_, T>(value.clone()) {
        Ok(v) => Some(v),
        Err(e) => {
            let inner = e.path().to_string();
            let path = if inner.is_empty() || inner == "." {
                block.to_string()
            } else {
                format!("{block}.{inner}")
            };
            errors.push(ConfigError::new(
                path,
                e.into_inner().message().trim().to_string(),
            ));
            None
        }
    }
}

/// Parses and validates a configuration, reporting every violation found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let root: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        ConfigErrors(vec![ConfigError::new("", e.message().to_string())])
    })?;
    let mut errors = Vec::new();
    check_unknown_keys(&root, &mut errors);
    let mut config = ExperimentConfig {
        kernel: None,
        grid: None,
        solver: None,
        flow: None,
        sde: None,
        montecarlo: None,
        output: None,
    };
    for (name, value) in &root {
        match name.as_str() {
            "kernel" => config.kernel = decode("kernel", value, &mut errors),
            "grid" => config.grid = decode("grid", value, &mut errors),
            "solver" => config.solver = decode("solver", value, &mut errors),
            "flow" => config.flow = decode("flow", value, &mut errors),
            "sde" => config.sde = decode("sde", value, &mut errors),
            "montecarlo" => config.montecarlo = decode("montecarlo", value, &mut errors),
            "output" => config.output = decode("output", value, &mut errors),
            _ => {}
        }
    }
    config.validate_values(&mut errors);
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(errors))
    }
}

fn positive(path: &str, v: f64, errors: &mut Vec<ConfigError>) {
    if !(v > 0.0 && v.is_finite()) {
        errors.push(ConfigError::new(
            path,
            format!("must be positive and finite, got {v}"),
        ));
    }
}

fn finite(path: &str, v: f64, errors: &mut Vec<ConfigError>) {
    if !v.is_finite() {
        errors.push(ConfigError::new(path, format!("must be finite, got {v}")));
    }
}

impl ExperimentConfig {
    fn validate_values(&self, errors: &mut Vec<ConfigError>) {
        if let Some(k) = &self.kernel {
            match k {
                KernelConfig::CircleDot { a } => finite("kernel.a", *a, errors),
                KernelConfig::Fourier { dim, coefficients } => {
                    check_dim("kernel.dim", *dim, errors);
                    for (i, c) in coefficients.iter().enumerate() {
                        if c.k.len() != *dim {
                            errors.push(ConfigError::new(
                                format!("kernel.coefficients[{i}].k"),
                                format!("needs {dim} component(s), got {}", c.k.len()),
                            ));
                        }
                        finite(&format!("kernel.coefficients[{i}].v"), c.v, errors);
                    }
                }
                KernelConfig::Heat { dim, a, tau, k_max } => {
                    check_dim("kernel.dim", *dim, errors);
                    finite("kernel.a", *a, errors);
                    positive("kernel.tau", *tau, errors);
                    if *k_max < 0 {
                        errors.push(ConfigError::new("kernel.k_max", "must be non-negative"));
                    }
                }
                KernelConfig::Gaussian { beta, sigma } => {
                    if !(*beta >= 0.0 && beta.is_finite()) {
                        errors.push(ConfigError::new(
                            "kernel.beta",
                            "must be non-negative and finite",
                        ));
                    }
                    positive("kernel.sigma", *sigma, errors);
                }
                KernelConfig::TrigSum { terms } => {
                    for (i, t) in terms.iter().enumerate() {
                        finite(&format!("kernel.terms[{i}].coef"), t.coef, errors);
                        if t.k.is_empty() || t.k.len() > 2 {
                            errors.push(ConfigError::new(
                                format!("kernel.terms[{i}].k"),
                                "needs 1 or 2 components",
                            ));
                        }
                    }
                }
                KernelConfig::Matrix { entries } => {
                    let n = entries.len();
                    for (i, row) in entries.iter().enumerate() {
                        if row.len() != n {
                            errors.push(ConfigError::new(
                                format!("kernel.entries[{i}]"),
                                format!("row has {} entries, expected {n}", row.len()),
                            ));
                        }
                    }
                }
            }
        }
        if let Some(g) = &self.grid {
            check_dim("grid.dim", g.dim, errors);
            if g.n < 2 {
                errors.push(ConfigError::new("grid.n", "must be at least 2"));
            }
        }
        if let Some(s) = &self.solver {
            if s.n_starts == 0 {
                errors.push(ConfigError::new("solver.n_starts", "must be at least 1"));
            }
            positive("solver.tol", s.tol, errors);
            if !(s.damping > 0.0 && s.damping <= 1.0) {
                errors.push(ConfigError::new("solver.damping", "must lie in (0, 1]"));
            }
            positive("solver.dedupe_radius", s.dedupe_radius, errors);
            positive("solver.eps_deg", s.eps_deg, errors);
        }
        if let Some(f) = &self.flow {
            if !(f.step > 0.0 && f.step <= 1.0) {
                errors.push(ConfigError::new("flow.step", "must lie in (0, 1]"));
            }
            if !(f.t_end >= 0.0 && f.t_end.is_finite()) {
                errors.push(ConfigError::new(
                    "flow.t_end",
                    "must be non-negative and finite",
                ));
            }
            if !(f.amplitude >= 0.0 && f.amplitude.is_finite()) {
                errors.push(ConfigError::new(
                    "flow.amplitude",
                    "must be non-negative and finite",
                ));
            }
        }
        if let Some(s) = &self.sde {
            positive("sde.dt", s.dt, errors);
            positive("sde.t_warmup", s.t_warmup, errors);
            if !(s.t_end > s.t_warmup && s.t_end.is_finite()) {
                errors.push(ConfigError::new(
                    "sde.t_end",
                    "must be finite and exceed t_warmup",
                ));
            }
            if let Some(k) = s.k_max {
                if k < 1 {
                    errors.push(ConfigError::new("sde.k_max", "must be at least 1"));
                }
            }
            if let Some(times) = &s.record_times {
                let mut prev = f64::NEG_INFINITY;
                for (i, &t) in times.iter().enumerate() {
                    if !(t > prev) || t < s.t_warmup || t > s.t_end {
                        errors.push(ConfigError::new(
                            format!("sde.record_times[{i}]"),
                            "times must increase and lie in [t_warmup, t_end]",
                        ));
                    }
                    prev = t;
                }
            }
            if let Some(x0) = &s.x0 {
                if x0.is_empty() || x0.len() > 2 || x0.iter().any(|v| !v.is_finite()) {
                    errors.push(ConfigError::new("sde.x0", "needs 1 or 2 finite components"));
                }
            }
        }
        if let Some(m) = &self.montecarlo {
            if m.n_runs == 0 {
                errors.push(ConfigError::new("montecarlo.n_runs", "must be at least 1"));
            }
            positive("montecarlo.match_radius", m.match_radius, errors);
            positive("montecarlo.localized_mode1", m.localized_mode1, errors);
        }
        if let Some(o) = &self.output {
            if o.formats.is_empty() {
                errors.push(ConfigError::new(
                    "output.formats",
                    "must list at least one format",
                ));
            }
        }
    }

    /// Blocks and cross-block constraints required by `command`.
    pub fn check_command(&self, command: Command) -> Result<(), ConfigErrors> {
        let mut errors = Vec::new();
        let mut require = |present: bool, block: &str| {
            if !present {
                errors.push(ConfigError::new(
                    block,
                    format!("missing block `[{block}]` required by `{}`", command.name()),
                ));
            }
        };
        require(self.kernel.is_some(), "kernel");
        match command {
            Command::KernelInfo | Command::Analyze => require(self.grid.is_some(), "grid"),
            Command::Flow => {
                require(self.grid.is_some(), "grid");
                require(self.flow.is_some(), "flow");
            }
            Command::Simulate => require(self.sde.is_some(), "sde"),
            Command::MonteCarlo => {
                require(self.sde.is_some(), "sde");
                require(self.montecarlo.is_some(), "montecarlo");
                if self
                    .montecarlo
                    .as_ref()
                    .is_some_and(|m| m.register_fixed_points)
                {
                    require(self.grid.is_some(), "grid");
                }
            }
        }
        if let Some(k) = &self.kernel {
            if k.needs_grid() && self.grid.is_none() && !errors.iter().any(|e| e.path == "grid") {
                errors.push(ConfigError::new(
                    "grid",
                    "this kernel type is defined on a grid",
                ));
            }
            if matches!(command, Command::Simulate | Command::MonteCarlo)
                && !k.translation_invariant()
            {
                errors.push(ConfigError::new(
                    "kernel.type",
                    "simulation needs a translation-invariant kernel (circle_dot, fourier or heat)",
                ));
            }
            if let (Some(dim), Some(g)) = (k.dim(), &self.grid) {
                if dim != g.dim {
                    errors.push(ConfigError::new(
                        "grid.dim",
                        format!("kernel is {dim}-dimensional, grid is {}-dimensional", g.dim),
                    ));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errors))
        }
    }

    pub fn grid(&self) -> Result<Option<Grid>, ConfigErrors> {
        self.grid
            .map(|g| Grid::new(g.dim, g.n))
            .transpose()
            .map_err(|e| ConfigErrors(vec![ConfigError::new("grid", e.to_string())]))
    }

    pub fn build_kernel(&self) -> Result<KernelSpec, ConfigErrors> {
        let k = self.kernel.as_ref().ok_or_else(|| {
            ConfigErrors(vec![ConfigError::new("kernel", "missing block `[kernel]`")])
        })?;
        let grid = self.grid()?;
        let on_grid = || {
            grid.ok_or_else(|| {
                ConfigErrors(vec![ConfigError::new(
                    "grid",
                    "this kernel type is defined on a grid",
                )])
            })
        };
        let fail =
            |e: sidlab_core::Error| ConfigErrors(vec![ConfigError::new("kernel", e.to_string())]);
        match k {
            KernelConfig::CircleDot { a } => KernelSpec::circle_dot(*a).map_err(fail),
            KernelConfig::Heat { dim, a, tau, k_max } => {
                KernelSpec::heat(*dim, *a, *tau, *k_max).map_err(fail)
            }
            KernelConfig::Fourier { dim, coefficients } => {
                let mut coeffs: BTreeMap<Wavevector, f64> = BTreeMap::new();
                for (i, c) in coefficients.iter().enumerate() {
                    let k = wavevector(&c.k);
                    for kk in [k, [-k[0], -k[1]]] {
                        if let Some(&old) = coeffs.get(&kk) {
                            if old != c.v {
                                return Err(ConfigErrors(vec![ConfigError::new(
                                    format!("kernel.coefficients[{i}]"),
                                    format!(
                                        "conflicts with an earlier value {old} for the same ±k"
                                    ),
                                )]));
                            }
                        }
                        coeffs.insert(kk, c.v);
                    }
                }
                KernelSpec::translation_invariant(*dim, coeffs).map_err(fail)
            }
            KernelConfig::Gaussian { beta, sigma } => {
                KernelSpec::gaussian_schoenberg(*beta, *sigma, on_grid()?).map_err(fail)
            }
            KernelConfig::TrigSum { terms } => {
                let terms: Vec<TrigTerm> = terms
                    .iter()
                    .map(|t| TrigTerm {
                        coef: t.coef,
                        basis: t.basis,
                        k: wavevector(&t.k),
                    })
                    .collect();
                KernelSpec::trig_sum(on_grid()?, &terms).map_err(fail)
            }
            KernelConfig::Matrix { entries } => {
                let g = on_grid()?;
                let n = entries.len();
                let m = nalgebra::DMatrix::from_fn(n, n, |i, j| entries[i][j]);
                KernelSpec::grid_matrix(g, m).map_err(fail)
            }
        }
    }

    /// The config as TOML, for embedding in artifacts.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn check_dim(path: &str, dim: usize, errors: &mut Vec<ConfigError>) {
    if dim != 1 && dim != 2 {
        errors.push(ConfigError::new(path, format!("must be 1 or 2, got {dim}")));
    }
}

fn wavevector(k: &[i32]) -> Wavevector {
    [
        k.first().copied().unwrap_or(0),
        k.get(1).copied().unwrap_or(0),
    ]
}
