use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sidlab_core::dynamics::{find_fixed_points, flow_x, morse_sum, FixedPointRecord};
use sidlab_core::sde::{monte_carlo, run, ClassTarget, Thresholds};
use sidlab_core::{DensityField, FourierModes, KernelReport, KernelSpec, SdeConfig, TOOL_VERSION};

use crate::config::{ConfigErrors, ExperimentConfig, FlowInit, Format, SdeBlock};
use crate::Command;

#[derive(Debug)]
pub enum RunError {
    /// Invalid configuration; exit status 1.
    Config(ConfigErrors),
    /// Failure while computing or writing; exit status 2.
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "invalid configuration:\n{e}"),
            Self::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigErrors> for RunError {
    fn from(e: ConfigErrors) -> Self {
        Self::Config(e)
    }
}

impl From<sidlab_core::Error> for RunError {
    fn from(e: sidlab_core::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    /// Result lines for stdout.
    pub summary: Vec<String>,
}

/// Runs `command` and returns its artifacts without touching the disk.
pub fn run_command(
    command: Command,
    config: &ExperimentConfig,
    progress: &mut dyn FnMut(&str),
) -> Result<RunOutput, RunError> {
    config.check_command(command)?;
    let kernel = config.build_kernel()?;
    let mut out = Output::new(config);
    match command {
        Command::KernelInfo => kernel_info(config, &kernel, &mut out)?,
        Command::Analyze => analyze(config, &kernel, &mut out, progress)?,
        Command::Flow => flow(config, &kernel, &mut out, progress)?,
        Command::Simulate => simulate(config, kernel, &mut out, progress)?,
        Command::MonteCarlo => montecarlo(config, kernel, &mut out, progress)?,
    }
    Ok(RunOutput {
        artifacts: out.artifacts,
        summary: out.summary,
    })
}

/// Writes artifacts into `dir`; on failure removes whatever was written.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> io::Result<Vec<PathBuf>> {
    let created_dir = !dir.exists();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for a in artifacts {
        let path = dir.join(&a.name);
        if let Err(e) = fs::write(&path, &a.bytes) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            if created_dir {
                let _ = fs::remove_dir(dir);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(written)
}

struct Output {
    echo: String,
    formats: Vec<Format>,
    artifacts: Vec<Artifact>,
    summary: Vec<String>,
}

impl Output {
    fn new(config: &ExperimentConfig) -> Self {
        Self {
            echo: config.echo(),
            formats: config
                .output
                .as_ref()
                .map_or_else(|| vec![Format::Json, Format::Csv], |o| o.formats.clone()),
            artifacts: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn json(&mut self, name: &str, payload: impl Serialize) {
        if !self.formats.contains(&Format::Json) {
            return;
        }
        let mut doc = json!({
            "tool_version": TOOL_VERSION,
            "config": self.echo,
        });
        let payload = serde_json::to_value(payload).expect("payload serializes");
        match payload {
            Value::Object(map) => doc.as_object_mut().expect("object").extend(map),
            other => {
                doc["data"] = other;
            }
        }
        let mut bytes = serde_json::to_vec_pretty(&doc).expect("json serializes");
        bytes.push(b'\n');
        self.artifacts.push(Artifact {
            name: name.to_string(),
            bytes,
        });
    }

    /// CSV body preceded by `#` lines carrying the version and the config.
    fn csv(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> io::Result<()>,
    ) -> Result<(), RunError> {
        if !self.formats.contains(&Format::Csv) {
            return Ok(());
        }
        let mut bytes = format!("# tool_version: {TOOL_VERSION}\n# config:\n").into_bytes();
        for line in self.echo.lines() {
            bytes.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        write(&mut bytes).map_err(|e| RunError::Runtime(e.to_string()))?;
        self.artifacts.push(Artifact {
            name: name.to_string(),
            bytes,
        });
        Ok(())
    }
}

fn kernel_info(
    config: &ExperimentConfig,
    kernel: &KernelSpec,
    out: &mut Output,
) -> Result<(), RunError> {
    let grid = config.grid()?.expect("checked");
    let report = KernelReport::compute(kernel, &grid)?;
    out.summary.push(format!(
        "rho = {}, is_mercer = {}, diam_sq = {}, diag = {}",
        report.rho, report.is_mercer, report.diam_sq, report.diag
    ));
    let certificate = kernel.convexity_certificate(&grid)?;
    out.json(
        "kernel_report.json",
        json!({ "report": report, "convexity_certificate": certificate }),
    );
    Ok(())
}

#[derive(Serialize)]
struct RecordOut<'a> {
    #[serde(flatten)]
    record: &'a FixedPointRecord,
    density_file: String,
}

fn analyze(
    config: &ExperimentConfig,
    kernel: &KernelSpec,
    out: &mut Output,
    progress: &mut dyn FnMut(&str),
) -> Result<(), RunError> {
    let grid = config.grid()?.expect("checked");
    let params = config.solver.clone().unwrap_or_default().params();
    progress(&format!(
        "enumerating fixed points from {} starts",
        params.n_starts
    ));
    let e = find_fixed_points(kernel, &grid, &params)?;
    let sum = morse_sum(&e.records);
    let records: Vec<RecordOut> = e
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| RecordOut {
            record: r,
            density_file: format!("fixed_point_{i:02}.csv"),
        })
        .collect();
    for r in &records {
        out.csv(&r.density_file, |w| r.record.density.write_csv(w))?;
    }
    out.json(
        "fixed_points.json",
        json!({
            "n_starts": e.n_starts,
            "n_converged": e.n_converged,
            "morse_sum": sum,
            "records": records,
        }),
    );
    for (i, r) in e.records.iter().enumerate() {
        out.summary.push(format!(
            "fixed point {i}: energy {:.10}, index {}, verdict {:?}",
            r.energy, r.spectral.index, r.spectral.verdict
        ));
    }
    out.summary.push(format!("morse_sum = {sum}"));
    Ok(())
}

fn flow(
    config: &ExperimentConfig,
    kernel: &KernelSpec,
    out: &mut Output,
    progress: &mut dyn FnMut(&str),
) -> Result<(), RunError> {
    let grid = config.grid()?.expect("checked");
    let fc = config.flow.as_ref().expect("checked");
    let f0 = match fc.init {
        FlowInit::Uniform => DensityField::uniform(grid),
        FlowInit::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(fc.seed);
            DensityField::random_smooth(grid, fc.amplitude, &mut rng)
        }
    };
    progress(&format!("integrating the flow to t = {}", fc.t_end));
    let trace = flow_x(&f0, kernel, fc.step, fc.t_end)?;
    out.csv("flow_trace.csv", |w| {
        use std::io::Write;
        writeln!(w, "t,energy,residual")?;
        for ((t, e), r) in trace
            .times
            .iter()
            .zip(&trace.energies)
            .zip(&trace.residuals)
        {
            writeln!(w, "{t},{e},{r}")?;
        }
        Ok(())
    })?;
    out.csv("flow_terminal.csv", |w| trace.terminal().write_csv(w))?;
    out.summary.push(format!(
        "terminal energy {}, residual {:e}",
        trace.energies.last().expect("trace starts at t = 0"),
        trace.residuals.last().expect("trace starts at t = 0")
    ));
    Ok(())
}

fn sde_config(block: &SdeBlock, kernel: KernelSpec) -> SdeConfig {
    let mut c = SdeConfig::new(kernel, block.t_end, block.seed);
    c.dt = block.dt;
    c.t_warmup = block.t_warmup;
    if let Some(k) = block.k_max {
        c.k_max = k;
    }
    if let Some(times) = &block.record_times {
        c.record_times = times.clone();
    }
    if let Some(x0) = &block.x0 {
        c.x0 = [x0[0], x0.get(1).copied().unwrap_or(0.0)];
    }
    c
}

fn simulate(
    config: &ExperimentConfig,
    kernel: KernelSpec,
    out: &mut Output,
    progress: &mut dyn FnMut(&str),
) -> Result<(), RunError> {
    let c = sde_config(config.sde.as_ref().expect("checked"), kernel);
    progress(&format!("simulating to t = {} with dt = {}", c.t_end, c.dt));
    let record = run(&c, &[])?;
    out.csv("trajectory.csv", |w| record.write_csv(w))?;
    if let Some(last) = record.snapshots.last() {
        out.summary.push(format!(
            "t = {}: dist_to_lambda = {}, mode1_abs = {}",
            last.t, last.dist_to_lambda, last.mode1_abs
        ));
    }
    Ok(())
}

fn montecarlo(
    config: &ExperimentConfig,
    kernel: KernelSpec,
    out: &mut Output,
    progress: &mut dyn FnMut(&str),
) -> Result<(), RunError> {
    let mc = config.montecarlo.as_ref().expect("checked");
    let c = sde_config(config.sde.as_ref().expect("checked"), kernel.clone());
    let mut targets = Vec::new();
    if mc.register_fixed_points {
        let grid = config.grid()?.expect("checked");
        let params = config.solver.clone().unwrap_or_default().params();
        progress("enumerating fixed points to register as targets");
        for (i, r) in find_fixed_points(&kernel, &grid, &params)?
            .records
            .iter()
            .enumerate()
        {
            let uniform = r.density.values().iter().all(|v| (v - 1.0).abs() < 1e-8);
            if !uniform {
                targets.push(ClassTarget {
                    label: format!("fixed_point_{i:02}"),
                    modes: FourierModes::of_density(&r.density, c.k_max)?,
                });
            }
        }
    }
    let thresholds = Thresholds {
        match_radius: mc.match_radius,
        localized_mode1: mc.localized_mode1,
    };
    progress(&format!(
        "running {} trajectories to t = {}",
        mc.n_runs, c.t_end
    ));
    let report = monte_carlo(&c, mc.n_runs, &targets, &thresholds)?;
    for class in &report.classes {
        out.summary
            .push(format!("{}: {}", class.label, class.fraction));
    }
    out.json("montecarlo.json", &report);
    Ok(())
}
