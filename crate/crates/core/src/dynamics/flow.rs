//! Exponential (variation-of-constants) integrators for `ḟ = X(f)` and
//! `ḣ = Y(h)`.
//!
//! One step of size `s` is `f ← e^{−s} f + (1 − e^{−s}) ξ(Vf)`, a convex
//! combination of two points of `B₁⁺`, so iterates never leave `B₁⁺`. The
//! same recursion with `V` applied on the left gives the `Y` step, which
//! makes the two discrete flows exactly conjugate through `V`.

use serde::Serialize;

use super::{free_energy, gibbs_of_potential, residual};
use crate::error::{invalid, Result};
use crate::geometry::{gibbs, DensityField, PotentialField};
use crate::kernel::KernelSpec;

/// Energies along a discrete `X` trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// `‖X(f)‖∞` at each recorded time.
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub terminal: Option<DensityField>,
}

impl FlowTrace {
    pub fn terminal(&self) -> &DensityField {
        self.terminal.as_ref().expect("trace has a terminal state")
    }
}

/// States of a discrete `Y` trajectory.
#[derive(Debug, Clone)]
pub struct PotentialTrace {
    pub times: Vec<f64>,
    pub states: Vec<PotentialField>,
}

fn step_schedule(step: f64, t_end: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid("step", format!("{step} is not in (0, 1]")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(invalid("t_end", "must be finite and non-negative"));
    }
    let n = (t_end / step - 1e-9).ceil().max(0.0) as usize;
    let mut t = 0.0;
    let mut steps = Vec::with_capacity(n);
    for i in 0..n {
        let s = if i + 1 == n { t_end - t } else { step };
        steps.push(s);
        t += s;
    }
    Ok(steps)
}

/// Integrates `ḟ = X(f)` on `[0, t_end]`, calling `observe(t, f)` at `t = 0`
/// and after every step.
pub fn flow_x_with(
    f0: &DensityField,
    kernel: &KernelSpec,
    step: f64,
    t_end: f64,
    mut observe: impl FnMut(f64, &DensityField) -> Result<()>,
) -> Result<DensityField> {
    let steps = step_schedule(step, t_end)?;
    let grid = *f0.grid();
    let mut f = f0.clone();
    let mut t = 0.0;
    observe(t, &f)?;
    for s in steps {
        let decay = (-s).exp();
        let target = gibbs_of_potential(&f, kernel)?;
        let next: Vec<f64> = f
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| decay * a + (1.0 - decay) * b)
            .collect();
        f = DensityField::normalized(grid, next)?;
        t += s;
        observe(t, &f)?;
    }
    Ok(f)
}

/// Integrates `ḟ = X(f)`, recording `J` and `‖X‖∞` at every step.
pub fn flow_x(f0: &DensityField, kernel: &KernelSpec, step: f64, t_end: f64) -> Result<FlowTrace> {
    let mut trace = FlowTrace {
        times: Vec::new(),
        energies: Vec::new(),
        residuals: Vec::new(),
        terminal: None,
    };
    let terminal = flow_x_with(f0, kernel, step, t_end, |t, f| {
        trace.times.push(t);
        trace.energies.push(free_energy(f, kernel)?);
        trace.residuals.push(residual(f, kernel)?);
        Ok(())
    })?;
    trace.terminal = Some(terminal);
    Ok(trace)
}

/// Integrates `ḣ = Y(h)` with the same step schedule as [`flow_x`].
pub fn flow_y(
    h0: &PotentialField,
    kernel: &KernelSpec,
    step: f64,
    t_end: f64,
) -> Result<PotentialTrace> {
    let steps = step_schedule(step, t_end)?;
    let grid = *h0.grid();
    let mut h = h0.clone();
    let mut t = 0.0;
    let mut trace = PotentialTrace {
        times: vec![t],
        states: vec![h.clone()],
    };
    for s in steps {
        let decay = (-s).exp();
        let target = kernel.eval_potential(&gibbs(&h)?)?;
        let next = h
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| decay * a + (1.0 - decay) * b)
            .collect();
        h = PotentialField::new(grid, next)?;
        t += s;
        trace.times.push(t);
        trace.states.push(h.clone());
    }
    Ok(trace)
}
