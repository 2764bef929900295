use super::{rng_from_seed, SdeConfig, Simulator};
use crate::dynamics::flow_y;
use crate::error::{invalid, Error, Result};
use crate::geometry::{sup_norm_distance, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowParams {
    /// Anchor on the exponential clock: real time `e^{t_anchor}`.
    pub t_anchor: f64,
    /// Horizon `T` on the exponential clock.
    pub horizon: f64,
    /// Nodes per axis of the evaluation grid.
    pub n_per_axis: usize,
    /// Step of the deterministic `Y` flow.
    pub ds: f64,
}

impl ShadowParams {
    pub fn new(t_anchor: f64, horizon: f64) -> Self {
        Self {
            t_anchor,
            horizon,
            n_per_axis: 64,
            ds: 0.05,
        }
    }
}

/// `sup_{0 ≤ s ≤ T} ‖Vμ_{e^{t+s}} − Φ^Y_s(Vμ_{e^t})‖∞` with the supremum
/// over the `Y`-flow step times and the norm over the grid nodes.
pub fn shadow_error(config: &SdeConfig, params: &ShadowParams) -> Result<f64> {
    let sim = Simulator::new(config)?;
    if !(params.horizon > 0.0) {
        return Err(invalid("horizon", "must be positive"));
    }
    let start = params.t_anchor.exp();
    if !(start >= config.t_warmup) {
        return Err(invalid("t_anchor", "e^t_anchor must be at least t_warmup"));
    }
    let needed = (params.t_anchor + params.horizon).exp();
    if needed > config.t_end {
        return Err(Error::HorizonTooLong {
            needed,
            t_end: config.t_end,
        });
    }
    let grid = Grid::new(config.dim(), params.n_per_axis)?;
    let mut rng = rng_from_seed(config.seed);
    let mut state = sim.init_state(config, &mut rng);
    sim.advance_to(&mut state, config.steps_to(start), &mut rng)?;
    let h0 = config
        .kernel
        .eval_potential_modes(&state.normalized_modes(), &grid)?;
    let trace = flow_y(&h0, &config.kernel, params.ds, params.horizon)?;
    let mut gap = 0.0f64;
    for (s, h) in trace.times.iter().zip(&trace.states).skip(1) {
        sim.advance_to(
            &mut state,
            config.steps_to((params.t_anchor + s).exp()),
            &mut rng,
        )?;
        let v = config
            .kernel
            .eval_potential_modes(&state.normalized_modes(), &grid)?;
        gap = gap.max(sup_norm_distance(v.values(), h.values()));
    }
    Ok(gap)
}
