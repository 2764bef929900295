//! Euler–Maruyama simulation of
//!
//! ```text
//! dX_t = dB_t − ½ ∇(Vμ_t)(X_t) dt,    μ_t = (1/t) ∫₀ᵗ δ_{X_s} ds
//! ```
//!
//! on the flat torus for a translation-invariant kernel. On `T^d` the frame
//! fields are the coordinate directions, so the Stratonovich correction
//! vanishes and the noise is a standard Brownian increment per axis.
//!
//! The occupation measure is carried as its unnormalized Fourier modes
//! `m_k = ∫₀ᵗ e^{−ik·X_s} ds`, `|k|∞ ≤ k_max`, accumulated with the
//! left-endpoint rule. The first `t_warmup` time units run without drift so
//! that `μ_t` is well defined when the interaction switches on.

mod montecarlo;
mod shadow;

pub use montecarlo::{
    classify, monte_carlo, ClassFraction, ClassTarget, Histogram, MonteCarloReport, RunSummary,
    Thresholds,
};
pub use shadow::{shadow_error, ShadowParams};

use std::f64::consts::TAU;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::geometry::{weak_distance, FourierModes, Wavevector, WeakMetricParams};
use crate::kernel::{FourierKernel, KernelSpec};

/// Relative slack on the drift bound before a step is rejected.
const DRIFT_GUARD: f64 = 1e-9;

/// Generator behind every simulation; seeded from a single `u64`.
pub type SdeRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SdeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdeConfig {
    pub kernel: KernelSpec,
    pub k_max: i32,
    pub dt: f64,
    pub t_warmup: f64,
    pub t_end: f64,
    pub x0: [f64; 2],
    pub seed: u64,
    /// Increasing times in `[t_warmup, t_end]`.
    pub record_times: Vec<f64>,
}

impl SdeConfig {
    /// Defaults `dt = 1e-2`, `t_warmup = 1`, `k_max` = kernel support,
    /// start at the origin, one record at `t_end`.
    pub fn new(kernel: KernelSpec, t_end: f64, seed: u64) -> Self {
        let k_max = kernel.as_fourier().map_or(0, |k| k.support().max(1));
        Self {
            kernel,
            k_max,
            dt: 1e-2,
            t_warmup: 1.0,
            t_end,
            x0: [0.0; 2],
            seed,
            record_times: vec![t_end],
        }
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn validate(&self) -> Result<&FourierKernel> {
        let kernel = self
            .kernel
            .as_fourier()
            .ok_or(Error::NeedsTranslationInvariant)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        if !(self.t_warmup > 0.0) {
            return Err(invalid("t_warmup", "must be positive"));
        }
        if !(self.t_end > self.t_warmup && self.t_end.is_finite()) {
            return Err(invalid("t_end", "must be finite and exceed t_warmup"));
        }
        if self.k_max < kernel.support() {
            return Err(Error::CutoffTooSmall {
                needed: kernel.support(),
                available: self.k_max,
            });
        }
        if self.x0.iter().any(|x| !x.is_finite()) {
            return Err(invalid("x0", "must be finite"));
        }
        let mut prev = f64::NEG_INFINITY;
        for &r in &self.record_times {
            if !(r > prev) || r < self.t_warmup || r > self.t_end {
                return Err(invalid(
                    "record_times",
                    "must increase and lie in [t_warmup, t_end]",
                ));
            }
            prev = r;
        }
        Ok(kernel)
    }

    /// Number of steps needed to reach time `t`.
    pub fn steps_to(&self, t: f64) -> u64 {
        (t / self.dt).round() as u64
    }
}

/// Live state of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationState {
    /// Position in `[0, 2π)^d`.
    pub x: [f64; 2],
    pub t: f64,
    /// Unnormalized modes `m_k`; `m_0 = t`.
    pub modes: FourierModes,
    pub steps: u64,
}

impl OccupationState {
    /// Modes of `μ_t`, i.e. `m_k / t`.
    pub fn normalized_modes(&self) -> FourierModes {
        self.modes.scaled(1.0 / self.t)
    }

    /// `|m_{e_1}| / t` (maximized over unit wavevectors in 2-d).
    pub fn mode1_abs(&self) -> f64 {
        self.modes.first_mode_abs() / self.t
    }
}

/// Step machinery for one configuration.
pub struct Simulator {
    dim: usize,
    k_max: usize,
    dt: f64,
    sqrt_dt: f64,
    /// `(k, v_k)` over the kernel support with `k ≠ 0`.
    drift_terms: Vec<(Wavevector, f64, usize)>,
    /// `(k, index of k, index of −k)` over the half space `k > 0`.
    half_space: Vec<(Wavevector, usize, usize)>,
    zero_index: usize,
    drift_bound: f64,
    template: FourierModes,
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

impl Simulator {
    pub fn new(config: &SdeConfig) -> Result<Self> {
        let kernel = config.validate()?;
        let dim = config.dim();
        let template = FourierModes::zeros(dim, config.k_max)?;
        let drift_terms = kernel
            .coefficients()
            .iter()
            .filter(|(&k, _)| k != [0, 0])
            .map(|(&k, &v)| (k, v, template.index_of(k).expect("cutoff checked")))
            .collect();
        let half_space = template
            .wavevectors()
            .filter(|k| k[0] > 0 || (k[0] == 0 && k[1] > 0))
            .map(|k| {
                (
                    k,
                    template.index_of(k).expect("in range"),
                    template.index_of([-k[0], -k[1]]).expect("in range"),
                )
            })
            .collect();
        Ok(Self {
            dim,
            k_max: config.k_max as usize,
            dt: config.dt,
            sqrt_dt: config.dt.sqrt(),
            drift_terms,
            half_space,
            zero_index: template.index_of([0, 0]).expect("zero mode"),
            drift_bound: 0.5 * kernel.gradient_l1(),
            template,
        })
    }

    pub fn drift_bound(&self) -> f64 {
        self.drift_bound
    }

    /// `e^{−ij x_a}` for `j = 0..=k_max` on each axis.
    fn powers(&self, x: [f64; 2]) -> [Vec<Complex64>; 2] {
        let axis = |xa: f64, used: bool| {
            let mut p = Vec::with_capacity(self.k_max + 1);
            p.push(Complex64::new(1.0, 0.0));
            if used && self.k_max > 0 {
                let (s, c) = xa.sin_cos();
                let base = Complex64::new(c, -s);
                for j in 1..=self.k_max {
                    let next = p[j - 1] * base;
                    p.push(next);
                }
            }
            p
        };
        [axis(x[0], true), axis(x[1], self.dim == 2)]
    }

    fn character(powers: &[Vec<Complex64>; 2], k: Wavevector) -> Complex64 {
        let factor = |p: &Vec<Complex64>, j: i32| {
            if j >= 0 {
                p[j as usize]
            } else {
                p[(-j) as usize].conj()
            }
        };
        factor(&powers[0], k[0]) * factor(&powers[1], k[1])
    }

    fn drift_with(&self, state: &OccupationState, powers: &[Vec<Complex64>; 2]) -> [f64; 2] {
        // b = −(1/2t) Σ_k Re(i k v_k m_k e^{ik·x}) = (1/2t) Σ_k k v_k Im(m_k e^{ik·x})
        let mut b = [0.0; 2];
        let m = state.modes.values();
        for &(k, v, idx) in &self.drift_terms {
            let e = Self::character(powers, k).conj();
            let im = (m[idx] * e).im * v;
            b[0] += k[0] as f64 * im;
            b[1] += k[1] as f64 * im;
        }
        let scale = 0.5 / state.t;
        [b[0] * scale, b[1] * scale]
    }

    /// `−½ ∇(Vμ_t)(x)` at the current position.
    pub fn drift(&self, state: &OccupationState) -> [f64; 2] {
        self.drift_with(state, &self.powers(state.x))
    }

    fn advance(
        &self,
        state: &mut OccupationState,
        rng: &mut SdeRng,
        with_drift: bool,
    ) -> Result<()> {
        let mut dw = [0.0; 2];
        for d in dw.iter_mut().take(self.dim) {
            let xi: f64 = StandardNormal.sample(rng);
            *d = self.sqrt_dt * xi;
        }
        self.advance_with(state, dw, with_drift)
    }

    fn advance_with(
        &self,
        state: &mut OccupationState,
        dw: [f64; 2],
        with_drift: bool,
    ) -> Result<()> {
        let x_old = state.x;
        let powers = self.powers(x_old);
        let b = if with_drift {
            self.drift_with(state, &powers)
        } else {
            [0.0; 2]
        };
        if with_drift {
            let norm = b[0].hypot(b[1]);
            if norm > self.drift_bound * (1.0 + DRIFT_GUARD) {
                return Err(Error::DriftBound {
                    drift: norm,
                    bound: self.drift_bound,
                });
            }
        }
        for a in 0..self.dim {
            state.x[a] = wrap(x_old[a] + b[a] * self.dt + dw[a]);
        }
        let m = state.modes.values_mut();
        for &(k, idx, mirror) in &self.half_space {
            let inc = Self::character(&powers, k) * self.dt;
            m[idx] += inc;
            m[mirror] += inc.conj();
        }
        m[self.zero_index].re += self.dt;
        state.t += self.dt;
        state.steps += 1;
        if cfg!(debug_assertions) && state.steps.is_multiple_of(1000) {
            debug_assert_eq!(state.modes.values()[self.zero_index].re, state.t);
            for &(_, idx, mirror) in &self.half_space {
                let m = state.modes.values();
                debug_assert_eq!(m[idx], m[mirror].conj());
            }
        }
        Ok(())
    }

    /// Zero-drift Brownian warm-up on `[0, t_warmup]`.
    pub fn init_state(&self, config: &SdeConfig, rng: &mut SdeRng) -> OccupationState {
        let mut state = self.initial_state(config.x0);
        for _ in 0..config.steps_to(config.t_warmup) {
            self.advance(&mut state, rng, false)
                .expect("drift-free step");
        }
        state
    }

    /// One Euler–Maruyama step with the self-interaction drift.
    pub fn step(&self, state: &mut OccupationState, rng: &mut SdeRng) -> Result<()> {
        self.advance(state, rng, true)
    }

    /// Interacting step driven by a given Brownian increment `dw`.
    pub fn step_with_increment(&self, state: &mut OccupationState, dw: [f64; 2]) -> Result<()> {
        self.advance_with(state, dw, true)
    }

    /// Drift-free step driven by a given Brownian increment `dw`.
    pub fn brownian_step(&self, state: &mut OccupationState, dw: [f64; 2]) {
        self.advance_with(state, dw, false)
            .expect("drift-free step");
    }

    /// Empty state at `x0` with `t = 0`, before any warm-up.
    pub fn initial_state(&self, x0: [f64; 2]) -> OccupationState {
        OccupationState {
            x: [wrap(x0[0]), if self.dim == 2 { wrap(x0[1]) } else { 0.0 }],
            t: 0.0,
            modes: self.template.clone(),
            steps: 0,
        }
    }

    /// Steps until `state.steps == target`.
    pub fn advance_to(
        &self,
        state: &mut OccupationState,
        target: u64,
        rng: &mut SdeRng,
    ) -> Result<()> {
        while state.steps < target {
            self.step(state, rng)?;
        }
        Ok(())
    }
}

/// Warm-up state for `config` drawn from `rng`.
pub fn init_state(config: &SdeConfig, rng: &mut SdeRng) -> Result<OccupationState> {
    Ok(Simulator::new(config)?.init_state(config, rng))
}

/// One interacting step.
pub fn step(state: &mut OccupationState, config: &SdeConfig, rng: &mut SdeRng) -> Result<()> {
    Simulator::new(config)?.step(state, rng)
}

/// Simulates to `t_end` and returns the terminal state.
pub fn simulate_terminal(config: &SdeConfig) -> Result<OccupationState> {
    let sim = Simulator::new(config)?;
    let mut rng = rng_from_seed(config.seed);
    let mut state = sim.init_state(config, &mut rng);
    sim.advance_to(&mut state, config.steps_to(config.t_end), &mut rng)?;
    Ok(state)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x: [f64; 2],
    /// `m_k / t`.
    pub modes: FourierModes,
    pub dist_to_lambda: f64,
    /// Weak distance to each registered target, in target order.
    pub target_distances: Vec<f64>,
    pub mode1_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub config: SdeConfig,
    pub target_labels: Vec<String>,
    pub snapshots: Vec<Snapshot>,
}

impl TrajectoryRecord {
    /// CSV: `t, x[, y], re_m_k, im_m_k (every retained k), dist_to_lambda,
    /// mode1_abs`, then one `dist_<label>` column per registered target.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let dim = self.config.dim();
        let template = FourierModes::zeros(dim, self.config.k_max).expect("validated");
        let label = |k: Wavevector| match dim {
            1 => format!("{}", k[0]),
            _ => format!("{}_{}", k[0], k[1]),
        };
        let mut header = vec!["t".to_string(), "x".to_string()];
        if dim == 2 {
            header.push("y".into());
        }
        for k in template.wavevectors() {
            header.push(format!("re_m_{}", label(k)));
            header.push(format!("im_m_{}", label(k)));
        }
        header.push("dist_to_lambda".into());
        header.push("mode1_abs".into());
        for l in &self.target_labels {
            header.push(format!("dist_{l}"));
        }
        writeln!(w, "{}", header.join(","))?;
        for s in &self.snapshots {
            let mut row = vec![s.t.to_string(), s.x[0].to_string()];
            if dim == 2 {
                row.push(s.x[1].to_string());
            }
            for m in s.modes.values() {
                row.push(m.re.to_string());
                row.push(m.im.to_string());
            }
            row.push(s.dist_to_lambda.to_string());
            row.push(s.mode1_abs.to_string());
            row.extend(s.target_distances.iter().map(|d| d.to_string()));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Runs `config` from the warm-up to `t_end`, snapshotting at
/// `record_times`. Weak distances use the geometric weights at `k_max`.
pub fn run(config: &SdeConfig, targets: &[ClassTarget]) -> Result<TrajectoryRecord> {
    let sim = Simulator::new(config)?;
    let metric = WeakMetricParams::geometric(config.dim(), config.k_max)?;
    let lambda = FourierModes::uniform(config.dim(), config.k_max)?;
    let mut rng = rng_from_seed(config.seed);
    let mut state = sim.init_state(config, &mut rng);
    let mut snapshots = Vec::with_capacity(config.record_times.len());
    for &r in &config.record_times {
        sim.advance_to(&mut state, config.steps_to(r), &mut rng)?;
        let modes = state.normalized_modes();
        let target_distances = targets
            .iter()
            .map(|t| weak_distance(&modes, &t.modes, &metric))
            .collect::<Result<Vec<_>>>()?;
        snapshots.push(Snapshot {
            t: state.t,
            x: state.x,
            dist_to_lambda: weak_distance(&modes, &lambda, &metric)?,
            mode1_abs: state.mode1_abs(),
            modes,
            target_distances,
        });
    }
    Ok(TrajectoryRecord {
        config: config.clone(),
        target_labels: targets.iter().map(|t| t.label.clone()).collect(),
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kernel: KernelSpec, t_end: f64, seed: u64) -> SdeConfig {
        SdeConfig {
            k_max: 2,
            ..SdeConfig::new(kernel, t_end, seed)
        }
    }

    #[test]
    fn warmup_invariants_and_determinism() {
        let c = config(KernelSpec::circle_dot(-1.0).unwrap(), 10.0, 9);
        let a = init_state(&c, &mut rng_from_seed(c.seed)).unwrap();
        let b = init_state(&c, &mut rng_from_seed(c.seed)).unwrap();
        assert_eq!(a, b);
        assert!((a.t - c.t_warmup).abs() < 1e-12);
        let m0 = a.modes.get([0, 0]).unwrap();
        assert_eq!(m0.re, a.t);
        assert_eq!(m0.im, 0.0);
        for k in 1..=2 {
            assert_eq!(
                a.modes.get([k, 0]).unwrap(),
                a.modes.get([-k, 0]).unwrap().conj()
            );
        }
    }

    #[test]
    fn invariants_hold_along_a_run() {
        let c = config(KernelSpec::circle_dot(-4.0).unwrap(), 50.0, 3);
        let sim = Simulator::new(&c).unwrap();
        let mut rng = rng_from_seed(c.seed);
        let mut s = sim.init_state(&c, &mut rng);
        for _ in 0..4000 {
            sim.step(&mut s, &mut rng).unwrap();
            assert_eq!(s.modes.get([0, 0]).unwrap().re, s.t);
            assert!(s
                .modes
                .values()
                .iter()
                .all(|m| m.norm() <= s.t * (1.0 + 1e-12)));
            assert!(s.x[0] >= 0.0 && s.x[0] < TAU);
            let b = sim.drift(&s);
            assert!(b[0].abs() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn zero_kernel_has_zero_drift() {
        let c = config(KernelSpec::zero(1).unwrap(), 5.0, 1);
        let sim = Simulator::new(&c).unwrap();
        let mut rng = rng_from_seed(1);
        let mut s = sim.init_state(&c, &mut rng);
        for _ in 0..100 {
            assert_eq!(sim.drift(&s), [0.0, 0.0]);
            sim.step(&mut s, &mut rng).unwrap();
        }
    }

    #[test]
    fn drift_against_point_mass() {
        // μ = δ_θ gives m_{±1} = t e^{∓iθ}; drift (a/2) sin(x − θ)
        let a = -3.0;
        let theta = 1.1;
        let c = config(KernelSpec::circle_dot(a).unwrap(), 5.0, 1);
        let sim = Simulator::new(&c).unwrap();
        let t = 2.5;
        let mut modes = FourierModes::dirac(1, 2, [theta, 0.0]).unwrap().scaled(t);
        modes.values_mut()[2].im = 0.0;
        for x in [0.0, 0.4, 2.0, 5.5] {
            let s = OccupationState {
                x: [x, 0.0],
                t,
                modes: modes.clone(),
                steps: 0,
            };
            let b = sim.drift(&s);
            assert!((b[0] - a / 2.0 * (x - theta).sin()).abs() < 1e-14);
            assert!(b[0].abs() <= a.abs() / 2.0);
        }
    }

    #[test]
    fn drift_matches_history_quadrature() {
        let kernel = KernelSpec::translation_invariant(
            1,
            [
                ([1, 0], -1.5),
                ([-1, 0], -1.5),
                ([2, 0], 0.7),
                ([-2, 0], 0.7),
            ],
        )
        .unwrap();
        let fk = kernel.as_fourier().unwrap().clone();
        let c = SdeConfig {
            t_warmup: 0.5,
            ..config(kernel, 20.0, 17)
        };
        let sim = Simulator::new(&c).unwrap();
        let mut rng = rng_from_seed(c.seed);
        // replay the warm-up with the history recorded
        let mut s = OccupationState {
            x: c.x0,
            t: 0.0,
            modes: FourierModes::zeros(1, 2).unwrap(),
            steps: 0,
        };
        let mut history = Vec::new();
        for _ in 0..c.steps_to(c.t_warmup) {
            history.push(s.x[0]);
            sim.advance(&mut s, &mut rng, false).unwrap();
        }
        for _ in 0..900 {
            history.push(s.x[0]);
            sim.step(&mut s, &mut rng).unwrap();
        }
        // −½ ∂_x ∫ v(x − y) μ_t(dy) with μ_t the left-endpoint average
        let x = s.x[0];
        let direct: f64 = history
            .iter()
            .map(|&y| -0.5 * fk.gradient([x - y, 0.0])[0] * c.dt)
            .sum::<f64>()
            / s.t;
        let b = sim.drift(&s)[0];
        assert!(
            (b - direct).abs() <= 1e-10 * direct.abs().max(1e-3),
            "{b} vs {direct}"
        );
    }

    #[test]
    fn zero_kernel_reduces_to_wrapped_brownian_motion() {
        let c = config(KernelSpec::zero(1).unwrap(), 30.0, 77);
        let sim = Simulator::new(&c).unwrap();
        let mut rng = rng_from_seed(c.seed);
        let mut s = sim.init_state(&c, &mut rng);
        let mut reference_rng = rng_from_seed(c.seed);
        let mut x = 0.0f64;
        for _ in 0..c.steps_to(c.t_warmup) {
            let xi: f64 = StandardNormal.sample(&mut reference_rng);
            x = wrap(x + c.dt.sqrt() * xi);
        }
        assert_eq!(x.to_bits(), s.x[0].to_bits());
        for _ in 0..2000 {
            sim.step(&mut s, &mut rng).unwrap();
            let xi: f64 = StandardNormal.sample(&mut reference_rng);
            x = wrap(x + c.dt.sqrt() * xi);
            assert_eq!(x.to_bits(), s.x[0].to_bits());
        }
    }

    #[test]
    fn corrupt_modes_trip_the_drift_guard() {
        let c = config(KernelSpec::circle_dot(-4.0).unwrap(), 5.0, 1);
        let sim = Simulator::new(&c).unwrap();
        let mut rng = rng_from_seed(1);
        let mut s = sim.init_state(&c, &mut rng);
        let i = s.modes.index_of([1, 0]).unwrap();
        let j = s.modes.index_of([-1, 0]).unwrap();
        s.modes.values_mut()[i] = Complex64::new(0.0, 50.0);
        s.modes.values_mut()[j] = Complex64::new(0.0, -50.0);
        s.x = [0.0, 0.0];
        assert!(matches!(
            sim.step(&mut s, &mut rng),
            Err(Error::DriftBound { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let mut c = config(KernelSpec::circle_dot(1.0).unwrap(), 5.0, 1);
        c.dt = 0.0;
        assert!(c.validate().is_err());
        let mut c = config(KernelSpec::heat(1, 1.0, 0.1, 4).unwrap(), 5.0, 1);
        c.k_max = 2;
        assert!(matches!(c.validate(), Err(Error::CutoffTooSmall { .. })));
        let mut c = config(KernelSpec::circle_dot(1.0).unwrap(), 5.0, 1);
        c.record_times = vec![3.0, 2.0];
        assert!(c.validate().is_err());
        let g = crate::geometry::Grid::new(1, 8).unwrap();
        let c = config(
            KernelSpec::gaussian_schoenberg(1.0, 1.0, g).unwrap(),
            5.0,
            1,
        );
        assert!(matches!(
            c.validate(),
            Err(Error::NeedsTranslationInvariant)
        ));
    }

    #[test]
    fn run_snapshots_and_csv() {
        let mut c = config(KernelSpec::circle_dot(-1.0).unwrap(), 20.0, 5);
        c.record_times = vec![2.0, 10.0, 20.0];
        let rec = run(&c, &[]).unwrap();
        assert_eq!(rec.snapshots.len(), 3);
        for (s, r) in rec.snapshots.iter().zip(&c.record_times) {
            assert!((s.t - r).abs() < 1e-9);
            assert!((s.modes.get([0, 0]).unwrap().re - 1.0).abs() < 1e-15);
        }
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("t,x,re_m_-2,im_m_-2,"));
        assert!(header.ends_with("dist_to_lambda,mode1_abs"));
        assert_eq!(text.lines().count(), 4);
        assert_eq!(run(&c, &[]).unwrap(), rec);
    }

    #[test]
    fn two_dimensional_run() {
        let kernel = KernelSpec::heat(2, -1.0, 0.5, 1).unwrap();
        let mut c = SdeConfig::new(kernel, 20.0, 2);
        c.x0 = [1.0, 2.0];
        let rec = run(&c, &[]).unwrap();
        let s = &rec.snapshots[0];
        assert!(s.x.iter().all(|x| (0.0..TAU).contains(x)));
        assert_eq!(
            s.modes.get([1, -1]).unwrap(),
            s.modes.get([-1, 1]).unwrap().conj()
        );
    }
}
