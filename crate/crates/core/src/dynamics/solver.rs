//! Multi-start enumeration of the fixed points of `Π(μ) = ξ(Vμ)λ`, i.e. the
//! zeros of `X` on `B₁⁺`.
//!
//! Every start runs two searches: damped Picard iteration
//! `f ← (1 − α) f + α ξ(Vf)`, which only settles on attracting zeros, and a
//! Levenberg–Marquardt solve of `X(f) = 0` with the exact Jacobian
//! `DX(f) = −(Id + T(ξ(Vf))∘V)`, which also reaches saddles. Start 0 is the
//! uniform density; the others are random smooth densities.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::spectrum::{hessian_spectrum, SpectralReport, Verdict, EPS_DEG};
use super::{field_x, free_energy, gibbs_of_potential};
use crate::error::{invalid, Result};
use crate::geometry::{l2_distance, DensityField, FourierModes, Grid};
use crate::kernel::KernelSpec;
use crate::seed::mix_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub n_starts: usize,
    pub seed: u64,
    /// Picard damping `α ∈ (0, 1]`.
    pub damping: f64,
    /// Convergence threshold on `‖X(f)‖∞`.
    pub tol: f64,
    /// Terminals closer than this in `L²(λ)` are merged.
    pub dedupe_radius: f64,
    pub eps_deg: f64,
    pub max_picard_iters: usize,
    pub max_newton_iters: usize,
    /// Run the Levenberg–Marquardt search besides Picard.
    pub newton: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            n_starts: 32,
            seed: 0,
            damping: 0.5,
            tol: 1e-10,
            dedupe_radius: 1e-4,
            eps_deg: EPS_DEG,
            max_picard_iters: 20_000,
            max_newton_iters: 200,
            newton: true,
        }
    }
}

impl SolverParams {
    fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(invalid("n_starts", "must be at least 1"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(invalid("damping", "must lie in (0, 1]"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        if !(self.dedupe_radius > 0.0) {
            return Err(invalid("dedupe_radius", "must be positive"));
        }
        if !(self.eps_deg > 0.0) {
            return Err(invalid("eps_deg", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointRecord {
    #[serde(skip)]
    pub density: DensityField,
    /// `‖X(f)‖∞`.
    pub residual: f64,
    /// `J(f)`.
    pub energy: f64,
    pub spectral: SpectralReport,
    /// Set for non-uniform fixed points of translation-invariant kernels:
    /// the record stands for its whole orbit of translates.
    pub symmetry_orbit: bool,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Sorted by energy, then by density values.
    pub records: Vec<FixedPointRecord>,
    pub n_starts: usize,
    /// Searches (two per start) that reached the tolerance.
    pub n_converged: usize,
}

/// `Σ (−1)^index` over the records, undefined when any is degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorseSum {
    Defined(i64),
    Undefined,
}

impl Serialize for MorseSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Defined(v) => s.serialize_i64(*v),
            Self::Undefined => s.serialize_str("undefined"),
        }
    }
}

impl std::fmt::Display for MorseSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Defined(v) => write!(f, "{v}"),
            Self::Undefined => write!(f, "undefined"),
        }
    }
}

pub fn morse_sum(records: &[FixedPointRecord]) -> MorseSum {
    if records
        .iter()
        .any(|r| r.spectral.verdict == Verdict::Degenerate)
    {
        return MorseSum::Undefined;
    }
    MorseSum::Defined(
        records
            .iter()
            .map(|r| if r.spectral.index % 2 == 0 { 1 } else { -1 })
            .sum(),
    )
}

struct Candidate {
    density: DensityField,
    residual: f64,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn picard(
    start: &DensityField,
    kernel: &KernelSpec,
    params: &SolverParams,
) -> Result<Option<Candidate>> {
    let grid = *start.grid();
    let alpha = params.damping;
    let mut f = start.clone();
    for _ in 0..params.max_picard_iters {
        let target = gibbs_of_potential(&f, kernel)?;
        let residual = crate::geometry::sup_norm_distance(target.values(), f.values());
        if residual < params.tol {
            return Ok(Some(Candidate {
                density: f,
                residual,
            }));
        }
        let next = f
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
            .collect();
        f = DensityField::normalized(grid, next)?;
    }
    Ok(None)
}

/// `DX(f) = −(I + T(g) V)` with `g = ξ(Vf)`, as an `N × N` matrix acting on
/// node values.
fn x_jacobian(
    f: &DensityField,
    kernel: &KernelSpec,
    v_nodes: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let grid = f.grid();
    let n = grid.len();
    let w = grid.weight();
    let g = gibbs_of_potential(f, kernel)?;
    let g = g.values();
    // (T(g) V)_ij = g_i (wV)_ij − g_i Σ_k w g_k (wV)_kj
    let col_avg: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|k| w * g[k] * w * v_nodes[(k, j)]).sum())
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let tv = g[i] * (w * v_nodes[(i, j)] - col_avg[j]);
        -(if i == j { 1.0 } else { 0.0 }) - tv
    }))
}

fn levenberg_marquardt(
    start: &DensityField,
    kernel: &KernelSpec,
    v_nodes: &DMatrix<f64>,
    params: &SolverParams,
) -> Result<Option<Candidate>> {
    let grid = *start.grid();
    let n = grid.len();
    let last = n - 1;
    let mut f = start.clone();
    let mut r = field_x(&f, kernel)?;
    let mut cost: f64 = r.iter().map(|x| x * x).sum();
    let mut mu = 1e-3;
    for _ in 0..params.max_newton_iters {
        if sup(&r) < params.tol {
            return Ok(Some(Candidate {
                residual: sup(&r),
                density: f,
            }));
        }
        let jac = x_jacobian(&f, kernel, v_nodes)?;
        // columns for the basis e_i − e_{N−1}
        let je = DMatrix::from_fn(n, last, |i, a| jac[(i, a)] - jac[(i, last)]);
        let jt = je.transpose();
        let normal = &jt * &je;
        let grad = &jt * DVector::from_column_slice(&r);
        let mut accepted = false;
        while mu < 1e12 {
            let mut lhs = normal.clone();
            for d in 0..last {
                lhs[(d, d)] += mu * (normal[(d, d)] + 1e-12);
            }
            let Some(step) = lhs.cholesky().map(|c| c.solve(&(-&grad))) else {
                mu *= 4.0;
                continue;
            };
            let mut next: Vec<f64> = f.values().to_vec();
            let mut shift = 0.0;
            for (a, s) in step.iter().enumerate() {
                next[a] += s;
                shift += s;
            }
            next[last] -= shift;
            if next.iter().all(|&x| x > 0.0) {
                if let Ok(candidate) = DensityField::normalized(grid, next) {
                    let r_new = field_x(&candidate, kernel)?;
                    let cost_new: f64 = r_new.iter().map(|x| x * x).sum();
                    if cost_new < cost {
                        f = candidate;
                        r = r_new;
                        cost = cost_new;
                        mu = (mu / 3.0).max(1e-12);
                        accepted = true;
                        break;
                    }
                }
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    let residual = sup(&r);
    Ok((residual < params.tol).then_some(Candidate {
        density: f,
        residual,
    }))
}

/// Distance used to merge terminals: `L²(λ)`, or for translation-invariant
/// kernels the `ℓ²` distance between Fourier moduli, which does not see
/// translations.
struct Fingerprint {
    values: Vec<f64>,
    moduli: Option<Vec<f64>>,
}

impl Fingerprint {
    fn new(f: &DensityField, kernel: &KernelSpec) -> Result<Self> {
        let moduli = match kernel {
            KernelSpec::TranslationInvariant(_) => {
                let modes = FourierModes::of_density(f, f.grid().max_resolved_mode())?;
                Some(modes.values().iter().map(|m| m.norm()).collect())
            }
            KernelSpec::GridMatrix(_) => None,
        };
        Ok(Self {
            values: f.values().to_vec(),
            moduli,
        })
    }

    fn distance(&self, other: &Self, grid: &Grid) -> Result<f64> {
        match (&self.moduli, &other.moduli) {
            (Some(a), Some(b)) => Ok(a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()),
            _ => l2_distance(grid, &self.values, &other.values),
        }
    }

    fn non_uniform(&self) -> bool {
        self.moduli.as_ref().is_some_and(|m| {
            let zero = (m.len() - 1) / 2;
            m.iter().enumerate().any(|(i, v)| i != zero && *v > 1e-8)
        })
    }
}

/// Enumerates fixed points of `Π` from `params.n_starts` starts.
///
/// Starts run in parallel; the result does not depend on scheduling.
pub fn find_fixed_points(
    kernel: &KernelSpec,
    grid: &Grid,
    params: &SolverParams,
) -> Result<Enumeration> {
    params.validate()?;
    let v_nodes = kernel.node_matrix(grid)?;
    let per_start: Vec<Result<Vec<Candidate>>> = (0..params.n_starts)
        .into_par_iter()
        .map(|i| {
            let start = if i == 0 {
                DensityField::uniform(*grid)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(params.seed, i as u64));
                let amplitude = rng.random_range(0.2..4.0);
                DensityField::random_smooth(*grid, amplitude, &mut rng)
            };
            let mut found = Vec::new();
            if let Some(c) = picard(&start, kernel, params)? {
                found.push(c);
            }
            if params.newton {
                if let Some(c) = levenberg_marquardt(&start, kernel, &v_nodes, params)? {
                    found.push(c);
                }
            }
            Ok(found)
        })
        .collect();
    let mut candidates = Vec::new();
    for r in per_start {
        candidates.extend(r?);
    }
    let n_converged = candidates.len();
    // stable: ties keep start order
    candidates.sort_by(|a, b| a.residual.total_cmp(&b.residual));

    let mut kept: Vec<(Candidate, Fingerprint)> = Vec::new();
    for c in candidates {
        let fp = Fingerprint::new(&c.density, kernel)?;
        let mut duplicate = false;
        for (_, other) in &kept {
            if fp.distance(other, grid)? < params.dedupe_radius {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            kept.push((c, fp));
        }
    }

    let mut records = kept
        .into_par_iter()
        .map(|(c, fp)| {
            Ok(FixedPointRecord {
                energy: free_energy(&c.density, kernel)?,
                spectral: hessian_spectrum(&c.density, kernel, params.eps_deg)?,
                symmetry_orbit: fp.non_uniform(),
                residual: c.residual,
                density: c.density,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| {
        a.energy.total_cmp(&b.energy).then_with(|| {
            a.density
                .values()
                .iter()
                .zip(b.density.values())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
    Ok(Enumeration {
        records,
        n_starts: params.n_starts,
        n_converged,
    })
}
