//! Symmetric interaction potentials `V(x, y)` on the torus.
//!
//! A kernel is either translation invariant, `V(x, y) = v(x − y)` with a
//! finitely supported, real and even coefficient sequence `v_k`, or an
//! explicit symmetric matrix of node values on a fixed grid.
//!
//! Spectral quantities of a grid-matrix kernel are those of the λ-weighted
//! integral operator `(Vf)(x_i) = Σ_j V_ij f_j w`. With uniform weights its
//! symmetrization `√w V √w` is simply `w V`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{
    phase, sup_norm, DensityField, FourierModes, Grid, PotentialField, Wavevector,
};

/// Default Mercer tolerance, relative to the largest eigenvalue magnitude.
pub const MERCER_TOL: f64 = 1e-10;

/// Heat-kernel coefficients below this magnitude are dropped.
pub const HEAT_TRUNCATION: f64 = 1e-14;

const SYMMETRY_TOL: f64 = 1e-12;

/// Translation-invariant kernel `v(x − y) = Σ_k v_k e^{ik·(x−y)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierKernel {
    dim: usize,
    coeffs: BTreeMap<Wavevector, f64>,
}

impl FourierKernel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero coefficients, keyed by wavevector.
    pub fn coefficients(&self) -> &BTreeMap<Wavevector, f64> {
        &self.coeffs
    }

    pub fn coefficient(&self, k: Wavevector) -> f64 {
        self.coeffs.get(&k).copied().unwrap_or(0.0)
    }

    /// Largest `|k|∞` with a nonzero coefficient.
    pub fn support(&self) -> i32 {
        self.coeffs.keys().map(|&k| sup_norm(k)).max().unwrap_or(0)
    }

    /// `v(z)`.
    pub fn value(&self, z: [f64; 2]) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, v)| v * phase(k, z).cos())
            .sum()
    }

    /// `∇v(z)`.
    pub fn gradient(&self, z: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (&k, v) in &self.coeffs {
            let s = v * phase(k, z).sin();
            g[0] -= s * k[0] as f64;
            g[1] -= s * k[1] as f64;
        }
        g
    }

    /// `Σ_k |k|₂ |v_k|`, a bound on `sup |∇v|`.
    pub fn gradient_l1(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, v)| {
                let kk = (k[0] as f64).hypot(k[1] as f64);
                kk * v.abs()
            })
            .sum()
    }

    /// `Σ_{k≠0} min(v_k, 0)`.
    pub fn negative_mass(&self) -> f64 {
        self.coeffs
            .iter()
            .filter(|(&k, _)| k != [0, 0])
            .map(|(_, &v)| v.min(0.0))
            .sum()
    }

    fn filtered(&self, keep: impl Fn(Wavevector, f64) -> Option<f64>) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(&k, &v)| keep(k, v).map(|w| (k, w)))
            .filter(|(_, w)| *w != 0.0)
            .collect();
        Self {
            dim: self.dim,
            coeffs,
        }
    }
}

/// Symmetric matrix of node values `V(x_i, x_j)` on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixKernel {
    grid: Grid,
    entries: DMatrix<f64>,
}

impl MatrixKernel {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Basis function of a [`TrigTerm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigBasis {
    Cos,
    Sin,
}

/// One separable term `c · φ(k·x) φ(k·y)` with `φ ∈ {cos, sin}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub coef: f64,
    pub basis: TrigBasis,
    pub k: Wavevector,
}

impl TrigTerm {
    fn eval(&self, x: [f64; 2]) -> f64 {
        let p = phase(self.k, x);
        match self.basis {
            TrigBasis::Cos => p.cos(),
            TrigBasis::Sin => p.sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    TranslationInvariant(FourierKernel),
    GridMatrix(MatrixKernel),
}

impl KernelSpec {
    /// Translation-invariant kernel from its Fourier coefficients.
    ///
    /// Coefficients must be finite and even (`v_{−k} = v_k`); a wavevector
    /// listed without its mirror counts as odd.
    pub fn translation_invariant(
        dim: usize,
        coeffs: impl IntoIterator<Item = (Wavevector, f64)>,
    ) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(invalid("dim", format!("{dim} is not 1 or 2")));
        }
        let mut map = BTreeMap::new();
        for (k, v) in coeffs {
            if !v.is_finite() || (dim == 1 && k[1] != 0) {
                return Err(Error::InvalidCoefficient { k });
            }
            *map.entry(k).or_insert(0.0) += v;
        }
        for (&k, &v) in &map {
            let mirror = map.get(&[-k[0], -k[1]]).copied().unwrap_or(0.0);
            if (v - mirror).abs() > SYMMETRY_TOL * v.abs().max(mirror.abs()).max(1.0) {
                return Err(Error::OddCoefficients { k });
            }
        }
        let coeffs = map
            .iter()
            .map(|(&k, &v)| {
                let mirror = map[&[-k[0], -k[1]]];
                (k, 0.5 * (v + mirror))
            })
            .filter(|(_, v)| *v != 0.0)
            .collect();
        Ok(Self::TranslationInvariant(FourierKernel { dim, coeffs }))
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::translation_invariant(dim, [])
    }

    /// Truncated heat kernel of `e^{τΔ}` scaled by `a`: `v_k = a e^{−|k|²τ}`
    /// for `|k|∞ ≤ k_max`, dropping terms below [`HEAT_TRUNCATION`].
    pub fn heat(dim: usize, a: f64, tau: f64, k_max: i32) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid("tau", "must be positive"));
        }
        if !a.is_finite() {
            return Err(invalid("a", "must be finite"));
        }
        if k_max < 0 {
            return Err(invalid("k_max", "must be non-negative"));
        }
        let range: Vec<i32> = (-k_max..=k_max).collect();
        let ks: Vec<Wavevector> = match dim {
            1 => range.iter().map(|&k| [k, 0]).collect(),
            _ => range
                .iter()
                .flat_map(|&a| range.iter().map(move |&b| [a, b]))
                .collect(),
        };
        let coeffs = ks.into_iter().filter_map(|k| {
            let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
            let v = a * (-k2 * tau).exp();
            (v.abs() >= HEAT_TRUNCATION).then_some((k, v))
        });
        Self::translation_invariant(dim, coeffs)
    }

    /// `a ⟨x, y⟩` for the unit circle embedded in the plane, i.e.
    /// `a cos(x − y)` on `T¹`.
    pub fn circle_dot(a: f64) -> Result<Self> {
        Self::translation_invariant(1, [([1, 0], a / 2.0), ([-1, 0], a / 2.0)])
    }

    /// `β exp(−‖x − y‖²/σ²)` with `‖·‖` the chordal distance of the torus
    /// embedded as a product of unit circles.
    pub fn gaussian_schoenberg(beta: f64, sigma: f64, grid: Grid) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid("beta", "must be positive"));
        }
        if sigma == 0.0 || !sigma.is_finite() {
            return Err(invalid("sigma", "must be finite and nonzero"));
        }
        let s2 = sigma * sigma;
        let n = grid.len();
        let entries = DMatrix::from_fn(n, n, |i, j| {
            let (x, y) = (grid.point(i), grid.point(j));
            let chord2: f64 = (0..grid.dim())
                .map(|a| 2.0 - 2.0 * (x[a] - y[a]).cos())
                .sum();
            beta * (-chord2 / s2).exp()
        });
        Self::grid_matrix(grid, entries)
    }

    /// Kernel given by its node values. The matrix must be symmetric.
    pub fn grid_matrix(grid: Grid, entries: DMatrix<f64>) -> Result<Self> {
        let n = grid.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::GridMismatch {
                expected: n,
                found: entries.nrows(),
            });
        }
        let scale = entries.amax().max(1.0);
        for i in 0..n {
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { node: i });
                }
                if j > i && (v - entries[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::AsymmetricMatrix { i, j });
                }
            }
        }
        let entries = (&entries + entries.transpose()) * 0.5;
        Ok(Self::GridMatrix(MatrixKernel { grid, entries }))
    }

    /// `Σ_terms c φ(k·x) φ(k·y)` as a grid matrix.
    pub fn trig_sum(grid: Grid, terms: &[TrigTerm]) -> Result<Self> {
        let n = grid.len();
        let columns: Vec<Vec<f64>> = terms
            .iter()
            .map(|t| grid.points().map(|x| t.eval(x)).collect())
            .collect();
        let mut entries = DMatrix::zeros(n, n);
        for (t, phi) in terms.iter().zip(&columns) {
            for i in 0..n {
                for j in 0..n {
                    entries[(i, j)] += t.coef * phi[i] * phi[j];
                }
            }
        }
        Self::grid_matrix(grid, entries)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::TranslationInvariant(k) => k.dim,
            Self::GridMatrix(m) => m.grid.dim(),
        }
    }

    pub fn as_fourier(&self) -> Option<&FourierKernel> {
        match self {
            Self::TranslationInvariant(k) => Some(k),
            Self::GridMatrix(_) => None,
        }
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        match self {
            Self::TranslationInvariant(k) if k.dim != grid.dim() => {
                Err(invalid("grid", "kernel and grid differ in dimension"))
            }
            Self::GridMatrix(m) if m.grid != *grid => Err(Error::GridMismatch {
                expected: m.grid.len(),
                found: grid.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Node values `V(x_i, x_j)` on `grid`.
    pub fn node_matrix(&self, grid: &Grid) -> Result<DMatrix<f64>> {
        self.check_grid(grid)?;
        match self {
            Self::GridMatrix(m) => Ok(m.entries.clone()),
            Self::TranslationInvariant(k) => {
                let n = grid.n_per_axis();
                // v at every displacement node
                let table: Vec<f64> = grid.points().map(|z| k.value(z)).collect();
                let len = grid.len();
                Ok(DMatrix::from_fn(len, len, |i, j| {
                    let idx = match grid.dim() {
                        1 => (i + n - j) % n,
                        _ => {
                            let (ai, bi) = (i / n, i % n);
                            let (aj, bj) = (j / n, j % n);
                            ((ai + n - aj) % n) * n + (bi + n - bj) % n
                        }
                    };
                    table[idx]
                }))
            }
        }
    }

    /// `(Vf)(x_i) = ∫ V(x_i, y) f(y) λ(dy)` for an arbitrary grid function.
    pub fn apply(&self, grid: &Grid, f: &[f64]) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        grid.check(f)?;
        let w = grid.weight();
        match self {
            Self::GridMatrix(m) => {
                let n = grid.len();
                Ok((0..n)
                    .map(|i| {
                        m.entries
                            .row(i)
                            .iter()
                            .zip(f)
                            .map(|(a, b)| a * b)
                            .sum::<f64>()
                            * w
                    })
                    .collect())
            }
            Self::TranslationInvariant(k) => {
                let points: Vec<[f64; 2]> = grid.points().collect();
                let mut out = vec![0.0; grid.len()];
                for (&kv, &v) in &k.coeffs {
                    let mut m = Complex64::new(0.0, 0.0);
                    for (x, fv) in points.iter().zip(f) {
                        m += Complex64::from_polar(*fv, -phase(kv, *x));
                    }
                    m *= w * v;
                    for (o, x) in out.iter_mut().zip(&points) {
                        let p = phase(kv, *x);
                        *o += m.re * p.cos() - m.im * p.sin();
                    }
                }
                Ok(out)
            }
        }
    }

    /// `Vμ` on the grid for `μ = f λ`.
    pub fn eval_potential(&self, mu: &DensityField) -> Result<PotentialField> {
        let values = self.apply(mu.grid(), mu.values())?;
        PotentialField::new(*mu.grid(), values)
    }

    /// `Vμ` on the grid for a measure given by its Fourier modes.
    pub fn eval_potential_modes(
        &self,
        modes: &FourierModes,
        grid: &Grid,
    ) -> Result<PotentialField> {
        let k = self.as_fourier().ok_or(Error::NeedsTranslationInvariant)?;
        self.check_grid(grid)?;
        check_modes(k, modes)?;
        let values = grid
            .points()
            .map(|x| potential_from_modes(k, modes, x))
            .collect();
        PotentialField::new(*grid, values)
    }

    /// Eigenvalues (ascending) of the λ-weighted operator on `grid`.
    pub fn operator_eigenvalues(&self, grid: &Grid) -> Result<Vec<f64>> {
        let s = self.node_matrix(grid)? * grid.weight();
        let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// `ρ(V)`: infimum of `⟨Vu, u⟩_λ` over unit `u` with zero mean.
    pub fn rho(&self, grid: &Grid) -> Result<f64> {
        self.check_grid(grid)?;
        match self {
            Self::TranslationInvariant(k) => {
                let nonconstant = k.coeffs.keys().filter(|&&kv| kv != [0, 0]).count();
                let mut rho = k
                    .coeffs
                    .iter()
                    .filter(|(&kv, _)| kv != [0, 0])
                    .map(|(_, &v)| v)
                    .fold(f64::INFINITY, f64::min);
                // modes outside the support carry a zero coefficient
                if nonconstant < grid.len() - 1 {
                    rho = rho.min(0.0);
                }
                Ok(rho)
            }
            Self::GridMatrix(_) => self.rho_dense(grid),
        }
    }

    /// `ρ(V)` from a dense eigendecomposition of the projected operator,
    /// for any kernel variant.
    pub fn rho_dense(&self, grid: &Grid) -> Result<f64> {
        let n = grid.len();
        let s = self.node_matrix(grid)? * grid.weight();
        let p = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
        let projected = &p * s * &p;
        // lift the constant direction above the rest of the spectrum
        let lift = 1.0 + projected.norm();
        let shifted = projected + DMatrix::from_element(n, n, lift / n as f64);
        let eig = SymmetricEigen::new(shifted);
        Ok(eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min))
    }

    /// Whether every eigenvalue of the λ-weighted operator is at least
    /// `−tol · max|eigenvalue|`.
    pub fn is_mercer(&self, grid: &Grid, tol: f64) -> Result<bool> {
        self.check_grid(grid)?;
        let spectrum: Vec<f64> = match self {
            Self::TranslationInvariant(k) => k.coeffs.values().copied().collect(),
            Self::GridMatrix(_) => self.operator_eigenvalues(grid)?,
        };
        Ok(is_nonnegative(&spectrum, tol))
    }

    /// Spectral splitting `V = V₊ − V₋` into Mercer kernels with orthogonal
    /// ranges.
    pub fn mercer_split(&self, grid: &Grid) -> Result<MercerSplit> {
        self.check_grid(grid)?;
        match self {
            Self::TranslationInvariant(k) => Ok(MercerSplit {
                plus: Self::TranslationInvariant(k.filtered(|_, v| (v > 0.0).then_some(v))),
                minus: Self::TranslationInvariant(k.filtered(|_, v| (v < 0.0).then_some(-v))),
            }),
            Self::GridMatrix(m) => {
                let (plus, minus) = split_symmetric(&m.entries, grid.weight());
                Ok(MercerSplit {
                    plus: Self::grid_matrix(*grid, plus)?,
                    minus: Self::grid_matrix(*grid, minus)?,
                })
            }
        }
    }

    /// The kernel with its interaction with constants removed,
    /// `PVP` with `P = I − ⟨·, 1⟩_λ`. Differs from `V` by terms that are
    /// constant or affine on probability densities.
    pub fn centered(&self, grid: &Grid) -> Result<Self> {
        self.check_grid(grid)?;
        match self {
            Self::TranslationInvariant(k) => Ok(Self::TranslationInvariant(
                k.filtered(|kv, v| (kv != [0, 0]).then_some(v)),
            )),
            Self::GridMatrix(m) => {
                let n = grid.len();
                let row_means: Vec<f64> = (0..n).map(|i| m.entries.row(i).mean()).collect();
                let total = row_means.iter().sum::<f64>() / n as f64;
                let entries = DMatrix::from_fn(n, n, |i, j| {
                    m.entries[(i, j)] - row_means[i] - row_means[j] + total
                });
                Self::grid_matrix(*grid, entries)
            }
        }
    }

    /// `(sup D_K², sup K(x, x))` over the grid nodes for a Mercer kernel.
    pub fn diam_diag(&self, grid: &Grid) -> Result<(f64, f64)> {
        if !self.is_mercer(grid, MERCER_TOL)? {
            let min_eigenvalue = match self {
                Self::TranslationInvariant(k) => {
                    k.coeffs.values().copied().fold(f64::INFINITY, f64::min)
                }
                Self::GridMatrix(_) => self.operator_eigenvalues(grid)?[0],
            };
            return Err(Error::NotMercer { min_eigenvalue });
        }
        self.semi_distance_extremes(grid)
    }

    /// `diam_sq` and `diag` evaluated without the Mercer precondition.
    pub fn semi_distance_extremes(&self, grid: &Grid) -> Result<(f64, f64)> {
        let m = self.node_matrix(grid)?;
        let n = grid.len();
        let diag = (0..n).map(|i| m[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
        let mut diam_sq = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                diam_sq = diam_sq.max(0.5 * (m[(i, i)] + m[(j, j)]) - m[(i, j)]);
            }
        }
        Ok((diam_sq, diag))
    }

    /// Whether `Vλ` is constant up to `tol`.
    pub fn check_hyp_occ(&self, grid: &Grid, tol: f64) -> Result<bool> {
        self.check_grid(grid)?;
        match self {
            Self::TranslationInvariant(_) => Ok(true),
            Self::GridMatrix(_) => {
                let v = self.eval_potential(&DensityField::uniform(*grid))?;
                let (lo, hi) = v
                    .values()
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                        (lo.min(x), hi.max(x))
                    });
                Ok(hi - lo <= tol)
            }
        }
    }

    /// Sufficient condition for strict convexity of the free energy: the
    /// centered kernel is Mercer, or the attracting part of its splitting
    /// has `min(diam_sq, diag) < 1`.
    pub fn convexity_certificate(&self, grid: &Grid) -> Result<ConvexityCertificate> {
        let centered = self.centered(grid)?;
        let mercer = centered.is_mercer(grid, MERCER_TOL)?;
        let minus = centered.mercer_split(grid)?.minus;
        let (minus_diam_sq, minus_diag) = minus.semi_distance_extremes(grid)?;
        Ok(ConvexityCertificate {
            mercer,
            minus_diam_sq,
            minus_diag,
            holds: mercer || minus_diam_sq.min(minus_diag) < 1.0,
        })
    }
}

fn is_nonnegative(spectrum: &[f64], tol: f64) -> bool {
    let scale = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    scale == 0.0 || spectrum.iter().all(|&v| v >= -tol * scale)
}

fn split_symmetric(entries: &DMatrix<f64>, weight: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(entries * weight);
    let q = &eig.eigenvectors;
    let part = |keep: &dyn Fn(f64) -> f64| {
        let d = eig.eigenvalues.map(keep);
        let m = q * DMatrix::from_diagonal(&d) * q.transpose() / weight;
        (&m + m.transpose()) * 0.5
    };
    (part(&|l| l.max(0.0)), part(&|l| (-l).max(0.0)))
}

fn check_modes(k: &FourierKernel, modes: &FourierModes) -> Result<()> {
    if modes.dim() != k.dim {
        return Err(invalid("modes", "dimension differs from the kernel"));
    }
    if modes.k_max() < k.support() {
        return Err(Error::CutoffTooSmall {
            needed: k.support(),
            available: modes.k_max(),
        });
    }
    Ok(())
}

/// `(Vμ)(x) = Σ_k v_k m_k e^{ik·x}`.
pub(crate) fn potential_from_modes(k: &FourierKernel, modes: &FourierModes, x: [f64; 2]) -> f64 {
    k.coeffs
        .iter()
        .map(|(&kv, &v)| {
            let m = modes.get(kv).expect("cutoff checked");
            let p = phase(kv, x);
            v * (m.re * p.cos() - m.im * p.sin())
        })
        .sum()
}

/// Output of [`KernelSpec::mercer_split`].
#[derive(Debug, Clone, PartialEq)]
pub struct MercerSplit {
    pub plus: KernelSpec,
    pub minus: KernelSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub mercer: bool,
    pub minus_diam_sq: f64,
    pub minus_diag: f64,
    pub holds: bool,
}

/// Summary of a kernel on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub rho: f64,
    pub is_mercer: bool,
    pub diam_sq: f64,
    pub diag: f64,
    pub hyp_occ_holds: bool,
    /// `Σ_{k≠0} min(v_k, 0)`; absent for grid-matrix kernels.
    pub torus_criterion_sum: Option<f64>,
}

impl KernelReport {
    pub fn compute(kernel: &KernelSpec, grid: &Grid) -> Result<Self> {
        let (diam_sq, diag) = kernel.semi_distance_extremes(grid)?;
        Ok(Self {
            rho: kernel.rho(grid)?,
            is_mercer: kernel.is_mercer(grid, MERCER_TOL)?,
            diam_sq,
            diag,
            hyp_occ_holds: kernel.check_hyp_occ(grid, 1e-10)?,
            torus_criterion_sum: kernel.as_fourier().map(FourierKernel::negative_mass),
        })
    }
}
