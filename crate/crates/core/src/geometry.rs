//! Uniform grids on the flat torus `T^d = [0, 2π)^d` (d = 1, 2), grid
//! functions, the Gibbs map and a Fourier-mode metric for the narrow
//! topology.
//!
//! Every node carries the same weight `1/N`, so sums against the weight are
//! rectangle-rule quadratures for the normalized Lebesgue measure λ. The rule
//! is exact for trigonometric polynomials of per-axis degree `< n/2`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Integer wavevector. For one-dimensional objects the second component is 0.
pub type Wavevector = [i32; 2];

/// Tolerance on `∫ f dλ = 1` for a [`DensityField`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

pub(crate) fn phase(k: Wavevector, x: [f64; 2]) -> f64 {
    k[0] as f64 * x[0] + k[1] as f64 * x[1]
}

pub(crate) fn l1_norm(k: Wavevector) -> i32 {
    k[0].abs() + k[1].abs()
}

pub(crate) fn sup_norm(k: Wavevector) -> i32 {
    k[0].abs().max(k[1].abs())
}

/// Uniform tensor grid on `T^d`.
///
/// Node `i` of a 2-d grid sits at `(2π·(i / n)/n, 2π·(i % n)/n)`; the second
/// axis varies fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, n_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) || n_per_axis < 8 {
            return Err(Error::InvalidGrid { dim, n_per_axis });
        }
        Ok(Self { dim, n_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    /// Total number of nodes `N = n^d`.
    pub fn len(&self) -> usize {
        self.n_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// λ-weight of a single node, `1/N`.
    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n_per_axis as f64
    }

    pub fn point(&self, i: usize) -> [f64; 2] {
        let h = self.spacing();
        match self.dim {
            1 => [h * i as f64, 0.0],
            _ => [
                h * (i / self.n_per_axis) as f64,
                h * (i % self.n_per_axis) as f64,
            ],
        }
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Largest per-axis wavenumber the grid resolves without aliasing.
    pub fn max_resolved_mode(&self) -> i32 {
        (self.n_per_axis / 2) as i32 - 1
    }

    /// Every wavevector with per-axis magnitude `<= max_resolved_mode`.
    pub fn resolved_wavevectors(&self) -> Vec<Wavevector> {
        let m = self.max_resolved_mode();
        match self.dim {
            1 => (-m..=m).map(|k| [k, 0]).collect(),
            _ => (-m..=m)
                .flat_map(|a| (-m..=m).map(move |b| [a, b]))
                .collect(),
        }
    }

    pub(crate) fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::GridMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        Ok(())
    }

    /// `∫ u dλ` by the rectangle rule.
    pub fn integrate(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        Ok(u.iter().sum::<f64>() * self.weight())
    }
}

/// `⟨u, v⟩_g = ∫ u v g dλ`.
pub fn inner_product(grid: &Grid, u: &[f64], v: &[f64], g: &[f64]) -> Result<f64> {
    grid.check(u)?;
    grid.check(v)?;
    grid.check(g)?;
    if let Some(node) = g.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::NonPositiveWeight { node });
    }
    let s: f64 = u.iter().zip(v).zip(g).map(|((a, b), c)| a * b * c).sum();
    Ok(s * grid.weight())
}

/// `⟨u, v⟩_λ`.
pub fn inner_product_lambda(grid: &Grid, u: &[f64], v: &[f64]) -> Result<f64> {
    grid.check(u)?;
    grid.check(v)?;
    Ok(u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() * grid.weight())
}

/// `‖u − v‖_{L²(λ)}`.
pub fn l2_distance(grid: &Grid, u: &[f64], v: &[f64]) -> Result<f64> {
    grid.check(u)?;
    grid.check(v)?;
    let s: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((s * grid.weight()).sqrt())
}

pub fn sup_norm_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|x| !x.is_finite()) {
        Some(node) => Err(Error::NonFinite { node }),
        None => Ok(()),
    }
}

fn write_grid_csv<W: Write>(grid: &Grid, values: &[f64], mut w: W) -> io::Result<()> {
    if grid.dim() == 1 {
        writeln!(w, "x,value")?;
        for (p, v) in grid.points().zip(values) {
            writeln!(w, "{},{}", p[0], v)?;
        }
    } else {
        writeln!(w, "x,y,value")?;
        for (p, v) in grid.points().zip(values) {
            writeln!(w, "{},{},{}", p[0], p[1], v)?;
        }
    }
    Ok(())
}

/// Strictly positive grid density with unit λ-integral (an element of `B₁⁺`).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    grid: Grid,
    values: Vec<f64>,
}

impl DensityField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.check(&values)?;
        check_finite(&values)?;
        if let Some(node) = values.iter().position(|&x| x <= 0.0) {
            return Err(Error::NonPositiveDensity {
                node,
                value: values[node],
            });
        }
        let integral = grid.integrate(&values)?;
        if (integral - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { integral });
        }
        Ok(Self { grid, values })
    }

    /// Rescales positive values so that they integrate to 1.
    pub fn normalized(grid: Grid, mut values: Vec<f64>) -> Result<Self> {
        grid.check(&values)?;
        check_finite(&values)?;
        let integral = grid.integrate(&values)?;
        if !(integral > 0.0) {
            return Err(Error::NotNormalized { integral });
        }
        values.iter_mut().for_each(|v| *v /= integral);
        Self::new(grid, values)
    }

    pub fn uniform(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![1.0; grid.len()],
        }
    }

    /// `ξ(amplitude · g)` for a random trigonometric field `g` with modes
    /// `|k|∞ ≤ 3`, Gaussian coefficients damped by `1/|k|₁`.
    pub fn random_smooth<R: Rng + ?Sized>(grid: Grid, amplitude: f64, rng: &mut R) -> Self {
        let max_k = 3.min(grid.max_resolved_mode());
        let ks: Vec<Wavevector> = match grid.dim() {
            1 => (1..=max_k).map(|k| [k, 0]).collect(),
            _ => (0..=max_k)
                .flat_map(|a| (-max_k..=max_k).map(move |b| [a, b]))
                .filter(|k| k[0] > 0 || (k[0] == 0 && k[1] > 0))
                .collect(),
        };
        let coeffs: Vec<(Wavevector, f64, f64)> = ks
            .into_iter()
            .map(|k| {
                let scale = 1.0 / l1_norm(k) as f64;
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                (k, a * scale, b * scale)
            })
            .collect();
        let values: Vec<f64> = grid
            .points()
            .map(|x| {
                amplitude
                    * coeffs
                        .iter()
                        .map(|&(k, a, b)| {
                            let p = phase(k, x);
                            a * p.cos() + b * p.sin()
                        })
                        .sum::<f64>()
            })
            .collect();
        let potential = PotentialField { grid, values };
        // amplitudes are O(10) at most, far from underflow
        gibbs(&potential).expect("bounded smooth potential")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        write_grid_csv(&self.grid, &self.values, w)
    }
}

/// A real grid function, typically a potential `Vμ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    grid: Grid,
    values: Vec<f64>,
}

impl PotentialField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.check(&values)?;
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        write_grid_csv(&self.grid, &self.values, w)
    }
}

/// The Gibbs map `ξ(f) = e^{−f} / ∫ e^{−f} dλ`.
///
/// The exponent is shifted by `min f` first. Weights that underflow are
/// floored at the smallest normal `f64`, so the result is always in `B₁⁺`.
pub fn gibbs(f: &PotentialField) -> Result<DensityField> {
    let grid = *f.grid();
    let shift = f.values().iter().copied().fold(f64::INFINITY, f64::min);
    let mut values: Vec<f64> = f
        .values()
        .iter()
        .map(|v| (shift - v).exp().max(f64::MIN_POSITIVE))
        .collect();
    let z = values.iter().sum::<f64>() * grid.weight();
    values.iter_mut().for_each(|v| *v /= z);
    DensityField::new(grid, values)
}

/// Truncated Fourier modes `m_k = ∫ e^{−ik·x} μ(dx)` for `|k|∞ ≤ k_max`.
///
/// Storage is dense over the cube `[−k_max, k_max]^d`; in 2-d the second
/// component varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierModes {
    dim: usize,
    k_max: i32,
    values: Vec<Complex64>,
}

impl FourierModes {
    pub fn zeros(dim: usize, k_max: i32) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(invalid("dim", format!("{dim} is not 1 or 2")));
        }
        if k_max < 0 {
            return Err(invalid("k_max", "must be non-negative"));
        }
        let side = (2 * k_max + 1) as usize;
        Ok(Self {
            dim,
            k_max,
            values: vec![Complex64::new(0.0, 0.0); side.pow(dim as u32)],
        })
    }

    /// Modes of λ: 1 at `k = 0`, zero elsewhere.
    pub fn uniform(dim: usize, k_max: i32) -> Result<Self> {
        let mut m = Self::zeros(dim, k_max)?;
        let i0 = m.index_of([0, 0]).expect("zero mode");
        m.values[i0] = Complex64::new(1.0, 0.0);
        Ok(m)
    }

    /// Modes of the point mass at `x`.
    pub fn dirac(dim: usize, k_max: i32, x: [f64; 2]) -> Result<Self> {
        let mut m = Self::zeros(dim, k_max)?;
        for i in 0..m.len() {
            m.values[i] = Complex64::from_polar(1.0, -phase(m.wavevector(i), x));
        }
        Ok(m)
    }

    /// Modes of the measure `f λ`, computed with the grid quadrature.
    pub fn of_density(f: &DensityField, k_max: i32) -> Result<Self> {
        let grid = f.grid();
        if k_max > grid.max_resolved_mode() {
            return Err(Error::CutoffTooSmall {
                needed: k_max,
                available: grid.max_resolved_mode(),
            });
        }
        let mut m = Self::zeros(grid.dim(), k_max)?;
        let w = grid.weight();
        let ks: Vec<Wavevector> = m.wavevectors().collect();
        for (slot, k) in m.values.iter_mut().zip(ks) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, fv) in grid.points().zip(f.values()) {
                acc += Complex64::from_polar(*fv, -phase(k, x));
            }
            *slot = acc * w;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn index_of(&self, k: Wavevector) -> Option<usize> {
        let side = 2 * self.k_max + 1;
        if k[0].abs() > self.k_max || k[1].abs() > self.k_max || (self.dim == 1 && k[1] != 0) {
            return None;
        }
        let i = match self.dim {
            1 => k[0] + self.k_max,
            _ => (k[0] + self.k_max) * side + (k[1] + self.k_max),
        };
        Some(i as usize)
    }

    pub fn wavevector(&self, index: usize) -> Wavevector {
        let side = (2 * self.k_max + 1) as usize;
        match self.dim {
            1 => [index as i32 - self.k_max, 0],
            _ => [
                (index / side) as i32 - self.k_max,
                (index % side) as i32 - self.k_max,
            ],
        }
    }

    pub fn wavevectors(&self) -> impl Iterator<Item = Wavevector> + '_ {
        (0..self.values.len()).map(move |i| self.wavevector(i))
    }

    pub fn get(&self, k: Wavevector) -> Option<Complex64> {
        self.index_of(k).map(|i| self.values[i])
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            k_max: self.k_max,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Largest `|m_k|` over the unit wavevectors `e_1, …, e_d`.
    pub fn first_mode_abs(&self) -> f64 {
        let mut best = self.get([1, 0]).map_or(0.0, |v| v.norm());
        if self.dim == 2 {
            best = best.max(self.get([0, 1]).map_or(0.0, |v| v.norm()));
        }
        best
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.k_max != other.k_max {
            return Err(Error::CutoffMismatch {
                left: self.k_max,
                right: other.k_max,
            });
        }
        if self.dim != other.dim {
            return Err(invalid("dim", "mode vectors of different dimension"));
        }
        Ok(())
    }
}

/// Weights of the mode metric.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakMetricParams {
    k_max: i32,
    dim: usize,
    mode_weights: Vec<f64>,
}

impl WeakMetricParams {
    /// Geometric weights `w_k = 2^{−|k|₁}`.
    pub fn geometric(dim: usize, k_max: i32) -> Result<Self> {
        let template = FourierModes::zeros(dim, k_max)?;
        let mode_weights = template
            .wavevectors()
            .map(|k| 0.5f64.powi(l1_norm(k)))
            .collect();
        Ok(Self {
            k_max,
            dim,
            mode_weights,
        })
    }

    pub fn with_weights(dim: usize, k_max: i32, mode_weights: Vec<f64>) -> Result<Self> {
        let template = FourierModes::zeros(dim, k_max)?;
        if mode_weights.len() != template.len() {
            return Err(invalid(
                "mode_weights",
                format!(
                    "expected {} weights, got {}",
                    template.len(),
                    mode_weights.len()
                ),
            ));
        }
        if mode_weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid(
                "mode_weights",
                "weights must be finite and positive",
            ));
        }
        Ok(Self {
            k_max,
            dim,
            mode_weights,
        })
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    pub fn mode_weights(&self) -> &[f64] {
        &self.mode_weights
    }
}

/// `Σ_k w_k |p_k − q_k|` over the retained modes.
pub fn weak_distance(p: &FourierModes, q: &FourierModes, params: &WeakMetricParams) -> Result<f64> {
    p.check_compatible(q)?;
    if p.k_max != params.k_max {
        return Err(Error::CutoffMismatch {
            left: p.k_max,
            right: params.k_max,
        });
    }
    if p.dim != params.dim {
        return Err(invalid("dim", "metric and modes differ in dimension"));
    }
    Ok(p.values
        .iter()
        .zip(&q.values)
        .zip(&params.mode_weights)
        .map(|((a, b), w)| w * (a - b).norm())
        .sum())
}

/// Weak distance between the translation orbits of two measures: compares
/// `|p_k|` with `|q_k|`, which is invariant under shifts of either measure.
pub fn orbit_distance(
    p: &FourierModes,
    q: &FourierModes,
    params: &WeakMetricParams,
) -> Result<f64> {
    p.check_compatible(q)?;
    if p.k_max != params.k_max {
        return Err(Error::CutoffMismatch {
            left: p.k_max,
            right: params.k_max,
        });
    }
    Ok(p.values
        .iter()
        .zip(&q.values)
        .zip(&params.mode_weights)
        .map(|((a, b), w)| w * (a.norm() - b.norm()).abs())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ones(g: &Grid) -> Vec<f64> {
        vec![1.0; g.len()]
    }

    #[test]
    fn grid_nodes_and_weights() {
        let g = Grid::new(1, 8).unwrap();
        assert_eq!(g.len(), 8);
        for i in 0..8 {
            assert_eq!(g.point(i)[0], i as f64 * PI / 4.0);
        }
        assert_eq!(g.weight(), 0.125);

        let g2 = Grid::new(2, 8).unwrap();
        assert_eq!(g2.len(), 64);
        assert_eq!(g2.weight(), 1.0 / 64.0);
        let total: f64 = (0..g2.len()).map(|_| g2.weight()).sum();
        assert_eq!(total, 1.0);

        let pts: Vec<_> = g2.points().collect();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert_ne!(pts[i], pts[j]);
            }
        }
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(matches!(Grid::new(1, 7), Err(Error::InvalidGrid { .. })));
        assert!(Grid::new(3, 16).is_err());
        assert!(Grid::new(0, 16).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let g = Grid::new(1, 64).unwrap();
        let one = ones(&g);
        assert_eq!(inner_product(&g, &one, &one, &one).unwrap(), 1.0);
        let c: Vec<f64> = g.points().map(|x| x[0].cos()).collect();
        let s: Vec<f64> = g.points().map(|x| x[0].sin()).collect();
        assert!((inner_product(&g, &c, &c, &one).unwrap() - 0.5).abs() < 1e-14);
        assert!(inner_product(&g, &c, &s, &one).unwrap().abs() < 1e-14);
    }

    #[test]
    fn inner_product_rejects_mismatch_and_bad_weight() {
        let g = Grid::new(1, 8).unwrap();
        let one = ones(&g);
        assert!(matches!(
            inner_product(&g, &one, &one[..7], &one),
            Err(Error::GridMismatch { .. })
        ));
        let mut w = one.clone();
        w[3] = 0.0;
        assert!(matches!(
            inner_product(&g, &one, &one, &w),
            Err(Error::NonPositiveWeight { node: 3 })
        ));
    }

    #[test]
    fn quadrature_is_exact_for_band_limited_2d() {
        let g = Grid::new(2, 16).unwrap();
        let one = ones(&g);
        // ∫ cos²(3x)cos²(2y) dλ = 1/4
        let u: Vec<f64> = g
            .points()
            .map(|p| (3.0 * p[0]).cos() * (2.0 * p[1]).cos())
            .collect();
        assert!((inner_product(&g, &u, &u, &one).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gibbs_of_constant_is_uniform() {
        let g = Grid::new(1, 16).unwrap();
        let f = PotentialField::new(g, vec![3.5; 16]).unwrap();
        let d = gibbs(&f).unwrap();
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn gibbs_matches_quadrature_oracle() {
        let g = Grid::new(1, 64).unwrap();
        let f = PotentialField::from_fn(g, |x| x[0].cos()).unwrap();
        let d = gibbs(&f).unwrap();
        let z: f64 = g.points().map(|x| (-x[0].cos()).exp()).sum::<f64>() / 64.0;
        let expected = (-1.0f64).exp() / z;
        assert!((d.values()[0] - expected).abs() < 1e-14);
        // continuum value e^{-1} / I_0(1)
        assert!((d.values()[0] - 0.290_568_956_668).abs() < 1e-11);
    }

    #[test]
    fn gibbs_survives_underflow() {
        let g = Grid::new(1, 8).unwrap();
        let mut v = vec![0.0; 8];
        v[2] = 1e4;
        let d = gibbs(&PotentialField::new(g, v).unwrap()).unwrap();
        assert!(d.values()[2] > 0.0);
        assert!((d.values()[0] - 8.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let g = Grid::new(1, 8).unwrap();
        assert!(DensityField::new(g, vec![1.0; 8]).is_ok());
        assert!(matches!(
            DensityField::new(g, vec![2.0; 8]),
            Err(Error::NotNormalized { .. })
        ));
        let mut v = vec![1.0; 8];
        v[0] = 0.0;
        v[1] = 2.0;
        assert!(matches!(
            DensityField::new(g, v),
            Err(Error::NonPositiveDensity { node: 0, .. })
        ));
        let d = DensityField::normalized(g, vec![3.0; 8]).unwrap();
        assert_eq!(d.values()[5], 1.0);
    }

    #[test]
    fn weak_distance_uniform_vs_dirac() {
        let p = FourierModes::uniform(1, 2).unwrap();
        let q = FourierModes::dirac(1, 2, [0.0, 0.0]).unwrap();
        let params = WeakMetricParams::geometric(1, 2).unwrap();
        assert!((weak_distance(&p, &q, &params).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(weak_distance(&p, &p, &params).unwrap(), 0.0);
    }

    #[test]
    fn weak_distance_cutoff_mismatch() {
        let p = FourierModes::uniform(1, 2).unwrap();
        let q = FourierModes::uniform(1, 3).unwrap();
        let params = WeakMetricParams::geometric(1, 2).unwrap();
        assert!(matches!(
            weak_distance(&p, &q, &params),
            Err(Error::CutoffMismatch { .. })
        ));
    }

    #[test]
    fn density_modes_of_uniform() {
        let g = Grid::new(2, 8).unwrap();
        let m = FourierModes::of_density(&DensityField::uniform(g), 2).unwrap();
        for (k, v) in m.wavevectors().zip(m.values()) {
            let expected = if k == [0, 0] { 1.0 } else { 0.0 };
            assert!(
                (v.re - expected).abs() < 1e-14 && v.im.abs() < 1e-14,
                "{k:?}"
            );
        }
    }

    #[test]
    fn orbit_distance_ignores_shifts() {
        let params = WeakMetricParams::geometric(1, 3).unwrap();
        let a = FourierModes::dirac(1, 3, [0.3, 0.0]).unwrap();
        let b = FourierModes::dirac(1, 3, [2.1, 0.0]).unwrap();
        assert!(orbit_distance(&a, &b, &params).unwrap() < 1e-15);
        assert!(weak_distance(&a, &b, &params).unwrap() > 0.1);
    }

    #[test]
    fn density_csv_layout() {
        let g = Grid::new(2, 8).unwrap();
        let mut buf = Vec::new();
        DensityField::uniform(g).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,value");
        assert_eq!(lines.len(), 65);
        assert_eq!(lines[2], format!("0,{},1", PI / 4.0));
    }

    fn random_vec(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    proptest! {
        #[test]
        fn gibbs_is_shift_invariant(seed in any::<u64>(), c in -100.0f64..100.0) {
            let g = Grid::new(1, 32).unwrap();
            let base = random_vec(g.len(), seed);
            let shifted: Vec<f64> = base.iter().map(|v| v + c).collect();
            let a = gibbs(&PotentialField::new(g, base).unwrap()).unwrap();
            let b = gibbs(&PotentialField::new(g, shifted).unwrap()).unwrap();
            prop_assert!(sup_norm_distance(a.values(), b.values()) < 1e-12);
            prop_assert!(a.min() > 0.0);
        }

        #[test]
        fn inner_product_is_symmetric_bilinear(seed in any::<u64>(), s in -3.0f64..3.0) {
            let g = Grid::new(1, 16).unwrap();
            let u = random_vec(16, seed);
            let v = random_vec(16, seed ^ 1);
            let z = random_vec(16, seed ^ 2);
            let w: Vec<f64> = random_vec(16, seed ^ 3).iter().map(|x| 1.5 + x).collect();
            let uv = inner_product(&g, &u, &v, &w).unwrap();
            prop_assert!((uv - inner_product(&g, &v, &u, &w).unwrap()).abs() < 1e-14);
            let su_z: Vec<f64> = u.iter().zip(&z).map(|(a, b)| s * a + b).collect();
            let lhs = inner_product(&g, &su_z, &v, &w).unwrap();
            let rhs = s * uv + inner_product(&g, &z, &v, &w).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
            prop_assert!(inner_product(&g, &u, &u, &w).unwrap() >= 0.0);
        }

        #[test]
        fn weak_distance_is_symmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = WeakMetricParams::geometric(2, 2).unwrap();
            let x = [rng.random_range(0.0..6.0), rng.random_range(0.0..6.0)];
            let y = [rng.random_range(0.0..6.0), rng.random_range(0.0..6.0)];
            let p = FourierModes::dirac(2, 2, x).unwrap();
            let q = FourierModes::dirac(2, 2, y).unwrap();
            let d1 = weak_distance(&p, &q, &params).unwrap();
            let d2 = weak_distance(&q, &p, &params).unwrap();
            prop_assert_eq!(d1, d2);
        }
    }
}
