//! Second variation of `J` and the spectrum of `Id + T(f)∘V` on `B₀`.
//!
//! `B₀` is realized on the grid with the basis `e_i − e_{N−1}`,
//! `i = 0, …, N−2`. In that basis
//!
//! * `B(u, v) = ⟨u, v⟩_{1/f}`,
//! * `A(u, v) = ⟨u, v⟩_{1/f} + ⟨Vu, v⟩_λ = D²J(f)(u, v)`,
//!
//! and the generalized eigenvalues of `A c = ν B c` are the eigenvalues of
//! `Id + T(f)∘V`, which is self-adjoint for `⟨·,·⟩_{1/f}`.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DensityField;
use crate::kernel::KernelSpec;

/// Default degeneracy threshold, relative to the largest `|ν|`.
pub const EPS_DEG: f64 = 1e-6;

const FORM_SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sink,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Number of eigenvalues below `−ε`.
    pub index: usize,
    pub degenerate: bool,
    pub verdict: Verdict,
}

impl SpectralReport {
    /// Classifies a spectrum with threshold `ε = eps_deg · max|ν|`.
    pub fn classify(mut eigenvalues: Vec<f64>, eps_deg: f64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let scale = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = eps_deg * scale;
        let degenerate = eigenvalues.iter().any(|v| v.abs() <= eps);
        let index = eigenvalues.iter().filter(|&&v| v < -eps).count();
        let verdict = match (degenerate, index) {
            (true, _) => Verdict::Degenerate,
            (false, 0) => Verdict::Sink,
            (false, _) => Verdict::Saddle,
        };
        Self {
            eigenvalues,
            index,
            degenerate,
            verdict,
        }
    }
}

/// Matrices of the forms `A = D²J(f)` and `B = ⟨·,·⟩_{1/f}` in the basis
/// `e_i − e_{N−1}`.
#[derive(Debug, Clone)]
pub struct HessianForms {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl HessianForms {
    /// Coordinates of a zero-mean grid function in the basis: its first
    /// `N − 1` node values.
    pub fn coordinates(u: &[f64]) -> &[f64] {
        &u[..u.len() - 1]
    }

    pub fn quadratic(m: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
        let cu = Self::coordinates(u);
        let cv = Self::coordinates(v);
        let mut s = 0.0;
        for (i, a) in cu.iter().enumerate() {
            for (j, b) in cv.iter().enumerate() {
                s += a * m[(i, j)] * b;
            }
        }
        s
    }
}

pub fn hessian_forms(f: &DensityField, kernel: &KernelSpec) -> Result<HessianForms> {
    let grid = f.grid();
    let n = grid.len();
    let last = n - 1;
    let w = grid.weight();
    let v = kernel.node_matrix(grid)?;
    let inv_f: Vec<f64> = f.values().iter().map(|x| 1.0 / x).collect();

    let b = DMatrix::from_fn(last, last, |i, j| {
        let d = if i == j { inv_f[i] } else { 0.0 };
        w * (d + inv_f[last])
    });
    let a = DMatrix::from_fn(last, last, |i, j| {
        b[(i, j)] + w * w * (v[(j, i)] - v[(j, last)] - v[(last, i)] + v[(last, last)])
    });

    let deviation = (&a - a.transpose()).amax();
    if deviation > FORM_SYMMETRY_TOL * a.amax().max(1.0) {
        return Err(Error::AsymmetricForm { deviation });
    }
    Ok(HessianForms { a, b })
}

/// Spectrum of `Id + T(f)∘V` on `B₀` and the resulting classification.
pub fn hessian_spectrum(
    f: &DensityField,
    kernel: &KernelSpec,
    eps_deg: f64,
) -> Result<SpectralReport> {
    let HessianForms { a, b } = hessian_forms(f, kernel)?;
    let chol = Cholesky::new(b).ok_or(Error::IndefiniteMetric)?;
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ
    let y = l
        .solve_lower_triangular(&a)
        .ok_or(Error::IndefiniteMetric)?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::IndefiniteMetric)?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    Ok(SpectralReport::classify(
        eig.eigenvalues.iter().copied().collect(),
        eps_deg,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;

    fn count_near(ev: &[f64], target: f64, tol: f64) -> usize {
        ev.iter().filter(|v| (*v - target).abs() < tol).count()
    }

    #[test]
    fn identity_without_interaction() {
        let g = Grid::new(1, 32).unwrap();
        let r = hessian_spectrum(
            &DensityField::uniform(g),
            &KernelSpec::zero(1).unwrap(),
            EPS_DEG,
        )
        .unwrap();
        assert_eq!(r.eigenvalues.len(), 31);
        assert!(r.eigenvalues.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert_eq!(r.verdict, Verdict::Sink);
    }

    #[test]
    fn circle_dot_at_uniform() {
        let g = Grid::new(1, 64).unwrap();
        let f = DensityField::uniform(g);
        for (a, verdict, index) in [
            (-4.0, Verdict::Saddle, 2),
            (-1.0, Verdict::Sink, 0),
            (2.0, Verdict::Sink, 0),
        ] {
            let r = hessian_spectrum(&f, &KernelSpec::circle_dot(a).unwrap(), EPS_DEG).unwrap();
            assert_eq!(
                count_near(&r.eigenvalues, 1.0 + a / 2.0, 1e-10),
                2,
                "a = {a}"
            );
            assert_eq!(count_near(&r.eigenvalues, 1.0, 1e-10), 61);
            assert_eq!(r.verdict, verdict);
            assert_eq!(r.index, index);
        }
        let r = hessian_spectrum(&f, &KernelSpec::circle_dot(-2.0).unwrap(), EPS_DEG).unwrap();
        assert_eq!(r.verdict, Verdict::Degenerate);
    }

    #[test]
    fn two_dimensional_fourier_spectrum() {
        let g = Grid::new(2, 8).unwrap();
        let k = KernelSpec::heat(2, -3.0, 0.4, 2).unwrap();
        let r = hessian_spectrum(&DensityField::uniform(g), &k, EPS_DEG).unwrap();
        // 1 + v_k with v_k = -3 e^{-0.4|k|²}; |k|² = 1 has four wavevectors
        assert_eq!(
            count_near(&r.eigenvalues, 1.0 - 3.0 * (-0.4f64).exp(), 1e-10),
            4
        );
        assert_eq!(r.eigenvalues.len(), 63);
    }

    #[test]
    fn classify_rules() {
        let r = SpectralReport::classify(vec![2.0, -1.0, 0.5], 1e-6);
        assert_eq!((r.verdict, r.index), (Verdict::Saddle, 1));
        let r = SpectralReport::classify(vec![2.0, 1e-9, 0.5], 1e-6);
        assert_eq!(r.verdict, Verdict::Degenerate);
        assert_eq!(r.eigenvalues, vec![1e-9, 0.5, 2.0]);
    }
}
