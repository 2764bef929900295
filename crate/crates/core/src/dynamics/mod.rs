//! Free energy `J(f) = ½⟨Vf, f⟩_λ + ⟨f, log f⟩_λ` on `B₁⁺`, the vector
//! fields `X(f) = −f + ξ(Vf)` and `Y(h) = −h + Vξ(h)`, and the analysis of
//! their common equilibria.

mod flow;
mod solver;
mod spectrum;

pub use flow::{flow_x, flow_x_with, flow_y, FlowTrace, PotentialTrace};
pub use solver::{
    find_fixed_points, morse_sum, Enumeration, FixedPointRecord, MorseSum, SolverParams,
};
pub use spectrum::{
    hessian_forms, hessian_spectrum, HessianForms, SpectralReport, Verdict, EPS_DEG,
};

use crate::error::{Error, Result};
use crate::geometry::{gibbs, inner_product_lambda, DensityField, PotentialField};
use crate::kernel::KernelSpec;

/// `J(f)`.
pub fn free_energy(f: &DensityField, kernel: &KernelSpec) -> Result<f64> {
    let grid = f.grid();
    let vf = kernel.apply(grid, f.values())?;
    let quadratic = 0.5 * inner_product_lambda(grid, &vf, f.values())?;
    let entropy = entropy(f.values())? * grid.weight();
    Ok(quadratic + entropy)
}

fn entropy(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for (node, &v) in values.iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::NonPositiveDensity { node, value: v });
        }
        s += v * v.ln();
    }
    Ok(s)
}

/// `Vf + log f`: the λ-representer of `DJ(f)` on `B₀`.
pub fn energy_gradient(f: &DensityField, kernel: &KernelSpec) -> Result<Vec<f64>> {
    let mut g = kernel.apply(f.grid(), f.values())?;
    for (gi, fi) in g.iter_mut().zip(f.values()) {
        *gi += fi.ln();
    }
    Ok(g)
}

/// `ξ(Vf)`.
pub fn gibbs_of_potential(f: &DensityField, kernel: &KernelSpec) -> Result<DensityField> {
    gibbs(&kernel.eval_potential(f)?)
}

/// `X(f) = −f + ξ(Vf)`, an element of `B₀`.
pub fn field_x(f: &DensityField, kernel: &KernelSpec) -> Result<Vec<f64>> {
    let g = gibbs_of_potential(f, kernel)?;
    Ok(g.values()
        .iter()
        .zip(f.values())
        .map(|(gi, fi)| gi - fi)
        .collect())
}

/// `‖X(f)‖∞`.
pub fn residual(f: &DensityField, kernel: &KernelSpec) -> Result<f64> {
    Ok(field_x(f, kernel)?.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// `Y(h) = −h + Vξ(h)`.
pub fn field_y(h: &PotentialField, kernel: &KernelSpec) -> Result<PotentialField> {
    let v = kernel.eval_potential(&gibbs(h)?)?;
    let values = v
        .values()
        .iter()
        .zip(h.values())
        .map(|(a, b)| a - b)
        .collect();
    PotentialField::new(*h.grid(), values)
}
