//! Fixtures shared by the benchmarks.

use sidlab_core::{Grid, KernelSpec, TrigBasis, TrigTerm};

pub fn circle_dot(a: f64) -> KernelSpec {
    KernelSpec::circle_dot(a).expect("finite coefficient")
}

/// `−4 cos(x − y) + 0.3 cos x cos y` on `grid`.
pub fn broken_symmetry(grid: Grid) -> KernelSpec {
    let terms = [
        TrigTerm {
            coef: -4.0,
            basis: TrigBasis::Cos,
            k: [1, 0],
        },
        TrigTerm {
            coef: -4.0,
            basis: TrigBasis::Sin,
            k: [1, 0],
        },
        TrigTerm {
            coef: 0.3,
            basis: TrigBasis::Cos,
            k: [1, 0],
        },
    ];
    KernelSpec::trig_sum(grid, &terms).expect("valid terms")
}
