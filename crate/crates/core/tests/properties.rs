use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use sidlab_core::dynamics::{
    energy_gradient, find_fixed_points, flow_x, flow_x_with, free_energy, hessian_spectrum,
    residual, SolverParams,
};
use sidlab_core::geometry::inner_product_lambda;
use sidlab_core::sde::{rng_from_seed, Simulator};
use sidlab_core::{
    gibbs, inner_product, DensityField, Grid, KernelSpec, PotentialField, SdeConfig,
};

fn grid(n: usize) -> Grid {
    Grid::new(1, n).unwrap()
}

fn fourier(c: &[f64]) -> KernelSpec {
    let coeffs = c.iter().enumerate().flat_map(|(i, &v)| {
        let k = i as i32 + 1;
        [([k, 0], v), ([-k, 0], v)]
    });
    KernelSpec::translation_invariant(1, coeffs).unwrap()
}

fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn zero_mean(mut u: Vec<f64>) -> Vec<f64> {
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    u.iter_mut().for_each(|v| *v -= mean);
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gibbs_lands_in_the_simplex(values in prop::collection::vec(-1e6f64..1e6, 16)) {
        let g = grid(16);
        let d = gibbs(&PotentialField::new(g, values).unwrap()).unwrap();
        prop_assert!(d.min() > 0.0);
        prop_assert!((g.integrate(d.values()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_product_is_definite(seed in any::<u64>(), zero in any::<bool>()) {
        let g = grid(16);
        let u = if zero { vec![0.0; 16] } else { normals(16, seed) };
        let w: Vec<f64> = normals(16, seed ^ 7).iter().map(|x| x.exp()).collect();
        let q = inner_product(&g, &u, &u, &w).unwrap();
        prop_assert!(q >= 0.0);
        prop_assert_eq!(q == 0.0, zero);
    }

    #[test]
    fn quadrature_is_exact_below_nyquist(a in -2.0f64..2.0, b in -2.0f64..2.0, k0 in 0i32..8, k1 in 0i32..8) {
        // ∫ (a cos(k·x) + b)² dλ = a²/2 + b² for k ≠ 0
        let n = 16;
        let g = Grid::new(2, n).unwrap();
        prop_assume!(k0 != 0 || k1 != 0);
        let u: Vec<f64> = g
            .points()
            .map(|x| a * (k0 as f64 * x[0] + k1 as f64 * x[1]).cos() + b)
            .collect();
        let got = inner_product(&g, &u, &u, &vec![1.0; g.len()]).unwrap();
        prop_assert!((got - (a * a / 2.0 + b * b)).abs() < 1e-12);
    }

    #[test]
    fn mercer_split_reconstructs_grid_matrices(seed in any::<u64>()) {
        let g = grid(12);
        let r = normals(144, seed);
        let m = DMatrix::from_fn(12, 12, |i, j| r[12 * i + j] + r[12 * j + i]);
        let k = KernelSpec::grid_matrix(g, m.clone()).unwrap();
        let split = k.mercer_split(&g).unwrap();
        let back = split.plus.node_matrix(&g).unwrap() - split.minus.node_matrix(&g).unwrap();
        prop_assert!((back - m).amax() <= 1e-10);
        prop_assert!(split.plus.is_mercer(&g, 1e-10).unwrap());
        prop_assert!(split.minus.is_mercer(&g, 1e-10).unwrap());
    }

    #[test]
    fn rho_paths_agree(c in prop::collection::vec(-3.0f64..3.0, 1..5), v0 in -2.0f64..2.0) {
        let g = grid(32);
        let mut coeffs: Vec<_> = c.iter().enumerate().flat_map(|(i, &v)| {
            let k = i as i32 + 1;
            [([k, 0], v), ([-k, 0], v)]
        }).collect();
        coeffs.push(([0, 0], v0));
        let k = KernelSpec::translation_invariant(1, coeffs).unwrap();
        let rho = k.rho(&g).unwrap();
        prop_assert!((rho - k.rho_dense(&g).unwrap()).abs() <= 1e-10);
        let lowest = k.operator_eigenvalues(&g).unwrap()[0];
        prop_assert!(rho >= lowest.min(0.0) - 1e-10);
        prop_assert!(rho <= 0.0);
    }

    #[test]
    fn mercer_kernels_have_zero_rho(c in prop::collection::vec(0.0f64..3.0, 1..5)) {
        let g = grid(32);
        let k = fourier(&c);
        prop_assert!(k.is_mercer(&g, 1e-10).unwrap());
        prop_assert_eq!(k.rho(&g).unwrap(), 0.0);
        prop_assert!(k.rho_dense(&g).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn circle_dot_criterion_sum(a in -10.0f64..0.0) {
        let k = KernelSpec::circle_dot(a).unwrap();
        prop_assert!((k.as_fourier().unwrap().negative_mass() - a).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), c in prop::collection::vec(-2.0f64..2.0, 3)) {
        let g = grid(64);
        let k = fourier(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = DensityField::random_smooth(g, 1.0, &mut rng);
        let u: Vec<f64> = zero_mean(g.points().map(|x| (x[0] + seed as f64).sin() + 0.5 * (2.0 * x[0]).cos()).collect());
        let eps = 1e-5;
        let at = |s: f64| {
            let v = f.values().iter().zip(&u).map(|(a, b)| a + s * b).collect();
            free_energy(&DensityField::new(g, v).unwrap(), &k).unwrap()
        };
        let fd = (at(eps) - at(-eps)) / (2.0 * eps);
        let exact = inner_product_lambda(&g, &energy_gradient(&f, &k).unwrap(), &u).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3), "{} vs {}", fd, exact);
    }

    #[test]
    fn flow_decreases_energy_until_critical(seed in any::<u64>(), c in prop::collection::vec(-3.0f64..3.0, 2)) {
        let g = grid(64);
        let k = fourier(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f0 = DensityField::random_smooth(g, 1.5, &mut rng);
        let trace = flow_x(&f0, &k, 0.1, 10.0).unwrap();
        for (i, w) in trace.energies.windows(2).enumerate() {
            if trace.residuals[i] > 1e-8 {
                prop_assert!(w[1] < w[0]);
            } else {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn flow_stays_above_the_positivity_floor(seed in any::<u64>(), c in prop::collection::vec(-3.0f64..3.0, 2)) {
        let g = grid(64);
        let k = fourier(&c);
        let sup_v = 2.0 * c.iter().map(|v| v.abs()).sum::<f64>();
        let delta = (-2.0 * sup_v).exp();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f0 = DensityField::random_smooth(g, 2.0, &mut rng);
        let mut ok = true;
        flow_x_with(&f0, &k, 0.1, 5.0, |t, f| {
            ok &= f.min() >= delta * (1.0 - (-t).exp()) * (1.0 - 1e-12);
            Ok(())
        })
        .unwrap();
        prop_assert!(ok);
    }

    #[test]
    fn normalized_modes_stay_in_the_unit_disc(seed in any::<u64>(), a in -6.0f64..6.0) {
        let c = SdeConfig { k_max: 3, ..SdeConfig::new(KernelSpec::circle_dot(a).unwrap(), 50.0, seed) };
        let sim = Simulator::new(&c).unwrap();
        let mut rng = rng_from_seed(seed);
        let mut s = sim.init_state(&c, &mut rng);
        for _ in 0..2000 {
            sim.step(&mut s, &mut rng).unwrap();
            prop_assert!(s.normalized_modes().values().iter().all(|m| m.norm() <= 1.0 + 1e-12));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solver_terminals_are_critical(c in prop::collection::vec(-4.0f64..2.0, 2), seed in any::<u64>()) {
        let g = grid(32);
        let k = fourier(&c);
        let params = SolverParams { n_starts: 4, seed, ..Default::default() };
        for r in find_fixed_points(&k, &g, &params).unwrap().records {
            prop_assert!(residual(&r.density, &k).unwrap() < params.tol);
            let grad = energy_gradient(&r.density, &k).unwrap();
            let last = grad[grad.len() - 1];
            // ⟨∇J, e_i − e_last⟩_λ over the basis of B₀
            let worst = grad.iter().map(|x| (x - last).abs() * g.weight()).fold(0.0, f64::max);
            prop_assert!(worst < 2.0 / r.density.min() * params.tol);
        }
    }

    #[test]
    fn certified_kernels_have_positive_spectra(c in prop::collection::vec(-0.45f64..3.0, 3), seed in any::<u64>()) {
        let g = grid(32);
        let k = fourier(&c);
        prop_assume!(k.convexity_certificate(&g).unwrap().holds);
        let params = SolverParams { n_starts: 4, seed, ..Default::default() };
        for r in find_fixed_points(&k, &g, &params).unwrap().records {
            let s = hessian_spectrum(&r.density, &k, 1e-6).unwrap();
            prop_assert!(s.eigenvalues.iter().all(|&v| v > 0.0));
        }
    }
}

/// Strong error at `t = 3` of the interacting scheme against a fine
/// reference on the same Brownian path, averaged over paths.
fn strong_error(dt: f64, reference_dt: f64, paths: u64) -> f64 {
    let ratio = (dt / reference_dt).round() as usize;
    let kernel = KernelSpec::translation_invariant(
        1,
        [
            ([1, 0], -2.0),
            ([-1, 0], -2.0),
            ([2, 0], 0.5),
            ([-2, 0], 0.5),
        ],
    )
    .unwrap();
    let build = |dt: f64| {
        let c = SdeConfig {
            dt,
            k_max: 2,
            ..SdeConfig::new(kernel.clone(), 3.0, 0)
        };
        Simulator::new(&c).unwrap()
    };
    let (coarse, fine) = (build(dt), build(reference_dt));
    let steps = (3.0 / dt).round() as usize;
    let warmup = (1.0 / dt).round() as usize;
    let mut total = 0.0;
    for p in 0..paths {
        let mut rng = rng_from_seed(p);
        let mut a = coarse.initial_state([0.0; 2]);
        let mut b = fine.initial_state([0.0; 2]);
        for n in 0..steps {
            let mut dw = 0.0;
            for _ in 0..ratio {
                let xi: f64 = StandardNormal.sample(&mut rng);
                let inc = reference_dt.sqrt() * xi;
                dw += inc;
                if n < warmup {
                    fine.brownian_step(&mut b, [inc, 0.0]);
                } else {
                    fine.step_with_increment(&mut b, [inc, 0.0]).unwrap();
                }
            }
            if n < warmup {
                coarse.brownian_step(&mut a, [dw, 0.0]);
            } else {
                coarse.step_with_increment(&mut a, [dw, 0.0]).unwrap();
            }
        }
        let d = (a.x[0] - b.x[0]).rem_euclid(std::f64::consts::TAU);
        total += d.min(std::f64::consts::TAU - d);
    }
    total / paths as f64
}

#[test]
fn halving_dt_reduces_strong_error() {
    let reference = 1e-2 / 32.0;
    let errors: Vec<f64> = [4e-2, 2e-2, 1e-2]
        .iter()
        .map(|&dt| strong_error(dt, reference, 40))
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < 0.75 * w[0]), "{errors:?}");
}
