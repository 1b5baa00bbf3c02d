//! Cross-module invariants checked against independent computational routes:
//! brute-force matrix exponentials, dense partial traces, displaced-parity
//! Wigner sums, and closed-form solutions.

mod common;

use common::{c, dense_partial_trace, displaced_parity_w, expm, random_density, random_state, seeded};
use rand::Rng;
use shg_core::hilbert::{block_hamiltonian, build_initial_state, Block, Mode, TwoModeState};
use shg_core::observables::{
    cat_fidelity_with, purity, quadrature_density, quadrature_variance, reduce_pump, CatSearch,
};
use shg_core::propagator::{evolve, evolve_series, uniform_grid};
use shg_core::wigner::{linear_axis, marginals, wigner_grid, WignerEvaluator};

#[test]
fn unitarity_and_conservation_on_random_states() {
    let mut rng = seeded(101);
    for _ in 0..200 {
        let max_n = 3 + rng.gen_range(0..20);
        let state = random_state(&mut rng, max_n);
        let gt = 4.0 * (rng.gen::<f64>() - 0.5);
        let evolved = evolve(&state, gt).unwrap();
        let norm_drift = (evolved.norm_sq() - state.norm_sq()).abs();
        assert!(norm_drift < 1e-10, "norm drift {norm_drift}");
        let q0 = state.conserved_quantity();
        let q1 = evolved.conserved_quantity();
        if q0 > 0.0 {
            assert!((q1 - q0).abs() / q0 < 1e-10);
        }
    }
}

#[test]
fn group_property_and_time_reversal_on_random_states() {
    let mut rng = seeded(102);
    for _ in 0..50 {
        let max_n = 3 + rng.gen_range(0..12);
        let state = random_state(&mut rng, max_n);
        let (t1, t2) = (rng.gen::<f64>(), rng.gen::<f64>());
        let two_step = evolve(&evolve(&state, t1).unwrap(), t2).unwrap();
        let direct = evolve(&state, t1 + t2).unwrap();
        assert!(state_distance(&two_step, &direct) < 1e-9);

        let back = evolve(&evolve(&state, t1).unwrap(), -t1).unwrap();
        assert!(state_distance(&back, &state) < 1e-9);
    }
}

fn state_distance(a: &TwoModeState, b: &TwoModeState) -> f64 {
    let mut acc = 0.0;
    for (ba, bb) in a.blocks().iter().zip(b.blocks()) {
        for (x, y) in ba.amps.iter().zip(&bb.amps) {
            acc += (x - y).norm_sqr();
        }
    }
    acc.sqrt()
}

#[test]
fn block_propagator_matches_taylor_exponential() {
    // exp(i gt T_N) from the eigensolver vs brute-force Taylor series,
    // elementwise on every block of dimension <= 6 (N <= 11)
    let mut rng = seeded(103);
    for n_total in 0..=11usize {
        let dim = n_total / 2 + 1;
        let gt = 0.2 + rng.gen::<f64>();
        let ham = block_hamiltonian(n_total);
        let mut a = vec![c(0.0, 0.0); dim * dim];
        for (k, &t) in ham.offdiag.iter().enumerate() {
            // i * gt * T
            a[k * dim + (k + 1)] = c(0.0, gt * t);
            a[(k + 1) * dim + k] = c(0.0, gt * t);
        }
        let reference = expm(&a, dim);

        // column k of the propagator = evolution of the basis state e_k
        for k in 0..dim {
            let mut amps = vec![c(0.0, 0.0); dim];
            amps[k] = c(1.0, 0.0);
            let state =
                TwoModeState::from_blocks(vec![Block { n_total, amps }], 1e-12, c(0.0, 0.0))
                    .unwrap();
            let evolved = evolve(&state, gt).unwrap();
            for i in 0..dim {
                let diff = (evolved.blocks()[0].amps[i] - reference[i * dim + k]).norm();
                assert!(diff < 1e-9, "N={n_total} column {k} row {i}: {diff}");
            }
        }
    }
}

#[test]
fn partial_trace_matches_dense_route() {
    let mut rng = seeded(104);
    for _ in 0..40 {
        let max_n = rng.gen_range(3..8);
        let state = random_state(&mut rng, max_n);
        let rho = reduce_pump(&state);
        let dense = dense_partial_trace(&state, rho.dim(), 8);
        for m in 0..rho.dim() {
            for n in 0..rho.dim() {
                let diff = (rho.entry(m, n) - dense[m * rho.dim() + n]).norm();
                assert!(diff < 1e-12, "({m},{n}): {diff}");
            }
        }
    }
}

#[test]
fn partial_trace_consistency_on_evolved_states() {
    let mut rng = seeded(105);
    for _ in 0..100 {
        let n = 1.0 + 7.0 * rng.gen::<f64>();
        let state = build_initial_state(c(n.sqrt(), 0.0), 1e-12).unwrap();
        let evolved = evolve(&state, rng.gen::<f64>()).unwrap();
        let rho = reduce_pump(&evolved);
        assert!((rho.trace() - 1.0).abs() < 1e-9);
        let expect = evolved.mean_photon(Mode::Pump) / evolved.norm_sq();
        assert!((rho.mean_photon() - expect).abs() < 1e-9);
        let p = purity(&rho);
        assert!(p >= 1.0 / rho.dim() as f64 - 1e-12);
        assert!(p <= 1.0 + 1e-9);
    }
}

#[test]
fn density_matrices_stay_positive_semidefinite() {
    let mut rng = seeded(106);
    for _ in 0..5 {
        let n = 2.0 + 4.0 * rng.gen::<f64>();
        let state = build_initial_state(c(n.sqrt(), 0.0), 1e-12).unwrap();
        let evolved = evolve(&state, 0.2 + rng.gen::<f64>()).unwrap();
        let rho = reduce_pump(&evolved);
        assert!(rho.min_eigenvalue() >= -1e-9);
    }
}

#[test]
fn wigner_kernels_match_displaced_parity() {
    let mut rng = seeded(107);
    for trial in 0..12 {
        let dim = rng.gen_range(2..=10);
        let rho = random_density(&mut rng, dim);
        let evaluator = WignerEvaluator::new(&rho);
        for _ in 0..6 {
            let x = 3.0 * (rng.gen::<f64>() - 0.5);
            let y = 3.0 * (rng.gen::<f64>() - 0.5);
            let fast = evaluator.eval(x, y);
            let oracle = displaced_parity_w(&rho, c(x, y), 50);
            assert!(
                (fast - oracle).abs() < 1e-8,
                "trial {trial} dim {dim} at ({x:.3},{y:.3}): {fast} vs {oracle}"
            );
        }
    }
}

#[test]
fn marginals_match_quadrature_distributions_on_random_matrices() {
    let mut rng = seeded(108);
    for trial in 0..20 {
        let dim = rng.gen_range(2..=8);
        let rho = random_density(&mut rng, dim);
        let axis = linear_axis(-6.0, 6.0, 241);
        let grid = wigner_grid(&rho, &axis, &axis).unwrap();
        let m = marginals(&grid);
        let dx = axis[1] - axis[0];
        let px = quadrature_density(&rho, 0.0, &axis);
        let py = quadrature_density(&rho, std::f64::consts::FRAC_PI_2, &axis);
        let l1x: f64 = m.p_x.iter().zip(&px).map(|(a, b)| (a - b).abs() * dx).sum();
        let l1y: f64 = m.p_y.iter().zip(&py).map(|(a, b)| (a - b).abs() * dx).sum();
        assert!(l1x < 1e-3, "trial {trial}: L1(x) {l1x}");
        assert!(l1y < 1e-3, "trial {trial}: L1(y) {l1y}");
    }
}

#[test]
fn squeezing_appears_at_the_first_photon_minimum() {
    // the pump state at the first <n1> minimum is quadrature squeezed
    let n = 50.0_f64;
    let state = build_initial_state(c(n.sqrt(), 0.0), 1e-12).unwrap();
    let grid = uniform_grid(0.4, 2e-3);
    let result = evolve_series(&state, &grid, false).unwrap();
    let min_idx = (1..result.n1_series.len() - 1)
        .find(|&i| {
            result.n1_series[i] < result.n1_series[i - 1]
                && result.n1_series[i] < result.n1_series[i + 1]
        })
        .expect("depletion minimum in range");
    let evolved = evolve(&state, result.times[min_idx]).unwrap();
    let rho = reduce_pump(&evolved);
    let min_var = (0..96)
        .map(|i| quadrature_variance(&rho, i as f64 * std::f64::consts::PI / 96.0))
        .fold(f64::INFINITY, f64::min);
    assert!(min_var < 0.25, "no squeezing: min variance {min_var}");
}

#[test]
fn cat_fidelity_is_monotone_under_refinement() {
    let state = build_initial_state(c(3.0, 0.0), 1e-12).unwrap();
    let evolved = evolve(&state, 0.45).unwrap();
    let rho = reduce_pump(&evolved);
    let coarse = cat_fidelity_with(&rho, CatSearch { refine_tol: 2e-3, ..CatSearch::default() });
    let fine = cat_fidelity_with(&rho, CatSearch { refine_tol: 1e-3, ..CatSearch::default() });
    assert!(
        fine.fidelity >= coarse.fidelity - 1e-9,
        "refinement must not lose fidelity: {} -> {}",
        coarse.fidelity,
        fine.fidelity
    );
}

#[test]
fn pump_recovers_to_two_thirds_at_the_n50_revival() {
    let state = build_initial_state(c(50.0_f64.sqrt(), 0.0), 1e-12).unwrap();
    let evolved = evolve(&state, 0.463).unwrap();
    let fraction = evolved.mean_photon(Mode::Pump) / 50.0;
    assert!(
        (0.62..=0.66).contains(&fraction),
        "<n1>/50 at gt = 0.463 is {fraction}"
    );
}

#[test]
fn classical_scatter_forms_two_lobes_mirrored_about_the_real_axis() {
    // 100 samples at the n = 50 revival maximum
    let config = shg_core::twigner::EnsembleConfig {
        keep_states: true,
        ..shg_core::twigner::EnsembleConfig::new(5, c(50.0_f64.sqrt(), 0.0), 100, 0.463)
    };
    let ensemble = shg_core::twigner::integrate_ensemble(&config).unwrap();
    let points = ensemble.final_scatter(0.463).unwrap();
    let upper = points.iter().filter(|p| p.im > 1.0).count();
    let lower = points.iter().filter(|p| p.im < -1.0).count();
    let near_axis = points.len() - upper - lower;
    assert!(upper >= 30, "upper lobe has only {upper} of 100 points");
    assert!(lower >= 30, "lower lobe has only {lower} of 100 points");
    assert!(near_axis <= 25, "{near_axis} points sit between the lobes");
    // mirror symmetry of the lobe pair
    let mean_im: f64 = points.iter().map(|p| p.im).sum::<f64>() / points.len() as f64;
    let spread: f64 = (points.iter().map(|p| p.im * p.im).sum::<f64>() / points.len() as f64).sqrt();
    assert!(mean_im.abs() < 0.35 * spread, "asymmetric lobes: mean Im {mean_im}, spread {spread}");
}

#[test]
fn quantum_and_classical_gt_max_agree_at_n_50() {
    let n = 50.0_f64;
    let state = build_initial_state(c(n.sqrt(), 0.0), 1e-12).unwrap();
    let grid = uniform_grid(0.8, 1e-3);
    let quantum = evolve_series(&state, &grid, false).unwrap();
    let q_report = shg_core::analysis::find_gt_max(&quantum.times, &quantum.n1_series).unwrap();

    let config = shg_core::twigner::EnsembleConfig::new(424242, c(n.sqrt(), 0.0), 10_000, 0.8);
    let ensemble = shg_core::twigner::integrate_ensemble(&config).unwrap();
    let mean = ensemble.mean_photon();
    let c_report = shg_core::analysis::find_gt_max(&ensemble.times, &mean).unwrap();
    assert!(
        (q_report.gt_max - c_report.gt_max).abs() < 0.01,
        "quantum {} vs classical {}",
        q_report.gt_max,
        c_report.gt_max
    );
}
