mod common;

use common::DenseModel;
use num_complex::Complex64;
use pbgsim::dos::{discretize, DensityOfStates, DiscretizedReservoir, Scheme};
use pbgsim::dynamics::{propagate, rhs_one_excitation, rhs_two_excitation, AmplitudeEquations, Generator, PropagationConfig, SystemParams};
use pbgsim::observables::Observables;
use pbgsim::statespace::{build_basis, initial_state, InitialCondition, StateVector};
use proptest::prelude::*;

fn band_reservoir(n: usize, omega_u: f64, delta: f64) -> DiscretizedReservoir {
    let dos = DensityOfStates::for_band(n, 0.0, omega_u, 1.0).unwrap();
    discretize(&dos, n, omega_u, delta, Scheme::Midpoint).unwrap()
}

fn irregular_reservoir(n: usize) -> DiscretizedReservoir {
    let freqs: Vec<f64> = (0..n).map(|j| 0.3 + 0.71 * j as f64 + 0.05 * (j * j) as f64).collect();
    let couplings: Vec<f64> = (0..n).map(|j| 0.4 + 0.13 * j as f64).collect();
    DiscretizedReservoir::from_modes(0.0, freqs, couplings, 16.0, 0.27).unwrap()
}

fn pseudo_random_state(len: usize, seed: u64) -> StateVector {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    StateVector {
        amplitudes: (0..len).map(|_| Complex64::new(next(), next())).collect(),
    }
}

#[test]
fn rhs_matches_dense_operator_model() {
    let params = SystemParams {
        delta_o: 0.37,
        delta_d: -0.21,
        g_d: 0.8,
    };
    for n in 1..=3 {
        let res = irregular_reservoir(n);
        for p in 1..=2u32 {
            for has_defect in [false, true] {
                let basis = build_basis(p as usize, n, has_defect).unwrap();
                let dense = DenseModel::new(p, &params, &res, has_defect);
                assert_eq!(dense.dim(), basis.len());
                let psi = pseudo_random_state(basis.len(), (n * 10 + p as usize) as u64);
                let got = if p == 1 {
                    rhs_one_excitation(&params, &res, &psi).unwrap()
                } else {
                    rhs_two_excitation(&params, &res, &psi).unwrap()
                };
                let want = dense.derivative(&basis, &psi.amplitudes);
                for (g, w) in got.amplitudes.iter().zip(&want) {
                    assert!((g - w).norm() < 1e-13, "p={p} n={n} defect={has_defect}: {g} vs {w}");
                }
            }
        }
    }
}

#[test]
fn sparse_propagation_matches_exact_evolution() {
    let params = SystemParams {
        delta_o: -0.1,
        delta_d: -0.1,
        g_d: 1.0,
    };
    let res = band_reservoir(2, 16.0, 1.0);
    let basis = build_basis(2, 2, true).unwrap();
    assert_eq!(basis.len(), 9);
    let eqs = AmplitudeEquations::new(&params, &res, &basis).unwrap();
    let psi0 = initial_state(&basis, &InitialCondition::AtomExcitedDefectLoaded).unwrap();
    let cfg = PropagationConfig {
        t_max: 10.0,
        dt: 2.5e-4,
        sample_stride: 400,
        store_full_state: true,
    };
    let obs = Observables::new(&basis);
    let traj = propagate(&eqs, psi0.clone(), &cfg, |s| obs.record(s)).unwrap();

    let dense = DenseModel::new(2, &params, &res, true);
    let pos = dense.library_positions(&basis);
    let exact = dense.propagator();
    let start = common::to_dense_order(&pos, &psi0.amplitudes);
    for (t, state) in traj.times.iter().zip(traj.states.as_ref().unwrap()) {
        let want = exact.evolve(&start, *t);
        let d = common::sup_distance(&pos, &state.amplitudes, &want);
        assert!(d < 1e-9, "t={t}: {d}");
    }
}

#[test]
fn conserved_quantities_along_two_photon_run() {
    let params = SystemParams {
        delta_o: -0.1,
        delta_d: -0.1,
        g_d: 1.0,
    };
    let res = band_reservoir(20, 16.0, 0.05);
    let basis = build_basis(2, 20, true).unwrap();
    let eqs = AmplitudeEquations::new(&params, &res, &basis).unwrap();
    let obs = Observables::new(&basis);
    let psi0 = initial_state(&basis, &InitialCondition::AtomExcitedDefectLoaded).unwrap();
    let cfg = PropagationConfig {
        t_max: 5.0,
        dt: 1e-3,
        sample_stride: 50,
        store_full_state: false,
    };
    let traj = propagate(&eqs, psi0, &cfg, |s| obs.record(s)).unwrap();
    for r in &traj.observables {
        assert!((r.norm_sq - 1.0).abs() < 1e-8);
        assert!((r.n_total - 2.0).abs() < 1e-8);
        assert!((r.p_res_zero + r.p_res_one + r.p_res_two - r.norm_sq).abs() < 1e-12);
    }
}

#[test]
fn defect_stays_loaded_when_uncoupled() {
    let params = SystemParams {
        delta_o: 0.0,
        delta_d: -0.1,
        g_d: 0.0,
    };
    let res = band_reservoir(30, 16.0, 0.05);
    let basis = build_basis(2, 30, true).unwrap();
    let eqs = AmplitudeEquations::new(&params, &res, &basis).unwrap();
    let obs = Observables::new(&basis);
    let psi0 = initial_state(&basis, &InitialCondition::AtomExcitedDefectLoaded).unwrap();
    let cfg = PropagationConfig {
        t_max: 3.0,
        dt: 1e-3,
        sample_stride: 100,
        store_full_state: false,
    };
    let traj = propagate(&eqs, psi0, &cfg, |s| obs.record(s)).unwrap();
    for r in &traj.observables {
        assert!((r.n_defect - 1.0).abs() < 1e-10);
    }
}

#[test]
fn single_mode_rabi_oscillation() {
    let g = 0.6;
    let res = DiscretizedReservoir::from_modes(0.0, vec![0.0], vec![g], f64::INFINITY, 0.0).unwrap();
    let basis = build_basis(1, 1, false).unwrap();
    let eqs = AmplitudeEquations::new(&SystemParams::default(), &res, &basis).unwrap();
    let obs = Observables::new(&basis);
    let psi0 = initial_state(&basis, &InitialCondition::AtomExcited).unwrap();
    let cfg = PropagationConfig {
        t_max: 10.0,
        dt: 1e-3,
        sample_stride: 10,
        store_full_state: false,
    };
    let traj = propagate(&eqs, psi0, &cfg, |s| obs.record(s)).unwrap();
    for (t, r) in traj.times.iter().zip(&traj.observables) {
        assert!((r.p_excited - (g * t).cos().powi(2)).abs() < 1e-6);
    }
}

#[test]
fn defect_only_rabi_oscillation_has_sqrt_two() {
    let params = SystemParams {
        delta_o: -0.1,
        delta_d: -0.1,
        g_d: 0.7,
    };
    let res = DiscretizedReservoir::from_modes(0.0, Vec::new(), Vec::new(), f64::INFINITY, 0.0).unwrap();
    let basis = build_basis(2, 0, true).unwrap();
    assert_eq!(basis.len(), 2);
    let eqs = AmplitudeEquations::new(&params, &res, &basis).unwrap();
    let obs = Observables::new(&basis);
    let psi0 = initial_state(&basis, &InitialCondition::AtomExcitedDefectLoaded).unwrap();
    let cfg = PropagationConfig {
        t_max: 10.0,
        dt: 1e-3,
        sample_stride: 10,
        store_full_state: false,
    };
    let traj = propagate(&eqs, psi0, &cfg, |s| obs.record(s)).unwrap();
    let omega = 2f64.sqrt() * params.g_d;
    for (t, r) in traj.times.iter().zip(&traj.observables) {
        assert!((r.p_excited - (omega * t).cos().powi(2)).abs() < 1e-6);
    }
}

fn anti_hermiticity_defect(eqs: &AmplitudeEquations, a: &StateVector, b: &StateVector) -> f64 {
    let mut ga = vec![Complex64::new(0.0, 0.0); a.len()];
    let mut gb = vec![Complex64::new(0.0, 0.0); b.len()];
    eqs.derivative(&a.amplitudes, &mut ga);
    eqs.derivative(&b.amplitudes, &mut gb);
    let lhs: Complex64 = a.amplitudes.iter().zip(&gb).map(|(x, y)| x.conj() * y).sum();
    let rhs: Complex64 = ga.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum();
    let scale = a.norm_sq().sqrt() * b.norm_sq().sqrt() * eqs.max_frequency();
    (lhs + rhs).norm() / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generator_is_anti_hermitian(
        n in 1usize..12,
        p in 1usize..=2,
        has_defect: bool,
        seed_a in any::<u64>(),
        seed_b in any::<u64>(),
        delta_o in -2.0f64..2.0,
        delta_d in -2.0f64..2.0,
        g_d in 0.0f64..2.0,
    ) {
        let params = SystemParams { delta_o, delta_d, g_d };
        let res = irregular_reservoir(n);
        let basis = build_basis(p, n, has_defect).unwrap();
        let eqs = AmplitudeEquations::new(&params, &res, &basis).unwrap();
        let a = pseudo_random_state(basis.len(), seed_a);
        let b = pseudo_random_state(basis.len(), seed_b);
        prop_assert!(anti_hermiticity_defect(&eqs, &a, &b) < 1e-12);
    }

    #[test]
    fn excitation_number_is_conserved(n in 2usize..8, g_d in 0.0f64..1.5, seed in any::<u64>()) {
        let params = SystemParams { delta_o: 0.2, delta_d: -0.3, g_d };
        let res = band_reservoir(n, 16.0, 0.1);
        let basis = build_basis(2, n, true).unwrap();
        let eqs = AmplitudeEquations::new(&params, &res, &basis).unwrap();
        let obs = Observables::new(&basis);
        let psi0 = pseudo_random_state(basis.len(), seed).normalized().unwrap();
        let cfg = PropagationConfig { t_max: 1.0, dt: 1e-3, sample_stride: 100, store_full_state: false };
        let traj = propagate(&eqs, psi0, &cfg, |s| obs.record(s)).unwrap();
        for r in &traj.observables {
            prop_assert!((r.n_total - 2.0).abs() < 1e-8);
            prop_assert!((r.norm_sq - 1.0).abs() < 1e-8);
        }
    }
}
