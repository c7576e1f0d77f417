// randomized algebraic properties of the operators

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qsearch::{
    haar_random_unitary, operator_distance, ConjugatedOp, DenseUnitary, DiagonalPhaseOp,
    NoiseSpec, PerturbedSide, Selective, StateVector, TargetSet, UnitaryFamily, WorkspaceOracle,
};
use std::f64::consts::PI;

fn max_amp_dev(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn phases_for(n_qubits: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-PI..PI, 1usize << n_qubits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn walsh_hadamard_is_an_involution(seed in any::<u64>(), n_qubits in 1usize..=8) {
        let dim = 1usize << n_qubits;
        let u = UnitaryFamily::WalshHadamard { n_qubits };
        let mut s = StateVector::random(dim, seed).unwrap();
        let before = s.clone();
        u.apply(&mut s).unwrap();
        u.apply(&mut s).unwrap();
        prop_assert!(max_amp_dev(&s, &before) <= 1e-12);
    }

    #[test]
    fn diagonal_phases_compose_additively(
        (n_qubits, pa, pb) in (1usize..=6).prop_flat_map(|n| {
            (Just(n), phases_for(n), phases_for(n))
        }),
        seed in any::<u64>(),
    ) {
        let a = DiagonalPhaseOp::from_phases(pa).unwrap();
        let b = DiagonalPhaseOp::from_phases(pb).unwrap();
        let ab = a.compose(&b).unwrap();
        let mut s1 = StateVector::random(1 << n_qubits, seed).unwrap();
        let mut s2 = s1.clone();
        b.apply(&mut s1).unwrap();
        a.apply(&mut s1).unwrap();
        ab.apply(&mut s2).unwrap();
        prop_assert!(max_amp_dev(&s1, &s2) <= 1e-12);
    }

    #[test]
    fn conjugate_undoes_the_operator(
        (n_qubits, phases) in (1usize..=6).prop_flat_map(|n| (Just(n), phases_for(n))),
        seed in any::<u64>(),
    ) {
        let op = DiagonalPhaseOp::from_phases(phases).unwrap();
        let mut s = StateVector::random(1 << n_qubits, seed).unwrap();
        let before = s.clone();
        op.apply(&mut s).unwrap();
        op.conjugate().apply(&mut s).unwrap();
        prop_assert!(max_amp_dev(&s, &before) <= 1e-12);
    }

    #[test]
    fn sampled_noise_stays_within_the_spectral_band(
        seed in any::<u64>(),
        delta_t in 0.0f64..1.5,
        delta_0 in 0.0f64..1.5,
    ) {
        let dim = 64;
        let targets = TargetSet::derive(seed, dim, 3).unwrap();
        let zero = TargetSet::new(vec![0], dim).unwrap();
        let noise = NoiseSpec::uniform(delta_t, delta_0, seed);
        let st = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target).unwrap();
        let s0 = noise.sample_perturbed_inversion(&zero, PerturbedSide::Zero).unwrap();
        prop_assert!(operator_distance(&st, &targets) <= 2.0 * (delta_t / 2.0).sin() + 1e-12);
        prop_assert!(operator_distance(&s0, &zero) <= 2.0 * (delta_0 / 2.0).sin() + 1e-12);
    }

    #[test]
    fn noise_sampling_is_reproducible(seed in any::<u64>(), delta in 0.0f64..1.5) {
        let dim = 128;
        let targets = TargetSet::derive(seed ^ 0x5bd1e995, dim, 4).unwrap();
        let noise = NoiseSpec::uniform(delta, delta, seed);
        let a = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target).unwrap();
        let b = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target).unwrap();
        prop_assert_eq!(a.phases(), b.phases());
    }

    #[test]
    fn conjugated_operator_matches_the_dense_product(
        seed in any::<u64>(),
        (n_qubits, phases) in (2usize..=4).prop_flat_map(|n| (Just(n), phases_for(n))),
    ) {
        let dim = 1usize << n_qubits;
        let basis = haar_random_unitary(dim, seed).unwrap();
        let core = DiagonalPhaseOp::from_phases(phases).unwrap();

        let mut d = DMatrix::<Complex64>::zeros(dim, dim);
        for j in 0..dim {
            d[(j, j)] = Complex64::from_polar(1.0, core.phase(j));
        }
        let product = basis.matrix() * d * basis.matrix().adjoint();
        let dense = DenseUnitary::new(product).unwrap();

        let op = ConjugatedOp::new(basis, core).unwrap();
        let mut s1 = StateVector::random(dim, seed ^ 0xabcd).unwrap();
        let mut s2 = s1.clone();
        op.apply(&mut s1).unwrap();
        UnitaryFamily::Dense(dense).apply(&mut s2).unwrap();
        prop_assert!(max_amp_dev(&s1, &s2) <= 1e-11);
    }

    #[test]
    fn workspace_oracle_is_unitary_and_round_trips(
        seed in any::<u64>(),
        ancilla in 1usize..=2,
    ) {
        let dim = 32;
        let targets = TargetSet::derive(seed, dim, 2).unwrap();
        let w_dim = 1usize << ancilla;
        let a = haar_random_unitary(w_dim, seed).unwrap();
        let b = haar_random_unitary(w_dim, seed ^ 0x9e37).unwrap();
        let oracle = WorkspaceOracle::new(&targets, a, b, ancilla).unwrap();

        let mut s = StateVector::random(dim * w_dim, seed ^ 0x1234).unwrap();
        let before = s.clone();
        oracle.apply(&mut s).unwrap();
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
        oracle.apply_inverse(&mut s).unwrap();
        prop_assert!(max_amp_dev(&s, &before) <= 1e-12);
    }
}
