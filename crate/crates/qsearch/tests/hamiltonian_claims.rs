// continuous-time claims: resonance peaks, detuning collapse, and the
// invariant plane of the oracle-rotated generator

use num_complex::Complex64;
use qsearch::algorithms::compute_subspace_frame;
use qsearch::{DiagonalPhaseOp, SearchHamiltonian, Selective, TargetSet, UnitaryFamily};
use std::f64::consts::PI;

#[test]
fn detuning_collapses_the_projector_pair_peak() {
    let dim = 256;
    let u = UnitaryFamily::WalshHadamard { n_qubits: 8 };
    let targets = TargetSet::new(vec![1], dim).unwrap();
    let alpha = 1.0 / 16.0;
    let window = 1.3 * PI / (2.0 * alpha);

    let peak_at = |s: f64| {
        SearchHamiltonian::projector_pair(&u, &targets, s)
            .unwrap()
            .scan_target_probability(&targets, window, 2048)
            .unwrap()
            .peak_probability
    };

    let balanced = peak_at(0.0);
    let detuned_small = peak_at(4.0 * alpha);
    let detuned_large = peak_at(8.0 * alpha);

    assert!(balanced >= 0.99, "balanced peak {balanced}");
    assert!(detuned_large <= 0.5, "large detuning peak {detuned_large}");
    assert!(
        detuned_small < balanced - 0.3,
        "small detuning peak {detuned_small} vs {balanced}"
    );
}

#[test]
fn oracle_rotated_generator_reaches_the_marked_subspace() {
    let dim = 256;
    let u = UnitaryFamily::WalshHadamard { n_qubits: 8 };
    let targets = TargetSet::new(vec![1], dim).unwrap();
    let alpha = 1.0 / 16.0;
    let rt = DiagonalPhaseOp::rotation(&targets, PI / 2.0).unwrap();
    let h = SearchHamiltonian::oracle_rotated(&u, &rt).unwrap();

    let frame = compute_subspace_frame(&u, &rt).unwrap();
    let window = 1.3 * PI / (2.0 * frame.theta.sin());
    let scan = h.scan_target_probability(&targets, window, 2048).unwrap();
    assert!(
        scan.peak_probability >= 1.0 - 4.0 * alpha * alpha,
        "peak {}",
        scan.peak_probability
    );
}

#[test]
fn oracle_rotated_evolution_never_leaves_the_starting_plane() {
    let dim = 256;
    let u = UnitaryFamily::WalshHadamard { n_qubits: 8 };
    let targets = TargetSet::new(vec![1], dim).unwrap();
    let rt = DiagonalPhaseOp::rotation(&targets, PI / 2.0).unwrap();
    let h = SearchHamiltonian::oracle_rotated(&u, &rt).unwrap();

    // orthonormal basis for span{U|0>, sigma}
    let e1 = u.initial_state().unwrap();
    let mut sigma = e1.clone();
    rt.apply_inverse(&mut sigma).unwrap();
    let c = e1.inner_product(&sigma).unwrap();
    let mut e2_amps: Vec<Complex64> = sigma
        .amplitudes()
        .iter()
        .zip(e1.amplitudes())
        .map(|(s, a)| s - c * a)
        .collect();
    let norm = e2_amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut e2_amps {
        *a /= norm;
    }
    let e2 = qsearch::StateVector::from_amplitudes(e2_amps).unwrap();

    let frame = compute_subspace_frame(&u, &rt).unwrap();
    let window = 1.3 * PI / (2.0 * frame.theta.sin());
    for k in 0..24 {
        let t = window * k as f64 / 23.0;
        let mut state = h.start().clone();
        h.evolve(&mut state, t, h.max_step()).unwrap();
        let p1 = state.inner_product(&e1).unwrap().norm_sqr();
        let p2 = state.inner_product(&e2).unwrap().norm_sqr();
        let leak = (1.0 - p1 - p2).max(0.0);
        assert!(leak <= 1e-8, "out-of-plane probability {leak} at t={t}");
    }
}

#[test]
fn both_generators_agree_on_the_exact_inversion_instance() {
    // with an exact inversion oracle and one marked item the two kinds
    // search the same plane; their peaks differ only by O(alpha^2)
    let dim = 256;
    let u = UnitaryFamily::WalshHadamard { n_qubits: 8 };
    let targets = TargetSet::new(vec![9], dim).unwrap();
    let rt = DiagonalPhaseOp::inversion(&targets).unwrap();
    let alpha = 1.0 / 16.0;
    let window = 1.3 * PI / (2.0 * alpha);

    let pair = SearchHamiltonian::projector_pair(&u, &targets, 0.0)
        .unwrap()
        .scan_target_probability(&targets, window, 2048)
        .unwrap();
    let frame = compute_subspace_frame(&u, &rt).unwrap();
    let rot_window = 1.3 * PI / (2.0 * frame.theta.sin());
    let rotated = SearchHamiltonian::oracle_rotated(&u, &rt)
        .unwrap()
        .scan_target_probability(&targets, rot_window, 2048)
        .unwrap();

    assert!(pair.peak_probability >= 0.99);
    assert!((pair.peak_probability - rotated.peak_probability).abs() < 0.01);
}
