// per-level gain of the noisy recursion against its closed-form floor

use qsearch::{
    kappa_lower_bound, run_recursive, NoiseSpec, PerturbedSide, TargetSet, UnitaryFamily,
};

#[test]
fn four_noisy_levels_keep_more_than_half_the_probability() {
    let dim = 4096;
    let u = UnitaryFamily::WalshHadamard { n_qubits: 12 };
    let targets = TargetSet::new(vec![1], dim).unwrap();
    let zero = TargetSet::new(vec![0], dim).unwrap();
    let noise = NoiseSpec::uniform(0.2, 0.2, 7);
    let s0 = noise
        .sample_perturbed_inversion(&zero, PerturbedSide::Zero)
        .unwrap();
    let st = noise
        .sample_perturbed_inversion(&targets, PerturbedSide::Target)
        .unwrap();

    let out = run_recursive(&u, &s0, &st, &targets, 4, None).unwrap();
    assert!(!out.truncated);
    assert_eq!(out.final_level().queries, 40);

    let success = out.final_level().alpha.powi(2);
    assert!(success >= 0.5, "final success {success}");

    let kappa1 = out.levels[1].kappa.unwrap();
    assert!(kappa1 >= 2.85, "kappa1 {kappa1}");
}

#[test]
fn first_level_gain_beats_the_closed_form_floor() {
    let dim = 4096;
    let u = UnitaryFamily::WalshHadamard { n_qubits: 12 };
    let targets = TargetSet::new(vec![1], dim).unwrap();
    let zero = TargetSet::new(vec![0], dim).unwrap();
    let alpha0 = 1.0 / (dim as f64).sqrt();

    for seed in 1..=5u64 {
        for delta_t in [0.1, 0.2, 0.3] {
            let noise = NoiseSpec::uniform(delta_t, 0.0, seed);
            let s0 = noise
                .sample_perturbed_inversion(&zero, PerturbedSide::Zero)
                .unwrap();
            let st = noise
                .sample_perturbed_inversion(&targets, PerturbedSide::Target)
                .unwrap();
            let out = run_recursive(&u, &s0, &st, &targets, 1, None).unwrap();
            let kappa = out.levels[1].kappa.unwrap();
            let floor = kappa_lower_bound(delta_t, 0.0, alpha0);
            assert!(
                kappa >= floor,
                "seed {seed} delta_t {delta_t}: kappa {kappa} < floor {floor}"
            );
        }
    }
}

#[test]
fn gain_declines_smoothly_with_the_noise_amplitude() {
    // same seed, increasing delta_t: kappa1 must be non-increasing to
    // within the sampling wobble of a single draw
    let dim = 4096;
    let u = UnitaryFamily::WalshHadamard { n_qubits: 12 };
    let targets = TargetSet::new(vec![1], dim).unwrap();
    let zero = TargetSet::new(vec![0], dim).unwrap();

    let mut previous = f64::INFINITY;
    for delta_t in [0.05, 0.15, 0.3, 0.45] {
        let noise = NoiseSpec::uniform(delta_t, 0.0, 13);
        let s0 = noise
            .sample_perturbed_inversion(&zero, PerturbedSide::Zero)
            .unwrap();
        let st = noise
            .sample_perturbed_inversion(&targets, PerturbedSide::Target)
            .unwrap();
        let out = run_recursive(&u, &s0, &st, &targets, 1, None).unwrap();
        let kappa = out.levels[1].kappa.unwrap();
        assert!(
            kappa <= previous + 5e-3,
            "kappa jumped from {previous} to {kappa} at delta_t {delta_t}"
        );
        previous = kappa;
    }
}
