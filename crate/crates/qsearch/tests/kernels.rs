// long-haul numerical checks on the in-place kernels

use num_complex::Complex64;
use qsearch::rng;
use qsearch::state::single_qubit_in_place;
use qsearch::unitary::single_qubit_rotation;
use qsearch::{haar_random_unitary, DiagonalPhaseOp, Selective, StateVector, UnitaryFamily};
use std::f64::consts::PI;

const MIX_DOMAIN: u64 = 17;

#[test]
fn ten_thousand_kernels_keep_the_norm() {
    let n_qubits = 16usize;
    let dim = 1usize << n_qubits;
    let mut state = StateVector::random(dim, 1).unwrap();
    let phases: Vec<f64> = (0..dim)
        .map(|j| rng::uniform_symmetric(2, MIX_DOMAIN, j as u64, PI))
        .collect();
    let diag = DiagonalPhaseOp::from_phases(phases).unwrap();
    let wht = UnitaryFamily::WalshHadamard { n_qubits };

    for k in 0..10_000u64 {
        if k % 1000 == 999 {
            wht.apply(&mut state).unwrap();
            continue;
        }
        match rng::stream_value(3, MIX_DOMAIN, k) % 3 {
            0 => diag.apply(&mut state).unwrap(),
            1 => diag.apply_inverse(&mut state).unwrap(),
            _ => {
                let angle = rng::uniform_symmetric(4, MIX_DOMAIN, k, PI);
                let gate = single_qubit_rotation(angle);
                single_qubit_in_place(&mut state, (k % n_qubits as u64) as usize, &gate);
            }
        }
    }
    assert!(
        (state.norm() - 1.0).abs() <= 1e-9,
        "norm drifted to {}",
        state.norm()
    );
}

#[test]
fn fast_transform_matches_the_dense_hadamard() {
    for n_qubits in 1..=8usize {
        let dim = 1usize << n_qubits;
        let scale = 1.0 / (dim as f64).sqrt();
        let m = nalgebra::DMatrix::from_fn(dim, dim, |i, j| {
            let sign = if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * scale, 0.0)
        });
        let dense = UnitaryFamily::Dense(qsearch::DenseUnitary::new(m).unwrap());
        let fast = UnitaryFamily::WalshHadamard { n_qubits };

        let mut a = StateVector::random(dim, 7 + n_qubits as u64).unwrap();
        let mut b = a.clone();
        fast.apply(&mut a).unwrap();
        dense.apply(&mut b).unwrap();
        let max_dev = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(max_dev <= 1e-12, "n={n_qubits}, dev {max_dev}");
    }
}

#[test]
fn every_family_round_trips_through_its_inverse() {
    let angles: Vec<f64> = (0..6)
        .map(|k| rng::uniform_symmetric(11, MIX_DOMAIN, k, PI))
        .collect();
    let families = vec![
        UnitaryFamily::WalshHadamard { n_qubits: 6 },
        UnitaryFamily::product_of_rotations(&angles),
        UnitaryFamily::Dense(haar_random_unitary(64, 5).unwrap()),
        UnitaryFamily::WithAncilla {
            base: Box::new(UnitaryFamily::WalshHadamard { n_qubits: 4 }),
            ancilla_qubits: 2,
        },
    ];
    for u in &families {
        let mut s = StateVector::random(u.dim(), 23).unwrap();
        let before = s.clone();
        u.apply(&mut s).unwrap();
        assert!((s.norm() - 1.0).abs() <= 1e-12);
        u.apply_inverse(&mut s).unwrap();
        let dev = s
            .amplitudes()
            .iter()
            .zip(before.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-12, "round trip dev {dev}");
    }
}

#[test]
fn dense_application_preserves_inner_products() {
    let u = UnitaryFamily::Dense(haar_random_unitary(64, 9).unwrap());
    let mut a = StateVector::random(64, 31).unwrap();
    let mut b = StateVector::random(64, 32).unwrap();
    let before = a.inner_product(&b).unwrap();
    u.apply(&mut a).unwrap();
    u.apply(&mut b).unwrap();
    let after = a.inner_product(&b).unwrap();
    assert!((before - after).norm() <= 1e-12);
}
