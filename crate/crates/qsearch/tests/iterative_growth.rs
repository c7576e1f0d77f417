// the angle to sigma grows linearly at 2 theta sin(varphi/2) per step
// while the rotation stays far from the equator

use qsearch::rng;
use qsearch::{DiagonalPhaseOp, IterativeEngine, TargetSet, UnitaryFamily};
use std::f64::consts::PI;

const PHASE_DOMAIN: u64 = 29;

#[test]
fn angle_growth_is_linear_for_small_theta() {
    let n_qubits = 14;
    let dim = 1usize << n_qubits;
    let u = UnitaryFamily::WalshHadamard { n_qubits };
    let varphi = PI / 2.0;
    let growth = 2.0 * (varphi / 2.0).sin();

    for seed in [3u64, 11, 42] {
        let targets = TargetSet::derive(seed, dim, 3).unwrap();
        // marked phases anywhere in [pi/2, 3pi/2], not just inversions
        let phis: Vec<f64> = (0..targets.count() as u64)
            .map(|k| PI + rng::uniform_symmetric(seed, PHASE_DOMAIN, k, PI / 2.0))
            .collect();
        let rt = DiagonalPhaseOp::rotation_per_target(&targets, &phis).unwrap();

        let mut engine = IterativeEngine::new(&u, &rt, varphi, &targets).unwrap();
        let theta = engine.frame().theta;
        assert!(theta < 0.03, "instance should start nearly parallel, theta {theta}");

        let traj = engine.run(None).unwrap();
        let mut checked = 0;
        for rec in &traj.steps {
            let predicted = theta * (1.0 + growth * rec.step_index as f64);
            if predicted > PI / 2.0 - 0.1 {
                break;
            }
            let measured = rec.angle_to_sigma.unwrap();
            assert!(
                (measured - predicted).abs() <= 0.01,
                "seed {seed} step {} measured {measured} predicted {predicted}",
                rec.step_index
            );
            checked += 1;
        }
        assert!(checked >= 10, "seed {seed} only {checked} steps in range");

        // two oracle queries per step, every step recorded
        let last = traj.last().unwrap();
        assert_eq!(last.oracle_queries, 2 * last.step_index as u64);
    }
}

#[test]
fn smaller_rotation_angles_slow_the_growth_proportionally() {
    let n_qubits = 12;
    let dim = 1usize << n_qubits;
    let u = UnitaryFamily::WalshHadamard { n_qubits };
    let targets = TargetSet::new(vec![5], dim).unwrap();
    let rt = DiagonalPhaseOp::inversion(&targets).unwrap();

    let mut angles = Vec::new();
    for varphi in [PI, PI / 2.0] {
        let mut engine = IterativeEngine::new(&u, &rt, varphi, &targets).unwrap();
        let traj = engine.run(Some(8)).unwrap();
        angles.push(traj.last().unwrap().angle_to_sigma.unwrap());
    }
    let theta = (1.0f64 / (dim as f64).sqrt()).asin();
    let ratio = (angles[0] - theta) / (angles[1] - theta);
    let expected = 1.0 / (PI / 4.0).sin();
    assert!(
        (ratio - expected).abs() < 0.05,
        "growth ratio {ratio}, expected {expected}"
    );
}
