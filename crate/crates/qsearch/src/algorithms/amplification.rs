//! Amplitude amplification: iterate G = U S0 U^dag St on U|0>.
//!
//! Each iteration consumes one oracle query (the St application). With
//! exact inversions this is the textbook search iteration; with rotation
//! angles that violate phase matching it stalls, which is exactly the
//! failure mode the iterative engine exists to fix.

use crate::error::{Error, Result};
use crate::selective::Selective;
use crate::state::{StateVector, TargetSet};
use crate::unitary::UnitaryFamily;

use super::{RunTrajectory, StepRecord};

pub struct AmplificationEngine<'a> {
    u: &'a UnitaryFamily,
    s0: &'a dyn Selective,
    st: &'a dyn Selective,
    targets: &'a TargetSet,
    state: StateVector,
    queries: u64,
    steps_taken: usize,
}

impl<'a> AmplificationEngine<'a> {
    pub fn new(
        u: &'a UnitaryFamily,
        s0: &'a dyn Selective,
        st: &'a dyn Selective,
        targets: &'a TargetSet,
    ) -> Result<Self> {
        let dim = u.dim();
        for other in [s0.dim(), st.dim(), targets.dim()] {
            if other != dim {
                return Err(Error::DimensionMismatch { left: dim, right: other });
            }
        }
        Ok(Self {
            u,
            s0,
            st,
            targets,
            state: u.initial_state()?,
            queries: 0,
            steps_taken: 0,
        })
    }

    /// One G application, rightmost operator first.
    pub fn step(&mut self) -> Result<()> {
        self.st.apply(&mut self.state)?;
        self.u.apply_inverse(&mut self.state)?;
        self.s0.apply(&mut self.state)?;
        self.u.apply(&mut self.state)?;
        self.queries += 1;
        self.steps_taken += 1;
        Ok(())
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    fn record(&self) -> StepRecord {
        let alpha = self.state.target_projection(self.targets);
        StepRecord {
            step_index: self.steps_taken,
            oracle_queries: self.queries,
            alpha,
            success_prob: alpha * alpha,
            angle_to_sigma: None,
            overlap_tau: None,
        }
    }

    /// Run `n_iters` iterations, recording the state before the first step
    /// and after every step.
    pub fn run(&mut self, n_iters: usize) -> Result<RunTrajectory> {
        let mut traj = RunTrajectory::default();
        traj.steps.push(self.record());
        for _ in 0..n_iters {
            self.step()?;
            traj.steps.push(self.record());
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selective::DiagonalPhaseOp;
    use std::f64::consts::PI;

    #[test]
    fn exact_search_hits_the_closed_form() {
        let n = 1024;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 10 };
        let targets = TargetSet::new(vec![1], n).unwrap();
        let zero = TargetSet::new(vec![0], n).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero).unwrap();
        let st = DiagonalPhaseOp::inversion(&targets).unwrap();
        let mut eng = AmplificationEngine::new(&u, &s0, &st, &targets).unwrap();
        let traj = eng.run(25).unwrap();
        let theta = (1.0f64 / 32.0).asin();
        let closed = ((2.0 * 25.0 + 1.0) * theta).sin().powi(2);
        let got = traj.final_success().unwrap();
        assert!((got - closed).abs() < 1e-6, "got {got}, closed form {closed}");
        assert!(got >= 0.999);
        assert_eq!(traj.total_queries(), 25);
    }

    #[test]
    fn zero_iterations_reports_the_initial_projection() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 4 };
        let targets = TargetSet::new(vec![3, 7, 9, 12], 16).unwrap();
        let zero = TargetSet::new(vec![0], 16).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero).unwrap();
        let st = DiagonalPhaseOp::inversion(&targets).unwrap();
        let mut eng = AmplificationEngine::new(&u, &s0, &st, &targets).unwrap();
        let traj = eng.run(0).unwrap();
        assert_eq!(traj.len(), 1);
        assert!((traj.steps[0].alpha - 0.5).abs() < 1e-12);
        assert_eq!(traj.steps[0].oracle_queries, 0);
    }

    #[test]
    fn mismatched_rotations_stall() {
        let n = 1024;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 10 };
        let targets = TargetSet::new(vec![1], n).unwrap();
        let zero = TargetSet::new(vec![0], n).unwrap();
        let s0 = DiagonalPhaseOp::rotation(&zero, PI / 2.0).unwrap();
        let st = DiagonalPhaseOp::rotation(&targets, PI).unwrap();
        let mut eng = AmplificationEngine::new(&u, &s0, &st, &targets).unwrap();
        let traj = eng.run(250).unwrap();
        assert!(traj.max_success() <= 0.05, "max = {}", traj.max_success());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 4 };
        let targets = TargetSet::new(vec![1], 16).unwrap();
        let zero8 = TargetSet::new(vec![0], 8).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero8).unwrap();
        let st = DiagonalPhaseOp::inversion(&targets).unwrap();
        assert!(matches!(
            AmplificationEngine::new(&u, &s0, &st, &targets),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
