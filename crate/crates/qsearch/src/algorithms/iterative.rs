//! The phase-robust iterative search operator
//! T = U R0^{-phi} U^dag Rt^dag U R0^{phi} U^dag Rt,
//! which rotates U|0> inside the plane spanned by sigma = Rt^dag U|0> and
//! its orthogonal complement tau, regardless of the oracle's rotation
//! angles. Two queries per step (Rt and Rt^dag).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::selective::{DiagonalPhaseOp, Selective};
use crate::state::{StateVector, TargetSet};
use crate::unitary::UnitaryFamily;

use super::{RunTrajectory, StepRecord};

/// Oracles rotating U|0> by less than this are treated as trivial.
pub const THETA_EPS: f64 = 1e-9;

/// The two-dimensional invariant plane of the iterative operator.
///
/// U|0> = omega (cos(theta) sigma + sin(theta) tau) exactly, where omega is
/// the phase of the overlap <sigma|U|0>.
#[derive(Debug, Clone)]
pub struct SubspaceFrame {
    pub sigma: StateVector,
    pub tau: StateVector,
    pub theta: f64,
    /// <sigma|U|0>; its modulus is cos(theta).
    pub overlap: Complex64,
}

pub fn compute_subspace_frame(u: &UnitaryFamily, rt: &dyn Selective) -> Result<SubspaceFrame> {
    if u.dim() != rt.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: rt.dim() });
    }
    let u0 = u.initial_state()?;
    let mut sigma = u0.clone();
    rt.apply_inverse(&mut sigma)?;
    let c = sigma.inner_product(&u0)?;
    let theta = c.norm().min(1.0).acos();
    if theta < THETA_EPS {
        return Err(Error::TrivialOracle { theta });
    }
    // tau = conj(omega) (U|0> - c sigma) / sin(theta); normalize by the
    // actual residual norm so rounding cannot leak into the frame
    let omega_bar = if c.norm() > 0.0 { (c / c.norm()).conj() } else { Complex64::ONE };
    let mut amps: Vec<Complex64> = u0
        .amplitudes()
        .iter()
        .zip(sigma.amplitudes())
        .map(|(a, s)| omega_bar * (a - c * s))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    let tau = StateVector::from_amplitudes(amps)?;
    Ok(SubspaceFrame { sigma, tau, theta, overlap: c })
}

/// Queries to rotate U|0> onto tau:
/// Q = pi / (4 sin(varphi/2) sqrt(sum_j |U_j0|^2 sin^2(phi_j/2))).
pub fn predict_iterative_queries(
    u: &UnitaryFamily,
    rt: &DiagonalPhaseOp,
    varphi: f64,
) -> Result<f64> {
    if u.dim() != rt.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: rt.dim() });
    }
    let u0 = u.initial_state()?;
    let sum: f64 = u0
        .amplitudes()
        .iter()
        .zip(rt.phases())
        .map(|(a, &p)| a.norm_sqr() * (p / 2.0).sin().powi(2))
        .sum();
    let denom = (varphi / 2.0).sin().abs() * sum.sqrt();
    if denom < 1e-15 {
        return Err(Error::DivergentQueryCount(denom));
    }
    Ok(PI / (4.0 * denom))
}

pub struct IterativeEngine<'a> {
    u: &'a UnitaryFamily,
    rt: &'a dyn Selective,
    targets: &'a TargetSet,
    varphi: f64,
    r0_factor: Complex64,
    frame: SubspaceFrame,
    state: StateVector,
    queries: u64,
    steps_taken: usize,
}

impl<'a> IterativeEngine<'a> {
    pub fn new(
        u: &'a UnitaryFamily,
        rt: &'a dyn Selective,
        varphi: f64,
        targets: &'a TargetSet,
    ) -> Result<Self> {
        if !varphi.is_finite() || varphi <= 0.0 || varphi >= 2.0 * PI {
            return Err(Error::InvalidRotationAngle(varphi));
        }
        if targets.dim() != u.dim() {
            return Err(Error::DimensionMismatch { left: u.dim(), right: targets.dim() });
        }
        let frame = compute_subspace_frame(u, rt)?;
        Ok(Self {
            u,
            rt,
            targets,
            varphi,
            r0_factor: Complex64::from_polar(1.0, varphi),
            frame,
            state: u.initial_state()?,
            queries: 0,
            steps_taken: 0,
        })
    }

    pub fn frame(&self) -> &SubspaceFrame {
        &self.frame
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Step count that lands closest to tau: floor(pi / (4 theta sin(varphi/2))),
    /// using the measured theta so non-uniform phase lists stop correctly.
    pub fn auto_iterations(&self) -> usize {
        (PI / (4.0 * self.frame.theta * (self.varphi / 2.0).sin())).floor() as usize
    }

    /// One application of the operator, rightmost factor first. R0 phases
    /// touch only the |0> amplitude, so they are applied directly.
    pub fn step(&mut self) -> Result<()> {
        self.rt.apply(&mut self.state)?;
        self.u.apply_inverse(&mut self.state)?;
        self.state.amplitudes_mut()[0] *= self.r0_factor;
        self.u.apply(&mut self.state)?;
        self.rt.apply_inverse(&mut self.state)?;
        self.u.apply_inverse(&mut self.state)?;
        self.state.amplitudes_mut()[0] *= self.r0_factor.conj();
        self.u.apply(&mut self.state)?;
        self.queries += 2;
        self.steps_taken += 1;
        Ok(())
    }

    pub fn angle_to_sigma(&self) -> f64 {
        let overlap = self
            .frame
            .sigma
            .inner_product(&self.state)
            .expect("frame and state share a dimension");
        overlap.norm().min(1.0).acos()
    }

    pub fn overlap_tau(&self) -> f64 {
        self.frame
            .tau
            .inner_product(&self.state)
            .expect("frame and state share a dimension")
            .norm()
    }

    fn record(&self) -> StepRecord {
        let alpha = self.state.target_projection(self.targets);
        StepRecord {
            step_index: self.steps_taken,
            oracle_queries: self.queries,
            alpha,
            success_prob: alpha * alpha,
            angle_to_sigma: Some(self.angle_to_sigma()),
            overlap_tau: Some(self.overlap_tau()),
        }
    }

    /// Run a fixed number of steps, or the auto-stop count when `None`.
    pub fn run(&mut self, n_iters: Option<usize>) -> Result<RunTrajectory> {
        let n = n_iters.unwrap_or_else(|| self.auto_iterations());
        let mut traj = RunTrajectory::default();
        traj.steps.push(self.record());
        for _ in 0..n {
            self.step()?;
            traj.steps.push(self.record());
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AmplificationEngine;

    fn uniform_setup(
        n_qubits: usize,
        target_indices: Vec<usize>,
        phi: f64,
    ) -> (UnitaryFamily, TargetSet, DiagonalPhaseOp) {
        let dim = 1 << n_qubits;
        let u = UnitaryFamily::WalshHadamard { n_qubits };
        let targets = TargetSet::new(target_indices, dim).unwrap();
        let rt = DiagonalPhaseOp::rotation(&targets, phi).unwrap();
        (u, targets, rt)
    }

    #[test]
    fn frame_is_orthonormal_and_reconstructs() {
        let dim = 1024;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 10 };
        let targets = TargetSet::new(vec![5, 100, 700], dim).unwrap();
        let rt = DiagonalPhaseOp::rotation_per_target(&targets, &[PI / 2.0, 1.0, 2.5]).unwrap();
        let f = compute_subspace_frame(&u, &rt).unwrap();
        assert!((f.sigma.norm() - 1.0).abs() < 1e-12);
        assert!((f.tau.norm() - 1.0).abs() < 1e-12);
        assert!(f.sigma.inner_product(&f.tau).unwrap().norm() < 1e-12);

        let u0 = u.initial_state().unwrap();
        let omega = f.overlap / f.overlap.norm();
        let mut err = 0.0f64;
        for j in 0..dim {
            let rebuilt = omega
                * (f.theta.cos() * f.sigma.amplitude(j) + f.theta.sin() * f.tau.amplitude(j));
            err = err.max((u0.amplitude(j) - rebuilt).norm());
        }
        assert!(err < 1e-12, "reconstruction error {err}");
    }

    #[test]
    fn inversion_angle_matches_closed_form() {
        let (u, _, rt) = uniform_setup(6, vec![1, 2, 3, 4], PI);
        let f = compute_subspace_frame(&u, &rt).unwrap();
        let expect = (1.0f64 - 2.0 * 4.0 / 64.0).acos();
        assert!((f.theta - expect).abs() < 1e-12);
    }

    #[test]
    fn tau_expansion_matches_for_exact_inversions() {
        // with real overlap the textbook expansion
        // tau = (1/sin t) sum_j U_j0 (1 - cos t e^{-i phi_j ind}) |j>
        // is exact
        let (u, _, rt) = uniform_setup(6, vec![9, 33], PI);
        let f = compute_subspace_frame(&u, &rt).unwrap();
        let u0 = u.initial_state().unwrap();
        let mut amps: Vec<Complex64> = u0
            .amplitudes()
            .iter()
            .zip(rt.phases())
            .map(|(a, &p)| {
                a * (Complex64::ONE - f.theta.cos() * Complex64::from_polar(1.0, -p))
            })
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        let expansion = StateVector::from_amplitudes(amps).unwrap();
        assert!(expansion.fidelity(&f.tau).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn tau_concentrates_on_targets() {
        let (u, targets, rt) = uniform_setup(6, vec![17], PI);
        let f = compute_subspace_frame(&u, &rt).unwrap();
        let alpha = u.initial_state().unwrap().target_projection(&targets);
        let off_target: f64 = f
            .tau
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(j, _)| !targets.contains(*j))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        assert!(off_target <= 2.0 * alpha * alpha, "off-target weight {off_target}");
    }

    #[test]
    fn half_marked_space_gives_a_right_angle() {
        // when <sigma|U|0> = 0 the plane geometry forces tau parallel to U|0>
        let (u, _, rt) = uniform_setup(4, (0..8).collect(), PI);
        let f = compute_subspace_frame(&u, &rt).unwrap();
        assert!((f.theta - PI / 2.0).abs() < 1e-12);
        let u0 = u.initial_state().unwrap();
        assert!(f.tau.fidelity(&u0).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn trivial_oracle_is_rejected() {
        let (u, targets, _) = uniform_setup(5, vec![3], PI);
        let rt = DiagonalPhaseOp::rotation(&targets, 0.0).unwrap();
        assert!(matches!(
            compute_subspace_frame(&u, &rt),
            Err(Error::TrivialOracle { .. })
        ));
    }

    #[test]
    fn varphi_range_is_validated() {
        let (u, targets, rt) = uniform_setup(5, vec![3], PI);
        for bad in [0.0, 2.0 * PI, -1.0, f64::NAN] {
            assert!(matches!(
                IterativeEngine::new(&u, &rt, bad, &targets),
                Err(Error::InvalidRotationAngle(_))
            ));
        }
    }

    #[test]
    fn all_pi_phases_reduce_to_two_amplification_steps() {
        let (u, targets, rt) = uniform_setup(6, vec![5], PI);
        let zero = TargetSet::new(vec![0], 64).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero).unwrap();
        let mut iter_eng = IterativeEngine::new(&u, &rt, PI, &targets).unwrap();
        let mut amp_eng = AmplificationEngine::new(&u, &s0, &rt, &targets).unwrap();
        for _ in 0..10 {
            iter_eng.step().unwrap();
            amp_eng.step().unwrap();
            amp_eng.step().unwrap();
            let f = iter_eng.state().fidelity(amp_eng.state()).unwrap();
            assert!(f >= 1.0 - 1e-12, "fidelity {f}");
        }
    }

    #[test]
    fn auto_stop_solves_the_mismatched_instance() {
        let (u, targets, rt) = uniform_setup(10, vec![1], PI / 2.0);
        let mut eng = IterativeEngine::new(&u, &rt, PI / 2.0, &targets).unwrap();
        assert_eq!(eng.auto_iterations(), 25);
        let traj = eng.run(None).unwrap();
        assert_eq!(traj.total_queries(), 50);
        assert!(traj.final_success().unwrap() >= 0.99);
    }

    #[test]
    fn steps_stay_in_the_invariant_plane() {
        let dim = 256;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 8 };
        let targets = TargetSet::new(vec![3, 90], dim).unwrap();
        let rt = DiagonalPhaseOp::rotation_per_target(&targets, &[1.2, 2.8]).unwrap();
        let mut eng = IterativeEngine::new(&u, &rt, 1.0, &targets).unwrap();
        for _ in 0..30 {
            eng.step().unwrap();
            let ps = eng.frame().sigma.inner_product(eng.state()).unwrap().norm_sqr();
            let pt = eng.frame().tau.inner_product(eng.state()).unwrap().norm_sqr();
            let leakage = (1.0 - ps - pt).abs();
            assert!(leakage <= 1e-10, "leakage {leakage}");
        }
    }

    #[test]
    fn query_predictions_match_closed_forms() {
        let (u, _, rt_pi) = uniform_setup(10, vec![1], PI);
        let grover = predict_iterative_queries(&u, &rt_pi, PI).unwrap();
        assert!((grover - PI * 8.0).abs() < 1e-9);

        let (_, _, rt_half) = uniform_setup(10, vec![1], PI / 2.0);
        let q = predict_iterative_queries(&u, &rt_half, PI / 2.0).unwrap();
        assert!((q - 50.265).abs() < 0.01, "q = {q}");
        // slowdown vs the all-pi case is 1/(sin(phi/2) sin(varphi/2)) = 2
        assert!((q / grover - 2.0).abs() < 1e-9);

        assert!(matches!(
            predict_iterative_queries(&u, &rt_half, 0.0),
            Err(Error::DivergentQueryCount(_))
        ));
    }
}
