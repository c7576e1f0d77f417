//! Selective phase transformations and their imperfect variants.
//!
//! An ideal oracle flips the sign of marked basis states (or rotates them
//! by a chosen angle). The imperfect versions modelled here perturb every
//! phase by a bounded, seeded amount, so errors are reproducible and
//! reversible: asking for the inverse yields the exact inverse of the
//! perturbed operator, not a freshly perturbed one.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::{self, DOMAIN_TARGET_NOISE, DOMAIN_ZERO_NOISE};
use crate::state::{StateVector, TargetSet};
use crate::unitary::DenseUnitary;

/// Workspace registers are kept small; the joint space must stay simulable.
pub const MAX_ANCILLA_QUBITS: usize = 4;
pub const MAX_JOINT_DIM: usize = 1 << 20;

/// Anything that can act as a (possibly imperfect) selective operator.
pub trait Selective {
    fn dim(&self) -> usize;
    fn apply(&self, state: &mut StateVector) -> Result<()>;
    fn apply_inverse(&self, state: &mut StateVector) -> Result<()>;
}

fn check_state_dim(dim: usize, state: &StateVector) -> Result<()> {
    if state.dim() != dim {
        return Err(Error::DimensionMismatch { left: dim, right: state.dim() });
    }
    Ok(())
}

// ------------------------------------------------------------ diagonal ops

/// A diagonal unitary diag(e^{i phi_j}); phase factors are precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPhaseOp {
    phases: Vec<f64>,
    factors: Vec<Complex64>,
}

impl DiagonalPhaseOp {
    pub fn from_phases(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() || !phases.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(phases.len()));
        }
        let factors = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        Ok(Self { phases, factors })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_phases(vec![0.0; dim])
    }

    /// Phase `angle` on every listed index, 0 elsewhere.
    pub fn rotation(targets: &TargetSet, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidRotationAngle(angle));
        }
        let mut phases = vec![0.0; targets.dim()];
        for &j in targets.indices() {
            phases[j] = angle;
        }
        Self::from_phases(phases)
    }

    /// One angle per listed index (in the target set's sorted order).
    pub fn rotation_per_target(targets: &TargetSet, angles: &[f64]) -> Result<Self> {
        if angles.len() != targets.count() {
            return Err(Error::InvalidParameter {
                name: "angles",
                reason: format!(
                    "expected {} per-target angles, got {}",
                    targets.count(),
                    angles.len()
                ),
            });
        }
        if let Some(&bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidRotationAngle(bad));
        }
        let mut phases = vec![0.0; targets.dim()];
        for (&j, &a) in targets.indices().iter().zip(angles) {
            phases[j] = a;
        }
        Self::from_phases(phases)
    }

    /// Exact phase inversion of the listed indices.
    pub fn inversion(targets: &TargetSet) -> Result<Self> {
        Self::rotation(targets, PI)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn phase(&self, index: usize) -> f64 {
        self.phases[index]
    }

    /// The inverse operator, with phases negated.
    pub fn conjugate(&self) -> Self {
        Self::from_phases(self.phases.iter().map(|p| -p).collect()).expect("same dim")
    }

    /// Operator product: phases add index-wise.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Self::from_phases(
            self.phases
                .iter()
                .zip(&other.phases)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// A copy with one phase overwritten.
    pub fn with_phase_at(&self, index: usize, phase: f64) -> Result<Self> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange { index, dim: self.dim() });
        }
        let mut phases = self.phases.clone();
        phases[index] = phase;
        Self::from_phases(phases)
    }
}

impl Selective for DiagonalPhaseOp {
    fn dim(&self) -> usize {
        self.phases.len()
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        check_state_dim(self.dim(), state)?;
        for (a, f) in state.amplitudes_mut().iter_mut().zip(&self.factors) {
            *a *= f;
        }
        Ok(())
    }

    fn apply_inverse(&self, state: &mut StateVector) -> Result<()> {
        check_state_dim(self.dim(), state)?;
        for (a, f) in state.amplitudes_mut().iter_mut().zip(&self.factors) {
            *a *= f.conj();
        }
        Ok(())
    }
}

/// Spectral distance between `op` and the exact inversion of `targets`:
/// max_j |e^{i phi_j} - e^{i pi ind(j)}| = 2 max_j |sin(eps_j / 2)|.
pub fn operator_distance(op: &DiagonalPhaseOp, targets: &TargetSet) -> f64 {
    let mask = targets.mask();
    op.phases()
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let ideal = if mask[j] { PI } else { 0.0 };
            2.0 * ((p - ideal) / 2.0).sin().abs()
        })
        .fold(0.0, f64::max)
}

// ------------------------------------------------------------ seeded noise

/// How phase perturbations are drawn within the [-delta, delta] band.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseLaw {
    /// Independent uniform draws (the default).
    Uniform,
    /// Every index offset by exactly +delta (the adversarial corner).
    FixedOffset,
    /// Caller-supplied deviation per index.
    PerIndex(Vec<f64>),
}

/// Bounds, law and seed for perturbed selective transformations.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub delta_t: f64,
    pub delta_0: f64,
    pub law: NoiseLaw,
    pub seed: u64,
}

/// Which of the two imperfect operators is being drawn; the two sides use
/// disjoint sampler domains so their perturbations are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbedSide {
    Target,
    Zero,
}

impl NoiseSpec {
    pub fn exact(seed: u64) -> Self {
        Self { delta_t: 0.0, delta_0: 0.0, law: NoiseLaw::Uniform, seed }
    }

    pub fn uniform(delta_t: f64, delta_0: f64, seed: u64) -> Self {
        Self { delta_t, delta_0, law: NoiseLaw::Uniform, seed }
    }

    /// Perturbed inversion: phases = pi * indicator(j in targets) + eps_j,
    /// with |eps_j| <= delta on every index of the register.
    pub fn sample_perturbed_inversion(
        &self,
        targets: &TargetSet,
        side: PerturbedSide,
    ) -> Result<DiagonalPhaseOp> {
        let dim = targets.dim();
        let (delta, domain) = match side {
            PerturbedSide::Target => (self.delta_t, DOMAIN_TARGET_NOISE),
            PerturbedSide::Zero => (self.delta_0, DOMAIN_ZERO_NOISE),
        };
        if !(0.0..PI).contains(&delta) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("perturbation bound must satisfy 0 <= delta < pi, got {delta}"),
            });
        }
        let mask = targets.mask();
        let mut phases = Vec::with_capacity(dim);
        for j in 0..dim {
            let eps = match &self.law {
                NoiseLaw::Uniform => rng::uniform_symmetric(self.seed, domain, j as u64, delta),
                NoiseLaw::FixedOffset => delta,
                NoiseLaw::PerIndex(list) => {
                    if list.len() != dim {
                        return Err(Error::DimensionMismatch { left: list.len(), right: dim });
                    }
                    let v = list[j];
                    if v.abs() > delta {
                        return Err(Error::InvalidParameter {
                            name: "per_index",
                            reason: format!("|deviation[{j}]| = {} exceeds delta = {delta}", v.abs()),
                        });
                    }
                    v
                }
            };
            phases.push(if mask[j] { PI } else { 0.0 } + eps);
        }
        DiagonalPhaseOp::from_phases(phases)
    }
}

// ------------------------------------------------------------ conjugated ops

/// A diagonal core seen through a fixed change of basis: E * core * E^dag.
#[derive(Debug, Clone)]
pub struct ConjugatedOp {
    basis: DenseUnitary,
    core: DiagonalPhaseOp,
}

impl ConjugatedOp {
    pub fn new(basis: DenseUnitary, core: DiagonalPhaseOp) -> Result<Self> {
        if basis.dim() != core.dim() {
            return Err(Error::DimensionMismatch { left: basis.dim(), right: core.dim() });
        }
        Ok(Self { basis, core })
    }

    pub fn basis(&self) -> &DenseUnitary {
        &self.basis
    }

    pub fn core(&self) -> &DiagonalPhaseOp {
        &self.core
    }
}

impl Selective for ConjugatedOp {
    fn dim(&self) -> usize {
        self.core.dim()
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        check_state_dim(self.dim(), state)?;
        self.basis.apply_block(state.amplitudes_mut(), 0, true);
        self.core.apply(state)?;
        self.basis.apply_block(state.amplitudes_mut(), 0, false);
        Ok(())
    }

    fn apply_inverse(&self, state: &mut StateVector) -> Result<()> {
        check_state_dim(self.dim(), state)?;
        self.basis.apply_block(state.amplitudes_mut(), 0, true);
        self.core.apply_inverse(state)?;
        self.basis.apply_block(state.amplitudes_mut(), 0, false);
        Ok(())
    }
}

/// |E_jj| at one index; an operator conjugated by E still acts almost
/// selectively there when this is close to 1.
pub fn selectivity(basis: &DenseUnitary, index: usize) -> Result<f64> {
    if index >= basis.dim() {
        return Err(Error::IndexOutOfRange { index, dim: basis.dim() });
    }
    Ok(basis.entry(index, index).norm())
}

// ------------------------------------------------------------ workspace ops

/// An oracle that acts on an ancilla workspace conditioned on the search
/// register: block A on marked search indices, block B elsewhere. The
/// ancilla occupies the low-order qubits, so each search index owns one
/// contiguous block of amplitudes.
#[derive(Debug, Clone)]
pub struct WorkspaceOracle {
    mask: Vec<bool>,
    a: DenseUnitary,
    b: DenseUnitary,
    ancilla_qubits: usize,
}

impl WorkspaceOracle {
    pub fn new(
        targets: &TargetSet,
        a: DenseUnitary,
        b: DenseUnitary,
        ancilla_qubits: usize,
    ) -> Result<Self> {
        if ancilla_qubits == 0 || ancilla_qubits > MAX_ANCILLA_QUBITS {
            return Err(Error::InvalidParameter {
                name: "ancilla_qubits",
                reason: format!("expected 1..={MAX_ANCILLA_QUBITS}, got {ancilla_qubits}"),
            });
        }
        let w_dim = 1usize << ancilla_qubits;
        if a.dim() != w_dim {
            return Err(Error::DimensionMismatch { left: a.dim(), right: w_dim });
        }
        if b.dim() != w_dim {
            return Err(Error::DimensionMismatch { left: b.dim(), right: w_dim });
        }
        let joint = targets.dim() * w_dim;
        if joint > MAX_JOINT_DIM {
            return Err(Error::CapabilityExceeded { got: joint, max: MAX_JOINT_DIM });
        }
        Ok(Self { mask: targets.mask(), a, b, ancilla_qubits })
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn block_a(&self) -> &DenseUnitary {
        &self.a
    }

    pub fn block_b(&self) -> &DenseUnitary {
        &self.b
    }

    fn act(&self, state: &mut StateVector, inverse: bool) -> Result<()> {
        check_state_dim(self.dim(), state)?;
        let w_dim = 1usize << self.ancilla_qubits;
        let amps = state.amplitudes_mut();
        for (j, &marked) in self.mask.iter().enumerate() {
            let block = &mut amps[j * w_dim..(j + 1) * w_dim];
            let op = if marked { &self.a } else { &self.b };
            op.apply_block(block, 0, inverse);
        }
        Ok(())
    }
}

impl Selective for WorkspaceOracle {
    fn dim(&self) -> usize {
        self.mask.len() << self.ancilla_qubits
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.act(state, false)
    }

    fn apply_inverse(&self, state: &mut StateVector) -> Result<()> {
        self.act(state, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitary::haar_random_unitary;
    use nalgebra::DMatrix;

    fn states_close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn zero_inversion_flips_one_sign() {
        let t = TargetSet::new(vec![0], 8).unwrap();
        let op = DiagonalPhaseOp::inversion(&t).unwrap();
        let mut s = StateVector::random(8, 2).unwrap();
        let before = s.clone();
        op.apply(&mut s).unwrap();
        assert!((s.amplitude(0) + before.amplitude(0)).norm() < 1e-15);
        for j in 1..8 {
            assert!((s.amplitude(j) - before.amplitude(j)).norm() < 1e-15);
        }
    }

    #[test]
    fn per_target_angles_land_on_their_indices() {
        let t = TargetSet::new(vec![2, 5], 8).unwrap();
        let op = DiagonalPhaseOp::rotation_per_target(&t, &[PI / 2.0, PI / 3.0]).unwrap();
        let expect = [0.0, 0.0, PI / 2.0, 0.0, 0.0, PI / 3.0, 0.0, 0.0];
        for (a, b) in op.phases().iter().zip(expect) {
            assert_eq!(*a, b);
        }
    }

    #[test]
    fn conjugate_undoes_the_operator() {
        let t = TargetSet::derive(3, 64, 4).unwrap();
        let op = DiagonalPhaseOp::rotation(&t, 0.7).unwrap();
        let s0 = StateVector::random(64, 5).unwrap();
        let mut s = s0.clone();
        op.apply(&mut s).unwrap();
        op.conjugate().apply(&mut s).unwrap();
        assert!(states_close(&s, &s0, 1e-12));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let t = TargetSet::new(vec![1, 3], 16).unwrap();
        let a = DiagonalPhaseOp::rotation(&t, 0.4).unwrap();
        let b = DiagonalPhaseOp::rotation_per_target(&t, &[0.2, -0.9]).unwrap();
        let s0 = StateVector::random(16, 6).unwrap();
        let mut seq = s0.clone();
        a.apply(&mut seq).unwrap();
        b.apply(&mut seq).unwrap();
        let mut fused = s0;
        a.compose(&b).unwrap().apply(&mut fused).unwrap();
        assert!(states_close(&seq, &fused, 1e-12));
    }

    #[test]
    fn zero_noise_is_the_exact_inversion() {
        let t = TargetSet::new(vec![3], 32).unwrap();
        let spec = NoiseSpec::exact(11);
        let op = spec.sample_perturbed_inversion(&t, PerturbedSide::Target).unwrap();
        assert_eq!(op, DiagonalPhaseOp::inversion(&t).unwrap());
    }

    #[test]
    fn sampling_is_seed_deterministic_and_side_separated() {
        let t = TargetSet::new(vec![3], 64).unwrap();
        let spec = NoiseSpec::uniform(0.2, 0.2, 42);
        let a = spec.sample_perturbed_inversion(&t, PerturbedSide::Target).unwrap();
        let b = spec.sample_perturbed_inversion(&t, PerturbedSide::Target).unwrap();
        assert_eq!(a, b);
        let z = spec.sample_perturbed_inversion(&t, PerturbedSide::Zero).unwrap();
        assert_ne!(a.phases(), z.phases());
    }

    #[test]
    fn uniform_law_statistics_stay_in_band() {
        let dim = 1 << 10;
        let t = TargetSet::new(vec![7], dim).unwrap();
        let spec = NoiseSpec::uniform(0.2, 0.0, 5);
        let op = spec.sample_perturbed_inversion(&t, PerturbedSide::Target).unwrap();
        let mask = t.mask();
        let mut max_eps = 0.0f64;
        let mut mean_abs = 0.0f64;
        for (j, &p) in op.phases().iter().enumerate() {
            let eps = p - if mask[j] { PI } else { 0.0 };
            max_eps = max_eps.max(eps.abs());
            mean_abs += eps.abs();
        }
        mean_abs /= dim as f64;
        assert!(max_eps <= 0.2);
        assert!((mean_abs - 0.1).abs() < 0.02, "mean |eps| = {mean_abs}");
    }

    #[test]
    fn fixed_offset_law_hits_the_corner() {
        let t = TargetSet::new(vec![1], 8).unwrap();
        let spec = NoiseSpec { delta_t: 0.3, delta_0: 0.0, law: NoiseLaw::FixedOffset, seed: 0 };
        let op = spec.sample_perturbed_inversion(&t, PerturbedSide::Target).unwrap();
        for (j, &p) in op.phases().iter().enumerate() {
            let ideal = if j == 1 { PI } else { 0.0 };
            assert!((p - ideal - 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn per_index_law_is_validated() {
        let t = TargetSet::new(vec![1], 4).unwrap();
        let spec = NoiseSpec {
            delta_t: 0.1,
            delta_0: 0.0,
            law: NoiseLaw::PerIndex(vec![0.0, 0.2, 0.0, 0.0]),
            seed: 0,
        };
        assert!(matches!(
            spec.sample_perturbed_inversion(&t, PerturbedSide::Target),
            Err(Error::InvalidParameter { name: "per_index", .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let t = TargetSet::new(vec![2], 8).unwrap();
        let exact = DiagonalPhaseOp::inversion(&t).unwrap();
        assert_eq!(operator_distance(&exact, &t), 0.0);

        let perturbed = exact.with_phase_at(2, PI + 0.2).unwrap();
        let d = operator_distance(&perturbed, &t);
        assert!((d - 2.0 * (0.1f64).sin()).abs() < 1e-12, "d = {d}");

        let shifted =
            DiagonalPhaseOp::from_phases(exact.phases().iter().map(|p| p + PI).collect()).unwrap();
        assert!((operator_distance(&shifted, &t) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn distance_never_exceeds_the_chord_bound() {
        let t = TargetSet::new(vec![9], 256).unwrap();
        for seed in 0..20 {
            let spec = NoiseSpec::uniform(0.3, 0.0, seed);
            let op = spec.sample_perturbed_inversion(&t, PerturbedSide::Target).unwrap();
            assert!(operator_distance(&op, &t) <= 2.0 * (0.15f64).sin() + 1e-15);
        }
    }

    #[test]
    fn identity_basis_conjugation_is_the_core() {
        let dim = 16;
        let t = TargetSet::new(vec![4], dim).unwrap();
        let core = DiagonalPhaseOp::rotation(&t, 1.1).unwrap();
        let e = DenseUnitary::new(DMatrix::identity(dim, dim)).unwrap();
        let op = ConjugatedOp::new(e, core.clone()).unwrap();
        let mut a = StateVector::random(dim, 21).unwrap();
        let mut b = a.clone();
        op.apply(&mut a).unwrap();
        core.apply(&mut b).unwrap();
        assert!(states_close(&a, &b, 1e-14));
    }

    #[test]
    fn conjugated_op_matches_dense_product() {
        let dim = 16;
        let e = haar_random_unitary(dim, 77).unwrap();
        let t = TargetSet::new(vec![0, 9], dim).unwrap();
        let core = DiagonalPhaseOp::rotation_per_target(&t, &[0.8, -0.5]).unwrap();
        let op = ConjugatedOp::new(e.clone(), core.clone()).unwrap();

        let mut d = DMatrix::<Complex64>::zeros(dim, dim);
        for j in 0..dim {
            d[(j, j)] = Complex64::from_polar(1.0, core.phase(j));
        }
        let product = DenseUnitary::new(e.matrix() * d * e.matrix().adjoint()).unwrap();

        let s0 = StateVector::random(dim, 30).unwrap();
        let mut via_op = s0.clone();
        op.apply(&mut via_op).unwrap();
        let mut via_dense = s0;
        product.apply_block(via_dense.amplitudes_mut(), 0, false);
        assert!(states_close(&via_op, &via_dense, 1e-11));
    }

    #[test]
    fn conjugated_round_trip() {
        let dim = 32;
        let e = haar_random_unitary(dim, 3).unwrap();
        let t = TargetSet::new(vec![5], dim).unwrap();
        let op = ConjugatedOp::new(e, DiagonalPhaseOp::rotation(&t, 2.0).unwrap()).unwrap();
        let s0 = StateVector::random(dim, 40).unwrap();
        let mut s = s0.clone();
        op.apply(&mut s).unwrap();
        op.apply_inverse(&mut s).unwrap();
        assert!(s.fidelity(&s0).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn selectivity_flags_generic_bases() {
        let dim = 64;
        let id = DenseUnitary::new(DMatrix::identity(dim, dim)).unwrap();
        assert_eq!(selectivity(&id, 0).unwrap(), 1.0);
        let random = haar_random_unitary(dim, 19).unwrap();
        let s = selectivity(&random, 0).unwrap();
        assert!(s < 0.9, "random basis should look non-selective, got {s}");
    }

    #[test]
    fn workspace_oracle_with_minus_identity_reduces_to_inversion() {
        let search = TargetSet::new(vec![2], 8).unwrap();
        let w = 1;
        let minus_i = DenseUnitary::new(DMatrix::identity(2, 2).scale(-1.0)).unwrap();
        let id = DenseUnitary::new(DMatrix::identity(2, 2)).unwrap();
        let oracle = WorkspaceOracle::new(&search, minus_i, id, w).unwrap();

        let lifted = search.with_ancilla(w).unwrap();
        let plain = DiagonalPhaseOp::inversion(&lifted).unwrap();
        let s0 = StateVector::random(16, 50).unwrap();
        let mut a = s0.clone();
        oracle.apply(&mut a).unwrap();
        let mut b = s0;
        plain.apply(&mut b).unwrap();
        assert!(states_close(&a, &b, 1e-14));
    }

    #[test]
    fn workspace_oracle_validates_sizes() {
        let search = TargetSet::new(vec![0], 8).unwrap();
        let id2 = DenseUnitary::new(DMatrix::identity(2, 2)).unwrap();
        let id4 = DenseUnitary::new(DMatrix::identity(4, 4)).unwrap();
        assert!(matches!(
            WorkspaceOracle::new(&search, id2.clone(), id4, 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            WorkspaceOracle::new(&search, id2.clone(), id2.clone(), 0),
            Err(Error::InvalidParameter { .. })
        ));
        let big = TargetSet::new(vec![0], 1 << 18).unwrap();
        let id16 = DenseUnitary::new(DMatrix::identity(16, 16)).unwrap();
        assert!(matches!(
            WorkspaceOracle::new(&big, id16.clone(), id16, 4),
            Err(Error::CapabilityExceeded { .. })
        ));
    }
}
