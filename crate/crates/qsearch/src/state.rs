//! State vectors over n qubits and the index sets marked by an oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{self, DOMAIN_GAUSSIAN};

/// Tolerance on the norm of a freshly constructed state.
pub const NORM_TOL: f64 = 1e-10;

/// A normalized complex amplitude vector of power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

fn check_power_of_two(dim: usize) -> Result<()> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state |index> of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_power_of_two(dim)?;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(Self { amps })
    }

    /// The all-zeros basis state |0...0>.
    pub fn zero_state(dim: usize) -> Result<Self> {
        Self::basis(dim, 0)
    }

    /// Wrap raw amplitudes, enforcing power-of-two dimension and unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        check_power_of_two(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm, tol: NORM_TOL });
        }
        Ok(Self { amps })
    }

    /// A reproducible random state (gaussian amplitudes, then normalized).
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        check_power_of_two(dim)?;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|j| {
                Complex64::new(
                    rng::gaussian(seed, DOMAIN_GAUSSIAN, 2 * j as u64),
                    rng::gaussian(seed, DOMAIN_GAUSSIAN, 2 * j as u64 + 1),
                )
            })
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// <self|other>.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |<self|other>|, invariant under global phases.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner_product(other)?.norm())
    }

    /// Amplitude norm on the marked subspace, alpha = sqrt(sum_T |a_j|^2).
    pub fn target_projection(&self, targets: &TargetSet) -> f64 {
        targets
            .indices()
            .iter()
            .map(|&j| self.amps[j].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Probability of finding the state in the marked subspace.
    pub fn success_probability(&self, targets: &TargetSet) -> f64 {
        let alpha = self.target_projection(targets);
        alpha * alpha
    }
}

// ---------------------------------------------------------------- kernels

/// In-place Walsh-Hadamard transform over qubits [offset, offset+count).
///
/// Each stage is the standard size-2 butterfly; amplitudes are rescaled by
/// 2^(-count/2) at the end so the operator is unitary. O(N log N), no
/// allocation.
pub fn walsh_hadamard_in_place(state: &mut StateVector, offset: usize, count: usize) {
    let n = state.dim();
    assert!(offset + count <= state.num_qubits(), "qubit range out of bounds");
    let amps = &mut state.amps;
    for q in offset..offset + count {
        let stride = 1usize << q;
        let mut base = 0;
        while base < n {
            for i in base..base + stride {
                let a = amps[i];
                let b = amps[i + stride];
                amps[i] = a + b;
                amps[i + stride] = a - b;
            }
            base += stride << 1;
        }
    }
    let scale = (1.0 / (1u64 << count) as f64).sqrt();
    for a in amps.iter_mut() {
        *a *= scale;
    }
}

/// Apply a 2x2 matrix to one qubit of the register, in place.
pub fn single_qubit_in_place(state: &mut StateVector, qubit: usize, m: &[[Complex64; 2]; 2]) {
    let n = state.dim();
    assert!(qubit < state.num_qubits(), "qubit index out of bounds");
    let stride = 1usize << qubit;
    let amps = &mut state.amps;
    let mut base = 0;
    while base < n {
        for i in base..base + stride {
            let a = amps[i];
            let b = amps[i + stride];
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[i + stride] = m[1][0] * a + m[1][1] * b;
        }
        base += stride << 1;
    }
}

// ---------------------------------------------------------------- targets

/// The set of marked basis indices, 1 <= M < N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSet {
    indices: Vec<usize>,
    dim: usize,
}

impl TargetSet {
    /// Build from explicit indices; sorts, rejects duplicates and bounds.
    pub fn new(indices: impl Into<Vec<usize>>, dim: usize) -> Result<Self> {
        check_power_of_two(dim)?;
        let mut indices = indices.into();
        indices.sort_unstable();
        if indices.is_empty() {
            return Err(Error::EmptyTargetSet);
        }
        if let Some(&max) = indices.last() {
            if max >= dim {
                return Err(Error::IndexOutOfRange { index: max, dim });
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter {
                name: "targets",
                reason: "duplicate target index".into(),
            });
        }
        if indices.len() >= dim {
            return Err(Error::AllItemsMarked { marked: indices.len(), dim });
        }
        Ok(Self { indices, dim })
    }

    /// Derive `count` distinct marked indices from a seed.
    pub fn derive(seed: u64, dim: usize, count: usize) -> Result<Self> {
        check_power_of_two(dim)?;
        if count == 0 {
            return Err(Error::EmptyTargetSet);
        }
        if count >= dim {
            return Err(Error::AllItemsMarked { marked: count, dim });
        }
        Self::new(rng::derive_indices(seed, dim, count), dim)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Indicator mask over the full index range.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.dim];
        for &j in &self.indices {
            m[j] = true;
        }
        m
    }

    /// Lift to a register extended by `ancilla_qubits` low-order qubits:
    /// marked joint indices are { j * 2^w + k } for every marked j.
    pub fn with_ancilla(&self, ancilla_qubits: usize) -> Result<Self> {
        let w = 1usize << ancilla_qubits;
        let dim = self
            .dim
            .checked_mul(w)
            .ok_or(Error::CapabilityExceeded { got: usize::MAX, max: 1 << 20 })?;
        let indices: Vec<usize> = self
            .indices
            .iter()
            .flat_map(|&j| (0..w).map(move |k| j * w + k))
            .collect();
        Self::new(indices, dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn basis_state_is_normalized() {
        let s = StateVector::basis(8, 3).unwrap();
        assert!(approx(s.norm(), 1.0, 1e-15));
        assert_eq!(s.amplitude(3), Complex64::ONE);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(StateVector::basis(6, 0), Err(Error::NotPowerOfTwo(6)));
        assert!(matches!(
            StateVector::from_amplitudes(vec![Complex64::ONE; 3]),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let amps = vec![Complex64::new(0.9, 0.0), Complex64::ZERO];
        assert!(matches!(StateVector::from_amplitudes(amps), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn wht_of_zero_state_is_uniform() {
        let mut s = StateVector::zero_state(16).unwrap();
        walsh_hadamard_in_place(&mut s, 0, 4);
        for j in 0..16 {
            assert!(approx(s.amplitude(j).re, 0.25, 1e-14));
            assert!(approx(s.amplitude(j).im, 0.0, 1e-14));
        }
    }

    #[test]
    fn wht_is_an_involution() {
        let s0 = StateVector::random(64, 17).unwrap();
        let mut s = s0.clone();
        walsh_hadamard_in_place(&mut s, 0, 6);
        walsh_hadamard_in_place(&mut s, 0, 6);
        assert!(s.fidelity(&s0).unwrap() > 1.0 - 1e-13);
    }

    #[test]
    fn wht_on_a_sub_register_leaves_low_qubits_alone() {
        // two-qubit register, transform only qubit 1: |00> -> (|00>+|10>)/sqrt(2)
        let mut s = StateVector::zero_state(4).unwrap();
        walsh_hadamard_in_place(&mut s, 1, 1);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(approx(s.amplitude(0).re, r, 1e-15));
        assert!(approx(s.amplitude(2).re, r, 1e-15));
        assert!(approx(s.amplitude(1).norm(), 0.0, 1e-15));
    }

    #[test]
    fn inner_product_dimension_check() {
        let a = StateVector::zero_state(4).unwrap();
        let b = StateVector::zero_state(8).unwrap();
        assert_eq!(a.inner_product(&b), Err(Error::DimensionMismatch { left: 4, right: 8 }));
    }

    #[test]
    fn target_projection_of_uniform_state() {
        let mut s = StateVector::zero_state(1024).unwrap();
        walsh_hadamard_in_place(&mut s, 0, 10);
        let t = TargetSet::new(vec![5], 1024).unwrap();
        assert!(approx(s.target_projection(&t), 1.0 / 32.0, 1e-12));
        assert!(approx(s.success_probability(&t), 1.0 / 1024.0, 1e-14));
    }

    #[test]
    fn target_set_validation() {
        assert_eq!(TargetSet::new(vec![], 8), Err(Error::EmptyTargetSet));
        assert_eq!(
            TargetSet::new(vec![8], 8),
            Err(Error::IndexOutOfRange { index: 8, dim: 8 })
        );
        assert!(matches!(TargetSet::new(vec![1, 1], 8), Err(Error::InvalidParameter { .. })));
        assert!(matches!(
            TargetSet::new((0..8).collect::<Vec<_>>(), 8),
            Err(Error::AllItemsMarked { .. })
        ));
    }

    #[test]
    fn derived_targets_are_reproducible() {
        let a = TargetSet::derive(9, 256, 3).unwrap();
        let b = TargetSet::derive(9, 256, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.count(), 3);
    }

    #[test]
    fn ancilla_lift_marks_whole_workspace_blocks() {
        let t = TargetSet::new(vec![2], 4).unwrap();
        let lifted = t.with_ancilla(1).unwrap();
        assert_eq!(lifted.indices(), &[4, 5]);
        assert_eq!(lifted.dim(), 8);
    }
}
