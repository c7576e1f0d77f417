//! The unitary U that prepares the search state, in a few representations.
//!
//! All kernels act in place on a `StateVector` and take a qubit offset so
//! the same operator can be embedded above an ancilla register.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{self, DOMAIN_MATRIX};
use crate::state::{single_qubit_in_place, walsh_hadamard_in_place, StateVector};

/// Largest dimension we accept for an explicitly stored matrix.
pub const MAX_DENSE_DIM: usize = 4096;
/// Construction-time bound on ||M^dag M - I||_max.
pub const UNITARITY_TOL: f64 = 1e-10;

pub type Mat2 = [[Complex64; 2]; 2];

/// Real rotation by `angle` in the |0>,|1> plane; angle 0 is the identity.
pub fn single_qubit_rotation(angle: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    [[re(c), re(-s)], [re(s), re(c)]]
}

fn adjoint2(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

// ------------------------------------------------------------ dense matrices

/// A verified unitary matrix of power-of-two dimension at most 4096.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    m: DMatrix<Complex64>,
}

impl DenseUnitary {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: m.ncols() });
        }
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if dim > MAX_DENSE_DIM {
            return Err(Error::CapabilityExceeded { got: dim, max: MAX_DENSE_DIM });
        }
        let gram = m.adjoint() * &m;
        let mut deviation = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                deviation = deviation.max((gram[(i, j)] - target).norm());
            }
        }
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    /// Act on the qubits [offset, offset + log2(dim)) of a larger register.
    pub(crate) fn apply_block(&self, amps: &mut [Complex64], offset: usize, inverse: bool) {
        let k = self.dim();
        let low = 1usize << offset;
        let block = low * k;
        debug_assert_eq!(amps.len() % block, 0);
        let mut scratch = vec![Complex64::ZERO; k];
        let mut base = 0;
        while base < amps.len() {
            for l in 0..low {
                for (i, s) in scratch.iter_mut().enumerate() {
                    *s = amps[base + l + i * low];
                }
                for i in 0..k {
                    let mut acc = Complex64::ZERO;
                    if inverse {
                        for (j, s) in scratch.iter().enumerate() {
                            acc += self.m[(j, i)].conj() * s;
                        }
                    } else {
                        for (j, s) in scratch.iter().enumerate() {
                            acc += self.m[(i, j)] * s;
                        }
                    }
                    amps[base + l + i * low] = acc;
                }
            }
            base += block;
        }
    }
}

/// Haar-distributed random unitary: QR of a gaussian matrix with the
/// R diagonal phases folded back into Q.
pub fn haar_random_unitary(dim: usize, seed: u64) -> Result<DenseUnitary> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if dim > MAX_DENSE_DIM {
        return Err(Error::CapabilityExceeded { got: dim, max: MAX_DENSE_DIM });
    }
    let g = gaussian_matrix(dim, seed, 0);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    DenseUnitary::new(q)
}

/// exp(iA) for a random Hermitian A rescaled so its spectral norm is
/// `magnitude`; magnitude 0 gives the identity.
pub fn near_identity_unitary(dim: usize, seed: u64, magnitude: f64) -> Result<DenseUnitary> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if dim > MAX_DENSE_DIM {
        return Err(Error::CapabilityExceeded { got: dim, max: MAX_DENSE_DIM });
    }
    if !(0.0..=std::f64::consts::PI).contains(&magnitude) {
        return Err(Error::InvalidParameter {
            name: "magnitude",
            reason: format!("expected 0 <= magnitude <= pi, got {magnitude}"),
        });
    }
    let g = gaussian_matrix(dim, seed, 1 << 40);
    let herm = (&g + g.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let scale = if top > 0.0 { magnitude / top } else { 0.0 };
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, lambda * scale);
        let v = eig.eigenvectors.column(k);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += phase * v[i] * v[j].conj();
            }
        }
    }
    DenseUnitary::new(out)
}

fn gaussian_matrix(dim: usize, seed: u64, k_offset: u64) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        let k = k_offset + 2 * (i * dim + j) as u64;
        Complex64::new(
            rng::gaussian(seed, DOMAIN_MATRIX, k),
            rng::gaussian(seed, DOMAIN_MATRIX, k + 1),
        )
    })
}

// ------------------------------------------------------------ the family

/// The operators usable as the state-preparation unitary U.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitaryFamily {
    /// Walsh-Hadamard transform on n qubits (the classic uniform case).
    WalshHadamard { n_qubits: usize },
    /// One 2x2 gate per qubit, optionally sandwiched between WHT layers.
    QubitProduct {
        gates: Vec<Mat2>,
        wht_before: bool,
        wht_after: bool,
    },
    /// An explicit matrix.
    Dense(DenseUnitary),
    /// `base` acting on the high-order qubits, identity on `ancilla_qubits`
    /// low-order ones (joint index = base_index * 2^w + ancilla_index).
    WithAncilla {
        base: Box<UnitaryFamily>,
        ancilla_qubits: usize,
    },
}

impl UnitaryFamily {
    pub fn product_of_rotations(angles: &[f64]) -> Self {
        UnitaryFamily::QubitProduct {
            gates: angles.iter().map(|&a| single_qubit_rotation(a)).collect(),
            wht_before: false,
            wht_after: false,
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            UnitaryFamily::WalshHadamard { n_qubits } => *n_qubits,
            UnitaryFamily::QubitProduct { gates, .. } => gates.len(),
            UnitaryFamily::Dense(d) => d.dim().trailing_zeros() as usize,
            UnitaryFamily::WithAncilla { base, ancilla_qubits } => {
                base.num_qubits() + ancilla_qubits
            }
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits()
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.check_dim(state)?;
        self.apply_impl(state, 0, false);
        Ok(())
    }

    pub fn apply_inverse(&self, state: &mut StateVector) -> Result<()> {
        self.check_dim(state)?;
        self.apply_impl(state, 0, true);
        Ok(())
    }

    /// U|0>, whose amplitudes are the matrix elements U_{j0}.
    pub fn initial_state(&self) -> Result<StateVector> {
        let mut s = StateVector::zero_state(self.dim())?;
        self.apply(&mut s)?;
        Ok(s)
    }

    /// Materialize as a matrix by applying to every basis vector.
    pub fn to_dense(&self) -> Result<DenseUnitary> {
        let dim = self.dim();
        if dim > MAX_DENSE_DIM {
            return Err(Error::CapabilityExceeded { got: dim, max: MAX_DENSE_DIM });
        }
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for j in 0..dim {
            let mut s = StateVector::basis(dim, j)?;
            self.apply(&mut s)?;
            for (i, a) in s.amplitudes().iter().enumerate() {
                m[(i, j)] = *a;
            }
        }
        DenseUnitary::new(m)
    }

    fn check_dim(&self, state: &StateVector) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: state.dim() });
        }
        Ok(())
    }

    fn apply_impl(&self, state: &mut StateVector, offset: usize, inverse: bool) {
        match self {
            UnitaryFamily::WalshHadamard { n_qubits } => {
                // self-adjoint, so the inverse is the same transform
                walsh_hadamard_in_place(state, offset, *n_qubits);
            }
            UnitaryFamily::QubitProduct { gates, wht_before, wht_after } => {
                let n = gates.len();
                let wht = |s: &mut StateVector| walsh_hadamard_in_place(s, offset, n);
                let first = if inverse { *wht_after } else { *wht_before };
                let last = if inverse { *wht_before } else { *wht_after };
                if first {
                    wht(state);
                }
                for (q, g) in gates.iter().enumerate() {
                    let m = if inverse { adjoint2(g) } else { *g };
                    single_qubit_in_place(state, offset + q, &m);
                }
                if last {
                    wht(state);
                }
            }
            UnitaryFamily::Dense(d) => {
                d.apply_block(state.amplitudes_mut(), offset, inverse);
            }
            UnitaryFamily::WithAncilla { base, ancilla_qubits } => {
                base.apply_impl(state, offset + ancilla_qubits, inverse);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wht_gives_uniform_amplitudes() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 3 };
        let s = u.initial_state().unwrap();
        let expect = 1.0 / 8.0f64.sqrt();
        for j in 0..8 {
            assert!((s.amplitude(j).re - expect).abs() < 1e-14);
            assert!(s.amplitude(j).im.abs() < 1e-15);
        }
    }

    #[test]
    fn zero_angle_product_is_identity() {
        let u = UnitaryFamily::product_of_rotations(&[0.0; 5]);
        let mut s = StateVector::random(32, 3).unwrap();
        let before = s.clone();
        u.apply(&mut s).unwrap();
        assert!(s.fidelity(&before).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn rejects_non_unitary_matrix() {
        let m = DMatrix::<Complex64>::identity(4, 4).scale(1.01);
        assert!(matches!(DenseUnitary::new(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn rejects_oversized_matrix() {
        let m = DMatrix::<Complex64>::identity(8192, 8192);
        assert!(matches!(
            DenseUnitary::new(m),
            Err(Error::CapabilityExceeded { got: 8192, max: MAX_DENSE_DIM })
        ));
    }

    #[test]
    fn haar_sample_is_unitary_and_seed_stable() {
        let a = haar_random_unitary(32, 12).unwrap();
        let b = haar_random_unitary(32, 12).unwrap();
        assert_eq!(a, b);
        let c = haar_random_unitary(32, 13).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn inverse_is_the_adjoint() {
        let u = UnitaryFamily::Dense(haar_random_unitary(16, 4).unwrap());
        let phi = StateVector::random(16, 100).unwrap();
        let psi = StateVector::random(16, 101).unwrap();
        let mut u_phi = phi.clone();
        u.apply(&mut u_phi).unwrap();
        let mut udag_psi = psi.clone();
        u.apply_inverse(&mut udag_psi).unwrap();
        let lhs = u_phi.inner_product(&psi).unwrap();
        let rhs = phi.inner_product(&udag_psi).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn round_trip_restores_the_state() {
        let u = UnitaryFamily::QubitProduct {
            gates: (0..4).map(|q| single_qubit_rotation(0.3 * q as f64)).collect(),
            wht_before: true,
            wht_after: false,
        };
        let s0 = StateVector::random(16, 8).unwrap();
        let mut s = s0.clone();
        u.apply(&mut s).unwrap();
        u.apply_inverse(&mut s).unwrap();
        assert!(s.fidelity(&s0).unwrap() > 1.0 - 1e-13);
    }

    #[test]
    fn ancilla_wrapper_acts_on_high_qubits() {
        let base = UnitaryFamily::WalshHadamard { n_qubits: 2 };
        let u = UnitaryFamily::WithAncilla { base: Box::new(base), ancilla_qubits: 1 };
        assert_eq!(u.dim(), 8);
        let s = u.initial_state().unwrap();
        // (W|0>) tensor |0>: weight 1/2 on joint indices 0, 2, 4, 6
        for j in 0..8 {
            let expect = if j % 2 == 0 { 0.5 } else { 0.0 };
            assert!((s.amplitude(j).norm() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn near_identity_unitary_stays_close() {
        let v = near_identity_unitary(16, 5, 0.1).unwrap();
        let mut max_dev = 0.0f64;
        for i in 0..16 {
            for j in 0..16 {
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                max_dev = max_dev.max((v.entry(i, j) - target).norm());
            }
        }
        assert!(max_dev < 0.1 + 1e-12, "deviation {max_dev}");
        assert!(max_dev > 1e-4, "should not be exactly identity");
    }

    #[test]
    fn dense_matches_fast_kernel() {
        let fast = UnitaryFamily::WalshHadamard { n_qubits: 4 };
        let dense = UnitaryFamily::Dense(fast.to_dense().unwrap());
        let mut a = StateVector::random(16, 55).unwrap();
        let mut b = a.clone();
        fast.apply(&mut a).unwrap();
        dense.apply(&mut b).unwrap();
        for j in 0..16 {
            assert!((a.amplitude(j) - b.amplitude(j)).norm() < 1e-12);
        }
    }
}
