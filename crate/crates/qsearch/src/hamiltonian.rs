//! Continuous-time search: projector Hamiltonians, exact dense evolution
//! through one eigendecomposition, and target-probability scans.
//!
//! Everything here is deliberately dense and small (N <= 4096): the point
//! is machine-precision dynamics to check claims against, not scale.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::selective::{DiagonalPhaseOp, Selective};
use crate::state::{StateVector, TargetSet};
use crate::unitary::{UnitaryFamily, MAX_DENSE_DIM};

/// Construction-time bound on ||H - H^dag||_max.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Evolution sub-steps are capped at this fraction of 1/||H||.
pub const STEP_SAFETY: f64 = 0.05;

/// A Hermitian search generator with its eigendecomposition and the state
/// the search starts from.
#[derive(Debug, Clone)]
pub struct SearchHamiltonian {
    matrix: DMatrix<Complex64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
    start: StateVector,
    norm_bound: f64,
}

fn subtract_projector(m: &mut DMatrix<Complex64>, v: &[Complex64], weight: f64) {
    let n = v.len();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= weight * v[i] * v[j].conj();
        }
    }
}

impl SearchHamiltonian {
    /// Wrap an explicit Hermitian matrix; `start` is the initial state the
    /// scans evolve from.
    pub fn from_matrix(matrix: DMatrix<Complex64>, start: StateVector) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: matrix.ncols() });
        }
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if dim > MAX_DENSE_DIM {
            return Err(Error::CapabilityExceeded { got: dim, max: MAX_DENSE_DIM });
        }
        if start.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: start.dim() });
        }
        let mut dev = 0.0f64;
        for i in 0..dim {
            for j in 0..=i {
                dev = dev.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if dev > HERMITICITY_TOL {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: format!("not hermitian, max deviation {dev:.3e}"),
            });
        }
        let eig = matrix.clone().symmetric_eigen();
        let norm_bound = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        Ok(Self {
            matrix,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            start,
            norm_bound,
        })
    }

    /// (1-s)(I - P_{U|0>}) + (1+s)(I - P_t), the two-projector search
    /// generator. |t> is the normalized projection of U|0> onto the marked
    /// subspace, which for a single marked index is that basis state.
    pub fn projector_pair(u: &UnitaryFamily, targets: &TargetSet, s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: format!("perturbation must be finite, got {s}"),
            });
        }
        let dim = u.dim();
        if targets.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: targets.dim() });
        }
        let start = u.initial_state()?;
        let mut t_vec = vec![Complex64::ZERO; dim];
        let mut norm_sq = 0.0;
        for &j in targets.indices() {
            t_vec[j] = start.amplitude(j);
            norm_sq += start.amplitude(j).norm_sqr();
        }
        if norm_sq.sqrt() < 1e-14 {
            return Err(Error::InvalidParameter {
                name: "targets",
                reason: "prepared state has no weight on the marked subspace".into(),
            });
        }
        let inv = 1.0 / norm_sq.sqrt();
        for a in &mut t_vec {
            *a *= inv;
        }
        let mut m = DMatrix::<Complex64>::identity(dim, dim).scale(2.0);
        subtract_projector(&mut m, start.amplitudes(), 1.0 - s);
        subtract_projector(&mut m, &t_vec, 1.0 + s);
        Self::from_matrix(m, start)
    }

    /// (I - P_{U|0>}) + P_sigma with sigma = Rt^dag U|0>; the second term
    /// is the first term's projector conjugated by the oracle rotation.
    ///
    /// The two projectors must enter with opposite signs: with both terms
    /// as complements the generator only swaps the two nearly parallel
    /// states U|0> and sigma and the marked amplitude never grows. With
    /// the sign below, the dynamics rotates U|0> onto the component of
    /// itself orthogonal to sigma, which sits almost entirely in the
    /// marked subspace.
    pub fn oracle_rotated(u: &UnitaryFamily, rt: &DiagonalPhaseOp) -> Result<Self> {
        let dim = u.dim();
        if rt.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: rt.dim() });
        }
        let start = u.initial_state()?;
        let mut sigma = start.clone();
        rt.apply_inverse(&mut sigma)?;
        let mut m = DMatrix::<Complex64>::identity(dim, dim);
        subtract_projector(&mut m, start.amplitudes(), 1.0);
        subtract_projector(&mut m, sigma.amplitudes(), -1.0);
        Self::from_matrix(m, start)
    }

    /// The same generator multiplied by a positive factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter {
                name: "factor",
                reason: format!("scale factor must be positive, got {factor}"),
            });
        }
        Ok(Self {
            matrix: self.matrix.clone().scale(factor),
            eigenvalues: self.eigenvalues.clone().scale(factor),
            eigenvectors: self.eigenvectors.clone(),
            start: self.start.clone(),
            norm_bound: self.norm_bound * factor,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn start(&self) -> &StateVector {
        &self.start
    }

    /// Spectral norm (largest |eigenvalue|).
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Largest admissible evolution sub-step.
    pub fn max_step(&self) -> f64 {
        if self.norm_bound > 0.0 { STEP_SAFETY / self.norm_bound } else { f64::INFINITY }
    }

    /// <psi|H|psi>.
    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: state.dim() });
        }
        let v = DVector::from_column_slice(state.amplitudes());
        let hv = &self.matrix * &v;
        Ok(v.dotc(&hv).re)
    }

    /// Evolve in place for `time` using sub-intervals of at most `step`.
    /// Each sub-interval is an exact exponential: the state is rotated to
    /// the eigenbasis once and phase factors are applied per interval.
    pub fn evolve(&self, state: &mut StateVector, time: f64, step: f64) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: state.dim() });
        }
        if step.is_nan() || step <= 0.0 || step > self.max_step() {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: format!("step must lie in (0, {:.3e}], got {step}", self.max_step()),
            });
        }
        if time == 0.0 {
            return Ok(());
        }
        let n_sub = (time.abs() / step).ceil().max(1.0) as u64;
        let dt = time / n_sub as f64;
        let v = DVector::from_column_slice(state.amplitudes());
        let mut coeffs = self.eigenvectors.adjoint() * v;
        for _ in 0..n_sub {
            for (c, &e) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
                *c *= Complex64::from_polar(1.0, -e * dt);
            }
        }
        let out = &self.eigenvectors * coeffs;
        state.amplitudes_mut().copy_from_slice(out.as_slice());
        Ok(())
    }

    /// Marked-subspace probability at uniformly spaced times in [0, t_max],
    /// plus the peak refined by golden-section search around the best
    /// sample. Only the marked rows of the eigenbasis are propagated, so
    /// the scan is O(samples * M * N) after the eigendecomposition.
    pub fn scan_target_probability(
        &self,
        targets: &TargetSet,
        t_max: f64,
        samples: usize,
    ) -> Result<ScanResult> {
        if targets.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: targets.dim() });
        }
        if samples < 2 {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: format!("need at least 2 samples, got {samples}"),
            });
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_max",
                reason: format!("scan window must be positive, got {t_max}"),
            });
        }
        let n = self.dim();
        let v0 = DVector::from_column_slice(self.start.amplitudes());
        let coeffs = self.eigenvectors.adjoint() * v0;
        // row j of the propagator source: V[j,k] * c_k
        let rows: Vec<Vec<Complex64>> = targets
            .indices()
            .iter()
            .map(|&j| (0..n).map(|k| self.eigenvectors[(j, k)] * coeffs[k]).collect())
            .collect();
        let prob_at = |t: f64| -> f64 {
            let phases: Vec<Complex64> = self
                .eigenvalues
                .iter()
                .map(|&e| Complex64::from_polar(1.0, -e * t))
                .collect();
            rows.iter()
                .map(|row| {
                    row.iter()
                        .zip(&phases)
                        .map(|(r, p)| r * p)
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum()
        };

        let mut out = Vec::with_capacity(samples + 1);
        let mut best = (0usize, f64::NEG_INFINITY);
        for k in 0..=samples {
            let t = t_max * k as f64 / samples as f64;
            let p = prob_at(t);
            if p > best.1 {
                best = (k, p);
            }
            out.push((t, p));
        }
        let spacing = t_max / samples as f64;
        let lo = (best.0 as f64 - 1.0).max(0.0) * spacing;
        let hi = ((best.0 + 1) as f64 * spacing).min(t_max);
        let (peak_time, peak_probability) = golden_max(prob_at, lo, hi);
        Ok(ScanResult {
            samples: out,
            peak_time,
            peak_probability: peak_probability.max(best.1),
        })
    }
}

/// Scan output: (time, probability) pairs and the refined maximum.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub samples: Vec<(f64, f64)>,
    pub peak_time: f64,
    pub peak_probability: f64,
}

/// Golden-section maximization on [a, b] for a locally unimodal function.
fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn two_level_spectrum_splits_by_the_overlap() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 1 };
        let targets = TargetSet::new(vec![1], 2).unwrap();
        let h = SearchHamiltonian::projector_pair(&u, &targets, 0.0).unwrap();
        let mut eigs: Vec<f64> = h.eigenvalues.iter().copied().collect();
        eigs.sort_by(f64::total_cmp);
        let alpha = 1.0 / 2.0f64.sqrt();
        assert!((eigs[0] - (1.0 - alpha)).abs() < 1e-12);
        assert!((eigs[1] - (1.0 + alpha)).abs() < 1e-12);
    }

    #[test]
    fn zero_perturbation_is_the_plain_pair() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 4 };
        let targets = TargetSet::new(vec![3], 16).unwrap();
        let a = SearchHamiltonian::projector_pair(&u, &targets, 0.0).unwrap();
        let b = SearchHamiltonian::projector_pair(&u, &targets, 0.0).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn non_hermitian_matrices_are_rejected() {
        let mut m = DMatrix::<Complex64>::identity(4, 4);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        let start = StateVector::zero_state(4).unwrap();
        assert!(matches!(
            SearchHamiltonian::from_matrix(m, start),
            Err(Error::InvalidParameter { name: "matrix", .. })
        ));
    }

    #[test]
    fn zero_time_is_the_identity() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 5 };
        let targets = TargetSet::new(vec![7], 32).unwrap();
        let h = SearchHamiltonian::projector_pair(&u, &targets, 0.0).unwrap();
        let mut s = StateVector::random(32, 4).unwrap();
        let before = s.clone();
        h.evolve(&mut s, 0.0, h.max_step()).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn kernel_states_only_pick_up_nothing() {
        // a single projector complement annihilates its own direction
        let dim = 8;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 3 };
        let start = u.initial_state().unwrap();
        let mut m = DMatrix::<Complex64>::identity(dim, dim);
        subtract_projector(&mut m, start.amplitudes(), 1.0);
        let h = SearchHamiltonian::from_matrix(m, start.clone()).unwrap();
        let mut s = start.clone();
        h.evolve(&mut s, 3.7, h.max_step()).unwrap();
        let overlap = s.inner_product(&start).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        assert!(overlap.im.abs() < 1e-9, "kernel state should gain no phase");
    }

    #[test]
    fn evolution_preserves_norm_and_energy() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 6 };
        let targets = TargetSet::new(vec![9], 64).unwrap();
        let h = SearchHamiltonian::projector_pair(&u, &targets, 0.0).unwrap();
        let mut s = u.initial_state().unwrap();
        let e0 = h.energy(&s).unwrap();
        h.evolve(&mut s, PI * 4.0, h.max_step()).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-9);
        assert!((h.energy(&s).unwrap() - e0).abs() < 1e-8);
    }

    #[test]
    fn oversized_steps_are_rejected() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 3 };
        let targets = TargetSet::new(vec![1], 8).unwrap();
        let h = SearchHamiltonian::projector_pair(&u, &targets, 0.0).unwrap();
        let mut s = u.initial_state().unwrap();
        assert!(matches!(
            h.evolve(&mut s, 1.0, h.max_step() * 2.0),
            Err(Error::InvalidParameter { name: "step", .. })
        ));
    }

    #[test]
    fn scan_starts_at_the_initial_projection_and_finds_the_peak() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 6 };
        let targets = TargetSet::new(vec![9], 64).unwrap();
        let h = SearchHamiltonian::projector_pair(&u, &targets, 0.0).unwrap();
        let alpha = 1.0 / 8.0;
        let window = 1.3 * PI / (2.0 * alpha);
        let scan = h.scan_target_probability(&targets, window, 512).unwrap();
        assert!((scan.samples[0].1 - alpha * alpha).abs() < 1e-12);
        assert!(scan.peak_probability >= 0.99, "peak {}", scan.peak_probability);
        // the resonance sits near pi / (2 alpha)
        assert!((scan.peak_time - PI / (2.0 * alpha)).abs() < 0.5);
    }

    #[test]
    fn scaling_compresses_time_without_changing_the_peak() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 5 };
        let targets = TargetSet::new(vec![3], 32).unwrap();
        let rt = DiagonalPhaseOp::rotation(&targets, PI / 2.0).unwrap();
        let h = SearchHamiltonian::oracle_rotated(&u, &rt).unwrap();
        let h2 = h.scaled(1.5).unwrap();
        let window = 1.3 * PI / (2.0 * 0.25);
        let a = h.scan_target_probability(&targets, window, 1024).unwrap();
        let b = h2.scan_target_probability(&targets, window, 1024).unwrap();
        assert!((a.peak_probability - b.peak_probability).abs() < 1e-9);
        assert!((b.peak_time - a.peak_time / 1.5).abs() < 0.05);
    }
}
