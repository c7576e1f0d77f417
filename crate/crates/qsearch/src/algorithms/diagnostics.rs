//! Single-level diagnostics for the recursion.
//!
//! One recursion level maps the column entries U_j0 to (U_1)_j0, and the
//! quantities computed here explain that map exactly: the overlap beta of
//! the oracle-kicked state with U|0>, its split into a rotation part and a
//! residual, and per target a three-term decomposition whose sum equals
//! the exact amplification ratio (U_1)_j0 / U_j0 to machine precision.
//! The bounds that certify kappa close to 3 are all stated on these
//! quantities, so tests can check every inequality against live numbers.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::selective::{DiagonalPhaseOp, Selective};
use crate::state::{StateVector, TargetSet};
use crate::unitary::UnitaryFamily;

/// The row-mixing condition is treated as satisfied when the mixing term
/// is at most this fraction of the target amplitude term.
pub const CONDITION_MARGIN: f64 = 0.05;

/// Targets with |U_j0| below this are excluded from ratio statistics.
pub const EXCLUDE_EPS: f64 = 1e-14;

const SIN_GAMMA_EPS: f64 = 1e-12;

fn wrap_angle(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    } else if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// Everything measured for one marked index.
#[derive(Debug, Clone)]
pub struct TargetDiagnostics {
    pub index: usize,
    /// Deviation of the oracle phase from exact inversion at this index.
    pub epsilon: f64,
    /// Effective phase entering the ratio: xi - epsilon + mu0/2.
    pub xi_prime: f64,
    /// Measured amplification ratio |(U_1)_j0 / U_j0|.
    pub rho: f64,
    /// Row-rotation angle of U S0' U^dag at this index.
    pub gamma: f64,
    /// The exact decomposition; the three terms sum to (U_1)_j0 / U_j0.
    pub c_terms: [Complex64; 3],
    /// Measured <x_j|y>: the actual value of the overlap the ratio bound
    /// models as a random 1/sqrt(N) quantity.
    pub xy_overlap: Complex64,
    /// gamma_j * beta_bar / sqrt(N) - the row-mixing magnitude.
    pub condition_lhs: f64,
    /// 3 |U_j0| - the amplification magnitude it must stay under.
    pub condition_rhs: f64,
}

#[derive(Debug, Clone)]
pub struct RecursionDiagnostics {
    /// beta = <0|U^dag St U|0>.
    pub beta: Complex64,
    /// arg(beta).
    pub xi: f64,
    /// Deviation of the S0 phase at index 0 from exact inversion.
    pub mu_0: f64,
    /// cos(mu0/2) |beta|.
    pub beta_prime: f64,
    /// sqrt(1 - |beta|^2); the weight of the residual direction.
    pub beta_bar: f64,
    pub per_target: Vec<TargetDiagnostics>,
    /// Marked indices with vanishing |U_j0|, excluded from the ratios.
    pub excluded: Vec<usize>,
}

impl RecursionDiagnostics {
    /// True when the row-mixing term is negligible for every target, i.e.
    /// condition_lhs <= CONDITION_MARGIN * condition_rhs throughout.
    pub fn condition_holds(&self) -> bool {
        self.per_target
            .iter()
            .all(|t| t.condition_lhs <= CONDITION_MARGIN * t.condition_rhs)
    }

    /// Largest single-target shortfall from perfect tripling, 3 - rho_j.
    pub fn max_ratio_defect(&self) -> f64 {
        self.per_target
            .iter()
            .map(|t| 3.0 - t.rho)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn compute_recursion_diagnostics(
    u: &UnitaryFamily,
    s0: &DiagonalPhaseOp,
    st: &DiagonalPhaseOp,
    targets: &TargetSet,
) -> Result<RecursionDiagnostics> {
    let dim = u.dim();
    for other in [s0.dim(), st.dim(), targets.dim()] {
        if other != dim {
            return Err(Error::DimensionMismatch { left: dim, right: other });
        }
    }
    let u0 = u.initial_state()?;

    // psi = St U|0>
    let mut psi = u0.clone();
    st.apply(&mut psi)?;
    let beta = u0.inner_product(&psi)?;
    let xi = beta.arg();
    let beta_bar = (1.0 - beta.norm_sqr()).max(0.0).sqrt();

    let phi0 = s0.phase(0);
    let mu_0 = wrap_angle(phi0 - PI);
    let beta_prime = (mu_0 / 2.0).cos() * beta.norm();

    // psi' = U R0^{phi0} U^dag psi, splitting S0 = S0' R0^{phi0} so that
    // S0' leaves |0> alone
    let mut psi_p = psi.clone();
    u.apply_inverse(&mut psi_p)?;
    psi_p.amplitudes_mut()[0] *= Complex64::from_polar(1.0, phi0);
    u.apply(&mut psi_p)?;
    let head = u0.inner_product(&psi_p)?;

    // residual of psi' against U|0>; its norm is beta_bar
    let residual: Vec<Complex64> = psi_p
        .amplitudes()
        .iter()
        .zip(u0.amplitudes())
        .map(|(p, a)| p - head * a)
        .collect();
    let residual_norm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    // U_1|0> by direct application of one recursion level
    let mut u1 = psi.clone();
    u.apply_inverse(&mut u1)?;
    s0.apply(&mut u1)?;
    u.apply(&mut u1)?;

    let s0_prime = s0.with_phase_at(0, 0.0)?;
    let sqrt_n = (dim as f64).sqrt();

    let mut per_target = Vec::new();
    let mut excluded = Vec::new();
    for &j in targets.indices() {
        let uj0 = u0.amplitude(j);
        if uj0.norm() < EXCLUDE_EPS {
            excluded.push(j);
            continue;
        }
        let epsilon = wrap_angle(st.phase(j) - PI);
        let xi_prime = xi - epsilon + mu_0 / 2.0;
        let rho = (u1.amplitude(j) / uj0).norm();

        // adjoint row of A = U S0' U^dag at index j: w = A^dag |j>
        let mut w = StateVector::basis(dim, j)?;
        u.apply_inverse(&mut w)?;
        s0_prime.apply_inverse(&mut w)?;
        u.apply(&mut w)?;
        let a_jj = w.amplitude(j).conj();
        let cos_gamma = a_jj.norm().min(1.0);
        let gamma = cos_gamma.acos();
        let sin_gamma = (1.0 - cos_gamma * cos_gamma).max(0.0).sqrt();

        let c1 = a_jj
            * Complex64::from_polar(1.0, st.phase(j))
            * (Complex64::ONE + 2.0 * beta_prime * Complex64::from_polar(1.0, xi_prime));

        let (c2, c3, xy_overlap) = if sin_gamma < SIN_GAMMA_EPS {
            // the row is exactly diagonal; nothing mixes in
            (Complex64::ZERO, Complex64::ZERO, Complex64::ZERO)
        } else {
            // x_j = (w - w[j] e_j) / sin gamma; overlaps taken directly so
            // the decomposition stays exact
            let mut x_dot_u0 = Complex64::ZERO;
            let mut x_dot_r = Complex64::ZERO;
            for (k, wk) in w.amplitudes().iter().enumerate() {
                if k == j {
                    continue;
                }
                x_dot_u0 += wk.conj() * u0.amplitude(k);
                x_dot_r += wk.conj() * residual[k];
            }
            let c2 = head * x_dot_u0 / uj0;
            let c3 = x_dot_r / uj0;
            let xy = if residual_norm > SIN_GAMMA_EPS {
                x_dot_r / (sin_gamma * residual_norm)
            } else {
                Complex64::ZERO
            };
            (c2, c3, xy)
        };

        per_target.push(TargetDiagnostics {
            index: j,
            epsilon,
            xi_prime,
            rho,
            gamma,
            c_terms: [c1, c2, c3],
            xy_overlap,
            condition_lhs: gamma * beta_bar / sqrt_n,
            condition_rhs: 3.0 * uj0.norm(),
        });
    }

    Ok(RecursionDiagnostics { beta, xi, mu_0, beta_prime, beta_bar, per_target, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::recursive::apply_level;
    use crate::selective::{NoiseSpec, PerturbedSide};

    fn inversion_pair(dim: usize) -> (TargetSet, DiagonalPhaseOp) {
        let zero = TargetSet::new(vec![0], dim).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero).unwrap();
        (zero, s0)
    }

    #[test]
    fn exact_inversions_triple_the_amplitude() {
        let dim = 64;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 6 };
        let targets = TargetSet::new(vec![9], dim).unwrap();
        let (_, s0) = inversion_pair(dim);
        let st = DiagonalPhaseOp::inversion(&targets).unwrap();
        let d = compute_recursion_diagnostics(&u, &s0, &st, &targets).unwrap();
        let alpha_sq = 1.0 / dim as f64;
        assert!((d.beta.re - (1.0 - 2.0 * alpha_sq)).abs() < 1e-12);
        assert!(d.beta.im.abs() < 1e-14);
        assert!(d.xi.abs() < 1e-13);
        assert_eq!(d.mu_0, 0.0);
        let rho = d.per_target[0].rho;
        assert!((rho - (3.0 - 4.0 * alpha_sq)).abs() < 1e-12, "rho = {rho}");
    }

    #[test]
    fn c_terms_sum_to_the_measured_ratio() {
        let dim = 64;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 6 };
        let targets = TargetSet::new(vec![5, 40], dim).unwrap();
        let zero = TargetSet::new(vec![0], dim).unwrap();
        let noise = NoiseSpec::uniform(0.3, 0.3, 5);
        let s0 = noise.sample_perturbed_inversion(&zero, PerturbedSide::Zero).unwrap();
        let st = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target).unwrap();
        let d = compute_recursion_diagnostics(&u, &s0, &st, &targets).unwrap();

        let u0 = u.initial_state().unwrap();
        let mut u1 = StateVector::zero_state(dim).unwrap();
        apply_level(&u, &s0, &st, 1, &mut u1, false).unwrap();
        for t in &d.per_target {
            let exact = u1.amplitude(t.index) / u0.amplitude(t.index);
            let sum: Complex64 = t.c_terms.iter().sum();
            assert!((sum - exact).norm() < 1e-12, "decomposition defect {}", (sum - exact).norm());
            assert!((t.rho - exact.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_defect_bounds_hold_across_seeds() {
        let dim = 256;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 8 };
        let targets = TargetSet::new(vec![3], dim).unwrap();
        let zero = TargetSet::new(vec![0], dim).unwrap();
        let delta_t = 0.3;
        let alpha_sq = 1.0 / dim as f64;
        for seed in 0..100 {
            let noise = NoiseSpec::uniform(delta_t, 0.0, seed);
            let s0 = noise.sample_perturbed_inversion(&zero, PerturbedSide::Zero).unwrap();
            let st = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target).unwrap();
            let d = compute_recursion_diagnostics(&u, &s0, &st, &targets).unwrap();
            assert!(1.0 - d.beta.re <= 0.5 * delta_t * delta_t + 2.0 * alpha_sq);
            assert!(d.beta.im.abs() <= delta_t);
            assert!(d.beta_bar <= (delta_t * delta_t + 4.0 * alpha_sq).sqrt() + 1e-9);
            assert!((d.beta_bar * d.beta_bar + d.beta.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_defect_bound_in_the_rotation_special_case() {
        // S0 restricted to a pure rotation of |0> (no stray phases); the
        // worst-case defect bound must hold with zero violations
        let dim = 1024;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 10 };
        let targets = TargetSet::new(vec![1], dim).unwrap();
        let zero = TargetSet::new(vec![0], dim).unwrap();
        let (dt, d0) = (0.2, 0.2);
        let alpha_sq = 1.0 / dim as f64;
        let budget = (7.0 / 3.0) * dt * dt + (2.0 / 3.0) * dt * d0 + (1.0 / 3.0) * d0 * d0
            + 4.0 * alpha_sq;
        for seed in 0..50 {
            let noise = NoiseSpec::uniform(dt, d0, seed);
            let s0_full = noise.sample_perturbed_inversion(&zero, PerturbedSide::Zero).unwrap();
            let mut phases = vec![0.0; dim];
            phases[0] = s0_full.phase(0);
            let s0 = DiagonalPhaseOp::from_phases(phases).unwrap();
            let st = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target).unwrap();
            let d = compute_recursion_diagnostics(&u, &s0, &st, &targets).unwrap();
            let defect = d.max_ratio_defect();
            assert!(defect <= budget, "seed {seed}: defect {defect} > {budget}");
        }
    }

    #[test]
    fn mixing_condition_reported_and_satisfied_for_uniform_u() {
        let dim = 1024;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 10 };
        let targets = TargetSet::new(vec![1], dim).unwrap();
        let zero = TargetSet::new(vec![0], dim).unwrap();
        let noise = NoiseSpec::uniform(0.2, 0.2, 17);
        let s0 = noise.sample_perturbed_inversion(&zero, PerturbedSide::Zero).unwrap();
        let st = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target).unwrap();
        let d = compute_recursion_diagnostics(&u, &s0, &st, &targets).unwrap();
        assert!(d.condition_holds());
        let t = &d.per_target[0];
        assert!(t.condition_lhs > 0.0);
        assert!((t.condition_rhs - 3.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_targets_are_excluded() {
        // a product unitary with zero angles is the identity, so every
        // nonzero index is unreachable from |0>
        let u = UnitaryFamily::product_of_rotations(&[0.0; 3]);
        let targets = TargetSet::new(vec![5], 8).unwrap();
        let zero = TargetSet::new(vec![0], 8).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero).unwrap();
        let st = DiagonalPhaseOp::inversion(&targets).unwrap();
        let d = compute_recursion_diagnostics(&u, &s0, &st, &targets).unwrap();
        assert_eq!(d.excluded, vec![5]);
        assert!(d.per_target.is_empty());
    }
}
