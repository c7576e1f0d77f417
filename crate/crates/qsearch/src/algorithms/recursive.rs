//! Recursive amplification with imperfect selective operators.
//!
//! Level l is defined by U_l = U_{l-1} S0 U_{l-1}^dag St U_{l-1} with
//! U_0 = U. Each level multiplies the target projection by a factor close
//! to 3 while tripling the query count, so systematic phase errors do not
//! accumulate the way they do under plain amplitude amplification.
//! Operators are applied through a call tree on one shared state vector;
//! no level matrix is ever materialized.

use crate::error::{Error, Result};
use crate::selective::Selective;
use crate::state::{StateVector, TargetSet};
use crate::unitary::UnitaryFamily;

use super::{RunTrajectory, StepRecord};

/// Oracle queries consumed by U_m: (3^m - 1) / 2. St and St^dag count,
/// S0 does not.
pub fn recursion_query_count(m: u32) -> Result<u64> {
    let pow = 3u64.checked_pow(m).ok_or(Error::QueryCountOverflow(m))?;
    Ok((pow - 1) / 2)
}

/// Worst-case single-level amplification factor:
/// 3 - (7/3) dt^2 - (2/3) dt d0 - (1/3) d0^2 - 4 a^2.
pub fn kappa_lower_bound(delta_t: f64, delta_0: f64, alpha: f64) -> f64 {
    3.0 - (7.0 / 3.0) * delta_t * delta_t
        - (2.0 / 3.0) * delta_t * delta_0
        - (1.0 / 3.0) * delta_0 * delta_0
        - 4.0 * alpha * alpha
}

/// The alpha-independent part of the bound, used for the query exponent.
pub fn kappa_bar(delta_t: f64, delta_0: f64) -> f64 {
    kappa_lower_bound(delta_t, delta_0, 0.0)
}

/// Query-complexity exponent: total queries scale as (1/alpha)^(1+p) with
/// p = ln 3 / ln kappa_bar - 1.
pub fn exponent_p(delta_t: f64, delta_0: f64) -> Result<f64> {
    let kb = kappa_bar(delta_t, delta_0);
    if kb <= 1.0 {
        return Err(Error::NoiseTooLarge(kb));
    }
    Ok(3.0f64.ln() / kb.ln() - 1.0)
}

/// Quadratic estimate for the exponent; only trustworthy for small deltas
/// (callers should report both sides rather than assume it).
pub fn exponent_p_bound(delta_t: f64, delta_0: f64) -> f64 {
    0.71 * delta_t * delta_t + 0.20 * delta_t * delta_0 + 0.10 * delta_0 * delta_0
}

/// Apply U_level (or its inverse) to the state by recursive descent.
pub fn apply_level(
    u: &UnitaryFamily,
    s0: &dyn Selective,
    st: &dyn Selective,
    level: u32,
    state: &mut StateVector,
    inverse: bool,
) -> Result<()> {
    if level == 0 {
        return if inverse { u.apply_inverse(state) } else { u.apply(state) };
    }
    if inverse {
        apply_level(u, s0, st, level - 1, state, true)?;
        s0.apply_inverse(state)?;
        apply_level(u, s0, st, level - 1, state, false)?;
        st.apply_inverse(state)?;
        apply_level(u, s0, st, level - 1, state, true)
    } else {
        apply_level(u, s0, st, level - 1, state, false)?;
        st.apply(state)?;
        apply_level(u, s0, st, level - 1, state, true)?;
        s0.apply(state)?;
        apply_level(u, s0, st, level - 1, state, false)
    }
}

/// Per-level measurement of a recursive run.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionLevel {
    pub level: u32,
    pub queries: u64,
    pub alpha: f64,
    /// alpha_l / alpha_{l-1}; absent at level 0 or when the parent
    /// projection vanished.
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RecursiveOutcome {
    pub levels: Vec<RecursionLevel>,
    pub state: StateVector,
    /// True when a budget stopped the run before the requested depth.
    pub truncated: bool,
}

impl RecursiveOutcome {
    pub fn final_level(&self) -> &RecursionLevel {
        self.levels.last().expect("level 0 is always recorded")
    }

    pub fn trajectory(&self) -> RunTrajectory {
        RunTrajectory {
            steps: self
                .levels
                .iter()
                .map(|l| StepRecord {
                    step_index: l.level as usize,
                    oracle_queries: l.queries,
                    alpha: l.alpha,
                    success_prob: l.alpha * l.alpha,
                    angle_to_sigma: None,
                    overlap_tau: None,
                })
                .collect(),
        }
    }
}

/// Build U_m|0> level by level, recording alpha and kappa at each depth.
/// `budget` caps the oracle queries of the deepest level; when the next
/// level would exceed it the run stops early and is flagged truncated.
pub fn run_recursive(
    u: &UnitaryFamily,
    s0: &dyn Selective,
    st: &dyn Selective,
    targets: &TargetSet,
    levels: u32,
    budget: Option<u64>,
) -> Result<RecursiveOutcome> {
    let dim = u.dim();
    for other in [s0.dim(), st.dim(), targets.dim()] {
        if other != dim {
            return Err(Error::DimensionMismatch { left: dim, right: other });
        }
    }
    let mut state = u.initial_state()?;
    let mut prev_alpha = state.target_projection(targets);
    let mut recorded = vec![RecursionLevel { level: 0, queries: 0, alpha: prev_alpha, kappa: None }];
    let mut truncated = false;
    for l in 1..=levels {
        let queries = recursion_query_count(l)?;
        if budget.is_some_and(|b| queries > b) {
            truncated = true;
            break;
        }
        // U_l|0> from U_{l-1}|0>: St, then U_{l-1}^dag, S0, U_{l-1}
        st.apply(&mut state)?;
        apply_level(u, s0, st, l - 1, &mut state, true)?;
        s0.apply(&mut state)?;
        apply_level(u, s0, st, l - 1, &mut state, false)?;
        let alpha = state.target_projection(targets);
        let kappa = (prev_alpha > 0.0).then(|| alpha / prev_alpha);
        recorded.push(RecursionLevel { level: l, queries, alpha, kappa });
        prev_alpha = alpha;
    }
    Ok(RecursiveOutcome { levels: recorded, state, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AmplificationEngine;
    use crate::selective::{DiagonalPhaseOp, NoiseSpec, PerturbedSide};

    #[test]
    fn query_counts_match_the_closed_form() {
        let expect = [0u64, 1, 4, 13, 40, 121];
        for (m, &q) in expect.iter().enumerate() {
            assert_eq!(recursion_query_count(m as u32).unwrap(), q);
        }
        assert_eq!(recursion_query_count(8).unwrap(), 3280);
        assert!(matches!(
            recursion_query_count(41),
            Err(Error::QueryCountOverflow(41))
        ));
    }

    #[test]
    fn kappa_bound_examples() {
        assert_eq!(kappa_lower_bound(0.0, 0.0, 0.0), 3.0);
        assert!((kappa_lower_bound(0.2, 0.2, 1.0 / 64.0) - 2.8657).abs() < 1e-4);
        assert!((kappa_lower_bound(0.1, 0.0, 0.1) - (3.0 - 7.0 / 300.0 - 0.04)).abs() < 1e-12);
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(exponent_p(0.0, 0.0).unwrap(), 0.0);
        let p = exponent_p(0.2, 0.0).unwrap();
        assert!((p - 0.0296).abs() < 3e-4, "p = {p}");
        let p = exponent_p(0.1, 0.1).unwrap();
        assert!((p - 0.0103).abs() < 2e-4, "p = {p}");
        assert!(matches!(exponent_p(0.95, 0.9), Err(Error::NoiseTooLarge(_))));
        // the quadratic estimate holds comfortably in the small-delta regime
        assert!(exponent_p(0.05, 0.0).unwrap() <= exponent_p_bound(0.05, 0.0));
    }

    #[test]
    fn zero_levels_returns_the_prepared_state() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 6 };
        let targets = TargetSet::new(vec![9], 64).unwrap();
        let zero = TargetSet::new(vec![0], 64).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero).unwrap();
        let st = DiagonalPhaseOp::inversion(&targets).unwrap();
        let out = run_recursive(&u, &s0, &st, &targets, 0, None).unwrap();
        assert_eq!(out.levels.len(), 1);
        assert_eq!(out.final_level().queries, 0);
        assert!(!out.truncated);
        let u0 = u.initial_state().unwrap();
        assert!(out.state.fidelity(&u0).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn exact_operators_reduce_to_amplitude_amplification() {
        let n_qubits = 8;
        let dim = 1 << n_qubits;
        let u = UnitaryFamily::WalshHadamard { n_qubits };
        let targets = TargetSet::new(vec![7], dim).unwrap();
        let zero = TargetSet::new(vec![0], dim).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero).unwrap();
        let st = DiagonalPhaseOp::inversion(&targets).unwrap();
        for m in 0..=4u32 {
            let out = run_recursive(&u, &s0, &st, &targets, m, None).unwrap();
            let n_iters = recursion_query_count(m).unwrap() as usize;
            let mut amp = AmplificationEngine::new(&u, &s0, &st, &targets).unwrap();
            amp.run(n_iters).unwrap();
            let f = out.state.fidelity(amp.state()).unwrap();
            assert!(f >= 1.0 - 1e-10, "m={m} fidelity {f}");
            assert_eq!(out.final_level().queries, n_iters as u64);
        }
    }

    #[test]
    fn budget_truncates_with_a_flag() {
        let u = UnitaryFamily::WalshHadamard { n_qubits: 6 };
        let targets = TargetSet::new(vec![9], 64).unwrap();
        let zero = TargetSet::new(vec![0], 64).unwrap();
        let s0 = DiagonalPhaseOp::inversion(&zero).unwrap();
        let st = DiagonalPhaseOp::inversion(&targets).unwrap();
        let out = run_recursive(&u, &s0, &st, &targets, 4, Some(13)).unwrap();
        assert!(out.truncated);
        assert_eq!(out.final_level().level, 3);
        assert_eq!(out.final_level().queries, 13);
    }

    #[test]
    fn noisy_runs_are_seed_deterministic() {
        // 3^3 * arcsin(1/32) stays below pi/2, so no level saturates
        let dim = 1024;
        let u = UnitaryFamily::WalshHadamard { n_qubits: 10 };
        let targets = TargetSet::new(vec![3], dim).unwrap();
        let zero = TargetSet::new(vec![0], dim).unwrap();
        let noise = NoiseSpec::uniform(0.2, 0.2, 99);
        let s0 = noise.sample_perturbed_inversion(&zero, PerturbedSide::Zero).unwrap();
        let st = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target).unwrap();
        let a = run_recursive(&u, &s0, &st, &targets, 3, None).unwrap();
        let b = run_recursive(&u, &s0, &st, &targets, 3, None).unwrap();
        assert_eq!(a.levels, b.levels);
        // amplification factors hover near 3 in the low-noise regime
        for level in &a.levels[1..] {
            let k = level.kappa.unwrap();
            assert!(k > 2.0 && k < 3.2, "kappa = {k}");
        }
    }
}
