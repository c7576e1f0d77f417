//! Search engines and their analytic predictors.

pub mod amplification;
pub mod diagnostics;
pub mod iterative;
pub mod recursive;

pub use amplification::AmplificationEngine;
pub use diagnostics::{
    compute_recursion_diagnostics, RecursionDiagnostics, TargetDiagnostics, CONDITION_MARGIN,
};
pub use iterative::{
    compute_subspace_frame, predict_iterative_queries, IterativeEngine, SubspaceFrame,
};
pub use recursive::{
    exponent_p, exponent_p_bound, kappa_bar, kappa_lower_bound, recursion_query_count,
    run_recursive, RecursionLevel, RecursiveOutcome,
};

/// One recorded point of a run: cumulative queries and where the state is.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step_index: usize,
    pub oracle_queries: u64,
    pub alpha: f64,
    pub success_prob: f64,
    /// arccos |<sigma|state>|; only tracked by the iterative engine.
    pub angle_to_sigma: Option<f64>,
    /// |<tau|state>|; only tracked by the iterative engine.
    pub overlap_tau: Option<f64>,
}

/// The universal experiment output: one record per step (or per level).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrajectory {
    pub steps: Vec<StepRecord>,
}

impl RunTrajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> Option<&StepRecord> {
        self.steps.last()
    }

    pub fn final_success(&self) -> Option<f64> {
        self.steps.last().map(|s| s.success_prob)
    }

    pub fn max_success(&self) -> f64 {
        self.steps.iter().map(|s| s.success_prob).fold(0.0, f64::max)
    }

    pub fn total_queries(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.oracle_queries)
    }
}
