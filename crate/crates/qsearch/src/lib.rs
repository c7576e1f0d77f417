//! Dense state-vector simulation of robust quantum search.
//!
//! The crate models search routines that keep working when the selective
//! phase operations they are built from are imperfect: an iterative
//! fixed-point style operator driven by two oracle queries per step, a
//! three-fold recursive amplifier whose per-level gain stays near 3 under
//! phase noise, the plain amplitude-amplification baseline they are
//! measured against, and two continuous-time projector Hamiltonians.
//!
//! Everything is exact linear algebra on `Vec<Complex64>` amplitudes; the
//! only approximations anywhere are the ones under study. Randomness is
//! counter-based and fully determined by explicit seeds, so every run,
//! every noise draw, and every reported number is reproducible bit for
//! bit.

pub mod algorithms;
pub mod error;
pub mod hamiltonian;
pub mod rng;
pub mod selective;
pub mod state;
pub mod unitary;

pub use error::{Error, Result};
pub use hamiltonian::{ScanResult, SearchHamiltonian};
pub use selective::{
    operator_distance, selectivity, ConjugatedOp, DiagonalPhaseOp, NoiseLaw, NoiseSpec,
    PerturbedSide, Selective, WorkspaceOracle,
};
pub use state::{StateVector, TargetSet};
pub use unitary::{haar_random_unitary, near_identity_unitary, DenseUnitary, UnitaryFamily};

pub use algorithms::{
    compute_recursion_diagnostics, compute_subspace_frame, exponent_p, exponent_p_bound,
    kappa_bar, kappa_lower_bound, predict_iterative_queries, recursion_query_count,
    run_recursive, AmplificationEngine, IterativeEngine, RecursionDiagnostics, RecursionLevel,
    RecursiveOutcome, RunTrajectory, StepRecord, SubspaceFrame, TargetDiagnostics,
};

// the guide chapters double as doctests so every snippet in the book is
// checked against the current api on each test run
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;

    #[doc = include_str!("../../../book/src/state-vectors.md")]
    pub struct StateVectors;

    #[doc = include_str!("../../../book/src/selective-operations.md")]
    pub struct SelectiveOperations;

    #[doc = include_str!("../../../book/src/iterative-search.md")]
    pub struct IterativeSearch;

    #[doc = include_str!("../../../book/src/recursive-search.md")]
    pub struct RecursiveSearch;

    #[doc = include_str!("../../../book/src/hamiltonian-search.md")]
    pub struct HamiltonianSearch;

    #[doc = include_str!("../../../book/src/experiments.md")]
    pub struct Experiments;
}
