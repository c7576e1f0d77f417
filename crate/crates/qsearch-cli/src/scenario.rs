//! Scenario runners: each one turns a validated config into a CSV
//! document plus a `key = value` summary that always pairs predicted
//! figures with measured ones.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use qsearch::algorithms::{RunTrajectory, StepRecord};
use qsearch::unitary::single_qubit_rotation;
use qsearch::{
    compute_recursion_diagnostics, compute_subspace_frame, exponent_p, exponent_p_bound,
    haar_random_unitary, kappa_bar, kappa_lower_bound, near_identity_unitary, operator_distance,
    recursion_query_count, run_recursive, selectivity, AmplificationEngine, ConjugatedOp,
    DenseUnitary, DiagonalPhaseOp, IterativeEngine, NoiseLaw, NoiseSpec, PerturbedSide,
    SearchHamiltonian, Selective, StateVector, TargetSet, UnitaryFamily, WorkspaceOracle,
};

use crate::config::{
    BasisSpec, ConfigError, EngineMode, ExperimentConfig, HamKind, LawSpec, OpSpec, Scenario,
    TargetsSpec, UnitarySpec,
};
use crate::csvout::{sig, CsvDoc};

/// Hard cap on any state-vector dimension the harness will allocate.
pub const MAX_STATE_DIM: usize = 1 << 20;
/// Dense-matrix paths (random unitaries, basis changes) stop here.
pub const MAX_DENSE_DIM: usize = 4096;
/// Below this diagonal weight a basis change earns a warning.
pub const SELECTIVITY_FLOOR: f64 = 0.9;

// ------------------------------------------------------------ failures

/// What went wrong, split by exit code: bad input (2), a run that would
/// exceed the harness capabilities (3), or an i/o problem (1).
#[derive(Debug)]
pub enum RunFailure {
    Config(ConfigError),
    Capability(String),
    Io(String),
}

impl RunFailure {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunFailure::Config(_) => 2,
            RunFailure::Capability(_) => 3,
            RunFailure::Io(_) => 1,
        }
    }
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunFailure::Config(e) => write!(f, "{e}"),
            RunFailure::Capability(m) => write!(f, "capability exceeded: {m}"),
            RunFailure::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for RunFailure {}

impl From<ConfigError> for RunFailure {
    fn from(e: ConfigError) -> Self {
        RunFailure::Config(e)
    }
}

impl From<qsearch::Error> for RunFailure {
    fn from(e: qsearch::Error) -> Self {
        match e {
            qsearch::Error::CapabilityExceeded { .. } | qsearch::Error::QueryCountOverflow(_) => {
                RunFailure::Capability(e.to_string())
            }
            other => RunFailure::Config(ConfigError::new("parameters", other.to_string())),
        }
    }
}

impl From<std::io::Error> for RunFailure {
    fn from(e: std::io::Error) -> Self {
        RunFailure::Io(e.to_string())
    }
}

pub type RunResult<T> = Result<T, RunFailure>;

// ------------------------------------------------------------ summaries

/// Ordered `key = value` pairs, printed verbatim after a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub pairs: Vec<(String, String)>,
}

impl Summary {
    pub fn push_str(&mut self, key: &str, value: impl Into<String>) {
        self.pairs.push((key.to_string(), value.into()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push_str(key, sig(value));
    }

    pub fn push_int(&mut self, key: &str, value: impl fmt::Display) {
        self.push_str(key, value.to_string());
    }

    pub fn push_bool(&mut self, key: &str, value: bool) {
        self.push_str(key, if value { "true" } else { "false" });
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.pairs {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug)]
pub struct ScenarioOutput {
    pub doc: CsvDoc,
    pub summary: Summary,
    pub warnings: Vec<String>,
}

impl ScenarioOutput {
    fn new(doc: CsvDoc, summary: Summary) -> Self {
        Self { doc, summary, warnings: Vec::new() }
    }
}

// ------------------------------------------------------------ builders

fn checked_dim(n_qubits: usize) -> RunResult<usize> {
    let dim = 1usize
        .checked_shl(n_qubits as u32)
        .filter(|&d| d <= MAX_STATE_DIM)
        .ok_or_else(|| {
            RunFailure::Capability(format!(
                "2^{n_qubits} amplitudes exceed the harness limit of 2^{}",
                MAX_STATE_DIM.trailing_zeros()
            ))
        })?;
    Ok(dim)
}

fn build_unitary(cfg: &ExperimentConfig, dim: usize, seed: u64) -> RunResult<UnitaryFamily> {
    Ok(match &cfg.unitary {
        UnitarySpec::WalshHadamard => UnitaryFamily::WalshHadamard { n_qubits: cfg.n_qubits },
        UnitarySpec::QubitProduct(angles) => UnitaryFamily::product_of_rotations(angles),
        UnitarySpec::DenseRandom => {
            check_dense(dim, "dense_random state preparation")?;
            UnitaryFamily::Dense(haar_random_unitary(dim, seed)?)
        }
        UnitarySpec::NearIdentity(m) => {
            check_dense(dim, "near_identity state preparation")?;
            UnitaryFamily::Dense(near_identity_unitary(dim, seed, *m)?)
        }
    })
}

fn check_dense(dim: usize, what: &str) -> RunResult<()> {
    if dim > MAX_DENSE_DIM {
        return Err(RunFailure::Capability(format!(
            "{what} materializes a {dim}x{dim} matrix; the harness caps dense work at {MAX_DENSE_DIM}"
        )));
    }
    Ok(())
}

fn build_targets(cfg: &ExperimentConfig, dim: usize, seed: u64) -> RunResult<TargetSet> {
    let set = match &cfg.targets {
        TargetsSpec::List(list) => {
            for &i in list {
                if i >= dim {
                    return Err(ConfigError::new(
                        "experiment.targets",
                        format!("index {i} is out of range for dimension {dim}"),
                    )
                    .into());
                }
            }
            TargetSet::new(list.clone(), dim)?
        }
        TargetsSpec::Count(k) => TargetSet::derive(seed, dim, *k)?,
    };
    Ok(set)
}

fn zero_set(dim: usize) -> RunResult<TargetSet> {
    Ok(TargetSet::new(vec![0], dim)?)
}

fn noise_spec(cfg: &ExperimentConfig, seed: u64) -> NoiseSpec {
    NoiseSpec {
        delta_t: cfg.delta_t,
        delta_0: cfg.delta_0,
        law: match cfg.law {
            LawSpec::Uniform => NoiseLaw::Uniform,
            LawSpec::FixedOffset => NoiseLaw::FixedOffset,
        },
        seed,
    }
}

/// Target-side oracle honoring both the angle and the noise settings.
/// Perturbations are defined around the inversion, so a noisy target
/// oracle demands phi = pi.
fn target_oracle(
    cfg: &ExperimentConfig,
    targets: &TargetSet,
    seed: u64,
) -> RunResult<DiagonalPhaseOp> {
    let phi = cfg.resolved_phi();
    if cfg.delta_t > 0.0 {
        if (phi - PI).abs() > 1e-12 {
            return Err(ConfigError::new(
                "noise.delta_t",
                "perturbations are modeled around the inversion; set phi = pi (or leave it unset) when delta_t > 0",
            )
            .into());
        }
        return Ok(noise_spec(cfg, seed).sample_perturbed_inversion(targets, PerturbedSide::Target)?);
    }
    Ok(DiagonalPhaseOp::rotation(targets, phi)?)
}

fn targets_label(targets: &TargetSet) -> String {
    targets.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

fn head(cfg: &ExperimentConfig, seed: u64, dim: usize, targets: &TargetSet) -> Summary {
    let mut s = Summary::default();
    s.push_str("scenario", cfg.scenario.name());
    s.push_int("seed", seed);
    s.push_int("n_qubits", cfg.n_qubits);
    s.push_int("dim", dim);
    s.push_str("targets", targets_label(targets));
    s
}

fn wrap_angle(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y < -PI {
        y += 2.0 * PI;
    }
    y
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    let gram = m.adjoint() * m;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().fold(0.0f64, |acc, &v| acc.max(v.max(0.0))).sqrt()
}

// ------------------------------------------------------------ dispatch

pub fn run_scenario(cfg: &ExperimentConfig) -> RunResult<ScenarioOutput> {
    let seed = cfg
        .seed
        .ok_or_else(|| ConfigError::new("experiment.seed", "seed is required"))?;
    match cfg.scenario {
        Scenario::GroverBaseline => grover(cfg, seed),
        Scenario::PhaseMismatch => mismatch(cfg, seed),
        Scenario::Iterative => iterative(cfg, seed),
        Scenario::Recursive => recursive(cfg, seed),
        Scenario::Hamiltonian => hamiltonian(cfg, seed),
        Scenario::Nondiagonal => nondiagonal(cfg, seed),
        Scenario::Workspace => workspace(cfg, seed),
        Scenario::PerTargetMatching => per_target_matching(cfg, seed),
    }
}

// ------------------------------------------------------------ baseline

fn grover(cfg: &ExperimentConfig, seed: u64) -> RunResult<ScenarioOutput> {
    let dim = checked_dim(cfg.n_qubits)?;
    let targets = build_targets(cfg, dim, seed)?;
    let zero = zero_set(dim)?;
    let u = build_unitary(cfg, dim, seed)?;
    let noise = noise_spec(cfg, seed);
    let st = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target)?;
    let s0 = noise.sample_perturbed_inversion(&zero, PerturbedSide::Zero)?;

    let alpha0 = u.initial_state()?.target_projection(&targets);
    if alpha0 <= 0.0 {
        return Err(ConfigError::new(
            "experiment.targets",
            "the prepared state has no weight on the targets; nothing to amplify",
        )
        .into());
    }
    let theta0 = alpha0.min(1.0).asin();
    let n = cfg
        .iterations
        .unwrap_or_else(|| ((PI / (4.0 * theta0) - 0.5).round().max(0.0)) as usize);

    let mut engine = AmplificationEngine::new(&u, &s0, &st, &targets)?;
    let traj = engine.run(n)?;

    let mut summary = head(cfg, seed, dim, &targets);
    summary.push_f64("alpha_0", alpha0);
    summary.push_f64("theta_0", theta0);
    summary.push_int("iterations", n);
    summary.push_int("measured_queries", traj.total_queries());
    summary.push_f64("predicted_success", ((2 * n + 1) as f64 * theta0).sin().powi(2));
    summary.push_f64("measured_success", traj.final_success().unwrap_or(0.0));
    summary.push_f64("measured_max_success", traj.max_success());
    Ok(ScenarioOutput::new(CsvDoc::trajectory(&traj), summary))
}

// ------------------------------------------------------------ mismatch

/// Exact two-level model of amplitude amplification when the target-side
/// rotation applies one common angle: the walk never leaves the plane of
/// the prepared state and the normalized target component.
fn plane_model_max(alpha: f64, phi: f64, varphi: f64, n: usize) -> f64 {
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    let u0 = [Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0)];
    let mut v = u0;
    let st = Complex64::from_polar(1.0, phi);
    let s0 = Complex64::from_polar(1.0, varphi) - Complex64::ONE;
    let mut best = alpha * alpha;
    for _ in 0..n {
        v[0] *= st;
        let ip = u0[0].conj() * v[0] + u0[1].conj() * v[1];
        v[0] += s0 * ip * u0[0];
        v[1] += s0 * ip * u0[1];
        best = best.max(v[0].norm_sqr());
    }
    best
}

fn mismatch(cfg: &ExperimentConfig, seed: u64) -> RunResult<ScenarioOutput> {
    if cfg.delta_t > 0.0 || cfg.delta_0 > 0.0 {
        return Err(ConfigError::new(
            "noise.delta_t",
            "phase_mismatch studies fixed rotation angles; use the iterative or recursive scenarios for perturbed inversions",
        )
        .into());
    }
    let dim = checked_dim(cfg.n_qubits)?;
    let targets = build_targets(cfg, dim, seed)?;
    let zero = zero_set(dim)?;
    let u = build_unitary(cfg, dim, seed)?;
    let phi = cfg.resolved_phi();
    let varphi = cfg.resolved_varphi();
    let st = DiagonalPhaseOp::rotation(&targets, phi)?;
    let s0 = DiagonalPhaseOp::rotation(&zero, varphi)?;

    let alpha0 = u.initial_state()?.target_projection(&targets);
    let n = cfg.iterations.unwrap_or(250);
    let mut engine = AmplificationEngine::new(&u, &s0, &st, &targets)?;
    let traj = engine.run(n)?;

    let mut summary = head(cfg, seed, dim, &targets);
    summary.push_f64("phi", phi);
    summary.push_f64("varphi", varphi);
    summary.push_f64("alpha_0", alpha0);
    summary.push_int("iterations", n);
    summary.push_int("measured_queries", traj.total_queries());
    summary.push_f64("predicted_max_success", plane_model_max(alpha0, phi, varphi, n));
    summary.push_f64("measured_max_success", traj.max_success());
    summary.push_f64("measured_final_success", traj.final_success().unwrap_or(0.0));
    Ok(ScenarioOutput::new(CsvDoc::trajectory(&traj), summary))
}

// ------------------------------------------------------------ iterative

fn iterative(cfg: &ExperimentConfig, seed: u64) -> RunResult<ScenarioOutput> {
    if cfg.delta_0 > 0.0 {
        return Err(ConfigError::new(
            "noise.delta_0",
            "the iterative operator applies its own zero-side rotation exactly; delta_0 must be 0 here",
        )
        .into());
    }
    let dim = checked_dim(cfg.n_qubits)?;
    let targets = build_targets(cfg, dim, seed)?;
    let u = build_unitary(cfg, dim, seed)?;
    let rt = target_oracle(cfg, &targets, seed)?;
    let varphi = cfg.resolved_varphi();

    let predicted_queries = qsearch::predict_iterative_queries(&u, &rt, varphi)?;
    let mut engine = IterativeEngine::new(&u, &rt, varphi, &targets)?;
    let theta = engine.frame().theta;
    let auto = engine.auto_iterations();
    let traj = engine.run(cfg.iterations)?;
    let n = traj.len().saturating_sub(1);

    let mut summary = head(cfg, seed, dim, &targets);
    summary.push_f64("phi", cfg.resolved_phi());
    summary.push_f64("varphi", varphi);
    summary.push_f64("delta_t", cfg.delta_t);
    summary.push_f64("theta", theta);
    summary.push_int("auto_iterations", auto);
    summary.push_int("iterations", n);
    summary.push_f64("predicted_queries", predicted_queries);
    summary.push_int("measured_queries", traj.total_queries());
    let linear = theta * (1.0 + 2.0 * (varphi / 2.0).sin() * n as f64);
    summary.push_f64("predicted_final_angle_linear", linear);
    if let Some(last) = traj.last() {
        if let Some(angle) = last.angle_to_sigma {
            summary.push_f64("measured_final_angle", angle);
        }
        if let Some(tau) = last.overlap_tau {
            summary.push_f64("measured_final_overlap_tau", tau);
        }
    }
    summary.push_f64("measured_final_success", traj.final_success().unwrap_or(0.0));
    summary.push_f64("measured_max_success", traj.max_success());
    Ok(ScenarioOutput::new(CsvDoc::trajectory(&traj), summary))
}

// ------------------------------------------------------------ recursive

fn recursive(cfg: &ExperimentConfig, seed: u64) -> RunResult<ScenarioOutput> {
    let dim = checked_dim(cfg.n_qubits)?;
    let targets = build_targets(cfg, dim, seed)?;
    let zero = zero_set(dim)?;
    let u = build_unitary(cfg, dim, seed)?;
    let noise = noise_spec(cfg, seed);
    let st = noise.sample_perturbed_inversion(&targets, PerturbedSide::Target)?;
    let s0 = noise.sample_perturbed_inversion(&zero, PerturbedSide::Zero)?;

    // fail on an overflowing depth before simulating anything
    let predicted_queries = recursion_query_count(cfg.levels)?;
    let outcome = run_recursive(&u, &s0, &st, &targets, cfg.levels, cfg.budget)?;
    let diag = compute_recursion_diagnostics(&u, &s0, &st, &targets)?;

    // distances of the sampled operators from the exact inversions,
    // folded back into phase-angle bounds
    let m_dt = 2.0 * (operator_distance(&st, &targets) / 2.0).min(1.0).asin();
    let m_d0 = 2.0 * (operator_distance(&s0, &zero) / 2.0).min(1.0).asin();

    let mut summary = head(cfg, seed, dim, &targets);
    summary.push_int("levels_requested", cfg.levels);
    summary.push_int("levels_run", outcome.levels.len().saturating_sub(1));
    summary.push_bool("truncated", outcome.truncated);
    summary.push_f64("delta_t", cfg.delta_t);
    summary.push_f64("delta_0", cfg.delta_0);
    summary.push_f64("measured_delta_t", m_dt);
    summary.push_f64("measured_delta_0", m_d0);
    summary.push_int("predicted_queries", predicted_queries);
    summary.push_int("measured_queries", outcome.final_level().queries);
    summary.push_f64("alpha_0", outcome.levels[0].alpha);
    for level in &outcome.levels[1..] {
        let prev = outcome.levels[level.level as usize - 1].alpha;
        summary.push_f64(&format!("alpha_{}", level.level), level.alpha);
        if let Some(kappa) = level.kappa {
            summary.push_f64(&format!("kappa_{}", level.level), kappa);
        }
        summary.push_f64(
            &format!("kappa_floor_{}", level.level),
            kappa_lower_bound(m_dt, m_d0, prev),
        );
    }
    summary.push_f64("kappa_bar", kappa_bar(m_dt, m_d0));
    match exponent_p(m_dt, m_d0) {
        Ok(p) => summary.push_f64("exponent_p", p),
        Err(_) => summary.push_str("exponent_p", "undefined"),
    }
    summary.push_f64("exponent_p_bound", exponent_p_bound(m_dt, m_d0));
    summary.push_bool("condition_holds", diag.condition_holds());
    summary.push_f64("max_ratio_defect", diag.max_ratio_defect());
    summary.push_f64("beta_bar", diag.beta_bar);
    summary
        .push_f64("measured_final_success", outcome.final_level().alpha.powi(2));
    Ok(ScenarioOutput::new(CsvDoc::trajectory(&outcome.trajectory()), summary))
}

// ------------------------------------------------------------ hamiltonian

/// Closed-form peak of the projector-pair generator, from its exact
/// two-level reduction onto the span of the prepared state and the
/// normalized target component.
fn pair_prediction(alpha: f64, s: f64) -> Option<(f64, f64)> {
    let b = (1.0 - alpha * alpha).max(0.0).sqrt();
    let hz = ((1.0 - s) * (b * b - alpha * alpha) - (1.0 + s)) / 2.0;
    let hx = -(1.0 - s) * alpha * b;
    let r = hz.hypot(hx);
    if r < 1e-12 {
        return None;
    }
    let q = (hx / r) * b + (hz / r) * alpha;
    let peak = (q * q).max(alpha * alpha);
    let time = if q * q >= alpha * alpha { PI / (2.0 * r) } else { 0.0 };
    Some((peak, time))
}

fn hamiltonian(cfg: &ExperimentConfig, seed: u64) -> RunResult<ScenarioOutput> {
    let dim = checked_dim(cfg.n_qubits)?;
    check_dense(dim, "hamiltonian evolution")?;
    let targets = build_targets(cfg, dim, seed)?;
    let u = build_unitary(cfg, dim, seed)?;
    let alpha0 = u.initial_state()?.target_projection(&targets);

    let (h, predicted_peak, predicted_time) = match cfg.ham_kind {
        HamKind::ProjectorPair => {
            let h = SearchHamiltonian::projector_pair(&u, &targets, cfg.ham_s)?;
            let (peak, time) = pair_prediction(alpha0, cfg.ham_s).ok_or_else(|| {
                ConfigError::new("hamiltonian.s", "the generator is trivial for these parameters")
            })?;
            (h, peak, time)
        }
        HamKind::OracleRotated => {
            let rt = target_oracle(cfg, &targets, seed)?;
            let h = SearchHamiltonian::oracle_rotated(&u, &rt)?;
            let frame = compute_subspace_frame(&u, &rt)?;
            let peak = frame.tau.success_probability(&targets);
            (h, peak, PI / (2.0 * frame.theta.sin()))
        }
    };

    let window = cfg.t_max.unwrap_or(1.3 * predicted_time.max(1.0));
    let scan = h.scan_target_probability(&targets, window, cfg.samples)?;

    let mut summary = head(cfg, seed, dim, &targets);
    summary.push_str("kind", match cfg.ham_kind {
        HamKind::ProjectorPair => "projector_pair",
        HamKind::OracleRotated => "oracle_rotated",
    });
    summary.push_f64("s", cfg.ham_s);
    summary.push_f64("alpha_0", alpha0);
    summary.push_f64("norm_bound", h.norm_bound());
    summary.push_f64("scan_window", window);
    summary.push_int("scan_samples", cfg.samples);
    summary.push_f64("predicted_peak_probability", predicted_peak);
    summary.push_f64("predicted_peak_time", predicted_time);
    summary.push_f64("measured_peak_probability", scan.peak_probability);
    summary.push_f64("measured_peak_time", scan.peak_time);
    Ok(ScenarioOutput::new(CsvDoc::scan(&scan.samples), summary))
}

// ------------------------------------------------------------ nondiagonal

fn build_basis(spec: BasisSpec, dim: usize, seed: u64) -> RunResult<DenseUnitary> {
    Ok(match spec {
        BasisSpec::Identity => DenseUnitary::new(DMatrix::identity(dim, dim))?,
        BasisSpec::NearIdentity(m) => near_identity_unitary(dim, seed, m)?,
        BasisSpec::DenseRandom => haar_random_unitary(dim, seed)?,
    })
}

/// One application of the iterative operator built from arbitrary
/// selective factors, rightmost factor first.
fn t_step(
    u: &UnitaryFamily,
    s0: &dyn Selective,
    st: &dyn Selective,
    state: &mut StateVector,
) -> qsearch::Result<()> {
    st.apply(state)?;
    u.apply_inverse(state)?;
    s0.apply(state)?;
    u.apply(state)?;
    st.apply_inverse(state)?;
    u.apply_inverse(state)?;
    s0.apply_inverse(state)?;
    u.apply(state)?;
    Ok(())
}

fn nondiagonal(cfg: &ExperimentConfig, seed: u64) -> RunResult<ScenarioOutput> {
    if cfg.delta_0 > 0.0 {
        return Err(ConfigError::new(
            "noise.delta_0",
            "the zero-side core is a plain rotation here; delta_0 must be 0",
        )
        .into());
    }
    let dim = checked_dim(cfg.n_qubits)?;
    check_dense(dim, "basis-changed search")?;
    let targets = build_targets(cfg, dim, seed)?;
    let zero = zero_set(dim)?;
    let u = build_unitary(cfg, dim, seed)?;
    let varphi = cfg.resolved_varphi();

    let e_p = build_basis(cfg.e_p, dim, seed.wrapping_add(101))?;
    let e_q = build_basis(cfg.e_q, dim, seed.wrapping_add(202))?;
    let st_core = target_oracle(cfg, &targets, seed)?;
    let s0_core = DiagonalPhaseOp::rotation(&zero, varphi)?;
    let st_tilde = ConjugatedOp::new(e_q.clone(), st_core.clone())?;
    let s0_tilde = ConjugatedOp::new(e_p.clone(), s0_core.clone())?;

    let mut warnings = Vec::new();
    let sel_p = selectivity(&e_p, 0)?;
    let mut sel_q = f64::INFINITY;
    for &t in targets.indices() {
        sel_q = sel_q.min(selectivity(&e_q, t)?);
    }
    for (name, sel) in [("e_p at index 0", sel_p), ("e_q at a target", sel_q)] {
        if sel < SELECTIVITY_FLOOR {
            warnings.push(format!(
                "selectivity of {name} is {sel:.3} < {SELECTIVITY_FLOOR}; the basis change moves real weight off the selected axes and the equivalent-walk analysis may not describe this run"
            ));
        }
    }

    // the same walk seen in the basis-changed frame: V = Eq^dag U Ep with
    // plain diagonal cores, started from V Ep^dag |0>
    let u_dense = u.to_dense()?;
    let v_dense =
        DenseUnitary::new(e_q.matrix().adjoint() * u_dense.matrix() * e_p.matrix())?;
    let v_fam = UnitaryFamily::Dense(v_dense);
    let ep_fam = UnitaryFamily::Dense(e_p.clone());
    let eq_fam = UnitaryFamily::Dense(e_q.clone());

    let frame = compute_subspace_frame(&u, &st_tilde)?;
    let n = cfg.iterations.unwrap_or_else(|| {
        (PI / (4.0 * frame.theta * (varphi / 2.0).sin())).floor().max(0.0) as usize
    });

    // closed-form queries, weighted by the prepared state as seen from
    // the Eq frame (the frame in which the target core is diagonal)
    let mut seen = u.initial_state()?;
    eq_fam.apply_inverse(&mut seen)?;
    let weight: f64 = seen
        .amplitudes()
        .iter()
        .zip(st_core.phases())
        .map(|(a, &p)| a.norm_sqr() * (p / 2.0).sin().powi(2))
        .sum();
    let denom = (varphi / 2.0).sin().abs() * weight.sqrt();
    let predicted_queries = if denom > 1e-15 { PI / (4.0 * denom) } else { f64::INFINITY };

    let mut direct = u.initial_state()?;
    let mut v_state = StateVector::zero_state(dim)?;
    ep_fam.apply_inverse(&mut v_state)?;
    v_fam.apply(&mut v_state)?;

    let mut vform_dev: f64 = {
        let mut back = v_state.clone();
        eq_fam.apply(&mut back)?;
        max_amp_deviation(&back, &direct)
    };
    let mut traj = RunTrajectory::default();
    let record = |step: usize, state: &StateVector| {
        let alpha = state.target_projection(&targets);
        let angle = frame
            .sigma
            .inner_product(state)
            .map(|c| c.norm().min(1.0).acos())
            .unwrap_or(f64::NAN);
        let tau = frame.tau.inner_product(state).map(|c| c.norm()).unwrap_or(f64::NAN);
        StepRecord {
            step_index: step,
            oracle_queries: 2 * step as u64,
            alpha,
            success_prob: alpha * alpha,
            angle_to_sigma: Some(angle),
            overlap_tau: Some(tau),
        }
    };
    traj.steps.push(record(0, &direct));
    for step in 1..=n {
        t_step(&u, &s0_tilde, &st_tilde, &mut direct)?;
        t_step(&v_fam, &s0_core, &st_core, &mut v_state)?;
        let mut back = v_state.clone();
        eq_fam.apply(&mut back)?;
        vform_dev = vform_dev.max(max_amp_deviation(&back, &direct));
        traj.steps.push(record(step, &direct));
    }

    let mut summary = head(cfg, seed, dim, &targets);
    summary.push_f64("phi", cfg.resolved_phi());
    summary.push_f64("varphi", varphi);
    summary.push_str("e_p", cfg.e_p.label());
    summary.push_str("e_q", cfg.e_q.label());
    summary.push_f64("selectivity_e_p", sel_p);
    summary.push_f64("selectivity_e_q_min", sel_q);
    summary.push_f64("theta", frame.theta);
    summary.push_int("iterations", n);
    summary.push_f64("predicted_queries", predicted_queries);
    summary.push_int("measured_queries", 2 * n as u64);
    summary.push_f64("vform_max_deviation", vform_dev);
    summary.push_f64("measured_final_success", traj.final_success().unwrap_or(0.0));
    summary.push_f64("measured_max_success", traj.max_success());
    let mut out = ScenarioOutput::new(CsvDoc::trajectory(&traj), summary);
    out.warnings = warnings;
    Ok(out)
}

fn max_amp_deviation(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

// ------------------------------------------------------------ workspace

fn build_block(spec: OpSpec, ancilla_qubits: usize, field: &str) -> RunResult<DenseUnitary> {
    let d = 1usize << ancilla_qubits;
    let needs_single_qubit = matches!(
        spec,
        OpSpec::Rotation(_) | OpSpec::MinusRotation(_) | OpSpec::Mix(_)
    );
    if needs_single_qubit && ancilla_qubits != 1 {
        return Err(ConfigError::new(
            field,
            "rotation and mix blocks act on a single workspace qubit; set ancilla_qubits = 1",
        )
        .into());
    }
    let m = match spec {
        OpSpec::Identity => DMatrix::identity(d, d),
        OpSpec::MinusIdentity => DMatrix::identity(d, d).map(|x: Complex64| -x),
        OpSpec::Phase(x) => DMatrix::identity(d, d).map(|v: Complex64| v * Complex64::from_polar(1.0, x)),
        OpSpec::Rotation(x) | OpSpec::MinusRotation(x) => {
            let g = single_qubit_rotation(x);
            let sign = if matches!(spec, OpSpec::MinusRotation(_)) { -1.0 } else { 1.0 };
            DMatrix::from_fn(2, 2, |i, j| g[i][j] * sign)
        }
        OpSpec::Mix(x) => {
            let (c, s) = (Complex64::new(x.cos(), 0.0), Complex64::new(0.0, x.sin()));
            DMatrix::from_fn(2, 2, |i, j| if i == j { c } else { s })
        }
    };
    Ok(DenseUnitary::new(m)?)
}

fn workspace(cfg: &ExperimentConfig, seed: u64) -> RunResult<ScenarioOutput> {
    let dim = checked_dim(cfg.n_qubits)?;
    let w = cfg.ancilla_qubits;
    checked_dim(cfg.n_qubits + w)?;
    let targets = build_targets(cfg, dim, seed)?;
    let base_u = build_unitary(cfg, dim, seed)?;
    let u_hat = UnitaryFamily::WithAncilla { base: Box::new(base_u), ancilla_qubits: w };
    let a = build_block(cfg.a_op, w, "workspace.a_op")?;
    let b = build_block(cfg.b_op, w, "workspace.b_op")?;
    let oracle = WorkspaceOracle::new(&targets, a.clone(), b.clone(), w)?;
    let joint_targets = targets.with_ancilla(w)?;

    let mut summary = head(cfg, seed, dim, &targets);
    summary.push_int("ancilla_qubits", w);
    summary.push_int("joint_dim", dim << w);
    summary.push_str("a_op", cfg.a_op.label());
    summary.push_str("b_op", cfg.b_op.label());

    match cfg.ws_mode {
        EngineMode::Iterative => {
            let eye = DMatrix::<Complex64>::identity(b.dim(), b.dim());
            let b_dev = (b.matrix() - eye).iter().map(|x| x.norm()).fold(0.0, f64::max);
            if b_dev > 1e-12 {
                return Err(ConfigError::new(
                    "workspace.b_op",
                    format!(
                        "iterative workspace search needs the unmarked block to be the identity so the walk has a fixed prepared state to rotate against; got deviation {b_dev:.3e}. Set b_op = identity or mode = recursive"
                    ),
                )
                .into());
            }
            let varphi = cfg.resolved_varphi();
            let mut engine = IterativeEngine::new(&u_hat, &oracle, varphi, &joint_targets)?;
            let theta = engine.frame().theta;
            let auto = engine.auto_iterations();
            let traj = engine.run(cfg.iterations)?;
            summary.push_str("mode", "iterative");
            summary.push_f64("varphi", varphi);
            summary.push_f64("theta", theta);
            summary.push_int("auto_iterations", auto);
            summary.push_int("iterations", traj.len().saturating_sub(1));
            summary.push_f64(
                "predicted_iterations",
                PI / (4.0 * theta * (varphi / 2.0).sin()),
            );
            summary.push_int("measured_queries", traj.total_queries());
            summary.push_f64("measured_marginal_success", traj.final_success().unwrap_or(0.0));
            summary.push_f64("measured_max_success", traj.max_success());
            Ok(ScenarioOutput::new(CsvDoc::trajectory(&traj), summary))
        }
        EngineMode::Recursive => {
            let zero_joint = zero_set(dim)?.with_ancilla(w)?;
            let s0_hat = DiagonalPhaseOp::inversion(&zero_joint)?;
            let predicted_queries = recursion_query_count(cfg.levels)?;
            let outcome =
                run_recursive(&u_hat, &s0_hat, &oracle, &joint_targets, cfg.levels, cfg.budget)?;
            // how far both blocks sit from the exact inversion/identity
            // pair, as a phase-angle bound on the joint target oracle
            let d_eye = DMatrix::<Complex64>::identity(a.dim(), a.dim());
            let dev_a = spectral_norm(&(a.matrix() + &d_eye));
            let dev_b = spectral_norm(&(b.matrix() - &d_eye));
            let m_dt = 2.0 * (dev_a.max(dev_b) / 2.0).min(1.0).asin();
            summary.push_str("mode", "recursive");
            summary.push_int("levels_requested", cfg.levels);
            summary.push_int("levels_run", outcome.levels.len().saturating_sub(1));
            summary.push_bool("truncated", outcome.truncated);
            summary.push_f64("measured_delta_t", m_dt);
            summary.push_int("predicted_queries", predicted_queries);
            summary.push_int("measured_queries", outcome.final_level().queries);
            summary.push_f64("alpha_0", outcome.levels[0].alpha);
            for level in &outcome.levels[1..] {
                let prev = outcome.levels[level.level as usize - 1].alpha;
                summary.push_f64(&format!("alpha_{}", level.level), level.alpha);
                if let Some(kappa) = level.kappa {
                    summary.push_f64(&format!("kappa_{}", level.level), kappa);
                }
                summary.push_f64(
                    &format!("kappa_floor_{}", level.level),
                    kappa_lower_bound(m_dt, 0.0, prev),
                );
            }
            summary.push_f64(
                "measured_marginal_success",
                outcome.final_level().alpha.powi(2),
            );
            Ok(ScenarioOutput::new(CsvDoc::trajectory(&outcome.trajectory()), summary))
        }
    }
}

// ------------------------------------------------------------ per-target

pub const PER_TARGET_HEADER: &str =
    "target,phi,matching_gap,u_j0,initial_prob,max_prob,final_prob";

fn per_target_matching(cfg: &ExperimentConfig, seed: u64) -> RunResult<ScenarioOutput> {
    let dim = checked_dim(cfg.n_qubits)?;
    let targets = build_targets(cfg, dim, seed)?;
    let zero = zero_set(dim)?;
    let u = build_unitary(cfg, dim, seed)?;
    let varphi = cfg.resolved_varphi();
    let phis = cfg.phi_list.clone().ok_or_else(|| {
        ConfigError::new("experiment.phi_list", "per_target_matching needs one phase per target")
    })?;
    if phis.len() != targets.count() {
        return Err(ConfigError::new(
            "experiment.phi_list",
            format!("got {} phases for {} targets", phis.len(), targets.count()),
        )
        .into());
    }
    let st = DiagonalPhaseOp::rotation_per_target(&targets, &phis)?;
    let s0 = DiagonalPhaseOp::rotation(&zero, varphi)?;
    let n = cfg.iterations.unwrap_or(250);

    let u0 = u.initial_state()?;
    let mut engine = AmplificationEngine::new(&u, &s0, &st, &targets)?;
    let initial: Vec<f64> =
        targets.indices().iter().map(|&t| u0.amplitude(t).norm_sqr()).collect();
    let mut peak = initial.clone();
    for _ in 0..n {
        engine.step()?;
        for (slot, &t) in targets.indices().iter().enumerate() {
            peak[slot] = peak[slot].max(engine.state().amplitude(t).norm_sqr());
        }
    }

    let mut doc = CsvDoc::new(PER_TARGET_HEADER);
    for (slot, &t) in targets.indices().iter().enumerate() {
        doc.rows.push(format!(
            "{},{},{},{},{},{},{}",
            t,
            sig(phis[slot]),
            sig(wrap_angle(phis[slot] - varphi).abs()),
            sig(u0.amplitude(t).norm()),
            sig(initial[slot]),
            sig(peak[slot]),
            sig(engine.state().amplitude(t).norm_sqr()),
        ));
    }

    let mut summary = head(cfg, seed, dim, &targets);
    summary.push_f64("varphi", varphi);
    summary.push_int("iterations", n);
    summary.push_int("measured_queries", engine.queries());
    summary.push_f64("measured_final_success", engine.state().success_probability(&targets));
    Ok(ScenarioOutput::new(doc, summary))
}

impl OpSpec {
    fn label(&self) -> String {
        match self {
            OpSpec::Identity => "identity".into(),
            OpSpec::MinusIdentity => "minus_identity".into(),
            OpSpec::Phase(x) => format!("phase:{x:?}"),
            OpSpec::Rotation(x) => format!("rotation:{x:?}"),
            OpSpec::MinusRotation(x) => format!("minus_rotation:{x:?}"),
            OpSpec::Mix(x) => format!("mix:{x:?}"),
        }
    }
}

impl BasisSpec {
    fn label(&self) -> String {
        match self {
            BasisSpec::Identity => "identity".into(),
            BasisSpec::NearIdentity(m) => format!("near_identity:{m:?}"),
            BasisSpec::DenseRandom => "dense_random".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(scenario: Scenario) -> ExperimentConfig {
        ExperimentConfig { scenario, seed: Some(11), n_qubits: 6, ..ExperimentConfig::default() }
    }

    #[test]
    fn grover_hits_its_own_prediction_when_exact() {
        let out = run_scenario(&base(Scenario::GroverBaseline)).unwrap();
        let predicted: f64 = out.summary.get("predicted_success").unwrap().parse().unwrap();
        let measured: f64 = out.summary.get("measured_success").unwrap().parse().unwrap();
        assert!((predicted - measured).abs() < 1e-9);
        assert!(measured > 0.99);
    }

    #[test]
    fn mismatch_plane_model_tracks_the_full_run() {
        let mut cfg = base(Scenario::PhaseMismatch);
        cfg.iterations = Some(60);
        let out = run_scenario(&cfg).unwrap();
        let predicted: f64 =
            out.summary.get("predicted_max_success").unwrap().parse().unwrap();
        let measured: f64 = out.summary.get("measured_max_success").unwrap().parse().unwrap();
        assert!((predicted - measured).abs() < 1e-9);
    }

    #[test]
    fn noisy_iterative_without_the_inversion_angle_is_rejected() {
        let mut cfg = base(Scenario::Iterative);
        cfg.delta_t = 0.1;
        cfg.phi = Some(PI / 2.0);
        let err = run_scenario(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn workspace_iterative_rejects_a_nonidentity_unmarked_block() {
        let mut cfg = base(Scenario::Workspace);
        cfg.b_op = OpSpec::Phase(0.3);
        let err = run_scenario(&cfg).unwrap_err();
        match err {
            RunFailure::Config(e) => assert_eq!(e.field, "workspace.b_op"),
            other => panic!("expected a config failure, got {other}"),
        }
    }

    #[test]
    fn oversized_registers_are_a_capability_failure() {
        let mut cfg = base(Scenario::GroverBaseline);
        cfg.n_qubits = 40;
        let err = run_scenario(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn identity_bases_leave_no_vform_gap() {
        let mut cfg = base(Scenario::Nondiagonal);
        cfg.e_p = BasisSpec::Identity;
        cfg.e_q = BasisSpec::Identity;
        cfg.iterations = Some(8);
        let out = run_scenario(&cfg).unwrap();
        let dev: f64 = out.summary.get("vform_max_deviation").unwrap().parse().unwrap();
        assert!(dev < 1e-12, "identity bases should reduce exactly, dev = {dev}");
        assert!(out.warnings.is_empty());
    }
}
