//! Flat key=value configuration with `[section]` headers.
//!
//! The format is deliberately plain: comments start at `#`, every value is
//! one line, and `to_text` re-emits a canonical form that parses back to
//! an equal config. Unknown sections or keys are rejected so typos fail
//! loudly instead of silently running defaults.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

/// A parse or validation failure, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

// --------------------------------------------------------------- enums

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    GroverBaseline,
    PhaseMismatch,
    Iterative,
    Recursive,
    Hamiltonian,
    Nondiagonal,
    Workspace,
    /// Exploratory: per-target amplification vs the matching gap.
    PerTargetMatching,
}

impl Scenario {
    pub fn parse(v: &str) -> Option<Self> {
        Some(match v {
            "grover_baseline" => Self::GroverBaseline,
            "phase_mismatch" => Self::PhaseMismatch,
            "iterative" => Self::Iterative,
            "recursive" => Self::Recursive,
            "hamiltonian" => Self::Hamiltonian,
            "nondiagonal" => Self::Nondiagonal,
            "workspace" => Self::Workspace,
            "per_target_matching" => Self::PerTargetMatching,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::GroverBaseline => "grover_baseline",
            Self::PhaseMismatch => "phase_mismatch",
            Self::Iterative => "iterative",
            Self::Recursive => "recursive",
            Self::Hamiltonian => "hamiltonian",
            Self::Nondiagonal => "nondiagonal",
            Self::Workspace => "workspace",
            Self::PerTargetMatching => "per_target_matching",
        }
    }
}

/// Marked indices: an explicit list, or a seeded draw of a given size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetsSpec {
    List(Vec<usize>),
    Count(usize),
}

impl TargetsSpec {
    fn parse(field: &str, v: &str) -> ConfigResult<Self> {
        if let Some(rest) = v.strip_prefix("count:") {
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| ConfigError::new(field, format!("bad count `{rest}`")))?;
            return Ok(Self::Count(n));
        }
        let mut list = Vec::new();
        for part in v.split(',') {
            let idx = part
                .trim()
                .parse::<usize>()
                .map_err(|_| ConfigError::new(field, format!("bad index `{part}`")))?;
            list.push(idx);
        }
        Ok(Self::List(list))
    }

    pub fn canonical(&self) -> String {
        match self {
            Self::List(v) => v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
            Self::Count(n) => format!("count:{n}"),
        }
    }
}

/// Which state-preparation family to run against.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitarySpec {
    WalshHadamard,
    QubitProduct(Vec<f64>),
    DenseRandom,
    NearIdentity(f64),
}

impl UnitarySpec {
    fn parse(field: &str, v: &str) -> ConfigResult<Self> {
        if v == "walsh_hadamard" {
            return Ok(Self::WalshHadamard);
        }
        if v == "dense_random" {
            return Ok(Self::DenseRandom);
        }
        if let Some(rest) = v.strip_prefix("qubit_product:") {
            return Ok(Self::QubitProduct(parse_f64_list(field, rest)?));
        }
        if let Some(rest) = v.strip_prefix("near_identity:") {
            return Ok(Self::NearIdentity(parse_f64(field, rest)?));
        }
        Err(ConfigError::new(
            field,
            format!("unknown unitary `{v}`; expected walsh_hadamard, qubit_product:<angles>, dense_random, or near_identity:<magnitude>"),
        ))
    }

    fn canonical(&self) -> String {
        match self {
            Self::WalshHadamard => "walsh_hadamard".into(),
            Self::QubitProduct(a) => format!("qubit_product:{}", join_f64(a)),
            Self::DenseRandom => "dense_random".into(),
            Self::NearIdentity(m) => format!("near_identity:{m:?}"),
        }
    }
}

/// How the perturbations are drawn inside the +-delta band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawSpec {
    Uniform,
    FixedOffset,
}

impl LawSpec {
    fn parse(field: &str, v: &str) -> ConfigResult<Self> {
        match v {
            "uniform" => Ok(Self::Uniform),
            "fixed_offset" => Ok(Self::FixedOffset),
            _ => Err(ConfigError::new(field, format!("unknown noise law `{v}`"))),
        }
    }

    fn canonical(self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::FixedOffset => "fixed_offset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamKind {
    /// (1-s)(I - P_u) + (1+s)(I - P_t).
    ProjectorPair,
    /// (I - P_u) + P_sigma with sigma the oracle-rotated prepared state.
    OracleRotated,
}

impl HamKind {
    fn parse(field: &str, v: &str) -> ConfigResult<Self> {
        match v {
            "projector_pair" => Ok(Self::ProjectorPair),
            "oracle_rotated" => Ok(Self::OracleRotated),
            _ => Err(ConfigError::new(field, format!("unknown hamiltonian kind `{v}`"))),
        }
    }

    fn canonical(self) -> &'static str {
        match self {
            Self::ProjectorPair => "projector_pair",
            Self::OracleRotated => "oracle_rotated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineMode {
    Iterative,
    Recursive,
}

impl EngineMode {
    fn parse(field: &str, v: &str) -> ConfigResult<Self> {
        match v {
            "iterative" => Ok(Self::Iterative),
            "recursive" => Ok(Self::Recursive),
            _ => Err(ConfigError::new(field, format!("unknown mode `{v}`"))),
        }
    }

    fn canonical(self) -> &'static str {
        match self {
            Self::Iterative => "iterative",
            Self::Recursive => "recursive",
        }
    }
}

/// A small unitary on the workspace register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpSpec {
    Identity,
    MinusIdentity,
    /// e^{i x} I.
    Phase(f64),
    /// Real rotation by x (single workspace qubit only).
    Rotation(f64),
    /// -1 times the real rotation by x.
    MinusRotation(f64),
    /// cos(x) I + i sin(x) X: mixes the workspace states.
    Mix(f64),
}

impl OpSpec {
    fn parse(field: &str, v: &str) -> ConfigResult<Self> {
        if v == "identity" {
            return Ok(Self::Identity);
        }
        if v == "minus_identity" {
            return Ok(Self::MinusIdentity);
        }
        for (prefix, build) in [
            ("phase:", Self::Phase as fn(f64) -> Self),
            ("rotation:", Self::Rotation),
            ("minus_rotation:", Self::MinusRotation),
            ("mix:", Self::Mix),
        ] {
            if let Some(rest) = v.strip_prefix(prefix) {
                return Ok(build(parse_f64(field, rest)?));
            }
        }
        Err(ConfigError::new(
            field,
            format!("unknown workspace op `{v}`; expected identity, minus_identity, phase:<x>, rotation:<x>, minus_rotation:<x>, or mix:<x>"),
        ))
    }

    fn canonical(&self) -> String {
        match self {
            Self::Identity => "identity".into(),
            Self::MinusIdentity => "minus_identity".into(),
            Self::Phase(x) => format!("phase:{x:?}"),
            Self::Rotation(x) => format!("rotation:{x:?}"),
            Self::MinusRotation(x) => format!("minus_rotation:{x:?}"),
            Self::Mix(x) => format!("mix:{x:?}"),
        }
    }
}

/// The fixed basis-change unitaries of the non-diagonal scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisSpec {
    Identity,
    NearIdentity(f64),
    DenseRandom,
}

impl BasisSpec {
    fn parse(field: &str, v: &str) -> ConfigResult<Self> {
        if v == "identity" {
            return Ok(Self::Identity);
        }
        if v == "dense_random" {
            return Ok(Self::DenseRandom);
        }
        if let Some(rest) = v.strip_prefix("near_identity:") {
            return Ok(Self::NearIdentity(parse_f64(field, rest)?));
        }
        Err(ConfigError::new(
            field,
            format!("unknown basis `{v}`; expected identity, near_identity:<magnitude>, or dense_random"),
        ))
    }

    fn canonical(&self) -> String {
        match self {
            Self::Identity => "identity".into(),
            Self::NearIdentity(m) => format!("near_identity:{m:?}"),
            Self::DenseRandom => "dense_random".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<String>,
}

// --------------------------------------------------------------- config

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n_qubits: usize,
    pub targets: TargetsSpec,
    pub unitary: UnitarySpec,
    pub seed: Option<u64>,
    /// Target-side phase angle; defaults per scenario when unset.
    pub phi: Option<f64>,
    /// Zero-side phase angle; defaults per scenario when unset.
    pub varphi: Option<f64>,
    /// Per-target phases for the matching study.
    pub phi_list: Option<Vec<f64>>,
    pub iterations: Option<usize>,
    pub levels: u32,
    pub budget: Option<u64>,
    /// Classical-repetition constant used when reporting implied reruns.
    pub c_target: f64,
    pub out: Option<PathBuf>,

    pub delta_t: f64,
    pub delta_0: f64,
    pub law: LawSpec,

    pub ham_kind: HamKind,
    pub ham_s: f64,
    pub t_max: Option<f64>,
    pub samples: usize,

    pub ancilla_qubits: usize,
    pub a_op: OpSpec,
    pub b_op: OpSpec,
    pub ws_mode: EngineMode,

    pub e_p: BasisSpec,
    pub e_q: BasisSpec,

    pub sweep: Option<SweepConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::GroverBaseline,
            n_qubits: 10,
            targets: TargetsSpec::List(vec![1]),
            unitary: UnitarySpec::WalshHadamard,
            seed: None,
            phi: None,
            varphi: None,
            phi_list: None,
            iterations: None,
            levels: 4,
            budget: None,
            c_target: 0.5,
            out: None,
            delta_t: 0.0,
            delta_0: 0.0,
            law: LawSpec::Uniform,
            ham_kind: HamKind::ProjectorPair,
            ham_s: 0.0,
            t_max: None,
            samples: 2048,
            ancilla_qubits: 1,
            a_op: OpSpec::MinusIdentity,
            b_op: OpSpec::Identity,
            ws_mode: EngineMode::Iterative,
            e_p: BasisSpec::NearIdentity(0.1),
            e_q: BasisSpec::NearIdentity(0.1),
            sweep: None,
        }
    }
}

fn parse_f64(field: &str, v: &str) -> ConfigResult<f64> {
    let x = v
        .trim()
        .parse::<f64>()
        .map_err(|_| ConfigError::new(field, format!("bad number `{v}`")))?;
    if !x.is_finite() {
        return Err(ConfigError::new(field, format!("number must be finite, got `{v}`")));
    }
    Ok(x)
}

fn parse_f64_list(field: &str, v: &str) -> ConfigResult<Vec<f64>> {
    v.split(',').map(|p| parse_f64(field, p)).collect()
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

macro_rules! parse_int {
    ($field:expr, $v:expr, $ty:ty) => {
        $v.trim()
            .parse::<$ty>()
            .map_err(|_| ConfigError::new($field, format!("bad integer `{}`", $v)))
    };
}

impl ExperimentConfig {
    /// Parse the textual form; defaults fill everything not mentioned.
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut cfg = Self::default();
        let mut section = String::from("experiment");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let Some(name) = inner.strip_suffix(']') else {
                    return Err(ConfigError::new(
                        format!("line {}", lineno + 1),
                        format!("unterminated section header `{line}`"),
                    ));
                };
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            cfg.apply(&section, key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Set one field from its section, key and textual value. Shared by
    /// the parser, CLI flag overrides and sweep points.
    pub fn apply(&mut self, section: &str, key: &str, value: &str) -> ConfigResult<()> {
        let field = format!("{section}.{key}");
        let f = field.as_str();
        match (section, key) {
            ("experiment", "scenario") => {
                self.scenario = Scenario::parse(value)
                    .ok_or_else(|| ConfigError::new(f, format!("unknown scenario `{value}`")))?;
            }
            ("experiment", "n_qubits") => self.n_qubits = parse_int!(f, value, usize)?,
            ("experiment", "targets") => self.targets = TargetsSpec::parse(f, value)?,
            ("experiment", "unitary") => self.unitary = UnitarySpec::parse(f, value)?,
            ("experiment", "seed") => self.seed = Some(parse_int!(f, value, u64)?),
            ("experiment", "phi") => self.phi = Some(parse_f64(f, value)?),
            ("experiment", "varphi") => self.varphi = Some(parse_f64(f, value)?),
            ("experiment", "phi_list") => self.phi_list = Some(parse_f64_list(f, value)?),
            ("experiment", "iterations") => self.iterations = Some(parse_int!(f, value, usize)?),
            ("experiment", "levels") => self.levels = parse_int!(f, value, u32)?,
            ("experiment", "budget") => self.budget = Some(parse_int!(f, value, u64)?),
            ("experiment", "c_target") => self.c_target = parse_f64(f, value)?,
            ("experiment", "out") => self.out = Some(PathBuf::from(value)),
            ("noise", "delta_t") => self.delta_t = parse_f64(f, value)?,
            ("noise", "delta_0") => self.delta_0 = parse_f64(f, value)?,
            ("noise", "law") => self.law = LawSpec::parse(f, value)?,
            ("hamiltonian", "kind") => self.ham_kind = HamKind::parse(f, value)?,
            ("hamiltonian", "s") => self.ham_s = parse_f64(f, value)?,
            ("hamiltonian", "t_max") => self.t_max = Some(parse_f64(f, value)?),
            ("hamiltonian", "samples") => self.samples = parse_int!(f, value, usize)?,
            ("workspace", "ancilla_qubits") => self.ancilla_qubits = parse_int!(f, value, usize)?,
            ("workspace", "a_op") => self.a_op = OpSpec::parse(f, value)?,
            ("workspace", "b_op") => self.b_op = OpSpec::parse(f, value)?,
            ("workspace", "mode") => self.ws_mode = EngineMode::parse(f, value)?,
            ("nondiagonal", "e_p") => self.e_p = BasisSpec::parse(f, value)?,
            ("nondiagonal", "e_q") => self.e_q = BasisSpec::parse(f, value)?,
            ("sweep", "parameter") => {
                let sweep = self.sweep.get_or_insert(SweepConfig {
                    parameter: String::new(),
                    values: Vec::new(),
                });
                sweep.parameter = value.to_string();
            }
            ("sweep", "values") => {
                let sweep = self.sweep.get_or_insert(SweepConfig {
                    parameter: String::new(),
                    values: Vec::new(),
                });
                sweep.values = value.split(',').map(|v| v.trim().to_string()).collect();
            }
            _ => {
                return Err(ConfigError::new(f, "unknown key".to_string()));
            }
        }
        Ok(())
    }

    /// Canonical textual form; `parse(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[experiment]\n");
        if let Some(b) = self.budget {
            out.push_str(&format!("budget = {b}\n"));
        }
        out.push_str(&format!("c_target = {:?}\n", self.c_target));
        if let Some(n) = self.iterations {
            out.push_str(&format!("iterations = {n}\n"));
        }
        out.push_str(&format!("levels = {}\n", self.levels));
        out.push_str(&format!("n_qubits = {}\n", self.n_qubits));
        if let Some(p) = &self.out {
            out.push_str(&format!("out = {}\n", p.display()));
        }
        if let Some(x) = self.phi {
            out.push_str(&format!("phi = {x:?}\n"));
        }
        if let Some(list) = &self.phi_list {
            out.push_str(&format!("phi_list = {}\n", join_f64(list)));
        }
        out.push_str(&format!("scenario = {}\n", self.scenario.name()));
        if let Some(s) = self.seed {
            out.push_str(&format!("seed = {s}\n"));
        }
        out.push_str(&format!("targets = {}\n", self.targets.canonical()));
        out.push_str(&format!("unitary = {}\n", self.unitary.canonical()));
        if let Some(x) = self.varphi {
            out.push_str(&format!("varphi = {x:?}\n"));
        }
        out.push_str("\n[hamiltonian]\n");
        out.push_str(&format!("kind = {}\n", self.ham_kind.canonical()));
        out.push_str(&format!("s = {:?}\n", self.ham_s));
        out.push_str(&format!("samples = {}\n", self.samples));
        if let Some(x) = self.t_max {
            out.push_str(&format!("t_max = {x:?}\n"));
        }
        out.push_str("\n[noise]\n");
        out.push_str(&format!("delta_0 = {:?}\n", self.delta_0));
        out.push_str(&format!("delta_t = {:?}\n", self.delta_t));
        out.push_str(&format!("law = {}\n", self.law.canonical()));
        out.push_str("\n[nondiagonal]\n");
        out.push_str(&format!("e_p = {}\n", self.e_p.canonical()));
        out.push_str(&format!("e_q = {}\n", self.e_q.canonical()));
        if let Some(sweep) = &self.sweep {
            out.push_str("\n[sweep]\n");
            out.push_str(&format!("parameter = {}\n", sweep.parameter));
            out.push_str(&format!("values = {}\n", sweep.values.join(",")));
        }
        out.push_str("\n[workspace]\n");
        out.push_str(&format!("a_op = {}\n", self.a_op.canonical()));
        out.push_str(&format!("ancilla_qubits = {}\n", self.ancilla_qubits));
        out.push_str(&format!("b_op = {}\n", self.b_op.canonical()));
        out.push_str(&format!("mode = {}\n", self.ws_mode.canonical()));
        out
    }

    /// Target-side angle with the per-scenario default.
    pub fn resolved_phi(&self) -> f64 {
        self.phi.unwrap_or(match self.scenario {
            Scenario::Iterative
            | Scenario::Nondiagonal
            | Scenario::Hamiltonian
            | Scenario::Workspace => PI / 2.0,
            _ => PI,
        })
    }

    /// Zero-side angle with the per-scenario default.
    pub fn resolved_varphi(&self) -> f64 {
        self.varphi.unwrap_or(match self.scenario {
            Scenario::PhaseMismatch
            | Scenario::Iterative
            | Scenario::Nondiagonal
            | Scenario::PerTargetMatching => PI / 2.0,
            _ => PI,
        })
    }

    pub fn validate(&self) -> ConfigResult<()> {
        if self.seed.is_none() {
            return Err(ConfigError::new(
                "experiment.seed",
                "seed is required; pass --seed or set it in the config",
            ));
        }
        if self.n_qubits == 0 || self.n_qubits > 62 {
            return Err(ConfigError::new(
                "experiment.n_qubits",
                format!("need 1 <= n_qubits <= 62, got {}", self.n_qubits),
            ));
        }
        for (name, delta) in [("noise.delta_t", self.delta_t), ("noise.delta_0", self.delta_0)] {
            if !(0.0..PI / 2.0).contains(&delta) {
                return Err(ConfigError::new(
                    name,
                    format!(
                        "the small-perturbation analysis assumes 0 <= delta < pi/2, got {delta}"
                    ),
                ));
            }
        }
        for (name, angle) in [("experiment.phi", self.phi), ("experiment.varphi", self.varphi)] {
            if let Some(x) = angle {
                if !(0.0 < x && x < 2.0 * PI) {
                    return Err(ConfigError::new(
                        name,
                        format!("phase angles must lie in (0, 2*pi), got {x}"),
                    ));
                }
            }
        }
        match &self.targets {
            TargetsSpec::List(list) if list.is_empty() => {
                return Err(ConfigError::new("experiment.targets", "empty target list"));
            }
            TargetsSpec::Count(0) => {
                return Err(ConfigError::new("experiment.targets", "count must be >= 1"));
            }
            _ => {}
        }
        if let UnitarySpec::QubitProduct(angles) = &self.unitary {
            if angles.len() != self.n_qubits {
                return Err(ConfigError::new(
                    "experiment.unitary",
                    format!(
                        "qubit_product needs exactly n_qubits = {} angles, got {}",
                        self.n_qubits,
                        angles.len()
                    ),
                ));
            }
        }
        if let UnitarySpec::NearIdentity(m) = self.unitary {
            if !(0.0..=PI).contains(&m) {
                return Err(ConfigError::new(
                    "experiment.unitary",
                    format!("near_identity magnitude must lie in [0, pi], got {m}"),
                ));
            }
        }
        if self.samples < 2 {
            return Err(ConfigError::new(
                "hamiltonian.samples",
                format!("need at least 2 scan samples, got {}", self.samples),
            ));
        }
        if let Some(t) = self.t_max {
            if t <= 0.0 {
                return Err(ConfigError::new("hamiltonian.t_max", "scan window must be positive"));
            }
        }
        if self.c_target.is_nan() || self.c_target <= 0.0 {
            return Err(ConfigError::new("experiment.c_target", "must be positive"));
        }
        if self.ancilla_qubits == 0 || self.ancilla_qubits > 4 {
            return Err(ConfigError::new(
                "workspace.ancilla_qubits",
                format!("need 1..=4 workspace qubits, got {}", self.ancilla_qubits),
            ));
        }
        if let Some(list) = &self.phi_list {
            for x in list {
                if !(0.0 < *x && *x < 2.0 * PI) {
                    return Err(ConfigError::new(
                        "experiment.phi_list",
                        format!("phase angles must lie in (0, 2*pi), got {x}"),
                    ));
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            sweep_key(&sweep.parameter)?;
            if sweep.values.is_empty() {
                return Err(ConfigError::new("sweep.values", "no sweep values given"));
            }
        }
        Ok(())
    }
}

/// Map a sweepable parameter name to its (section, key) pair.
pub fn sweep_key(parameter: &str) -> ConfigResult<(&'static str, &'static str)> {
    Ok(match parameter {
        "delta_t" => ("noise", "delta_t"),
        "delta_0" => ("noise", "delta_0"),
        "phi" => ("experiment", "phi"),
        "varphi" => ("experiment", "varphi"),
        "n_qubits" => ("experiment", "n_qubits"),
        "levels" => ("experiment", "levels"),
        "seed" => ("experiment", "seed"),
        "targets" => ("experiment", "targets"),
        "s" => ("hamiltonian", "s"),
        _ => {
            return Err(ConfigError::new(
                "sweep.parameter",
                format!(
                    "`{parameter}` is not sweepable; choose one of delta_t, delta_0, phi, varphi, n_qubits, levels, seed, targets, s"
                ),
            ));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_lossless() {
        let cfg = ExperimentConfig {
            scenario: Scenario::Recursive,
            seed: Some(42),
            n_qubits: 12,
            targets: TargetsSpec::Count(3),
            phi: Some(PI / 2.0),
            delta_t: 0.2,
            levels: 5,
            sweep: Some(SweepConfig {
                parameter: "delta_t".into(),
                values: vec!["0.1".into(), "0.2".into()],
            }),
            ..ExperimentConfig::default()
        };
        let text = cfg.to_text();
        let parsed = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(parsed, cfg);
        assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let cfg = ExperimentConfig::parse(
            "# experiment file\n\n[experiment]\nseed = 7  # inline comment\nn_qubits = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.n_qubits, 4);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::parse("[experiment]\nseeed = 7\n").unwrap_err();
        assert_eq!(err.field, "experiment.seeed");
    }

    #[test]
    fn oversized_perturbations_are_rejected_with_the_assumption() {
        let cfg =
            ExperimentConfig { seed: Some(1), delta_t: 1.6, ..ExperimentConfig::default() };
        let err = cfg.validate().unwrap_err();
        assert!(err.message.contains("small-perturbation"));
    }

    #[test]
    fn missing_seed_is_a_config_error() {
        let cfg = ExperimentConfig::default();
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.field, "experiment.seed");
    }

    #[test]
    fn per_scenario_angle_defaults() {
        let mut cfg =
            ExperimentConfig { scenario: Scenario::PhaseMismatch, ..ExperimentConfig::default() };
        assert_eq!(cfg.resolved_phi(), PI);
        assert_eq!(cfg.resolved_varphi(), PI / 2.0);
        cfg.scenario = Scenario::Iterative;
        assert_eq!(cfg.resolved_phi(), PI / 2.0);
        cfg.scenario = Scenario::GroverBaseline;
        assert_eq!(cfg.resolved_varphi(), PI);
    }
}
