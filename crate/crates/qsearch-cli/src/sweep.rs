//! Parameter sweeps: run one scenario across a list of values and stitch
//! the per-point CSVs into a single document with the swept value as the
//! leading column. Points run in parallel; rows are emitted in sweep
//! order so the output stays deterministic.

use rayon::prelude::*;

use crate::config::{sweep_key, ConfigError, ExperimentConfig};
use crate::csvout::CsvDoc;
use crate::scenario::{run_scenario, RunFailure, RunResult, ScenarioOutput, Summary};

pub fn run_sweep(cfg: &ExperimentConfig) -> RunResult<ScenarioOutput> {
    let sweep = cfg.sweep.clone().ok_or_else(|| {
        ConfigError::new("sweep.parameter", "sweep mode needs a [sweep] block")
    })?;
    let (section, key) = sweep_key(&sweep.parameter)?;

    let outputs: Vec<RunResult<ScenarioOutput>> = sweep
        .values
        .par_iter()
        .map(|value| {
            let mut point = cfg.clone();
            point.sweep = None;
            point.apply(section, key, value).map_err(RunFailure::from)?;
            point.validate().map_err(RunFailure::from)?;
            run_scenario(&point)
        })
        .collect();

    let mut doc: Option<CsvDoc> = None;
    let mut summary = Summary::default();
    summary.push_str("scenario", cfg.scenario.name());
    summary.push_str("sweep_parameter", &sweep.parameter);
    summary.push_int("sweep_points", sweep.values.len());
    let mut warnings = Vec::new();
    for (i, (value, output)) in sweep.values.iter().zip(outputs).enumerate() {
        let output = output?;
        let prefixed = output.doc.with_prefix(&sweep.parameter, value);
        match &mut doc {
            None => doc = Some(prefixed),
            Some(d) => d.extend(&prefixed),
        }
        for (k, v) in output.summary.pairs {
            summary.push_str(&format!("p{i}_{k}"), v);
        }
        for w in output.warnings {
            warnings.push(format!("[{}={}] {w}", sweep.parameter, value));
        }
    }
    let doc = doc.expect("validate() rejects empty sweeps");
    Ok(ScenarioOutput { doc, summary, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;

    #[test]
    fn sweep_rows_carry_the_swept_value_in_order() {
        let cfg = ExperimentConfig {
            scenario: Scenario::GroverBaseline,
            seed: Some(5),
            n_qubits: 5,
            iterations: Some(3),
            sweep: Some(crate::config::SweepConfig {
                parameter: "delta_t".into(),
                values: vec!["0.0".into(), "0.1".into()],
            }),
            ..ExperimentConfig::default()
        };
        let out = run_sweep(&cfg).unwrap();
        assert!(out.doc.header.starts_with("delta_t,step,"));
        // 2 points x (3 steps + initial record)
        assert_eq!(out.doc.rows.len(), 8);
        assert!(out.doc.rows[0].starts_with("0.0,0,"));
        assert!(out.doc.rows[4].starts_with("0.1,0,"));
        assert_eq!(out.summary.get("sweep_points"), Some("2"));
        assert!(out.summary.get("p1_measured_success").is_some());
    }

    #[test]
    fn a_bad_point_fails_the_whole_sweep() {
        let cfg = ExperimentConfig {
            seed: Some(5),
            n_qubits: 5,
            sweep: Some(crate::config::SweepConfig {
                parameter: "delta_t".into(),
                values: vec!["0.0".into(), "2.5".into()],
            }),
            ..ExperimentConfig::default()
        };
        let err = run_sweep(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
