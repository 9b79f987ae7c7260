//! Batch runs: parameter sweeps and the Nussbaum ablation pair.

use serde::Serialize;
use serde_json::Value;

use crate::config::{set_path, ConfigError, Scenario, SweepSpec};
use crate::par;
use crate::sim::{simulate, ScenarioMetrics, SimConfig, SimOutput, Termination};

/// One prepared sweep point.
#[derive(Debug, Clone)]
pub struct SweepCase {
    pub value: Value,
    pub config: Result<SimConfig, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: Value,
    pub metrics: Option<ScenarioMetrics>,
    pub termination: Option<Termination>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Builds one config per swept value. A value that makes the document
/// invalid yields a per-case error; an unknown parameter path fails the
/// whole sweep.
pub fn sweep_cases(base: &Scenario, spec: &SweepSpec) -> Result<Vec<SweepCase>, ConfigError> {
    let values = spec.resolve()?;
    let doc = base.to_value();
    let mut probe = doc.clone();
    set_path(&mut probe, &spec.parameter, Value::Null)?;
    Ok(values
        .into_iter()
        .map(|value| {
            let mut d = doc.clone();
            set_path(&mut d, &spec.parameter, value.clone()).expect("path checked above");
            let config = Scenario::from_value(d)
                .map(|s| s.sim)
                .map_err(|e| e.to_string());
            SweepCase { value, config }
        })
        .collect())
}

fn run_case(c: &SweepCase) -> SweepRow {
    let res = c
        .config
        .clone()
        .and_then(|cfg| simulate(&cfg).map_err(|e| e.to_string()));
    match res {
        Ok(out) => SweepRow {
            value: c.value.clone(),
            metrics: Some(out.metrics),
            termination: Some(out.termination),
            error: None,
        },
        Err(e) => SweepRow {
            value: c.value.clone(),
            metrics: None,
            termination: None,
            error: Some(e),
        },
    }
}

pub fn run_sequential(cases: &[SweepCase]) -> Vec<SweepRow> {
    par::map_sequential(cases, run_case)
}

/// Runs the cases on at most `jobs` workers; row order follows `cases`.
pub fn run_parallel(cases: &[SweepCase], jobs: Option<usize>) -> Vec<SweepRow> {
    par::map_with_jobs(cases, jobs, run_case)
}

pub const SWEEP_CSV_HEADER: [&str; 9] = [
    "value",
    "max_abs_roll",
    "max_abs_pitch",
    "diverged",
    "heave_drift",
    "settling_time",
    "handovers",
    "termination",
    "error",
];

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], w: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        let value = match &r.value {
            Value::String(s) => s.clone(),
            v => v.to_string(),
        };
        let mut rec = vec![value];
        match &r.metrics {
            Some(m) => {
                rec.push(m.max_abs_roll.to_string());
                rec.push(m.max_abs_pitch.to_string());
                rec.push(m.diverged.to_string());
                rec.push(m.heave_drift.to_string());
                rec.push(m.settling_time.map_or(String::new(), |t| t.to_string()));
                rec.push(m.handovers.to_string());
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 6)),
        }
        rec.push(match &r.termination {
            Some(Termination::Completed) => "completed".into(),
            Some(Termination::Diverged(_)) => "diverged".into(),
            Some(Termination::StateError(_)) => "state_error".into(),
            Some(Termination::ControllerError(_)) => "controller_error".into(),
            None => String::new(),
        });
        rec.push(r.error.clone().unwrap_or_default());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Nussbaum on/off pair for one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRun {
    pub seed: u64,
    pub enabled: ScenarioMetrics,
    pub disabled: ScenarioMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationReport {
    pub flip_aux_sign: bool,
    pub runs: Vec<AblationRun>,
    /// Any with-Nussbaum run diverged (a regression).
    pub enabled_diverged: bool,
    /// Every without-Nussbaum run diverged.
    pub disabled_all_diverged: bool,
}

/// The two configs of a pair: identical apart from the Nussbaum switch.
pub fn ablation_pair(base: &SimConfig, seed: u64) -> (SimConfig, SimConfig) {
    let mut on = base.clone();
    on.seed = seed;
    on.flags.nussbaum_enabled = true;
    let mut off = on.clone();
    off.flags.nussbaum_enabled = false;
    (on, off)
}

/// Full outputs for one seed, enabled first.
pub fn run_ablation_pair(
    base: &SimConfig,
    seed: u64,
) -> Result<(SimOutput, SimOutput), crate::sim::SimError> {
    let (on, off) = ablation_pair(base, seed);
    Ok((simulate(&on)?, simulate(&off)?))
}

pub fn run_ablation(
    base: &SimConfig,
    seeds: &[u64],
    jobs: Option<usize>,
) -> Result<AblationReport, crate::sim::SimError> {
    let cases: Vec<(u64, bool)> = seeds
        .iter()
        .flat_map(|&s| [(s, true), (s, false)])
        .collect();
    let outs = par::map_with_jobs(&cases, jobs, |&(seed, enabled)| {
        let (on, off) = ablation_pair(base, seed);
        simulate(if enabled { &on } else { &off }).map(|o| o.metrics)
    });
    let mut runs = Vec::with_capacity(seeds.len());
    let mut it = outs.into_iter();
    for &seed in seeds {
        let enabled = it.next().expect("paired")?;
        let disabled = it.next().expect("paired")?;
        runs.push(AblationRun {
            seed,
            enabled,
            disabled,
        });
    }
    Ok(AblationReport {
        flip_aux_sign: base.flags.flip_aux_sign,
        enabled_diverged: runs.iter().any(|r| r.enabled.diverged),
        disabled_all_diverged: !runs.is_empty() && runs.iter().all(|r| r.disabled.diverged),
        runs,
    })
}
