//! Flat per-run records and their JSON / CSV / table renderings.

use std::fmt::Write as _;

use cdmaxcut::{PerturbationConfig, SolveReport};
use serde::{Deserialize, Serialize};

/// One `(instance, algorithm)` run. `error` is set when the run failed, in
/// which case the numeric fields are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub instance: String,
    pub algorithm: String,
    pub vertices: usize,
    pub cut_weight: f64,
    pub primal_value: f64,
    pub certified_global: bool,
    pub certificate_failures: String,
    pub iterations_total: usize,
    pub reductions: usize,
    pub compensation_passes: usize,
    pub compensation_flips: usize,
    pub linear_exact: bool,
    pub alpha_mode: String,
    pub alpha_slack: f64,
    pub beta_mode: String,
    pub beta_scale: f64,
    pub linear_magnitude: f64,
    pub rng_seed: u64,
    pub epsilon: f64,
    pub tau: f64,
    pub max_iters: usize,
    /// Spins of the full graph, `+` / `-` per vertex.
    pub y: String,
    pub error: String,
    /// Seconds; JSON and table output only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<PerturbationConfig>,
}

/// Columns written to CSV. Wall-clock time is left out so identical runs
/// give identical bytes.
#[derive(Serialize)]
struct CsvRecord<'a> {
    instance: &'a str,
    algorithm: &'a str,
    vertices: usize,
    cut_weight: f64,
    primal_value: f64,
    certified_global: bool,
    certificate_failures: &'a str,
    iterations_total: usize,
    reductions: usize,
    compensation_passes: usize,
    compensation_flips: usize,
    linear_exact: bool,
    alpha_mode: &'a str,
    alpha_slack: f64,
    beta_mode: &'a str,
    beta_scale: f64,
    linear_magnitude: f64,
    rng_seed: u64,
    epsilon: f64,
    tau: f64,
    max_iters: usize,
    y: &'a str,
    error: &'a str,
}

impl Record {
    pub fn from_report(instance: &str, vertices: usize, r: &SolveReport) -> Self {
        let p = &r.options.policy;
        let s = &r.options.settings;
        Self {
            instance: instance.to_string(),
            algorithm: r.algorithm_id.to_string(),
            vertices,
            cut_weight: r.solution.cut_weight,
            primal_value: r.solution.primal_value,
            certified_global: r.certified_global,
            certificate_failures: r.certificate_failures.join(";"),
            iterations_total: r.iterations_total,
            reductions: r.reductions,
            compensation_passes: r.compensation_passes,
            compensation_flips: r.compensation_flips,
            linear_exact: r.linear_exact,
            alpha_mode: p.alpha_mode.to_string(),
            alpha_slack: p.alpha_slack,
            beta_mode: p.beta_mode.to_string(),
            beta_scale: p.beta_scale,
            linear_magnitude: p.linear_magnitude,
            rng_seed: p.rng_seed,
            epsilon: s.epsilon,
            tau: s.tau,
            max_iters: s.max_iters,
            y: r.solution.y.iter().map(|&v| if v > 0.0 { '+' } else { '-' }).collect(),
            error: String::new(),
            wall_time: Some(r.wall_time),
            config: r.config.clone(),
        }
    }

    pub fn failed(instance: &str, algorithm: &str, vertices: usize, err: &str) -> Self {
        Self {
            instance: instance.to_string(),
            algorithm: algorithm.to_string(),
            vertices,
            cut_weight: 0.0,
            primal_value: 0.0,
            certified_global: false,
            certificate_failures: String::new(),
            iterations_total: 0,
            reductions: 0,
            compensation_passes: 0,
            compensation_flips: 0,
            linear_exact: false,
            alpha_mode: String::new(),
            alpha_slack: 0.0,
            beta_mode: String::new(),
            beta_scale: 0.0,
            linear_magnitude: 0.0,
            rng_seed: 0,
            epsilon: 0.0,
            tau: 0.0,
            max_iters: 0,
            y: String::new(),
            error: err.to_string(),
            wall_time: None,
            config: None,
        }
    }

    fn csv_row(&self) -> CsvRecord<'_> {
        CsvRecord {
            instance: &self.instance,
            algorithm: &self.algorithm,
            vertices: self.vertices,
            cut_weight: self.cut_weight,
            primal_value: self.primal_value,
            certified_global: self.certified_global,
            certificate_failures: &self.certificate_failures,
            iterations_total: self.iterations_total,
            reductions: self.reductions,
            compensation_passes: self.compensation_passes,
            compensation_flips: self.compensation_flips,
            linear_exact: self.linear_exact,
            alpha_mode: &self.alpha_mode,
            alpha_slack: self.alpha_slack,
            beta_mode: &self.beta_mode,
            beta_scale: self.beta_scale,
            linear_magnitude: self.linear_magnitude,
            rng_seed: self.rng_seed,
            epsilon: self.epsilon,
            tau: self.tau,
            max_iters: self.max_iters,
            y: &self.y,
            error: &self.error,
        }
    }
}

pub fn to_json(records: &[Record]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

pub fn to_csv(records: &[Record]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r.csv_row()).expect("records serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

pub fn to_table(records: &[Record]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<7} {:>14} {:>9} {:>7} {:>5} {:>9}  note",
        "instance", "alg", "cut", "certified", "iters", "red", "time[s]"
    );
    for r in records {
        let time = r.wall_time.map(|t| format!("{t:.3}")).unwrap_or_default();
        let note = if r.error.is_empty() { &r.certificate_failures } else { &r.error };
        let _ = writeln!(
            out,
            "{:<12} {:<7} {:>14} {:>9} {:>7} {:>5} {:>9}  {}",
            r.instance, r.algorithm, r.cut_weight, r.certified_global, r.iterations_total, r.reductions, time, note
        );
    }
    out
}
