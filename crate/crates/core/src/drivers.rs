//! End-to-end pipelines: dual solve, reduction loop, compensation.
//!
//! * CDA1: quadratic (α, β) perturbation only.
//! * CDA2: linear perturbation `c ← c + Δc` with the unpenalized canonical
//!   dual (every `β_i = +∞`).
//! * CDA3: both perturbations at once.
//!
//! Cut weights are always reported on the unperturbed instance.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::compensation::compensate;
use crate::dual::{algorithm1, certify, Certificate, PerturbationConfig, SolverSettings};
use crate::error::{Error, Result};
use crate::instance::{build_primal_default, cut_value, AlgorithmId, CutSolution, PrimalProblem, WeightedGraph};
use crate::oracle::{brute_force_maxcut, DEFAULT_ORACLE_LIMIT};
use crate::parallel::{self, Execution};
use crate::perturbation::{choose_alpha, choose_beta, make_linear_perturbation, PerturbationPolicy};
use crate::reduction::{reduce_problem, split_feasible};

/// Everything a driver run needs besides the instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub policy: PerturbationPolicy,
    pub settings: SolverSettings,
    pub oracle_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            policy: PerturbationPolicy::default(),
            settings: SolverSettings::default(),
            oracle_limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        self.settings.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm_id: AlgorithmId,
    pub solution: CutSolution,
    pub iterations_total: usize,
    pub reductions: usize,
    pub compensation_passes: usize,
    pub compensation_flips: usize,
    pub certified_global: bool,
    /// Failed certificate conditions; empty when certified.
    pub certificate_failures: Vec<String>,
    /// Certificate of the first, unreduced dual solve.
    pub certificate: Option<Certificate>,
    pub wall_time: f64,
    /// Whether `Σ|Δc_i| < 1` held.
    pub linear_exact: bool,
    /// Configuration of the first dual solve.
    pub config: Option<PerturbationConfig>,
    pub options: SolveOptions,
}

fn config_for(prob: &PrimalProblem, alg: AlgorithmId, delta_c: Vec<f64>, opts: &SolveOptions) -> Result<PerturbationConfig> {
    let alpha = choose_alpha(prob.q(), &opts.policy)?;
    let beta = match alg {
        AlgorithmId::Cda2 => vec![f64::INFINITY; prob.dim()],
        _ => choose_beta(&alpha, &opts.policy)?,
    };
    PerturbationConfig::new(alpha, beta, delta_c, opts.settings)
}

fn run(prob: &PrimalProblem, alg: AlgorithmId, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let start = Instant::now();
    let n = prob.dim();
    let delta_c = match alg {
        AlgorithmId::Cda1 => vec![0.0; n],
        AlgorithmId::Cda2 | AlgorithmId::Cda3 => make_linear_perturbation(n, &opts.policy),
        AlgorithmId::Oracle => return Err(Error::input("the oracle is not a dual pipeline")),
    };
    let shifted = prob.with_linear_shift(&delta_c)?;

    let cfg = config_for(prob, alg, delta_c.clone(), opts)?;
    let first = algorithm1(prob, &cfg, &cfg.default_sigma0(prob)).map_err(|e| e.context("dual solve"))?;
    let certificate = certify(prob, &cfg, &first)?;
    let mut iterations_total = first.final_iterate.iteration;

    let (mut fixed, mut free) = split_feasible(&first.final_iterate.x_bar, opts.settings.tau);
    let mut reductions = 0;
    while !free.is_empty() {
        reductions += 1;
        let sub = reduce_problem(&shifted, &fixed, &free)?;
        let sub_cfg = config_for(&sub, alg, vec![0.0; sub.dim()], opts)?;
        let out = algorithm1(&sub, &sub_cfg, &sub_cfg.default_sigma0(&sub))
            .map_err(|e| e.context(&format!("dual solve after {reductions} reductions")))?;
        iterations_total += out.final_iterate.iteration;
        let (local_fixed, local_free) = split_feasible(&out.final_iterate.x_bar, opts.settings.tau);
        for (k, &i) in free.iter().enumerate() {
            fixed[i] = local_fixed[k];
        }
        free = local_free.iter().map(|&k| free[k]).collect();
    }

    let comp = compensate(prob, &fixed)?;
    let mut solution = CutSolution::from_x(prob, comp.x, alg)?;

    let mut failures: Vec<String> = certificate.failures().iter().map(|s| s.to_string()).collect();
    if reductions > 0 {
        failures.push("reduced".into());
    } else if solution.x != first.x_star {
        failures.push("compensation_changed_solution".into());
    }
    let certified_global = failures.is_empty();
    solution.certified_global = certified_global;

    Ok(SolveReport {
        algorithm_id: alg,
        solution,
        iterations_total,
        reductions,
        compensation_passes: comp.passes,
        compensation_flips: comp.flips,
        certified_global,
        certificate_failures: failures,
        certificate: Some(certificate),
        wall_time: start.elapsed().as_secs_f64(),
        linear_exact: alg == AlgorithmId::Cda1 || opts.policy.linear_exact(),
        config: Some(cfg),
        options: opts.clone(),
    })
}

pub fn cda1(prob: &PrimalProblem, opts: &SolveOptions) -> Result<SolveReport> {
    run(prob, AlgorithmId::Cda1, opts)
}

pub fn cda2(prob: &PrimalProblem, opts: &SolveOptions) -> Result<SolveReport> {
    run(prob, AlgorithmId::Cda2, opts)
}

pub fn cda3(prob: &PrimalProblem, opts: &SolveOptions) -> Result<SolveReport> {
    run(prob, AlgorithmId::Cda3, opts)
}

/// Solves a graph with the default pivot; the reported cut is recomputed
/// from the graph itself.
pub fn solve_graph(graph: &WeightedGraph, alg: AlgorithmId, opts: &SolveOptions) -> Result<SolveReport> {
    if alg == AlgorithmId::Oracle {
        opts.validate()?;
        let start = Instant::now();
        let solution = brute_force_maxcut(graph, opts.oracle_limit)?;
        return Ok(SolveReport {
            algorithm_id: alg,
            solution,
            iterations_total: 0,
            reductions: 0,
            compensation_passes: 0,
            compensation_flips: 0,
            certified_global: true,
            certificate_failures: Vec::new(),
            certificate: None,
            wall_time: start.elapsed().as_secs_f64(),
            linear_exact: true,
            config: None,
            options: opts.clone(),
        });
    }
    let prob = build_primal_default(graph);
    let mut report = run(&prob, alg, opts)?;
    let y = report.solution.y.clone();
    report.solution.cut_weight = cut_value(graph, &y)?;
    Ok(report)
}

/// Every `(graph, algorithm)` pair, ordered by graph then algorithm.
pub fn solve_batch(
    graphs: &[WeightedGraph],
    algorithms: &[AlgorithmId],
    opts: &SolveOptions,
    exec: Execution,
) -> Vec<Result<SolveReport>> {
    let jobs: Vec<(usize, AlgorithmId)> = (0..graphs.len())
        .flat_map(|g| algorithms.iter().map(move |&a| (g, a)))
        .collect();
    parallel::map(exec, &jobs, |&(g, a)| solve_graph(&graphs[g], a, opts))
}

/// Largest cut among several reports.
pub fn best_of(reports: &[SolveReport]) -> Option<&SolveReport> {
    reports
        .iter()
        .fold(None, |best: Option<&SolveReport>, r| match best {
            Some(b) if b.solution.cut_weight >= r.solution.cut_weight => Some(b),
            _ => Some(r),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{planted_graph, random_graph};
    use crate::oracle::brute_force_maxcut;

    #[test]
    fn single_variable() {
        let prob = PrimalProblem::from_rows(&[vec![0.0]], &[-5.0]).unwrap();
        for alg in AlgorithmId::ALL_CDA {
            let r = run(&prob, alg, &SolveOptions::default()).unwrap();
            assert_eq!(r.solution.x, vec![-1.0]);
            assert_eq!(r.solution.cut_weight, 5.0);
        }
        for alg in AlgorithmId::ALL_CDA {
            let r = solve_graph(&WeightedGraph::single_edge(5.0), alg, &SolveOptions::default()).unwrap();
            assert_eq!(r.solution.cut_weight, 5.0);
        }
    }

    #[test]
    fn cda3_without_shift_is_cda1() {
        let mut opts = SolveOptions::default();
        opts.policy.linear_magnitude = 0.0;
        for seed in 0..10 {
            let prob = build_primal_default(&random_graph(10, seed));
            let a = cda1(&prob, &opts).unwrap();
            let b = cda3(&prob, &opts).unwrap();
            assert_eq!(a.solution.x, b.solution.x);
            assert_eq!(a.iterations_total, b.iterations_total);
            assert_eq!(a.config.as_ref().unwrap().beta, b.config.as_ref().unwrap().beta);
        }
    }

    #[test]
    fn never_beats_oracle_and_certified_means_optimal() {
        let opts = SolveOptions::default();
        for seed in 0..12 {
            let g = if seed % 2 == 0 { random_graph(9, seed) } else { planted_graph(9, seed) };
            let best = brute_force_maxcut(&g, 26).unwrap().cut_weight;
            for alg in AlgorithmId::ALL_CDA {
                let r = solve_graph(&g, alg, &opts).unwrap();
                assert!(r.solution.cut_weight <= best);
                assert!(r.reductions <= 8);
                if r.certified_global {
                    assert_eq!(r.solution.cut_weight, best);
                }
            }
        }
    }

    #[test]
    fn batch_order_and_oracle_limit() {
        let graphs = vec![random_graph(6, 1), random_graph(7, 2)];
        let algs = [AlgorithmId::Cda1, AlgorithmId::Oracle];
        let out = solve_batch(&graphs, &algs, &SolveOptions::default(), Execution::Parallel);
        let ids: Vec<_> = out.iter().map(|r| r.as_ref().unwrap().algorithm_id).collect();
        assert_eq!(ids, vec![AlgorithmId::Cda1, AlgorithmId::Oracle, AlgorithmId::Cda1, AlgorithmId::Oracle]);
        let opts = SolveOptions {
            oracle_limit: 6,
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve_graph(&graphs[1], AlgorithmId::Oracle, &opts),
            Err(Error::Size { .. })
        ));
    }
}
