//! Fixing near-binary coordinates and re-posing the rest as a smaller problem.
//!
//! With `x = x_p + N x_h`, where `x_p` holds the fixed spins and `N` selects
//! the free coordinates,
//!
//! ```text
//! P(x) = P_h(x_h) + ½⟨x_p, Q x_p⟩ − ⟨c, x_p⟩
//! Q_h = NᵀQN,   c_h = Nᵀc − NᵀQx_p
//! ```
//!
//! `N` is never built; it is the `free_indices` list.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{check_spins, PrimalProblem};
use crate::linalg::dot;

/// One reduction: which coordinates were fixed and the problem left over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    /// `x_p`; zero on free positions.
    pub fixed_values: Vec<f64>,
    pub free_indices: Vec<usize>,
    pub reduced_problem: PrimalProblem,
}

impl ReductionStep {
    pub fn new(parent: &PrimalProblem, fixed_values: Vec<f64>, free_indices: Vec<usize>) -> Result<Self> {
        let reduced_problem = reduce_problem(parent, &fixed_values, &free_indices)?;
        Ok(Self {
            fixed_values,
            free_indices,
            reduced_problem,
        })
    }

    pub fn lift(&self, x_h: &[f64]) -> Result<Vec<f64>> {
        lift_solution(&self.fixed_values, &self.free_indices, x_h)
    }
}

fn distance_to_binary(v: f64) -> f64 {
    (v.abs() - 1.0).abs()
}

/// Splits `x̄` into fixed spins (`||x̄_i| − 1| ≤ tau`) and free indices.
/// When nothing qualifies, the coordinate closest to `±1` is fixed anyway so
/// the caller always makes progress.
pub fn split_feasible(x_bar: &[f64], tau: f64) -> (Vec<f64>, Vec<usize>) {
    let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
    let mut fixed = vec![0.0; x_bar.len()];
    let mut free = Vec::new();
    for (i, &v) in x_bar.iter().enumerate() {
        if distance_to_binary(v) <= tau {
            fixed[i] = sign(v);
        } else {
            free.push(i);
        }
    }
    if !x_bar.is_empty() && free.len() == x_bar.len() {
        let best = (0..x_bar.len())
            .min_by(|&a, &b| distance_to_binary(x_bar[a]).total_cmp(&distance_to_binary(x_bar[b])))
            .unwrap();
        fixed[best] = sign(x_bar[best]);
        free.retain(|&i| i != best);
    }
    (fixed, free)
}

fn check_split(n: usize, fixed_values: &[f64], free_indices: &[usize]) -> Result<()> {
    if fixed_values.len() != n {
        return Err(Error::input(format!(
            "fixed_values has {} entries, problem has {n}",
            fixed_values.len()
        )));
    }
    let mut is_free = vec![false; n];
    for w in free_indices.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::input("free indices must be strictly increasing"));
        }
    }
    for &i in free_indices {
        if i >= n {
            return Err(Error::input(format!("free index {i} out of range")));
        }
        is_free[i] = true;
    }
    for (i, &v) in fixed_values.iter().enumerate() {
        let ok = if is_free[i] { v == 0.0 } else { v == 1.0 || v == -1.0 };
        if !ok {
            return Err(Error::input(format!("fixed value {v} at index {i} is inconsistent with the split")));
        }
    }
    Ok(())
}

/// `Q_h = Q[free, free]`, `c_h,i = c_i − (Q x_p)_i` for free `i`.
pub fn reduce_problem(parent: &PrimalProblem, fixed_values: &[f64], free_indices: &[usize]) -> Result<PrimalProblem> {
    if free_indices.is_empty() {
        return Err(Error::input("nothing left to reduce"));
    }
    check_split(parent.dim(), fixed_values, free_indices)?;
    let q_h = parent.q().principal_submatrix(free_indices);
    let c_h = free_indices
        .iter()
        .map(|&i| parent.c()[i] - dot(parent.q().row(i), fixed_values))
        .collect();
    PrimalProblem::new(q_h, c_h)
}

/// `x = x_p + N x_h`.
pub fn lift_solution(fixed_values: &[f64], free_indices: &[usize], x_h: &[f64]) -> Result<Vec<f64>> {
    if x_h.len() != free_indices.len() {
        return Err(Error::input(format!(
            "x_h has {} entries for {} free indices",
            x_h.len(),
            free_indices.len()
        )));
    }
    check_spins(x_h, x_h.len())?;
    let mut x = fixed_values.to_vec();
    for (&i, &v) in free_indices.iter().zip(x_h) {
        if i >= x.len() {
            return Err(Error::input(format!("free index {i} out of range")));
        }
        x[i] = v;
    }
    Ok(x)
}

/// `½⟨x_p, Q x_p⟩ − ⟨c, x_p⟩`, the part of `P` that no longer depends on
/// the free coordinates.
pub fn fixed_part_constant(parent: &PrimalProblem, fixed_values: &[f64]) -> f64 {
    0.5 * parent.q().quad_form(fixed_values) - dot(parent.c(), fixed_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{random_problem, spins_from_bits};
    use crate::instance::primal_value;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn split_examples() {
        assert_eq!(split_feasible(&[0.98, -1.01, 0.35], 0.1), (vec![1.0, -1.0, 0.0], vec![2]));
        assert_eq!(split_feasible(&[1.0, -1.0], 0.1), (vec![1.0, -1.0], vec![]));
        assert_eq!(split_feasible(&[0.3, 0.5], 0.1), (vec![0.0, 1.0], vec![0]));
        // forced progress on an exact zero fixes to +1
        assert_eq!(split_feasible(&[0.0], 0.1), (vec![1.0], vec![]));
    }

    #[test]
    fn reduce_examples() {
        let p = PrimalProblem::from_rows(
            &[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 3.0], vec![2.0, 3.0, 0.0]],
            &[1.0, 1.0, 1.0],
        )
        .unwrap();
        let r = reduce_problem(&p, &[1.0, -1.0, 0.0], &[2]).unwrap();
        assert_eq!(r.q().to_rows(), vec![vec![0.0]]);
        assert_eq!(r.c(), &[2.0]);
        let id = reduce_problem(&p, &[0.0; 3], &[0, 1, 2]).unwrap();
        assert_eq!(id.q(), p.q());
        assert_eq!(id.c(), p.c());
        assert!(reduce_problem(&p, &[1.0, -1.0, 1.0], &[]).is_err());
        assert!(reduce_problem(&p, &[1.0, 0.0, 0.0], &[2]).is_err());
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_solution(&[1.0, -1.0, 0.0], &[2], &[-1.0]).unwrap(), vec![1.0, -1.0, -1.0]);
        assert_eq!(lift_solution(&[1.0, -1.0], &[], &[]).unwrap(), vec![1.0, -1.0]);
        assert!(lift_solution(&[1.0, 0.0], &[1], &[]).is_err());
        let x_bar = [0.97, -0.4, -1.02, 0.2];
        let (fixed, free) = split_feasible(&x_bar, 0.1);
        let x_h: Vec<f64> = free.iter().map(|&i| if x_bar[i] < 0.0 { -1.0 } else { 1.0 }).collect();
        assert_eq!(lift_solution(&fixed, &free, &x_h).unwrap(), vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn objective_consistency_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 0..100 {
            let p = random_problem(6, 10.0, t);
            let x_bar: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let (fixed, free) = split_feasible(&x_bar, 0.3);
            if free.is_empty() {
                continue;
            }
            let step = ReductionStep::new(&p, fixed, free).unwrap();
            let k = fixed_part_constant(&p, &step.fixed_values);
            let m = step.free_indices.len();
            for _ in 0..10 {
                let x_h = spins_from_bits(rng.gen::<u32>(), m);
                let lhs = primal_value(&p, &step.lift(&x_h).unwrap()).unwrap();
                let rhs = primal_value(&step.reduced_problem, &x_h).unwrap() + k;
                assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn reduced_optimum_never_beats_parent_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in 0..30 {
            let n = 4 + (t as usize % 7);
            let p = random_problem(n, 5.0, 100 + t);
            let best = |prob: &PrimalProblem| {
                let m = prob.dim();
                (0..1u32 << m)
                    .map(|b| spins_from_bits(b, m))
                    .min_by(|a, b| primal_value(prob, a).unwrap().total_cmp(&primal_value(prob, b).unwrap()))
                    .unwrap()
            };
            let parent_opt = primal_value(&p, &best(&p)).unwrap();
            let x_bar: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let (fixed, free) = split_feasible(&x_bar, 0.2);
            if free.is_empty() {
                continue;
            }
            let step = ReductionStep::new(&p, fixed, free).unwrap();
            let lifted = step.lift(&best(&step.reduced_problem)).unwrap();
            assert!(primal_value(&p, &lifted).unwrap() >= parent_opt - 1e-9);
            assert!(step.reduced_problem.dim() < n);
        }
    }
}
