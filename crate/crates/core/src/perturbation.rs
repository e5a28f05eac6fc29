//! Choice of the perturbation vectors.
//!
//! `alpha` shifts the diagonal so that `Q + Diag(α) ≺ 0`; `beta` weights the
//! quadratic penalty in the dual; `delta_c` is a small linear shift of `c`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_negative_definite, max_eigenvalue, SymMatrix};

/// Pivot floor for the negative-definiteness test on `Q + Diag(α)`.
pub const ND_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "values")]
pub enum AlphaMode {
    /// `α_i = −(Σ_j |Q_ij| + δ)`.
    Gershgorin,
    /// `α_i = −(λ_max(Q) + δ)`.
    Spectral,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "values")]
pub enum BetaMode {
    /// `β_i = beta_scale`.
    Constant,
    /// `β_i = beta_scale · |α_i|`.
    Proportional,
    Explicit(Vec<f64>),
}

macro_rules! mode_from_str {
    ($ty:ident { $($name:literal => $variant:ident),* $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($ty::$variant),)*
                    other => Err(Error::input(format!("unknown {} '{other}'", stringify!($ty)))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self {
                    $($ty::$variant => f.write_str($name),)*
                    _ => f.write_str("explicit"),
                }
            }
        }
    };
}

mode_from_str!(AlphaMode { "gershgorin" => Gershgorin, "spectral" => Spectral });
mode_from_str!(BetaMode { "constant" => Constant, "proportional" => Proportional });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationPolicy {
    pub alpha_mode: AlphaMode,
    /// Slack `δ` below the bound that makes `Q + Diag(α)` negative definite.
    pub alpha_slack: f64,
    pub beta_mode: BetaMode,
    pub beta_scale: f64,
    /// Target `Σ|Δc_i|`; exact optimality is kept while it stays below 1.
    pub linear_magnitude: f64,
    pub rng_seed: u64,
}

impl Default for PerturbationPolicy {
    fn default() -> Self {
        Self {
            alpha_mode: AlphaMode::Gershgorin,
            alpha_slack: 1.0,
            beta_mode: BetaMode::Proportional,
            beta_scale: 5000.0,
            linear_magnitude: 0.9,
            rng_seed: 0,
        }
    }
}

impl PerturbationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_slack > 0.0) {
            return Err(Error::input("alpha slack must be positive"));
        }
        if !(self.beta_scale > 0.0) {
            return Err(Error::input("beta scale must be positive"));
        }
        if !(self.linear_magnitude >= 0.0) || !self.linear_magnitude.is_finite() {
            return Err(Error::input("linear perturbation magnitude must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Whether `Σ|Δc_i| < 1`, the regime where the shifted problem keeps
    /// the original optimum.
    pub fn linear_exact(&self) -> bool {
        self.linear_magnitude < 1.0
    }
}

pub fn choose_alpha(q: &SymMatrix, policy: &PerturbationPolicy) -> Result<Vec<f64>> {
    let n = q.dim();
    let delta = policy.alpha_slack;
    match &policy.alpha_mode {
        AlphaMode::Gershgorin => Ok((0..n)
            .map(|i| -(q.off_diag_abs_row_sum(i) + q.get(i, i).abs() + delta))
            .collect()),
        AlphaMode::Spectral => {
            let lmax = max_eigenvalue(q);
            Ok(vec![-(lmax + delta); n])
        }
        AlphaMode::Explicit(alpha) => {
            if alpha.len() != n {
                return Err(Error::input(format!(
                    "explicit alpha has {} entries, expected {n}",
                    alpha.len()
                )));
            }
            if !is_negative_definite(&q.plus_diag(alpha), ND_MARGIN) {
                return Err(Error::Precondition(
                    "Q + Diag(alpha) is not negative definite".into(),
                ));
            }
            Ok(alpha.clone())
        }
    }
}

pub fn choose_beta(alpha: &[f64], policy: &PerturbationPolicy) -> Result<Vec<f64>> {
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(Error::input("alpha must be finite"));
    }
    let beta = match &policy.beta_mode {
        BetaMode::Constant => vec![policy.beta_scale; alpha.len()],
        BetaMode::Proportional => alpha.iter().map(|a| policy.beta_scale * a.abs()).collect(),
        BetaMode::Explicit(b) => {
            if b.len() != alpha.len() {
                return Err(Error::input("explicit beta has the wrong length"));
            }
            b.clone()
        }
    };
    if let Some(bad) = beta.iter().find(|b| !(**b > 0.0)) {
        return Err(Error::input(format!("beta entry {bad} is not positive")));
    }
    Ok(beta)
}

/// Seeded `Δc` with `Σ|Δc_i| = linear_magnitude`.
pub fn make_linear_perturbation(n: usize, policy: &PerturbationPolicy) -> Vec<f64> {
    let s = policy.linear_magnitude;
    if s == 0.0 || n == 0 {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.rng_seed);
    let mut raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut l1: f64 = raw.iter().map(|v| v.abs()).sum();
    if l1 == 0.0 {
        raw[0] = 1.0;
        l1 = 1.0;
    }
    raw.iter_mut().for_each(|v| *v *= s / l1);
    raw
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{demo9_problem, random_problem, spins_from_bits, DEMO9_ALPHA, DEMO9_BETA};
    use crate::instance::{primal_value, PrimalProblem};
    use proptest::prelude::*;

    fn policy() -> PerturbationPolicy {
        PerturbationPolicy::default()
    }

    #[test]
    fn gershgorin_on_2x2() {
        let q = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let a = choose_alpha(&q, &policy()).unwrap();
        assert_eq!(a, vec![-2.0, -2.0]);
        // eigenvalues of Q + Diag(α) are -1 and -3
        assert!((max_eigenvalue(&q.plus_diag(&a)) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_by_one_every_mode() {
        let q = SymMatrix::zeros(1);
        for mode in [AlphaMode::Gershgorin, AlphaMode::Spectral, AlphaMode::Explicit(vec![-1.0])] {
            let p = PerturbationPolicy { alpha_mode: mode, ..policy() };
            assert_eq!(choose_alpha(&q, &p).unwrap(), vec![-1.0]);
        }
    }

    #[test]
    fn demo9_alpha_is_not_negative_definite() {
        let q = demo9_problem().q().clone();
        let p = PerturbationPolicy {
            alpha_mode: AlphaMode::Explicit(DEMO9_ALPHA.to_vec()),
            ..policy()
        };
        assert!(matches!(choose_alpha(&q, &p), Err(Error::Precondition(_))));
        assert!(max_eigenvalue(&q.plus_diag(&DEMO9_ALPHA)) > 20.0);
    }

    #[test]
    fn beta_modes() {
        let p = PerturbationPolicy { beta_mode: BetaMode::Constant, ..policy() };
        assert_eq!(choose_beta(&[-1.0, -2.0, -3.0], &p).unwrap(), vec![5000.0; 3]);
        let p = PerturbationPolicy {
            beta_mode: BetaMode::Proportional,
            beta_scale: 10.0,
            ..policy()
        };
        assert_eq!(choose_beta(&[-2.0, -4.0], &p).unwrap(), vec![20.0, 40.0]);
        let p = PerturbationPolicy {
            beta_mode: BetaMode::Explicit(DEMO9_BETA.to_vec()),
            ..policy()
        };
        assert_eq!(choose_beta(&DEMO9_ALPHA, &p).unwrap(), DEMO9_BETA.to_vec());
        let p = PerturbationPolicy {
            beta_mode: BetaMode::Explicit(vec![1.0, 0.0]),
            ..policy()
        };
        assert!(choose_beta(&[-1.0, -1.0], &p).is_err());
    }

    #[test]
    fn zero_linear_magnitude() {
        let p = PerturbationPolicy { linear_magnitude: 0.0, ..policy() };
        assert_eq!(make_linear_perturbation(4, &p), vec![0.0; 4]);
    }

    #[test]
    fn linear_perturbation_is_seeded() {
        let p = policy();
        let a = make_linear_perturbation(3, &p);
        assert_eq!(a, make_linear_perturbation(3, &p));
        assert!((a.iter().map(|v| v.abs()).sum::<f64>() - 0.9).abs() < 1e-12);
        let other = PerturbationPolicy { rng_seed: 7, ..p };
        assert_ne!(a, make_linear_perturbation(3, &other));
    }

    #[test]
    fn single_edge_linear_perturbation_keeps_optimum() {
        let prob = PrimalProblem::from_rows(&[vec![0.0]], &[-5.0]).unwrap();
        let dc = make_linear_perturbation(1, &policy());
        let shifted = prob.with_linear_shift(&dc).unwrap();
        let argmin = |p: &PrimalProblem| {
            if primal_value(p, &[1.0]).unwrap() < primal_value(p, &[-1.0]).unwrap() { 1.0 } else { -1.0 }
        };
        assert_eq!(argmin(&prob), argmin(&shifted));
    }

    proptest! {
        #[test]
        fn gershgorin_always_negative_definite(n in 1usize..50, seed in 0u64..10_000) {
            let q = random_problem(n, 10.0, seed).q().clone();
            let a = choose_alpha(&q, &policy()).unwrap();
            prop_assert!(is_negative_definite(&q.plus_diag(&a), ND_MARGIN));
        }

        #[test]
        fn linear_perturbation_norm(n in 1usize..40, s in 0.0f64..5.0, seed in 0u64..1000) {
            let p = PerturbationPolicy { linear_magnitude: s, rng_seed: seed, ..policy() };
            let dc = make_linear_perturbation(n, &p);
            let l1: f64 = dc.iter().map(|v| v.abs()).sum();
            prop_assert!((l1 - s).abs() <= 1e-12);
        }

        #[test]
        fn small_linear_shift_preserves_argmin(n in 1usize..=12, seed in 0u64..400, s in 0.0f64..0.999) {
            // integer weights keep distinct objective values at least 2 apart
            let g = crate::fixtures::random_graph(n + 1, seed);
            let prob = crate::instance::build_primal_default(&g);
            let p = PerturbationPolicy { linear_magnitude: s, rng_seed: seed, ..policy() };
            let shifted = prob.with_linear_shift(&make_linear_perturbation(n, &p)).unwrap();
            let mut best = (f64::INFINITY, 0u32);
            let mut best_shift = (f64::INFINITY, 0u32);
            for bits in 0..(1u32 << n) {
                let x = spins_from_bits(bits, n);
                let v = primal_value(&prob, &x).unwrap();
                let vs = primal_value(&shifted, &x).unwrap();
                if v < best.0 { best = (v, bits); }
                if vs < best_shift.0 { best_shift = (vs, bits); }
            }
            let x = spins_from_bits(best_shift.1, n);
            prop_assert_eq!(primal_value(&prob, &x).unwrap(), best.0);
        }
    }
}
