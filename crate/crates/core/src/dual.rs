//! β-perturbed canonical dual and its gradient-ascent solver.
//!
//! For `G_α(σ) = Q + Diag(α + σ) ≻ 0` the dual function is
//!
//! ```text
//! Pᵈ(σ) = −½⟨G_α(σ)⁻¹c, c⟩ − ½ Σ_i (σ_i²/β_i + σ_i) − d_α,    d_α = ½⟨e, α⟩
//! ∇Pᵈ(σ) = ½ x̄∘x̄ − σ⊘β − ½e,                              x̄ = G_α(σ)⁻¹c
//! ```
//!
//! `β_i = +∞` switches the quadratic penalty off for that coordinate.
//! Every evaluation goes through one Cholesky factorization of `G_α(σ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{primal_value, PrimalProblem};
use crate::linalg::{dot, is_negative_definite, norm_inf, Cholesky};
use crate::perturbation::ND_MARGIN;

/// Smallest Cholesky pivot accepted as "positive definite".
pub const PD_MARGIN: f64 = 1e-10;
/// Fraction of the distance to the cone boundary that a step may not use.
pub const STEP_SAFETY: f64 = 1e-3;
pub const STEP_CAP: f64 = 1e6;
/// Relative width at which the boundary bisection stops.
pub const BISECTION_TOL: f64 = 1e-6;
/// Golden-section tolerance, relative to the search interval.
pub const LINE_SEARCH_REL_TOL: f64 = 1e-3;

/// Step halvings tried before a line search gives up.
const MAX_HALVINGS: usize = 60;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Stopping and classification parameters shared by every solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub epsilon: f64,
    pub tau: f64,
    pub max_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            tau: 0.05,
            max_iters: 5000,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::input("epsilon must be positive"));
        }
        if !(self.tau > 0.0 && self.tau < 0.5) {
            return Err(Error::input("tau must lie in (0, 0.5)"));
        }
        if self.max_iters == 0 {
            return Err(Error::input("max_iters must be positive"));
        }
        Ok(())
    }
}

/// Perturbation vectors plus solver tolerances for one dual solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    pub alpha: Vec<f64>,
    /// `+∞` entries (serialized as `null`) switch the penalty off.
    #[serde(with = "infinite_as_null::vec")]
    pub beta: Vec<f64>,
    pub delta_c: Vec<f64>,
    pub epsilon: f64,
    pub tau: f64,
    pub max_iters: usize,
    pub d_alpha: f64,
}

impl PerturbationConfig {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, delta_c: Vec<f64>, settings: SolverSettings) -> Result<Self> {
        settings.validate()?;
        let n = alpha.len();
        if beta.len() != n || delta_c.len() != n {
            return Err(Error::input("alpha, beta and delta_c must have equal length"));
        }
        if let Some(b) = beta.iter().find(|b| !(**b > 0.0)) {
            return Err(Error::input(format!("beta entry {b} is not positive")));
        }
        let d_alpha = 0.5 * alpha.iter().sum::<f64>();
        Ok(Self {
            alpha,
            beta,
            delta_c,
            epsilon: settings.epsilon,
            tau: settings.tau,
            max_iters: settings.max_iters,
            d_alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    fn check(&self, prob: &PrimalProblem) -> Result<()> {
        if self.dim() != prob.dim() {
            return Err(Error::input(format!(
                "config has dimension {}, problem has {}",
                self.dim(),
                prob.dim()
            )));
        }
        Ok(())
    }

    /// `c + Δc`.
    fn effective_c(&self, prob: &PrimalProblem) -> Vec<f64> {
        prob.c().iter().zip(&self.delta_c).map(|(c, d)| c + d).collect()
    }

    #[inline]
    fn sigma_over_beta(&self, i: usize, s: f64) -> f64 {
        let b = self.beta[i];
        if b.is_infinite() {
            0.0
        } else {
            s / b
        }
    }

    fn penalty(&self, sigma: &[f64]) -> f64 {
        sigma
            .iter()
            .enumerate()
            .map(|(i, &s)| s * self.sigma_over_beta(i, s) + s)
            .sum()
    }

    /// `σ⁰_i = |α_i| + Σ_j |Q_ij| + 1`; makes `G_α(σ⁰)` strictly diagonally
    /// dominant.
    pub fn default_sigma0(&self, prob: &PrimalProblem) -> Vec<f64> {
        (0..prob.dim())
            .map(|i| self.alpha[i].abs() + prob.q().off_diag_abs_row_sum(i) + 1.0)
            .collect()
    }

    /// `Q + Diag(α) ≺ 0`.
    pub fn alpha_negative_definite(&self, prob: &PrimalProblem) -> bool {
        is_negative_definite(&prob.q().plus_diag(&self.alpha), ND_MARGIN)
    }
}

/// One point of the ascent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualIterate {
    pub sigma: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub gradient: Vec<f64>,
    pub dual_value: f64,
    pub is_feasible: bool,
    pub iteration: usize,
}

/// Shared evaluation state: the problem, its config and `c + Δc`.
struct DualFn<'a> {
    prob: &'a PrimalProblem,
    cfg: &'a PerturbationConfig,
    c: Vec<f64>,
}

impl<'a> DualFn<'a> {
    fn new(prob: &'a PrimalProblem, cfg: &'a PerturbationConfig) -> Result<Self> {
        cfg.check(prob)?;
        Ok(Self {
            prob,
            cfg,
            c: cfg.effective_c(prob),
        })
    }

    fn shift(&self, sigma: &[f64]) -> Vec<f64> {
        self.cfg.alpha.iter().zip(sigma).map(|(a, s)| a + s).collect()
    }

    fn factor(&self, sigma: &[f64]) -> Option<Cholesky> {
        Cholesky::factor_shifted(self.prob.q(), &self.shift(sigma), PD_MARGIN)
    }

    fn value_with(&self, chol: &Cholesky, sigma: &[f64]) -> f64 {
        -0.5 * chol.inv_quad(&self.c) - 0.5 * self.cfg.penalty(sigma) - self.cfg.d_alpha
    }

    fn value(&self, sigma: &[f64]) -> Result<f64> {
        let chol = self.factor(sigma).ok_or(Error::DualInfeasible)?;
        Ok(self.value_with(&chol, sigma))
    }

    fn iterate(&self, sigma: Vec<f64>, iteration: usize) -> Result<DualIterate> {
        let chol = self.factor(&sigma).ok_or(Error::DualInfeasible)?;
        let x_bar = chol.solve(&self.c);
        let gradient = self.gradient_at(&sigma, &x_bar);
        let dual_value = -0.5 * dot(&x_bar, &self.c) - 0.5 * self.cfg.penalty(&sigma) - self.cfg.d_alpha;
        Ok(DualIterate {
            sigma,
            x_bar,
            gradient,
            dual_value,
            is_feasible: true,
            iteration,
        })
    }

    fn gradient_at(&self, sigma: &[f64], x_bar: &[f64]) -> Vec<f64> {
        x_bar
            .iter()
            .zip(sigma)
            .enumerate()
            .map(|(i, (x, &s))| 0.5 * x * x - self.cfg.sigma_over_beta(i, s) - 0.5)
            .collect()
    }

    fn max_step(&self, sigma: &[f64], dir: &[f64]) -> f64 {
        let shift = self.shift(sigma);
        // Only shrinking diagonal entries can leave the cone; each one must
        // stay positive, which bounds the step from above.
        let mut upper = STEP_CAP;
        for (i, &d) in dir.iter().enumerate() {
            if d < 0.0 {
                let diag = self.prob.q().get(i, i) + shift[i];
                upper = upper.min(diag / -d);
            }
        }
        let feasible = |a: f64| {
            let trial: Vec<f64> = sigma.iter().zip(dir).map(|(s, d)| s + a * d).collect();
            self.factor(&trial).is_some()
        };
        if upper >= STEP_CAP && feasible(STEP_CAP) {
            return STEP_CAP;
        }
        let (mut lo, mut hi) = (0.0_f64, upper);
        while hi - lo > BISECTION_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi < f64::MIN_POSITIVE {
                break;
            }
        }
        lo * (1.0 - STEP_SAFETY)
    }
}

/// `P^d_{αβ}(σ)`.
pub fn dual_value(prob: &PrimalProblem, cfg: &PerturbationConfig, sigma: &[f64]) -> Result<f64> {
    DualFn::new(prob, cfg)?.value(sigma)
}

/// `∇P^d_{αβ}(σ) = ½ x̄∘x̄ − σ⊘β − ½e`.
pub fn dual_gradient(prob: &PrimalProblem, cfg: &PerturbationConfig, sigma: &[f64]) -> Result<Vec<f64>> {
    Ok(DualFn::new(prob, cfg)?.iterate(sigma.to_vec(), 0)?.gradient)
}

/// Full evaluation at `σ`: `x̄`, gradient and dual value from one factorization.
pub fn evaluate(prob: &PrimalProblem, cfg: &PerturbationConfig, sigma: &[f64]) -> Result<DualIterate> {
    DualFn::new(prob, cfg)?.iterate(sigma.to_vec(), 0)
}

/// Unpenalized canonical dual `−½⟨G⁻¹c, c⟩ − ½⟨e, σ⟩ − d_α`, a lower bound on
/// the shifted primal minimum for every feasible `σ`.
pub fn canonical_lower_bound(prob: &PrimalProblem, cfg: &PerturbationConfig, sigma: &[f64]) -> Result<f64> {
    let f = DualFn::new(prob, cfg)?;
    let chol = f.factor(sigma).ok_or(Error::DualInfeasible)?;
    Ok(-0.5 * chol.inv_quad(&f.c) - 0.5 * sigma.iter().sum::<f64>() - cfg.d_alpha)
}

/// `σ ∈ S⁺_α`: Cholesky of `G_α(σ)` succeeds with every pivot above
/// [`PD_MARGIN`].
pub fn is_dual_feasible(prob: &PrimalProblem, cfg: &PerturbationConfig, sigma: &[f64]) -> bool {
    match DualFn::new(prob, cfg) {
        Ok(f) if sigma.len() == prob.dim() => f.factor(sigma).is_some(),
        _ => false,
    }
}

/// Longest step along `direction` that keeps `σ` inside `S⁺_α`, shrunk by
/// [`STEP_SAFETY`] and capped at [`STEP_CAP`].
pub fn max_step(prob: &PrimalProblem, cfg: &PerturbationConfig, sigma: &[f64], direction: &[f64]) -> Result<f64> {
    let f = DualFn::new(prob, cfg)?;
    if sigma.len() != prob.dim() || direction.len() != prob.dim() {
        return Err(Error::input("sigma/direction dimension mismatch"));
    }
    if f.factor(sigma).is_none() {
        return Err(Error::DualInfeasible);
    }
    Ok(f.max_step(sigma, direction))
}

/// Golden-section search for the maximizer of a unimodal `objective` on
/// `[lo, hi]`. Returns the best interior point seen once the bracket is
/// narrower than `tol`.
pub fn golden_section<F>(mut objective: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::input("golden section needs lo < hi and tol > 0"));
    }
    let mut eval = |a: f64| {
        let v = objective(a);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("objective is {v} at {a}")))
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = eval(x1)?;
        }
    }
    Ok(if f1 >= f2 { x1 } else { x2 })
}

/// Why the ascent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `‖d‖∞ ≤ ε`.
    Gradient,
    /// Relative change of `x̄` or `σ` fell below `ε`.
    RelativeChange,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Algorithm1Outcome {
    pub final_iterate: DualIterate,
    pub x_star: Vec<f64>,
    pub termination: Termination,
    /// Dual value at every accepted iterate, starting with `σ⁰`.
    pub dual_trace: Vec<f64>,
}

impl Algorithm1Outcome {
    /// Final `σ` is a critical point inside `S⁺_α`.
    pub fn is_critical(&self, epsilon: f64) -> bool {
        self.final_iterate.is_feasible && norm_inf(&self.final_iterate.gradient) <= epsilon
    }
}

/// Interval holding the maximizer of the concave `phi` on the feasible part
/// of the ray, found by doubling from `guess`. `phi` is `−∞` outside the
/// cone; the exact step bound `a_max()` is only computed once a trial point
/// lands there. Returns `None` when no positive step is feasible.
fn bracket<F, M>(phi: &F, phi0: f64, guess: f64, a_max: M) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
    M: FnOnce() -> f64,
{
    let mut a_max = Some(a_max);
    let mut cap = STEP_CAP;
    let mut probe = |a: f64, cap: &mut f64| -> (f64, f64) {
        let a = a.min(*cap);
        let v = phi(a);
        if v.is_finite() {
            return (a, v);
        }
        *cap = a_max.take().map_or(0.0, |m| m()).min(*cap);
        let a = a.min(*cap);
        (a, if a > 0.0 { phi(a) } else { phi0 })
    };
    let (mut h, mut fh) = probe(guess, &mut cap);
    if !(h > 0.0) {
        return None;
    }
    if fh <= phi0 {
        // Overshot: halve until the step improves, so the golden-section
        // tolerance stays proportional to the step actually taken.
        for _ in 0..MAX_HALVINGS {
            let half = 0.5 * h;
            let fhalf = phi(half);
            if fhalf > phi0 {
                return Some((0.0, h));
            }
            h = half;
        }
        return None;
    }
    let mut prev = 0.0;
    while h < cap {
        let (next, fnext) = probe(2.0 * h, &mut cap);
        if next <= h {
            break;
        }
        if fnext <= fh {
            return Some((prev, next));
        }
        prev = h;
        h = next;
        fh = fnext;
    }
    Some((prev, h))
}

/// Sign rounding with ties sent to `+1`.
pub fn round_spins(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect()
}

/// `max_i |a_i − b_i| / max(|b_i|, 1)`.
fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    new.iter()
        .zip(old)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Gradient ascent on the β-perturbed dual with golden-section steps along
/// the full gradient.
pub fn algorithm1(prob: &PrimalProblem, cfg: &PerturbationConfig, sigma0: &[f64]) -> Result<Algorithm1Outcome> {
    let f = DualFn::new(prob, cfg)?;
    if sigma0.len() != prob.dim() {
        return Err(Error::input("sigma0 has the wrong dimension"));
    }
    let mut current = f
        .iterate(sigma0.to_vec(), 0)
        .map_err(|_| Error::input("initial sigma is not dual feasible"))?;
    let mut trace = vec![current.dual_value];
    let eps = cfg.epsilon;
    let mut last_step = 0.0_f64;

    let termination = loop {
        if norm_inf(&current.gradient) <= eps {
            break Termination::Gradient;
        }
        if current.iteration >= cfg.max_iters {
            break Termination::MaxIters;
        }
        let sigma = &current.sigma;
        let dir = &current.gradient;
        let along = |a: f64| -> Vec<f64> { sigma.iter().zip(dir).map(|(s, d)| s + a * d).collect() };
        let phi = |a: f64| f.value(&along(a)).unwrap_or(f64::NEG_INFINITY);
        let mut step = 0.0;
        let range = if last_step > 0.0 {
            bracket(&phi, current.dual_value, 2.0 * last_step, || f.max_step(sigma, dir))
        } else {
            let a_max = f.max_step(sigma, dir);
            (a_max > 0.0).then(|| bracket(&phi, current.dual_value, a_max, || a_max)).flatten()
        };
        if let Some((lo, hi)) = range {
            let a = golden_section(phi, lo, hi, LINE_SEARCH_REL_TOL * (hi - lo))
                .map_err(|e| e.context("line search"))?;
            if phi(a) > current.dual_value {
                step = a;
            }
        }
        last_step = step;
        let next = f.iterate(along(step), current.iteration + 1).map_err(|_| {
            Error::Numeric(format!(
                "iterate left the dual feasible domain at step {}",
                current.iteration
            ))
        })?;
        let rel_x = relative_change(&next.x_bar, &current.x_bar);
        let rel_sigma = relative_change(&next.sigma, &current.sigma);
        trace.push(next.dual_value);
        current = next;
        if rel_x <= eps || rel_sigma <= eps {
            break Termination::RelativeChange;
        }
    };

    Ok(Algorithm1Outcome {
        x_star: round_spins(&current.x_bar),
        final_iterate: current,
        termination,
        dual_trace: trace,
    })
}

/// The checkable conditions under which the rounded dual solution is a
/// global minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `Q + Diag(α) ≺ 0`.
    pub alpha_negative_definite: bool,
    /// `‖d‖∞ ≤ ε` at the final iterate.
    pub critical: bool,
    /// Final `σ ∈ S⁺_α`.
    pub feasible: bool,
    /// `max_i |x̄_i² − 1| ≤ τ`.
    pub near_binary: bool,
    /// `P(x*)` minus the canonical-dual lower bound, on the unshifted problem.
    #[serde(with = "infinite_as_null")]
    pub duality_gap: f64,
    /// The gap is smaller than the spacing between distinct primal values,
    /// so no ±1 vector can beat `x*`.
    pub gap_closed: bool,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.alpha_negative_definite && self.critical && self.feasible && self.near_binary && self.gap_closed
    }

    /// Names of the conditions that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.alpha_negative_definite {
            out.push("alpha_not_negative_definite");
        }
        if !self.critical {
            out.push("not_critical");
        }
        if !self.feasible {
            out.push("sigma_infeasible");
        }
        if !self.near_binary {
            out.push("x_bar_not_binary");
        }
        if !self.gap_closed {
            out.push("duality_gap_open");
        }
        out
    }
}

/// Distance between distinct values of `P` over `{−1,1}ⁿ` when `Q` and `c`
/// are integral (every value then has the same parity); `0` otherwise.
pub fn objective_spacing(prob: &PrimalProblem) -> f64 {
    let n = prob.dim();
    let integral = |v: f64| v.fract() == 0.0;
    let q_int = (0..n).all(|i| prob.q().row(i).iter().all(|&v| integral(v)));
    if q_int && prob.c().iter().all(|&v| integral(v)) {
        2.0
    } else {
        0.0
    }
}

/// Checks the global-optimality conditions for `x_star` on the unshifted
/// problem `prob`, given the dual solve that produced it.
pub fn certify(prob: &PrimalProblem, cfg: &PerturbationConfig, outcome: &Algorithm1Outcome) -> Result<Certificate> {
    let it = &outcome.final_iterate;
    let feasible = is_dual_feasible(prob, cfg, &it.sigma);
    let near_binary = it.x_bar.iter().all(|x| (x * x - 1.0).abs() <= cfg.tau);
    let p_star = primal_value(prob, &outcome.x_star)?;
    let duality_gap = if feasible {
        let shift_l1: f64 = cfg.delta_c.iter().map(|d| d.abs()).sum();
        p_star - (canonical_lower_bound(prob, cfg, &it.sigma)? - shift_l1)
    } else {
        f64::INFINITY
    };
    let spacing = objective_spacing(prob);
    let slack = 1e-9 * p_star.abs().max(1.0);
    let gap_closed = if spacing > 0.0 {
        duality_gap < spacing - slack
    } else {
        duality_gap <= slack
    };
    Ok(Certificate {
        alpha_negative_definite: cfg.alpha_negative_definite(prob),
        critical: norm_inf(&it.gradient) <= cfg.epsilon,
        feasible,
        near_binary,
        duality_gap,
        gap_closed,
    })
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    fn wrap(v: f64) -> Option<f64> {
        (v != f64::INFINITY).then_some(v)
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        wrap(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|x| wrap(*x)).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            let raw = Vec::<Option<f64>>::deserialize(d)?;
            Ok(raw.into_iter().map(|x| x.unwrap_or(f64::INFINITY)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::perturbation::{choose_alpha, choose_beta, PerturbationPolicy};
    use crate::linalg::SymMatrix;

    fn scalar(c: f64, alpha: f64, beta: f64) -> (PrimalProblem, PerturbationConfig) {
        let prob = PrimalProblem::new(SymMatrix::zeros(1), vec![c]).unwrap();
        let cfg = PerturbationConfig::new(vec![alpha], vec![beta], vec![0.0], SolverSettings::default()).unwrap();
        (prob, cfg)
    }

    fn demo9() -> (PrimalProblem, PerturbationConfig) {
        let prob = demo9_problem();
        let cfg = PerturbationConfig::new(
            DEMO9_ALPHA.to_vec(),
            DEMO9_BETA.to_vec(),
            vec![0.0; 9],
            SolverSettings::default(),
        )
        .unwrap();
        (prob, cfg)
    }

    #[test]
    fn scalar_dual_value_and_infeasible_boundary() {
        let (p, cfg) = scalar(0.0, -1.0, 10.0);
        // -(1/2)(4/10 + 2) + 1/2
        assert!((dual_value(&p, &cfg, &[2.0]).unwrap() + 0.7).abs() < 1e-12);
        assert!(matches!(dual_value(&p, &cfg, &[0.0]), Err(Error::DualInfeasible)));
        assert!(is_dual_feasible(&p, &cfg, &[2.0]));
        assert!(!is_dual_feasible(&p, &cfg, &[1.0]));
    }

    #[test]
    fn scalar_gradients() {
        let (p, cfg) = scalar(0.0, -1.0, 10.0);
        assert!((dual_gradient(&p, &cfg, &[2.0]).unwrap()[0] + 0.7).abs() < 1e-12);
        let (p, cfg) = scalar(1.0, -1.0, 10.0);
        let it = evaluate(&p, &cfg, &[2.0]).unwrap();
        assert!((it.x_bar[0] - 1.0).abs() < 1e-12);
        assert!((it.gradient[0] + 0.2).abs() < 1e-12);
    }

    #[test]
    fn scalar_max_step_hits_boundary() {
        let (p, cfg) = scalar(0.0, -1.0, 10.0);
        let a = max_step(&p, &cfg, &[2.0], &[-0.7]).unwrap();
        let boundary = 1.0 / 0.7;
        let expected = boundary * (1.0 - STEP_SAFETY);
        assert!((a - expected).abs() <= BISECTION_TOL * boundary, "{a} vs {expected}");
    }

    #[test]
    fn max_step_capped_for_growing_diagonal() {
        let prob = PrimalProblem::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[1.0, 1.0]).unwrap();
        let cfg = PerturbationConfig::new(vec![-2.0, -2.0], vec![100.0; 2], vec![0.0; 2], SolverSettings::default()).unwrap();
        assert!(cfg.alpha_negative_definite(&prob));
        assert_eq!(max_step(&prob, &cfg, &[5.0, 5.0], &[0.3, 1.0]).unwrap(), STEP_CAP);
    }

    #[test]
    fn golden_section_cases() {
        let a = golden_section(|a| -(a - 1.0) * (a - 1.0), 0.0, 3.0, 1e-6).unwrap();
        assert!((a - 1.0).abs() <= 1e-6);
        let a = golden_section(|a| a, 0.0, 2.0, 1e-6).unwrap();
        assert!((2.0 - a) <= 1e-6);
        assert!(golden_section(|_| f64::NAN, 0.0, 1.0, 1e-3).is_err());
        assert!(golden_section(|a| a, 1.0, 1.0, 1e-3).is_err());
    }

    #[test]
    fn golden_section_evaluation_budget() {
        let mut count = 0usize;
        let tol = 1e-6;
        golden_section(
            |a| {
                count += 1;
                -(a - 0.3).abs()
            },
            0.0,
            3.0,
            tol,
        )
        .unwrap();
        let bound = ((tol / 3.0f64).ln() / GOLDEN.ln()).ceil() as usize + 2;
        assert!(count <= bound, "{count} > {bound}");
    }

    #[test]
    fn demo9_published_sigma_is_feasible_and_nearly_critical() {
        let (p, cfg) = demo9();
        assert!(is_dual_feasible(&p, &cfg, &DEMO9_SIGMA_STAR));
        let d = dual_gradient(&p, &cfg, &DEMO9_SIGMA_STAR).unwrap();
        assert!(norm_inf(&d) <= 1e-3, "{d:?}");
        let v = dual_value(&p, &cfg, &DEMO9_SIGMA_STAR).unwrap();
        // explicit inverse as an independent reference
        let g = p.q().plus_diag(&cfg.alpha).plus_diag(&DEMO9_SIGMA_STAR);
        let inv = nalgebra::DMatrix::from_row_slice(9, 9, &g.to_rows().concat())
            .try_inverse()
            .unwrap();
        let c = nalgebra::DVector::from_column_slice(p.c());
        let mut reference = -0.5 * c.dot(&(&inv * &c)) - cfg.d_alpha;
        for (s, b) in DEMO9_SIGMA_STAR.iter().zip(DEMO9_BETA) {
            reference -= 0.5 * (s * s / b + s);
        }
        assert!((v - reference).abs() < 1e-9 * reference.abs().max(1.0), "{v} vs {reference}");
    }

    #[test]
    fn demo9_first_step_is_positive_and_improving() {
        let (p, cfg) = demo9();
        let s0 = cfg.default_sigma0(&p);
        let it = evaluate(&p, &cfg, &s0).unwrap();
        let a_max = max_step(&p, &cfg, &s0, &it.gradient).unwrap();
        assert!(a_max > 0.0 && a_max.is_finite());
        let along = |a: f64| -> Vec<f64> { s0.iter().zip(&it.gradient).map(|(s, d)| s + a * d).collect() };
        let phi = |a: f64| dual_value(&p, &cfg, &along(a)).unwrap();
        let a = golden_section(phi, 0.0, a_max, 1e-8 * a_max).unwrap();
        assert!(phi(a) > it.dual_value);
        // dense grid scan of the same ray
        let grid_best = (0..=2000)
            .map(|k| phi(a_max * k as f64 / 2000.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(phi(a) >= grid_best - 1e-9 * grid_best.abs().max(1.0));
    }

    #[test]
    fn demo9_algorithm1_reaches_published_sigma() {
        let (p, cfg) = demo9();
        let out = algorithm1(&p, &cfg, &cfg.default_sigma0(&p)).unwrap();
        for (s, t) in out.final_iterate.sigma.iter().zip(DEMO9_SIGMA_STAR) {
            assert!((s - t).abs() <= 1e-2, "{:?}", out.final_iterate.sigma);
        }
        // round(G⁻¹c) at the critical point; the enumerated global minimizer
        assert_eq!(out.x_star, vec![-1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, 1.0]);
        let cert = certify(&p, &cfg, &out).unwrap();
        assert!(!cert.alpha_negative_definite);
        assert!(!cert.holds());
    }

    #[test]
    fn scalar_algorithm1_converges_to_stationary_point() {
        let (p, cfg) = scalar(0.5, -2.0, 1000.0);
        let out = algorithm1(&p, &cfg, &cfg.default_sigma0(&p)).unwrap();
        assert_eq!(out.x_star, vec![1.0]);
        let x = out.final_iterate.x_bar[0];
        // x̄² = 1 + 2σ/β and x̄ = c/(α + σ) solved by bisection on σ
        let g = |s: f64| (0.5 / (s - 2.0)).powi(2) - 1.0 - 2.0 * s / 1000.0;
        let (mut lo, mut hi) = (2.0 + 1e-9, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 { lo = mid } else { hi = mid }
        }
        let x_ref = 0.5 / (lo - 2.0);
        assert!((x - x_ref).abs() < 1e-6, "{x} vs {x_ref}");
        assert!((x_ref - 1.0025).abs() < 1e-3);
    }

    #[test]
    fn degenerate_zero_c_stalls_at_boundary() {
        let (p, cfg) = scalar(0.0, -2.0, 1000.0);
        let out = algorithm1(&p, &cfg, &cfg.default_sigma0(&p)).unwrap();
        assert_eq!(out.termination, Termination::RelativeChange);
        assert!(out.final_iterate.is_feasible);
        assert!(out.final_iterate.x_bar[0].abs() < 1e-12);
        assert!(out.final_iterate.sigma[0] > 2.0);
        assert!(!certify(&p, &cfg, &out).unwrap().holds());
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let (p, cfg) = scalar(1.0, -1.0, 10.0);
        assert!(matches!(algorithm1(&p, &cfg, &[0.5]), Err(Error::Input(_))));
    }

    #[test]
    fn ties_round_up() {
        assert_eq!(round_spins(&[0.0, -0.0, -1e-300, 3.0]), vec![1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 8);
            let prob = random_problem(n, 5.0, seed);
            let policy = PerturbationPolicy::default();
            let alpha = choose_alpha(prob.q(), &policy).unwrap();
            let beta = choose_beta(&alpha, &policy).unwrap();
            let cfg = PerturbationConfig::new(alpha, beta, vec![0.0; n], SolverSettings::default()).unwrap();
            let sigma = cfg.default_sigma0(&prob);
            let g = dual_gradient(&prob, &cfg, &sigma).unwrap();
            for i in 0..n {
                let h = 1e-6;
                let mut sp = sigma.clone();
                sp[i] += h;
                let mut sm = sigma.clone();
                sm[i] -= h;
                let fd = (dual_value(&prob, &cfg, &sp).unwrap() - dual_value(&prob, &cfg, &sm).unwrap()) / (2.0 * h);
                assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0), "seed {seed} i {i}: {fd} vs {}", g[i]);
            }
        }
    }
}
