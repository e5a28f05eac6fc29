//! Graph and primal-problem data model.
//!
//! A max-cut instance on `n + 1` vertices becomes an `n`-variable binary
//! quadratic program once one vertex (the pivot) is pinned to `+1`:
//!
//! ```text
//! W(y) = 1/4 Σ_ij w_ij (1 - y_i y_j)
//! P(x) = 1/2 ⟨x, Qx⟩ - ⟨x, c⟩,   Q_ij = w_ij (non-pivot),  c_i = -w_i,pivot
//! W    = (T - P) / 2,            T = Σ_{i<j} w_ij
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, SymMatrix};

/// Symmetric edge-weight matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    name: String,
    weights: SymMatrix,
}

impl WeightedGraph {
    pub fn new(name: impl Into<String>, weights: SymMatrix) -> Result<Self> {
        if weights.dim() < 2 {
            return Err(Error::input("a graph needs at least two vertices"));
        }
        if !weights.is_symmetric() {
            return Err(Error::input("edge weights must be symmetric"));
        }
        if !weights.has_zero_diagonal() {
            return Err(Error::input("edge weights must have a zero diagonal"));
        }
        Ok(Self {
            name: name.into(),
            weights,
        })
    }

    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(name, SymMatrix::from_rows(rows)?)
    }

    /// Single edge of weight `w` between two vertices.
    pub fn single_edge(w: f64) -> Self {
        let mut m = SymMatrix::zeros(2);
        m.set_sym(0, 1, w);
        Self {
            name: "edge".into(),
            weights: m,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.dim()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights.get(i, j)
    }

    pub fn weights(&self) -> &SymMatrix {
        &self.weights
    }

    /// `T = Σ_{i<j} w_ij`.
    pub fn total_edge_weight(&self) -> f64 {
        let n = self.num_vertices();
        (0..n)
            .map(|i| self.weights.row(i)[i + 1..].iter().sum::<f64>())
            .sum()
    }

    /// Relabels vertices: new vertex `k` is old vertex `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::input("not a permutation of the vertex set"));
        }
        Ok(Self {
            name: self.name.clone(),
            weights: self.weights.principal_submatrix(perm),
        })
    }
}

/// Binary quadratic program `min ½⟨x,Qx⟩ − ⟨x,c⟩` over `x ∈ {−1,1}ⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalProblem {
    q: SymMatrix,
    c: Vec<f64>,
    /// Vertex of the source graph pinned at `+1`.
    pub pivot: usize,
    /// Non-pivot vertices of the source graph, in variable order.
    pub vertex_map: Vec<usize>,
    pub total_edge_weight: f64,
}

impl PrimalProblem {
    /// Raw `(Q, c)` problem with no graph behind it. `Q` must be symmetric
    /// with zero diagonal.
    pub fn new(q: SymMatrix, c: Vec<f64>) -> Result<Self> {
        if q.dim() != c.len() {
            return Err(Error::input(format!(
                "Q is {0}x{0} but c has {1} entries",
                q.dim(),
                c.len()
            )));
        }
        if !q.has_zero_diagonal() {
            return Err(Error::input("Q must have a zero diagonal"));
        }
        let n = c.len();
        // Treat (Q, c) as a graph whose extra vertex n carries weights -c.
        let total = (0..n)
            .map(|i| q.row(i)[i + 1..].iter().sum::<f64>())
            .sum::<f64>()
            - c.iter().sum::<f64>();
        Ok(Self {
            q,
            c,
            pivot: n,
            vertex_map: (0..n).collect(),
            total_edge_weight: total,
        })
    }

    pub fn from_rows(q: &[Vec<f64>], c: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_rows(q)?, c.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn q(&self) -> &SymMatrix {
        &self.q
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Same quadratic part, linear term replaced by `c + delta`.
    pub fn with_linear_shift(&self, delta: &[f64]) -> Result<Self> {
        if delta.len() != self.dim() {
            return Err(Error::input("linear shift has the wrong dimension"));
        }
        let mut out = self.clone();
        for (ci, d) in out.c.iter_mut().zip(delta) {
            *ci += d;
        }
        Ok(out)
    }

    /// `y` on the source graph: `x` scattered through `vertex_map`, `+1` at
    /// the pivot.
    pub fn extend(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![1.0; self.dim() + 1];
        for (k, &v) in self.vertex_map.iter().enumerate() {
            y[v] = x[k];
        }
        y
    }

    /// Cut weight implied by `x` through `W = (T − P)/2`.
    pub fn cut_from_x(&self, x: &[f64]) -> Result<f64> {
        Ok((self.total_edge_weight - primal_value(self, x)?) / 2.0)
    }
}

/// Which procedure produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AlgorithmId {
    Cda1,
    Cda2,
    Cda3,
    Oracle,
}

impl AlgorithmId {
    pub const ALL_CDA: [AlgorithmId; 3] = [AlgorithmId::Cda1, AlgorithmId::Cda2, AlgorithmId::Cda3];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmId::Cda1 => "CDA1",
            AlgorithmId::Cda2 => "CDA2",
            AlgorithmId::Cda3 => "CDA3",
            AlgorithmId::Oracle => "ORACLE",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CDA1" => Ok(AlgorithmId::Cda1),
            "CDA2" => Ok(AlgorithmId::Cda2),
            "CDA3" => Ok(AlgorithmId::Cda3),
            "ORACLE" => Ok(AlgorithmId::Oracle),
            other => Err(Error::input(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// A feasible cut together with both objective values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub cut_weight: f64,
    pub primal_value: f64,
    pub certified_global: bool,
    pub algorithm_id: AlgorithmId,
}

impl CutSolution {
    pub fn from_x(prob: &PrimalProblem, x: Vec<f64>, algorithm_id: AlgorithmId) -> Result<Self> {
        check_spins(&x, prob.dim())?;
        let primal_value = primal_value(prob, &x)?;
        let y = prob.extend(&x);
        Ok(Self {
            cut_weight: (prob.total_edge_weight - primal_value) / 2.0,
            x,
            y,
            primal_value,
            certified_global: false,
            algorithm_id,
        })
    }
}

/// Builds `(Q, c)` by pinning `pivot` to `+1`. Remaining vertices keep their
/// relative order.
pub fn build_primal(graph: &WeightedGraph, pivot: usize) -> Result<PrimalProblem> {
    let n1 = graph.num_vertices();
    if pivot >= n1 {
        return Err(Error::input(format!(
            "pivot {pivot} out of range for {n1} vertices"
        )));
    }
    let vertex_map: Vec<usize> = (0..n1).filter(|&v| v != pivot).collect();
    let q = graph.weights().principal_submatrix(&vertex_map);
    let c = vertex_map.iter().map(|&v| -graph.weight(v, pivot)).collect();
    Ok(PrimalProblem {
        q,
        c,
        pivot,
        vertex_map,
        total_edge_weight: graph.total_edge_weight(),
    })
}

/// Default pivot: the last vertex.
pub fn build_primal_default(graph: &WeightedGraph) -> PrimalProblem {
    build_primal(graph, graph.num_vertices() - 1).expect("last vertex is always a valid pivot")
}

pub(crate) fn check_spins(v: &[f64], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(Error::input(format!(
            "expected {len} spins, got {}",
            v.len()
        )));
    }
    if let Some(bad) = v.iter().find(|&&s| s != 1.0 && s != -1.0) {
        return Err(Error::input(format!("spin value {bad} is not ±1")));
    }
    Ok(())
}

/// `W(y) = ¼ Σ_i Σ_j w_ij (1 − y_i y_j)`.
pub fn cut_value(graph: &WeightedGraph, y: &[f64]) -> Result<f64> {
    check_spins(y, graph.num_vertices())?;
    let n = graph.num_vertices();
    let mut w = 0.0;
    for i in 0..n {
        let row = graph.weights().row(i);
        for j in i + 1..n {
            if y[i] != y[j] {
                w += row[j];
            }
        }
    }
    Ok(w)
}

/// `P(x) = ½⟨x, Qx⟩ − ⟨x, c⟩`. Accepts real `x`.
pub fn primal_value(prob: &PrimalProblem, x: &[f64]) -> Result<f64> {
    if x.len() != prob.dim() {
        return Err(Error::input(format!(
            "x has {} entries, problem has {}",
            x.len(),
            prob.dim()
        )));
    }
    Ok(0.5 * prob.q.quad_form(x) - dot(x, &prob.c))
}
