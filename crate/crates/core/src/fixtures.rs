//! Reference data and seeded generators shared by tests, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{PrimalProblem, WeightedGraph};
use crate::linalg::SymMatrix;

const DEMO9_Q: [[f64; 9]; 9] = [
    [0., 6., 4., 8., 4., 5., 5., 6., 8.],
    [6., 0., 3., 9., 4., 5., 5., 8., 7.],
    [4., 3., 0., 6., 2., 4., 7., 5., 4.],
    [8., 9., 6., 0., 7., 4., 7., 6., 6.],
    [4., 4., 2., 7., 0., 7., 5., 4., 6.],
    [5., 5., 4., 4., 7., 0., 0., 2., 7.],
    [5., 5., 7., 7., 5., 0., 0., 4., 5.],
    [6., 8., 5., 6., 4., 2., 4., 0., 2.],
    [8., 7., 4., 6., 6., 7., 5., 2., 0.],
];

pub const DEMO9_C: [f64; 9] = [2., 5., 3., 5., 2., 5., 4., 5., 7.];

pub const DEMO9_ALPHA: [f64; 9] = [
    -17.3208, -2.8050, -36.5410, -1.1174, -38.3706, -77.0470, -20.1651, -31.3002, -34.9461,
];

pub const DEMO9_BETA: [f64; 9] = [
    605.7162, 601.1675, 330.2360, 277.4284, 674.9582, 540.0750, 537.7345, 690.3018, 371.8627,
];

/// Published dual critical point (4 decimals).
pub const DEMO9_SIGMA_STAR: [f64; 9] = [
    34.0286, 19.9327, 50.1747, 12.6699, 55.9428, 88.7105, 30.2908, 45.0242, 45.6742,
];

/// The 9-variable problem with hand-picked perturbation vectors.
pub fn demo9_problem() -> PrimalProblem {
    let rows: Vec<Vec<f64>> = DEMO9_Q.iter().map(|r| r.to_vec()).collect();
    PrimalProblem::from_rows(&rows, &DEMO9_C).expect("fixture is well formed")
}

/// Bit `k` of `bits` set means spin `k` is `-1`.
pub fn spins_from_bits(bits: u32, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if (bits >> k) & 1 == 1 { -1.0 } else { 1.0 })
        .collect()
}

/// Complete graph with integer weights drawn uniformly from `[1, 10]`.
pub fn random_graph(vertices: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = SymMatrix::zeros(vertices);
    for i in 0..vertices {
        for j in i + 1..vertices {
            w.set_sym(i, j, rng.gen_range(1..=10) as f64);
        }
    }
    WeightedGraph::new(format!("rand{vertices}_{seed}"), w).expect("generator output is valid")
}

/// Complete graph with integer weights in `[1, 10]` biased towards a hidden
/// bipartition: crossing edges draw from `[7, 10]`, inner edges from `[1, 3]`.
pub fn planted_graph(vertices: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side: Vec<bool> = (0..vertices).map(|_| rng.gen()).collect();
    let mut w = SymMatrix::zeros(vertices);
    for i in 0..vertices {
        for j in i + 1..vertices {
            let v = if side[i] != side[j] {
                rng.gen_range(7..=10)
            } else {
                rng.gen_range(1..=3)
            };
            w.set_sym(i, j, v as f64);
        }
    }
    WeightedGraph::new(format!("planted{vertices}_{seed}"), w).expect("generator output is valid")
}

/// Dense problem with real entries of `Q` and `c` in `[-scale, scale]`.
pub fn random_problem(n: usize, scale: f64, seed: u64) -> PrimalProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            q.set_sym(i, j, rng.gen_range(-scale..=scale));
        }
    }
    let c = (0..n).map(|_| rng.gen_range(-scale..=scale)).collect();
    PrimalProblem::new(q, c).expect("generator output is valid")
}
