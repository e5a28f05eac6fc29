//! Exact max-cut by exhaustive enumeration.
//!
//! The last vertex is pinned to `+1` and the remaining `m = n − 1` spins are
//! walked in Gray-code order, so each step flips one spin and updates the
//! cut in `O(n)`. The walk is split into blocks by fixing the top bits;
//! blocks run independently and the best cut wins, ties going to the
//! earliest block.

use crate::error::{Error, Result};
use crate::instance::{build_primal_default, cut_value, AlgorithmId, CutSolution, WeightedGraph};
use crate::parallel::{self, Execution};

pub const DEFAULT_ORACLE_LIMIT: usize = 26;

/// Low bits enumerated inside one block.
const BLOCK_BITS: usize = 14;

#[inline]
fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Spins for the free vertices given a bit pattern; a set bit means `−1`.
fn spins(bits: u64, m: usize) -> Vec<f64> {
    let mut y: Vec<f64> = (0..m).map(|b| if bits >> b & 1 == 1 { -1.0 } else { 1.0 }).collect();
    y.push(1.0);
    y
}

/// Walks every pattern of one block, calling `visit(bits, cut)`.
fn walk_block<F: FnMut(u64, f64)>(graph: &WeightedGraph, m: usize, low_bits: usize, prefix: u64, mut visit: F) {
    let n = m + 1;
    let w = graph.weights();
    let base = prefix << low_bits;
    let mut y = spins(base, m);
    // s_v = Σ_j w_vj y_j
    let mut s: Vec<f64> = (0..n).map(|v| (0..n).map(|j| w.get(v, j) * y[j]).sum()).collect();
    let mut cut = cut_value(graph, &y).expect("spins are ±1");
    visit(base, cut);
    let mut bits = base;
    for k in 1..(1u64 << low_bits) {
        let v = k.trailing_zeros() as usize;
        // edges at v flip between cut and uncut
        cut += y[v] * s[v];
        let change = -2.0 * y[v];
        y[v] = -y[v];
        for (sj, wjv) in s.iter_mut().zip(w.row(v)) {
            *sj += wjv * change;
        }
        bits ^= 1 << v;
        debug_assert_eq!(bits, base | gray(k));
        visit(bits, cut);
    }
}

fn layout(m: usize) -> (usize, usize) {
    let low = m.min(BLOCK_BITS);
    (low, m - low)
}

/// Maximum cut with the default (parallel when available) execution.
pub fn brute_force_maxcut(graph: &WeightedGraph, limit: usize) -> Result<CutSolution> {
    brute_force_maxcut_with(graph, limit, Execution::default())
}

pub fn brute_force_maxcut_with(graph: &WeightedGraph, limit: usize, exec: Execution) -> Result<CutSolution> {
    let n = graph.num_vertices();
    if n > limit || n > 63 {
        return Err(Error::Size { vertices: n, limit });
    }
    let m = n - 1;
    let (low, high) = layout(m);
    let per_block = parallel::map_range(exec, 1usize << high, |prefix| {
        let mut best = (f64::NEG_INFINITY, 0u64);
        walk_block(graph, m, low, prefix as u64, |bits, cut| {
            if cut > best.0 {
                best = (cut, bits);
            }
        });
        best
    });
    let (_, bits) = per_block
        .into_iter()
        .fold((f64::NEG_INFINITY, 0u64), |acc, b| if b.0 > acc.0 { b } else { acc });

    let prob = build_primal_default(graph);
    let y = spins(bits, m);
    let mut sol = CutSolution::from_x(&prob, y[..m].to_vec(), AlgorithmId::Oracle)?;
    sol.cut_weight = cut_value(graph, &y)?;
    sol.certified_global = true;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::random_graph;
    use crate::tsplib::{read_tsplib_file, DistanceConvention};

    fn data(name: &str) -> WeightedGraph {
        let path = format!("{}/../../data/tsplib/{name}.tsp", env!("CARGO_MANIFEST_DIR"));
        read_tsplib_file(path, DistanceConvention::Planar).unwrap()
    }

    #[test]
    fn single_edge() {
        let sol = brute_force_maxcut(&WeightedGraph::single_edge(5.0), 26).unwrap();
        assert_eq!(sol.cut_weight, 5.0);
        assert_eq!(sol.y[0], -sol.y[1]);
    }

    #[test]
    fn incremental_matches_naive_on_every_assignment() {
        for seed in 0..4 {
            let n = 7 + seed as usize;
            let g = random_graph(n, seed);
            let m = n - 1;
            // several blocks to cover the prefix path as well
            let (low, high) = (m - 2, 2);
            let mut seen = 0u64;
            for prefix in 0..1u64 << high {
                walk_block(&g, m, low, prefix, |bits, cut| {
                    assert_eq!(cut, cut_value(&g, &spins(bits, m)).unwrap());
                    seen += 1;
                });
            }
            assert_eq!(seen, 1 << m);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = random_graph(18, 9);
        let a = brute_force_maxcut_with(&g, 26, Execution::Sequential).unwrap();
        let b = brute_force_maxcut_with(&g, 26, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invariant_under_relabeling() {
        for seed in 0..5 {
            let g = random_graph(10, 40 + seed);
            let best = brute_force_maxcut(&g, 26).unwrap().cut_weight;
            let perm: Vec<usize> = (0..10).map(|i| (i * 3 + seed as usize) % 10).collect();
            let h = g.permuted(&perm).unwrap();
            assert_eq!(brute_force_maxcut(&h, 26).unwrap().cut_weight, best);
        }
    }

    #[test]
    fn size_limit() {
        let g = random_graph(12, 1);
        assert!(matches!(brute_force_maxcut(&g, 11), Err(Error::Size { vertices: 12, limit: 11 })));
    }

    #[test]
    fn burma14() {
        assert_eq!(brute_force_maxcut(&data("burma14"), 26).unwrap().cut_weight, 283.0);
    }

    #[test]
    fn gr17() {
        assert_eq!(brute_force_maxcut(&data("gr17"), 26).unwrap().cut_weight, 24986.0);
    }

    #[test]
    #[ignore = "2^28 assignments; run with --ignored"]
    fn bays29() {
        assert_eq!(brute_force_maxcut(&data("bays29"), 29).unwrap().cut_weight, 53990.0);
    }
}
