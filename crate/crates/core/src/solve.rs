//! Maximum weight bipartite matching.
//!
//! [`solve_exact`] runs the Hungarian method with vertex potentials on the
//! full `sigma x sigma` assignment problem. Weights are nonnegative, so some
//! optimal matching extends to a perfect assignment; zero cells of that
//! assignment are non-edges and are dropped from the reported matching.
//!
//! [`solve_bruteforce`] and [`enumerate_matchings`] walk every matching
//! explicitly and serve as an independent oracle for small graphs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Cell, Matching, WeightedBipartiteGraph};

/// Largest partition size the brute-force routines accept by default.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub matching: Matching,
    pub weight: u64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("partition size {sigma} exceeds the brute-force cap of {cap}")]
    CapExceeded { sigma: usize, cap: usize },
}

/// Returns a maximum weight matching of `graph`.
///
/// Deterministic: identical input yields the identical matching.
pub fn solve_exact(graph: &WeightedBipartiteGraph) -> SolveResult {
    let assignment = max_weight_assignment(graph);
    let pairs: Vec<Cell> = assignment
        .into_iter()
        .enumerate()
        .filter(|&(row, col)| graph.weight(row, col) > 0)
        .collect();
    let weight = pairs.iter().map(|&(r, c)| graph.weight(r, c)).sum();
    SolveResult {
        matching: Matching { pairs, weight },
        weight,
        method: Method::Exact,
    }
}

/// Row -> column assignment maximizing total weight.
///
/// Shortest augmenting paths over reduced costs `-w(i, j) - u[i] - v[j]`,
/// with 1-based potentials and column 0 as the virtual root.
fn max_weight_assignment(graph: &WeightedBipartiteGraph) -> Vec<usize> {
    let n = graph.sigma();
    let cost = |i: usize, j: usize| -i128::from(graph.weight(i, j));
    let inf = i128::MAX / 4;

    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    // p[j]: row matched to column j (0 = free); way[j]: previous column on the path.
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];

        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;

            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }

            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }

            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Exhaustive maximum weight matching. Among equal optima the first one in
/// [`enumerate_matchings`] order is returned.
pub fn solve_bruteforce(
    graph: &WeightedBipartiteGraph,
    cap: usize,
) -> Result<SolveResult, SolveError> {
    let mut best = Matching::empty();
    for matching in enumerate_matchings(graph, cap)? {
        if matching.weight > best.weight {
            best = matching;
        }
    }
    Ok(SolveResult {
        weight: best.weight,
        matching: best,
        method: Method::BruteForce,
    })
}

/// Every matching of `graph` exactly once, the empty matching first.
///
/// Row by row, each left vertex is either left unmatched or paired with a
/// free column holding a positive weight; skipping is tried before columns
/// in increasing order.
pub fn enumerate_matchings(
    graph: &WeightedBipartiteGraph,
    cap: usize,
) -> Result<Matchings<'_>, SolveError> {
    let sigma = graph.sigma();
    if sigma > cap {
        return Err(SolveError::CapExceeded { sigma, cap });
    }
    Ok(Matchings {
        graph,
        next_option: vec![0; sigma],
        chosen: vec![None; sigma],
        col_used: vec![false; sigma],
        depth: 0,
        done: false,
    })
}

/// Iterator returned by [`enumerate_matchings`].
pub struct Matchings<'g> {
    graph: &'g WeightedBipartiteGraph,
    // Option index to try next per row: 0 skips the row, k pairs it with column k - 1.
    next_option: Vec<usize>,
    chosen: Vec<Option<usize>>,
    col_used: Vec<bool>,
    depth: usize,
    done: bool,
}

impl Matchings<'_> {
    fn release(&mut self, row: usize) {
        if let Some(col) = self.chosen[row].take() {
            self.col_used[col] = false;
        }
    }

    fn current(&self) -> Matching {
        let pairs: Vec<Cell> = self
            .chosen
            .iter()
            .enumerate()
            .filter_map(|(row, col)| col.map(|c| (row, c)))
            .collect();
        let weight = pairs.iter().map(|&(r, c)| self.graph.weight(r, c)).sum();
        Matching { pairs, weight }
    }
}

impl Iterator for Matchings<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        let sigma = self.graph.sigma();
        loop {
            if self.done {
                return None;
            }
            if self.depth == sigma {
                let matching = self.current();
                self.depth -= 1;
                self.release(self.depth);
                return Some(matching);
            }

            let row = self.depth;
            let mut placed = false;
            while self.next_option[row] <= sigma {
                let option = self.next_option[row];
                self.next_option[row] += 1;
                if option == 0 {
                    placed = true;
                    break;
                }
                let col = option - 1;
                if !self.col_used[col] && self.graph.weight(row, col) > 0 {
                    self.col_used[col] = true;
                    self.chosen[row] = Some(col);
                    placed = true;
                    break;
                }
            }

            if placed {
                self.depth += 1;
                if self.depth < sigma {
                    self.next_option[self.depth] = 0;
                }
            } else if row == 0 {
                self.done = true;
            } else {
                self.depth -= 1;
                self.release(self.depth);
            }
        }
    }
}
