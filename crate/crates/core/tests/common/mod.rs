#![allow(dead_code)]

use rand::seq::index::sample;
use rand::Rng;
use xmb::{Increment, IncrementSet, WeightedBipartiteGraph};

/// Maximum weight matching by trying every permutation. With nonnegative
/// weights some optimum extends to a perfect assignment.
pub fn permutation_oracle(graph: &WeightedBipartiteGraph) -> u64 {
    fn go(g: &WeightedBipartiteGraph, row: usize, used: &mut [bool], acc: u64, best: &mut u64) {
        let n = g.sigma();
        if row == n {
            *best = (*best).max(acc);
            return;
        }
        for col in 0..n {
            if !used[col] {
                used[col] = true;
                go(g, row + 1, used, acc + g.weight(row, col), best);
                used[col] = false;
            }
        }
    }
    let mut best = 0;
    go(graph, 0, &mut vec![false; graph.sigma()], 0, &mut best);
    best
}

/// Every `sigma x sigma` matrix with entries in `0..=m` summing to `m`,
/// found by counting through all `(m + 1)^(sigma^2)` matrices.
pub fn naive_class(m: u64, sigma: usize) -> Vec<Vec<u64>> {
    let cells = sigma * sigma;
    let mut digits = vec![0u64; cells];
    let mut out = Vec::new();
    loop {
        if digits.iter().sum::<u64>() == m {
            out.push(digits.clone());
        }
        let mut k = 0;
        loop {
            if k == cells {
                return out;
            }
            digits[k] += 1;
            if digits[k] <= m {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

pub fn random_graph<R: Rng>(rng: &mut R, sigma: usize, max_entry: u64) -> WeightedBipartiteGraph {
    let weights = (0..sigma * sigma)
        .map(|_| rng.gen_range(0..=max_entry))
        .collect();
    WeightedBipartiteGraph::new(sigma, weights).unwrap()
}

/// A random split of `sigma` into positive amounts over distinct cells.
pub fn random_increments<R: Rng>(rng: &mut R, sigma: usize) -> IncrementSet {
    let parts = rng.gen_range(1..=sigma);
    let cells = sample(rng, sigma * sigma, parts).into_vec();
    let mut cuts: Vec<usize> = if parts > 1 {
        sample(rng, sigma - 1, parts - 1)
            .into_iter()
            .map(|c| c + 1)
            .collect()
    } else {
        Vec::new()
    };
    cuts.sort_unstable();
    cuts.push(sigma);
    let mut prev = 0;
    let increments = cells
        .into_iter()
        .zip(cuts)
        .map(|(cell, cut)| {
            let amount = (cut - prev) as u64;
            prev = cut;
            Increment {
                row: cell / sigma,
                col: cell % sigma,
                amount,
            }
        })
        .collect();
    IncrementSet::new(sigma, increments).unwrap()
}
