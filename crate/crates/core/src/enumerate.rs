//! Exhaustive enumeration of the class of graphs with partition size
//! `sigma` and total weight `m`, and brute-force verification of the class
//! minimum of the maximum matching weight.
//!
//! Graphs are the weak compositions of `m` into `sigma^2` ordered parts read
//! as row-major weight matrices, so the class holds `C(m + sigma^2 - 1,
//! sigma^2 - 1)` labelled graphs. The space is sharded by the value of the
//! first cell; shards are disjoint and are scanned in parallel, then merged
//! in shard order so reports do not depend on the number of workers.

use std::io;
use std::ops::RangeInclusive;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::lower_bound;
use crate::graph::{ClassSpec, WeightedBipartiteGraph};
use crate::solve::solve_exact;

/// Default ceiling on the number of graphs a single verification may visit.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Environment variable the CLI reads to override [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_ENV: &str = "XMB_ENUM_CAP";

pub const DEFAULT_WITNESS_LIMIT: usize = 5;

#[derive(Debug, Error)]
pub enum EnumError {
    #[error("{spec} holds {} graphs, above the enumeration cap of {cap}", count.map_or_else(|| "more than 2^128".to_string(), |c| c.to_string()))]
    CapExceeded {
        spec: ClassSpec,
        count: Option<u128>,
        cap: u64,
    },
    #[error("could not start {jobs} worker threads: {reason}")]
    ThreadPool { jobs: usize, reason: String },
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) is divisible by i since acc = C(n - k + i - 1, i - 1).
        acc = acc.checked_mul(n - k + i)? / i;
    }
    Some(acc)
}

/// Number of labelled graphs in the class: `C(m + sigma^2 - 1, sigma^2 - 1)`.
pub fn class_size(spec: ClassSpec) -> Option<u128> {
    let cells = spec.cells() as u128;
    binomial(u128::from(spec.m) + cells - 1, cells - 1)
}

/// Weak compositions of `total` into `parts` ordered nonnegative parts.
///
/// Starts at `[total, 0, ..., 0]` and ends at `[0, ..., 0, total]`; each
/// step moves one unit out of the rightmost nonzero non-final part.
#[derive(Debug, Clone)]
pub struct WeakCompositions {
    parts: Vec<u64>,
    done: bool,
}

impl WeakCompositions {
    pub fn new(total: u64, parts: usize) -> Self {
        if parts == 0 {
            // Only the empty tuple sums to 0; nothing sums to a positive total.
            return Self {
                parts: Vec::new(),
                done: total != 0,
            };
        }
        let mut v = vec![0; parts];
        v[0] = total;
        Self {
            parts: v,
            done: false,
        }
    }
}

impl Iterator for WeakCompositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let current = self.parts.clone();
        let n = self.parts.len();
        if n <= 1 {
            self.done = true;
            return Some(current);
        }
        let tail = std::mem::take(&mut self.parts[n - 1]);
        match self.parts[..n - 1].iter().rposition(|&p| p > 0) {
            Some(i) => {
                self.parts[i] -= 1;
                self.parts[i + 1] = tail + 1;
            }
            None => self.done = true,
        }
        Some(current)
    }
}

fn check_cap(spec: ClassSpec, cap: u64) -> Result<u128, EnumError> {
    match class_size(spec) {
        Some(count) if count <= u128::from(cap) => Ok(count),
        count => Err(EnumError::CapExceeded { spec, count, cap }),
    }
}

/// Every graph of the class exactly once, refusing classes above `cap`.
pub fn enumerate_class(
    spec: ClassSpec,
    cap: u64,
) -> Result<impl Iterator<Item = WeightedBipartiteGraph>, EnumError> {
    check_cap(spec, cap)?;
    Ok((0..=spec.m)
        .rev()
        .flat_map(move |first| enumerate_shard(spec, first)))
}

/// The graphs of the class whose first cell `(0, 0)` weighs `first`.
pub fn enumerate_shard(
    spec: ClassSpec,
    first: u64,
) -> impl Iterator<Item = WeightedBipartiteGraph> {
    let cells = spec.cells();
    let rest = if first <= spec.m {
        WeakCompositions::new(spec.m - first, cells - 1)
    } else {
        WeakCompositions {
            parts: Vec::new(),
            done: true,
        }
    };
    rest.map(move |tail| {
        let mut weights = Vec::with_capacity(cells);
        weights.push(first);
        weights.extend(tail);
        WeightedBipartiteGraph::new(spec.sigma, weights).expect("composition of m fits the matrix")
    })
}

/// Rows and columns are both in non-increasing lexicographic order.
///
/// Every graph can be brought into this form by permuting rows and columns,
/// and those permutations preserve the maximum matching weight, so skipping
/// graphs that are not in this form never changes the class minimum.
pub fn is_doubly_sorted(graph: &WeightedBipartiteGraph) -> bool {
    let sigma = graph.sigma();
    let rows_sorted = (1..sigma).all(|i| graph.row(i - 1) >= graph.row(i));
    rows_sorted
        && (1..sigma).all(|j| {
            let left = (0..sigma).map(|i| graph.weight(i, j - 1));
            let right = (0..sigma).map(|i| graph.weight(i, j));
            left.ge(right)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub jobs: usize,
    pub cap: u64,
    pub witness_limit: usize,
    /// Visit only one doubly sorted representative per permutation orbit.
    /// `graphs_enumerated` then counts representatives only.
    pub dedup: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            cap: DEFAULT_ENUM_CAP,
            witness_limit: DEFAULT_WITNESS_LIMIT,
            dedup: false,
        }
    }
}

/// Partial result over one shard; [`ShardSummary::merge`] is associative.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShardSummary {
    pub count: u64,
    pub min: Option<u64>,
    pub witnesses: Vec<WeightedBipartiteGraph>,
}

impl ShardSummary {
    fn observe(&mut self, graph: WeightedBipartiteGraph, weight: u64, limit: usize) {
        self.count += 1;
        match self.min {
            Some(min) if weight > min => {}
            Some(min) if weight == min => {
                if self.witnesses.len() < limit {
                    self.witnesses.push(graph);
                }
            }
            _ => {
                self.min = Some(weight);
                self.witnesses.clear();
                if limit > 0 {
                    self.witnesses.push(graph);
                }
            }
        }
    }

    /// Combines `self` (earlier in order) with `later`.
    pub fn merge(mut self, later: ShardSummary, limit: usize) -> ShardSummary {
        self.count += later.count;
        match (self.min, later.min) {
            (_, None) => {}
            (None, Some(_)) => {
                self.min = later.min;
                self.witnesses = later.witnesses;
            }
            (Some(a), Some(b)) if b < a => {
                self.min = Some(b);
                self.witnesses = later.witnesses;
            }
            (Some(a), Some(b)) if a == b => {
                let room = limit.saturating_sub(self.witnesses.len());
                self.witnesses
                    .extend(later.witnesses.into_iter().take(room));
            }
            _ => {}
        }
        self
    }
}

/// Solves every graph of one shard.
pub fn scan_shard(spec: ClassSpec, first: u64, options: &VerifyOptions) -> ShardSummary {
    let mut summary = ShardSummary::default();
    for graph in enumerate_shard(spec, first) {
        if options.dedup && !is_doubly_sorted(&graph) {
            continue;
        }
        let weight = solve_exact(&graph).weight;
        summary.observe(graph, weight, options.witness_limit);
    }
    summary
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub spec: ClassSpec,
    pub bound: u64,
    pub min_observed: u64,
    pub argmin_witnesses: Vec<WeightedBipartiteGraph>,
    pub graphs_enumerated: u64,
    pub matches: bool,
    pub deduplicated: bool,
    pub jobs: usize,
    pub elapsed_secs: f64,
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, EnumError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| EnumError::ThreadPool {
            jobs,
            reason: e.to_string(),
        })
}

/// Enumerates the whole class and compares its minimum optimum with
/// [`lower_bound`].
pub fn verify_bound(
    spec: ClassSpec,
    options: &VerifyOptions,
) -> Result<VerificationReport, EnumError> {
    check_cap(spec, options.cap)?;
    let pool = thread_pool(options.jobs)?;
    verify_in_pool(spec, options, &pool)
}

fn verify_in_pool(
    spec: ClassSpec,
    options: &VerifyOptions,
    pool: &rayon::ThreadPool,
) -> Result<VerificationReport, EnumError> {
    check_cap(spec, options.cap)?;
    let start = Instant::now();
    let shards: Vec<ShardSummary> = pool.install(|| {
        (0..=spec.m)
            .rev()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|first| scan_shard(spec, first, options))
            .collect()
    });
    let summary = shards.into_iter().fold(ShardSummary::default(), |acc, s| {
        acc.merge(s, options.witness_limit)
    });

    let bound = lower_bound(spec.m, spec.sigma);
    // m >= 1, so the class is nonempty and every graph has a positive optimum.
    let min_observed = summary.min.expect("class with m >= 1 is nonempty");
    Ok(VerificationReport {
        spec,
        bound,
        min_observed,
        argmin_witnesses: summary.witnesses,
        graphs_enumerated: summary.count,
        matches: min_observed == bound,
        deduplicated: options.dedup,
        jobs: options.jobs,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutcome {
    Verified(VerificationReport),
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub m: u64,
    pub sigma: usize,
    pub outcome: SweepOutcome,
}

impl SweepRow {
    pub fn matches(&self) -> bool {
        matches!(&self.outcome, SweepOutcome::Verified(r) if r.matches)
    }
}

/// Verifies every `(m, sigma)` cell; cells above the cap are skipped.
/// Rows are ordered by sigma, then m.
pub fn sweep(
    m_range: RangeInclusive<u64>,
    sigma_range: RangeInclusive<usize>,
    options: &VerifyOptions,
) -> Result<Vec<SweepRow>, EnumError> {
    let pool = thread_pool(options.jobs)?;
    let mut rows = Vec::new();
    for sigma in sigma_range {
        for m in m_range.clone() {
            let outcome = match ClassSpec::new(m, sigma) {
                Err(e) => SweepOutcome::Failed(e.to_string()),
                Ok(spec) => match verify_in_pool(spec, options, &pool) {
                    Ok(report) => SweepOutcome::Verified(report),
                    Err(e @ EnumError::CapExceeded { .. }) => SweepOutcome::Skipped(e.to_string()),
                    Err(e) => SweepOutcome::Failed(e.to_string()),
                },
            };
            rows.push(SweepRow { m, sigma, outcome });
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct CsvRow {
    m: u64,
    sigma: usize,
    bound: Option<u64>,
    min_observed: Option<u64>,
    matches: String,
    graphs_enumerated: Option<u64>,
    elapsed: Option<f64>,
}

/// Writes `m,sigma,bound,min_observed,matches,graphs_enumerated,elapsed`.
/// Skipped and failed cells leave the measured columns empty and put
/// `skipped` or `failed` in `matches`.
pub fn write_sweep_csv<W: io::Write>(rows: &[SweepRow], writer: W) -> Result<(), csv::Error> {
    // Header is written explicitly so an empty sweep still yields it.
    let mut out = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    out.write_record([
        "m",
        "sigma",
        "bound",
        "min_observed",
        "matches",
        "graphs_enumerated",
        "elapsed",
    ])?;
    for row in rows {
        let bound = (row.m > 0 && row.sigma > 0).then(|| lower_bound(row.m, row.sigma));
        let record = match &row.outcome {
            SweepOutcome::Verified(r) => CsvRow {
                m: row.m,
                sigma: row.sigma,
                bound: Some(r.bound),
                min_observed: Some(r.min_observed),
                matches: r.matches.to_string(),
                graphs_enumerated: Some(r.graphs_enumerated),
                elapsed: Some(r.elapsed_secs),
            },
            SweepOutcome::Skipped(_) | SweepOutcome::Failed(_) => CsvRow {
                m: row.m,
                sigma: row.sigma,
                bound,
                min_observed: None,
                matches: if matches!(row.outcome, SweepOutcome::Skipped(_)) {
                    "skipped".into()
                } else {
                    "failed".into()
                },
                graphs_enumerated: None,
                elapsed: None,
            },
        };
        out.serialize(record)?;
    }
    out.flush()?;
    Ok(())
}
