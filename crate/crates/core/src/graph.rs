//! Dense weighted bipartite graphs and matchings.
//!
//! A graph on two partitions of equal size `sigma` is stored as a row-major
//! `sigma x sigma` matrix of nonnegative integer weights. Row `i` is the
//! left vertex `u_i`, column `j` the right vertex `v_j`, and an entry of `0`
//! means there is no edge between them. Positive entries are exactly the
//! edges of the graph together with their weights.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// A `(row, column)` position in the weight matrix.
pub type Cell = (usize, usize);

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("partition size must be at least 1")]
    EmptyPartition,
    #[error("expected {expected} weights for sigma = {sigma}, found {found}")]
    NotSquare {
        sigma: usize,
        expected: usize,
        found: usize,
    },
    #[error("weight at position {index} is negative ({value})")]
    NegativeEntry { index: usize, value: i64 },
    #[error("weight at position {index} is not a nonnegative integer: {value}")]
    NotAnInteger { index: usize, value: String },
    #[error("total weight exceeds the 64-bit range")]
    Overflow,
    #[error("cell ({0}, {1}) is outside the weight matrix")]
    OutOfRange(usize, usize),
    #[error("cell ({0}, {1}) has weight 0 and cannot be decremented")]
    ZeroCell(usize, usize),
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A complete-position bipartite graph with nonnegative integer weights.
///
/// The total weight is computed once at construction; graphs whose total
/// would not fit in a `u64` are rejected.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightedBipartiteGraph {
    sigma: usize,
    weights: Vec<u64>,
    total: u64,
}

impl WeightedBipartiteGraph {
    /// Builds a graph from row-major weights.
    pub fn new(sigma: usize, weights: Vec<u64>) -> Result<Self, GraphError> {
        if sigma == 0 {
            return Err(GraphError::EmptyPartition);
        }
        let expected = sigma.checked_mul(sigma).ok_or(GraphError::Overflow)?;
        if weights.len() != expected {
            return Err(GraphError::NotSquare {
                sigma,
                expected,
                found: weights.len(),
            });
        }
        let total = weights
            .iter()
            .try_fold(0u64, |acc, &w| acc.checked_add(w))
            .ok_or(GraphError::Overflow)?;
        Ok(Self {
            sigma,
            weights,
            total,
        })
    }

    /// Builds a graph from a slice of rows. The number of rows fixes `sigma`.
    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Result<Self, GraphError> {
        let sigma = rows.len();
        let mut weights = Vec::with_capacity(sigma * sigma);
        for row in rows {
            weights.extend_from_slice(row.as_ref());
        }
        if rows.iter().any(|r| r.as_ref().len() != sigma) {
            return Err(GraphError::NotSquare {
                sigma,
                expected: sigma * sigma,
                found: weights.len(),
            });
        }
        Self::new(sigma, weights)
    }

    /// The edgeless graph on `sigma + sigma` vertices.
    pub fn zero(sigma: usize) -> Result<Self, GraphError> {
        Self::new(sigma, vec![0; sigma * sigma])
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<u64> {
        self.weights
    }

    /// Weight of the edge `{u_row, v_col}`; panics when out of range.
    pub fn weight(&self, row: usize, col: usize) -> u64 {
        assert!(row < self.sigma && col < self.sigma, "cell out of range");
        self.weights[row * self.sigma + col]
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u64> {
        (row < self.sigma && col < self.sigma).then(|| self.weights[row * self.sigma + col])
    }

    pub fn contains(&self, (row, col): Cell) -> bool {
        row < self.sigma && col < self.sigma
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.weights[row * self.sigma..(row + 1) * self.sigma]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.weights.chunks_exact(self.sigma)
    }

    /// Positive cells in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (Cell, u64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(move |(k, &w)| ((k / self.sigma, k % self.sigma), w))
    }

    pub fn edge_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0).count()
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> u64 {
        self.total
    }

    /// Returns a copy with `cell` replaced by `weight`, re-checking the total.
    pub fn with_weight(&self, (row, col): Cell, weight: u64) -> Result<Self, GraphError> {
        if !self.contains((row, col)) {
            return Err(GraphError::OutOfRange(row, col));
        }
        let mut weights = self.weights.clone();
        weights[row * self.sigma + col] = weight;
        Self::new(self.sigma, weights)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            sigma: self.sigma,
            weights: self.weights.clone(),
        }
    }

    /// Parses the JSON graph format `{"sigma": s, "weights": [s*s integers]}`.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self, GraphError> {
        let obj = value
            .as_object()
            .ok_or_else(|| GraphError::Malformed("expected a JSON object".into()))?;
        let sigma = obj
            .get("sigma")
            .ok_or_else(|| GraphError::Malformed("missing field \"sigma\"".into()))?;
        let sigma = sigma.as_u64().ok_or_else(|| {
            GraphError::Malformed(format!("\"sigma\" must be a positive integer, got {sigma}"))
        })?;
        let sigma = usize::try_from(sigma).map_err(|_| GraphError::Overflow)?;
        let weights = obj
            .get("weights")
            .ok_or_else(|| GraphError::Malformed("missing field \"weights\"".into()))?
            .as_array()
            .ok_or_else(|| GraphError::Malformed("\"weights\" must be an array".into()))?;
        let mut parsed = Vec::with_capacity(weights.len());
        for (index, w) in weights.iter().enumerate() {
            match (w.as_u64(), w.as_i64()) {
                (Some(v), _) => parsed.push(v),
                (None, Some(value)) => return Err(GraphError::NegativeEntry { index, value }),
                (None, None) => {
                    return Err(GraphError::NotAnInteger {
                        index,
                        value: w.to_string(),
                    })
                }
            }
        }
        Self::new(sigma, parsed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("graph serialization is infallible")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let path = path.as_ref();
        let mut text = self.to_json();
        text.push('\n');
        fs::write(path, text).map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

impl fmt::Debug for WeightedBipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for WeightedBipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// On-disk form of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub sigma: usize,
    pub weights: Vec<u64>,
}

impl Serialize for WeightedBipartiteGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightedBipartiteGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        Self::from_json_value(&value).map_err(serde::de::Error::custom)
    }
}

/// Reads a graph file. See [`WeightedBipartiteGraph::from_json`] for the format.
pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedBipartiteGraph, GraphError> {
    WeightedBipartiteGraph::read(path)
}

pub fn write_graph(
    graph: &WeightedBipartiteGraph,
    path: impl AsRef<Path>,
) -> Result<(), GraphError> {
    graph.write(path)
}

pub fn total_weight(graph: &WeightedBipartiteGraph) -> u64 {
    graph.total_weight()
}

/// The first broken matching invariant found by [`validate_matching`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingViolation {
    #[error("cell ({0}, {1}) is outside the {2}x{2} weight matrix")]
    OutOfRange(usize, usize, usize),
    #[error("row {row} is used by more than one pair")]
    SharedRow { row: usize },
    #[error("column {col} is used by more than one pair")]
    SharedColumn { col: usize },
    #[error("cell ({0}, {1}) has weight 0 and is not an edge")]
    ZeroCell(usize, usize),
    #[error("recorded weight {recorded} differs from the graph weight {actual}")]
    WeightMismatch { recorded: u64, actual: u64 },
}

/// A set of vertex-disjoint edges together with its weight in some host graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<Cell>,
    pub weight: u64,
}

impl Matching {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates `pairs` against `graph` and records their weight.
    /// Pairs are stored sorted by row.
    pub fn from_pairs(
        graph: &WeightedBipartiteGraph,
        mut pairs: Vec<Cell>,
    ) -> Result<Self, MatchingViolation> {
        let weight = pairs_weight(graph, &pairs)?;
        pairs.sort_unstable();
        Ok(Self { pairs, weight })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.pairs.contains(&cell)
    }

    /// The pair covering left vertex `row`, if any.
    pub fn pair_for_row(&self, row: usize) -> Option<Cell> {
        self.pairs.iter().copied().find(|&(r, _)| r == row)
    }

    /// The pair covering right vertex `col`, if any.
    pub fn pair_for_col(&self, col: usize) -> Option<Cell> {
        self.pairs.iter().copied().find(|&(_, c)| c == col)
    }
}

/// Checks the disjointness and positivity invariants of `pairs` and returns
/// their total weight in `graph`. Disjoint rows bound the pair count by sigma.
fn pairs_weight(graph: &WeightedBipartiteGraph, pairs: &[Cell]) -> Result<u64, MatchingViolation> {
    let sigma = graph.sigma();
    let mut row_used = vec![false; sigma];
    let mut col_used = vec![false; sigma];
    let mut weight = 0u64;
    for &(r, c) in pairs {
        if !graph.contains((r, c)) {
            return Err(MatchingViolation::OutOfRange(r, c, sigma));
        }
        if std::mem::replace(&mut row_used[r], true) {
            return Err(MatchingViolation::SharedRow { row: r });
        }
        if std::mem::replace(&mut col_used[c], true) {
            return Err(MatchingViolation::SharedColumn { col: c });
        }
        let w = graph.weight(r, c);
        if w == 0 {
            return Err(MatchingViolation::ZeroCell(r, c));
        }
        // Cannot overflow: the pairs are distinct cells of a graph whose total fits.
        weight += w;
    }
    Ok(weight)
}

/// Accepts `matching` iff its pairs are row- and column-disjoint positive
/// cells of `graph` and its recorded weight equals their sum.
pub fn validate_matching(
    graph: &WeightedBipartiteGraph,
    matching: &Matching,
) -> Result<(), MatchingViolation> {
    let actual = pairs_weight(graph, &matching.pairs)?;
    if actual != matching.weight {
        return Err(MatchingViolation::WeightMismatch {
            recorded: matching.weight,
            actual,
        });
    }
    Ok(())
}

/// Sum of `graph`'s weights over the matching's cells.
///
/// Ignores the recorded `weight` field; only the pairs are checked.
pub fn matching_weight(
    graph: &WeightedBipartiteGraph,
    matching: &Matching,
) -> Result<u64, MatchingViolation> {
    pairs_weight(graph, &matching.pairs)
}

/// The pair `(m, sigma)` naming the class of all graphs with partition size
/// `sigma` and total weight `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassSpec {
    pub m: u64,
    pub sigma: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("class parameters must be positive (m = {m}, sigma = {sigma})")]
pub struct InvalidClassSpec {
    pub m: u64,
    pub sigma: usize,
}

impl ClassSpec {
    pub fn new(m: u64, sigma: usize) -> Result<Self, InvalidClassSpec> {
        if m == 0 || sigma == 0 {
            return Err(InvalidClassSpec { m, sigma });
        }
        Ok(Self { m, sigma })
    }

    pub fn cells(&self) -> usize {
        self.sigma * self.sigma
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G(m={}, sigma={})", self.m, self.sigma)
    }
}
