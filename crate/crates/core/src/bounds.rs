//! The class-minimum bound on maximum matching weight and the machinery
//! behind it.
//!
//! For graphs with partition size `sigma` and total weight `m`, every
//! maximum weight matching weighs at least `ceil((m - sigma) / sigma) + 1`
//! when `m >= sigma`, and at least 1 when `0 < m < sigma`. Both cases equal
//! `ceil(m / sigma)`, and a star centred on one left vertex attains it.
//!
//! Growth from class `m` to class `m + sigma` is witnessed by adding an
//! [`IncrementSet`] of total weight `sigma` to a graph and looking for an
//! [`ImprovingMove`] on its optimal matching: extend it by an incremented
//! edge, swap one or two matched edges for an incremented edge, or exchange
//! up to four matched edges for two disjoint incremented edges.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::graph::{
    matching_weight, validate_matching, Cell, GraphError, Matching, MatchingViolation,
    WeightedBipartiteGraph,
};
use crate::solve::solve_exact;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("m = {m} is below sigma = {sigma}; the (q, r) decomposition needs m >= sigma")]
    BelowPartition { m: u64, sigma: usize },
    #[error("class parameters must be positive (m = {m}, sigma = {sigma})")]
    NonPositive { m: u64, sigma: usize },
    #[error("increment amounts sum to {found}, expected sigma = {sigma}")]
    IncrementTotal { found: u64, sigma: usize },
    #[error("increment on cell ({0}, {1}) has amount 0")]
    ZeroIncrement(usize, usize),
    #[error("cell ({0}, {1}) is incremented more than once")]
    DuplicateIncrement(usize, usize),
    #[error("increment cell ({row}, {col}) is outside the {sigma}x{sigma} matrix")]
    IncrementOutOfRange {
        row: usize,
        col: usize,
        sigma: usize,
    },
    #[error("increment set targets sigma = {increments}, graph has sigma = {graph}")]
    SigmaMismatch { increments: usize, graph: usize },
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error("malformed increment document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matching(#[from] MatchingViolation),
}

/// `m = q * sigma + r` with `0 < r <= sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QRDecomposition {
    pub q: u64,
    pub r: u64,
}

/// Splits `m` as `q * sigma + r` with `0 < r <= sigma`. When `sigma` divides
/// `m` the remainder is `sigma`, not 0.
pub fn decompose(m: u64, sigma: usize) -> Result<QRDecomposition, BoundsError> {
    let s = sigma as u64;
    if sigma == 0 || m == 0 {
        return Err(BoundsError::NonPositive { m, sigma });
    }
    if m < s {
        return Err(BoundsError::BelowPartition { m, sigma });
    }
    let q = (m - 1) / s;
    Ok(QRDecomposition { q, r: m - q * s })
}

/// Minimum over the class of the maximum matching weight.
///
/// Panics if `m` or `sigma` is zero.
pub fn lower_bound(m: u64, sigma: usize) -> u64 {
    assert!(
        m >= 1 && sigma >= 1,
        "lower_bound needs m >= 1 and sigma >= 1"
    );
    let s = sigma as u64;
    let bound = if m >= s { (m - s).div_ceil(s) + 1 } else { 1 };
    debug_assert_eq!(bound, m.div_ceil(s));
    bound
}

/// A graph of total weight `m` whose maximum matching weighs exactly
/// `lower_bound(m, sigma)`.
///
/// All weight sits on edges at `u_0`, spread as evenly as possible over the
/// first `min(m, sigma)` columns, so any matching holds at most one edge.
pub fn construct_witness(m: u64, sigma: usize) -> Result<WeightedBipartiteGraph, BoundsError> {
    if m == 0 || sigma == 0 {
        return Err(BoundsError::NonPositive { m, sigma });
    }
    let mut weights = vec![0u64; sigma * sigma];
    match decompose(m, sigma) {
        Ok(QRDecomposition { q, r }) => {
            for (j, w) in weights[..sigma].iter_mut().enumerate() {
                *w = if (j as u64) < r { q + 1 } else { q };
            }
        }
        Err(BoundsError::BelowPartition { .. }) => {
            for w in &mut weights[..m as usize] {
                *w = 1;
            }
        }
        Err(e) => return Err(e),
    }
    Ok(WeightedBipartiteGraph::new(sigma, weights)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Increment {
    pub row: usize,
    pub col: usize,
    pub amount: u64,
}

impl Increment {
    pub fn cell(&self) -> Cell {
        (self.row, self.col)
    }
}

/// Edge-weight additions totalling exactly `sigma`, at most one per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementSet {
    sigma: usize,
    increments: Vec<Increment>,
}

impl IncrementSet {
    pub fn new(sigma: usize, increments: Vec<Increment>) -> Result<Self, BoundsError> {
        let mut seen = HashSet::with_capacity(increments.len());
        let mut total = 0u64;
        for inc in &increments {
            if inc.amount == 0 {
                return Err(BoundsError::ZeroIncrement(inc.row, inc.col));
            }
            if !seen.insert(inc.cell()) {
                return Err(BoundsError::DuplicateIncrement(inc.row, inc.col));
            }
            total = total.saturating_add(inc.amount);
        }
        if total != sigma as u64 {
            return Err(BoundsError::IncrementTotal {
                found: total,
                sigma,
            });
        }
        Ok(Self { sigma, increments })
    }

    /// Convenience constructor from `(row, col, amount)` triples.
    pub fn from_triples(
        sigma: usize,
        triples: &[(usize, usize, u64)],
    ) -> Result<Self, BoundsError> {
        let increments = triples
            .iter()
            .map(|&(row, col, amount)| Increment { row, col, amount })
            .collect();
        Self::new(sigma, increments)
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn increments(&self) -> &[Increment] {
        &self.increments
    }

    pub fn amount_at(&self, cell: Cell) -> u64 {
        self.increments
            .iter()
            .find(|inc| inc.cell() == cell)
            .map_or(0, |inc| inc.amount)
    }

    /// Parses `{"increments": [[i, j, amount], ...]}` for a graph with the
    /// given partition size.
    pub fn from_json(text: &str, sigma: usize) -> Result<Self, BoundsError> {
        let doc: IncrementDocument =
            serde_json::from_str(text).map_err(|e| BoundsError::Malformed(e.to_string()))?;
        let mut increments = Vec::with_capacity(doc.increments.len());
        for entry in &doc.increments {
            let parsed: Option<Vec<u64>> = entry.iter().map(Value::as_u64).collect();
            match parsed.as_deref() {
                Some(&[row, col, amount]) => increments.push(Increment {
                    row: row as usize,
                    col: col as usize,
                    amount,
                }),
                _ => {
                    return Err(BoundsError::Malformed(format!(
                        "expected [row, col, amount] of nonnegative integers, got {}",
                        Value::from(entry.clone())
                    )))
                }
            }
        }
        Self::new(sigma, increments)
    }

    pub fn read(path: impl AsRef<Path>, sigma: usize) -> Result<Self, BoundsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, sigma)
    }

    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({
            "increments": self
                .increments
                .iter()
                .map(|i| [i.row as u64, i.col as u64, i.amount])
                .collect::<Vec<_>>(),
        });
        doc.to_string()
    }
}

#[derive(Deserialize)]
struct IncrementDocument {
    increments: Vec<Vec<Value>>,
}

impl Serialize for IncrementSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let triples: Vec<[u64; 3]> = self
            .increments
            .iter()
            .map(|i| [i.row as u64, i.col as u64, i.amount])
            .collect();
        serde_json::json!({ "increments": triples }).serialize(serializer)
    }
}

/// Adds every increment to `graph`. The result weighs `sigma` more.
pub fn apply_increments(
    graph: &WeightedBipartiteGraph,
    increments: &IncrementSet,
) -> Result<WeightedBipartiteGraph, BoundsError> {
    let sigma = graph.sigma();
    if increments.sigma() != sigma {
        return Err(BoundsError::SigmaMismatch {
            increments: increments.sigma(),
            graph: sigma,
        });
    }
    let mut weights = graph.weights().to_vec();
    for inc in increments.increments() {
        if !graph.contains(inc.cell()) {
            return Err(BoundsError::IncrementOutOfRange {
                row: inc.row,
                col: inc.col,
                sigma,
            });
        }
        let w = &mut weights[inc.row * sigma + inc.col];
        *w = w.checked_add(inc.amount).ok_or(GraphError::Overflow)?;
    }
    Ok(WeightedBipartiteGraph::new(sigma, weights)?)
}

/// Moves one unit of weight from `dec` to `inc`, keeping the total fixed.
pub fn rebalance_unit(
    graph: &WeightedBipartiteGraph,
    dec: Cell,
    inc: Cell,
) -> Result<WeightedBipartiteGraph, GraphError> {
    for &(r, c) in [&dec, &inc] {
        if !graph.contains((r, c)) {
            return Err(GraphError::OutOfRange(r, c));
        }
    }
    let from = graph.weight(dec.0, dec.1);
    if from == 0 {
        return Err(GraphError::ZeroCell(dec.0, dec.1));
    }
    if dec == inc {
        return Ok(graph.clone());
    }
    let sigma = graph.sigma();
    let mut weights = graph.weights().to_vec();
    weights[dec.0 * sigma + dec.1] -= 1;
    weights[inc.0 * sigma + inc.1] += 1;
    WeightedBipartiteGraph::new(sigma, weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    /// An incremented edge lies in the matching, or both its ends are free.
    Case1,
    /// An incremented edge of amount >= 2 with exactly one matched end
    /// replaces the matched edge at that end.
    Case2a,
    /// An incremented edge of amount >= 2 with both ends matched replaces
    /// the two matched edges at its ends.
    Case2b,
    /// Two disjoint incremented edges replace every matched edge touching
    /// their four endpoints.
    Case3,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MoveKind::Case1 => "case-1",
            MoveKind::Case2a => "case-2a",
            MoveKind::Case2b => "case-2b",
            MoveKind::Case3 => "case-3",
        };
        f.write_str(name)
    }
}

/// A matching edit `M' = (M \ removed) ∪ added`.
///
/// `delta` is `Wt(M')` in the incremented graph minus `Wt(M)` in the base
/// graph. When an increment lands on an edge already in `M`, the move has
/// empty `removed` and `added` sets and `delta` is the increase of `M`
/// itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprovingMove {
    pub kind: MoveKind,
    pub removed: Vec<Cell>,
    pub added: Vec<Cell>,
    pub delta: i128,
}

impl ImprovingMove {
    /// Applies the move to `matching`, validated against the incremented graph.
    pub fn apply(
        &self,
        incremented: &WeightedBipartiteGraph,
        matching: &Matching,
    ) -> Result<Matching, MatchingViolation> {
        let pairs: Vec<Cell> = matching
            .pairs
            .iter()
            .copied()
            .filter(|cell| !self.removed.contains(cell))
            .chain(self.added.iter().copied())
            .collect();
        Matching::from_pairs(incremented, pairs)
    }
}

/// Looks for a single case-move that raises the weight of `matching` once
/// `increments` have been applied.
///
/// `incremented` must equal the base graph plus `increments`, and
/// `matching` must be a valid matching of the base graph. Cases are tried in
/// the order 1, 2a, 2b, 3 and, within a case, in increment order; the first
/// move with positive delta is returned. `Ok(None)` means no single move
/// improves.
pub fn find_improving_move(
    incremented: &WeightedBipartiteGraph,
    matching: &Matching,
    increments: &IncrementSet,
) -> Result<Option<ImprovingMove>, BoundsError> {
    let base = subtract_increments(incremented, increments)?;
    validate_matching(&base, matching).map_err(|v| {
        BoundsError::Inconsistent(format!("matching is not valid for the base graph: {v}"))
    })?;

    let base_weight = i128::from(matching.weight);
    let w = |(r, c): Cell| i128::from(incremented.weight(r, c));
    let evaluate =
        |kind: MoveKind, removed: Vec<Cell>, added: Vec<Cell>| -> Option<ImprovingMove> {
            let candidate = ImprovingMove {
                kind,
                removed,
                added,
                delta: 0,
            };
            let next = candidate.apply(incremented, matching).ok()?;
            let delta = i128::from(next.weight) - base_weight;
            (delta > 0).then_some(ImprovingMove { delta, ..candidate })
        };

    let incs = increments.increments();

    for inc in incs {
        let e = inc.cell();
        if matching.contains(e) {
            if let Some(mv) = evaluate(MoveKind::Case1, Vec::new(), Vec::new()) {
                return Ok(Some(mv));
            }
        }
        if matching.pair_for_row(e.0).is_none() && matching.pair_for_col(e.1).is_none() {
            if let Some(mv) = evaluate(MoveKind::Case1, Vec::new(), vec![e]) {
                return Ok(Some(mv));
            }
        }
    }

    for inc in incs.iter().filter(|inc| inc.amount >= 2) {
        let e = inc.cell();
        if matching.contains(e) {
            continue;
        }
        let at_row = matching.pair_for_row(e.0);
        let at_col = matching.pair_for_col(e.1);
        if let (Some(matched), None) | (None, Some(matched)) = (at_row, at_col) {
            if w(e) > w(matched) {
                if let Some(mv) = evaluate(MoveKind::Case2a, vec![matched], vec![e]) {
                    return Ok(Some(mv));
                }
            }
        }
    }

    for inc in incs.iter().filter(|inc| inc.amount >= 2) {
        let e = inc.cell();
        if matching.contains(e) {
            continue;
        }
        if let (Some(e1), Some(e2)) = (matching.pair_for_col(e.1), matching.pair_for_row(e.0)) {
            if w(e) > w(e1) + w(e2) {
                if let Some(mv) = evaluate(MoveKind::Case2b, vec![e1, e2], vec![e]) {
                    return Ok(Some(mv));
                }
            }
        }
    }

    for (a, first) in incs.iter().enumerate() {
        for second in &incs[a + 1..] {
            let (e1, e2) = (first.cell(), second.cell());
            if e1.0 == e2.0 || e1.1 == e2.1 {
                continue;
            }
            let mut removed: Vec<Cell> = [
                matching.pair_for_row(e1.0),
                matching.pair_for_col(e1.1),
                matching.pair_for_row(e2.0),
                matching.pair_for_col(e2.1),
            ]
            .into_iter()
            .flatten()
            .collect();
            removed.sort_unstable();
            removed.dedup();
            if let Some(mv) = evaluate(MoveKind::Case3, removed, vec![e1, e2]) {
                return Ok(Some(mv));
            }
        }
    }

    Ok(None)
}

fn subtract_increments(
    incremented: &WeightedBipartiteGraph,
    increments: &IncrementSet,
) -> Result<WeightedBipartiteGraph, BoundsError> {
    let sigma = incremented.sigma();
    if increments.sigma() != sigma {
        return Err(BoundsError::SigmaMismatch {
            increments: increments.sigma(),
            graph: sigma,
        });
    }
    let mut weights = incremented.weights().to_vec();
    for inc in increments.increments() {
        if !incremented.contains(inc.cell()) {
            return Err(BoundsError::IncrementOutOfRange {
                row: inc.row,
                col: inc.col,
                sigma,
            });
        }
        let w = &mut weights[inc.row * sigma + inc.col];
        *w = w.checked_sub(inc.amount).ok_or_else(|| {
            BoundsError::Inconsistent(format!(
                "cell ({}, {}) weighs {} in the incremented graph, less than its increment {}",
                inc.row, inc.col, w, inc.amount
            ))
        })?;
    }
    Ok(WeightedBipartiteGraph::new(sigma, weights)?)
}

/// Record of the growth check from class `m` to class `m + sigma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub m: u64,
    pub sigma: usize,
    pub increments: Vec<Increment>,
    /// Maximum matching weight of the base graph.
    pub w0: u64,
    /// Maximum matching weight after the increments.
    pub w1: u64,
    pub bound_m: u64,
    pub bound_m_plus_sigma: u64,
    /// `w0 == bound_m`.
    pub base_achieves_bound: bool,
    /// `w1 >= bound_m_plus_sigma`.
    pub growth_holds: bool,
    /// `bound_m_plus_sigma == bound_m + 1`.
    pub bound_shift_holds: bool,
    pub move_found: bool,
    pub improving_move: Option<ImprovingMove>,
    pub move_weight: Option<u64>,
    /// The moved matching is valid in the incremented graph, weighs
    /// `w0 + delta` with positive delta, and does not exceed `w1`.
    pub move_consistent: Option<bool>,
}

impl GrowthCertificate {
    pub fn passed(&self) -> bool {
        self.growth_holds && self.bound_shift_holds && self.move_consistent.unwrap_or(true)
    }
}

/// Checks that adding `increments` (total `sigma`) to `graph` (total
/// `m >= sigma`) lifts the optimum to at least the next class bound.
pub fn certify_increment_growth(
    graph: &WeightedBipartiteGraph,
    increments: &IncrementSet,
) -> Result<GrowthCertificate, BoundsError> {
    let sigma = graph.sigma();
    let m = graph.total_weight();
    if m < sigma as u64 {
        return Err(BoundsError::BelowPartition { m, sigma });
    }
    let incremented = apply_increments(graph, increments)?;
    let base = solve_exact(graph);
    let grown = solve_exact(&incremented);

    let bound_m = lower_bound(m, sigma);
    let bound_m_plus_sigma = lower_bound(incremented.total_weight(), sigma);

    let improving_move = find_improving_move(&incremented, &base.matching, increments)?;
    let (move_weight, move_consistent) = match &improving_move {
        Some(mv) => match mv.apply(&incremented, &base.matching) {
            Ok(next) => {
                let weight = matching_weight(&incremented, &next)?;
                let consistent = mv.delta > 0
                    && i128::from(weight) == i128::from(base.weight) + mv.delta
                    && weight <= grown.weight;
                (Some(weight), Some(consistent))
            }
            Err(_) => (None, Some(false)),
        },
        None => (None, None),
    };

    Ok(GrowthCertificate {
        m,
        sigma,
        increments: increments.increments().to_vec(),
        w0: base.weight,
        w1: grown.weight,
        bound_m,
        bound_m_plus_sigma,
        base_achieves_bound: base.weight == bound_m,
        growth_holds: grown.weight >= bound_m_plus_sigma,
        bound_shift_holds: bound_m_plus_sigma == bound_m + 1,
        move_found: improving_move.is_some(),
        improving_move,
        move_weight,
        move_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::solve_bruteforce;

    fn g(rows: &[&[u64]]) -> WeightedBipartiteGraph {
        WeightedBipartiteGraph::from_rows(rows).unwrap()
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(3, 3).unwrap(), QRDecomposition { q: 0, r: 3 });
        assert_eq!(decompose(7, 3).unwrap(), QRDecomposition { q: 2, r: 1 });
        assert_eq!(decompose(6, 3).unwrap(), QRDecomposition { q: 1, r: 3 });
        assert!(matches!(
            decompose(2, 3),
            Err(BoundsError::BelowPartition { .. })
        ));
        assert!(matches!(
            decompose(0, 3),
            Err(BoundsError::NonPositive { .. })
        ));
    }

    #[test]
    fn decompose_is_sound_on_grid() {
        for sigma in 1..=20usize {
            for m in sigma as u64..=200 {
                let QRDecomposition { q, r } = decompose(m, sigma).unwrap();
                assert_eq!(q * sigma as u64 + r, m);
                assert!(r > 0 && r <= sigma as u64);
            }
        }
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound(5, 5), 1);
        assert_eq!(lower_bound(3, 5), 1);
        assert_eq!(lower_bound(7, 3), 3);
        assert_eq!(lower_bound(12, 3), 4);
    }

    #[test]
    fn lower_bound_identities() {
        for sigma in 1..=20usize {
            for m in 1..=200u64 {
                let s = sigma as u64;
                assert_eq!(lower_bound(m, sigma), m.div_ceil(s), "m={m} sigma={sigma}");
                if m >= s {
                    assert_eq!(lower_bound(m, sigma), decompose(m, sigma).unwrap().q + 1);
                    assert_eq!(lower_bound(m + s, sigma), lower_bound(m, sigma) + 1);
                }
            }
        }
    }

    #[test]
    fn witness_examples() {
        let w = construct_witness(3, 3).unwrap();
        assert_eq!(w, g(&[&[1, 1, 1], &[0, 0, 0], &[0, 0, 0]]));
        assert_eq!(solve_bruteforce(&w, 8).unwrap().weight, 1);

        let w = construct_witness(7, 3).unwrap();
        assert_eq!(w, g(&[&[3, 2, 2], &[0, 0, 0], &[0, 0, 0]]));
        assert_eq!(solve_bruteforce(&w, 8).unwrap().weight, 3);

        let w = construct_witness(2, 3).unwrap();
        assert_eq!(w, g(&[&[1, 1, 0], &[0, 0, 0], &[0, 0, 0]]));
        assert_eq!(solve_bruteforce(&w, 8).unwrap().weight, 1);

        assert_eq!(construct_witness(1, 1).unwrap(), g(&[&[1]]));
        assert!(construct_witness(0, 2).is_err());
    }

    #[test]
    fn increment_set_invariants() {
        assert!(IncrementSet::from_triples(2, &[(1, 1, 2)]).is_ok());
        assert!(matches!(
            IncrementSet::from_triples(2, &[(1, 1, 3)]),
            Err(BoundsError::IncrementTotal { found: 3, sigma: 2 })
        ));
        assert!(matches!(
            IncrementSet::from_triples(2, &[(0, 0, 1), (0, 0, 1)]),
            Err(BoundsError::DuplicateIncrement(0, 0))
        ));
        assert!(matches!(
            IncrementSet::from_triples(2, &[(0, 0, 2), (1, 1, 0)]),
            Err(BoundsError::ZeroIncrement(1, 1))
        ));
    }

    #[test]
    fn increment_json() {
        let set = IncrementSet::from_json(r#"{"increments": [[0, 1, 2], [1, 0, 1]]}"#, 3).unwrap();
        assert_eq!(set.amount_at((0, 1)), 2);
        assert_eq!(set.amount_at((1, 1)), 0);
        assert_eq!(IncrementSet::from_json(&set.to_json(), 3).unwrap(), set);
        assert!(matches!(
            IncrementSet::from_json(r#"{"increments": [[0, 1]]}"#, 3),
            Err(BoundsError::Malformed(_))
        ));
        assert!(matches!(
            IncrementSet::from_json(r#"{"increments": [[0, -1, 3]]}"#, 3),
            Err(BoundsError::Malformed(_))
        ));
    }

    #[test]
    fn apply_increments_examples() {
        let s = IncrementSet::from_triples(2, &[(1, 1, 2)]).unwrap();
        let out = apply_increments(&g(&[&[1, 1], &[0, 0]]), &s).unwrap();
        assert_eq!(out, g(&[&[1, 1], &[0, 2]]));
        assert_eq!(out.total_weight(), 4);

        let s = IncrementSet::from_triples(3, &[(0, 0, 3)]).unwrap();
        let out = apply_increments(&construct_witness(3, 3).unwrap(), &s).unwrap();
        assert_eq!(out.row(0), &[4, 1, 1]);
        assert_eq!(out.total_weight(), 6);

        let outside = IncrementSet::from_triples(2, &[(2, 0, 2)]).unwrap();
        assert!(matches!(
            apply_increments(&g(&[&[1, 1], &[0, 0]]), &outside),
            Err(BoundsError::IncrementOutOfRange {
                row: 2,
                col: 0,
                sigma: 2
            })
        ));
        let wrong_sigma = IncrementSet::from_triples(3, &[(0, 0, 3)]).unwrap();
        assert!(matches!(
            apply_increments(&g(&[&[1, 1], &[0, 0]]), &wrong_sigma),
            Err(BoundsError::SigmaMismatch { .. })
        ));
    }

    #[test]
    fn case1_extends_by_free_edge() {
        let base = g(&[&[2, 0], &[0, 0]]);
        let m = Matching::from_pairs(&base, vec![(0, 0)]).unwrap();
        let s = IncrementSet::from_triples(2, &[(1, 1, 2)]).unwrap();
        let star = apply_increments(&base, &s).unwrap();
        let mv = find_improving_move(&star, &m, &s).unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Case1);
        assert_eq!(mv.added, vec![(1, 1)]);
        assert!(mv.removed.is_empty());
        let next = mv.apply(&star, &m).unwrap();
        assert_eq!(next.weight, 4);
        assert_eq!(mv.delta, 2);
    }

    #[test]
    fn case1_reweights_matched_edge() {
        let base = g(&[&[2, 0], &[0, 1]]);
        let m = Matching::from_pairs(&base, vec![(0, 0), (1, 1)]).unwrap();
        let s = IncrementSet::from_triples(2, &[(0, 1, 1), (1, 1, 1)]).unwrap();
        let star = apply_increments(&base, &s).unwrap();
        let mv = find_improving_move(&star, &m, &s).unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Case1);
        assert!(mv.added.is_empty() && mv.removed.is_empty());
        assert_eq!(mv.delta, 1);
        assert_eq!(mv.apply(&star, &m).unwrap().weight, 4);
    }

    #[test]
    fn case2a_swaps_single_edge() {
        let base = g(&[&[2, 3], &[0, 0]]);
        let m = Matching::from_pairs(&base, vec![(0, 1)]).unwrap();
        let s = IncrementSet::from_triples(2, &[(0, 0, 2)]).unwrap();
        let star = apply_increments(&base, &s).unwrap();
        let mv = find_improving_move(&star, &m, &s).unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Case2a);
        assert_eq!(mv.removed, vec![(0, 1)]);
        assert_eq!(mv.added, vec![(0, 0)]);
        assert_eq!(mv.delta, 1);
        let next = mv.apply(&star, &m).unwrap();
        assert_eq!(next.pairs, vec![(0, 0)]);
        assert_eq!(next.weight, 4);
        // brute force agrees that 4 is optimal here
        assert_eq!(solve_bruteforce(&star, 8).unwrap().weight, 4);
    }

    #[test]
    fn case2b_swaps_two_edges() {
        // M = {(0,1), (1,0)} weight 2; increment (0,0) by 3 -> 4 > 1 + 1
        let base = g(&[&[1, 1, 0], &[1, 0, 0], &[0, 0, 0]]);
        let m = Matching::from_pairs(&base, vec![(0, 1), (1, 0)]).unwrap();
        let s = IncrementSet::from_triples(3, &[(0, 0, 3)]).unwrap();
        let star = apply_increments(&base, &s).unwrap();
        let mv = find_improving_move(&star, &m, &s).unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Case2b);
        assert_eq!(mv.added, vec![(0, 0)]);
        assert_eq!(mv.delta, 2);
        assert_eq!(mv.apply(&star, &m).unwrap().weight, 4);
    }

    #[test]
    fn case3_exchanges_two_disjoint_edges() {
        // Both unit increments touch the matched edge (0,0), so only the
        // two-edge exchange applies.
        let base = g(&[&[1, 0], &[0, 0]]);
        let m = Matching::from_pairs(&base, vec![(0, 0)]).unwrap();
        let s = IncrementSet::from_triples(2, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        let star = apply_increments(&base, &s).unwrap();
        let mv = find_improving_move(&star, &m, &s).unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Case3);
        assert_eq!(mv.removed, vec![(0, 0)]);
        assert_eq!(mv.added, vec![(0, 1), (1, 0)]);
        assert_eq!(mv.delta, 1);
        assert_eq!(mv.apply(&star, &m).unwrap().weight, 2);
    }

    #[test]
    fn no_single_move_improves() {
        // G* = [[2,2],[3,2]]; exchanging both matched edges for the diagonal
        // loses weight (4 < 5) and brute force confirms 5 is already optimal.
        let base = g(&[&[1, 2], &[3, 1]]);
        let m = Matching::from_pairs(&base, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(m.weight, 5);
        let s = IncrementSet::from_triples(2, &[(0, 0, 1), (1, 1, 1)]).unwrap();
        let star = apply_increments(&base, &s).unwrap();
        assert_eq!(find_improving_move(&star, &m, &s).unwrap(), None);
        assert_eq!(solve_bruteforce(&star, 8).unwrap().weight, 5);
    }

    #[test]
    fn inconsistent_move_inputs() {
        let base = g(&[&[1, 0], &[0, 0]]);
        let m = Matching::from_pairs(&base, vec![(0, 0)]).unwrap();
        let s = IncrementSet::from_triples(2, &[(1, 1, 2)]).unwrap();
        // base passed where the incremented graph is expected
        assert!(matches!(
            find_improving_move(&base, &m, &s),
            Err(BoundsError::Inconsistent(_))
        ));
        let star = apply_increments(&base, &s).unwrap();
        let stale = Matching {
            pairs: vec![(1, 1)],
            weight: 2,
        };
        assert!(matches!(
            find_improving_move(&star, &stale, &s),
            Err(BoundsError::Inconsistent(_))
        ));
    }

    #[test]
    fn rebalance_examples() {
        let out = rebalance_unit(&g(&[&[2, 1], &[0, 0]]), (0, 0), (0, 1)).unwrap();
        assert_eq!(out, g(&[&[1, 2], &[0, 0]]));
        assert_eq!(out.total_weight(), 3);

        assert_eq!(
            rebalance_unit(&g(&[&[1]]), (0, 0), (0, 0)).unwrap(),
            g(&[&[1]])
        );

        assert!(matches!(
            rebalance_unit(&g(&[&[0, 1], &[0, 0]]), (0, 0), (0, 1)),
            Err(GraphError::ZeroCell(0, 0))
        ));
        assert!(matches!(
            rebalance_unit(&g(&[&[1]]), (0, 0), (1, 0)),
            Err(GraphError::OutOfRange(1, 0))
        ));
    }

    #[test]
    fn certify_examples() {
        let witness = construct_witness(3, 3).unwrap();
        let s = IncrementSet::from_triples(3, &[(1, 1, 2), (2, 0, 1)]).unwrap();
        let cert = certify_increment_growth(&witness, &s).unwrap();
        assert_eq!(cert.w0, 1);
        assert!(cert.w1 >= 2);
        assert_eq!(cert.bound_m_plus_sigma, 2);
        assert!(cert.passed());

        let witness = construct_witness(7, 3).unwrap();
        let s = IncrementSet::from_triples(3, &[(0, 0, 3)]).unwrap();
        let cert = certify_increment_growth(&witness, &s).unwrap();
        assert_eq!(cert.bound_m, 3);
        assert_eq!(cert.bound_m_plus_sigma, 4);
        assert!(cert.bound_shift_holds);
        assert_eq!(cert.improving_move.as_ref().unwrap().kind, MoveKind::Case1);
        assert!(cert.passed());

        for m in 1..=6 {
            let single = g(&[&[m]]);
            let s = IncrementSet::from_triples(1, &[(0, 0, 1)]).unwrap();
            let cert = certify_increment_growth(&single, &s).unwrap();
            assert_eq!(cert.w1, m + 1);
            assert_eq!(cert.w1, lower_bound(m + 1, 1));
            assert!(cert.passed());
        }

        let light = construct_witness(2, 3).unwrap();
        let s = IncrementSet::from_triples(3, &[(0, 0, 3)]).unwrap();
        assert!(matches!(
            certify_increment_growth(&light, &s),
            Err(BoundsError::BelowPartition { m: 2, sigma: 3 })
        ));
    }
}
