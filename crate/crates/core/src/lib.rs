//! Maximum weight bipartite matching and the tight lower bound
//! `ceil((m - sigma) / sigma) + 1` on its weight over all bipartite graphs
//! with partition size `sigma` and total edge weight `m`.
//!
//! - [`graph`]: dense weight matrices, matchings, JSON graph files.
//! - [`solve`]: exact Hungarian solver and a brute-force oracle.
//! - [`bounds`]: the closed-form bound, witness graphs, increment sets,
//!   improving moves and growth certificates.
//! - [`enumerate`]: exhaustive class enumeration and bound verification.

pub mod bounds;
pub mod enumerate;
pub mod graph;
pub mod solve;

pub use bounds::{
    apply_increments, certify_increment_growth, construct_witness, decompose, find_improving_move,
    lower_bound, rebalance_unit, BoundsError, GrowthCertificate, ImprovingMove, Increment,
    IncrementSet, MoveKind, QRDecomposition,
};
pub use enumerate::{
    class_size, enumerate_class, sweep, verify_bound, write_sweep_csv, EnumError, SweepOutcome,
    SweepRow, VerificationReport, VerifyOptions,
};
pub use graph::{
    matching_weight, read_graph, total_weight, validate_matching, write_graph, Cell, ClassSpec,
    GraphError, Matching, MatchingViolation, WeightedBipartiteGraph,
};
pub use solve::{
    enumerate_matchings, solve_bruteforce, solve_exact, Method, SolveError, SolveResult,
    DEFAULT_BRUTE_FORCE_CAP,
};
