//! Exact construction, simulation, verification and search of deterministic
//! gossip schedules that reach consensus in finite time.
//!
//! All arithmetic is exact: matrix entries are dyadic rationals and network
//! states are arbitrary rationals.

pub mod arith;
pub mod combinatorics;
pub mod error;
pub mod gossip;
pub mod io;
pub mod quantum;
pub mod rank;
pub mod schedules;
pub mod search;

pub use arith::{chi, Dyadic, Rational};
pub use combinatorics::{enumerate_f, lower_bound_link, min_chi, DyadicComposition, MinChi};
pub use error::{Error, Result};
pub use gossip::{
    active_counts, apply_step, asym_matrix, check_invariants, is_consensus_matrix,
    node_update_cost, product, sym_matrix, GossipMatrix, GossipStep, InvariantReport, NetworkState,
    Schedule, StepMode,
};
pub use quantum::{
    build_t, impossibility_report, orbit_decompose, quantum_simulate, BasisElement, OrbitTable,
    QuantumState,
};
pub use schedules::{beta_report, build_asymmetric, build_hypercube, BetaReport, BinaryLabel};
pub use search::{
    min_updates, nonconvergence_certificate, verify_uniqueness_n4, SearchMode, SearchResult,
};
