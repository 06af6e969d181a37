//! Workloads shared by the criterion benchmarks.

use gossip_core::{build_asymmetric, build_hypercube, Schedule};

/// Hypercube schedules for `m = 1..=max_m`.
pub fn hypercube_suite(max_m: u32) -> Vec<(u32, Schedule)> {
    (1..=max_m).map(|m| (m, build_hypercube(m))).collect()
}

/// Mixed schedules for the given node counts.
pub fn asymmetric_suite(ns: &[usize]) -> Vec<(usize, Schedule)> {
    ns.iter().map(|&n| (n, build_asymmetric(n))).collect()
}
