//! Constructive schedules: the hypercube schedule for `n = 2^m` nodes
//! (symmetric steps only, `mn` node updates) and the mixed schedule for
//! `n = 2^m + r` nodes (`mn + 2r` node updates).
//!
//! Nodes are labelled by the binary digits of `i - 1`, digit 1 being the
//! most significant. Within a stage, steps are sorted by
//! `(min index, max index)`; the steps of one stage have disjoint supports
//! and commute.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arith::{split_pow2, Dyadic, Rational};
use crate::gossip::{is_consensus_matrix, product, GossipStep, Schedule, StepMode};

/// Fixed-width binary label of a node; digit 1 is the most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BinaryLabel {
    value: usize,
    width: u32,
}

impl BinaryLabel {
    /// Label of the 1-based node `index`.
    pub fn of_node(index: usize, width: u32) -> Self {
        assert!(index >= 1 && (index - 1) >> width == 0);
        BinaryLabel {
            value: index - 1,
            width,
        }
    }

    pub fn node(&self) -> usize {
        self.value + 1
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Digit `k`, `1 <= k <= width`.
    pub fn digit(&self, k: u32) -> u8 {
        assert!(k >= 1 && k <= self.width);
        ((self.value >> (self.width - k)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.width).map(|k| self.digit(k)).collect()
    }

    /// Whether the labels differ in digit `s` and agree on every digit in
    /// `others`.
    fn differs_only_at(
        &self,
        other: &BinaryLabel,
        s: u32,
        others: impl Iterator<Item = u32>,
    ) -> bool {
        let mut others = others;
        self.digit(s) != other.digit(s) && others.all(|l| l == s || self.digit(l) == other.digit(l))
    }
}

/// One block of commuting steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: String,
    pub steps: Vec<GossipStep>,
}

fn sort_stage(steps: &mut [GossipStep]) {
    steps.sort_by_key(|s| (s.i.min(s.j), s.i.max(s.j)));
}

fn flatten(n: usize, stages: &[Stage]) -> Schedule {
    let steps = stages
        .iter()
        .flat_map(|s| s.steps.iter().copied())
        .collect();
    Schedule::new(n, steps).expect("constructed steps are in range")
}

/// Stages `P_1, ..., P_m` of the hypercube schedule on `2^m` nodes.
pub fn hypercube_stages(m: u32) -> Vec<Stage> {
    let n = 1usize << m;
    let labels: Vec<BinaryLabel> = (1..=n).map(|i| BinaryLabel::of_node(i, m)).collect();
    (1..=m)
        .map(|s| {
            let mut steps = Vec::with_capacity(n / 2);
            for a in &labels {
                for b in &labels {
                    if a.value < b.value && a.differs_only_at(b, s, 1..=m) {
                        steps.push(GossipStep::sym(a.node(), b.node()));
                    }
                }
            }
            sort_stage(&mut steps);
            Stage {
                name: format!("P{s}"),
                steps,
            }
        })
        .collect()
}

pub fn build_hypercube(m: u32) -> Schedule {
    flatten(1usize << m, &hypercube_stages(m))
}

/// Stages `P_1, P_2#, P_2, ..., P_{m+1}#, P_{m+1}` of the mixed schedule for
/// `n = 2^m + r` nodes. Asymmetric stages have the node with leading digit
/// 1 as head.
pub fn asymmetric_stages(n: usize) -> Vec<Stage> {
    assert!(n >= 1);
    if n == 1 {
        return Vec::new();
    }
    let (m, r) = split_pow2(n);
    let width = m + 1;
    let labels: Vec<BinaryLabel> = (1..=n).map(|i| BinaryLabel::of_node(i, width)).collect();
    let mut stages = Vec::new();

    let mut first = Vec::new();
    for a in &labels {
        for b in &labels {
            if a.value < b.value && a.differs_only_at(b, 1, 2..=width) {
                first.push(GossipStep::sym(a.node(), b.node()));
            }
        }
    }
    sort_stage(&mut first);
    first.truncate(r);
    stages.push(Stage {
        name: "P1".into(),
        steps: first,
    });

    for s in 2..=width {
        let mut sharp = Vec::new();
        for head in labels.iter().filter(|l| l.digit(1) == 1) {
            for partner in labels.iter().filter(|l| l.digit(1) == 0) {
                if head.differs_only_at(partner, s, 2..=width) {
                    sharp.push(GossipStep::asym(head.node(), partner.node()));
                }
            }
        }
        sort_stage(&mut sharp);
        sharp.truncate(r);
        stages.push(Stage {
            name: format!("P{s}#"),
            steps: sharp,
        });

        let mut plain = Vec::new();
        let low: Vec<&BinaryLabel> = labels.iter().filter(|l| l.digit(1) == 0).collect();
        for a in &low {
            for b in &low {
                if a.value < b.value && a.differs_only_at(b, s, 2..=width) {
                    plain.push(GossipStep::sym(a.node(), b.node()));
                }
            }
        }
        sort_stage(&mut plain);
        plain.truncate(1usize << (m - 1));
        stages.push(Stage {
            name: format!("P{s}"),
            steps: plain,
        });
    }
    stages
}

pub fn build_asymmetric(n: usize) -> Schedule {
    flatten(n, &asymmetric_stages(n))
}

/// Edge set of the `m`-dimensional hypercube, built as the `m`-fold
/// Cartesian product of the two-node path. Vertex `(b_1, ..., b_m)` is node
/// `1 + sum b_k 2^(m-k)`.
pub fn hypercube_edges(m: u32) -> BTreeSet<(usize, usize)> {
    // vertices as digit tuples, edges as index pairs into the vertex list
    let mut vertices: Vec<Vec<u8>> = vec![Vec::new()];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let path_vertices = [0u8, 1u8];
    let path_edges = [(0usize, 1usize)];
    for _ in 0..m {
        let mut next_vertices = Vec::new();
        for v in &vertices {
            for &p in &path_vertices {
                let mut t = v.clone();
                t.push(p);
                next_vertices.push(t);
            }
        }
        let idx = |g: usize, p: usize| g * path_vertices.len() + p;
        let mut next_edges = Vec::new();
        // same factor-1 vertex, adjacent in the path
        for g in 0..vertices.len() {
            for &(a, b) in &path_edges {
                next_edges.push((idx(g, a), idx(g, b)));
            }
        }
        // same path vertex, adjacent in the previous product
        for &(g1, g2) in &edges {
            for p in 0..path_vertices.len() {
                next_edges.push((idx(g1, p), idx(g2, p)));
            }
        }
        vertices = next_vertices;
        edges = next_edges;
    }
    let node = |v: &[u8]| 1 + v.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    edges
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (node(&vertices[a]), node(&vertices[b]));
            (x.min(y), x.max(y))
        })
        .collect()
}

/// Undirected node pairs used by a schedule.
pub fn schedule_edges(sched: &Schedule) -> BTreeSet<(usize, usize)> {
    sched
        .steps()
        .iter()
        .map(|s| (s.i.min(s.j), s.i.max(s.j)))
        .collect()
}

/// Consensus row of the mixed schedule and its distance to the uniform
/// vector `1/n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaReport {
    pub n: usize,
    pub m: u32,
    pub r: usize,
    /// Consensus row in node order.
    pub beta: Vec<Dyadic>,
    /// `(value, multiplicity)`, ascending by value.
    pub multiset: Vec<(Dyadic, usize)>,
    pub l1: Rational,
    pub l2_squared: Rational,
    pub linf: Rational,
    /// `(2^m - r)/(2^m + r) * 2r / 4^(m+1)`.
    pub closed_form: Rational,
    /// `1 / 2^(m+1)`.
    pub bound: Dyadic,
    pub linf_below_bound: bool,
    pub bound_below_inverse_n: bool,
}

pub fn beta_report(n: usize) -> BetaReport {
    assert!(n >= 1);
    let (m, r) = split_pow2(n);
    let prod = product(&build_asymmetric(n));
    let beta = is_consensus_matrix(&prod).expect("mixed schedule reaches consensus");

    let mut sorted = beta.clone();
    sorted.sort();
    let mut multiset: Vec<(Dyadic, usize)> = Vec::new();
    for v in sorted {
        match multiset.last_mut() {
            Some((last, count)) if *last == v => *count += 1,
            _ => multiset.push((v, 1)),
        }
    }

    let uniform = Rational::new(1, n as i64).expect("n >= 1");
    let diffs: Vec<Rational> = beta
        .iter()
        .map(|b| (&b.to_rational() - &uniform).abs())
        .collect();
    let l1: Rational = diffs.iter().cloned().sum();
    let l2_squared: Rational = diffs.iter().map(|d| d * d).sum();
    let linf = diffs.iter().max().cloned().unwrap_or_else(Rational::zero);

    let p = 1i64 << m;
    let closed_form = &Rational::new(p - r as i64, p + r as i64).expect("positive")
        * &Rational::new(2 * r as i64, 1i64 << (2 * (m + 1))).expect("positive");
    let bound = Dyadic::pow2_inv(m as u64 + 1);
    let linf_below_bound = linf < bound.to_rational();
    let bound_below_inverse_n = bound.to_rational() < uniform;

    BetaReport {
        n,
        m,
        r,
        beta,
        multiset,
        l1,
        l2_squared,
        linf,
        closed_form,
        bound,
        linf_below_bound,
        bound_below_inverse_n,
    }
}

/// Expected multiset `{1/2^(m+1) x 2r, 1/2^m x (n - 2r)}` of the mixed
/// schedule's consensus row.
pub fn expected_beta_multiset(n: usize) -> Vec<(Dyadic, usize)> {
    let (m, r) = split_pow2(n);
    let mut out = Vec::new();
    if r > 0 {
        out.push((Dyadic::pow2_inv(m as u64 + 1), 2 * r));
    }
    if n > 2 * r {
        out.push((Dyadic::pow2_inv(m as u64), n - 2 * r));
    }
    out
}

/// `(symmetric, asymmetric)` step counts.
pub fn count_modes(sched: &Schedule) -> (usize, usize) {
    let sym = sched
        .steps()
        .iter()
        .filter(|s| s.mode == StepMode::Symmetric)
        .count();
    (sym, sched.len() - sym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gossip::{active_counts, node_update_cost, trajectory, GossipMatrix, NetworkState};

    fn steps(list: &[(char, usize, usize)]) -> Vec<GossipStep> {
        list.iter()
            .map(|&(t, i, j)| match t {
                'S' => GossipStep::sym(i, j),
                _ => GossipStep::asym(i, j),
            })
            .collect()
    }

    #[test]
    fn labels() {
        let l = BinaryLabel::of_node(3, 2);
        assert_eq!(l.bits(), vec![1, 0]);
        assert_eq!(l.digit(1), 1);
        assert_eq!(BinaryLabel::of_node(5, 3).bits(), vec![1, 0, 0]);
        assert_eq!(BinaryLabel::of_node(1, 0).bits(), Vec::<u8>::new());
    }

    #[test]
    fn hypercube_examples() {
        assert_eq!(build_hypercube(0).steps(), &[]);
        assert_eq!(build_hypercube(1).steps(), steps(&[('S', 1, 2)]).as_slice());
        assert_eq!(
            build_hypercube(2).steps(),
            steps(&[('S', 1, 3), ('S', 2, 4), ('S', 1, 2), ('S', 3, 4)]).as_slice()
        );
        let s = build_hypercube(2);
        assert_eq!(product(&s), GossipMatrix::filled(4, Dyadic::pow2_inv(2)));
        assert_eq!(node_update_cost(&s), 8);
        assert_eq!(active_counts(&s, s.len()).unwrap(), vec![2; 4]);
    }

    #[test]
    fn hypercube_products_for_small_m() {
        for m in 0..=4u32 {
            let s = build_hypercube(m);
            let n = 1usize << m;
            assert_eq!(s.len(), m as usize * n / 2);
            assert_eq!(
                product(&s),
                GossipMatrix::filled(n, Dyadic::pow2_inv(m as u64))
            );
            assert_eq!(node_update_cost(&s), m as u64 * n as u64);
            for stage in hypercube_stages(m) {
                assert_eq!(stage.steps.len(), n / 2);
            }
        }
    }

    #[test]
    fn asymmetric_examples() {
        assert!(build_asymmetric(1).is_empty());
        assert_eq!(
            build_asymmetric(2).steps(),
            steps(&[('S', 1, 2)]).as_slice()
        );
        let s3 = build_asymmetric(3);
        assert_eq!(
            s3.steps(),
            steps(&[('S', 1, 3), ('A', 3, 2), ('S', 1, 2)]).as_slice()
        );
        assert_eq!(node_update_cost(&s3), 5);
        let s5 = build_asymmetric(5);
        assert_eq!(
            s5.steps(),
            steps(&[
                ('S', 1, 5),
                ('A', 5, 3),
                ('S', 1, 3),
                ('S', 2, 4),
                ('A', 5, 2),
                ('S', 1, 2),
                ('S', 3, 4)
            ])
            .as_slice()
        );
        assert_eq!(node_update_cost(&s5), 12);
    }

    #[test]
    fn five_node_symbolic_trace() {
        // (a+e)/8 + (b+c+d)/4 with a..e = 1, 10, 100, 1000, 10000
        let x = NetworkState::from_integers(&[1, 10, 100, 1000, 10000]);
        let end = trajectory(&build_asymmetric(5), &x).unwrap().pop().unwrap();
        let expected = &Rational::new(10001, 8).unwrap() + &Rational::new(1110, 4).unwrap();
        assert!(end.values().iter().all(|v| *v == expected));
    }

    #[test]
    fn asymmetric_cost_and_consensus_up_to_16() {
        for n in 1..=16usize {
            let (m, r) = split_pow2(n);
            let s = build_asymmetric(n);
            let p = product(&s);
            assert!(is_consensus_matrix(&p).is_some(), "n = {n}");
            assert_eq!(node_update_cost(&s), m as u64 * n as u64 + 2 * r as u64);
            assert_eq!(
                beta_report(n).multiset,
                expected_beta_multiset(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn hypercube_edge_set_matches_schedule() {
        for m in 0..=5u32 {
            assert_eq!(
                schedule_edges(&build_hypercube(m)),
                hypercube_edges(m),
                "m = {m}"
            );
            assert_eq!(hypercube_edges(m).len(), m as usize * (1usize << m) / 2);
        }
    }

    #[test]
    fn beta_report_examples() {
        let b4 = beta_report(4);
        assert!(b4.beta.iter().all(|b| *b == Dyadic::pow2_inv(2)));
        assert!(b4.l1.is_zero() && b4.l2_squared.is_zero() && b4.linf.is_zero());
        assert!(b4.closed_form.is_zero());

        let b3 = beta_report(3);
        assert_eq!(
            b3.beta,
            vec![
                Dyadic::pow2_inv(2),
                Dyadic::pow2_inv(1),
                Dyadic::pow2_inv(2)
            ]
        );
        assert_eq!(b3.linf, Rational::new(1, 6).unwrap());
        assert_eq!(b3.l1, Rational::new(1, 3).unwrap());
        assert_eq!(b3.closed_form, Rational::new(1, 24).unwrap());

        let b5 = beta_report(5);
        assert_eq!(b5.linf, Rational::new(3, 40).unwrap());
        assert!(b5.linf_below_bound && b5.bound_below_inverse_n);
        assert_eq!(b5.bound, Dyadic::pow2_inv(3));
    }

    #[test]
    fn closed_form_is_squared_euclidean_distance() {
        for n in 1..=32usize {
            let b = beta_report(n);
            assert_eq!(b.closed_form, b.l2_squared, "n = {n}");
        }
    }

    #[test]
    fn mode_counts() {
        assert_eq!(count_modes(&build_asymmetric(5)), (5, 2));
        assert_eq!(count_modes(&build_hypercube(3)), (12, 0));
    }
}
