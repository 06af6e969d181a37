//! Bounded exhaustive search over schedules.
//!
//! Prefixes with the same product matrix are merged, so the search runs over
//! the set of reachable products rather than over step sequences. Products
//! are stored with every entry scaled to the common denominator `2^D`, where
//! `D` is the largest number of steps the budget allows; this integer form is
//! canonical for exact dyadic matrices.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_power_of_two, split_odd, Dyadic, Rational};
use crate::error::{Error, Result};
use crate::gossip::{apply_step, GossipMatrix, GossipStep, NetworkState, Schedule, StepMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SearchMode {
    SymOnly,
    SymAndAsym,
}

/// Every step available on `n` nodes under `mode`, in a fixed order:
/// symmetric pairs first, then asymmetric (head, partner) pairs.
pub fn step_alphabet(n: usize, mode: SearchMode) -> Vec<GossipStep> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(GossipStep::sym(i, j));
        }
    }
    if mode == SearchMode::SymAndAsym {
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    out.push(GossipStep::asym(i, j));
                }
            }
        }
    }
    out
}

/// Product matrix with entries `value * 2^scale` stored as integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct ScaledMatrix {
    n: usize,
    data: Box<[u64]>,
}

impl ScaledMatrix {
    fn identity(n: usize, scale: u32) -> Self {
        let mut data = vec![0u64; n * n].into_boxed_slice();
        for r in 0..n {
            data[r * n + r] = 1u64 << scale;
        }
        ScaledMatrix { n, data }
    }

    fn left_apply(&self, step: &GossipStep) -> Self {
        let n = self.n;
        let mut data = self.data.clone();
        let (i, j) = (step.i - 1, step.j - 1);
        for c in 0..n {
            let a = data[i * n + c];
            let b = data[j * n + c];
            debug_assert!(
                (a + b).is_multiple_of(2),
                "scale too small for schedule depth"
            );
            let avg = (a + b) / 2;
            data[i * n + c] = avg;
            if step.mode == StepMode::Symmetric {
                data[j * n + c] = avg;
            }
        }
        ScaledMatrix { n, data }
    }

    /// Lower bound on the node-update cost still needed to reach a
    /// consensus product. A diagonal entry can at most halve each time its
    /// node is active, and the diagonal of a consensus product sums to one,
    /// so the remaining activity counts `t_i` must satisfy
    /// `sum_i d_i 2^-t_i <= 1`. The least total is found greedily by always
    /// halving the largest term.
    fn remaining_lower_bound(&self, scale: u32) -> u64 {
        const GUARD: u32 = 60;
        let one: u128 = 1u128 << (scale + GUARD);
        let mut terms: Vec<u128> = (0..self.n)
            .map(|i| (self.data[i * self.n + i] as u128) << GUARD)
            .collect();
        let mut sum: u128 = terms.iter().sum();
        let mut count = 0;
        while sum > one {
            let (k, &largest) = terms
                .iter()
                .enumerate()
                .max_by_key(|(_, &t)| t)
                .expect("n >= 1");
            let half = largest / 2;
            sum -= largest - half;
            terms[k] = half;
            count += 1;
        }
        count
    }

    /// Whether some activity vector `t` with `sum t = remaining` satisfies
    /// `sum_j max_i M_ij 2^-t_i <= 1`. Entry `(i, j)` can at most halve each
    /// time node `i` is active, and every row of a consensus product equals
    /// its common row, which sums to one; failure means no schedule of
    /// cost `remaining` can finish from here.
    fn may_finish_within(&self, scale: u32, remaining: u64) -> bool {
        const GUARD: u32 = 60;
        let n = self.n;
        let one: u128 = 1u128 << (scale + GUARD);
        let scaled: Vec<u128> = self.data.iter().map(|&v| (v as u128) << GUARD).collect();
        let mut t = vec![0u64; n];

        fn feasible(scaled: &[u128], n: usize, t: &[u64], one: u128) -> bool {
            let mut total: u128 = 0;
            for c in 0..n {
                let col_max = (0..n)
                    .map(|r| scaled[r * n + c] >> t[r].min(127))
                    .max()
                    .unwrap_or(0);
                total += col_max;
                if total > one {
                    return false;
                }
            }
            true
        }

        fn assign(
            k: usize,
            left: u64,
            t: &mut Vec<u64>,
            scaled: &[u128],
            n: usize,
            one: u128,
        ) -> bool {
            if k + 1 == n {
                t[k] = left;
                return feasible(scaled, n, t, one);
            }
            for v in 0..=left {
                t[k] = v;
                if assign(k + 1, left - v, t, scaled, n, one) {
                    return true;
                }
            }
            false
        }

        assign(0, remaining, &mut t, &scaled, n, one)
    }

    /// Least relabelling of `self` under the given inverse permutations,
    /// with the index of the one used. Candidate `q` has entry
    /// `(a, b) = self(q[a], q[b])`.
    fn canonical(&self, inverses: &[Vec<usize>]) -> (ScaledMatrix, usize) {
        let n = self.n;
        let mut best = 0;
        for (k, q) in inverses.iter().enumerate().skip(1) {
            let cur = &inverses[best];
            let mut order = std::cmp::Ordering::Equal;
            'scan: for a in 0..n {
                for b in 0..n {
                    let x = self.data[q[a] * n + q[b]];
                    let y = self.data[cur[a] * n + cur[b]];
                    if x != y {
                        order = x.cmp(&y);
                        break 'scan;
                    }
                }
            }
            if order == std::cmp::Ordering::Less {
                best = k;
            }
        }
        (self.relabel(&inverses[best]), best)
    }

    fn relabel(&self, q: &[usize]) -> ScaledMatrix {
        let n = self.n;
        let mut data = vec![0u64; n * n].into_boxed_slice();
        for a in 0..n {
            for b in 0..n {
                data[a * n + b] = self.data[q[a] * n + q[b]];
            }
        }
        ScaledMatrix { n, data }
    }

    fn is_consensus(&self) -> bool {
        let n = self.n;
        let first = &self.data[..n];
        self.data.chunks(n).all(|row| row == first)
    }

    fn to_gossip(&self, scale: u32) -> GossipMatrix {
        let rows = self
            .data
            .chunks(self.n)
            .map(|row| row.iter().map(|&v| Dyadic::new(v, scale as u64)).collect())
            .collect();
        GossipMatrix::from_rows(rows).expect("square")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub mode: SearchMode,
    pub budget: u64,
    /// Least node-update cost reaching a consensus product, if any within
    /// the budget.
    pub min_updates: Option<u64>,
    /// One schedule per distinct consensus product of minimal cost.
    pub witnesses: Vec<Schedule>,
    /// Distinct product matrices visited.
    pub explored: usize,
}

/// Largest `n` for which products are merged up to node relabelling.
const SYMMETRY_LIMIT: usize = 6;

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn relabel_step(step: &GossipStep, map: &[usize]) -> GossipStep {
    GossipStep {
        i: map[step.i - 1] + 1,
        j: map[step.j - 1] + 1,
        mode: step.mode,
    }
}

struct Node {
    parent: Option<usize>,
    /// Step in the labelling of the parent's stored matrix.
    step: Option<GossipStep>,
    /// Relabelling applied to the child after the step.
    perm: usize,
    cost: u64,
}

fn path_to(nodes: &[Node], mut idx: usize, n: usize, inverses: &[Vec<usize>]) -> Schedule {
    let mut chain = Vec::new();
    while let Some(step) = nodes[idx].step {
        chain.push((step, nodes[idx].perm));
        idx = nodes[idx].parent.expect("non-root node has a parent");
    }
    chain.reverse();
    let mut to_real: Vec<usize> = (0..n).collect();
    let mut steps = Vec::with_capacity(chain.len());
    for (step, perm) in chain {
        steps.push(relabel_step(&step, &to_real));
        let q = &inverses[perm];
        to_real = (0..n).map(|a| to_real[q[a]]).collect();
    }
    Schedule::new(n, steps).expect("alphabet steps are valid")
}

/// Every relabelling of the given schedules, one per distinct product.
fn expand_witnesses(found: Vec<Schedule>, n: usize, scale: u32) -> Vec<Schedule> {
    let perms = if n <= SYMMETRY_LIMIT {
        permutations(n)
    } else {
        vec![(0..n).collect()]
    };
    let mut seen: HashSet<ScaledMatrix> = HashSet::new();
    let mut out = Vec::new();
    for w in &found {
        for p in &perms {
            let steps = w.steps().iter().map(|s| relabel_step(s, p)).collect();
            let sched = Schedule::new(n, steps).expect("relabelled steps are valid");
            let mut m = ScaledMatrix::identity(n, scale);
            for s in sched.steps() {
                m = m.left_apply(s);
            }
            if seen.insert(m) {
                out.push(sched);
            }
        }
    }
    out
}

/// Least node-update cost of any schedule on `n` nodes whose product has
/// identical rows, searching every schedule of cost at most `budget`.
///
/// Runs a bounded uniform-cost search for each bound from the admissible
/// lower bound at the identity up to `budget`; within a run, products whose
/// cost plus remaining lower bound exceed the bound are dropped.
pub fn min_updates(n: usize, mode: SearchMode, budget: u64) -> Result<SearchResult> {
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    let deepest = max_steps(mode, budget);
    if deepest > 62 {
        return Err(Error::DepthTooLarge(deepest));
    }
    let alphabet = step_alphabet(n, mode);
    let start = ScaledMatrix::identity(n, 0).remaining_lower_bound(0);

    let mut explored = 0;
    for bound in start.min(budget)..=budget {
        let run = bounded_search(n, &alphabet, bound, max_steps(mode, bound) as u32);
        explored += run.explored;
        if run.min_updates.is_some() {
            return Ok(SearchResult {
                n,
                mode,
                budget,
                min_updates: run.min_updates,
                witnesses: run.witnesses,
                explored,
            });
        }
    }
    Ok(SearchResult {
        n,
        mode,
        budget,
        min_updates: None,
        witnesses: Vec::new(),
        explored,
    })
}

fn max_steps(mode: SearchMode, budget: u64) -> u64 {
    match mode {
        SearchMode::SymOnly => budget / 2,
        SearchMode::SymAndAsym => budget,
    }
}

struct Run {
    min_updates: Option<u64>,
    witnesses: Vec<Schedule>,
    explored: usize,
}

fn bounded_search(n: usize, alphabet: &[GossipStep], budget: u64, scale: u32) -> Run {
    let inverses = if n <= SYMMETRY_LIMIT {
        permutations(n)
    } else {
        vec![(0..n).collect()]
    };
    let root = ScaledMatrix::identity(n, scale);
    if root.remaining_lower_bound(scale) > budget {
        return Run {
            min_updates: None,
            witnesses: Vec::new(),
            explored: 1,
        };
    }
    let mut matrices: Vec<ScaledMatrix> = vec![root.clone()];
    let mut nodes = vec![Node {
        parent: None,
        step: None,
        perm: 0,
        cost: 0,
    }];
    let mut index: HashMap<ScaledMatrix, usize> = HashMap::new();
    index.insert(root, 0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); budget as usize + 1];
    buckets[0].push(0);

    for cost in 0..=budget {
        let mut bucket: Vec<usize> = std::mem::take(&mut buckets[cost as usize])
            .into_iter()
            .filter(|&i| nodes[i].cost == cost)
            .collect();
        bucket.sort_unstable();
        bucket.dedup();

        let hits: Vec<usize> = bucket
            .iter()
            .copied()
            .filter(|&i| matrices[i].is_consensus())
            .collect();
        if !hits.is_empty() {
            return Run {
                min_updates: Some(cost),
                witnesses: expand_witnesses(
                    hits.iter()
                        .map(|&i| path_to(&nodes, i, n, &inverses))
                        .collect(),
                    n,
                    scale,
                ),
                explored: matrices.len(),
            };
        }

        let children: Vec<Vec<(ScaledMatrix, GossipStep, usize)>> = bucket
            .par_iter()
            .map(|&i| {
                alphabet
                    .iter()
                    .filter(|s| cost + s.cost() <= budget)
                    .filter_map(|s| {
                        let child = matrices[i].left_apply(s);
                        let left = budget - cost - s.cost();
                        let reachable = child.remaining_lower_bound(scale) <= left
                            && child.may_finish_within(scale, left);
                        reachable.then(|| {
                            let (canon, perm) = child.canonical(&inverses);
                            (canon, *s, perm)
                        })
                    })
                    .collect()
            })
            .collect();

        for (&parent, kids) in bucket.iter().zip(children) {
            for (m, step, perm) in kids {
                let child_cost = cost + step.cost();
                let node = Node {
                    parent: Some(parent),
                    step: Some(step),
                    perm,
                    cost: child_cost,
                };
                match index.get(&m) {
                    Some(&existing) => {
                        if nodes[existing].cost > child_cost {
                            nodes[existing] = node;
                            buckets[child_cost as usize].push(existing);
                        }
                    }
                    None => {
                        let id = matrices.len();
                        index.insert(m.clone(), id);
                        matrices.push(m);
                        nodes.push(node);
                        buckets[child_cost as usize].push(id);
                    }
                }
            }
        }
    }

    Run {
        min_updates: None,
        witnesses: Vec::new(),
        explored: matrices.len(),
    }
}

/// Budget that confirms optimality with one unit of slack:
/// `mn + 2` for symmetric search (`n = 2^m`), `mn + 2r + 2` otherwise.
pub fn default_budget(n: usize, mode: SearchMode) -> u64 {
    let (m, r) = crate::arith::split_pow2(n);
    let base = m as u64 * n as u64;
    match mode {
        SearchMode::SymOnly => base + 2,
        SearchMode::SymAndAsym => base + 2 * r as u64 + 2,
    }
}

/// Outcome of the exhaustive check on four-node symmetric schedules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    pub max_len: usize,
    /// Sequences without immediate repetition visited by the enumeration.
    pub sequences_examined: u64,
    /// Schedules whose product first becomes `11^T/4` at their last step,
    /// counted by length.
    pub witnesses_by_length: BTreeMap<usize, u64>,
    pub min_length: Option<usize>,
    pub minimal_witnesses: u64,
    /// Witnesses whose last four steps do not fit the pattern.
    pub counterexamples: Vec<Schedule>,
}

fn pair_of(step: &GossipStep) -> (usize, usize) {
    (step.i.min(step.j), step.i.max(step.j))
}

/// Whether, for some relabelling `(a, b, c, d)` of `{1, 2, 3, 4}`, the last
/// four steps are `M_ab`, `M_cd`, `M_ac`, `M_bd` reading backwards from the
/// end.
pub fn matches_final_pattern(sched: &Schedule) -> bool {
    let steps = sched.steps();
    let t = steps.len();
    if sched.n() != 4 || t < 4 {
        return false;
    }
    let last = [
        pair_of(&steps[t - 1]),
        pair_of(&steps[t - 2]),
        pair_of(&steps[t - 3]),
        pair_of(&steps[t - 4]),
    ];
    let pair = |x: usize, y: usize| (x.min(y), x.max(y));
    permutations4()
        .into_iter()
        .any(|[a, b, c, d]| last == [pair(a, b), pair(c, d), pair(a, c), pair(b, d)])
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 1..=4 {
        for b in 1..=4 {
            for c in 1..=4 {
                for d in 1..=4 {
                    let v = [a, b, c, d];
                    let mut s = v;
                    s.sort();
                    if s == [1, 2, 3, 4] {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

/// Enumerates every symmetric schedule on four nodes of length at most
/// `max_len` with no step repeated back to back, stopping each branch at the
/// first step where the product becomes `11^T/4`, and checks the shape of
/// the last four steps of every such schedule.
pub fn verify_uniqueness_n4(max_len: usize) -> Result<UniquenessReport> {
    if max_len > 62 {
        return Err(Error::DepthTooLarge(max_len as u64));
    }
    let alphabet = step_alphabet(4, SearchMode::SymOnly);
    let scale = max_len as u32;
    let mut report = UniquenessReport {
        max_len,
        sequences_examined: 0,
        witnesses_by_length: BTreeMap::new(),
        min_length: None,
        minimal_witnesses: 0,
        counterexamples: Vec::new(),
    };

    fn walk(
        alphabet: &[GossipStep],
        path: &mut Vec<GossipStep>,
        m: &ScaledMatrix,
        max_len: usize,
        report: &mut UniquenessReport,
    ) {
        for step in alphabet {
            if path.last() == Some(step) {
                continue;
            }
            let next = m.left_apply(step);
            path.push(*step);
            report.sequences_examined += 1;
            if next.is_consensus() {
                *report.witnesses_by_length.entry(path.len()).or_default() += 1;
                let sched = Schedule::new(4, path.clone()).expect("valid");
                if !matches_final_pattern(&sched) {
                    report.counterexamples.push(sched);
                }
            } else if path.len() < max_len {
                walk(alphabet, path, &next, max_len, report);
            }
            path.pop();
        }
    }

    let mut path = Vec::new();
    walk(
        &alphabet,
        &mut path,
        &ScaledMatrix::identity(4, scale),
        max_len,
        &mut report,
    );
    report.min_length = report.witnesses_by_length.keys().next().copied();
    report.minimal_witnesses = report
        .min_length
        .map_or(0, |t| report.witnesses_by_length[&t]);
    Ok(report)
}

/// Two independent arguments that symmetric gossip on `n` nodes (`n` not a
/// power of two) cannot reach consensus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonconvergenceCertificate {
    pub n: usize,
    pub depth: u64,
    /// `n = 2^n1 * n2` with `n2` odd.
    pub n1: u32,
    pub n2: usize,
    /// Distinct products of at most `depth` symmetric steps, enumerated
    /// without pruning.
    pub products_explored: usize,
    pub consensus_product_found: bool,
    /// `2^n1` zeros followed by `2^(depth+1)` everywhere else.
    pub initial_state: Vec<Rational>,
    /// The average, which any consensus would have to equal.
    pub required_value: Rational,
    pub required_is_dyadic: bool,
    /// Distinct states reachable in at most `depth + 1` symmetric steps.
    pub reachable_states: usize,
    pub all_reachable_integral: bool,
    /// No consensus product found, required value not dyadic, and every
    /// reachable entry an integer.
    pub holds: bool,
}

pub fn nonconvergence_certificate(n: usize, depth: u64) -> Result<NonconvergenceCertificate> {
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    if is_power_of_two(n as u128) {
        return Err(Error::PowerOfTwo(n));
    }
    if depth + 1 > 62 {
        return Err(Error::DepthTooLarge(depth + 1));
    }
    let exhaustive = reachable_products(n, SearchMode::SymOnly, depth)?;

    let (n1, n2) = split_odd(n);
    let zeros = 1usize << n1;
    let high = Rational::from_integer(1i64 << (depth + 1));
    let initial: Vec<Rational> = (0..n)
        .map(|k| {
            if k < zeros {
                Rational::zero()
            } else {
                high.clone()
            }
        })
        .collect();
    let x0 = NetworkState::new(initial.clone());
    let required_value = x0.average();
    let required_is_dyadic = required_value.is_dyadic();

    let alphabet = step_alphabet(n, SearchMode::SymOnly);
    let mut seen: HashSet<NetworkState> = HashSet::new();
    seen.insert(x0.clone());
    let mut frontier = vec![x0];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for x in &frontier {
            for step in &alphabet {
                let y = apply_step(x, step)?;
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    let all_reachable_integral = seen
        .iter()
        .all(|x| x.values().iter().all(Rational::is_integer));
    let consensus_product_found = exhaustive.first_consensus.is_some();

    Ok(NonconvergenceCertificate {
        n,
        depth,
        n1,
        n2,
        products_explored: exhaustive.distinct,
        consensus_product_found,
        initial_state: initial,
        required_value,
        required_is_dyadic,
        reachable_states: seen.len(),
        all_reachable_integral,
        holds: !consensus_product_found && !required_is_dyadic && all_reachable_integral,
    })
}

/// Distinct products of short schedules, found without any pruning.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReachableProducts {
    pub depth: u64,
    /// Distinct products of at most `depth` steps, identity included.
    pub distinct: usize,
    /// Least number of steps giving a consensus product, if any.
    pub first_consensus: Option<u64>,
}

/// Breadth-first enumeration of every product of at most `depth` steps.
pub fn reachable_products(n: usize, mode: SearchMode, depth: u64) -> Result<ReachableProducts> {
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    if depth > 62 {
        return Err(Error::DepthTooLarge(depth));
    }
    let scale = depth as u32;
    let alphabet = step_alphabet(n, mode);
    let root = ScaledMatrix::identity(n, scale);
    let mut seen: HashSet<ScaledMatrix> = HashSet::new();
    seen.insert(root.clone());
    let mut frontier = vec![root];
    let mut first_consensus = None;
    for level in 1..=depth {
        let mut next = Vec::new();
        for m in &frontier {
            for step in &alphabet {
                let child = m.left_apply(step);
                if child.is_consensus() && first_consensus.is_none() {
                    first_consensus = Some(level);
                }
                if seen.insert(child.clone()) {
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    Ok(ReachableProducts {
        depth,
        distinct: seen.len(),
        first_consensus,
    })
}

/// Product of a search witness, for callers that want the exact matrix.
pub fn witness_product(sched: &Schedule) -> GossipMatrix {
    let scale = sched.len() as u32;
    let mut m = ScaledMatrix::identity(sched.n(), scale);
    for s in sched.steps() {
        m = m.left_apply(s);
    }
    m.to_gossip(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gossip::{is_consensus_matrix, node_update_cost, product};
    use crate::schedules::{build_asymmetric, build_hypercube};

    #[test]
    fn alphabet_sizes() {
        assert_eq!(step_alphabet(4, SearchMode::SymOnly).len(), 6);
        assert_eq!(step_alphabet(4, SearchMode::SymAndAsym).len(), 18);
    }

    #[test]
    fn two_nodes() {
        let r = min_updates(2, SearchMode::SymOnly, 4).unwrap();
        assert_eq!(r.min_updates, Some(2));
        assert_eq!(r.witnesses.len(), 1);
        assert!(min_updates(1, SearchMode::SymOnly, 4).is_err());
    }

    #[test]
    fn four_nodes_symmetric() {
        let r = min_updates(4, SearchMode::SymOnly, 10).unwrap();
        assert_eq!(r.min_updates, Some(8));
        for w in &r.witnesses {
            assert_eq!(node_update_cost(w), 8);
            assert!(is_consensus_matrix(&product(w)).is_some());
        }
    }

    #[test]
    fn three_nodes_mixed() {
        let r = min_updates(3, SearchMode::SymAndAsym, 8).unwrap();
        assert_eq!(r.min_updates, Some(5));
        for w in &r.witnesses {
            assert_eq!(node_update_cost(w), 5);
            assert_eq!(witness_product(w), product(w));
        }
        let built = product(&build_asymmetric(3));
        assert!(r.witnesses.iter().any(|w| product(w) == built));
    }

    #[test]
    fn budget_below_optimum_finds_nothing() {
        let r = min_updates(4, SearchMode::SymOnly, 6).unwrap();
        assert_eq!(r.min_updates, None);
        assert!(r.witnesses.is_empty());
        assert!(r.explored >= 1);
        let r = min_updates(3, SearchMode::SymAndAsym, 4).unwrap();
        assert_eq!(r.min_updates, None);
    }

    #[test]
    fn five_nodes_mixed() {
        let r = min_updates(5, SearchMode::SymAndAsym, 14).unwrap();
        assert_eq!(r.min_updates, Some(12));
        let built = product(&build_asymmetric(5));
        assert!(r.witnesses.iter().any(|w| product(w) == built));
        for w in &r.witnesses {
            assert_eq!(node_update_cost(w), 12);
            assert!(is_consensus_matrix(&product(w)).is_some());
        }
    }

    #[test]
    fn witnesses_cover_every_relabelling() {
        let r = min_updates(4, SearchMode::SymOnly, 8).unwrap();
        let products: HashSet<GossipMatrix> = r.witnesses.iter().map(product).collect();
        assert_eq!(products.len(), r.witnesses.len());
        let p = permutations(4);
        assert_eq!(p.len(), 24);
        for w in &r.witnesses {
            for q in &p {
                let steps = w.steps().iter().map(|s| relabel_step(s, q)).collect();
                let moved = Schedule::new(4, steps).unwrap();
                assert!(products.contains(&product(&moved)));
            }
        }
    }

    #[test]
    fn symmetric_optimum_for_powers_of_two() {
        for m in 1..=2u32 {
            let n = 1usize << m;
            let r = min_updates(
                n,
                SearchMode::SymOnly,
                default_budget(n, SearchMode::SymOnly),
            )
            .unwrap();
            assert_eq!(r.min_updates, Some(m as u64 * n as u64));
            let built = product(&build_hypercube(m));
            assert!(r.witnesses.iter().any(|w| product(w) == built));
        }
    }

    #[test]
    fn pattern_examples() {
        let s = Schedule::new(
            4,
            vec![
                GossipStep::sym(2, 4),
                GossipStep::sym(1, 3),
                GossipStep::sym(3, 4),
                GossipStep::sym(1, 2),
            ],
        )
        .unwrap();
        assert!(matches_final_pattern(&s));
        // hypercube order: {1,3},{2,4},{1,2},{3,4}
        assert!(matches_final_pattern(&build_hypercube(2)));
        let bad = Schedule::new(
            4,
            vec![
                GossipStep::sym(1, 2),
                GossipStep::sym(3, 4),
                GossipStep::sym(1, 2),
                GossipStep::sym(3, 4),
            ],
        )
        .unwrap();
        assert!(!matches_final_pattern(&bad));
    }

    #[test]
    fn alternating_pairs_never_converge() {
        let mut steps = Vec::new();
        for k in 0..6 {
            steps.push(if k % 2 == 0 {
                GossipStep::sym(1, 2)
            } else {
                GossipStep::sym(3, 4)
            });
            let s = Schedule::new(4, steps.clone()).unwrap();
            assert!(is_consensus_matrix(&product(&s)).is_none());
        }
        // the products cycle with period two after the first two steps
        let p2 = product(&Schedule::new(4, steps[..2].to_vec()).unwrap());
        let p4 = product(&Schedule::new(4, steps[..4].to_vec()).unwrap());
        assert_eq!(p2, p4);
    }

    #[test]
    fn reachable_products_small() {
        let r = reachable_products(2, SearchMode::SymOnly, 3).unwrap();
        assert_eq!((r.distinct, r.first_consensus), (2, Some(1)));
        let r = reachable_products(4, SearchMode::SymOnly, 4).unwrap();
        assert_eq!(r.first_consensus, Some(4));
        let r = reachable_products(3, SearchMode::SymOnly, 6).unwrap();
        assert_eq!(r.first_consensus, None);
        assert!(r.distinct > 1);
    }

    #[test]
    fn certificate_rejects_powers_of_two() {
        assert_eq!(
            nonconvergence_certificate(4, 3).unwrap_err(),
            Error::PowerOfTwo(4)
        );
    }

    #[test]
    fn certificate_required_values() {
        let c = nonconvergence_certificate(3, 6).unwrap();
        assert_eq!(c.required_value, Rational::new(256, 3).unwrap());
        assert!(c.holds);
        let c = nonconvergence_certificate(6, 5).unwrap();
        assert_eq!((c.n1, c.n2), (1, 3));
        assert_eq!(c.required_value, Rational::new(128, 3).unwrap());
        assert!(!c.required_is_dyadic && c.all_reachable_integral);
    }
}
