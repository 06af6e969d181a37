//! Gossip steps, schedules, exact matrix products and state evolution.
//!
//! Node indices in steps are 1-based (`1..=n`). Matrix accessors are
//! 0-based, as with any Rust slice.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{Dyadic, Rational};
use crate::error::{Error, Result};
use crate::rank::rank_integer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepMode {
    /// Both endpoints move to the pair average.
    Symmetric,
    /// Only the head node `i` moves to the pair average.
    Asymmetric,
}

/// One pairwise interaction. For [`StepMode::Asymmetric`], `i` is the head,
/// the only node whose state changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GossipStep {
    pub i: usize,
    pub j: usize,
    pub mode: StepMode,
}

impl GossipStep {
    pub fn sym(i: usize, j: usize) -> Self {
        GossipStep {
            i,
            j,
            mode: StepMode::Symmetric,
        }
    }

    pub fn asym(head: usize, partner: usize) -> Self {
        GossipStep {
            i: head,
            j: partner,
            mode: StepMode::Asymmetric,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for index in [self.i, self.j] {
            if index == 0 || index > n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if self.i == self.j {
            return Err(Error::SelfLoop(self.i));
        }
        Ok(())
    }

    /// Entry sum of `I - P` for this step's matrix.
    pub fn cost(&self) -> u64 {
        match self.mode {
            StepMode::Symmetric => 2,
            StepMode::Asymmetric => 1,
        }
    }

    /// Whether node `v` (1-based) changes state in this step.
    pub fn is_active(&self, v: usize) -> bool {
        match self.mode {
            StepMode::Symmetric => v == self.i || v == self.j,
            StepMode::Asymmetric => v == self.i,
        }
    }

    /// Same interaction with the symmetric pair written smaller-index first.
    pub fn canonical(&self) -> Self {
        match self.mode {
            StepMode::Symmetric if self.i > self.j => GossipStep::sym(self.j, self.i),
            _ => *self,
        }
    }

    pub fn matrix(&self, n: usize) -> Result<GossipMatrix> {
        match self.mode {
            StepMode::Symmetric => sym_matrix(n, self.i, self.j),
            StepMode::Asymmetric => asym_matrix(n, self.i, self.j),
        }
    }
}

impl fmt::Display for GossipStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.mode {
            StepMode::Symmetric => 'S',
            StepMode::Asymmetric => 'A',
        };
        write!(f, "{tag} {} {}", self.i, self.j)
    }
}

/// A finite sequence of steps over `n` nodes; step `k` is the matrix `P_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    n: usize,
    steps: Vec<GossipStep>,
}

impl Schedule {
    pub fn new(n: usize, steps: Vec<GossipStep>) -> Result<Self> {
        for s in &steps {
            s.validate(n)?;
        }
        Ok(Schedule { n, steps })
    }

    pub fn empty(n: usize) -> Self {
        Schedule {
            n,
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, step: GossipStep) -> Result<()> {
        step.validate(self.n)?;
        self.steps.push(step);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[GossipStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn prefix(&self, h: usize) -> Schedule {
        Schedule {
            n: self.n,
            steps: self.steps[..h.min(self.steps.len())].to_vec(),
        }
    }
}

/// Dense `n x n` matrix of dyadic entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GossipMatrix {
    n: usize,
    entries: Vec<Dyadic>,
}

impl GossipMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Dyadic::zero(); n * n];
        for r in 0..n {
            entries[r * n + r] = Dyadic::one();
        }
        GossipMatrix { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        GossipMatrix {
            n,
            entries: vec![Dyadic::zero(); n * n],
        }
    }

    /// Every entry equal to `value`.
    pub fn filled(n: usize, value: Dyadic) -> Self {
        GossipMatrix {
            n,
            entries: vec![value; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Dyadic>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(GossipMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Dyadic {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Dyadic) {
        self.entries[r * self.n + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Dyadic] {
        &self.entries[r * self.n..(r + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Dyadic]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn diagonal(&self) -> Vec<Dyadic> {
        (0..self.n).map(|r| self.get(r, r).clone()).collect()
    }

    pub fn row_sums(&self) -> Vec<Dyadic> {
        self.rows().map(|row| row.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<Dyadic> {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn is_stochastic(&self) -> bool {
        self.entries.iter().all(|e| e.is_positive() || e.is_zero())
            && self.row_sums().iter().all(|s| *s == Dyadic::one())
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        self.is_stochastic() && self.col_sums().iter().all(|s| *s == Dyadic::one())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Plain `self * rhs`.
    pub fn mul(&self, rhs: &GossipMatrix) -> GossipMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = GossipMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + &(a * b);
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    /// `P * self` where `P` is the matrix of `step`, as row operations.
    pub fn left_apply(&mut self, step: &GossipStep) {
        let n = self.n;
        let (i, j) = (step.i - 1, step.j - 1);
        for c in 0..n {
            let avg = self.get(i, c).average(self.get(j, c));
            if step.mode == StepMode::Symmetric {
                self.set(j, c, avg.clone());
            }
            self.set(i, c, avg);
        }
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.n);
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, v)| a * v)
                    .sum()
            })
            .collect()
    }

    /// Exact rank, via integer rows scaled to a common power-of-two denominator.
    pub fn rank(&self) -> usize {
        let exp = self.entries.iter().map(Dyadic::exp).max().unwrap_or(0);
        let rows: Vec<Vec<BigInt>> = self
            .rows()
            .map(|row| row.iter().map(|e| e.scaled_num(exp)).collect())
            .collect();
        rank_integer(rows)
    }

    pub fn distinct_rows(&self) -> usize {
        let mut rows: Vec<&[Dyadic]> = self.rows().collect();
        rows.sort();
        rows.dedup();
        rows.len()
    }

    /// Submatrix on the given 0-based indices, in that order.
    pub fn restrict(&self, indices: &[usize]) -> GossipMatrix {
        let rows = indices
            .iter()
            .map(|&r| indices.iter().map(|&c| self.get(r, c).clone()).collect())
            .collect();
        GossipMatrix::from_rows(rows).expect("square by construction")
    }

    pub fn entries(&self) -> &[Dyadic] {
        &self.entries
    }
}

impl fmt::Display for GossipMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(Dyadic::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Exact node values `x(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkState(pub Vec<Rational>);

impl NetworkState {
    pub fn new(values: Vec<Rational>) -> Self {
        NetworkState(values)
    }

    pub fn from_integers(values: &[i64]) -> Self {
        NetworkState(values.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_consensus(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    pub fn average(&self) -> Rational {
        let sum: Rational = self.0.iter().cloned().sum();
        &sum * &Rational::new(1, self.0.len() as i64).expect("nonempty state")
    }

    pub fn distinct_values(&self) -> usize {
        let mut v = self.0.clone();
        v.sort();
        v.dedup();
        v.len()
    }
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    GossipStep::sym(i, j).validate(n)
}

/// `I - (e_i - e_j)(e_i - e_j)^T / 2`.
pub fn sym_matrix(n: usize, i: usize, j: usize) -> Result<GossipMatrix> {
    check_pair(n, i, j)?;
    let mut m = GossipMatrix::identity(n);
    let half = Dyadic::pow2_inv(1);
    let (a, b) = (i - 1, j - 1);
    for (r, c) in [(a, a), (a, b), (b, a), (b, b)] {
        m.set(r, c, half.clone());
    }
    Ok(m)
}

/// `I - e_i (e_i - e_j)^T / 2`: node `i` averages with `j`, `j` is unchanged.
pub fn asym_matrix(n: usize, i: usize, j: usize) -> Result<GossipMatrix> {
    check_pair(n, i, j)?;
    let mut m = GossipMatrix::identity(n);
    let half = Dyadic::pow2_inv(1);
    m.set(i - 1, i - 1, half.clone());
    m.set(i - 1, j - 1, half);
    Ok(m)
}

pub fn apply_step(x: &NetworkState, step: &GossipStep) -> Result<NetworkState> {
    step.validate(x.len())?;
    let mut out = x.clone();
    let (i, j) = (step.i - 1, step.j - 1);
    let avg = x.0[i].average(&x.0[j]);
    if step.mode == StepMode::Symmetric {
        out.0[j] = avg.clone();
    }
    out.0[i] = avg;
    Ok(out)
}

/// Runs every step of `sched` on `x`, returning all intermediate states
/// `x(0), x(1), ..., x(T)`.
pub fn trajectory(sched: &Schedule, x: &NetworkState) -> Result<Vec<NetworkState>> {
    if x.len() != sched.n() {
        return Err(Error::DimensionMismatch {
            expected: sched.n(),
            found: x.len(),
        });
    }
    let mut states = Vec::with_capacity(sched.len() + 1);
    states.push(x.clone());
    for step in sched.steps() {
        let next = apply_step(states.last().expect("nonempty"), step)?;
        states.push(next);
    }
    Ok(states)
}

/// `Psi_T = P_{T-1} ... P_0`; the empty schedule gives the identity.
pub fn product(sched: &Schedule) -> GossipMatrix {
    let mut m = GossipMatrix::identity(sched.n());
    for step in sched.steps() {
        m.left_apply(step);
    }
    m
}

/// All prefix products `Psi_0 = I, Psi_1, ..., Psi_T`.
pub fn prefix_products(sched: &Schedule) -> Vec<GossipMatrix> {
    let mut out = Vec::with_capacity(sched.len() + 1);
    let mut m = GossipMatrix::identity(sched.n());
    out.push(m.clone());
    for step in sched.steps() {
        m.left_apply(step);
        out.push(m.clone());
    }
    out
}

/// The common row `beta` if every row of `m` is identical.
pub fn is_consensus_matrix(m: &GossipMatrix) -> Option<Vec<Dyadic>> {
    let mut rows = m.rows();
    let first = rows.next()?;
    rows.all(|r| r == first).then(|| first.to_vec())
}

/// Sum over steps of the entry sum of `I - P_k`.
pub fn node_update_cost(sched: &Schedule) -> u64 {
    sched.steps().iter().map(GossipStep::cost).sum()
}

/// `s_v(h)` for every node: how many of the first `h` steps change node `v`.
pub fn active_counts(sched: &Schedule, h: usize) -> Result<Vec<u64>> {
    if h > sched.len() {
        return Err(Error::PrefixTooLong {
            h,
            len: sched.len(),
        });
    }
    let mut counts = vec![0u64; sched.n()];
    for step in &sched.steps()[..h] {
        counts[step.i - 1] += 1;
        if step.mode == StepMode::Symmetric {
            counts[step.j - 1] += 1;
        }
    }
    Ok(counts)
}

/// Outcome of the per-prefix structural checks on a schedule.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub prefixes_checked: usize,
    pub row_stochastic: bool,
    pub diagonal_bound: bool,
    pub positive_column_sums: bool,
    pub rank_dichotomy: bool,
    pub failures: Vec<String>,
}

impl InvariantReport {
    pub fn all_pass(&self) -> bool {
        self.row_stochastic
            && self.diagonal_bound
            && self.positive_column_sums
            && self.rank_dichotomy
    }
}

/// Checks every prefix product `Psi_h`, `h = 0..=T`, for unit row sums,
/// `[Psi_h]_ii >= 2^-s_i(h)`, positive column sums, and that a
/// non-consensus product has rank at least two.
pub fn check_invariants(sched: &Schedule) -> InvariantReport {
    let mut report = InvariantReport {
        row_stochastic: true,
        diagonal_bound: true,
        positive_column_sums: true,
        rank_dichotomy: true,
        ..Default::default()
    };
    let n = sched.n();
    let mut counts = vec![0u64; n];
    let mut m = GossipMatrix::identity(n);
    for h in 0..=sched.len() {
        if h > 0 {
            let step = &sched.steps()[h - 1];
            m.left_apply(step);
            for (v, c) in counts.iter_mut().enumerate() {
                if step.is_active(v + 1) {
                    *c += 1;
                }
            }
        }
        report.prefixes_checked += 1;

        if !m.is_stochastic() {
            report.row_stochastic = false;
            report
                .failures
                .push(format!("prefix {h}: not row stochastic"));
        }
        for (v, &c) in counts.iter().enumerate() {
            if *m.get(v, v) < Dyadic::pow2_inv(c) {
                report.diagonal_bound = false;
                report.failures.push(format!(
                    "prefix {h}: diagonal of node {} below 2^-{c}",
                    v + 1
                ));
            }
        }
        if m.col_sums().iter().any(|s| !s.is_positive()) {
            report.positive_column_sums = false;
            report.failures.push(format!("prefix {h}: zero column sum"));
        }
        if is_consensus_matrix(&m).is_none() && (m.distinct_rows() < 2 || m.rank() < 2) {
            report.rank_dichotomy = false;
            report
                .failures
                .push(format!("prefix {h}: non-consensus product of rank < 2"));
        }
    }
    report
}
