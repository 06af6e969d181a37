//! Swap-based quantum gossip on `n` qubits, analysed through vectorization.
//!
//! The update `rho' = rho/2 + S rho S/2`, with `S` swapping two qubits, acts
//! on `vec(rho)` as `T = (I + S (x) S)/2`, a `4^n x 4^n` matrix that averages
//! each basis element `|q><p|` with its swap image. The components of the
//! union of these pairings are the orbits of the simultaneous permutation
//! action on `(q, p)`, and on each component the dynamics is an ordinary
//! symmetric gossip process.
//!
//! Qubit 1 is the most significant bit of a computational-basis index, and
//! `vec` stacks columns: `|q><p|` sits at index `q + p * 2^n`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{is_power_of_two, Dyadic, Rational};
use crate::error::{Error, Result};
use crate::gossip::{product, GossipMatrix, GossipStep, Schedule};
use crate::rank::rank_integer;
use crate::search::{nonconvergence_certificate, NonconvergenceCertificate};

/// Largest qubit count for simulation and explicit `T` matrices.
pub const MAX_QUBITS: usize = 3;
/// Largest qubit count for orbit and connectivity analysis.
pub const MAX_ORBIT_QUBITS: usize = 4;

fn check_qubits(n: usize, max: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::TooFewNodes { n, min: 1 });
    }
    if n > max {
        return Err(Error::TooManyQubits { n, max });
    }
    Ok(())
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    for v in [i, j] {
        if v == 0 || v > n {
            return Err(Error::IndexOutOfRange { index: v, n });
        }
    }
    if i == j {
        return Err(Error::SelfLoop(i));
    }
    Ok(())
}

/// Computational-basis index with the bits of qubits `i` and `j` exchanged.
fn swap_bits(x: usize, n: usize, i: usize, j: usize) -> usize {
    let (si, sj) = (n - i, n - j);
    let (bi, bj) = ((x >> si) & 1, (x >> sj) & 1);
    if bi == bj {
        x
    } else {
        x ^ (1 << si) ^ (1 << sj)
    }
}

/// `|q><p|` on `n` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisElement {
    pub n: usize,
    pub ket: usize,
    pub bra: usize,
}

impl BasisElement {
    pub fn from_index(n: usize, index: usize) -> Self {
        let dim = 1usize << n;
        BasisElement {
            n,
            ket: index % dim,
            bra: index / dim,
        }
    }

    /// Position in `vec(rho)`.
    pub fn index(&self) -> usize {
        self.ket + (self.bra << self.n)
    }

    pub fn swapped(&self, i: usize, j: usize) -> Self {
        BasisElement {
            n: self.n,
            ket: swap_bits(self.ket, self.n, i, j),
            bra: swap_bits(self.bra, self.n, i, j),
        }
    }

    /// Number of positions `t` with `(q_t, p_t)` equal to `00`, `01`, `10`,
    /// `11`. Two elements share an orbit exactly when these agree.
    pub fn joint_type(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for t in 0..self.n {
            let q = (self.ket >> t) & 1;
            let p = (self.bra >> t) & 1;
            counts[2 * q + p] += 1;
        }
        counts
    }
}

fn bit_string(x: usize, n: usize) -> String {
    (0..n)
        .map(|t| {
            if (x >> (n - 1 - t)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}><{}|",
            bit_string(self.ket, self.n),
            bit_string(self.bra, self.n)
        )
    }
}

impl Serialize for BasisElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitTable {
    pub n: usize,
    /// Orbit id of each vectorized index; ids are numbered in order of first
    /// appearance.
    pub orbit_of: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Joint type shared by the members of each orbit.
    pub types: Vec<[usize; 4]>,
    pub tau0: usize,
}

impl OrbitTable {
    /// Vectorized indices of each orbit, in increasing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.tau0];
        for (idx, &o) in self.orbit_of.iter().enumerate() {
            out[o].push(idx);
        }
        out
    }

    /// Sizes of the orbits meeting the sector `|0...0><p|`, by weight of `p`.
    pub fn diagonal_sector_sizes(&self) -> Vec<usize> {
        let dim = 1usize << self.n;
        let mut by_weight: BTreeMap<u32, usize> = BTreeMap::new();
        for p in 0..dim {
            let e = BasisElement {
                n: self.n,
                ket: 0,
                bra: p,
            };
            let o = self.orbit_of[e.index()];
            by_weight.insert(p.count_ones(), self.sizes[o]);
        }
        by_weight.into_values().collect()
    }
}

/// Orbits of the simultaneous qubit-permutation action on basis elements.
pub fn orbit_decompose(n: usize) -> Result<OrbitTable> {
    check_qubits(n, MAX_ORBIT_QUBITS)?;
    let total = 1usize << (2 * n);
    let mut ids: BTreeMap<[usize; 4], usize> = BTreeMap::new();
    let mut orbit_of = Vec::with_capacity(total);
    let mut sizes = Vec::new();
    let mut types = Vec::new();
    for idx in 0..total {
        let ty = BasisElement::from_index(n, idx).joint_type();
        let next = ids.len();
        let id = *ids.entry(ty).or_insert(next);
        if id == sizes.len() {
            sizes.push(0);
            types.push(ty);
        }
        sizes[id] += 1;
        orbit_of.push(id);
    }
    Ok(OrbitTable {
        n,
        orbit_of,
        tau0: sizes.len(),
        sizes,
        types,
    })
}

/// `C(n + 3, 3)`, the number of joint types on `n` qubits.
pub fn tau0_closed_form(n: usize) -> usize {
    (n + 3) * (n + 2) * (n + 1) / 6
}

/// Index pairs averaged by the swap of qubits `i` and `j`, smaller first.
pub fn swap_pairs(n: usize, i: usize, j: usize) -> Result<Vec<(usize, usize)>> {
    check_qubits(n, MAX_ORBIT_QUBITS)?;
    check_pair(n, i, j)?;
    let total = 1usize << (2 * n);
    Ok((0..total)
        .filter_map(|idx| {
            let img = BasisElement::from_index(n, idx).swapped(i, j).index();
            (idx < img).then_some((idx, img))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TMatrix {
    pub n: usize,
    pub swap: (usize, usize),
    pub matrix: GossipMatrix,
    /// One symmetric step per averaged pair; the steps touch disjoint nodes,
    /// so they commute and their product is `matrix`.
    pub schedule: Schedule,
}

/// `(I + S (x) S)/2` for the swap of qubits `i` and `j`.
pub fn build_t(n: usize, i: usize, j: usize) -> Result<TMatrix> {
    check_qubits(n, MAX_QUBITS)?;
    check_pair(n, i, j)?;
    let total = 1usize << (2 * n);
    let half = Dyadic::pow2_inv(1);
    let mut matrix = GossipMatrix::zeros(total);
    for idx in 0..total {
        let img = BasisElement::from_index(n, idx).swapped(i, j).index();
        let d = matrix.get(idx, idx) + &half;
        matrix.set(idx, idx, d);
        let o = matrix.get(idx, img) + &half;
        matrix.set(idx, img, o);
    }
    let steps = swap_pairs(n, i, j)?
        .into_iter()
        .map(|(a, b)| GossipStep::sym(a + 1, b + 1))
        .collect();
    Ok(TMatrix {
        n,
        swap: (i, j),
        matrix,
        schedule: Schedule::new(total, steps)?,
    })
}

/// Checks on one `T`: doubly stochastic with entries in `{0, 1/2, 1}`, its
/// schedule touches every index at most once, and the schedule's product is
/// `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TCheck {
    pub swap: (usize, usize),
    pub pairs: usize,
    pub fixed_points: usize,
    pub doubly_stochastic: bool,
    pub entries_in_range: bool,
    pub disjoint_steps: bool,
    pub product_matches: bool,
}

impl TCheck {
    pub fn all_pass(&self) -> bool {
        self.doubly_stochastic
            && self.entries_in_range
            && self.disjoint_steps
            && self.product_matches
    }
}

pub fn check_t(t: &TMatrix) -> TCheck {
    let total = t.matrix.n();
    let allowed = [Dyadic::zero(), Dyadic::pow2_inv(1), Dyadic::one()];
    let mut touched = vec![false; total];
    let mut disjoint = true;
    for s in t.schedule.steps() {
        for v in [s.i, s.j] {
            disjoint &= !std::mem::replace(&mut touched[v - 1], true);
        }
    }
    TCheck {
        swap: t.swap,
        pairs: t.schedule.len(),
        fixed_points: total - 2 * t.schedule.len(),
        doubly_stochastic: t.matrix.is_doubly_stochastic(),
        entries_in_range: t.matrix.entries().iter().all(|e| allowed.contains(e)),
        disjoint_steps: disjoint,
        product_matches: product(&t.schedule) == t.matrix,
    }
}

/// All qubit pairs `(i, j)` with `i < j`.
pub fn all_swaps(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push((i, j));
        }
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub n: usize,
    /// Components of the union over all swaps of the pairing graphs.
    pub components: usize,
    /// Component id per vectorized index, numbered by first appearance.
    pub component_of: Vec<usize>,
    /// Whether the components coincide with the orbits as sets.
    pub matches_orbits: bool,
}

/// Connected components of the union of the graphs induced by every swap,
/// found by union-find, and compared with the orbit partition.
pub fn connectivity(n: usize) -> Result<Connectivity> {
    check_qubits(n, MAX_ORBIT_QUBITS)?;
    let total = 1usize << (2 * n);
    let mut parent: Vec<usize> = (0..total).collect();
    for (i, j) in all_swaps(n) {
        for (a, b) in swap_pairs(n, i, j)? {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut component_of = Vec::with_capacity(total);
    for x in 0..total {
        let root = find(&mut parent, x);
        let next = ids.len();
        component_of.push(*ids.entry(root).or_insert(next));
    }
    // both labellings number classes by first appearance, so equal
    // partitions give equal label vectors
    let orbits = orbit_decompose(n)?;
    Ok(Connectivity {
        n,
        components: ids.len(),
        matches_orbits: component_of == orbits.orbit_of,
        component_of,
    })
}

/// Dimension of `{v : T v = v for every swap}`, as `4^n` minus the exact
/// rank of the stacked `2 (T - I)` blocks.
pub fn fixed_space_dimension(n: usize) -> Result<usize> {
    check_qubits(n, MAX_QUBITS)?;
    let total = 1usize << (2 * n);
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, j) in all_swaps(n) {
        for idx in 0..total {
            let img = BasisElement::from_index(n, idx).swapped(i, j).index();
            let mut row = vec![BigInt::from(0); total];
            if img != idx {
                row[idx] = BigInt::from(-1);
                row[img] = BigInt::from(1);
            }
            rows.push(row);
        }
    }
    Ok(total - rank_integer(rows))
}

/// Result of restricting every `T` to every orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub n: usize,
    pub components: usize,
    pub blocks_checked: usize,
    /// No `T` has a nonzero entry linking two different orbits.
    pub decoupled: bool,
    /// Every restricted block is a product of averagings on disjoint pairs
    /// of the component's nodes.
    pub blocks_are_gossip: bool,
}

/// Puts each `T` in block form along the orbits and checks every block is a
/// symmetric gossip matrix on the component.
pub fn block_decomposition(n: usize) -> Result<BlockReport> {
    check_qubits(n, MAX_QUBITS)?;
    let orbits = orbit_decompose(n)?;
    let members = orbits.members();
    let mut decoupled = true;
    let mut blocks_are_gossip = true;
    let mut blocks_checked = 0;
    for (i, j) in all_swaps(n) {
        let t = build_t(n, i, j)?;
        for (r, c, v) in (0..t.matrix.n())
            .flat_map(|r| (0..t.matrix.n()).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, t.matrix.get(r, c)))
        {
            if !v.is_zero() && orbits.orbit_of[r] != orbits.orbit_of[c] {
                decoupled = false;
            }
        }
        for idx in &members {
            let block = t.matrix.restrict(idx);
            blocks_checked += 1;
            blocks_are_gossip &= is_disjoint_averaging(&block);
        }
    }
    Ok(BlockReport {
        n,
        components: orbits.tau0,
        blocks_checked,
        decoupled,
        blocks_are_gossip,
    })
}

/// Whether `m` equals the product of symmetric averagings on pairwise
/// disjoint pairs: each row is either a unit row or half on itself and half
/// on a partner whose row mirrors it.
fn is_disjoint_averaging(m: &GossipMatrix) -> bool {
    let n = m.n();
    let half = Dyadic::pow2_inv(1);
    let mut steps = Vec::new();
    for r in 0..n {
        let nonzero: Vec<usize> = (0..n).filter(|&c| !m.get(r, c).is_zero()).collect();
        match nonzero.as_slice() {
            [c] if *c == r && *m.get(r, r) == Dyadic::one() => {}
            [a, b] if (*a == r || *b == r) && *m.get(r, *a) == half && *m.get(r, *b) == half => {
                let partner = if *a == r { *b } else { *a };
                if r < partner {
                    steps.push(GossipStep::sym(r + 1, partner + 1));
                }
            }
            _ => return false,
        }
    }
    Schedule::new(n, steps).is_ok_and(|s| product(&s) == *m)
}

/// `rho` on `n` qubits with complex entries as `(re, im)` pairs, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuantumState {
    n: usize,
    entries: Vec<(Rational, Rational)>,
}

impl QuantumState {
    /// Checks shape, Hermiticity and unit trace.
    pub fn new(n: usize, entries: Vec<(Rational, Rational)>) -> Result<Self> {
        check_qubits(n, MAX_QUBITS)?;
        let dim = 1usize << n;
        if entries.len() != dim * dim {
            return Err(Error::MalformedState(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for a in 0..dim {
            for b in 0..dim {
                let (re, im) = &entries[a * dim + b];
                let (re_t, im_t) = &entries[b * dim + a];
                if re != re_t || *im != -im_t.clone() {
                    return Err(Error::MalformedState(format!(
                        "not Hermitian at ({}, {})",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        let trace: Rational = (0..dim).map(|a| entries[a * dim + a].0.clone()).sum();
        if trace != Rational::one() {
            return Err(Error::MalformedState(format!("trace is {trace}, not 1")));
        }
        Ok(QuantumState { n, entries })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n, MAX_QUBITS)?;
        let dim = 1usize << n;
        let w = Rational::new(1, dim as i64)?;
        let entries = (0..dim * dim)
            .map(|k| {
                let re = if k / dim == k % dim {
                    w.clone()
                } else {
                    Rational::zero()
                };
                (re, Rational::zero())
            })
            .collect();
        Ok(QuantumState { n, entries })
    }

    /// The projector `|q><q|` for a computational basis index `q`.
    pub fn basis_projector(n: usize, q: usize) -> Result<Self> {
        check_qubits(n, MAX_QUBITS)?;
        let dim = 1usize << n;
        if q >= dim {
            return Err(Error::MalformedState(format!(
                "basis index {q} out of range"
            )));
        }
        let mut entries = vec![(Rational::zero(), Rational::zero()); dim * dim];
        entries[q * dim + q].0 = Rational::one();
        Ok(QuantumState { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Entry `(a, b)`, 0-based.
    pub fn get(&self, a: usize, b: usize) -> &(Rational, Rational) {
        &self.entries[a * self.dim() + b]
    }

    pub fn entries(&self) -> &[(Rational, Rational)] {
        &self.entries
    }

    pub fn trace(&self) -> Rational {
        (0..self.dim()).map(|a| self.get(a, a).0.clone()).sum()
    }

    pub fn is_hermitian(&self) -> bool {
        let dim = self.dim();
        (0..dim).all(|a| {
            (0..dim).all(|b| {
                let (re, im) = self.get(a, b);
                let (re_t, im_t) = self.get(b, a);
                re == re_t && *im == -im_t.clone()
            })
        })
    }

    /// Real and imaginary parts of `vec(rho)`.
    pub fn vectorize(&self) -> (Vec<Rational>, Vec<Rational>) {
        let dim = self.dim();
        let mut re = Vec::with_capacity(dim * dim);
        let mut im = Vec::with_capacity(dim * dim);
        for idx in 0..dim * dim {
            let e = BasisElement::from_index(self.n, idx);
            let (r, i) = self.get(e.ket, e.bra);
            re.push(r.clone());
            im.push(i.clone());
        }
        (re, im)
    }

    fn from_vectorized(n: usize, re: Vec<Rational>, im: Vec<Rational>) -> Self {
        let dim = 1usize << n;
        let mut entries = vec![(Rational::zero(), Rational::zero()); dim * dim];
        for (idx, (r, i)) in re.into_iter().zip(im).enumerate() {
            let e = BasisElement::from_index(n, idx);
            entries[e.ket * dim + e.bra] = (r, i);
        }
        QuantumState { n, entries }
    }

    /// `rho/2 + S rho S/2` for the swap of qubits `i` and `j`.
    pub fn swap_average(&self, i: usize, j: usize) -> Result<Self> {
        check_pair(self.n, i, j)?;
        let dim = self.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let (re, im) = self.get(a, b);
                let (re_s, im_s) = self.get(swap_bits(a, self.n, i, j), swap_bits(b, self.n, i, j));
                entries.push((re.average(re_s), im.average(im_s)));
            }
        }
        Ok(QuantumState { n: self.n, entries })
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dim = self.dim();
        for a in 0..dim {
            let row: Vec<String> = (0..dim)
                .map(|b| {
                    let (re, im) = self.get(a, b);
                    if im.is_zero() {
                        re.to_string()
                    } else {
                        format!("{re}+{im}i")
                    }
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Parses `mixed`, `|q><q|` or `diag:|q><q|` on `q.len()` qubits, where `q`
/// is a bit string.
pub fn parse_state_literal(n: usize, text: &str) -> Result<QuantumState> {
    let body = text.trim();
    if body == "mixed" {
        return QuantumState::maximally_mixed(n);
    }
    let body = body.strip_prefix("diag:").unwrap_or(body);
    let bad = || Error::MalformedState(format!("unrecognised state literal `{text}`"));
    let inner = body
        .strip_prefix('|')
        .and_then(|s| s.strip_suffix('|'))
        .ok_or_else(bad)?;
    let (ket, bra) = inner.split_once("><").ok_or_else(bad)?;
    if ket != bra {
        return Err(Error::MalformedState(format!(
            "|{ket}><{bra}| is not Hermitian; only projectors |q><q| are accepted"
        )));
    }
    if ket.len() != n || !ket.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::MalformedState(format!(
            "`{ket}` is not a bit string of length {n}"
        )));
    }
    let q = usize::from_str_radix(ket, 2).map_err(|_| bad())?;
    QuantumState::basis_projector(n, q)
}

impl FromStr for QuantumState {
    type Err = Error;

    /// Qubit count taken from the bit string; `mixed` alone is ambiguous and
    /// rejected.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().strip_prefix("diag:").unwrap_or(s.trim());
        let n = body
            .strip_prefix('|')
            .and_then(|b| b.split_once("><"))
            .map(|(k, _)| k.len())
            .ok_or_else(|| Error::MalformedState(format!("cannot infer qubit count from `{s}`")))?;
        parse_state_literal(n, s)
    }
}

/// Swap list file: one `i j` pair per line, `#` comments.
pub fn parse_swaps(text: &str, n: usize) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let [a, b] = toks.as_slice() else {
            return Err(Error::Parse {
                line,
                message: format!("expected two qubit indices, got `{body}`"),
            });
        };
        let parse = |t: &str| {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("bad qubit index `{t}`"),
            })
        };
        let (i, j) = (parse(a)?, parse(b)?);
        check_pair(n, i, j).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push((i, j));
    }
    Ok(out)
}

/// Runs the swap updates directly on the density matrix.
pub fn quantum_simulate(
    n: usize,
    swaps: &[(usize, usize)],
    rho0: &QuantumState,
) -> Result<QuantumState> {
    if rho0.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho0.n(),
        });
    }
    let mut rho = rho0.clone();
    for &(i, j) in swaps {
        rho = rho.swap_average(i, j)?;
    }
    Ok(rho)
}

/// Runs the same updates as `vec(rho) <- T vec(rho)`, real and imaginary
/// parts separately.
pub fn vectorized_simulate(
    n: usize,
    swaps: &[(usize, usize)],
    rho0: &QuantumState,
) -> Result<QuantumState> {
    if rho0.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho0.n(),
        });
    }
    let mut cache: BTreeMap<(usize, usize), GossipMatrix> = BTreeMap::new();
    let (mut re, mut im) = rho0.vectorize();
    for &(i, j) in swaps {
        let key = (i.min(j), i.max(j));
        let t = match cache.entry(key) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(build_t(n, key.0, key.1)?.matrix)
            }
        };
        re = t.mul_vec(&re);
        im = t.mul_vec(&im);
    }
    Ok(QuantumState::from_vectorized(n, re, im))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImpossibilityReport {
    pub n: usize,
    /// `C(n, 0), ..., C(n, n)`.
    pub binomials: Vec<u64>,
    /// Orbit sizes in the sector `|0...0><p|` read off the orbit table, when
    /// `n` is small enough to build it.
    pub sector_sizes: Option<Vec<usize>>,
    /// Sizes that are not powers of two.
    pub flagged: Vec<u64>,
    /// Some component runs a classical symmetric gossip process on a number
    /// of nodes that is not a power of two, so no finite schedule reaches
    /// consensus on it.
    pub impossible: bool,
    /// Exhaustive and arithmetic confirmation on the smallest flagged size.
    pub confirmation: Option<NonconvergenceCertificate>,
}

pub fn binomial_row(n: usize) -> Vec<u64> {
    let mut row = vec![1u64];
    for k in 1..=n as u64 {
        let prev = *row.last().expect("nonempty");
        row.push(prev * (n as u64 + 1 - k) / k);
    }
    row
}

/// Component sizes of the diagonal sector and whether any rules out
/// finite-time convergence; `confirm_depth` additionally runs the
/// nonconvergence certificate on the smallest flagged size.
pub fn impossibility_report(n: usize, confirm_depth: Option<u64>) -> Result<ImpossibilityReport> {
    if n == 0 {
        return Err(Error::TooFewNodes { n, min: 1 });
    }
    let binomials = binomial_row(n);
    let sector_sizes = if n <= MAX_ORBIT_QUBITS {
        Some(orbit_decompose(n)?.diagonal_sector_sizes())
    } else {
        None
    };
    let flagged: Vec<u64> = {
        let mut f: Vec<u64> = binomials
            .iter()
            .copied()
            .filter(|&b| !is_power_of_two(b as u128))
            .collect();
        f.sort_unstable();
        f.dedup();
        f
    };
    let confirmation = match (confirm_depth, flagged.first()) {
        (Some(depth), Some(&k)) => Some(nonconvergence_certificate(k as usize, depth)?),
        _ => None,
    };
    Ok(ImpossibilityReport {
        n,
        binomials,
        sector_sizes,
        impossible: !flagged.is_empty(),
        flagged,
        confirmation,
    })
}
