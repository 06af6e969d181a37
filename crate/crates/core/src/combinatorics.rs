//! Dyadic decompositions of one and the least total of `chi` over them.
//!
//! A composition `f = (f_1, ..., f_n)` has positive dyadic parts summing to
//! one. Writing `n = 2^m + r` with `0 <= r < 2^m`, the least value of
//! `sum_i chi(f_i)` is `mn + 2r`, which is also the least node-update cost of
//! any schedule reaching consensus: the diagonal of a consensus product is
//! such a composition, and node `i` must be active at least `chi(f_i)` times.

use serde::Serialize;

use crate::arith::{chi, split_pow2, Dyadic};
use crate::error::{Error, Result};
use crate::gossip::{active_counts, is_consensus_matrix, node_update_cost, product, Schedule};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicComposition {
    parts: Vec<Dyadic>,
}

impl DyadicComposition {
    /// Checks that every part lies in `(0, 1]` and that the parts sum to one.
    pub fn new(parts: Vec<Dyadic>) -> Result<Self> {
        for p in &parts {
            chi(p)?;
        }
        let total: Dyadic = parts.iter().sum();
        if total != Dyadic::one() {
            return Err(Error::BadNumber(format!("parts sum to {total}, not 1")));
        }
        Ok(DyadicComposition { parts })
    }

    fn from_integer_parts(parts: &[u64], exp: u64) -> Self {
        DyadicComposition {
            parts: parts.iter().map(|&a| Dyadic::new(a, exp)).collect(),
        }
    }

    pub fn parts(&self) -> &[Dyadic] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest exponent among the parts.
    pub fn zeta(&self) -> u64 {
        self.parts.iter().map(Dyadic::exp).max().unwrap_or(0)
    }

    pub fn chi_values(&self) -> Vec<u64> {
        self.parts
            .iter()
            .map(|p| chi(p).expect("parts lie in (0, 1]"))
            .collect()
    }

    pub fn chi_sum(&self) -> u64 {
        self.chi_values().iter().sum()
    }

    /// Parts in decreasing order.
    pub fn sorted(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.sort_by(|a, b| b.cmp(a));
        DyadicComposition { parts }
    }

    pub fn structure(&self) -> OptimizerStructure {
        let zeta = self.zeta();
        OptimizerStructure {
            zeta,
            numerators_one: self.parts.iter().all(|p| *p.num() == 1.into()),
            max_exp_gap: self.parts.iter().map(|p| zeta - p.exp()).max().unwrap_or(0),
            top_exp_count: self.parts.iter().filter(|p| p.exp() == zeta).count(),
        }
    }
}

/// Shape of a composition: the quantities the optimality argument pins down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OptimizerStructure {
    pub zeta: u64,
    pub numerators_one: bool,
    /// `max_i (zeta - c_i)`.
    pub max_exp_gap: u64,
    /// Number of parts whose exponent equals `zeta`.
    pub top_exp_count: usize,
}

impl OptimizerStructure {
    /// Shape every optimizer must have for `n = 2^m + r`: numerators one,
    /// exponents `zeta` and `zeta - 1` only, with `zeta = m + 1` and `2r`
    /// parts at the top exponent when `r > 0`, and all `n` parts equal to
    /// `1/2^m` when `r = 0`.
    pub fn expected(n: usize) -> Self {
        let (m, r) = split_pow2(n);
        if r == 0 {
            OptimizerStructure {
                zeta: m as u64,
                numerators_one: true,
                max_exp_gap: 0,
                top_exp_count: n,
            }
        } else {
            OptimizerStructure {
                zeta: m as u64 + 1,
                numerators_one: true,
                max_exp_gap: 1,
                top_exp_count: 2 * r,
            }
        }
    }
}

/// Ordered compositions of `total` into `n` positive integers, in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct Compositions {
    parts: Vec<u64>,
    done: bool,
}

impl Compositions {
    pub fn new(total: u64, n: usize) -> Self {
        if n == 0 || total < n as u64 {
            return Compositions {
                parts: Vec::new(),
                done: true,
            };
        }
        let mut parts = vec![1u64; n];
        parts[n - 1] = total - (n as u64 - 1);
        Compositions { parts, done: false }
    }

    fn advance(&mut self) {
        let n = self.parts.len();
        let mut rest = self.parts[n - 1];
        for k in (0..n.saturating_sub(1)).rev() {
            let tail = (n - 1 - k) as u64;
            if rest > tail {
                self.parts[k] += 1;
                for p in &mut self.parts[k + 1..n - 1] {
                    *p = 1;
                }
                self.parts[n - 1] = rest - 1 - (tail - 1);
                return;
            }
            rest += self.parts[k];
        }
        self.done = true;
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let out = self.parts.clone();
        self.advance();
        Some(out)
    }
}

/// Every composition of one into `n` dyadic parts with all exponents at
/// most `max_exp`, each listed once.
pub fn enumerate_f(n: usize, max_exp: u32) -> impl Iterator<Item = DyadicComposition> {
    Compositions::new(1u64 << max_exp, n)
        .map(move |parts| DyadicComposition::from_integer_parts(&parts, max_exp as u64))
}

fn chi_of_part(a: u64, exp: u32) -> u64 {
    (exp - a.ilog2()) as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinChi {
    pub n: usize,
    pub m: u32,
    pub r: usize,
    pub max_exp: u32,
    pub value: u64,
    /// First optimizer in enumeration order, parts sorted decreasingly.
    pub witness: DyadicComposition,
    pub optimizers: Vec<DyadicComposition>,
    pub compositions_examined: u64,
}

impl MinChi {
    /// `mn + 2r`.
    pub fn closed_form(&self) -> u64 {
        self.m as u64 * self.n as u64 + 2 * self.r as u64
    }

    /// Whether every optimizer has the shape given by
    /// [`OptimizerStructure::expected`].
    pub fn optimizers_have_expected_structure(&self) -> bool {
        let want = OptimizerStructure::expected(self.n);
        self.optimizers.iter().all(|f| f.structure() == want)
    }
}

/// Least `sum chi(f_i)` over compositions with exponents at most `m + 1`.
pub fn min_chi(n: usize) -> Result<MinChi> {
    if n == 0 {
        return Err(Error::TooFewNodes { n, min: 1 });
    }
    let (m, _) = split_pow2(n);
    min_chi_with_exp(n, m + 1)
}

/// Least `sum chi(f_i)` over compositions with exponents at most `max_exp`,
/// with every composition attaining it.
pub fn min_chi_with_exp(n: usize, max_exp: u32) -> Result<MinChi> {
    if n == 0 {
        return Err(Error::TooFewNodes { n, min: 1 });
    }
    if max_exp > 62 {
        return Err(Error::DepthTooLarge(max_exp as u64));
    }
    let (m, r) = split_pow2(n);
    let mut best: Option<u64> = None;
    let mut winners: Vec<Vec<u64>> = Vec::new();
    let mut examined = 0u64;
    for parts in Compositions::new(1u64 << max_exp, n) {
        examined += 1;
        let total: u64 = parts.iter().map(|&a| chi_of_part(a, max_exp)).sum();
        match best {
            Some(b) if total > b => {}
            Some(b) if total == b => winners.push(parts),
            _ => {
                best = Some(total);
                winners.clear();
                winners.push(parts);
            }
        }
    }
    let Some(value) = best else {
        return Err(Error::TooFewNodes {
            n: 1usize << max_exp,
            min: n,
        });
    };
    let optimizers: Vec<DyadicComposition> = winners
        .iter()
        .map(|p| DyadicComposition::from_integer_parts(p, max_exp as u64))
        .collect();
    Ok(MinChi {
        n,
        m,
        r,
        max_exp,
        value,
        witness: optimizers[0].sorted(),
        optimizers,
        compositions_examined: examined,
    })
}

/// How the diagonal of a consensus product bounds the cost of its schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundLink {
    pub n: usize,
    pub diagonal: Vec<Dyadic>,
    pub diagonal_is_composition: bool,
    pub chi: Vec<u64>,
    pub active: Vec<u64>,
    /// `active[i] >= chi[i]` for every node.
    pub per_node_bound: bool,
    pub chi_sum: u64,
    pub cost: u64,
    /// `mn + 2r`.
    pub optimum: u64,
    /// `cost >= chi_sum >= optimum`.
    pub chain_holds: bool,
}

pub fn lower_bound_link(sched: &Schedule) -> Result<LowerBoundLink> {
    let n = sched.n();
    let psi = product(sched);
    if is_consensus_matrix(&psi).is_none() {
        return Err(Error::NotConsensus);
    }
    let diagonal = psi.diagonal();
    let comp = DyadicComposition::new(diagonal.clone());
    let diagonal_is_composition = comp.is_ok();
    let chi: Vec<u64> = diagonal
        .iter()
        .map(|d| chi(d).unwrap_or(u64::MAX))
        .collect();
    let active = active_counts(sched, sched.len())?;
    let per_node_bound = active.iter().zip(&chi).all(|(s, c)| s >= c);
    let chi_sum = chi.iter().fold(0u64, |acc, &c| acc.saturating_add(c));
    let cost = node_update_cost(sched);
    let (m, r) = split_pow2(n);
    let optimum = m as u64 * n as u64 + 2 * r as u64;
    Ok(LowerBoundLink {
        n,
        diagonal,
        diagonal_is_composition,
        chi,
        active,
        per_node_bound,
        chi_sum,
        cost,
        optimum,
        chain_holds: diagonal_is_composition
            && per_node_bound
            && cost >= chi_sum
            && chi_sum >= optimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;
    use crate::gossip::GossipStep;
    use crate::schedules::{build_asymmetric, build_hypercube};

    fn d(num: i64, exp: u64) -> Dyadic {
        Dyadic::new(num, exp)
    }

    fn binom(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    // least sum of chi over nonincreasing part lists, built with rational
    // arithmetic and no fixed denominator
    fn oracle_min_chi(n: usize, max_exp: u64) -> u64 {
        fn go(left: usize, remaining: Rational, cap: u64, max_exp: u64, acc: u64, best: &mut u64) {
            if left == 0 {
                if remaining.is_zero() && acc < *best {
                    *best = acc;
                }
                return;
            }
            for e in 0..=max_exp {
                for num in (1..(1u64 << e))
                    .step_by(2)
                    .chain(if e == 0 { Some(1) } else { None })
                {
                    let part = Rational::new(num, 1u64 << e).unwrap();
                    let key = (num as u128) << (max_exp - e);
                    if key as u64 > cap {
                        continue;
                    }
                    let rest = &remaining - &part;
                    if rest.numer() < &0.into() {
                        continue;
                    }
                    let c = chi(&part.to_dyadic().unwrap()).unwrap();
                    go(left - 1, rest, key as u64, max_exp, acc + c, best);
                }
            }
        }
        let mut best = u64::MAX;
        go(n, Rational::one(), u64::MAX, max_exp, 0, &mut best);
        best
    }

    #[test]
    fn composition_counts() {
        for (total, n) in [(4u64, 3usize), (8, 3), (16, 5), (5, 5), (3, 4), (1, 1)] {
            let expected = if total < n as u64 {
                0
            } else {
                binom(total - 1, n as u64 - 1)
            };
            assert_eq!(
                Compositions::new(total, n).count() as u64,
                expected,
                "{total} {n}"
            );
        }
        let all: Vec<_> = Compositions::new(4, 3).collect();
        assert_eq!(all, vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]);
    }

    #[test]
    fn enumerate_examples() {
        let two: Vec<_> = enumerate_f(2, 1).collect();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].parts(), &[d(1, 1), d(1, 1)]);
        let one: Vec<_> = enumerate_f(1, 0).collect();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].parts(), &[Dyadic::one()]);
        let three: Vec<_> = enumerate_f(3, 2).collect();
        assert_eq!(three.len(), 3);
        for f in &three {
            assert_eq!(f.sorted().parts(), &[d(1, 1), d(1, 2), d(1, 2)]);
        }
    }

    #[test]
    fn enumerated_parts_are_valid() {
        for n in 1..=5 {
            for e in 0..=4 {
                let mut seen = std::collections::HashSet::new();
                for f in enumerate_f(n, e) {
                    assert!(DyadicComposition::new(f.parts().to_vec()).is_ok());
                    for p in f.parts() {
                        assert!(p.num() % 2u8 == 1.into() || *p == Dyadic::one());
                    }
                    assert!(seen.insert(f));
                }
            }
        }
    }

    #[test]
    fn min_chi_examples() {
        let r = min_chi(4).unwrap();
        assert_eq!(r.value, 8);
        assert_eq!(r.witness.parts(), vec![d(1, 2); 4].as_slice());
        let r = min_chi(3).unwrap();
        assert_eq!(r.value, 5);
        assert_eq!(r.witness.parts(), &[d(1, 1), d(1, 2), d(1, 2)]);
        let r = min_chi(6).unwrap();
        assert_eq!(r.value, 16);
        assert_eq!(
            r.witness.parts(),
            &[d(1, 2), d(1, 2), d(1, 3), d(1, 3), d(1, 3), d(1, 3)]
        );
    }

    #[test]
    fn min_chi_matches_oracle() {
        for n in 1..=7 {
            let (m, _) = split_pow2(n);
            assert_eq!(
                min_chi(n).unwrap().value,
                oracle_min_chi(n, m as u64 + 1),
                "n={n}"
            );
        }
    }

    #[test]
    fn min_chi_closed_form_and_structure() {
        for n in 1..=8 {
            let r = min_chi(n).unwrap();
            assert_eq!(r.value, r.closed_form(), "n={n}");
            assert!(r.optimizers_have_expected_structure(), "n={n}");
            let slack = min_chi_with_exp(n, r.max_exp + 1).unwrap();
            assert_eq!(slack.value, r.value);
            let a: std::collections::HashSet<_> = r.optimizers.iter().cloned().collect();
            let b: std::collections::HashSet<_> = slack.optimizers.iter().cloned().collect();
            assert_eq!(a, b, "n={n}");
        }
    }

    #[test]
    fn expected_structure() {
        let s = OptimizerStructure::expected(5);
        assert_eq!((s.zeta, s.top_exp_count, s.max_exp_gap), (3, 2, 1));
        let s = OptimizerStructure::expected(8);
        assert_eq!((s.zeta, s.top_exp_count, s.max_exp_gap), (3, 8, 0));
    }

    #[test]
    fn composition_rejects_bad_parts() {
        assert!(DyadicComposition::new(vec![d(1, 1), d(1, 2)]).is_err());
        assert!(DyadicComposition::new(vec![Dyadic::one(), Dyadic::zero()]).is_err());
        assert!(DyadicComposition::new(vec![d(3, 1), d(-1, 1)]).is_err());
    }

    #[test]
    fn link_for_built_schedules() {
        let l = lower_bound_link(&build_hypercube(2)).unwrap();
        assert_eq!(l.diagonal, vec![d(1, 2); 4]);
        assert_eq!((l.chi_sum, l.cost, l.optimum), (8, 8, 8));
        assert!(l.chain_holds);

        let l = lower_bound_link(&build_asymmetric(3)).unwrap();
        assert_eq!(l.diagonal, vec![d(1, 2), d(1, 1), d(1, 2)]);
        assert_eq!(l.chi, vec![2, 1, 2]);
        assert_eq!(l.active, vec![2, 1, 2]);
        assert_eq!((l.chi_sum, l.cost), (5, 5));
        assert!(l.chain_holds);

        for n in 1..=12 {
            let l = lower_bound_link(&build_asymmetric(n)).unwrap();
            assert!(l.chain_holds, "n={n}");
            assert_eq!(l.cost, l.optimum);
        }
    }

    #[test]
    fn link_with_extra_steps() {
        let mut s = build_hypercube(2);
        s.push(GossipStep::sym(1, 2)).unwrap();
        let l = lower_bound_link(&s).unwrap();
        assert!(l.chain_holds);
        assert!(l.cost > l.chi_sum);
    }

    #[test]
    fn link_rejects_non_consensus() {
        let s = Schedule::new(3, vec![GossipStep::sym(1, 2)]).unwrap();
        assert_eq!(lower_bound_link(&s).unwrap_err(), Error::NotConsensus);
    }
}
