use gossip_core::combinatorics::lower_bound_link;
use gossip_core::io::{parse_schedule, parse_state, write_schedule, write_state};
use gossip_core::schedules::hypercube_stages;
use gossip_core::{
    apply_step, build_asymmetric, build_hypercube, check_invariants, chi, min_updates, product,
    GossipStep, NetworkState, Rational, Schedule, SearchMode,
};
use proptest::prelude::*;

fn step(n: usize, sym: bool) -> impl Strategy<Value = GossipStep> {
    (1..=n, 1..n).prop_map(move |(i, d)| {
        let j = (i - 1 + d) % n + 1;
        if sym {
            GossipStep::sym(i, j)
        } else {
            GossipStep::asym(i, j)
        }
    })
}

fn schedule(max_n: usize, max_len: usize) -> impl Strategy<Value = Schedule> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((step(n, true), step(n, false), any::<bool>()), 0..=max_len).prop_map(
            move |v| {
                let steps = v
                    .into_iter()
                    .map(|(s, a, pick)| if pick { s } else { a })
                    .collect();
                Schedule::new(n, steps).unwrap()
            },
        )
    })
}

fn sym_schedule(max_n: usize, max_len: usize) -> impl Strategy<Value = Schedule> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(step(n, true), 0..=max_len)
            .prop_map(move |steps| Schedule::new(n, steps).unwrap())
    })
}

fn state(n: usize) -> impl Strategy<Value = NetworkState> {
    prop::collection::vec((-50i64..50, 1i64..9), n).prop_map(|v| {
        NetworkState::new(
            v.into_iter()
                .map(|(p, q)| Rational::new(p, q).unwrap())
                .collect(),
        )
    })
}

fn with_state(
    s: impl Strategy<Value = Schedule>,
) -> impl Strategy<Value = (Schedule, NetworkState)> {
    s.prop_flat_map(|s| {
        let n = s.n();
        (Just(s), state(n))
    })
}

proptest! {
    #[test]
    fn product_matches_iterated_steps((s, x) in with_state(schedule(7, 20))) {
        let mut y = x.clone();
        for st in s.steps() {
            y = apply_step(&y, st).unwrap();
        }
        prop_assert_eq!(product(&s).mul_vec(x.values()), y.values().to_vec());
    }

    #[test]
    fn symmetric_schedules_are_doubly_stochastic((s, x) in with_state(sym_schedule(7, 20))) {
        let psi = product(&s);
        prop_assert!(psi.is_doubly_stochastic());
        let y = NetworkState::new(psi.mul_vec(x.values()));
        prop_assert_eq!(y.average(), x.average());
    }

    #[test]
    fn products_satisfy_prefix_invariants(s in schedule(6, 16)) {
        let rep = check_invariants(&s);
        prop_assert!(rep.all_pass(), "{:?}", rep.failures);
        prop_assert!(product(&s).is_stochastic());
    }

    #[test]
    fn entries_of_products_are_dyadic_with_bounded_exponent(s in schedule(6, 16)) {
        let psi = product(&s);
        for e in psi.entries() {
            if let Ok(c) = chi(e) {
                prop_assert!(c <= s.len() as u64);
            }
        }
    }

    #[test]
    fn schedule_text_round_trips(s in schedule(9, 25)) {
        let back = parse_schedule(&write_schedule(&s)).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn state_text_round_trips(x in (1usize..10).prop_flat_map(state)) {
        prop_assert_eq!(parse_state(&write_state(&x)).unwrap(), x);
    }

    #[test]
    fn hypercube_leaves_at_most_2_pow_m_minus_k_values(
        m in 1u32..=4,
        raw in prop::collection::vec(-100i64..100, 16),
    ) {
        let n = 1usize << m;
        let mut x = NetworkState::from_integers(&raw[..n]);
        for (k, stage) in hypercube_stages(m).iter().enumerate() {
            for st in &stage.steps {
                x = apply_step(&x, st).unwrap();
            }
            prop_assert!(x.distinct_values() <= 1 << (m as usize - k - 1));
        }
        prop_assert!(x.is_consensus());
    }

    #[test]
    fn hypercube_stage_order_is_irrelevant(m in 1u32..=4, rot in 0usize..4) {
        let mut stages = hypercube_stages(m);
        let k = stages.len();
        stages.rotate_left(rot % k);
        let steps: Vec<GossipStep> = stages.into_iter().flat_map(|s| s.steps).collect();
        let s = Schedule::new(1 << m, steps).unwrap();
        prop_assert_eq!(product(&s), product(&build_hypercube(m)));
    }

    #[test]
    fn mixed_schedule_averages_with_consensus_row(x in (1usize..=20).prop_flat_map(state)) {
        let n = x.len();
        let s = build_asymmetric(n);
        let psi = product(&s);
        let y = NetworkState::new(psi.mul_vec(x.values()));
        prop_assert!(y.is_consensus());
        let beta = psi.row(0);
        let want = beta
            .iter()
            .zip(x.values())
            .fold(Rational::from_integer(0), |acc, (b, v)| acc + Rational::from(b.clone()) * v.clone());
        prop_assert_eq!(y.values()[0].clone(), want);
    }
}

#[test]
fn lower_bound_link_holds_for_built_schedules() {
    for n in 1..=12usize {
        let link = lower_bound_link(&build_asymmetric(n)).unwrap();
        assert!(link.diagonal_is_composition, "n={n}");
        assert!(link.per_node_bound, "n={n}");
        assert!(link.chi_sum <= link.cost, "n={n}");
        assert!(link.cost >= link.optimum, "n={n}");
    }
}

#[test]
fn search_is_deterministic() {
    for (n, mode) in [
        (3, SearchMode::SymAndAsym),
        (4, SearchMode::SymOnly),
        (4, SearchMode::SymAndAsym),
    ] {
        let a = min_updates(n, mode, 16).unwrap();
        let b = min_updates(n, mode, 16).unwrap();
        assert_eq!(a, b);
    }
}
