use collab_walk::experiments::{verify_one_vs_many, verify_star_vs_iid, GAP_TOL};
use collab_walk::scheme::{normalize, uniform, Coupling};
use collab_walk::simulate::{sample_union, WalkJob};
use collab_walk::survival::{
    brute_force_oracle, expected_union, expected_union_coupled, expected_union_product, spectral, survival,
};
use collab_walk::{Network, StartScheme, TransitionKernel, Variant};
use proptest::prelude::*;

/// Connected weighted graph: a random spanning tree plus random chords.
fn network(max_n: usize) -> impl Strategy<Value = Network> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|v| (0..v).boxed()).collect();
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                parents,
                prop::collection::vec(any::<bool>(), pairs),
                prop::collection::vec(0.25f64..4.0, pairs),
            )
        })
        .prop_map(|(n, parents, chords, weights)| {
            let mut edges = Vec::new();
            let mut slot = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if parents[v - 1] == u || chords[slot] {
                        edges.push((u, v, weights[slot]));
                    }
                    slot += 1;
                }
            }
            Network::build(n, edges).expect("spanning tree keeps the graph connected")
        })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Plain), Just(Variant::Lazy), Just(Variant::ContinuousTime)]
}

fn probability(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_map(|w| {
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            normalize(&w).unwrap()
        } else {
            uniform(w.len())
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_are_reversible_and_stochastic(net in network(8), v in variant()) {
        let k = TransitionKernel::with_variant(&net, v);
        prop_assert!(k.detailed_balance_residual() < 1e-12);
        prop_assert!(k.row_sum_residual() < 1e-12);
        prop_assert!(k.stationarity_residual() < 1e-12);
    }

    #[test]
    fn survival_is_a_nonincreasing_probability(net in network(7), v in variant(), y_seed in any::<usize>()) {
        let k = TransitionKernel::with_variant(&net, v);
        let y = y_seed % net.vertex_count();
        let mut previous = 1.0;
        for t in 0..15 {
            let s = survival(&k, k.pi(), y, t as f64).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
            prop_assert!(s <= previous + 1e-12);
            previous = s;
        }
    }

    #[test]
    fn spectral_matches_power(net in network(7), lazy in any::<bool>(), y_seed in any::<usize>()) {
        let v = if lazy { Variant::Lazy } else { Variant::Plain };
        let k = TransitionKernel::with_variant(&net, v);
        let y = y_seed % net.vertex_count();
        let d = spectral(&k, y).unwrap();
        prop_assert!((d.alpha_sum() - (1.0 - k.pi()[y])).abs() < 1e-9);
        for t in [0u32, 1, 2, 5, 13, 30] {
            let a = d.survival(t as f64).unwrap();
            let b = survival(&k, k.pi(), y, t as f64).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "t={} spectral {} power {}", t, a, b);
        }
    }

    #[test]
    fn union_size_is_bounded_and_monotone(
        net in network(7),
        v in variant(),
        lifespans in prop::collection::vec(0u32..6, 1..4),
        bump in 0usize..3,
    ) {
        let k = TransitionKernel::with_variant(&net, v);
        let n = net.vertex_count() as f64;
        let ts: Vec<f64> = lifespans.iter().map(|&t| t as f64).collect();
        let pis = vec![k.pi().to_vec(); ts.len()];
        let base = expected_union_product(&k, &pis, &ts).unwrap();
        prop_assert!(base >= 1.0 - 1e-12 && base <= n + 1e-12);

        let mut longer = ts.clone();
        longer[bump % ts.len()] += 1.0;
        let grown = expected_union_product(&k, &pis, &longer).unwrap();
        prop_assert!(grown >= base - 1e-12);

        let mut more = ts.clone();
        more.push(ts[0]);
        let added = expected_union_product(&k, &vec![k.pi().to_vec(); more.len()], &more).unwrap();
        prop_assert!(added >= base - 1e-12);
    }

    #[test]
    fn exact_engine_matches_enumeration(
        net in network(5),
        lazy in any::<bool>(),
        lifespans in prop::collection::vec(0u64..4, 1..4),
        shared in any::<bool>(),
    ) {
        let v = if lazy { Variant::Lazy } else { Variant::Plain };
        let k = TransitionKernel::with_variant(&net, v);
        let scheme = if shared {
            StartScheme::SharedPoint(uniform(net.vertex_count()))
        } else {
            StartScheme::iid(k.pi().to_vec(), lifespans.len())
        };
        let ts: Vec<f64> = lifespans.iter().map(|&t| t as f64).collect();
        let exact = expected_union(&k, &scheme, &ts).unwrap();
        let oracle = brute_force_oracle(&k, &scheme, &lifespans).unwrap();
        prop_assert!((exact - oracle).abs() < 1e-10);
    }

    #[test]
    fn star_never_beats_independent_starts(
        (net, nu) in network(6).prop_flat_map(|net| {
            let n = net.vertex_count();
            (Just(net), probability(n))
        }),
        v in variant(),
        t in 0u32..6,
        walkers in 1usize..4,
    ) {
        let k = TransitionKernel::with_variant(&net, v);
        let report = verify_star_vs_iid(&k, walkers, t as f64, &nu).unwrap();
        prop_assert!(report.gap >= -GAP_TOL);
    }

    #[test]
    fn one_vs_many_holds_on_random_graphs(net in network(7), lifespans in prop::collection::vec(0u32..5, 2..4)) {
        let k = TransitionKernel::with_variant(&net, Variant::Lazy);
        let ts: Vec<f64> = lifespans.iter().map(|&t| t as f64).collect();
        prop_assert!(verify_one_vs_many(&k, &ts).unwrap().gap >= -GAP_TOL);
        let ct = TransitionKernel::with_variant(&net, Variant::ContinuousTime);
        let ts: Vec<f64> = ts.iter().map(|t| t * 0.7).collect();
        prop_assert!(verify_one_vs_many(&ct, &ts).unwrap().gap >= -GAP_TOL);
    }

    #[test]
    fn product_coupling_matches_product_engine(net in network(5), v in variant(), a in 0u32..5, b in 0u32..5) {
        let k = TransitionKernel::with_variant(&net, v);
        let n = net.vertex_count();
        let measures = vec![k.pi().to_vec(), uniform(n)];
        let coupling = Coupling::product(&measures).unwrap();
        let ts = [a as f64, b as f64];
        let coupled = expected_union_coupled(&k, &coupling, &ts).unwrap();
        let product = expected_union_product(&k, &measures, &ts).unwrap();
        prop_assert!((coupled - product).abs() < 1e-10);
    }

    #[test]
    fn replica_outcomes_are_valid_and_reproducible(net in network(8), v in variant(), seed in any::<u64>(), idx in 0u64..1000) {
        let k = TransitionKernel::with_variant(&net, v);
        let job = WalkJob::new(&k, StartScheme::iid_stationary(&k, 2), vec![3.0, 4.0], 1, seed).unwrap();
        let a = sample_union(&job, idx).unwrap();
        prop_assert!(a >= 1 && a as usize <= net.vertex_count());
        prop_assert_eq!(a, sample_union(&job, idx).unwrap());
    }
}
