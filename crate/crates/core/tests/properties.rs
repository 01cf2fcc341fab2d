use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mac_search::geometry::{halfspace_between, r_dominance_test, score, Arrangement, AttributeTable, Dominance, Region};
use mac_search::ktcore::{dfs_delete, maximal_kt_core, DeleteOutcome, Subgraph};
use mac_search::oracle::{random_instance, random_region, InstanceSpec};

fn rows(n: usize, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0..1.0f64, d), n)
}

fn region_of(seed: u64, dim: usize) -> Region {
    random_region(&mut ChaCha8Rng::seed_from_u64(seed), dim, 0.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kt_cores_nest_in_k_and_t(seed in 0u64..10_000, dk in 1usize..3, dt in 0.5f64..6.0) {
        let inst = random_instance(seed, &InstanceSpec::small());
        let big = maximal_kt_core(&inst.rsn, &inst.q, inst.k, inst.t + dt).unwrap().into_core().unwrap();
        let base = maximal_kt_core(&inst.rsn, &inst.q, inst.k, inst.t).unwrap().into_core().unwrap();
        prop_assert!(base.members().iter().all(|v| big.members().contains(v)));
        if let Some(small) = maximal_kt_core(&inst.rsn, &inst.q, inst.k + dk, inst.t).unwrap().into_core() {
            prop_assert!(small.members().iter().all(|v| base.members().contains(v)));
        }
    }

    #[test]
    fn dfs_delete_matches_rebuilding_the_core(seed in 0u64..10_000, pick in any::<prop::sample::Index>()) {
        let inst = random_instance(seed, &InstanceSpec::small());
        let core = maximal_kt_core(&inst.rsn, &inst.q, inst.k, inst.t).unwrap().into_core().unwrap();
        let h = core.subgraph().clone();
        let u = pick.index(h.len());
        let outcome = dfs_delete(&h, u, inst.k, core.query());
        // Naive: peel everything but u from scratch, then keep Q's component.
        let rest: Vec<usize> = h.members().filter(|&v| v != u).collect();
        let mut naive = Subgraph::from_members(core.graph().clone(), &rest);
        naive.peel(inst.k);
        let alive = !core.is_query(u) && core.query().iter().all(|&q| naive.contains(q)) && {
            let reach = naive.component_of(core.query()[0]);
            core.query().iter().all(|&q| reach.contains(q))
        };
        match outcome {
            DeleteOutcome::EarlyTermination => prop_assert!(!alive),
            DeleteOutcome::Deleted { community, removed } => {
                prop_assert!(alive);
                naive.retain_component(core.query()[0]);
                prop_assert_eq!(community.member_set(), naive.member_set());
                prop_assert_eq!(removed[0], u);
                prop_assert_eq!(removed.len() + community.len(), h.len());
            }
        }
    }

    #[test]
    fn r_dominance_is_transitive_and_antisymmetric(rs in rows(12, 3), seed in 0u64..1000) {
        let region = region_of(seed, 2);
        let table = AttributeTable::new(3, &rs).unwrap();
        let dom = |u, v| r_dominance_test(u, v, &region, &table) == Dominance::Dominates;
        for u in 0..rs.len() {
            for v in 0..rs.len() {
                if u == v {
                    continue;
                }
                let back = r_dominance_test(v, u, &region, &table);
                match r_dominance_test(u, v, &region, &table) {
                    Dominance::Dominates => prop_assert_eq!(back, Dominance::DominatedBy),
                    Dominance::DominatedBy => prop_assert_eq!(back, Dominance::Dominates),
                    Dominance::Incomparable => prop_assert_eq!(back, Dominance::Incomparable),
                }
                for x in 0..rs.len() {
                    if x != u && x != v && dom(u, v) && dom(v, x) {
                        prop_assert!(dom(u, x));
                    }
                }
            }
        }
    }

    #[test]
    fn halfspace_measures_the_score_gap(x in rows(2, 4), w in prop::collection::vec(0.0..0.33f64, 3)) {
        let h = halfspace_between(&x[0], &x[1], 0, 1);
        let full: Vec<f64> = w.iter().copied().chain([1.0 - w.iter().sum::<f64>()]).collect();
        let direct: f64 = x[0].iter().zip(&full).map(|(a, b)| a * b).sum::<f64>()
            - x[1].iter().zip(&full).map(|(a, b)| a * b).sum::<f64>();
        prop_assert!((h.eval(&w) - direct).abs() < 1e-12);
        prop_assert!((score(&x[0], &w) - score(&x[1], &w) - direct).abs() < 1e-12);
        prop_assert!((h.flipped().eval(&w) + direct).abs() < 1e-12);
    }

    #[test]
    fn arrangement_cell_count_is_bounded(rs in rows(8, 3), seed in 0u64..1000) {
        let region = region_of(seed, 2);
        let mut arr = Arrangement::new(region.clone(), ());
        let mut m = 0u64;
        for u in 0..rs.len() {
            for v in u + 1..rs.len() {
                arr.insert(halfspace_between(&rs[u], &rs[v], u, v)).unwrap();
                m += 1;
                // m lines cut a planar region into at most 1 + m + m(m-1)/2 faces.
                let bound = 1 + m + m * (m - 1) / 2;
                prop_assert!(arr.leaf_count() as u64 <= bound);
            }
        }
        // Every leaf is non-empty: its witness lies inside it.
        for (_, cell, _) in arr.leaves() {
            prop_assert!(cell.contains(&region, &cell.witness, 0.0));
        }
    }
}
