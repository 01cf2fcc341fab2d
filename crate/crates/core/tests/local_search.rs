use fixedbitset::FixedBitSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mac_search::global::{gs_search_prepared, HalfSpaceCache};
use mac_search::ktcore::Subgraph;
use mac_search::local::{
    detect_bound, expand, find_anchors, is_promising, ls_search_detailed, verify, Bound, DiscardReason, LsParams,
    Strategy, VerifyStatus,
};
use mac_search::geometry::Region;
use mac_search::network::{Location, RoadNetwork, RoadSocialNetwork, SocialNetwork};
use mac_search::oracle::{build_running_example_fixture, oracle_chain_at, random_instance, InstanceSpec};
use mac_search::query::{Mode, Prepared};

fn fixture() -> Prepared {
    let (rsn, region) = build_running_example_fixture();
    let q = rsn.resolve(&["v2", "v3", "v6"]).unwrap();
    Prepared::new(&rsn, &q, 3, 9.0, &region).unwrap().unwrap()
}

/// Local ids of `v_i` names (core members are v1..v7 in order).
fn local(names: &[usize]) -> Vec<usize> {
    names.iter().map(|i| i - 1).collect()
}

fn sub(p: &Prepared, names: &[usize]) -> Subgraph {
    Subgraph::from_members(p.core.graph().clone(), &local(names))
}

#[test]
fn h1_is_valid_on_the_low_w1_side() {
    let p = fixture();
    let h1 = sub(&p, &[2, 3, 6, 7]);
    let out = verify(&p, &h1, &mut HalfSpaceCache::new()).unwrap();
    let VerifyStatus::Valid(cells) = out.status else { panic!("{:?}", out.status) };
    assert!(out.anchors.is_empty());
    for w1 in [0.11, 0.15, 0.19, 0.194] {
        for w2 in [0.21, 0.3, 0.39] {
            let inside = cells.iter().filter(|c| c.contains(&p.region, &[w1, w2], 0.0)).count();
            assert_eq!(inside, 1, "w=({w1},{w2})");
        }
    }
    for w1 in [0.196, 0.3, 0.49] {
        assert!(cells.iter().all(|c| !c.contains(&p.region, &[w1, 0.3], 0.0)));
    }
}

#[test]
fn h4_has_an_empty_partition() {
    let p = fixture();
    let h4 = sub(&p, &[1, 2, 3, 6, 7]);
    let out = verify(&p, &h4, &mut HalfSpaceCache::new()).unwrap();
    assert_eq!(out.status, VerifyStatus::Discarded(DiscardReason::EmptyPartition));
    assert_eq!(out.anchors, local(&[1]));
}

#[test]
fn whole_core_is_promising_and_valid_where_it_is_the_answer() {
    let p = fixture();
    let all = p.core.subgraph().clone();
    assert_eq!(is_promising(&p, all.member_set()), Ok(()));
    let out = verify(&p, &all, &mut HalfSpaceCache::new()).unwrap();
    // Every G_d leaf is an anchor, so the full core is never the MAC.
    assert_eq!(out.status, VerifyStatus::Discarded(DiscardReason::EmptyPartition));
}

/// Triangle {0,1,2} around Q = {0}; vertex 3 outscores 2 everywhere and
/// hangs on 0 and 1; vertex 4 scores lowest and hangs on 0 and 2.
fn hanging_pair() -> Prepared {
    let road = RoadNetwork::new(1, vec![]).unwrap();
    let names = (0..5).map(|i| i.to_string()).collect();
    let edges = [(0, 1), (0, 2), (1, 2), (3, 0), (3, 1), (4, 0), (4, 2)];
    let attrs = vec![vec![5.0, 5.0], vec![4.0, 6.0], vec![3.0, 3.0], vec![4.0, 4.0], vec![1.0, 1.0]];
    let social = SocialNetwork::new(names, &edges, vec![Location::Vertex(0); 5], attrs).unwrap();
    let rsn = RoadSocialNetwork::new(road, social).unwrap();
    let region = Region::rectangle(&[(0.3, 0.7)]).unwrap();
    Prepared::new(&rsn, &[0], 2, 1.0, &region).unwrap().unwrap()
}

fn set(members: &[usize]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(5);
    s.extend(members.iter().copied());
    s
}

#[test]
fn outside_vertex_above_a_member_discards() {
    let p = hanging_pair();
    // Dropping 4 leaves 3 with two neighbors, and 3 is never below 2.
    assert_eq!(is_promising(&p, &set(&[0, 1, 2])), Err(DiscardReason::Corollary2_2));
}

#[test]
fn outside_without_leaves_discards() {
    let p = hanging_pair();
    assert_eq!(p.gd.leaves(), vec![4]);
    assert_eq!(is_promising(&p, &set(&[0, 1, 2, 4])), Err(DiscardReason::Corollary2_1));
    assert_eq!(is_promising(&p, &set(&[0, 1, 2, 3])), Ok(()));
}

#[test]
fn v4_and_v5_are_bound_to_each_other() {
    let p = fixture();
    let mut outside = FixedBitSet::with_capacity(7);
    outside.extend(local(&[1, 4, 5]));
    assert_eq!(detect_bound(&p, &outside, 3), Bound::MutuallyBound(4));
    assert_eq!(detect_bound(&p, &outside, 4), Bound::MutuallyBound(3));
}

#[test]
fn anchors_match_trial_deletion() {
    let p = fixture();
    let h = sub(&p, &[2, 3, 4, 5, 6]);
    // Every member of H3 has degree 3 or more; deleting v4 or v5 drags the
    // other out, leaving the triangle {v2,v3,v6}, which is no 3-core.
    assert!(find_anchors(&p, &h).is_empty());
    let all = p.core.subgraph().clone();
    // Deleting v7 drags v1 out but leaves {v2,v3,v4,v5,v6}.
    let mut anchors = find_anchors(&p, &all);
    anchors.sort();
    assert_eq!(anchors, local(&[1, 5, 7]));
}

#[test]
fn ls_finds_both_example_macs() {
    let p = fixture();
    let (res, stats) = ls_search_detailed(&p, Mode::Nc, &LsParams::default()).unwrap();
    assert!(stats.valid >= 2);
    let gs = gs_search_prepared(&p, Mode::Nc).unwrap();
    assert_eq!(res.distinct_best(), gs.distinct_best());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let w = p.region.sample(&mut rng);
        let a = res.locate(&p.region, &w, 0.0);
        let b = gs.locate(&p.region, &w, 0.0);
        assert_eq!(a.len(), 1);
        assert_eq!(res.entries[a[0]].communities, gs.entries[b[0]].communities);
    }
}

#[test]
fn expand_starts_from_the_smallest_core() {
    let p = fixture();
    for strategy in [Strategy::default(), Strategy::LayerMindeg { zeta: 100.0 }] {
        let cands = expand(&p, strategy, 32);
        assert!(!cands.is_empty());
        let mut distinct = cands.iter().map(|c| c.members.clone()).collect::<Vec<_>>();
        distinct.dedup();
        assert_eq!(distinct.len(), cands.len());
        assert!(cands.iter().all(|c| local(&[2, 3, 6]).iter().all(|q| c.members.contains(q))));
    }
}

#[test]
fn ls_is_sound_on_random_instances() {
    let mut found = 0usize;
    let mut total = 0usize;
    for seed in 0..40 {
        let inst = random_instance(1000 + seed, &InstanceSpec::small());
        let p = Prepared::new(&inst.rsn, &inst.q, inst.k, inst.t, &inst.region).unwrap().unwrap();
        let gs = gs_search_prepared(&p, Mode::Nc).unwrap();
        for mode in [Mode::Nc, Mode::TopJ(3)] {
            let (ls, _) = ls_search_detailed(&p, mode, &LsParams::default()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for e in &ls.entries {
                let mut points = vec![e.cell.witness.clone()];
                while points.len() < 5 {
                    let w = p.region.sample(&mut rng);
                    if e.cell.contains(&p.region, &w, 1e-9) {
                        points.push(w);
                    }
                    if points.len() == 1 && rng_exhausted(&mut rng) {
                        break;
                    }
                }
                for w in points {
                    let chain = oracle_chain_at(&inst.rsn, &inst.q, inst.k, inst.t, &w).unwrap();
                    assert_eq!(e.communities, chain.top(mode.depth()), "seed {seed} w {w:?}");
                }
            }
        }
        let ls = ls_search_detailed(&p, Mode::Nc, &LsParams::default()).unwrap().0.distinct_best();
        let want = gs.distinct_best();
        total += want.len();
        found += want.iter().filter(|c| ls.contains(c)).count();
    }
    eprintln!("recall {found}/{total}");
}

fn rng_exhausted(rng: &mut ChaCha8Rng) -> bool {
    use rand::Rng;
    rng.gen_ratio(1, 200)
}

#[test]
fn ls_topj_cells_partition_the_nc_cells() {
    for seed in 0..40 {
        let inst = random_instance(1000 + seed, &InstanceSpec::small());
        let p = Prepared::new(&inst.rsn, &inst.q, inst.k, inst.t, &inst.region).unwrap().unwrap();
        let nc = ls_search_detailed(&p, Mode::Nc, &LsParams::default()).unwrap().0;
        let topj = ls_search_detailed(&p, Mode::TopJ(3), &LsParams::default()).unwrap().0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let w = p.region.sample(&mut rng);
            let in_nc = nc.locate(&p.region, &w, 1e-7);
            let in_topj = topj.locate(&p.region, &w, 1e-7);
            if in_nc.len() == 1 && !topj.entries.iter().any(|e| e.cell.contains(&p.region, &w, -1e-7) && !e.cell.contains(&p.region, &w, 1e-7)) {
                assert_eq!(in_topj.len(), 1, "seed {seed} w {w:?}");
                assert_eq!(topj.entries[in_topj[0]].communities[0], nc.entries[in_nc[0]].communities[0]);
            }
            assert!(in_topj.len() <= 1, "seed {seed}: overlapping top-j cells");
        }
    }
}
