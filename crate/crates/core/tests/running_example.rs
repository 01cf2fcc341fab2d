use mac_search::global::gs_search;
use mac_search::ktcore::maximal_kt_core;
use mac_search::oracle::{build_running_example_fixture, oracle_chain_at};
use mac_search::query::{Mode, Prepared};

fn ids(rsn: &mac_search::network::RoadSocialNetwork, names: &[&str]) -> Vec<usize> {
    let mut v = rsn.resolve(names).unwrap();
    v.sort();
    v
}

#[test]
fn core_is_v1_to_v7() {
    let (rsn, _) = build_running_example_fixture();
    let q = ids(&rsn, &["v2", "v3", "v6"]);
    let core = maximal_kt_core(&rsn, &q, 3, 9.0).unwrap().into_core().unwrap();
    assert_eq!(core.members(), ids(&rsn, &["v1", "v2", "v3", "v4", "v5", "v6", "v7"]).as_slice());
}

#[test]
fn dominance_leaves() {
    let (rsn, region) = build_running_example_fixture();
    let q = ids(&rsn, &["v2", "v3", "v6"]);
    let p = Prepared::new(&rsn, &q, 3, 9.0, &region).unwrap().unwrap();
    let leaves: Vec<usize> = p.gd.leaves().into_iter().map(|v| p.global(v)).collect();
    assert_eq!(leaves, ids(&rsn, &["v1", "v5", "v7"]));
    let v4 = p.core.graph().local_id(3).unwrap();
    let v1 = p.core.graph().local_id(0).unwrap();
    assert_eq!(p.gd.parents(v1), &[v4]);
}

#[test]
fn example_weights() {
    let (rsn, region) = build_running_example_fixture();
    let q = ids(&rsn, &["v2", "v3", "v6"]);
    let h3 = ids(&rsn, &["v2", "v3", "v4", "v5", "v6"]);
    let h1 = ids(&rsn, &["v2", "v3", "v6", "v7"]);
    let at = |w: &[f64]| oracle_chain_at(&rsn, &q, 3, 9.0, w).unwrap();
    assert_eq!(at(&[0.2, 0.3]).nc(), Some(&h3));
    assert_eq!(at(&[0.19, 0.3]).nc(), Some(&h1));
    let gs = gs_search(&rsn, &q, 3, 9.0, &region, Mode::TopJ(2)).unwrap();
    for w in [[0.2, 0.3], [0.19, 0.3], [0.11, 0.25], [0.45, 0.39]] {
        let hit = gs.locate(&region, &w, 1e-9);
        assert_eq!(hit.len(), 1);
        assert_eq!(gs.entries[hit[0]].communities, at(&w).top(2));
    }
    println!("{} cells", gs.entries.len());
}
