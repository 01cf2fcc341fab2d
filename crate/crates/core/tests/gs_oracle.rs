use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mac_search::global::gs_search_prepared;
use mac_search::oracle::{oracle_chain_at, random_instance, sample_clear_weight, InstanceSpec};
use mac_search::query::{Mode, Prepared};

#[test]
fn gs_matches_oracle_on_random_instances() {
    for seed in 0..30 {
        let inst = random_instance(seed, &InstanceSpec::wide());
        let p = Prepared::new(&inst.rsn, &inst.q, inst.k, inst.t, &inst.region).unwrap().unwrap();
        let nc = gs_search_prepared(&p, Mode::Nc).unwrap();
        let top = gs_search_prepared(&p, Mode::TopJ(3)).unwrap();
        let rows: Vec<&[f64]> = p.core.members().iter().map(|&v| inst.rsn.social.attributes(v)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let w = sample_clear_weight(&mut rng, &inst.region, &rows, 1e-9);
            let chain = oracle_chain_at(&inst.rsn, &inst.q, inst.k, inst.t, &w).unwrap();
            let hit = nc.locate(&inst.region, &w, 0.0);
            assert_eq!(hit.len(), 1, "seed {seed}");
            assert_eq!(nc.entries[hit[0]].communities, chain.top(1), "seed {seed} w {w:?}");
            let hit = top.locate(&inst.region, &w, 0.0);
            assert_eq!(hit.len(), 1);
            assert_eq!(top.entries[hit[0]].communities, chain.top(3), "seed {seed}");
        }
        eprintln!("seed {seed}: n'={} cells={}", p.core.len(), nc.entries.len());
    }
}
