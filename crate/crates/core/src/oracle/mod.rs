//! Brute-force references for the engines, plus the worked-example fixture.
//!
//! These deliberately avoid the engines' data structures: sets are plain
//! `BTreeSet`s, peeling is repeated scanning, and scores are computed from
//! the full weight vector.

mod fixture;

use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use fixture::{build_running_example_fixture, FIXTURE_ATTRIBUTES, FIXTURE_EDGES, FIXTURE_ROAD};

use crate::error::{Error, Result};
use crate::geometry::{full_weight, Region};
use crate::ktcore::{maximal_kt_core, CoreOutcome, DISTANCE_EPS};
use crate::network::{
    generate_road_social, AttributeMode, GenParams, Location, RoadShape, RoadSocialNetwork, SocialNetwork, VertexId,
};

/// Largest core the exhaustive enumeration accepts.
pub const ENUMERATION_GUARD: usize = 15;

/// Deletion chain at one weight vector, largest community first.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedWeightRanking {
    pub w: Vec<f64>,
    pub chain: Vec<Vec<VertexId>>,
    pub scores: Vec<f64>,
}

impl FixedWeightRanking {
    /// The non-contained MAC (last, smallest community).
    pub fn nc(&self) -> Option<&Vec<VertexId>> {
        self.chain.last()
    }

    /// Top-`j` communities, best first.
    pub fn top(&self, j: usize) -> Vec<Vec<VertexId>> {
        self.chain.iter().rev().take(j).cloned().collect()
    }
}

fn full_score(x: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(a, b)| a * b).sum()
}

fn induced_degree(g: &SocialNetwork, set: &BTreeSet<VertexId>, v: VertexId) -> usize {
    g.neighbors(v).iter().filter(|u| set.contains(u)).count()
}

fn peel_naive(g: &SocialNetwork, set: &mut BTreeSet<VertexId>, k: usize) {
    loop {
        let low: Vec<VertexId> = set.iter().copied().filter(|&v| induced_degree(g, set, v) < k).collect();
        if low.is_empty() {
            return;
        }
        for v in low {
            set.remove(&v);
        }
    }
}

fn reachable(g: &SocialNetwork, set: &BTreeSet<VertexId>, root: VertexId) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if set.contains(&u) && seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    seen
}

/// Repeatedly deletes the lowest-scoring member (larger id on exact ties)
/// until a deletion would destroy every `k`-core around `Q`.
pub fn oracle_chain_at(
    rsn: &RoadSocialNetwork,
    q: &[VertexId],
    k: usize,
    t: f64,
    w: &[f64],
) -> Result<FixedWeightRanking> {
    let full = full_weight(w)?;
    let g = &rsn.social;
    let mut ranking = FixedWeightRanking { w: w.to_vec(), chain: Vec::new(), scores: Vec::new() };
    let Some(core) = maximal_kt_core(rsn, q, k, t)?.into_core() else {
        return Ok(ranking);
    };
    let q: BTreeSet<VertexId> = q.iter().copied().collect();
    let mut current: BTreeSet<VertexId> = core.members().iter().copied().collect();
    loop {
        let (victim, min) = current
            .iter()
            .map(|&v| (v, full_score(g.attributes(v), &full)))
            .fold(None, |best: Option<(VertexId, f64)>, (v, s)| match best {
                Some((bv, bs)) if bs < s || (bs == s && bv > v) => Some((bv, bs)),
                _ => Some((v, s)),
            })
            .expect("community is nonempty");
        ranking.chain.push(current.iter().copied().collect());
        ranking.scores.push(min);
        if q.contains(&victim) {
            break;
        }
        let mut next = current.clone();
        next.remove(&victim);
        peel_naive(g, &mut next, k);
        if !q.is_subset(&next) {
            break;
        }
        let comp = reachable(g, &next, *q.first().expect("query nonempty"));
        if !q.is_subset(&comp) {
            break;
        }
        current = comp;
    }
    Ok(ranking)
}

/// Every connected `k`-core containing `Q` with query distance at most `t`.
pub fn oracle_enumerate(rsn: &RoadSocialNetwork, q: &[VertexId], k: usize, t: f64) -> Result<Vec<Vec<VertexId>>> {
    let Some(core) = maximal_kt_core(rsn, q, k, t)?.into_core() else {
        return Ok(Vec::new());
    };
    let members = core.members();
    if members.len() > ENUMERATION_GUARD {
        return Err(Error::OracleGuard(format!(
            "core has {} members; enumeration is limited to {ENUMERATION_GUARD}",
            members.len()
        )));
    }
    let qset: BTreeSet<VertexId> = q.iter().copied().collect();
    let g = &rsn.social;
    let mut out = Vec::new();
    for mask in 1u32..(1 << members.len()) {
        let set: BTreeSet<VertexId> = (0..members.len()).filter(|i| mask >> i & 1 == 1).map(|i| members[i]).collect();
        if !qset.is_subset(&set) || set.iter().any(|&v| induced_degree(g, &set, v) < k) {
            continue;
        }
        if reachable(g, &set, *set.first().expect("nonempty")).len() == set.len() {
            out.push(set.into_iter().collect());
        }
    }
    out.sort();
    Ok(out)
}

/// Core numbers by re-peeling from scratch for every `k`.
pub fn naive_core_numbers(g: &SocialNetwork) -> Vec<usize> {
    let mut core = vec![0; g.num_vertices()];
    let mut k = 1;
    loop {
        let mut set: BTreeSet<VertexId> = (0..g.num_vertices()).collect();
        peel_naive(g, &mut set, k);
        if set.is_empty() {
            return core;
        }
        for v in set {
            core[v] = k;
        }
        k += 1;
    }
}

/// Query-distance filter via Floyd-Warshall over the road graph.
pub fn naive_distance_filter(rsn: &RoadSocialNetwork, q: &[VertexId], t: f64) -> Vec<VertexId> {
    let road = &rsn.road;
    let n = road.num_vertices();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in road.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.weight);
        d[e.v][e.u] = d[e.v][e.u].min(e.weight);
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][m] + d[m][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let ends = |p: &Location| -> Vec<(usize, f64)> {
        match *p {
            Location::Vertex(r) => vec![(r, 0.0)],
            Location::OnEdge { edge, offset } => {
                let e = road.edge(edge);
                vec![(e.u, offset), (e.v, e.weight - offset)]
            }
        }
    };
    let dist = |a: &Location, b: &Location| -> f64 {
        let mut best = f64::INFINITY;
        for (x, cx) in ends(a) {
            for (y, cy) in ends(b) {
                best = best.min(cx + d[x][y] + cy);
            }
        }
        if let (Location::OnEdge { edge: e1, offset: o1 }, Location::OnEdge { edge: e2, offset: o2 }) = (a, b) {
            if e1 == e2 {
                best = best.min((o1 - o2).abs());
            }
        }
        best
    };
    let limit = t + DISTANCE_EPS * t.abs().max(1.0);
    (0..rsn.social.num_vertices())
        .filter(|&v| {
            q.iter()
                .all(|&qv| dist(rsn.social.location(v), rsn.social.location(qv)) <= limit)
        })
        .collect()
}

/// Ancestor sets of the full pairwise r-dominance relation, transitively
/// closed. Rows are attribute vectors; ties orient toward the lower index.
pub fn pairwise_dominance_closure(rows: &[Vec<f64>], region: &Region) -> Vec<FixedBitSet> {
    let n = rows.len();
    let corners: Vec<Vec<f64>> = region
        .corners()
        .iter()
        .map(|c| {
            let mut full = c.clone();
            full.push(1.0 - c.iter().sum::<f64>());
            full
        })
        .collect();
    let mut anc = vec![FixedBitSet::with_capacity(n); n];
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let diffs: Vec<f64> = corners
                .iter()
                .map(|c| full_score(&rows[u], c) - full_score(&rows[v], c))
                .collect();
            let scale = rows[u].iter().chain(&rows[v]).fold(1.0f64, |m, x| m.max(x.abs()));
            let tol = 1e-12 * scale;
            let all_tied = diffs.iter().all(|x| x.abs() <= tol);
            if (all_tied && u < v) || (!all_tied && diffs.iter().all(|&x| x >= -tol)) {
                anc[v].insert(u);
            }
        }
    }
    // Warshall closure.
    for m in 0..n {
        for v in 0..n {
            if anc[v].contains(m) {
                let extra = anc[m].clone();
                anc[v].union_with(&extra);
            }
        }
    }
    anc
}

/// A small random query for cross-checking engines against the oracle.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub rsn: RoadSocialNetwork,
    pub q: Vec<VertexId>,
    pub k: usize,
    pub t: f64,
    pub region: Region,
}

/// Region side lengths, as fractions of an axis, used by the default suite.
pub const SIGMA_LEVELS: [f64; 5] = [0.001, 0.005, 0.01, 0.05, 0.1];

/// Shape of the random instances drawn by [`random_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub max_n: usize,
    pub dims: Vec<usize>,
    /// Candidate side lengths of the region rectangle.
    pub sides: Vec<f64>,
    pub max_q: usize,
}

impl InstanceSpec {
    /// Up to 40 users, `d` in {2, 3}, sides from [`SIGMA_LEVELS`], `|Q| <= 4`.
    pub fn small() -> Self {
        Self { max_n: 40, dims: vec![2, 3], sides: SIGMA_LEVELS.to_vec(), max_q: 4 }
    }

    /// As [`InstanceSpec::small`] with much larger regions.
    pub fn wide() -> Self {
        Self { sides: vec![0.05, 0.1, 0.2, 0.3], ..Self::small() }
    }
}

/// Random axis-aligned square of side `side` strictly inside the weight simplex.
pub fn random_region(rng: &mut impl Rng, dim: usize, side: f64) -> Region {
    let side = side.min(0.9 / dim as f64);
    loop {
        let bounds: Vec<(f64, f64)> = (0..dim)
            .map(|_| {
                let lo = rng.gen_range(0.01..1.0 - side - 0.01);
                (lo, lo + side)
            })
            .collect();
        if bounds.iter().map(|b| b.1).sum::<f64>() < 0.99 {
            return Region::rectangle(&bounds).expect("bounds are valid");
        }
    }
}

/// Draws instances from `seed` until one has a `(k,t)`-core.
pub fn random_instance(seed: u64, spec: &InstanceSpec) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(spec.max_n / 2..=spec.max_n).max(4);
        let d = spec.dims[rng.gen_range(0..spec.dims.len())];
        let mode = [AttributeMode::Independent, AttributeMode::Correlated, AttributeMode::AntiCorrelated]
            [rng.gen_range(0..3)];
        let grid = rng.gen_range(3..6);
        let mut params = GenParams::new(n, d, mode, RoadShape::Grid { rows: grid, cols: grid }, rng.gen());
        params.avg_degree = rng.gen_range(4.0..9.0);
        let Ok(rsn) = generate_road_social(&params) else { continue };
        let k = rng.gen_range(2..=4);
        let cores = crate::ktcore::core_decomposition(&rsn.social);
        let eligible: Vec<VertexId> = (0..n).filter(|&v| cores[v] >= k).collect();
        if eligible.is_empty() {
            continue;
        }
        let mut q = vec![eligible[rng.gen_range(0..eligible.len())]];
        let size = rng.gen_range(1..=spec.max_q.max(1));
        while q.len() < size {
            let cand: Vec<VertexId> = q
                .iter()
                .flat_map(|&v| rsn.social.neighbors(v).iter().copied())
                .filter(|v| cores[*v] >= k && !q.contains(v))
                .collect();
            if cand.is_empty() {
                break;
            }
            q.push(cand[rng.gen_range(0..cand.len())]);
        }
        q.sort_unstable();
        q.dedup();
        let t = rng.gen_range(2.0..2.0 * grid as f64);
        let side = spec.sides[rng.gen_range(0..spec.sides.len())];
        let region = random_region(&mut rng, d - 1, side);
        if let Ok(CoreOutcome::Found(_)) = maximal_kt_core(&rsn, &q, k, t) {
            return RandomInstance { rsn, q, k, t, region };
        }
    }
}

/// Samples an interior weight at least `margin` (normalized) away from every
/// pairwise tie hyperplane among `rows` and from the region boundary.
pub fn sample_clear_weight(rng: &mut impl Rng, region: &Region, rows: &[&[f64]], margin: f64) -> Vec<f64> {
    'outer: loop {
        let w = region.sample(rng);
        if !region.contains(&w, margin) {
            continue;
        }
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                let h = crate::geometry::halfspace_between(a, b, 0, 1);
                let norm = h.norm();
                if norm > 0.0 && (h.eval(&w) / norm).abs() <= margin {
                    continue 'outer;
                }
            }
        }
        return w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::RoadEdge;

    fn path_network(names: &[&str], edges: &[(usize, usize)]) -> RoadSocialNetwork {
        let road = crate::network::RoadNetwork::new(2, vec![RoadEdge { u: 0, v: 1, weight: 1.0 }]).unwrap();
        let n = names.len();
        let social = SocialNetwork::new(
            names.iter().map(|s| s.to_string()).collect(),
            edges,
            vec![Location::Vertex(0); n],
            (0..n).map(|i| vec![i as f64, 1.0]).collect(),
        )
        .unwrap();
        RoadSocialNetwork::new(road, social).unwrap()
    }

    #[test]
    fn enumerate_k4_and_path() {
        let k4 = path_network(&["a", "b", "c", "d"], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(oracle_enumerate(&k4, &[0], 3, f64::INFINITY).unwrap(), vec![vec![0, 1, 2, 3]]);
        let path = path_network(&["a", "b", "c"], &[(0, 1), (1, 2)]);
        assert_eq!(
            oracle_enumerate(&path, &[1], 1, f64::INFINITY).unwrap(),
            vec![vec![0, 1], vec![0, 1, 2], vec![1, 2]]
        );
    }

    #[test]
    fn clique_query_chain_is_single() {
        let k4 = path_network(&["a", "b", "c", "d"], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let r = oracle_chain_at(&k4, &[0, 1, 2, 3], 3, 10.0, &[0.4]).unwrap();
        assert_eq!(r.chain, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn pendant_rich_vertex_gives_chain_of_two() {
        // K4 on 0..4 plus vertex 4 attached to 0, 1, 2; vertex 4 scores lowest.
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 0), (4, 1), (4, 2)];
        let road = crate::network::RoadNetwork::new(1, vec![]).unwrap();
        let attrs = vec![vec![5.0, 5.0], vec![6.0, 6.0], vec![7.0, 7.0], vec![8.0, 8.0], vec![1.0, 1.0]];
        let names = (0..5).map(|i| i.to_string()).collect();
        let social = SocialNetwork::new(names, &edges, vec![Location::Vertex(0); 5], attrs).unwrap();
        let rsn = RoadSocialNetwork::new(road, social).unwrap();
        let r = oracle_chain_at(&rsn, &[0], 3, 0.0, &[0.5]).unwrap();
        assert_eq!(r.chain, vec![vec![0, 1, 2, 3, 4], vec![0, 1, 2, 3]]);
        assert!(r.scores[0] <= r.scores[1]);
    }

    #[test]
    fn guard_refuses_large_cores() {
        let n = 16;
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let road = crate::network::RoadNetwork::new(1, vec![]).unwrap();
        let social = SocialNetwork::new(names, &edges, vec![Location::Vertex(0); n], vec![vec![1.0, 1.0]; n]).unwrap();
        let rsn = RoadSocialNetwork::new(road, social).unwrap();
        assert!(matches!(oracle_enumerate(&rsn, &[0], 2, 1.0), Err(Error::OracleGuard(_))));
    }
}
