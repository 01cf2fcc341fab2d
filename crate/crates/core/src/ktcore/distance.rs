use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::network::{Location, RoadNetwork, RoadSocialNetwork, RoadVertex, VertexId};

/// Relative slack applied when comparing a distance against the budget `t`,
/// so that path sums accumulated in a different order agree at the boundary.
pub const DISTANCE_EPS: f64 = 1e-9;

pub(crate) fn within(d: f64, t: f64) -> bool {
    d <= t + DISTANCE_EPS * t.abs().max(1.0)
}

#[derive(PartialEq)]
struct Entry(f64, RoadVertex);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Road vertices reachable from a location, with their access costs.
fn access(road: &RoadNetwork, p: &Location) -> Vec<(RoadVertex, f64)> {
    match *p {
        Location::Vertex(r) => vec![(r, 0.0)],
        Location::OnEdge { edge, offset } => {
            let e = road.edge(edge);
            vec![(e.u, offset), (e.v, e.weight - offset)]
        }
    }
}

/// Multi-source Dijkstra; vertices farther than `bound` keep `+inf`.
fn dijkstra(road: &RoadNetwork, sources: &[(RoadVertex, f64)], bound: f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; road.num_vertices()];
    let mut heap = BinaryHeap::new();
    for &(r, c) in sources {
        if c < dist[r] && within(c, bound) {
            dist[r] = c;
            heap.push(Entry(c, r));
        }
    }
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, eid) in road.neighbors(u) {
            let nd = d + road.edge(eid).weight;
            if nd < dist[v] && within(nd, bound) {
                dist[v] = nd;
                heap.push(Entry(nd, v));
            }
        }
    }
    dist
}

fn point_distance(road: &RoadNetwork, dist: &[f64], from: &Location, to: &Location) -> f64 {
    let mut best = access(road, to)
        .into_iter()
        .map(|(r, c)| dist[r] + c)
        .fold(f64::INFINITY, f64::min);
    if let (Location::OnEdge { edge: e1, offset: o1 }, Location::OnEdge { edge: e2, offset: o2 }) = (from, to) {
        if e1 == e2 {
            best = best.min((o1 - o2).abs());
        }
    }
    best
}

/// Shortest-path cost between two road locations (`+inf` if disconnected).
pub fn network_distance(road: &RoadNetwork, p: &Location, p2: &Location) -> f64 {
    if p == p2 {
        return 0.0;
    }
    let dist = dijkstra(road, &access(road, p), f64::INFINITY);
    point_distance(road, &dist, p, p2)
}

/// `D_Q(v)` for every social vertex, or `+inf` when it exceeds `t`.
pub fn query_distances(rsn: &RoadSocialNetwork, q: &[VertexId], t: f64) -> Result<Vec<f64>> {
    if q.is_empty() {
        return Err(Error::Query("query set is empty".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::Query(format!("distance budget must be non-negative, got {t}")));
    }
    let n = rsn.social.num_vertices();
    if let Some(&bad) = q.iter().find(|&&v| v >= n) {
        return Err(Error::UnknownVertex(bad));
    }
    let mut out = vec![0.0f64; n];
    for &qv in q {
        let from = rsn.social.location(qv);
        let dist = dijkstra(&rsn.road, &access(&rsn.road, from), t);
        for (v, slot) in out.iter_mut().enumerate() {
            if slot.is_finite() {
                let d = point_distance(&rsn.road, &dist, from, rsn.social.location(v));
                *slot = if within(d, t) { slot.max(d) } else { f64::INFINITY };
            }
        }
    }
    Ok(out)
}

/// Vertices whose query distance is at most `t`, ascending.
pub fn query_distance_filter(rsn: &RoadSocialNetwork, q: &[VertexId], t: f64) -> Result<Vec<VertexId>> {
    Ok(query_distances(rsn, q, t)?
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_finite())
        .map(|(v, _)| v)
        .collect())
}
