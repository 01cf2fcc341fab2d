//! Query-distance filtering, k-core peeling and the maximal `(k,t)`-core.
//!
//! Everything downstream of [`maximal_kt_core`] works in *local* ids
//! `0..n'` over the core's members (ascending global id order), so id-based
//! tie rules agree between local and global views.

mod distance;

use std::collections::VecDeque;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

pub use distance::{network_distance, query_distance_filter, query_distances, DISTANCE_EPS};

use crate::error::{Error, Result};
use crate::network::{RoadSocialNetwork, SocialNetwork, VertexId};

/// Core numbers by bucket peeling over an arbitrary adjacency.
pub fn core_numbers<'a, F>(n: usize, neighbors: F) -> Vec<usize>
where
    F: Fn(usize) -> &'a [usize],
{
    let mut degree: Vec<usize> = (0..n).map(|v| neighbors(v).len()).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let c = *b;
        *b = start;
        start += c;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        order[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..bin.len()).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for i in 0..n {
        let v = order[i];
        for &u in neighbors(v) {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree
}

/// Core number of every social vertex.
pub fn core_decomposition(g: &SocialNetwork) -> Vec<usize> {
    core_numbers(g.num_vertices(), |v| g.neighbors(v))
}

/// `⌊(1 + √(9 + 8(m − n))) / 2⌋`, or 1 when `m < n − 1`. Bounds the coreness
/// of any connected graph with `n` vertices and `m` edges.
pub fn coreness_upper_bound(n: usize, m: usize) -> usize {
    if m + 1 < n {
        return 1;
    }
    let x = 9 + 8 * (m as u128 + 1 - n as u128) - 8;
    let mut s = (x as f64).sqrt() as u128;
    while s * s > x {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= x {
        s += 1;
    }
    ((1 + s) / 2) as usize
}

/// Induced graph over a sorted set of global vertices, in local ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGraph {
    global: Vec<VertexId>,
    adj: Vec<Vec<usize>>,
}

impl LocalGraph {
    pub fn induced(g: &SocialNetwork, members: &[VertexId]) -> Self {
        let mut global = members.to_vec();
        global.sort_unstable();
        global.dedup();
        let adj = global
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter_map(|u| global.binary_search(u).ok())
                    .collect()
            })
            .collect();
        Self { global, adj }
    }

    /// Builds a graph directly from local adjacency lists.
    pub fn from_parts(global: Vec<VertexId>, adj: Vec<Vec<usize>>) -> Self {
        Self { global, adj }
    }

    pub fn len(&self) -> usize {
        self.global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn global_id(&self, v: usize) -> VertexId {
        self.global[v]
    }

    pub fn globals(&self) -> &[VertexId] {
        &self.global
    }

    pub fn local_id(&self, v: VertexId) -> Option<usize> {
        self.global.binary_search(&v).ok()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Member set of a [`LocalGraph`] with cached induced degrees.
#[derive(Debug, Clone)]
pub struct Subgraph {
    graph: Arc<LocalGraph>,
    alive: FixedBitSet,
    degree: Vec<u32>,
    size: usize,
}

impl PartialEq for Subgraph {
    fn eq(&self, other: &Self) -> bool {
        self.alive == other.alive && *self.graph == *other.graph
    }
}

impl Subgraph {
    pub fn full(graph: Arc<LocalGraph>) -> Self {
        let members: Vec<usize> = (0..graph.len()).collect();
        Self::from_members(graph, &members)
    }

    pub fn from_members(graph: Arc<LocalGraph>, members: &[usize]) -> Self {
        let mut alive = FixedBitSet::with_capacity(graph.len());
        for &v in members {
            alive.insert(v);
        }
        let degree = (0..graph.len())
            .map(|v| {
                if alive.contains(v) {
                    graph.neighbors(v).iter().filter(|&&u| alive.contains(u)).count() as u32
                } else {
                    0
                }
            })
            .collect();
        let size = alive.count_ones(..);
        Self { graph, alive, degree, size }
    }

    pub fn graph(&self) -> &Arc<LocalGraph> {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.alive.contains(v)
    }

    pub fn member_set(&self) -> &FixedBitSet {
        &self.alive
    }

    /// Local member ids, ascending.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive.ones()
    }

    pub fn global_members(&self) -> Vec<VertexId> {
        self.alive.ones().map(|v| self.graph.global_id(v)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    pub fn min_degree(&self) -> usize {
        self.members().map(|v| self.degree(v)).min().unwrap_or(0)
    }

    fn drop_vertex(&mut self, v: usize) {
        self.alive.set(v, false);
        self.size -= 1;
        self.degree[v] = 0;
        for &u in self.graph.neighbors(v) {
            if self.alive.contains(u) {
                self.degree[u] -= 1;
            }
        }
    }

    /// Removes `seeds` and then every member whose degree falls below `k`.
    /// Returns all removed vertices in removal order.
    pub fn remove_cascade(&mut self, seeds: impl IntoIterator<Item = usize>, k: usize) -> Vec<usize> {
        let mut removed = Vec::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        stack.reverse();
        while let Some(v) = stack.pop() {
            if !self.alive.contains(v) {
                continue;
            }
            self.drop_vertex(v);
            removed.push(v);
            for &u in self.graph.neighbors(v) {
                if self.alive.contains(u) && (self.degree[u] as usize) < k {
                    stack.push(u);
                }
            }
        }
        removed
    }

    /// Peels to the maximal `k`-core of the current members.
    pub fn peel(&mut self, k: usize) -> Vec<usize> {
        let low: Vec<usize> = self.members().filter(|&v| self.degree(v) < k).collect();
        self.remove_cascade(low, k)
    }

    /// Members reachable from `root`.
    pub fn component_of(&self, root: usize) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.graph.len());
        if !self.contains(root) {
            return seen;
        }
        seen.insert(root);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &u in self.graph.neighbors(v) {
                if self.alive.contains(u) && !seen.put(u) {
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// Drops every member outside `root`'s component; returns the dropped ones.
    pub fn retain_component(&mut self, root: usize) -> Vec<usize> {
        let keep = self.component_of(root);
        let gone: Vec<usize> = self.alive.difference(&keep).collect();
        for &v in &gone {
            self.drop_vertex(v);
        }
        gone
    }

    pub fn is_connected(&self) -> bool {
        match self.members().next() {
            None => true,
            Some(r) => self.component_of(r).count_ones(..) == self.size,
        }
    }
}

/// Why no `(k,t)`-core exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoCoreReason {
    QueryOutOfRange,
    QueryDisconnected,
    AboveUpperBound,
    QueryPeeled,
}

impl std::fmt::Display for NoCoreReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::QueryOutOfRange => "a query vertex lies beyond the distance budget",
            Self::QueryDisconnected => "query vertices are not connected",
            Self::AboveUpperBound => "k exceeds the coreness upper bound",
            Self::QueryPeeled => "a query vertex is not in the k-core",
        })
    }
}

/// The maximal connected `k`-core containing `Q` with query distance `<= t`.
#[derive(Debug, Clone)]
pub struct KTCore {
    pub k: usize,
    pub t: f64,
    subgraph: Subgraph,
    query: Vec<usize>,
    query_distance: Vec<f64>,
}

impl KTCore {
    /// Assembles a core from stored parts, checking its invariants.
    pub fn from_parts(
        graph: LocalGraph,
        query: Vec<usize>,
        query_distance: Vec<f64>,
        k: usize,
        t: f64,
    ) -> Result<Self> {
        let graph = Arc::new(graph);
        let subgraph = Subgraph::full(graph.clone());
        let core = Self { k, t, subgraph, query, query_distance };
        core.check()?;
        Ok(core)
    }

    fn check(&self) -> Result<()> {
        let n = self.len();
        let bad = |m: &str| Err(Error::Network(format!("invalid (k,t)-core: {m}")));
        if self.query.is_empty() || self.query.iter().any(|&q| q >= n) {
            return bad("query not contained");
        }
        if self.query_distance.len() != n || self.query_distance.iter().any(|&d| !distance_ok(d, self.t)) {
            return bad("query distance");
        }
        if self.subgraph.min_degree() < self.k || !self.subgraph.is_connected() {
            return bad("degree or connectivity");
        }
        Ok(())
    }

    pub fn graph(&self) -> &Arc<LocalGraph> {
        self.subgraph.graph()
    }

    /// Full member set as a [`Subgraph`].
    pub fn subgraph(&self) -> &Subgraph {
        &self.subgraph
    }

    pub fn len(&self) -> usize {
        self.subgraph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgraph.is_empty()
    }

    /// Query vertices in local ids.
    pub fn query(&self) -> &[usize] {
        &self.query
    }

    pub fn is_query(&self, v: usize) -> bool {
        self.query.contains(&v)
    }

    /// `D_Q` per local member.
    pub fn query_distance(&self, v: usize) -> f64 {
        self.query_distance[v]
    }

    /// Global member ids, ascending.
    pub fn members(&self) -> &[VertexId] {
        self.graph().globals()
    }
}

fn distance_ok(d: f64, t: f64) -> bool {
    d >= 0.0 && distance::within(d, t)
}

#[derive(Debug, Clone)]
pub enum CoreOutcome {
    Found(KTCore),
    NoCore(NoCoreReason),
}

impl CoreOutcome {
    pub fn core(&self) -> Option<&KTCore> {
        match self {
            CoreOutcome::Found(c) => Some(c),
            CoreOutcome::NoCore(_) => None,
        }
    }

    pub fn into_core(self) -> Option<KTCore> {
        match self {
            CoreOutcome::Found(c) => Some(c),
            CoreOutcome::NoCore(_) => None,
        }
    }
}

/// Computes `H_k^t`. A missing core is a normal outcome, not an error.
pub fn maximal_kt_core(rsn: &RoadSocialNetwork, q: &[VertexId], k: usize, t: f64) -> Result<CoreOutcome> {
    let mut q: Vec<VertexId> = q.to_vec();
    q.sort_unstable();
    q.dedup();
    let dq = query_distances(rsn, &q, t)?;
    if q.iter().any(|&v| dq[v].is_infinite()) {
        return Ok(CoreOutcome::NoCore(NoCoreReason::QueryOutOfRange));
    }
    let filtered: Vec<VertexId> = (0..dq.len()).filter(|&v| dq[v].is_finite()).collect();
    let graph = Arc::new(LocalGraph::induced(&rsn.social, &filtered));
    let local_q: Vec<usize> = q.iter().map(|&v| graph.local_id(v).expect("query vertex kept")).collect();

    let mut sub = Subgraph::full(graph.clone());
    sub.retain_component(local_q[0]);
    if local_q.iter().any(|&v| !sub.contains(v)) {
        return Ok(CoreOutcome::NoCore(NoCoreReason::QueryDisconnected));
    }
    let m = sub.members().map(|v| sub.degree(v)).sum::<usize>() / 2;
    if k > coreness_upper_bound(sub.len(), m) {
        return Ok(CoreOutcome::NoCore(NoCoreReason::AboveUpperBound));
    }
    sub.peel(k);
    if local_q.iter().any(|&v| !sub.contains(v)) {
        return Ok(CoreOutcome::NoCore(NoCoreReason::QueryPeeled));
    }
    sub.retain_component(local_q[0]);
    if local_q.iter().any(|&v| !sub.contains(v)) {
        return Ok(CoreOutcome::NoCore(NoCoreReason::QueryDisconnected));
    }

    let members = sub.global_members();
    let core_graph = LocalGraph::induced(&rsn.social, &members);
    let query = q.iter().map(|&v| core_graph.local_id(v).expect("query kept")).collect();
    let distances = members.iter().map(|&v| dq[v]).collect();
    KTCore::from_parts(core_graph, query, distances, k, t).map(CoreOutcome::Found)
}

/// Result of deleting one vertex from a community.
#[derive(Debug, Clone)]
pub enum DeleteOutcome {
    /// The remaining `(k,t)`-core and every vertex removed (victim first).
    Deleted { community: Subgraph, removed: Vec<usize> },
    /// Deleting the vertex destroys every `k`-core containing `Q`.
    EarlyTermination,
}

/// Deletes `u` from `h`, cascades degree violations, and keeps `Q`'s component.
pub fn dfs_delete(h: &Subgraph, u: usize, k: usize, q: &[usize]) -> DeleteOutcome {
    if q.contains(&u) || !h.contains(u) {
        return DeleteOutcome::EarlyTermination;
    }
    let mut next = h.clone();
    let mut removed = next.remove_cascade([u], k);
    if q.iter().any(|&v| !next.contains(v)) {
        return DeleteOutcome::EarlyTermination;
    }
    let reach = next.component_of(q[0]);
    if q.iter().any(|&v| !reach.contains(v)) {
        return DeleteOutcome::EarlyTermination;
    }
    removed.extend(next.retain_component(q[0]));
    DeleteOutcome::Deleted { community: next, removed }
}
