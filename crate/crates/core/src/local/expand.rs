//! Candidate generation by priority-driven growth around `Q`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use super::{Candidate, Strategy};
use crate::ktcore::Subgraph;
use crate::query::Prepared;

/// The `Q`-component of the `k`-core of `members`, if it holds all of `Q`.
pub(crate) fn q_core(p: &Prepared, members: &FixedBitSet) -> Option<Subgraph> {
    let list: Vec<usize> = members.ones().collect();
    let mut h = Subgraph::from_members(p.core.graph().clone(), &list);
    h.peel(p.k());
    let q = p.query();
    if q.iter().any(|&v| !h.contains(v)) {
        return None;
    }
    h.retain_component(q[0]);
    q.iter().all(|&v| h.contains(v)).then_some(h)
}

/// Smallest superset of `h` that is a `Q`-component `k`-core containing
/// every vertex r-dominating one of its members. Any non-contained MAC
/// containing `h` contains this closure.
pub(crate) fn dominance_closure(p: &Prepared, h: Subgraph) -> Subgraph {
    let mut current = h;
    loop {
        let mut up = current.member_set().clone();
        for v in current.members() {
            up.union_with(p.gd.ancestors(v));
        }
        let next = q_core(p, &up).expect("a superset of a core around Q keeps it");
        // Ancestors that cannot stay in the core are cascaded away anyway.
        if next.member_set() == current.member_set() {
            return current;
        }
        current = next;
    }
}

/// Max-heap key: priority, then the lower id.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

struct Growth<'a> {
    p: &'a Prepared,
    strategy: Strategy,
    zeta: f64,
    banned: &'a FixedBitSet,
    members: FixedBitSet,
    /// Neighbors inside `members`, for every vertex of the core.
    inner: Vec<usize>,
    trace: Vec<usize>,
    /// Frontier entries for the density priority; stale ones are skipped on pop.
    heap: BinaryHeap<Key>,
}

impl<'a> Growth<'a> {
    fn new(p: &'a Prepared, strategy: Strategy, zeta: f64, banned: &'a FixedBitSet) -> Self {
        let mut g = Self {
            p,
            strategy,
            zeta,
            banned,
            members: FixedBitSet::with_capacity(p.core.len()),
            inner: vec![0; p.core.len()],
            trace: Vec::new(),
            heap: BinaryHeap::new(),
        };
        for &v in p.query() {
            g.add(v);
        }
        g.trace.clear();
        g
    }

    fn density(&self, v: usize) -> Option<f64> {
        match self.strategy {
            Strategy::LayerDensity { lambda, .. } => {
                Some(lambda * self.inner[v] as f64 + self.zeta - self.p.gd.layers()[v] as f64)
            }
            Strategy::LayerMindeg { .. } => None,
        }
    }

    fn add(&mut self, v: usize) {
        self.members.insert(v);
        self.trace.push(v);
        for &u in self.p.core.graph().neighbors(v) {
            self.inner[u] += 1;
            if !self.members.contains(u) && !self.banned.contains(u) {
                if let Some(f) = self.density(u) {
                    self.heap.push(Key(f, u));
                }
            }
        }
    }

    fn min_degree(&self) -> (usize, Vec<usize>) {
        let d = self.members.ones().map(|v| self.inner[v]).min().unwrap_or(0);
        (d, self.members.ones().filter(|&v| self.inner[v] == d).collect())
    }

    /// Frontier vertex with the highest priority; ties go to the lower id.
    fn select(&mut self) -> Option<usize> {
        if let Strategy::LayerDensity { .. } = self.strategy {
            while let Some(Key(f, v)) = self.heap.pop() {
                if !self.members.contains(v) && self.density(v) == Some(f) {
                    return Some(v);
                }
            }
            return None;
        }
        let graph = self.p.core.graph();
        let layers = self.p.gd.layers();
        let (d, list) = self.min_degree();
        let mut set = FixedBitSet::with_capacity(self.members.len());
        set.extend(list.iter().copied());
        let mut best: Option<(f64, usize)> = None;
        for v in 0..graph.len() {
            if self.members.contains(v) || self.inner[v] == 0 || self.banned.contains(v) {
                continue;
            }
            let touching = graph.neighbors(v).iter().filter(|&&u| set.contains(u)).count();
            let raised = if touching == list.len() { d + 1 } else { d };
            let f1 = self.inner[v].min(raised) as f64 - d as f64;
            let f = self.zeta * f1 + (self.zeta - layers[v] as f64);
            if best.map_or(true, |(bf, _)| f > bf) {
                best = Some((f, v));
            }
        }
        best.map(|(_, v)| v)
    }
}

enum Job {
    Grow(FixedBitSet),
    /// Delete one vertex from a candidate's member set and take what remains.
    Shrink(FixedBitSet, FixedBitSet),
}

/// Grows candidates from `Q`. A run adds the best frontier vertex one at a
/// time until the grown set holds a `k`-core around `Q`; that core, its
/// dominance closure and the core of all unbanned vertices become
/// candidates. Jobs are explored breadth-first: for each non-query G_e leaf
/// `e` of a candidate, one job reruns the growth with `e` banned and another
/// takes the core left after deleting `e` from the candidate. At most
/// `budget` distinct candidates are returned.
pub fn expand(p: &Prepared, strategy: Strategy, budget: usize) -> Vec<Candidate> {
    let zeta = strategy.zeta().max(p.gd.max_layer() as f64 + 1.0);
    let n = p.core.len();
    let mut seen = HashSet::new();
    let mut tried = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([Job::Grow(FixedBitSet::with_capacity(n))]);
    while let Some(job) = queue.pop_front() {
        if out.len() >= budget {
            break;
        }
        let (found, bans, trace) = match job {
            Job::Grow(bans) => {
                let Some((h, trace)) = grow(p, strategy, zeta, &bans) else { continue };
                let closed = dominance_closure(p, h.clone());
                // Growing on until the frontier empties ends at the core of all unbanned vertices.
                let mut rest = FixedBitSet::with_capacity(n);
                rest.insert_range(..);
                rest.difference_with(&bans);
                let last = q_core(p, &rest).unwrap_or_else(|| closed.clone());
                (vec![h, closed, last], bans, trace)
            }
            Job::Shrink(rest, bans) => match q_core(p, &rest) {
                Some(h) => (vec![h], bans, Vec::new()),
                None => continue,
            },
        };
        for c in found {
            if !seen.insert(c.member_set().clone()) {
                continue;
            }
            let (inside, _) = p.gd.induced_views(c.member_set());
            let mut leaves = inside.leaves();
            // Deepest leaves score lowest, so they go first.
            leaves.sort_by_key(|&e| (std::cmp::Reverse(p.gd.layers()[e]), e));
            for e in leaves.into_iter().filter(|&e| !p.core.is_query(e)) {
                if !bans.contains(e) {
                    let mut next = bans.clone();
                    next.insert(e);
                    if tried.insert(next.clone()) {
                        queue.push_back(Job::Grow(next));
                    }
                }
                let mut rest = c.member_set().clone();
                rest.set(e, false);
                queue.push_back(Job::Shrink(rest, bans.clone()));
            }
            if out.len() < budget {
                out.push(Candidate { members: c.members().collect(), trace: trace.clone() });
            }
        }
    }
    out
}

/// One growth run from `Q` avoiding `bans`, stopped at the first core.
/// Holding a core is monotone along the growth order, so the shortest such
/// prefix is found by galloping and bisection over the full order.
fn grow(p: &Prepared, strategy: Strategy, zeta: f64, bans: &FixedBitSet) -> Option<(Subgraph, Vec<usize>)> {
    let mut g = Growth::new(p, strategy, zeta, bans);
    while let Some(v) = g.select() {
        g.add(v);
    }
    let order = g.trace;
    let base = FixedBitSet::from_iter(p.query().iter().copied());
    let core_at = |len: usize| {
        let mut set = base.clone();
        set.grow(p.core.len());
        set.extend(order[..len].iter().copied());
        q_core(p, &set)
    };
    if let Some(h) = core_at(0) {
        return Some((h, Vec::new()));
    }
    let (mut lo, mut hi) = (0, 1);
    let mut found = loop {
        let len = hi.min(order.len());
        if let Some(h) = core_at(len) {
            hi = len;
            break h;
        }
        if len == order.len() {
            return None;
        }
        lo = len;
        hi *= 2;
    };
    // `core_at(lo)` has no core, `core_at(hi)` does.
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match core_at(mid) {
            Some(h) => {
                hi = mid;
                found = h;
            }
            None => lo = mid,
        }
    }
    Some((found, order[..hi].to_vec()))
}
