//! r-dominance graph over the members of a `(k,t)`-core.
//!
//! Vertices are popped best-first by their score at the region's pivot; a
//! popped vertex can only be r-dominated by vertices popped before it. Arcs
//! are transitively reduced. Ancestor/descendant closures are kept as bitsets
//! since both searches query reachability far more often than arcs.

mod spatial;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

pub use spatial::{Children, IndexNode, SpatialIndex, FANOUT};

use crate::error::{Error, Result};
use crate::geometry::{halfspace_between, r_dominance_test, score, AttributeTable, Dominance, Region};

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceGraph {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    layer: Vec<usize>,
    anc: Vec<FixedBitSet>,
    desc: Vec<FixedBitSet>,
    order: Vec<usize>,
}

struct HeapItem {
    key: f64,
    is_box: bool,
    id: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then(self.is_box.cmp(&other.is_box))
            .then(other.id.cmp(&self.id))
    }
}

/// Whether `u` r-dominates every point of a box with upper corner `hi`.
fn dominates_corner(xu: &[f64], hi: &[f64], region: &Region) -> bool {
    let h = halfspace_between(xu, hi, 0, 1);
    let tol = 1e-12 * (1.0 + h.b.abs() + h.a.iter().map(|x| x.abs()).sum::<f64>());
    let mut strict = false;
    for c in region.corners() {
        let v = h.eval(c);
        if v < -tol {
            return false;
        }
        strict |= v > tol;
    }
    strict
}

impl DominanceGraph {
    /// Builds the graph over all rows of `table`.
    pub fn build(table: &AttributeTable, region: &Region) -> Result<Self> {
        if table.dim() != region.dim() + 1 {
            return Err(Error::Geometry(format!(
                "attribute dimension {} does not match region dimension {}",
                table.dim(),
                region.dim()
            )));
        }
        let n = table.len();
        let mut anc = vec![FixedBitSet::with_capacity(n); n];
        let mut order = Vec::with_capacity(n);
        if n == 0 {
            return Ok(Self::assemble(anc, order));
        }
        let index = SpatialIndex::build(table);
        let pivot = region.pivot();
        let mut inherited: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); index.num_nodes()];
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem { key: score(&index.node(index.root()).hi, pivot), is_box: true, id: index.root() });
        let mut confirmed: Vec<usize> = Vec::with_capacity(n);
        while let Some(item) = heap.pop() {
            if item.is_box {
                let node = index.node(item.id);
                let mut dom = inherited[item.id].clone();
                for &u in &confirmed {
                    if !dom.contains(u) && dominates_corner(table.row(u), &node.hi, region) {
                        dom.insert(u);
                        dom.union_with(&anc[u]);
                    }
                }
                match &node.children {
                    Children::Points(points) => {
                        for &v in points {
                            anc[v] = dom.clone();
                            heap.push(HeapItem { key: table.score(v, pivot), is_box: false, id: v });
                        }
                    }
                    Children::Nodes(kids) => {
                        for &c in kids {
                            inherited[c] = dom.clone();
                            heap.push(HeapItem { key: score(&index.node(c).hi, pivot), is_box: true, id: c });
                        }
                    }
                }
            } else {
                let v = item.id;
                let mut set = std::mem::take(&mut anc[v]);
                for &u in &confirmed {
                    if !set.contains(u) && r_dominance_test(u, v, region, table) == Dominance::Dominates {
                        set.insert(u);
                        set.union_with(&anc[u]);
                    }
                }
                anc[v] = set;
                confirmed.push(v);
                order.push(v);
            }
        }
        Ok(Self::assemble(anc, order))
    }

    fn assemble(anc: Vec<FixedBitSet>, order: Vec<usize>) -> Self {
        let n = anc.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut layer = vec![0usize; n];
        let mut desc = vec![FixedBitSet::with_capacity(n); n];
        for &v in &order {
            let mut implied = FixedBitSet::with_capacity(n);
            for u in anc[v].ones() {
                implied.union_with(&anc[u]);
            }
            parents[v] = anc[v].difference(&implied).collect();
            layer[v] = parents[v].iter().map(|&p| layer[p] + 1).max().unwrap_or(0);
            for u in anc[v].ones() {
                desc[u].insert(v);
            }
        }
        for v in 0..n {
            for &p in &parents[v] {
                children[p].push(v);
            }
        }
        Self { parents, children, layer, anc, desc, order }
    }

    /// Rebuilds a graph from reduced arcs, checking it is acyclic and reduced.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut preds = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for &(u, v) in arcs {
            if u >= n || v >= n || u == v {
                return Err(Error::Index(format!("bad arc ({u}, {v})")));
            }
            preds[v].push(u);
            succ[u].push(v);
            indeg[v] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Index("dominance arcs contain a cycle".into()));
        }
        let mut anc = vec![FixedBitSet::with_capacity(n); n];
        for &v in &order {
            let mut set = FixedBitSet::with_capacity(n);
            for &u in &preds[v] {
                set.insert(u);
                set.union_with(&anc[u]);
            }
            anc[v] = set;
        }
        let g = Self::assemble(anc, order);
        let mut stored: Vec<(usize, usize)> = arcs.to_vec();
        stored.sort_unstable();
        if stored != g.arcs() {
            return Err(Error::Index("dominance arcs are not transitively reduced".into()));
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.layer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layer.is_empty()
    }

    /// Reduced arcs `(dominator, dominee)`, sorted.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs: Vec<(usize, usize)> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(v, ps)| ps.iter().map(move |&p| (p, v)))
            .collect();
        arcs.sort_unstable();
        arcs
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Every vertex that r-dominates `v`.
    pub fn ancestors(&self, v: usize) -> &FixedBitSet {
        &self.anc[v]
    }

    /// Every vertex `v` r-dominates.
    pub fn descendants(&self, v: usize) -> &FixedBitSet {
        &self.desc[v]
    }

    pub fn dominates(&self, u: usize, v: usize) -> bool {
        self.anc[v].contains(u)
    }

    /// Vertices in pop order (non-increasing pivot score); a topological order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn layers(&self) -> &[usize] {
        &self.layer
    }

    pub fn max_layer(&self) -> usize {
        self.layer.iter().copied().max().unwrap_or(0)
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn layer_of(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        Ok(self.layer[v])
    }

    /// Number of vertices r-dominating `v`.
    pub fn rdominance_count(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        Ok(self.anc[v].count_ones(..))
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.children[v].is_empty()).collect()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.parents[v].is_empty()).collect()
    }

    /// Views of the graph restricted to `members` (G_e) and to the rest (G_c).
    pub fn induced_views(&self, members: &FixedBitSet) -> (InducedView<'_>, InducedView<'_>) {
        let mut inside = FixedBitSet::with_capacity(self.len());
        inside.union_with(members);
        let mut outside = inside.clone();
        outside.toggle_range(..);
        (InducedView::new(self, inside), InducedView::new(self, outside))
    }

    /// DOT rendering of the reduced DAG with the given vertex labels.
    pub fn to_dot(&self, label: impl Fn(usize) -> String) -> String {
        let mut out = String::from("digraph dominance {\n");
        for v in 0..self.len() {
            let _ = writeln!(out, "  n{v} [label=\"{}\\nlayer {}\"];", label(v), self.layer[v]);
        }
        for (u, v) in self.arcs() {
            let _ = writeln!(out, "  n{u} -> n{v};");
        }
        out.push_str("}\n");
        out
    }
}

/// The dominance graph restricted to a vertex subset. Reachability is taken
/// from the full graph, so `u` dominates `v` here iff it does in `G_d`.
#[derive(Debug, Clone)]
pub struct InducedView<'a> {
    graph: &'a DominanceGraph,
    members: FixedBitSet,
}

impl<'a> InducedView<'a> {
    pub fn new(graph: &'a DominanceGraph, members: FixedBitSet) -> Self {
        Self { graph, members }
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// Members dominating no other member (`l_b`).
    pub fn leaves(&self) -> Vec<usize> {
        self.members
            .ones()
            .filter(|&v| self.graph.desc[v].is_disjoint(&self.members))
            .collect()
    }

    /// Members dominated by no other member (`l_t`).
    pub fn tops(&self) -> Vec<usize> {
        self.members
            .ones()
            .filter(|&v| self.graph.anc[v].is_disjoint(&self.members))
            .collect()
    }

    /// Number of members dominating `v`.
    pub fn count(&self, v: usize) -> usize {
        self.graph.anc[v].intersection(&self.members).count()
    }

    /// Longest dominance chain inside the view ending at each member.
    pub fn layers(&self) -> Vec<Option<usize>> {
        let mut layer = vec![None; self.graph.len()];
        for &v in &self.graph.order {
            if self.members.contains(v) {
                let l = self.graph.anc[v]
                    .intersection(&self.members)
                    .filter_map(|u| layer[u])
                    .map(|l: usize| l + 1)
                    .max()
                    .unwrap_or(0);
                layer[v] = Some(l);
            }
        }
        layer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region() -> Region {
        Region::parse("0.1,0.5x0.2,0.4").unwrap()
    }

    #[test]
    fn classical_pair() {
        let t = AttributeTable::new(3, &[vec![1.0, 1.0, 1.0], vec![3.0, 3.0, 3.0]]).unwrap();
        let g = DominanceGraph::build(&t, &region()).unwrap();
        assert_eq!(g.arcs(), vec![(1, 0)]);
        assert_eq!(g.layers(), &[1, 0]);
        assert_eq!(g.rdominance_count(0).unwrap(), 1);
        assert!(g.layer_of(5).is_err());
    }

    #[test]
    fn identical_vectors_form_id_chain() {
        let t = AttributeTable::new(3, &vec![vec![0.5, 0.5, 0.5]; 5]).unwrap();
        let g = DominanceGraph::build(&t, &region()).unwrap();
        assert_eq!(g.arcs(), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(g.leaves(), vec![4]);
        assert_eq!(g.roots(), vec![0]);
        assert_eq!(g.layers(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn arcless_and_views() {
        let t = AttributeTable::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = Region::parse("0.3,0.7").unwrap();
        let g = DominanceGraph::build(&t, &r).unwrap();
        assert!(g.arcs().is_empty());
        assert_eq!(g.leaves(), vec![0, 1]);
        assert_eq!(g.roots(), vec![0, 1]);
        let all: FixedBitSet = (0..2).collect();
        let (ge, gc) = g.induced_views(&all);
        assert_eq!(ge.leaves(), g.leaves());
        assert!(gc.is_empty());
    }

    #[test]
    fn from_arcs_round_trip_and_rejects_bad() {
        let t = AttributeTable::new(3, &vec![vec![0.5, 0.5, 0.5]; 3]).unwrap();
        let g = DominanceGraph::build(&t, &region()).unwrap();
        let back = DominanceGraph::from_arcs(3, &g.arcs()).unwrap();
        assert_eq!(back.arcs(), g.arcs());
        assert_eq!(back.layers(), g.layers());
        assert!(DominanceGraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).is_err());
        assert!(DominanceGraph::from_arcs(2, &[(0, 1), (1, 0)]).is_err());
    }
}
