//! Exact verification of a candidate community.
//!
//! A candidate `H` is the non-contained MAC at `w` iff two things hold.
//! First, peeling must reach `H`: with `e` the lowest-scoring member of `H`
//! at `w`, deleting every outside vertex that scores below `e` from `H_k^t`
//! and cascading must leave exactly `H` as `Q`'s component. Second, deleting
//! `e` itself must break every `k`-core around `Q`, i.e. `e` is not an anchor.
//!
//! The set of outside vertices below `e` is closed downwards in G_d, and
//! reaching `H` is monotone in that set, so cells are refined lazily: a top
//! of the undecided outside vertices that must be low is constrained below
//! `e` directly, and only when every top could go either way does the cell
//! split in two.

use fixedbitset::FixedBitSet;

use super::{Bound, DiscardReason, VerifyOutcome, VerifyStatus};
use crate::error::Result;
use crate::geometry::{Cell, HalfSpace, Side};
use crate::global::{min_score_partition, HalfSpaceCache};
use crate::ktcore::{dfs_delete, DeleteOutcome, Subgraph};
use crate::query::Prepared;

/// `Q`'s component after deleting `removed` from `H_k^t` and cascading.
pub(crate) fn forced_community(p: &Prepared, removed: &FixedBitSet) -> Option<FixedBitSet> {
    let mut g = p.core.subgraph().clone();
    g.remove_cascade(removed.ones(), p.k());
    let q = p.query();
    if q.iter().any(|&v| !g.contains(v)) {
        return None;
    }
    let comp = g.component_of(q[0]);
    q.iter().all(|&v| comp.contains(v)).then_some(comp)
}

fn forces(p: &Prepared, removed: &FixedBitSet, h: &FixedBitSet) -> bool {
    forced_community(p, removed).as_ref() == Some(h)
}

fn outside_of(p: &Prepared, h: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(p.core.len());
    out.insert_range(..);
    out.difference_with(h);
    out
}

/// Outside vertices r-dominating some member; they outscore `H`'s minimum
/// everywhere, so peeling never removes them directly.
fn never_low(p: &Prepared, h: &FixedBitSet, outside: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(p.core.len());
    for v in outside.ones() {
        if !p.gd.descendants(v).is_disjoint(h) {
            out.insert(v);
        }
    }
    out
}

/// Structural screen. Peeling starts at a G_d leaf, so an outside set with
/// no such leaf can never be stripped; and deleting every outside vertex
/// that might ever score below `H` must already reach `H`.
pub fn is_promising(p: &Prepared, h: &FixedBitSet) -> std::result::Result<(), DiscardReason> {
    let outside = outside_of(p, h);
    if outside.is_clear() {
        return Ok(());
    }
    if !p.gd.leaves().into_iter().any(|v| outside.contains(v)) {
        return Err(DiscardReason::Corollary2_1);
    }
    let mut removable = outside.clone();
    removable.difference_with(&never_low(p, h, &outside));
    if !forces(p, &removable, h) {
        return Err(DiscardReason::Corollary2_2);
    }
    Ok(())
}

/// Non-query leaves of G_e whose deletion still leaves a `k`-core around `Q`.
pub fn find_anchors(p: &Prepared, h: &Subgraph) -> Vec<usize> {
    let (inside, _) = p.gd.induced_views(h.member_set());
    inside
        .leaves()
        .into_iter()
        .filter(|&v| !p.core.is_query(v))
        .filter(|&v| matches!(dfs_delete(h, v, p.k(), p.query()), DeleteOutcome::Deleted { .. }))
        .collect()
}

/// Classifies a top `v` of the outside view: whether deleting the outside
/// vertices it dominates drags it below degree `k`, or whether it and
/// another outside top each pull the other out when deleted.
pub fn detect_bound(p: &Prepared, outside: &FixedBitSet, v: usize) -> Bound {
    let k = p.k();
    let below = |u: usize| {
        let mut s = p.gd.descendants(u).clone();
        s.intersect_with(outside);
        s
    };
    let below_v = below(v);
    let mut g = p.core.subgraph().clone();
    g.remove_cascade(below_v.ones(), k);
    if !g.contains(v) {
        return Bound::DeletableFromBelow;
    }
    let tops: Vec<usize> = p
        .gd
        .induced_views(&{
            let mut inside = outside.clone();
            inside.toggle_range(..);
            inside
        })
        .1
        .tops();
    for other in tops.into_iter().filter(|&u| u != v) {
        let mut base = p.core.subgraph().clone();
        let mut ctx = below_v.clone();
        ctx.union_with(&below(other));
        base.remove_cascade(ctx.ones(), k);
        if !base.contains(v) || !base.contains(other) {
            continue;
        }
        let mut a = base.clone();
        a.remove_cascade([v], k);
        let mut b = base;
        b.remove_cascade([other], k);
        if !a.contains(other) && !b.contains(v) {
            return Bound::MutuallyBound(other);
        }
    }
    Bound::Free
}

struct Branch {
    cell: Cell,
    low: FixedBitSet,
    undecided: FixedBitSet,
}

/// Verifies `h` over the whole region.
pub fn verify(p: &Prepared, h: &Subgraph, cache: &mut HalfSpaceCache) -> Result<VerifyOutcome> {
    let set = h.member_set();
    if let Err(reason) = is_promising(p, set) {
        return Ok(VerifyOutcome { status: VerifyStatus::Discarded(reason), anchors: Vec::new(), halfspaces: Vec::new() });
    }
    let anchors = find_anchors(p, h);
    let (inside, _) = p.gd.induced_views(set);
    let outside = outside_of(p, set);
    let high = never_low(p, set, &outside);
    let mut halfspaces: Vec<HalfSpace> = Vec::new();
    let mut record = |hs: &HalfSpace| {
        if !halfspaces.contains(hs) {
            halfspaces.push(hs.clone());
        }
    };
    let leaves = inside.leaves();
    let parts = min_score_partition(&p.region, &Cell::root(&p.region), &leaves, &p.table, cache)?;
    let mut valid = Vec::new();
    for (cell, e) in parts {
        if anchors.contains(&e) {
            continue;
        }
        // Outside vertices `e` dominates are below it everywhere.
        let mut low = p.gd.descendants(e).clone();
        low.intersect_with(&outside);
        let mut undecided = outside.clone();
        undecided.difference_with(&high);
        undecided.difference_with(&low);
        let mut stack = vec![Branch { cell, low, undecided }];
        while let Some(mut b) = stack.pop() {
            let mut all = b.low.clone();
            all.union_with(&b.undecided);
            if !forces(p, &all, set) {
                continue;
            }
            if forces(p, &b.low, set) {
                valid.push(b.cell);
                continue;
            }
            let tops: Vec<usize> =
                b.undecided.ones().filter(|&c| p.gd.ancestors(c).is_disjoint(&b.undecided)).collect();
            let mut must = Vec::new();
            for &c in &tops {
                all.set(c, false);
                if !forces(p, &all, set) {
                    must.push(c);
                }
                all.insert(c);
            }
            let mut alive = true;
            for &c in &must {
                let hs = cache.get(e, c, &p.table);
                record(&hs);
                match b.cell.refine(&p.region, &hs, Side::Pos) {
                    Some(cell) => b.cell = cell,
                    None => {
                        alive = false;
                        break;
                    }
                }
                mark_low(p, &mut b, c);
            }
            if !alive {
                continue;
            }
            if !must.is_empty() {
                stack.push(b);
                continue;
            }
            let c = tops[0];
            let hs = cache.get(e, c, &p.table);
            record(&hs);
            if let Some(cell) = b.cell.refine(&p.region, &hs, Side::Neg) {
                let mut undecided = b.undecided.clone();
                undecided.set(c, false);
                stack.push(Branch { cell, low: b.low.clone(), undecided });
            }
            if let Some(cell) = b.cell.refine(&p.region, &hs, Side::Pos) {
                let mut lo = Branch { cell, low: b.low, undecided: b.undecided };
                mark_low(p, &mut lo, c);
                stack.push(lo);
            }
        }
    }
    let status = if valid.is_empty() {
        VerifyStatus::Discarded(DiscardReason::EmptyPartition)
    } else {
        VerifyStatus::Valid(valid)
    };
    Ok(VerifyOutcome { status, anchors, halfspaces })
}

/// Moves `c` and every undecided vertex it dominates to the low set.
fn mark_low(p: &Prepared, b: &mut Branch, c: usize) {
    let mut down = p.gd.descendants(c).clone();
    down.intersect_with(&b.undecided);
    down.insert(c);
    b.low.union_with(&down);
    b.undecided.difference_with(&down);
}
