//! Local search: expand candidates around `Q`, then verify each one.
//!
//! Candidates come from [`expand`]; each is screened by [`is_promising`] and
//! then [`verify`] computes the exact cells where it is the non-contained
//! MAC. Coverage of the region is not guaranteed: cells whose MAC never
//! shows up as a candidate are simply missing from the output.

mod expand;
mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

pub use expand::expand;
pub use verify::{detect_bound, find_anchors, is_promising, verify};

use crate::error::{Error, Result};
use crate::geometry::{Cell, HalfSpace, Region, Side};
use crate::global::HalfSpaceCache;
use crate::ktcore::Subgraph;
use crate::network::{RoadSocialNetwork, VertexId};
use crate::query::{Mode, Prepared};
use crate::result::{ResultCell, ResultSet};

pub const DEFAULT_ZETA: f64 = 100.0;
pub const DEFAULT_LAMBDA: f64 = 10.0;
pub const DEFAULT_BUDGET: usize = 32;

/// Frontier priority used by [`expand`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// `lambda * (neighbors inside) + (zeta - layer)`.
    LayerDensity { lambda: f64, zeta: f64 },
    /// `zeta * (min-degree gain) + (zeta - layer)`.
    LayerMindeg { zeta: f64 },
}

impl Strategy {
    pub fn zeta(self) -> f64 {
        match self {
            Strategy::LayerDensity { zeta, .. } | Strategy::LayerMindeg { zeta } => zeta,
        }
    }

    /// Builds a strategy from its name and parameters.
    pub fn from_name(name: &str, lambda: f64, zeta: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) || !zeta.is_finite() {
            return Err(Error::Query(format!("invalid strategy parameters lambda={lambda} zeta={zeta}")));
        }
        match name {
            "layer-density" => Ok(Strategy::LayerDensity { lambda, zeta }),
            "layer-mindeg" => Ok(Strategy::LayerMindeg { zeta }),
            other => Err(Error::Query(format!("unknown strategy `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::LayerDensity { .. } => "layer-density",
            Strategy::LayerMindeg { .. } => "layer-mindeg",
        }
    }
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::LayerDensity { lambda: DEFAULT_LAMBDA, zeta: DEFAULT_ZETA }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsParams {
    pub strategy: Strategy,
    pub budget: usize,
}

impl Default for LsParams {
    fn default() -> Self {
        Self { strategy: Strategy::default(), budget: DEFAULT_BUDGET }
    }
}

/// A connected `k`-core containing `Q`, in local ids, with the vertices the
/// growth added (in order) before it was snapshotted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub members: Vec<usize>,
    pub trace: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiscardReason {
    /// No outside vertex is a G_d leaf, so peeling cannot strip them.
    Corollary2_1,
    /// Outside vertices that always outscore a member keep the core larger.
    Corollary2_2,
    /// No weight in the region makes the candidate the non-contained MAC.
    EmptyPartition,
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscardReason::Corollary2_1 => "Corollary2-1",
            DiscardReason::Corollary2_2 => "Corollary2-2",
            DiscardReason::EmptyPartition => "empty-partition",
        })
    }
}

impl FromStr for DiscardReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Corollary2-1" => Ok(DiscardReason::Corollary2_1),
            "Corollary2-2" => Ok(DiscardReason::Corollary2_2),
            "empty-partition" => Ok(DiscardReason::EmptyPartition),
            other => Err(Error::Query(format!("unknown discard reason `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyStatus {
    Valid(Vec<Cell>),
    Discarded(DiscardReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub status: VerifyStatus,
    pub anchors: Vec<usize>,
    /// Distinct competitor half-spaces the refinement cut with.
    pub halfspaces: Vec<HalfSpace>,
}

/// How an outside top vertex relates to cascaded deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    DeletableFromBelow,
    MutuallyBound(usize),
    Free,
}

/// Counters from one local search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LsStats {
    pub candidates: usize,
    pub valid: usize,
    pub discarded: BTreeMap<DiscardReason, usize>,
}

struct Round {
    cell: Cell,
    /// Last vertex whose arrival grew the community; later triggers score below it.
    cap: usize,
    /// Vertices known to score at least as high as `cap`.
    inside: FixedBitSet,
    ranks: Vec<FixedBitSet>,
}

struct Pending {
    cell: Cell,
    inside: FixedBitSet,
    undecided: FixedBitSet,
}

/// Lowest-scoring member of `members` at `w`; ties go to the larger id.
fn victim_at(p: &Prepared, members: &FixedBitSet, w: &[f64]) -> usize {
    let mut best: Option<(f64, usize)> = None;
    for v in members.ones() {
        let s = p.table.score(v, w);
        if best.map_or(true, |(bs, _)| s <= bs) {
            best = Some((s, v));
        }
    }
    best.expect("community is nonempty").1
}

/// Ranks below `h` inside one of its cells. Adding vertices back in
/// decreasing score order, the next rank appears when the first vertex
/// `u` (the trigger) arrives whose presence grows `Q`'s `k`-core. For each
/// candidate trigger the cell is refined lazily: outside vertices are only
/// compared with `u` when the growth tests depend on them.
fn lower_ranks(
    p: &Prepared,
    h: &Subgraph,
    cell: Cell,
    depth: usize,
    cache: &mut HalfSpaceCache,
) -> Result<Vec<(Cell, Vec<FixedBitSet>)>> {
    let n = p.core.len();
    let core_of = |set: &FixedBitSet| expand::q_core(p, set).map(|c| c.member_set().clone());
    let cap = victim_at(p, h.member_set(), &cell.witness);
    let mut inside = h.member_set().clone();
    inside.union_with(p.gd.ancestors(cap));
    let mut stack = vec![Round { cell, cap, inside, ranks: vec![h.member_set().clone()] }];
    let mut out = Vec::new();
    while let Some(st) = stack.pop() {
        let rank = st.ranks.last().expect("nonempty").clone();
        if st.ranks.len() >= depth || rank.count_ones(..) == n {
            out.push((st.cell, st.ranks));
            continue;
        }
        let grows = |set: &FixedBitSet| core_of(set).is_some_and(|c| c != rank);
        let mut extended = false;
        for u in (0..n).filter(|&u| !st.inside.contains(u)) {
            let mut inn = st.inside.clone();
            inn.union_with(p.gd.ancestors(u));
            let mut und = inn.clone();
            und.union_with(p.gd.descendants(u));
            und.insert(u);
            und.toggle_range(..);
            let mut widest = inn.clone();
            widest.union_with(&und);
            widest.insert(u);
            if !grows(&widest) || grows(&inn) || p.gd.dominates(u, st.cap) {
                continue;
            }
            let cell = if p.gd.dominates(st.cap, u) {
                Some(st.cell.clone())
            } else {
                st.cell.refine(&p.region, &cache.get(st.cap, u, &p.table), Side::Pos)
            };
            let Some(cell) = cell else { continue };
            let mut pending = vec![Pending { cell, inside: inn, undecided: und }];
            while let Some(mut b) = pending.pop() {
                let mut with_u = b.inside.clone();
                with_u.insert(u);
                let mut all = b.inside.clone();
                all.union_with(&b.undecided);
                if grows(&b.inside) {
                    continue;
                }
                let mut all_u = all.clone();
                all_u.insert(u);
                if !grows(&all_u) {
                    continue;
                }
                if grows(&with_u) && !grows(&all) && core_of(&with_u) == core_of(&all_u) {
                    let next = core_of(&with_u).expect("grows");
                    let mut inside = with_u;
                    inside.union_with(&next);
                    let mut ranks = st.ranks.clone();
                    ranks.push(next);
                    stack.push(Round { cell: b.cell, cap: u, inside, ranks });
                    extended = true;
                    continue;
                }
                // Undecided vertices whose side relative to `u` is forced.
                let mut forced = Vec::new();
                for x in b.undecided.ones() {
                    all_u.set(x, false);
                    if !grows(&all_u) {
                        forced.push((x, Side::Pos));
                    }
                    all_u.insert(x);
                    let mut one = b.inside.clone();
                    one.insert(x);
                    if grows(&one) {
                        forced.push((x, Side::Neg));
                    }
                }
                let mut alive = true;
                for &(x, side) in &forced {
                    if !b.undecided.contains(x) {
                        // Settled by an earlier decision; a contradiction kills the branch.
                        if b.inside.contains(x) != (side == Side::Pos) {
                            alive = false;
                            break;
                        }
                        continue;
                    }
                    match b.cell.refine(&p.region, &cache.get(x, u, &p.table), side) {
                        Some(c) => b.cell = c,
                        None => {
                            alive = false;
                            break;
                        }
                    }
                    decide(p, &mut b, x, side);
                }
                if !alive {
                    continue;
                }
                if !forced.is_empty() {
                    pending.push(b);
                    continue;
                }
                let x = b
                    .undecided
                    .ones()
                    .find(|&c| p.gd.ancestors(c).is_disjoint(&b.undecided))
                    .expect("undecided vertices remain");
                let hs = cache.get(x, u, &p.table);
                for side in [Side::Neg, Side::Pos] {
                    if let Some(c) = b.cell.refine(&p.region, &hs, side) {
                        let mut next = Pending { cell: c, inside: b.inside.clone(), undecided: b.undecided.clone() };
                        decide(p, &mut next, x, side);
                        pending.push(next);
                    }
                }
            }
        }
        if !extended {
            // No trigger anywhere in the cell: the chain ends here.
            out.push((st.cell, st.ranks));
        }
    }
    Ok(out)
}

/// Settles `x` against the current trigger: `Pos` puts it and the undecided
/// vertices above it inside, `Neg` drops it and those below it.
fn decide(p: &Prepared, b: &mut Pending, x: usize, side: Side) {
    let mut moved = match side {
        Side::Pos => p.gd.ancestors(x).clone(),
        Side::Neg => p.gd.descendants(x).clone(),
    };
    moved.intersect_with(&b.undecided);
    moved.insert(x);
    b.undecided.difference_with(&moved);
    if side == Side::Pos {
        b.inside.union_with(&moved);
    }
}

/// Local search on a prepared query, with counters.
pub fn ls_search_detailed(p: &Prepared, mode: Mode, params: &LsParams) -> Result<(ResultSet, LsStats)> {
    let candidates = expand(p, params.strategy, params.budget);
    let mut stats = LsStats { candidates: candidates.len(), ..LsStats::default() };
    let mut cache = HalfSpaceCache::new();
    let mut entries = Vec::new();
    let global = |set: &FixedBitSet| -> Vec<VertexId> { set.ones().map(|v| p.global(v)).collect() };
    for cand in &candidates {
        let h = Subgraph::from_members(p.core.graph().clone(), &cand.members);
        let outcome = verify(p, &h, &mut cache)?;
        let cells = match outcome.status {
            VerifyStatus::Valid(cells) => cells,
            VerifyStatus::Discarded(reason) => {
                *stats.discarded.entry(reason).or_default() += 1;
                continue;
            }
        };
        stats.valid += 1;
        for cell in cells {
            match mode {
                Mode::Nc => entries.push(ResultCell { cell, communities: vec![global(h.member_set())] }),
                Mode::TopJ(j) => {
                    for (sub, ranks) in lower_ranks(p, &h, cell, j, &mut cache)? {
                        entries.push(ResultCell { cell: sub, communities: ranks.iter().map(global).collect() });
                    }
                }
            }
        }
    }
    Ok((ResultSet { mode, entries, core_size: p.core.len(), diagnostic: None }, stats))
}

pub fn ls_search_prepared(p: &Prepared, mode: Mode, params: &LsParams) -> Result<ResultSet> {
    ls_search_detailed(p, mode, params).map(|(r, _)| r)
}

/// Computes `H_k^t` and its dominance graph, then runs the local search.
pub fn ls_search(
    rsn: &RoadSocialNetwork,
    q: &[VertexId],
    k: usize,
    t: f64,
    region: &Region,
    mode: Mode,
    params: &LsParams,
) -> Result<ResultSet> {
    match Prepared::new(rsn, q, k, t, region)? {
        Ok(p) => ls_search_prepared(&p, mode, params),
        Err(reason) => Ok(ResultSet::empty(mode, format!("no (k,t)-core: {reason}"))),
    }
}
