//! Arrangement-driven global search.
//!
//! Starting from `H_k^t`, each state repeatedly removes the lowest-scoring
//! vertex. Only leaves of the dominance graph (restricted to the current
//! community) can score lowest, so a state's cell is split by the pairwise
//! half-spaces among those leaves until each sub-cell has a single lowest
//! leaf. A deletion that would destroy every `k`-core around `Q` ends the
//! chain: the current community is the non-contained MAC of that cell, and
//! the most recent deletion batches, added back, give the lower ranks.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::Result;
use crate::geometry::{halfspace_of, Arrangement, AttributeTable, Cell, HalfSpace, Region, Side};
use crate::ktcore::{dfs_delete, DeleteOutcome, Subgraph};
use crate::network::{RoadSocialNetwork, VertexId};
use crate::query::{Mode, Prepared};
use crate::result::{ResultCell, ResultSet};

/// Pairwise half-spaces, computed once per unordered pair.
#[derive(Debug, Default)]
pub struct HalfSpaceCache {
    map: HashMap<(usize, usize), HalfSpace>,
}

impl HalfSpaceCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `S(u) >= S(v)`.
    pub fn get(&mut self, u: usize, v: usize, table: &AttributeTable) -> HalfSpace {
        let key = (u.min(v), u.max(v));
        let h = self.map.entry(key).or_insert_with(|| halfspace_of(key.0, key.1, table));
        if h.winner == u {
            h.clone()
        } else {
            h.flipped()
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// The pairwise half-spaces `S(u) >= S(v)` among `leaves` (`u < v`).
pub fn smallest_score_candidates(leaves: &[usize], table: &AttributeTable) -> (Vec<usize>, Vec<HalfSpace>) {
    let mut sorted = leaves.to_vec();
    sorted.sort_unstable();
    let mut hs = Vec::new();
    for (i, &u) in sorted.iter().enumerate() {
        for &v in &sorted[i + 1..] {
            hs.push(halfspace_of(u, v, table));
        }
    }
    (sorted, hs)
}

/// Which end of the score order a partition isolates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

/// Splits `cell` until a single vertex of `candidates` scores lowest in each
/// sub-cell; returns `(sub-cell, lowest vertex)` pairs. Exact ties go to the
/// larger index, matching the rule that the lower index dominates.
pub fn min_score_partition(
    region: &Region,
    cell: &Cell,
    candidates: &[usize],
    table: &AttributeTable,
    cache: &mut HalfSpaceCache,
) -> Result<Vec<(Cell, usize)>> {
    extreme_partition(region, cell, candidates, table, cache, Extreme::Min)
}

/// As [`min_score_partition`], isolating either end of the order. For
/// [`Extreme::Max`] exact ties go to the smaller index.
pub fn extreme_partition(
    region: &Region,
    cell: &Cell,
    candidates: &[usize],
    table: &AttributeTable,
    cache: &mut HalfSpaceCache,
    end: Extreme,
) -> Result<Vec<(Cell, usize)>> {
    let mut cand = candidates.to_vec();
    cand.sort_unstable();
    if cand.len() <= 1 {
        return Ok(cand.first().map(|&v| (cell.clone(), v)).into_iter().collect());
    }
    let all: FixedBitSet = (0..cand.len()).collect();
    let mut arr = Arrangement::with_cell(region.clone(), cell.clone(), all);
    for i in 0..cand.len() {
        for j in i + 1..cand.len() {
            let hs = cache.get(cand[i], cand[j], table);
            arr.insert_filtered(
                hs,
                |alive| alive.contains(i) && alive.contains(j),
                |alive, side| {
                    let drop = match (end, side) {
                        (Extreme::Min, Side::Pos) | (Extreme::Max, Side::Neg) => i,
                        _ => j,
                    };
                    alive.set(drop, false)
                },
            )?;
        }
    }
    Ok(arr
        .into_leaves()
        .into_iter()
        .map(|(c, alive)| {
            let pos = alive.ones().next().expect("one candidate survives per cell");
            debug_assert_eq!(alive.count_ones(..), 1);
            (c, cand[pos])
        })
        .collect())
}

struct State {
    cell: Cell,
    h: Subgraph,
    live: Vec<u32>,
    batches: Vec<Vec<usize>>,
}

/// Communities ranked best first: `h`, then `h` plus successively older
/// deletion batches.
pub(crate) fn ranked(h: &Subgraph, batches: &[Vec<usize>], depth: usize, global: impl Fn(usize) -> VertexId) -> Vec<Vec<VertexId>> {
    let mut current: Vec<usize> = h.members().collect();
    let mut out = Vec::with_capacity(depth);
    let mut push = |members: &[usize]| {
        let mut g: Vec<VertexId> = members.iter().map(|&v| global(v)).collect();
        g.sort_unstable();
        out.push(g);
    };
    push(&current);
    for batch in batches.iter().rev().take(depth.saturating_sub(1)) {
        current.extend_from_slice(batch);
        push(&current);
    }
    out
}

/// Global search on a prepared query.
pub fn gs_search_prepared(p: &Prepared, mode: Mode) -> Result<ResultSet> {
    let k = p.k();
    let q = p.query();
    let depth = mode.depth();
    let n = p.core.len();
    let h0 = p.core.subgraph().clone();
    let live: Vec<u32> = (0..n).map(|v| p.gd.descendants(v).count_ones(..) as u32).collect();
    let mut stack = vec![State { cell: Cell::root(&p.region), h: h0, live, batches: Vec::new() }];
    let mut cache = HalfSpaceCache::new();
    let mut entries = Vec::new();
    while let Some(mut st) = stack.pop() {
        loop {
            let leaves: Vec<usize> = st.h.members().filter(|&v| st.live[v] == 0).collect();
            let parts = min_score_partition(&p.region, &st.cell, &leaves, &p.table, &mut cache)?;
            let mut children = Vec::new();
            for (cell, victim) in parts {
                match dfs_delete(&st.h, victim, k, q) {
                    DeleteOutcome::EarlyTermination => entries.push(ResultCell {
                        cell,
                        communities: ranked(&st.h, &st.batches, depth, |v| p.global(v)),
                    }),
                    DeleteOutcome::Deleted { community, removed } => {
                        let mut live = st.live.clone();
                        for &r in &removed {
                            for a in p.gd.ancestors(r).ones() {
                                live[a] -= 1;
                            }
                        }
                        let mut batches = Vec::new();
                        if depth > 1 {
                            let keep = st.batches.len().saturating_sub(depth - 2);
                            batches.extend_from_slice(&st.batches[keep..]);
                            batches.push(removed);
                        }
                        children.push(State { cell, h: community, live, batches });
                    }
                }
            }
            if children.len() == 1 {
                st = children.pop().expect("one child");
                continue;
            }
            stack.extend(children.into_iter().rev());
            break;
        }
    }
    Ok(ResultSet { mode, entries, core_size: n, diagnostic: None })
}

/// Computes `H_k^t` and its dominance graph, then runs the global search.
pub fn gs_search(
    rsn: &RoadSocialNetwork,
    q: &[VertexId],
    k: usize,
    t: f64,
    region: &Region,
    mode: Mode,
) -> Result<ResultSet> {
    match Prepared::new(rsn, q, k, t, region)? {
        Ok(p) => gs_search_prepared(&p, mode),
        Err(reason) => Ok(ResultSet::empty(mode, format!("no (k,t)-core: {reason}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Region;

    #[test]
    fn single_leaf_owns_cell() {
        let t = AttributeTable::new(3, &[vec![0.1, 0.2, 0.3]]).unwrap();
        let r = Region::parse("0.1,0.5x0.2,0.4").unwrap();
        let parts = min_score_partition(&r, &Cell::root(&r), &[0], &t, &mut HalfSpaceCache::new()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 0);
    }

    #[test]
    fn partition_matches_witness_scores() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.gen()).collect()).collect();
        let t = AttributeTable::new(3, &rows).unwrap();
        let r = Region::parse("0.1,0.5x0.2,0.4").unwrap();
        let parts = min_score_partition(&r, &Cell::root(&r), &[0, 1, 2, 3], &t, &mut HalfSpaceCache::new()).unwrap();
        for (cell, v) in parts {
            let w = &cell.witness;
            let best = (0..4).min_by(|&a, &b| t.score(a, w).total_cmp(&t.score(b, w))).unwrap();
            assert_eq!(best, v);
        }
        let (_, hs) = smallest_score_candidates(&[2, 0, 1], &t);
        assert_eq!(hs.len(), 3);
        assert_eq!((hs[0].winner, hs[0].loser), (0, 1));
    }

    #[test]
    fn tied_vectors_pick_larger_index() {
        let t = AttributeTable::new(2, &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let r = Region::parse("0.2,0.6").unwrap();
        let parts = min_score_partition(&r, &Cell::root(&r), &[0, 1], &t, &mut HalfSpaceCache::new()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 1);
    }
}
