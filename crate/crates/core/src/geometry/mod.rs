//! Preference-domain geometry.
//!
//! A weight vector over `d` attributes is represented by its first `d - 1`
//! components; `w_d = 1 - Σ w_i` is implied. Comparisons between two vertices
//! become half-spaces `a·w + b >= 0` in this reduced space.

mod arrangement;
mod lp;
mod region;

pub use arrangement::{Arrangement, Cell, LeafId, LOCATE_MARGIN};
pub use lp::{cell_feasible, max_slack, EPS_FEAS};
pub use region::Region;

use crate::error::{Error, Result};
use crate::network::{SocialNetwork, VertexId};

/// Row-major attribute vectors of a vertex subset, indexed by position.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeTable {
    d: usize,
    data: Vec<f64>,
}

impl AttributeTable {
    pub fn new(d: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Geometry("inconsistent dimensionality".into()));
        }
        Ok(Self { d, data: rows.concat() })
    }

    /// Attributes of `members` (in the given order) from the social graph.
    pub fn from_social(g: &SocialNetwork, members: &[VertexId]) -> Self {
        let mut data = Vec::with_capacity(members.len() * g.dim());
        for &v in members {
            data.extend_from_slice(g.attributes(v));
        }
        Self { d: g.dim(), data }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.d..(v + 1) * self.d]
    }

    pub fn score(&self, v: usize, w: &[f64]) -> f64 {
        score(self.row(v), w)
    }
}

/// Reconstructs the full weight vector, checking it lies in the open simplex.
pub fn full_weight(w: &[f64]) -> Result<Vec<f64>> {
    let last = 1.0 - w.iter().sum::<f64>();
    if w.iter().any(|&x| !(x > 0.0 && x < 1.0)) || !(last > 0.0) {
        return Err(Error::Geometry(format!("weight {w:?} outside the open simplex")));
    }
    let mut full = w.to_vec();
    full.push(last);
    Ok(full)
}

/// `S(v) = Σ w_i x_i` with the implied last weight. No simplex check.
pub fn score(x: &[f64], w: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), w.len() + 1);
    let (head, last) = x.split_at(w.len());
    let mut rest = 1.0;
    let mut s = 0.0;
    for (xi, wi) in head.iter().zip(w) {
        s += wi * xi;
        rest -= wi;
    }
    s + rest * last[0]
}

/// Validating variant of [`score`].
pub fn score_checked(x: &[f64], w: &[f64]) -> Result<f64> {
    if x.len() != w.len() + 1 {
        return Err(Error::Geometry("weight dimension mismatch".into()));
    }
    full_weight(w)?;
    Ok(score(x, w))
}

/// Minimum member score and its vertex (smallest index on ties).
pub fn community_score(members: &[usize], w: &[f64], table: &AttributeTable) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for &v in members {
        let s = table.score(v, w);
        best = match best {
            Some((bs, bv)) if bs < s || (bs == s && bv < v) => Some((bs, bv)),
            _ => Some((s, v)),
        };
    }
    best
}

/// `a·w + b >= 0`, i.e. `S(winner) >= S(loser)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub a: Vec<f64>,
    pub b: f64,
    pub winner: usize,
    pub loser: usize,
}

impl HalfSpace {
    pub fn eval(&self, w: &[f64]) -> f64 {
        self.a.iter().zip(w).map(|(a, x)| a * x).sum::<f64>() + self.b
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// The complementary half-space `S(loser) >= S(winner)`.
    pub fn flipped(&self) -> Self {
        Self {
            a: self.a.iter().map(|x| -x).collect(),
            b: -self.b,
            winner: self.loser,
            loser: self.winner,
        }
    }
}

pub fn halfspace_between(xu: &[f64], xv: &[f64], u: usize, v: usize) -> HalfSpace {
    let d = xu.len();
    let delta: Vec<f64> = xu.iter().zip(xv).map(|(a, b)| a - b).collect();
    let dd = delta[d - 1];
    HalfSpace {
        a: delta[..d - 1].iter().map(|x| x - dd).collect(),
        b: dd,
        winner: u,
        loser: v,
    }
}

/// Half-space where `u` scores at least as high as `v`.
pub fn halfspace_of(u: usize, v: usize, table: &AttributeTable) -> HalfSpace {
    halfspace_between(table.row(u), table.row(v), u, v)
}

/// Which side of a half-space a cell lies on: `Pos` is `a·w + b >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Pos,
    Neg,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Pos => 1.0,
            Side::Neg => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Side::Pos => Side::Neg,
            Side::Neg => Side::Pos,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Dominates,
    DominatedBy,
    Incomparable,
}

/// Absolute tolerance for corner evaluations, scaled by attribute magnitude.
fn corner_tol(h: &HalfSpace) -> f64 {
    1e-12 * (1.0 + h.b.abs() + h.a.iter().map(|x| x.abs()).sum::<f64>())
}

/// r-dominance of `u` over `v` by evaluating `u`'s half-space at every corner
/// of the region. Exact ties are oriented by index (lower wins).
pub fn r_dominance_test(u: usize, v: usize, region: &Region, table: &AttributeTable) -> Dominance {
    let h = halfspace_of(u, v, table);
    let tol = corner_tol(&h);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in region.corners() {
        let x = h.eval(c);
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if lo >= -tol && hi <= tol {
        if u < v {
            Dominance::Dominates
        } else {
            Dominance::DominatedBy
        }
    } else if lo >= -tol {
        Dominance::Dominates
    } else if hi <= tol {
        Dominance::DominatedBy
    } else {
        Dominance::Incomparable
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[f64]]) -> AttributeTable {
        AttributeTable::new(rows[0].len(), &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn full_weight_and_score() {
        let w = full_weight(&[0.2, 0.3]).unwrap();
        assert!((w[2] - 0.5).abs() < 1e-15);
        assert!(full_weight(&[0.6, 0.5]).is_err());
        assert!((score(&[0.7, 0.7, 0.7], &[0.1, 0.8]) - 0.7).abs() < 1e-12);
        assert_eq!(score(&[1.0, 0.0], &[0.25]), 0.25);
    }

    #[test]
    fn community_score_ties_pick_smaller_index() {
        let t = table(&[&[1.0, 1.0], &[1.0, 1.0], &[2.0, 2.0]]);
        assert_eq!(community_score(&[2, 1, 0], &[0.5], &t), Some((1.0, 0)));
        assert_eq!(community_score(&[2], &[0.5], &t), Some((2.0, 2)));
    }

    #[test]
    fn halfspace_example() {
        let t = table(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        let h = halfspace_of(0, 1, &t);
        assert_eq!((h.a.clone(), h.b), (vec![2.0, 1.0], -1.0));
        let same = table(&[&[1.0, 2.0], &[1.0, 2.0]]);
        let z = halfspace_of(0, 1, &same);
        assert_eq!((z.a, z.b), (vec![0.0], 0.0));
    }

    #[test]
    fn dominance_examples() {
        let r = Region::rectangle(&[(0.1, 0.5), (0.2, 0.4)]).unwrap();
        let t = table(&[&[3.0, 3.0, 3.0], &[1.0, 1.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(r_dominance_test(0, 1, &r, &t), Dominance::Dominates);
        assert_eq!(r_dominance_test(1, 0, &r, &t), Dominance::DominatedBy);
        assert_eq!(r_dominance_test(2, 3, &r, &t), Dominance::Incomparable);
        let r2 = Region::rectangle(&[(0.6, 0.7), (0.1, 0.2)]).unwrap();
        assert_eq!(r_dominance_test(2, 4, &r2, &t), Dominance::Dominates);
        let same = table(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]]);
        assert_eq!(r_dominance_test(0, 1, &r, &same), Dominance::Dominates);
        assert_eq!(r_dominance_test(1, 0, &r, &same), Dominance::DominatedBy);
    }
}
