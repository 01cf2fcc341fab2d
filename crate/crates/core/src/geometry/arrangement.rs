use super::lp::{cell_feasible, EPS_FEAS};
use super::{HalfSpace, Region, Side};
use crate::error::{Error, Result};

/// A leaf of an [`Arrangement`]: the region cut by signed half-spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub constraints: Vec<(HalfSpace, Side)>,
    pub witness: Vec<f64>,
    /// Half-spaces that did not cut this cell, with the side it lies on.
    pub forced: Vec<(HalfSpace, Side)>,
}

impl Cell {
    pub fn root(region: &Region) -> Self {
        Self {
            constraints: Vec::new(),
            witness: region.pivot().to_vec(),
            forced: Vec::new(),
        }
    }

    /// Whether `w` lies strictly inside (clearance `margin`, normalized).
    pub fn contains(&self, region: &Region, w: &[f64], margin: f64) -> bool {
        region.contains(w, margin)
            && self.constraints.iter().all(|(h, side)| side.sign() * h.eval(w) > margin * h.norm())
    }

    /// This cell cut to one side of `hs`, or `None` if that side misses it.
    pub fn refine(&self, region: &Region, hs: &HalfSpace, side: Side) -> Option<Cell> {
        let norm = hs.norm();
        if norm <= 1e-14 * (1.0 + hs.b.abs()) {
            if degenerate_side(hs) != side {
                return None;
            }
            let mut cell = self.clone();
            cell.forced.push((hs.clone(), side));
            return Some(cell);
        }
        let mut constraints = self.constraints.clone();
        constraints.push((hs.clone(), side));
        let witness = if side.sign() * hs.eval(&self.witness) / norm > 1e-7 {
            self.witness.clone()
        } else {
            cell_feasible(&constraints, region)?
        };
        Some(Cell { constraints, witness, forced: self.forced.clone() })
    }

    /// Minimum normalized clearance of the witness over all constraints and
    /// region facets.
    pub fn witness_slack(&self, region: &Region) -> f64 {
        let facets = region
            .facets()
            .iter()
            .map(|(a, b)| a.iter().zip(&self.witness).map(|(x, y)| x * y).sum::<f64>() + b);
        let cuts = self
            .constraints
            .iter()
            .map(|(h, side)| side.sign() * h.eval(&self.witness) / h.norm());
        facets.chain(cuts).fold(f64::INFINITY, f64::min)
    }
}

/// Side of a half-space with no normal: the sign of its offset, with exact
/// ties going to the lower-indexed vertex.
fn degenerate_side(hs: &HalfSpace) -> Side {
    if hs.b > 0.0 {
        Side::Pos
    } else if hs.b < 0.0 || hs.winner > hs.loser {
        Side::Neg
    } else {
        Side::Pos
    }
}

pub type LeafId = usize;

#[derive(Debug, Clone)]
enum Node<T> {
    Leaf { cell: Cell, payload: T },
    Split { hs: HalfSpace, pos: usize, neg: usize },
}

/// Binary partition tree over a region; leaves carry a payload `T`.
#[derive(Debug, Clone)]
pub struct Arrangement<T> {
    region: Region,
    nodes: Vec<Node<T>>,
    leaves: usize,
}

impl<T: Clone> Arrangement<T> {
    pub fn new(region: Region, payload: T) -> Self {
        let cell = Cell::root(&region);
        Self::with_cell(region, cell, payload)
    }

    /// Arrangement rooted at an existing cell of `region`.
    pub fn with_cell(region: Region, cell: Cell, payload: T) -> Self {
        Self {
            region,
            nodes: vec![Node::Leaf { cell, payload }],
            leaves: 1,
        }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn insert(&mut self, hs: HalfSpace) -> Result<()> {
        self.insert_filtered(hs, |_| true, |_, _| {})
    }

    /// Inserts `hs` into every leaf whose payload satisfies `applies`. Split
    /// leaves become two children; `on_side` is told which side each child
    /// (or an uncut leaf) lies on.
    pub fn insert_filtered<F, G>(&mut self, hs: HalfSpace, applies: F, mut on_side: G) -> Result<()>
    where
        F: Fn(&T) -> bool,
        G: FnMut(&mut T, Side),
    {
        if hs.dim() != self.region.dim() {
            return Err(Error::Geometry(format!(
                "half-space dimension {} does not match region dimension {}",
                hs.dim(),
                self.region.dim()
            )));
        }
        let targets: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| matches!(&self.nodes[i], Node::Leaf { payload, .. } if applies(payload)))
            .collect();
        for id in targets {
            self.split_leaf(id, &hs, &mut on_side);
        }
        Ok(())
    }

    fn split_leaf<G: FnMut(&mut T, Side)>(&mut self, id: usize, hs: &HalfSpace, on_side: &mut G) {
        let Node::Leaf { cell, .. } = &self.nodes[id] else { unreachable!() };
        let norm = hs.norm();
        if norm <= 1e-14 * (1.0 + hs.b.abs()) {
            self.force(id, hs, degenerate_side(hs), on_side);
            return;
        }
        let v = hs.eval(&cell.witness) / norm;
        let near = if v >= 0.0 { Side::Pos } else { Side::Neg };
        let far = near.flip();
        let try_side = |side: Side| {
            let mut cons = cell.constraints.clone();
            cons.push((hs.clone(), side));
            cell_feasible(&cons, &self.region)
        };
        let near_witness = if v.abs() > 1e-7 {
            Some(cell.witness.clone())
        } else {
            try_side(near)
        };
        let far_witness = try_side(far);
        match (near_witness, far_witness) {
            (Some(wn), Some(wf)) => {
                let Node::Leaf { cell, payload } =
                    std::mem::replace(&mut self.nodes[id], Node::Split { hs: hs.clone(), pos: 0, neg: 0 })
                else {
                    unreachable!()
                };
                let mut make = |side: Side, witness: Vec<f64>| {
                    let mut constraints = cell.constraints.clone();
                    constraints.push((hs.clone(), side));
                    let mut payload = payload.clone();
                    on_side(&mut payload, side);
                    let child = Cell { constraints, witness, forced: cell.forced.clone() };
                    self.nodes.push(Node::Leaf { cell: child, payload });
                    self.nodes.len() - 1
                };
                let near_id = make(near, wn);
                let far_id = make(far, wf);
                let (pos, neg) = if near == Side::Pos { (near_id, far_id) } else { (far_id, near_id) };
                self.nodes[id] = Node::Split { hs: hs.clone(), pos, neg };
                self.leaves += 1;
            }
            (None, Some(_)) => self.force(id, hs, far, on_side),
            _ => self.force(id, hs, near, on_side),
        }
    }

    fn force<G: FnMut(&mut T, Side)>(&mut self, id: usize, hs: &HalfSpace, side: Side, on_side: &mut G) {
        if let Node::Leaf { cell, payload } = &mut self.nodes[id] {
            cell.forced.push((hs.clone(), side));
            on_side(payload, side);
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = (LeafId, &Cell, &T)> {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match n {
            Node::Leaf { cell, payload } => Some((i, cell, payload)),
            Node::Split { .. } => None,
        })
    }

    pub fn payload(&self, id: LeafId) -> Option<&T> {
        match &self.nodes[id] {
            Node::Leaf { payload, .. } => Some(payload),
            Node::Split { .. } => None,
        }
    }

    pub fn into_leaves(self) -> Vec<(Cell, T)> {
        self.nodes
            .into_iter()
            .filter_map(|n| match n {
                Node::Leaf { cell, payload } => Some((cell, payload)),
                Node::Split { .. } => None,
            })
            .collect()
    }

    /// Leaf containing `w` with clearance `margin`, or `None` on a boundary.
    pub fn locate(&self, w: &[f64], margin: f64) -> Option<LeafId> {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Split { hs, pos, neg } => {
                    let v = hs.eval(w) / hs.norm();
                    if v.abs() <= margin {
                        return None;
                    }
                    id = if v > 0.0 { *pos } else { *neg };
                }
                Node::Leaf { cell, .. } => {
                    return cell.contains(&self.region, w, margin).then_some(id);
                }
            }
        }
    }
}

/// Default boundary clearance when locating sample points.
pub const LOCATE_MARGIN: f64 = EPS_FEAS;

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn hs(a: Vec<f64>, b: f64) -> HalfSpace {
        HalfSpace { a, b, winner: 0, loser: 1 }
    }

    #[test]
    fn crossing_and_outside() {
        let r = Region::parse("0.1,0.5x0.2,0.4").unwrap();
        let mut arr = Arrangement::new(r, ());
        arr.insert(hs(vec![1.0, 0.0], -0.3)).unwrap();
        assert_eq!(arr.leaf_count(), 2);
        let sides: Vec<Side> = arr.leaves().map(|(_, c, _)| c.constraints[0].1).collect();
        assert!(sides.contains(&Side::Pos) && sides.contains(&Side::Neg));
        arr.insert(hs(vec![1.0, 0.0], -0.9)).unwrap();
        assert_eq!(arr.leaf_count(), 2);
        assert!(arr.leaves().all(|(_, c, _)| c.forced.len() == 1 && c.forced[0].1 == Side::Neg));
        assert!(arr.insert(hs(vec![1.0], 0.0)).is_err());
    }

    #[test]
    fn random_cuts_tile_region() {
        let r = Region::parse("0.1,0.5x0.2,0.4").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        use rand::Rng;
        let mut arr = Arrangement::new(r.clone(), ());
        for _ in 0..3 {
            let a = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let p = r.sample(&mut rng);
            let b = -(a[0] * p[0] + a[1] * p[1]);
            arr.insert(hs(a, b)).unwrap();
        }
        assert!(arr.leaf_count() <= 7);
        for (_, c, _) in arr.leaves() {
            assert!(c.witness_slack(&r) > EPS_FEAS);
        }
        for _ in 0..10_000 {
            let w = r.sample(&mut rng);
            let hits = arr.leaves().filter(|(_, c, _)| c.contains(&r, &w, 0.0)).count();
            assert!(hits <= 1);
            if r.contains(&w, 1e-9) && arr.locate(&w, 1e-9).is_some() {
                assert_eq!(hits, 1);
            }
        }
    }
}
