use crate::geometry::AttributeTable;

pub const FANOUT: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum Children {
    Points(Vec<usize>),
    Nodes(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexNode {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub children: Children,
}

/// Sort-tile-recursive bulk-loaded bounding-box tree over attribute vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialIndex {
    nodes: Vec<IndexNode>,
    root: usize,
}

fn str_groups(mut items: Vec<usize>, coord: &dyn Fn(usize, usize) -> f64, dims: usize, axis: usize) -> Vec<Vec<usize>> {
    let by_axis = |items: &mut Vec<usize>, axis: usize| {
        items.sort_by(|&x, &y| coord(x, axis).total_cmp(&coord(y, axis)).then(x.cmp(&y)));
    };
    if items.len() <= FANOUT || axis + 1 >= dims {
        by_axis(&mut items, axis.min(dims - 1));
        return items.chunks(FANOUT).map(<[usize]>::to_vec).collect();
    }
    let pages = items.len().div_ceil(FANOUT);
    let slabs = (pages as f64).powf(1.0 / (dims - axis) as f64).ceil().max(1.0) as usize;
    let slab_len = FANOUT * pages.div_ceil(slabs);
    by_axis(&mut items, axis);
    items
        .chunks(slab_len)
        .flat_map(|slab| str_groups(slab.to_vec(), coord, dims, axis + 1))
        .collect()
}

impl SpatialIndex {
    /// Bulk-loads all rows of `table`. Requires at least one row.
    pub fn build(table: &AttributeTable) -> Self {
        assert!(!table.is_empty(), "spatial index needs at least one vector");
        let d = table.dim();
        let mut nodes: Vec<IndexNode> = Vec::new();
        let point_coord = |v: usize, axis: usize| table.row(v)[axis];
        let mut level: Vec<usize> = str_groups((0..table.len()).collect(), &point_coord, d, 0)
            .into_iter()
            .map(|group| {
                let (lo, hi) = bbox(group.iter().map(|&v| (table.row(v), table.row(v))), d);
                nodes.push(IndexNode { lo, hi, children: Children::Points(group) });
                nodes.len() - 1
            })
            .collect();
        while level.len() > 1 {
            let centers: Vec<Vec<f64>> = nodes
                .iter()
                .map(|n| n.lo.iter().zip(&n.hi).map(|(a, b)| (a + b) / 2.0).collect())
                .collect();
            let coord = |i: usize, axis: usize| centers[i][axis];
            let groups = str_groups(level, &coord, d, 0);
            level = groups
                .into_iter()
                .map(|group| {
                    let (lo, hi) = bbox(group.iter().map(|&c| (&nodes[c].lo[..], &nodes[c].hi[..])), d);
                    nodes.push(IndexNode { lo, hi, children: Children::Nodes(group) });
                    nodes.len() - 1
                })
                .collect();
        }
        let root = level[0];
        Self { nodes, root }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> &IndexNode {
        &self.nodes[id]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Finds `v` by descending only into boxes that contain its vector.
    pub fn find(&self, table: &AttributeTable, v: usize) -> bool {
        let x = table.row(v);
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id];
            if !x.iter().zip(n.lo.iter().zip(&n.hi)).all(|(c, (lo, hi))| lo <= c && c <= hi) {
                continue;
            }
            match &n.children {
                Children::Points(p) if p.contains(&v) => return true,
                Children::Points(_) => {}
                Children::Nodes(c) => stack.extend(c),
            }
        }
        false
    }

    pub fn depth(&self) -> usize {
        let mut depth = 1;
        let mut id = self.root;
        while let Children::Nodes(c) = &self.nodes[id].children {
            id = c[0];
            depth += 1;
        }
        depth
    }
}

fn bbox<'a>(boxes: impl Iterator<Item = (&'a [f64], &'a [f64])>, d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for (l, h) in boxes {
        for i in 0..d {
            lo[i] = lo[i].min(l[i]);
            hi[i] = hi[i].max(h[i]);
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn single_and_identical() {
        let t = AttributeTable::new(2, &[vec![0.5, 0.5]]).unwrap();
        let idx = SpatialIndex::build(&t);
        assert_eq!(idx.num_nodes(), 1);
        let t = AttributeTable::new(2, &vec![vec![0.3, 0.7]; 100]).unwrap();
        let idx = SpatialIndex::build(&t);
        for id in 0..idx.num_nodes() {
            assert_eq!(idx.node(id).lo, idx.node(id).hi);
        }
    }

    #[test]
    fn random_vectors_findable() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| rng.gen()).collect()).collect();
        let t = AttributeTable::new(3, &rows).unwrap();
        let idx = SpatialIndex::build(&t);
        assert!((0..200).all(|v| idx.find(&t, v)));
        for id in 0..idx.num_nodes() {
            let n = idx.node(id);
            if let Children::Nodes(c) = &n.children {
                assert!(c.len() <= FANOUT);
                for &ch in c {
                    let m = idx.node(ch);
                    assert!((0..3).all(|i| n.lo[i] <= m.lo[i] && m.hi[i] <= n.hi[i]));
                }
            }
        }
    }
}
