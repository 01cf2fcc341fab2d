//! Search output: cells of the preference region with ranked communities.

use crate::geometry::{Cell, Region};
use crate::network::VertexId;
use crate::query::Mode;

/// One cell and its communities, best first. Members are global ids, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultCell {
    pub cell: Cell,
    pub communities: Vec<Vec<VertexId>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub mode: Mode,
    pub entries: Vec<ResultCell>,
    /// `|H_k^t|`, zero when no core exists.
    pub core_size: usize,
    pub diagnostic: Option<String>,
}

impl ResultSet {
    pub fn empty(mode: Mode, diagnostic: impl Into<String>) -> Self {
        Self {
            mode,
            entries: Vec::new(),
            core_size: 0,
            diagnostic: Some(diagnostic.into()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices of entries whose cell strictly contains `w`.
    pub fn locate(&self, region: &Region, w: &[f64], margin: f64) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.cell.contains(region, w, margin))
            .map(|(i, _)| i)
            .collect()
    }

    /// Distinct best-ranked communities, sorted.
    pub fn distinct_best(&self) -> Vec<Vec<VertexId>> {
        let mut out: Vec<Vec<VertexId>> = self
            .entries
            .iter()
            .filter_map(|e| e.communities.first().cloned())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}
