//! Per-query preprocessing shared by both search engines.

use crate::dominance::DominanceGraph;
use crate::error::{Error, Result};
use crate::geometry::{AttributeTable, Region};
use crate::ktcore::{maximal_kt_core, CoreOutcome, KTCore, NoCoreReason};
use crate::network::{RoadSocialNetwork, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Non-contained MAC per cell.
    Nc,
    /// Top-`j` MACs per cell.
    TopJ(usize),
}

impl Mode {
    pub fn depth(self) -> usize {
        match self {
            Mode::Nc => 1,
            Mode::TopJ(j) => j,
        }
    }
}

/// `H_k^t`, its attribute table (local ids) and its dominance graph.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub core: KTCore,
    pub table: AttributeTable,
    pub gd: DominanceGraph,
    pub region: Region,
}

fn check_region(rsn: &RoadSocialNetwork, region: &Region) -> Result<()> {
    let d = rsn.social.dim();
    if d < 2 {
        return Err(Error::Query("preference queries need d >= 2".into()));
    }
    if region.dim() + 1 != d {
        return Err(Error::Query(format!(
            "region has dimension {} but attributes need {}",
            region.dim(),
            d - 1
        )));
    }
    Ok(())
}

impl Prepared {
    /// Computes the core and dominance graph, or the reason no core exists.
    pub fn new(
        rsn: &RoadSocialNetwork,
        q: &[VertexId],
        k: usize,
        t: f64,
        region: &Region,
    ) -> Result<std::result::Result<Self, NoCoreReason>> {
        check_region(rsn, region)?;
        let core = match maximal_kt_core(rsn, q, k, t)? {
            CoreOutcome::Found(c) => c,
            CoreOutcome::NoCore(r) => return Ok(Err(r)),
        };
        let table = AttributeTable::from_social(&rsn.social, core.members());
        let gd = DominanceGraph::build(&table, region)?;
        Ok(Ok(Self { core, table, gd, region: region.clone() }))
    }

    /// Reassembles a query from a stored core and graph.
    pub fn from_parts(rsn: &RoadSocialNetwork, core: KTCore, gd: DominanceGraph, region: Region) -> Result<Self> {
        check_region(rsn, &region)?;
        if gd.len() != core.len() {
            return Err(Error::Index("dominance graph does not match the core".into()));
        }
        if core.members().iter().any(|&v| v >= rsn.social.num_vertices()) {
            return Err(Error::Index("core references unknown vertices".into()));
        }
        let table = AttributeTable::from_social(&rsn.social, core.members());
        Ok(Self { core, table, gd, region })
    }

    pub fn k(&self) -> usize {
        self.core.k
    }

    pub fn query(&self) -> &[usize] {
        self.core.query()
    }

    pub fn global(&self, v: usize) -> VertexId {
        self.core.graph().global_id(v)
    }
}
