//! Binary persistence of `H_k^t` and its dominance graph for one `(Q, k, t, R)`.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic     8 bytes  "MACSIDX\0"
//! version   u32
//! sections  u32      number of table entries
//! table     sections x (tag: 4 bytes, offset: u64, length: u64)
//! payload   section bodies at their offsets
//! ```
//!
//! Sections: `META` (k, t, n, region bounds), `VERT` (global ids),
//! `ADJ ` (local adjacency), `QURY` (query ids and per-member query
//! distance), `DAG ` (reduced arcs, layers, r-dominance counts).

use std::fs;
use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use serde::Serialize;

use crate::dominance::DominanceGraph;
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::ktcore::{KTCore, LocalGraph};
use crate::network::{RoadSocialNetwork, VertexId};
use crate::query::Prepared;

pub const MAGIC: [u8; 8] = *b"MACSIDX\0";
pub const VERSION: u32 = 1;

const META: [u8; 4] = *b"META";
const VERT: [u8; 4] = *b"VERT";
const ADJ: [u8; 4] = *b"ADJ ";
const QURY: [u8; 4] = *b"QURY";
const DAG: [u8; 4] = *b"DAG ";

/// Everything an index file holds, in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexFile {
    pub k: usize,
    pub t: f64,
    pub bounds: Vec<(f64, f64)>,
    /// Global ids of the core members, ascending; position is the local id.
    pub globals: Vec<VertexId>,
    pub adj: Vec<Vec<usize>>,
    /// Query vertices, local ids.
    pub query: Vec<usize>,
    pub query_distance: Vec<f64>,
    pub arcs: Vec<(usize, usize)>,
    pub layers: Vec<usize>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexSummary {
    pub version: u32,
    pub k: usize,
    pub t: f64,
    pub region: Vec<[f64; 2]>,
    pub core_size: usize,
    pub edges: usize,
    pub query: Vec<VertexId>,
    pub arcs: usize,
    pub layers: usize,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Index(msg.into())
}

impl IndexFile {
    pub fn from_prepared(p: &Prepared) -> Result<Self> {
        if !p.region.is_rectangle() {
            return Err(bad("only rectangular regions can be stored"));
        }
        let n = p.core.len();
        let graph = p.core.graph();
        Ok(Self {
            k: p.k(),
            t: p.core.t,
            bounds: p.region.bounds().to_vec(),
            globals: graph.globals().to_vec(),
            adj: (0..n).map(|v| graph.neighbors(v).to_vec()).collect(),
            query: p.query().to_vec(),
            query_distance: (0..n).map(|v| p.core.query_distance(v)).collect(),
            arcs: p.gd.arcs(),
            layers: p.gd.layers().to_vec(),
            counts: (0..n).map(|v| p.gd.ancestors(v).count_ones(..)).collect(),
        })
    }

    pub fn summary(&self) -> IndexSummary {
        IndexSummary {
            version: VERSION,
            k: self.k,
            t: self.t,
            region: self.bounds.iter().map(|&(lo, hi)| [lo, hi]).collect(),
            core_size: self.globals.len(),
            edges: self.adj.iter().map(Vec::len).sum::<usize>() / 2,
            query: self.query.iter().map(|&v| self.globals[v]).collect(),
            arcs: self.arcs.len(),
            layers: self.layers.iter().max().map_or(0, |m| m + 1),
        }
    }

    /// Errors unless the index was built for exactly this query.
    pub fn check_matches(&self, q: &[VertexId], k: usize, t: f64, region: &Region) -> Result<()> {
        let mut want: Vec<VertexId> = q.to_vec();
        want.sort_unstable();
        want.dedup();
        let mut have: Vec<VertexId> = self.query.iter().map(|&v| self.globals[v]).collect();
        have.sort_unstable();
        if want != have || k != self.k || t != self.t || region.bounds() != self.bounds.as_slice() {
            return Err(bad("index was built for a different (Q, k, t, region)"));
        }
        Ok(())
    }

    /// Rebuilds the query state, checking it against `rsn`.
    pub fn into_prepared(self, rsn: &RoadSocialNetwork) -> Result<Prepared> {
        if !self.globals.windows(2).all(|w| w[0] < w[1]) {
            return Err(bad("core members are not strictly ascending"));
        }
        if self.globals.iter().any(|&v| v >= rsn.social.num_vertices()) {
            return Err(bad("index references users missing from the network"));
        }
        let induced = LocalGraph::induced(&rsn.social, &self.globals);
        let n = self.globals.len();
        if (0..n).any(|v| {
            let mut a = self.adj[v].clone();
            a.sort_unstable();
            let mut b = induced.neighbors(v).to_vec();
            b.sort_unstable();
            a != b
        }) {
            return Err(bad("index adjacency does not match the network"));
        }
        let gd = DominanceGraph::from_arcs(n, &self.arcs)?;
        if gd.layers() != self.layers.as_slice()
            || (0..n).any(|v| gd.ancestors(v).count_ones(..) != self.counts[v])
        {
            return Err(bad("stored layers or counts disagree with the arcs"));
        }
        let graph = LocalGraph::from_parts(self.globals, self.adj);
        let core = KTCore::from_parts(graph, self.query, self.query_distance, self.k, self.t)?;
        let region = Region::rectangle(&self.bounds)?;
        Prepared::from_parts(rsn, core, gd, region)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let u = |buf: &mut Vec<u8>, x: usize| buf.write_u64::<LE>(x as u64).expect("vec write");
        let f = |buf: &mut Vec<u8>, x: f64| buf.write_f64::<LE>(x).expect("vec write");
        let n = self.globals.len();

        let mut meta = Vec::new();
        u(&mut meta, self.k);
        f(&mut meta, self.t);
        u(&mut meta, n);
        u(&mut meta, self.bounds.len());
        for &(lo, hi) in &self.bounds {
            f(&mut meta, lo);
            f(&mut meta, hi);
        }
        let mut vert = Vec::new();
        for &g in &self.globals {
            u(&mut vert, g);
        }
        let mut adj = Vec::new();
        for list in &self.adj {
            u(&mut adj, list.len());
            for &x in list {
                u(&mut adj, x);
            }
        }
        let mut qury = Vec::new();
        u(&mut qury, self.query.len());
        for &x in &self.query {
            u(&mut qury, x);
        }
        for &d in &self.query_distance {
            f(&mut qury, d);
        }
        let mut dag = Vec::new();
        u(&mut dag, self.arcs.len());
        for &(a, b) in &self.arcs {
            u(&mut dag, a);
            u(&mut dag, b);
        }
        for &l in &self.layers {
            u(&mut dag, l);
        }
        for &c in &self.counts {
            u(&mut dag, c);
        }

        let sections = [(META, meta), (VERT, vert), (ADJ, adj), (QURY, qury), (DAG, dag)];
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.write_u32::<LE>(VERSION).expect("vec write");
        out.write_u32::<LE>(sections.len() as u32).expect("vec write");
        let mut offset = (out.len() + sections.len() * 20) as u64;
        for (tag, body) in &sections {
            out.extend_from_slice(tag);
            out.write_u64::<LE>(offset).expect("vec write");
            out.write_u64::<LE>(body.len() as u64).expect("vec write");
            offset += body.len() as u64;
        }
        for (_, body) in &sections {
            out.extend_from_slice(body);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 || bytes[..8] != MAGIC {
            return Err(bad("unrecognized index version: bad magic bytes"));
        }
        let mut head = Cursor::new(&bytes[8..]);
        let version = head.read_u32::<LE>().map_err(|_| bad("truncated header"))?;
        if version != VERSION {
            return Err(bad(format!("unsupported index version {version} (expected {VERSION})")));
        }
        let count = head.read_u32::<LE>().map_err(|_| bad("truncated header"))? as usize;
        let mut table = Vec::new();
        for _ in 0..count {
            let mut tag = [0u8; 4];
            head.read_exact(&mut tag).map_err(|_| bad("truncated section table"))?;
            let off = head.read_u64::<LE>().map_err(|_| bad("truncated section table"))? as usize;
            let len = head.read_u64::<LE>().map_err(|_| bad("truncated section table"))? as usize;
            let end = off.checked_add(len).filter(|&e| e <= bytes.len()).ok_or_else(|| bad("section out of bounds"))?;
            table.push((tag, &bytes[off..end]));
        }
        let section = |tag: [u8; 4]| {
            table
                .iter()
                .find(|(t, _)| *t == tag)
                .map(|(_, b)| Reader(Cursor::new(*b)))
                .ok_or_else(|| bad(format!("missing section {}", String::from_utf8_lossy(&tag))))
        };

        let mut meta = section(META)?;
        let k = meta.u()?;
        let t = meta.f()?;
        let n = meta.u()?;
        let dim = meta.len()?;
        let bounds = (0..dim).map(|_| Ok((meta.f()?, meta.f()?))).collect::<Result<Vec<_>>>()?;

        let mut vert = section(VERT)?;
        if n > vert.0.get_ref().len() / 8 {
            return Err(bad("core size exceeds section size"));
        }
        let globals = (0..n).map(|_| vert.u()).collect::<Result<Vec<_>>>()?;
        let mut adj_r = section(ADJ)?;
        let mut adj = Vec::new();
        for _ in 0..n {
            let deg = adj_r.len()?;
            let list = (0..deg).map(|_| adj_r.id(n)).collect::<Result<Vec<_>>>()?;
            adj.push(list);
        }
        let mut qr = section(QURY)?;
        let nq = qr.len()?;
        let query = (0..nq).map(|_| qr.id(n)).collect::<Result<Vec<_>>>()?;
        let query_distance = (0..n).map(|_| qr.f()).collect::<Result<Vec<_>>>()?;
        let mut dr = section(DAG)?;
        let na = dr.len()?;
        let arcs = (0..na).map(|_| Ok((dr.id(n)?, dr.id(n)?))).collect::<Result<Vec<_>>>()?;
        let layers = (0..n).map(|_| dr.u()).collect::<Result<Vec<_>>>()?;
        let counts = (0..n).map(|_| dr.u()).collect::<Result<Vec<_>>>()?;
        Ok(Self { k, t, bounds, globals, adj, query, query_distance, arcs, layers, counts })
    }
}

struct Reader<'a>(Cursor<&'a [u8]>);

impl Reader<'_> {
    fn u(&mut self) -> Result<usize> {
        let x = self.0.read_u64::<LE>().map_err(|_| bad("truncated section"))?;
        usize::try_from(x).map_err(|_| bad("value out of range"))
    }

    fn f(&mut self) -> Result<f64> {
        self.0.read_f64::<LE>().map_err(|_| bad("truncated section"))
    }

    /// A length prefix, bounded by what the remaining bytes could hold.
    fn len(&mut self) -> Result<usize> {
        let n = self.u()?;
        let left = self.0.get_ref().len() as u64 - self.0.position();
        if n as u64 > left / 8 {
            return Err(bad("length exceeds section size"));
        }
        Ok(n)
    }

    /// A local id, bounds-checked against `n`.
    fn id(&mut self, n: usize) -> Result<usize> {
        let v = self.u()?;
        if v >= n {
            return Err(bad(format!("local id {v} out of range")));
        }
        Ok(v)
    }
}

pub fn write_index(path: &Path, idx: &IndexFile) -> Result<()> {
    fs::write(path, idx.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_index(path: &Path) -> Result<IndexFile> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    IndexFile::from_bytes(&bytes)
}
