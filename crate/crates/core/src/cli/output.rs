//! JSON Lines rendering of query and oracle results.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{score_checked, Side};
use crate::network::{RoadSocialNetwork, VertexId};
use crate::oracle::FixedWeightRanking;
use crate::result::ResultSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub prepare_ms: f64,
    pub search_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyEcho {
    pub name: String,
    pub zeta: f64,
    pub lambda: f64,
    pub budget: usize,
}

/// First line of a query document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    #[serde(rename = "type")]
    pub kind: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j: Option<usize>,
    pub k: usize,
    pub t: f64,
    pub q: Vec<String>,
    pub region: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strategy: Option<StrategyEcho>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub core_size: usize,
    pub cells: usize,
    pub diagnostic: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

/// `a·w + b` compared with zero: `side = "pos"` means `>= 0`, i.e. `winner`
/// scores at least as high as `loser` throughout the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceRecord {
    pub a: Vec<f64>,
    pub b: f64,
    pub side: String,
    pub winner: String,
    pub loser: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityRecord {
    pub rank: usize,
    pub members: Vec<String>,
    pub ids: Vec<VertexId>,
    /// Minimum member score at the cell witness.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    #[serde(rename = "type")]
    pub kind: String,
    pub index: usize,
    pub halfspaces: Vec<HalfSpaceRecord>,
    pub witness: Vec<f64>,
    pub communities: Vec<CommunityRecord>,
}

/// Minimum score of `members` at `w` (first `d-1` weights).
pub fn community_score_at(rsn: &RoadSocialNetwork, members: &[VertexId], w: &[f64]) -> Result<f64> {
    members.iter().try_fold(f64::INFINITY, |m, &v| Ok(m.min(score_checked(rsn.social.attributes(v), w)?)))
}

fn names(rsn: &RoadSocialNetwork, ids: &[VertexId]) -> Vec<String> {
    ids.iter().map(|&v| rsn.social.name(v).to_string()).collect()
}

/// Header line followed by one line per cell.
pub fn render(rsn: &RoadSocialNetwork, header: &Header, result: &ResultSet, core_members: &[VertexId]) -> Result<String> {
    let mut out = serde_json::to_string(header).expect("header serializes");
    out.push('\n');
    let name_local = |v: usize| rsn.social.name(core_members[v]).to_string();
    for (index, entry) in result.entries.iter().enumerate() {
        let cell = &entry.cell;
        let halfspaces = cell
            .constraints
            .iter()
            .map(|(h, side)| HalfSpaceRecord {
                a: h.a.clone(),
                b: h.b,
                side: match side {
                    Side::Pos => "pos",
                    Side::Neg => "neg",
                }
                .to_string(),
                winner: name_local(h.winner),
                loser: name_local(h.loser),
            })
            .collect();
        let communities = entry
            .communities
            .iter()
            .enumerate()
            .map(|(i, c)| {
                Ok(CommunityRecord {
                    rank: i + 1,
                    members: names(rsn, c),
                    ids: c.clone(),
                    score: community_score_at(rsn, c, &cell.witness)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let record = CellRecord {
            kind: "cell".into(),
            index,
            halfspaces,
            witness: cell.witness.clone(),
            communities,
        };
        out.push_str(&serde_json::to_string(&record).expect("cell serializes"));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    #[serde(rename = "type")]
    pub kind: String,
    pub w: Vec<f64>,
    /// Top communities, best first.
    pub communities: Vec<CommunityRecord>,
    /// Length of the full deletion chain.
    pub chain_length: usize,
}

/// One-line oracle answer: the best `depth` communities at `w`.
pub fn oracle_document(rsn: &RoadSocialNetwork, w: &[f64], ranking: &FixedWeightRanking, depth: usize) -> String {
    let n = ranking.chain.len();
    let communities = (0..depth.min(n))
        .map(|i| {
            let c = &ranking.chain[n - 1 - i];
            CommunityRecord { rank: i + 1, members: names(rsn, c), ids: c.clone(), score: ranking.scores[n - 1 - i] }
        })
        .collect();
    let record = OracleRecord { kind: "oracle".into(), w: w.to_vec(), communities, chain_length: n };
    serde_json::to_string(&record).expect("oracle record serializes")
}

/// One parsed line of a query document.
#[derive(Debug, Clone, PartialEq)]
pub enum Line {
    Header(Header),
    Cell(CellRecord),
}

/// Parses a query document back into its lines.
pub fn parse_document(text: &str) -> std::result::Result<Vec<Line>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l)?;
            if v.get("type").and_then(|t| t.as_str()) == Some("header") {
                serde_json::from_value(v).map(Line::Header)
            } else {
                serde_json::from_value(v).map(Line::Cell)
            }
        })
        .collect()
}
