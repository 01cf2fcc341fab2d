//! Road-social network model: a weighted road graph plus a social graph whose
//! users are pinned to road locations and carry `d` numeric attributes.

mod generate;
mod io;

pub use generate::{generate_attributes, generate_road_social, AttributeMode, GenParams, RoadShape};
pub use io::{
    load_road_network, load_road_social, load_social_network, parse_road_network,
    parse_social_network, save_road_social, write_road_network, write_social_network, ATTRS_FILE,
    LOCATIONS_FILE, ROAD_FILE, SOCIAL_EDGES_FILE,
};

use crate::error::{Error, Result};

/// Dense social vertex id.
pub type VertexId = usize;
/// Dense road vertex id.
pub type RoadVertex = usize;
/// Index into [`RoadNetwork::edges`].
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadEdge {
    pub u: RoadVertex,
    pub v: RoadVertex,
    pub weight: f64,
}

/// Undirected road graph with non-negative edge costs.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    num_vertices: usize,
    edges: Vec<RoadEdge>,
    adjacency: Vec<Vec<(RoadVertex, EdgeId)>>,
}

impl RoadNetwork {
    pub fn new(num_vertices: usize, edges: Vec<RoadEdge>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); num_vertices];
        let mut seen = std::collections::HashSet::new();
        for (id, e) in edges.iter().enumerate() {
            if e.u >= num_vertices || e.v >= num_vertices {
                return Err(Error::Network(format!(
                    "edge {} references road vertex outside [0, {num_vertices})",
                    id
                )));
            }
            if !(e.weight >= 0.0) || !e.weight.is_finite() {
                return Err(Error::Network(format!("negative or invalid weight on edge {id}")));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::Network(format!("duplicate road edge ({}, {})", e.u, e.v)));
            }
            adjacency[e.u].push((e.v, id));
            if e.u != e.v {
                adjacency[e.v].push((e.u, id));
            }
        }
        Ok(Self {
            num_vertices,
            edges,
            adjacency,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[RoadEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &RoadEdge {
        &self.edges[id]
    }

    /// Incident `(neighbor, edge)` pairs of `u`.
    pub fn neighbors(&self, u: RoadVertex) -> &[(RoadVertex, EdgeId)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: RoadVertex) -> usize {
        self.adjacency[u].len()
    }

    pub fn find_edge(&self, a: RoadVertex, b: RoadVertex) -> Option<EdgeId> {
        if a >= self.num_vertices {
            return None;
        }
        self.adjacency[a]
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, id)| id)
    }

    pub fn validate_location(&self, loc: &Location) -> Result<()> {
        match *loc {
            Location::Vertex(r) if r < self.num_vertices => Ok(()),
            Location::Vertex(r) => Err(Error::Network(format!("location on unknown road vertex {r}"))),
            Location::OnEdge { edge, offset } => {
                let e = self
                    .edges
                    .get(edge)
                    .ok_or_else(|| Error::Network(format!("location on unknown road edge {edge}")))?;
                if offset >= 0.0 && offset <= e.weight {
                    Ok(())
                } else {
                    Err(Error::Network(format!(
                        "offset {offset} outside [0, {}] on edge ({}, {})",
                        e.weight, e.u, e.v
                    )))
                }
            }
        }
    }
}

/// A point of the road network: either a road vertex or a point on an edge at
/// `offset` cost from the edge's `u` endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Vertex(RoadVertex),
    OnEdge { edge: EdgeId, offset: f64 },
}

impl Location {
    pub fn is_on_vertex(&self) -> bool {
        matches!(self, Location::Vertex(_))
    }
}

/// Social graph with per-vertex road location and attribute vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialNetwork {
    names: Vec<String>,
    adjacency: Vec<Vec<VertexId>>,
    num_edges: usize,
    locations: Vec<Location>,
    dim: usize,
    attributes: Vec<f64>,
}

impl SocialNetwork {
    /// Builds a social network over `names.len()` vertices. Edges are
    /// undirected; self-loops and duplicates are rejected.
    pub fn new(
        names: Vec<String>,
        edges: &[(VertexId, VertexId)],
        locations: Vec<Location>,
        attributes: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = names.len();
        if locations.len() != n || attributes.len() != n {
            return Err(Error::Network(
                "every vertex needs exactly one location and one attribute vector".into(),
            ));
        }
        let dim = attributes.first().map_or(0, Vec::len);
        if n > 0 && dim == 0 {
            return Err(Error::Network("attribute dimensionality must be at least 1".into()));
        }
        if attributes.iter().any(|a| a.len() != dim) {
            return Err(Error::Network("inconsistent dimensionality".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Network(format!("social edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::Network(format!("self-loop on {}", names[u])));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before {
                return Err(Error::Network(format!("duplicate edge at {}", names[u])));
            }
        }
        Ok(Self {
            names,
            adjacency,
            num_edges: edges.len(),
            locations,
            dim,
            attributes: attributes.into_iter().flatten().collect(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Attribute dimensionality `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn attributes(&self, v: VertexId) -> &[f64] {
        &self.attributes[v * self.dim..(v + 1) * self.dim]
    }

    pub fn location(&self, v: VertexId) -> &Location {
        &self.locations[v]
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name)
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadSocialNetwork {
    pub road: RoadNetwork,
    pub social: SocialNetwork,
}

impl RoadSocialNetwork {
    pub fn new(road: RoadNetwork, social: SocialNetwork) -> Result<Self> {
        let rsn = Self { road, social };
        rsn.validate()?;
        Ok(rsn)
    }

    /// Checks every structural invariant of both graphs.
    pub fn validate(&self) -> Result<()> {
        for v in 0..self.social.num_vertices() {
            self.road.validate_location(self.social.location(v))?;
            if self.social.neighbors(v).contains(&v) {
                return Err(Error::Network(format!("self-loop on {}", self.social.name(v))));
            }
            if self.social.neighbors(v).windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Network(format!("unsorted or duplicate adjacency at {}", v)));
            }
            for &u in self.social.neighbors(v) {
                if !self.social.neighbors(u).contains(&v) {
                    return Err(Error::Network(format!("asymmetric edge ({v}, {u})")));
                }
            }
        }
        for e in self.road.edges() {
            if !(e.weight >= 0.0) {
                return Err(Error::Network("negative road weight".into()));
            }
        }
        Ok(())
    }

    /// Resolves external vertex names to dense ids.
    pub fn resolve(&self, names: &[&str]) -> Result<Vec<VertexId>> {
        names
            .iter()
            .map(|n| {
                self.social
                    .id_of(n)
                    .ok_or_else(|| Error::Query(format!("unknown query vertex {n}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_road_edges() {
        let e = |u, v, weight| RoadEdge { u, v, weight };
        assert!(RoadNetwork::new(2, vec![e(0, 1, -1.0)]).is_err());
        assert!(RoadNetwork::new(2, vec![e(0, 2, 1.0)]).is_err());
        assert!(RoadNetwork::new(2, vec![e(0, 1, 1.0), e(1, 0, 2.0)]).is_err());
        let r = RoadNetwork::new(3, vec![e(0, 1, 1.0), e(1, 2, 2.0), e(2, 0, 3.0)]).unwrap();
        assert!((0..3).all(|v| r.degree(v) == 2));
        assert_eq!(r.find_edge(2, 1), Some(1));
    }

    #[test]
    fn social_rejects_duplicates_and_loops() {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        let locs = vec![Location::Vertex(0); 2];
        let attrs = vec![vec![1.0], vec![2.0]];
        assert!(SocialNetwork::new(names.clone(), &[(0, 1), (1, 0)], locs.clone(), attrs.clone()).is_err());
        assert!(SocialNetwork::new(names.clone(), &[(0, 0)], locs.clone(), attrs.clone()).is_err());
        let s = SocialNetwork::new(names, &[(0, 1)], locs, attrs).unwrap();
        assert_eq!(s.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(s.attributes(1), &[2.0]);
    }
}
