//! Whitespace-separated text formats (`#` starts a comment line):
//!
//! * road: `u v weight`
//! * social edges: `u v`
//! * attributes: `v x_1 ... x_d`
//! * locations: `v eu ev offset` (point on edge) or `v r` (on road vertex)
//!
//! Social vertex names are arbitrary tokens; dense ids follow the order of the
//! attribute file.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Location, RoadEdge, RoadNetwork, RoadSocialNetwork, SocialNetwork, VertexId};
use crate::error::{Error, Result};

pub const ROAD_FILE: &str = "road.tsv";
pub const SOCIAL_EDGES_FILE: &str = "social_edges.tsv";
pub const ATTRS_FILE: &str = "attributes.tsv";
pub const LOCATIONS_FILE: &str = "locations.tsv";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

pub fn load_road_network(path: impl AsRef<Path>) -> Result<RoadNetwork> {
    let path = path.as_ref();
    parse_road_network(&read(path)?, path)
}

pub fn parse_road_network(text: &str, label: &Path) -> Result<RoadNetwork> {
    let mut edges = Vec::new();
    let mut max_vertex = None;
    for (line, fields) in content_lines(text) {
        if fields.len() != 3 {
            return Err(parse_err(
                label,
                line,
                format!("expected `u v weight`, found {} field(s) (dangling endpoint?)", fields.len()),
            ));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(label, line, format!("bad road vertex `{}`", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(label, line, format!("bad road vertex `{}`", fields[1])))?;
        let weight: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(label, line, format!("bad weight `{}`", fields[2])))?;
        if weight < 0.0 {
            return Err(parse_err(label, line, format!("negative weight at line {line}")));
        }
        if !weight.is_finite() {
            return Err(parse_err(label, line, "non-finite weight"));
        }
        max_vertex = max_vertex.max(Some(u.max(v)));
        edges.push((line, RoadEdge { u, v, weight }));
    }
    let n = max_vertex.map_or(0, |m| m + 1);
    let mut seen = HashMap::new();
    for (line, e) in &edges {
        if seen.insert((e.u.min(e.v), e.u.max(e.v)), *line).is_some() {
            return Err(parse_err(label, *line, format!("duplicate road edge ({}, {})", e.u, e.v)));
        }
    }
    RoadNetwork::new(n, edges.into_iter().map(|(_, e)| e).collect())
}

pub fn load_social_network(
    road: &RoadNetwork,
    edges_path: impl AsRef<Path>,
    attrs_path: impl AsRef<Path>,
    locations_path: impl AsRef<Path>,
) -> Result<SocialNetwork> {
    let (ep, ap, lp) = (edges_path.as_ref(), attrs_path.as_ref(), locations_path.as_ref());
    parse_social_network(road, (&read(ep)?, ep), (&read(ap)?, ap), (&read(lp)?, lp))
}

/// Parses the three social files given as `(contents, label)` pairs.
pub fn parse_social_network(
    road: &RoadNetwork,
    edges: (&str, &Path),
    attrs: (&str, &Path),
    locations: (&str, &Path),
) -> Result<SocialNetwork> {
    let mut names = Vec::new();
    let mut ids: HashMap<String, VertexId> = HashMap::new();
    let mut table = Vec::new();
    let mut dim = None;
    for (line, fields) in content_lines(attrs.0) {
        if fields.len() < 2 {
            return Err(parse_err(attrs.1, line, "expected `v x_1 ... x_d`"));
        }
        let d = fields.len() - 1;
        match dim {
            None => dim = Some(d),
            Some(expected) if expected != d => {
                return Err(parse_err(
                    attrs.1,
                    line,
                    format!("inconsistent dimensionality: expected {expected}, found {d}"),
                ))
            }
            _ => {}
        }
        let row = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(attrs.1, line, format!("bad value `{f}`"))))
            .collect::<Result<Vec<_>>>()?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(attrs.1, line, "non-finite attribute"));
        }
        if ids.insert(fields[0].to_string(), names.len()).is_some() {
            return Err(parse_err(attrs.1, line, format!("duplicate attributes for {}", fields[0])));
        }
        names.push(fields[0].to_string());
        table.push(row);
    }

    let mut edge_list = Vec::new();
    for (line, fields) in content_lines(edges.0) {
        if fields.len() != 2 {
            return Err(parse_err(edges.1, line, "expected `u v`"));
        }
        let lookup = |name: &str| {
            ids.get(name)
                .copied()
                .ok_or_else(|| parse_err(edges.1, line, format!("missing attributes for {name}")))
        };
        let (u, v) = (lookup(fields[0])?, lookup(fields[1])?);
        if u == v {
            return Err(parse_err(edges.1, line, format!("self-loop on {}", fields[0])));
        }
        edge_list.push((line, (u.min(v), u.max(v))));
    }
    let mut seen = HashMap::new();
    for (line, e) in &edge_list {
        if seen.insert(*e, *line).is_some() {
            return Err(parse_err(
                edges.1,
                *line,
                format!("duplicate edge ({}, {})", names[e.0], names[e.1]),
            ));
        }
    }

    let mut locs: Vec<Option<Location>> = vec![None; names.len()];
    for (line, fields) in content_lines(locations.0) {
        let v = *ids
            .get(fields[0])
            .ok_or_else(|| parse_err(locations.1, line, format!("missing attributes for {}", fields[0])))?;
        let loc = match fields.len() {
            2 => {
                let r: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(locations.1, line, "bad road vertex"))?;
                Location::Vertex(r)
            }
            4 => {
                let parse_vertex = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| parse_err(locations.1, line, format!("bad road vertex `{s}`")))
                };
                let (a, b) = (parse_vertex(fields[1])?, parse_vertex(fields[2])?);
                let offset: f64 = fields[3]
                    .parse()
                    .map_err(|_| parse_err(locations.1, line, "bad offset"))?;
                let edge = road.find_edge(a, b).ok_or_else(|| {
                    parse_err(locations.1, line, format!("no road edge ({a}, {b})"))
                })?;
                let e = road.edge(edge);
                let offset = if e.u == a { offset } else { e.weight - offset };
                Location::OnEdge { edge, offset }
            }
            _ => return Err(parse_err(locations.1, line, "expected `v eu ev offset` or `v r`")),
        };
        road.validate_location(&loc)
            .map_err(|e| parse_err(locations.1, line, e.to_string()))?;
        if locs[v].replace(loc).is_some() {
            return Err(parse_err(locations.1, line, format!("duplicate location for {}", fields[0])));
        }
    }
    let locations = locs
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or_else(|| Error::Network(format!("missing location for {}", names[v]))))
        .collect::<Result<Vec<_>>>()?;
    let edge_pairs: Vec<_> = edge_list.into_iter().map(|(_, e)| e).collect();
    SocialNetwork::new(names, &edge_pairs, locations, table)
}

pub fn write_road_network(road: &RoadNetwork) -> String {
    let mut out = String::new();
    for e in road.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.weight);
    }
    out
}

/// Serializes the social graph as `(edges, attributes, locations)` texts.
pub fn write_social_network(road: &RoadNetwork, social: &SocialNetwork) -> (String, String, String) {
    let (mut edges, mut attrs, mut locs) = (String::new(), String::new(), String::new());
    for (u, v) in social.edges() {
        let _ = writeln!(edges, "{} {}", social.name(u), social.name(v));
    }
    for v in 0..social.num_vertices() {
        let _ = write!(attrs, "{}", social.name(v));
        for x in social.attributes(v) {
            let _ = write!(attrs, " {x}");
        }
        attrs.push('\n');
        match *social.location(v) {
            Location::Vertex(r) => {
                let _ = writeln!(locs, "{} {r}", social.name(v));
            }
            Location::OnEdge { edge, offset } => {
                let e = road.edge(edge);
                let _ = writeln!(locs, "{} {} {} {offset}", social.name(v), e.u, e.v);
            }
        }
    }
    (edges, attrs, locs)
}

fn paths(dir: &Path) -> [PathBuf; 4] {
    [ROAD_FILE, SOCIAL_EDGES_FILE, ATTRS_FILE, LOCATIONS_FILE].map(|f| dir.join(f))
}

/// Loads the four standard files from `dir`.
pub fn load_road_social(dir: impl AsRef<Path>) -> Result<RoadSocialNetwork> {
    let [road_p, edges_p, attrs_p, locs_p] = paths(dir.as_ref());
    let road = load_road_network(&road_p)?;
    let social = load_social_network(&road, &edges_p, &attrs_p, &locs_p)?;
    RoadSocialNetwork::new(road, social)
}

pub fn save_road_social(rsn: &RoadSocialNetwork, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let [road_p, edges_p, attrs_p, locs_p] = paths(dir);
    let (edges, attrs, locs) = write_social_network(&rsn.road, &rsn.social);
    for (p, text) in [
        (road_p, write_road_network(&rsn.road)),
        (edges_p, edges),
        (attrs_p, attrs),
        (locs_p, locs),
    ] {
        fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label() -> &'static Path {
        Path::new("<mem>")
    }

    #[test]
    fn single_edge_road() {
        let r = parse_road_network("# comment\n0 1 5.0\n", label()).unwrap();
        assert_eq!(r.num_vertices(), 2);
        assert_eq!(r.edges(), &[RoadEdge { u: 0, v: 1, weight: 5.0 }]);
    }

    #[test]
    fn negative_weight_names_line() {
        let err = parse_road_network("0 1 1\n0 2 -2\n", label()).unwrap_err().to_string();
        assert!(err.contains("negative weight at line 2"), "{err}");
    }

    #[test]
    fn dangling_endpoint() {
        let err = parse_road_network("0 1 1\n3\n", label()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn triangle_degrees() {
        let r = parse_road_network("0 1 1\n1 2 1\n2 0 1\n", label()).unwrap();
        assert_eq!((r.num_vertices(), r.num_edges()), (3, 3));
        assert!((0..3).all(|v| r.degree(v) == 2));
    }

    fn road() -> RoadNetwork {
        parse_road_network("0 1 4\n1 2 2\n", label()).unwrap()
    }

    #[test]
    fn social_basic() {
        let s = parse_social_network(
            &road(),
            ("a b\n", label()),
            ("a 1 2 3\nb 4 5 6\n", label()),
            ("a 0\nb 1 0 1.5\n", label()),
        )
        .unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.num_vertices(), 2);
        // written as (1, 0): offset is measured from the stored `u` endpoint
        assert_eq!(*s.location(1), Location::OnEdge { edge: 0, offset: 2.5 });
    }

    #[test]
    fn social_missing_attributes() {
        let err = parse_social_network(
            &road(),
            ("0 5\n", label()),
            ("0 1\n1 1\n", label()),
            ("0 0\n1 1\n", label()),
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("missing attributes for 5"), "{err}");
    }

    #[test]
    fn social_inconsistent_dim() {
        let err = parse_social_network(
            &road(),
            ("", label()),
            ("0 1 2 3\n1 1 2 3 4\n", label()),
            ("0 0\n1 1\n", label()),
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("inconsistent dimensionality"), "{err}");
    }

    #[test]
    fn social_duplicate_edge_and_missing_location() {
        let attrs = ("0 1\n1 1\n", label());
        let locs = ("0 0\n1 1\n", label());
        assert!(parse_social_network(&road(), ("0 1\n1 0\n", label()), attrs, locs).is_err());
        let err = parse_social_network(&road(), ("0 1\n", label()), attrs, ("0 0\n", label()))
            .unwrap_err()
            .to_string();
        assert!(err.contains("missing location for 1"), "{err}");
        assert!(parse_social_network(&road(), ("", label()), attrs, ("0 0\n1 0 2 1\n", label())).is_err());
    }
}
