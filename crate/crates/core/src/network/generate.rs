//! Synthetic road-social networks.
//!
//! Attribute modes follow the classic skyline benchmark generator
//! (independent / correlated / anti-correlated); roads are jittered grids and
//! friendships are mostly local so that cohesive, spatially compact groups
//! exist.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Location, RoadEdge, RoadNetwork, RoadSocialNetwork, SocialNetwork};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeMode {
    Independent,
    Correlated,
    AntiCorrelated,
}

impl std::str::FromStr for AttributeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" | "ind" => Ok(Self::Independent),
            "correlated" | "cor" => Ok(Self::Correlated),
            "anti-correlated" | "anti" => Ok(Self::AntiCorrelated),
            _ => Err(Error::Generator(format!("unknown attribute mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RoadShape {
    /// `rows x cols` lattice, edge weights uniform in `[0.5, 1.5)`.
    Grid { rows: usize, cols: usize },
    Loaded(RoadNetwork),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n_social: usize,
    pub d: usize,
    pub mode: AttributeMode,
    pub road: RoadShape,
    /// Target mean social degree.
    pub avg_degree: f64,
    /// Fraction of friendships drawn from the spatial neighbourhood.
    pub locality: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn new(n_social: usize, d: usize, mode: AttributeMode, road: RoadShape, seed: u64) -> Self {
        Self {
            n_social,
            d,
            mode,
            road,
            avg_degree: 8.0,
            locality: 0.85,
            seed,
        }
    }
}

fn peak(rng: &mut impl Rng, lo: f64, hi: f64, dim: usize) -> f64 {
    (0..dim).map(|_| rng.gen_range(lo..hi)).sum::<f64>() / dim as f64
}

fn normal(rng: &mut impl Rng, med: f64, var: f64) -> f64 {
    peak(rng, med - var, med + var, 12)
}

fn in_unit(x: &[f64]) -> bool {
    x.iter().all(|&v| (0.0..=1.0).contains(&v))
}

fn attribute_row(rng: &mut impl Rng, d: usize, mode: AttributeMode) -> Vec<f64> {
    match mode {
        AttributeMode::Independent => (0..d).map(|_| rng.gen::<f64>()).collect(),
        AttributeMode::Correlated | AttributeMode::AntiCorrelated => loop {
            let v = match mode {
                AttributeMode::Correlated => peak(rng, 0.0, 1.0, d),
                _ => normal(rng, 0.5, 0.25),
            };
            let mut x = vec![v; d];
            let l = v.min(1.0 - v);
            if d > 1 && l > 0.0 {
                for i in 0..d {
                    let h = match mode {
                        AttributeMode::Correlated => normal(rng, 0.0, l),
                        _ => rng.gen_range(-l..l),
                    };
                    x[i] += h;
                    x[(i + 1) % d] -= h;
                }
            }
            if in_unit(&x) {
                break x;
            }
        },
    }
}

/// `n` attribute vectors in `[0, 1]^d`, deterministic in `seed`.
pub fn generate_attributes(n: usize, d: usize, mode: AttributeMode, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 || d == 0 {
        return Err(Error::Generator("need n >= 1 and d >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| attribute_row(&mut rng, d, mode)).collect())
}

fn grid_road(rows: usize, cols: usize, rng: &mut impl Rng) -> Result<RoadNetwork> {
    if rows == 0 || cols == 0 {
        return Err(Error::Generator("grid needs at least one row and column".into()));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            if c + 1 < cols {
                edges.push(RoadEdge { u, v: u + 1, weight: rng.gen_range(0.5..1.5) });
            }
            if r + 1 < rows {
                edges.push(RoadEdge { u, v: u + cols, weight: rng.gen_range(0.5..1.5) });
            }
        }
    }
    RoadNetwork::new(rows * cols, edges)
}

/// Builds a random road-social network; users sit uniformly on road edges.
pub fn generate_road_social(params: &GenParams) -> Result<RoadSocialNetwork> {
    let n = params.n_social;
    if n == 0 {
        return Err(Error::Generator("n_social must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (road, cols) = match &params.road {
        RoadShape::Grid { rows, cols } => (grid_road(*rows, *cols, &mut rng)?, *cols),
        RoadShape::Loaded(r) => (r.clone(), r.num_vertices().max(1)),
    };
    if road.num_edges() == 0 {
        return Err(Error::Generator("no edges to place users".into()));
    }
    let attributes = generate_attributes(n, params.d, params.mode, rng.gen())?;

    let mut locations = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    for _ in 0..n {
        let edge = rng.gen_range(0..road.num_edges());
        let e = road.edge(edge);
        let offset = rng.gen::<f64>() * e.weight;
        locations.push(Location::OnEdge { edge, offset });
        let anchor = if offset * 2.0 <= e.weight { e.u } else { e.v };
        coords.push((anchor / cols, anchor % cols));
    }

    // Spatial buckets sized so each holds roughly 2 * avg_degree users.
    let rows_total = road.num_vertices().div_ceil(cols);
    let target = (2.0 * params.avg_degree).max(1.0);
    let side = (((rows_total * cols) as f64 * target / n as f64).sqrt().ceil() as usize).max(1);
    let (brows, bcols) = (rows_total.div_ceil(side), cols.div_ceil(side));
    let mut buckets = vec![Vec::new(); brows * bcols];
    let bucket_of = |(r, c): (usize, usize)| (r / side, c / side);
    for (v, &rc) in coords.iter().enumerate() {
        let (br, bc) = bucket_of(rc);
        buckets[br * bcols + bc].push(v);
    }

    let wanted = ((params.avg_degree * n as f64) / 2.0).round() as usize;
    let max_edges = n * (n - 1) / 2;
    let wanted = wanted.min(max_edges);
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(wanted);
    let mut attempts = 0usize;
    while edges.len() < wanted && attempts < wanted * 50 + 100 {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = if rng.gen::<f64>() < params.locality {
            let (br, bc) = bucket_of(coords[u]);
            let nr = (br as isize + rng.gen_range(-1..=1)).clamp(0, brows as isize - 1) as usize;
            let nc = (bc as isize + rng.gen_range(-1..=1)).clamp(0, bcols as isize - 1) as usize;
            let bucket = &buckets[nr * bcols + nc];
            if bucket.is_empty() {
                continue;
            }
            bucket[rng.gen_range(0..bucket.len())]
        } else {
            rng.gen_range(0..n)
        };
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }

    let names = (0..n).map(|i| i.to_string()).collect();
    let social = SocialNetwork::new(names, &edges, locations, attributes)?;
    RoadSocialNetwork::new(road, social)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pearson(rows: &[Vec<f64>]) -> f64 {
        let n = rows.len() as f64;
        let (mx, my) = (
            rows.iter().map(|r| r[0]).sum::<f64>() / n,
            rows.iter().map(|r| r[1]).sum::<f64>() / n,
        );
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for r in rows {
            let (dx, dy) = (r[0] - mx, r[1] - my);
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn deterministic_and_in_range() {
        for mode in [AttributeMode::Independent, AttributeMode::Correlated, AttributeMode::AntiCorrelated] {
            let a = generate_attributes(1000, 3, mode, 7).unwrap();
            assert_eq!(a, generate_attributes(1000, 3, mode, 7).unwrap());
            assert!(a.iter().all(|r| r.len() == 3 && in_unit(r)));
        }
    }

    #[test]
    fn correlation_signs() {
        let anti = generate_attributes(5000, 2, AttributeMode::AntiCorrelated, 1).unwrap();
        assert!(pearson(&anti) < 0.0);
        let cor = generate_attributes(5000, 2, AttributeMode::Correlated, 1).unwrap();
        assert!(pearson(&cor) > 0.5, "{}", pearson(&cor));
    }

    #[test]
    fn independent_means() {
        let a = generate_attributes(100_000, 3, AttributeMode::Independent, 3).unwrap();
        for i in 0..3 {
            let mean = a.iter().map(|r| r[i]).sum::<f64>() / a.len() as f64;
            assert!((mean - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn grid_network() {
        let p = GenParams::new(50, 2, AttributeMode::Independent, RoadShape::Grid { rows: 5, cols: 5 }, 11);
        let g = generate_road_social(&p).unwrap();
        assert_eq!(g.social.num_vertices(), 50);
        assert_eq!(g.road.num_edges(), 40);
        g.validate().unwrap();
        assert_eq!(g, generate_road_social(&p).unwrap());
    }

    #[test]
    fn single_vertex_grid_rejected() {
        let p = GenParams::new(5, 2, AttributeMode::Independent, RoadShape::Grid { rows: 1, cols: 1 }, 0);
        let err = generate_road_social(&p).unwrap_err().to_string();
        assert!(err.contains("no edges to place users"));
        let mut p0 = p.clone();
        p0.n_social = 0;
        p0.road = RoadShape::Grid { rows: 2, cols: 2 };
        assert!(generate_road_social(&p0).is_err());
    }
}
