//! Hand-built 14-user network realizing the worked example.
//!
//! Attribute rows are chosen so that, relative to `v1`, the score differences
//! over `(w1, w2)` are
//!
//! * `S(v4) - S(v1) = -0.035 + 0.3 w1 + 0.05 w2` (positive on the region)
//! * `S(v5) - S(v1) =  0.1   - 0.3 w1 + 0.05 w2`
//! * `S(v7) - S(v1) =  0.16  - 0.7 w1 + 0.05 w2`
//!
//! which puts the H1/H3 boundary at `w1 = 0.195`.

use crate::geometry::Region;
use crate::network::{Location, RoadEdge, RoadNetwork, RoadSocialNetwork, SocialNetwork};

/// Attribute rows for `v1..v14`.
pub const FIXTURE_ATTRIBUTES: [[f64; 3]; 14] = [
    [4.0, 4.0, 4.0],
    [6.0, 5.5, 5.5],
    [5.0, 5.0, 5.0],
    [4.265, 4.015, 3.965],
    [3.8, 4.15, 4.1],
    [5.5, 6.0, 5.5],
    [3.46, 4.21, 4.16],
    [1.0, 2.0, 3.0],
    [2.0, 2.0, 2.0],
    [2.5, 1.5, 2.0],
    [1.5, 2.5, 2.0],
    [3.0, 1.0, 1.0],
    [1.0, 3.0, 1.0],
    [9.0, 9.0, 9.0],
];

/// Social edges over `v1..v14` (1-based).
pub const FIXTURE_EDGES: [(usize, usize); 26] = [
    (2, 3),
    (2, 6),
    (2, 7),
    (3, 6),
    (3, 7),
    (6, 7),
    (1, 7),
    (1, 2),
    (1, 6),
    (4, 5),
    (4, 2),
    (4, 3),
    (5, 3),
    (5, 6),
    (8, 1),
    (8, 4),
    (8, 5),
    (8, 7),
    (9, 10),
    (10, 11),
    (9, 11),
    (11, 6),
    (14, 9),
    (12, 13),
    (12, 5),
    (13, 4),
];

/// Road edges over `r1..r14` (1-based) with their costs.
pub const FIXTURE_ROAD: [(usize, usize, f64); 14] = [
    (3, 2, 4.0),
    (2, 6, 5.0),
    (7, 2, 3.0),
    (7, 6, 7.0),
    (1, 2, 2.0),
    (4, 2, 2.0),
    (5, 2, 3.0),
    (8, 6, 5.0),
    (9, 2, 1.0),
    (10, 9, 1.0),
    (11, 9, 1.0),
    (12, 2, 2.0),
    (13, 12, 1.0),
    (14, 9, 1.0),
];

/// The example network (user `v_i` sits on road vertex `r_i`) and the
/// region `[0.1, 0.5] x [0.2, 0.4]`.
pub fn build_running_example_fixture() -> (RoadSocialNetwork, Region) {
    let road = RoadNetwork::new(
        14,
        FIXTURE_ROAD
            .iter()
            .map(|&(u, v, weight)| RoadEdge { u: u - 1, v: v - 1, weight })
            .collect(),
    )
    .expect("fixture road is valid");
    let names = (1..=14).map(|i| format!("v{i}")).collect();
    let edges: Vec<(usize, usize)> = FIXTURE_EDGES.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
    let locations = (0..14).map(Location::Vertex).collect();
    let attributes = FIXTURE_ATTRIBUTES.iter().map(|r| r.to_vec()).collect();
    let social = SocialNetwork::new(names, &edges, locations, attributes).expect("fixture social graph is valid");
    let rsn = RoadSocialNetwork::new(road, social).expect("fixture is consistent");
    let region = Region::rectangle(&[(0.1, 0.5), (0.2, 0.4)]).expect("fixture region is valid");
    (rsn, region)
}
