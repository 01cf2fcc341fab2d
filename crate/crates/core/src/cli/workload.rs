//! Random query workloads over a generated network.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::ktcore::{core_decomposition, maximal_kt_core, CoreOutcome};
use crate::network::{RoadSocialNetwork, VertexId};
use crate::oracle::random_region;

#[derive(Debug, Clone, PartialEq)]
pub struct QueryInstance {
    pub q: Vec<VertexId>,
    pub region: Region,
}

/// `count` queries of `q_size` users drawn from the social `k`-core, each
/// with a `(k,t)`-core, and a random square region of side `sigma`.
pub fn random_queries(
    rsn: &RoadSocialNetwork,
    k: usize,
    t: f64,
    q_size: usize,
    sigma: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<QueryInstance>> {
    if q_size == 0 || !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Query("need q_size >= 1 and 0 < sigma < 1".into()));
    }
    let dim = rsn.social.dim().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| Error::Query("need d >= 2".into()))?;
    let g = &rsn.social;
    let cores = core_decomposition(g);
    let pool: Vec<VertexId> = (0..g.num_vertices()).filter(|&v| cores[v] >= k).collect();
    if pool.is_empty() {
        return Err(Error::Query(format!("the social network has no {k}-core")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count + 100 {
            return Err(Error::Query(format!("found only {} of {count} queries with a (k,t)-core", out.len())));
        }
        let start = *pool.choose(&mut rng).expect("pool is nonempty");
        // Breadth-first from the start inside the k-core, shuffled per level.
        let mut q = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            if q.len() >= q_size {
                break;
            }
            let mut next: Vec<VertexId> =
                g.neighbors(v).iter().copied().filter(|&u| cores[u] >= k && !q.contains(&u)).collect();
            next.shuffle(&mut rng);
            for u in next {
                if q.len() < q_size {
                    q.push(u);
                    queue.push_back(u);
                }
            }
        }
        if q.len() < q_size {
            continue;
        }
        q.sort_unstable();
        if matches!(maximal_kt_core(rsn, &q, k, t)?, CoreOutcome::Found(_)) {
            let region = random_region(&mut rng, dim, sigma);
            out.push(QueryInstance { q, region });
        }
    }
    Ok(out)
}
