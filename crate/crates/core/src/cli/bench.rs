//! Benchmark harness: the four engines over random queries, as CSV.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::{Duration, Instant};

use super::workload::{random_queries, QueryInstance};
use super::{query_mode, BenchArgs, ModeArg};
use crate::error::Result;
use crate::global::gs_search_prepared;
use crate::local::{ls_search_prepared, LsParams};
use crate::network::{generate_road_social, RoadSocialNetwork, VertexId};
use crate::query::{Mode, Prepared};
use crate::result::ResultSet;

/// One engine run on one query.
#[derive(Debug, Clone)]
pub struct Sample {
    pub prepare: Duration,
    pub search: Duration,
    pub cells: usize,
    pub communities: usize,
    pub best: Vec<Vec<VertexId>>,
}

fn distinct_communities(r: &ResultSet) -> usize {
    let mut all: Vec<&Vec<VertexId>> = r.entries.iter().flat_map(|e| &e.communities).collect();
    all.sort();
    all.dedup();
    all.len()
}

/// Runs one engine on one query, timing preprocessing and search apart.
pub fn run_one(rsn: &RoadSocialNetwork, qi: &QueryInstance, k: usize, t: f64, mode: ModeArg, j: usize, params: &LsParams) -> Result<Sample> {
    let m = if mode.is_topj() { Mode::TopJ(j) } else { Mode::Nc };
    let t0 = Instant::now();
    let p = Prepared::new(rsn, &qi.q, k, t, &qi.region)?.expect("workload queries have a core");
    let prepare = t0.elapsed();
    let t1 = Instant::now();
    let r = if mode.is_local() { ls_search_prepared(&p, m, params)? } else { gs_search_prepared(&p, m)? };
    let search = t1.elapsed();
    Ok(Sample { prepare, search, cells: r.entries.len(), communities: distinct_communities(&r), best: r.distinct_best() })
}

/// Share of `reference` communities that also appear in `found`.
pub fn recall(found: &[Vec<VertexId>], reference: &[Vec<VertexId>]) -> (usize, usize) {
    (reference.iter().filter(|c| found.contains(c)).count(), reference.len())
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub const CSV_HEADER: &str =
    "k,algorithm,samples,mean_total_ms,mean_prepare_ms,mean_search_ms,mean_cells,mean_communities,ratio,ratio_pooled";

pub fn run_bench(a: &BenchArgs) -> Result<String> {
    let params = a.ls.params()?;
    if a.modes.iter().any(|m| m.is_topj()) {
        query_mode(ModeArg::GsT, Some(a.j))?;
    }
    let rsn = generate_road_social(&a.gen.params()?)?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for &k in &a.ks {
        let queries = random_queries(&rsn, k, a.t, a.q_size, a.sigma, a.queries, a.gen.seed ^ (k as u64))?;
        let mut samples: BTreeMap<&'static str, Vec<Sample>> = BTreeMap::new();
        let wants_ratio = a.modes.contains(&ModeArg::LsNc);
        let mut modes = a.modes.clone();
        if wants_ratio && !modes.contains(&ModeArg::GsNc) {
            modes.insert(0, ModeArg::GsNc);
        }
        for qi in &queries {
            for &mode in &modes {
                samples.entry(mode.name()).or_default().push(run_one(&rsn, qi, k, a.t, mode, a.j, &params)?);
            }
        }
        for &mode in &a.modes {
            let s = &samples[mode.name()];
            let n = s.len().max(1) as f64;
            let mean = |f: &dyn Fn(&Sample) -> f64| s.iter().map(f).sum::<f64>() / n;
            let (ratio, pooled) = if mode == ModeArg::LsNc {
                let gs = &samples[ModeArg::GsNc.name()];
                let per: Vec<(usize, usize)> = s.iter().zip(gs).map(|(l, g)| recall(&l.best, &g.best)).collect();
                let macro_ = per.iter().map(|&(f, t)| if t == 0 { 1.0 } else { f as f64 / t as f64 }).sum::<f64>() / n;
                let (f, t): (usize, usize) = per.iter().fold((0, 0), |acc, &(f, t)| (acc.0 + f, acc.1 + t));
                (format!("{macro_:.4}"), format!("{:.4}", if t == 0 { 1.0 } else { f as f64 / t as f64 }))
            } else {
                (String::new(), String::new())
            };
            let _ = writeln!(
                csv,
                "{k},{},{},{:.3},{:.3},{:.3},{:.2},{:.2},{ratio},{pooled}",
                mode.name(),
                s.len(),
                mean(&|x| ms(x.prepare + x.search)),
                mean(&|x| ms(x.prepare)),
                mean(&|x| ms(x.search)),
                mean(&|x| x.cells as f64),
                mean(&|x| x.communities as f64),
            );
        }
    }
    Ok(csv)
}
