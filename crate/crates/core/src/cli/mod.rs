//! Command-line front end: dataset generation, index persistence, queries,
//! the brute-force oracle and the benchmark harness.
//!
//! Query output is JSON Lines: one `header` object, then one `cell` object
//! per cell of the partitioned region. See the README for the schema.

pub mod bench;
pub mod index;
pub mod output;
pub mod workload;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::global::gs_search_prepared;
use crate::ktcore::NoCoreReason;
use crate::local::{ls_search_prepared, LsParams, Strategy, DEFAULT_BUDGET, DEFAULT_LAMBDA, DEFAULT_ZETA};
use crate::network::{
    generate_road_social, load_road_social, save_road_social, AttributeMode, GenParams, RoadShape, RoadSocialNetwork,
    VertexId,
};
use crate::oracle::{build_running_example_fixture, oracle_chain_at};
use crate::query::{Mode, Prepared};
use crate::result::ResultSet;

/// Exit status of a successful query with results.
pub const EXIT_OK: u8 = 0;
/// Errors, including usage errors.
pub const EXIT_ERROR: u8 = 1;
/// The query has no `(k,t)`-core.
pub const EXIT_NO_CORE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "macs", version, about = "Multi-attributed community search on road-social networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic road-social network as TSV files.
    Gen(GenArgs),
    /// Build or inspect a persisted core + dominance graph.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Run a MAC search.
    Query(QueryArgs),
    /// Brute-force ranking at one weight vector.
    Oracle(OracleArgs),
    /// Time the four engines over random queries; CSV output.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum IndexCommand {
    Build(IndexBuildArgs),
    Load(IndexLoadArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttrMode {
    Independent,
    Correlated,
    AntiCorrelated,
}

impl From<AttrMode> for AttributeMode {
    fn from(m: AttrMode) -> Self {
        match m {
            AttrMode::Independent => AttributeMode::Independent,
            AttrMode::Correlated => AttributeMode::Correlated,
            AttrMode::AntiCorrelated => AttributeMode::AntiCorrelated,
        }
    }
}

/// Generator parameters.
#[derive(Debug, Clone, Args)]
pub struct GenSpec {
    /// Number of social users.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Attribute dimensionality.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = AttrMode::Independent)]
    pub attr_mode: AttrMode,
    /// Road grid as `ROWSxCOLS`; defaults to a square grid with about n vertices.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 8.0)]
    pub avg_degree: f64,
    /// Fraction of friendships drawn from the spatial neighbourhood.
    #[arg(long, default_value_t = 0.85)]
    pub locality: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GenSpec {
    pub fn params(&self) -> Result<GenParams> {
        let (rows, cols) = match &self.grid {
            Some(g) => parse_grid(g)?,
            None => {
                let side = (self.n as f64).sqrt().ceil().max(2.0) as usize;
                (side, side)
            }
        };
        let mut p = GenParams::new(self.n, self.d, self.mode(), RoadShape::Grid { rows, cols }, self.seed);
        p.avg_degree = self.avg_degree;
        p.locality = self.locality;
        Ok(p)
    }

    fn mode(&self) -> AttributeMode {
        self.attr_mode.into()
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Generator(format!("bad grid `{s}`; expected ROWSxCOLS"));
    let (r, c) = s.split_once('x').ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

/// Where the network comes from: a TSV directory, the built-in example, or
/// the generator.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Directory holding road.tsv, social_edges.tsv, attributes.tsv, locations.tsv.
    #[arg(long, conflicts_with = "fixture")]
    pub data: Option<PathBuf>,
    /// Use the built-in 14-user example network.
    #[arg(long)]
    pub fixture: bool,
    #[command(flatten)]
    pub gen: GenSpec,
}

impl DataArgs {
    pub fn load(&self) -> Result<RoadSocialNetwork> {
        if let Some(dir) = &self.data {
            load_road_social(dir)
        } else if self.fixture {
            Ok(build_running_example_fixture().0)
        } else {
            generate_road_social(&self.gen.params()?)
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub gen: GenSpec,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    GsNc,
    GsT,
    LsNc,
    LsT,
}

impl ModeArg {
    pub fn name(self) -> &'static str {
        match self {
            ModeArg::GsNc => "gs-nc",
            ModeArg::GsT => "gs-t",
            ModeArg::LsNc => "ls-nc",
            ModeArg::LsT => "ls-t",
        }
    }

    pub fn is_local(self) -> bool {
        matches!(self, ModeArg::LsNc | ModeArg::LsT)
    }

    pub fn is_topj(self) -> bool {
        matches!(self, ModeArg::GsT | ModeArg::LsT)
    }

    pub const ALL: [ModeArg; 4] = [ModeArg::GsNc, ModeArg::GsT, ModeArg::LsNc, ModeArg::LsT];
}

/// `(Q, k, t)`.
#[derive(Debug, Clone, Args)]
pub struct CoreArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub t: f64,
    /// Comma-separated query user names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<String>,
}

/// Local search tuning.
#[derive(Debug, Clone, Args)]
pub struct LsArgs {
    #[arg(long, default_value = "layer-density")]
    pub strategy: String,
    #[arg(long, default_value_t = DEFAULT_ZETA)]
    pub zeta: f64,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Maximum number of candidates local search verifies.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
}

impl LsArgs {
    pub fn params(&self) -> Result<LsParams> {
        if self.budget == 0 {
            return Err(Error::Query("--budget must be positive".into()));
        }
        Ok(LsParams { strategy: Strategy::from_name(&self.strategy, self.lambda, self.zeta)?, budget: self.budget })
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub core: CoreArgs,
    /// Preference region `lo1,hi1xlo2,hi2...` over the first d-1 weights.
    #[arg(long)]
    pub region: String,
    #[arg(long, value_enum, default_value_t = ModeArg::GsNc)]
    pub mode: ModeArg,
    /// Number of ranked MACs per cell (top-j modes only).
    #[arg(long)]
    pub j: Option<usize>,
    #[command(flatten)]
    pub ls: LsArgs,
    /// Reuse a persisted core and dominance graph.
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the dominance graph as DOT to this file.
    #[arg(long)]
    pub dump_dag: Option<PathBuf>,
    /// Include wall-clock timings in the header (output is then not reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct IndexBuildArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub core: CoreArgs,
    #[arg(long)]
    pub region: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IndexLoadArgs {
    /// Index file to read.
    pub path: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub core: CoreArgs,
    /// Weight vector `w1,...,w_{d-1}`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub at_weight: Vec<f64>,
    /// If given, the weight must lie in this region.
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub gen: GenSpec,
    /// Values of k to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![3usize, 4])]
    pub ks: Vec<usize>,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    /// Query users per query.
    #[arg(long, default_value_t = 4)]
    pub q_size: usize,
    /// Side of the preference region as a fraction of the axis.
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10)]
    pub queries: usize,
    #[arg(long, default_value_t = 3)]
    pub j: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = ModeArg::ALL.to_vec())]
    pub modes: Vec<ModeArg>,
    #[command(flatten)]
    pub ls: LsArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen(a) => {
            let rsn = generate_road_social(&a.gen.params()?)?;
            save_road_social(&rsn, &a.out)?;
            Ok(EXIT_OK)
        }
        Command::Index(IndexCommand::Build(a)) => index_build(&a),
        Command::Index(IndexCommand::Load(a)) => {
            let idx = index::read_index(&a.path)?;
            emit(None, &serde_json::to_string(&idx.summary()).expect("summary serializes"))?;
            Ok(EXIT_OK)
        }
        Command::Query(a) => run_query(&a),
        Command::Oracle(a) => run_oracle(&a),
        Command::Bench(a) => {
            let csv = bench::run_bench(&a)?;
            emit(a.out.as_deref(), csv.trim_end())?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Error::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                // A reader that stops early (e.g. `head`) is not an error.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|e| Error::io("<stdout>", e)),
            }
        }
    }
}

fn resolve(rsn: &RoadSocialNetwork, names: &[String]) -> Result<Vec<VertexId>> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    rsn.resolve(&refs)
}

/// The `Mode` a mode flag and `--j` describe, or a usage error.
pub fn query_mode(mode: ModeArg, j: Option<usize>) -> Result<Mode> {
    match (mode.is_topj(), j) {
        (false, None) => Ok(Mode::Nc),
        (false, Some(_)) => Err(Error::Query(format!("--j is only valid with gs-t or ls-t, not {}", mode.name()))),
        (true, None) => Err(Error::Query(format!("{} needs --j", mode.name()))),
        (true, Some(0)) => Err(Error::Query("--j must be at least 1".into())),
        (true, Some(j)) => Ok(Mode::TopJ(j)),
    }
}

fn index_build(a: &IndexBuildArgs) -> Result<u8> {
    let rsn = a.data.load()?;
    let q = resolve(&rsn, &a.core.q)?;
    let region = Region::parse(&a.region)?;
    match Prepared::new(&rsn, &q, a.core.k, a.core.t, &region)? {
        Ok(p) => {
            index::write_index(&a.out, &index::IndexFile::from_prepared(&p)?)?;
            Ok(EXIT_OK)
        }
        Err(reason) => {
            eprintln!("no (k,t)-core: {reason}");
            Ok(EXIT_NO_CORE)
        }
    }
}

/// Core and dominance graph for a query, from the index when one is given.
fn prepare(a: &QueryArgs, rsn: &RoadSocialNetwork, q: &[VertexId], region: &Region) -> Result<std::result::Result<Prepared, NoCoreReason>> {
    let Some(path) = &a.index else {
        return Prepared::new(rsn, q, a.core.k, a.core.t, region);
    };
    let idx = index::read_index(path)?;
    idx.check_matches(q, a.core.k, a.core.t, region)?;
    idx.into_prepared(rsn).map(Ok)
}

pub fn run_query(a: &QueryArgs) -> Result<u8> {
    let mode = query_mode(a.mode, a.j)?;
    let params = a.ls.params()?;
    let rsn = a.data.load()?;
    let q = resolve(&rsn, &a.core.q)?;
    let region = Region::parse(&a.region)?;
    let start = Instant::now();
    let prepared = prepare(a, &rsn, &q, &region)?;
    let prep_time = start.elapsed();
    let (result, search_time) = match &prepared {
        Ok(p) => {
            if let Some(path) = &a.dump_dag {
                let dot = p.gd.to_dot(|v| rsn.social.name(p.global(v)).to_string());
                fs::write(path, dot).map_err(|e| Error::io(path, e))?;
            }
            let t0 = Instant::now();
            let r = if a.mode.is_local() { ls_search_prepared(p, mode, &params)? } else { gs_search_prepared(p, mode)? };
            (r, t0.elapsed())
        }
        Err(reason) => (ResultSet::empty(mode, format!("no (k,t)-core: {reason}")), Default::default()),
    };
    let timings = a.timings.then(|| output::Timings {
        prepare_ms: prep_time.as_secs_f64() * 1e3,
        search_ms: search_time.as_secs_f64() * 1e3,
    });
    let header = output::Header {
        kind: "header".into(),
        mode: a.mode.name().into(),
        j: a.j,
        k: a.core.k,
        t: a.core.t,
        q: a.core.q.clone(),
        region: region.bounds().iter().map(|&(lo, hi)| [lo, hi]).collect(),
        strategy: a.mode.is_local().then(|| output::StrategyEcho {
            name: params.strategy.name().into(),
            zeta: a.ls.zeta,
            lambda: a.ls.lambda,
            budget: params.budget,
        }),
        seed: a.data.data.is_none().then_some(a.data.gen.seed).filter(|_| !a.data.fixture),
        core_size: result.core_size,
        cells: result.entries.len(),
        diagnostic: result.diagnostic.clone(),
        timings,
    };
    let members = prepared.as_ref().map(|p| p.core.members().to_vec()).unwrap_or_default();
    let doc = output::render(&rsn, &header, &result, &members)?;
    emit(a.out.as_deref(), doc.trim_end())?;
    Ok(if prepared.is_ok() { EXIT_OK } else { EXIT_NO_CORE })
}

pub fn run_oracle(a: &OracleArgs) -> Result<u8> {
    let rsn = a.data.load()?;
    let q = resolve(&rsn, &a.core.q)?;
    if a.at_weight.len() + 1 != rsn.social.dim() {
        return Err(Error::Query(format!(
            "--at-weight needs {} values for d = {}",
            rsn.social.dim().saturating_sub(1),
            rsn.social.dim()
        )));
    }
    if let Some(r) = &a.region {
        let region = Region::parse(r)?;
        if !region.contains(&a.at_weight, 0.0) {
            return Err(Error::Query("--at-weight lies outside --region".into()));
        }
    }
    let ranking = oracle_chain_at(&rsn, &q, a.core.k, a.core.t, &a.at_weight)?;
    let depth = a.j.unwrap_or(1).max(1);
    let doc = output::oracle_document(&rsn, &a.at_weight, &ranking, depth);
    emit(a.out.as_deref(), &doc)?;
    Ok(if ranking.chain.is_empty() { EXIT_NO_CORE } else { EXIT_OK })
}

/// Parses `args` (including the program name) and runs them, mapping
/// errors to exit status 1 with a message on stderr.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
