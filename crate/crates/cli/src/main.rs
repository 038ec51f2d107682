//! `coxlab`: corpus generation, thin-part measurements and verification
//! suites for hyperbolic Coxeter polygons.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use coxlab::io::{
    parse_ball_json, parse_polygon_json, parse_r_list, BallFile, FamilySpec, LoadedPolygon,
    PolygonFile,
};
use coxlab::polygon::AngleOrder;
use coxlab::refgroup::{ball_size_table, side_reflections, BallConfig, GroupBall};
use coxlab::surgery::{remove_small_edges, surgery_thin_comparison, SurgeryConstants};
use coxlab::thinpart::{theorem1_constant, thin_ratios, SamplerConfig};
use coxlab::triangulation::{balanced_triangulate, tree_stats, triangulation_json, Direction};
use coxlab::verify::{run_suite, Suite, VerifyConfig};

use output::Plot;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "coxlab",
    version,
    about = "Hyperbolic Coxeter polygon workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every stochastic step.
    #[arg(long, global = true, env = "COXLAB_SEED")]
    seed: Option<u64>,
    /// Monte Carlo samples per polygon (at least 1000).
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,
    /// Thin-part radii, comma separated.
    #[arg(long = "R", global = true, value_name = "LIST")]
    r: Option<String>,
    /// Output file; stdout when omitted. For `gen`, a directory is allowed.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Short-edge threshold for surgery.
    #[arg(long, global = true, default_value_t = 0.1)]
    eta: f64,
    /// Removal fraction for surgery, in (0, 1/2).
    #[arg(long, global = true, default_value_t = 0.1)]
    alpha: f64,
    /// Word length of group balls.
    #[arg(long = "ball-length", global = true, value_name = "L")]
    ball_length: Option<usize>,
    /// Points in the sampler's angular inverse-CDF table.
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,
    /// Relative matrix distance under which group elements are merged.
    #[arg(long, global = true, default_value_t = 1e-8)]
    dedup: f64,
    /// Also write a gnuplot script next to the CSV given by --out.
    #[arg(long, global = true)]
    gnuplot: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a polygon from a family: `triangle p q r`, `regular n m` or `ideal n`.
    Gen {
        #[arg(required = true, num_args = 1..)]
        family: Vec<String>,
    },
    /// Thin-part ratios of a polygon (a family spec or a JSON file) for each R.
    Thin {
        #[arg(required = true, num_args = 1..)]
        source: Vec<String>,
    },
    /// Run a verification suite: kernel, thm1, tree, lemma6, surgery or all.
    Verify { suite: String },
    /// Remove short edges from a compact Coxeter polygon.
    Surgery {
        #[arg(required = true, num_args = 1..)]
        source: Vec<String>,
    },
    /// Balanced triangulation statistics for `n`, or a range `a..b`.
    Tree {
        sizes: String,
        #[arg(long, value_enum, default_value_t = Walk::Clockwise)]
        direction: Walk,
        /// Print the dual tree in DOT format (single n only).
        #[arg(long)]
        dot: bool,
    },
    /// Group ball of the reflection group: JSON elements or a size table.
    Ball {
        #[arg(required = true, num_args = 1..)]
        source: Vec<String>,
        /// Check a ball JSON file against this polygon instead.
        #[arg(long, value_name = "FILE")]
        check: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Walk {
    Clockwise,
    Counterclockwise,
}

impl From<Walk> for Direction {
    fn from(w: Walk) -> Self {
        match w {
            Walk::Clockwise => Direction::Clockwise,
            Walk::Counterclockwise => Direction::Counterclockwise,
        }
    }
}

/// Fully resolved settings; embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub source: Option<String>,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    pub samples: usize,
    pub seed: Option<u64>,
    pub format: Format,
    pub threads: Option<usize>,
    pub eta: f64,
    pub alpha: f64,
    pub ball_length: Option<usize>,
    pub grid: usize,
    pub dedup: f64,
}

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Invalid(String),
    /// Exit code 3.
    Runtime(String),
    /// Exit code 1.
    Failed(String),
}

impl From<coxlab::Error> for CliError {
    fn from(e: coxlab::Error) -> Self {
        use coxlab::Error as E;
        match e {
            E::Domain(_)
            | E::Degenerate(_)
            | E::Outside
            | E::InvalidPolygon(_)
            | E::Parse(_)
            | E::Precondition(_)
            | E::NotInBall => CliError::Invalid(e.to_string()),
            E::SizeLimit { .. } | E::Counterexample(_) | E::Sampler(_) | E::Json(_) | E::Io(_) => {
                CliError::Runtime(e.to_string())
            }
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Failed(m) => eprintln!("verification failed: {m}"),
                CliError::Invalid(m) => eprintln!("invalid input: {m}"),
                CliError::Runtime(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    if cli.samples < MIN_SAMPLES {
        return Err(CliError::Invalid(format!(
            "--samples {} is below the minimum of {MIN_SAMPLES}",
            cli.samples
        )));
    }
    let constants = SurgeryConstants::new(cli.eta, cli.alpha)?;
    let r = match &cli.r {
        Some(s) => parse_r_list(s)?,
        None => vec![2.0],
    };
    let (name, source, default_format) = match &cli.command {
        Command::Gen { family } => ("gen", Some(family.join(" ")), Format::Json),
        Command::Thin { source } => ("thin", Some(source.join(" ")), Format::Csv),
        Command::Verify { suite } => ("verify", Some(suite.clone()), Format::Json),
        Command::Surgery { source } => ("surgery", Some(source.join(" ")), Format::Json),
        Command::Tree { sizes, .. } => ("tree", Some(sizes.clone()), Format::Csv),
        Command::Ball { source, .. } => ("ball", Some(source.join(" ")), Format::Json),
    };
    let cfg = RunConfig {
        command: name.into(),
        source,
        r,
        samples: cli.samples,
        seed: cli.seed,
        format: cli.format.unwrap_or(default_format),
        threads: cli.threads,
        eta: constants.eta,
        alpha: constants.alpha,
        ball_length: cli.ball_length,
        grid: cli.grid,
        dedup: cli.dedup,
    };
    SamplerConfig {
        grid: cfg.grid,
        seed: 0,
    }
    .validate()?;
    if !(cfg.dedup > 0.0 && cfg.dedup < 1e-2) {
        return Err(CliError::Invalid(format!(
            "--dedup {} must lie in (0, 1e-2)",
            cfg.dedup
        )));
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gen { family } => cmd_gen(&cfg, family, out),
        Command::Thin { source } => cmd_thin(&cfg, source, out, cli.gnuplot),
        Command::Verify { suite } => cmd_verify(&cfg, suite, out),
        Command::Surgery { source } => cmd_surgery(&cfg, source, out, constants),
        Command::Tree {
            sizes,
            direction,
            dot,
        } => cmd_tree(&cfg, sizes, (*direction).into(), *dot, out, cli.gnuplot),
        Command::Ball { source, check } => {
            cmd_ball(&cfg, source, check.as_deref(), out, cli.gnuplot)
        }
    }
}

fn require_seed(cfg: &RunConfig) -> Result<u64, CliError> {
    cfg.seed.ok_or_else(|| {
        CliError::Invalid(format!(
            "`{}` is stochastic and needs --seed (or COXLAB_SEED)",
            cfg.command
        ))
    })
}

fn sampler(cfg: &RunConfig, seed: u64) -> SamplerConfig {
    SamplerConfig {
        grid: cfg.grid,
        seed,
    }
}

/// A polygon from a JSON file (one argument naming an existing file or
/// ending in `.json`) or from a family spec. Returns an identifier too.
fn load_source(tokens: &[String]) -> Result<(String, LoadedPolygon), CliError> {
    if let [single] = tokens {
        let path = Path::new(single);
        if path.extension().is_some_and(|e| e == "json") || path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            let p = parse_polygon_json(&text)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            let id = path
                .file_stem()
                .map_or_else(|| single.clone(), |s| s.to_string_lossy().into_owned());
            return Ok((id, p));
        }
    }
    let spec = FamilySpec::from_tokens(tokens).or_else(|_| tokens.join(" ").parse())?;
    Ok((spec.id(), LoadedPolygon::Coxeter(spec.build()?)))
}

fn meta(cfg: &RunConfig) -> Result<serde_json::Value, CliError> {
    Ok(serde_json::json!({
        "tool": "coxlab",
        "version": VERSION,
        "config": output::to_value(cfg)?,
    }))
}

fn cmd_gen(cfg: &RunConfig, family: &[String], out: Option<&Path>) -> Result<(), CliError> {
    if cfg.format != Format::Json {
        return Err(CliError::Invalid("gen writes JSON only".into()));
    }
    let spec = FamilySpec::from_tokens(family).or_else(|_| family.join(" ").parse())?;
    let p = spec.build()?;
    let text = coxlab::io::to_json_string(&PolygonFile::from_coxeter(&p).with_meta(meta(cfg)?))?;
    let target = out.map(|o| {
        let trailing_slash = o
            .as_os_str()
            .to_string_lossy()
            .ends_with(std::path::MAIN_SEPARATOR);
        if o.is_dir() || trailing_slash {
            o.join(format!("{}.json", spec.id()))
        } else {
            o.to_path_buf()
        }
    });
    output::emit(target.as_deref(), &text)
}

#[derive(Serialize)]
struct ThinOut {
    polygon_id: String,
    n_vertices: usize,
    #[serde(rename = "R")]
    r: f64,
    ratio: f64,
    stderr: f64,
    n_samples: usize,
    seed: u64,
    theorem1_constant: f64,
}

fn cmd_thin(
    cfg: &RunConfig,
    source: &[String],
    out: Option<&Path>,
    plot: bool,
) -> Result<(), CliError> {
    let seed = require_seed(cfg)?;
    let (id, p) = load_source(source)?;
    let p = p.polygon();
    let rows: Vec<ThinOut> = thin_ratios(p, &cfg.r, cfg.samples, &sampler(cfg, seed))?
        .into_iter()
        .map(|e| ThinOut {
            polygon_id: id.clone(),
            n_vertices: p.len(),
            r: e.r,
            ratio: e.ratio,
            stderr: e.stderr,
            n_samples: e.n_samples,
            seed: e.seed,
            theorem1_constant: theorem1_constant(),
        })
        .collect();
    output::emit(out, &output::table(cfg, "rows", &rows)?)?;
    plot_if(plot, cfg, out, Plot::Thin)
}

fn plot_if(plot: bool, cfg: &RunConfig, out: Option<&Path>, kind: Plot) -> Result<(), CliError> {
    if !plot {
        return Ok(());
    }
    match (out, cfg.format) {
        (Some(path), Format::Csv) => {
            let script = output::gnuplot(path, kind)?;
            eprintln!("wrote {}", script.display());
            Ok(())
        }
        _ => Err(CliError::Invalid(
            "--gnuplot needs --out with CSV output".into(),
        )),
    }
}

fn cmd_verify(cfg: &RunConfig, suite: &str, out: Option<&Path>) -> Result<(), CliError> {
    let suite: Suite = suite.parse()?;
    let seed = require_seed(cfg)?;
    let vcfg = VerifyConfig {
        seed,
        samples: cfg.samples,
        ball_length: cfg.ball_length,
        surgery: SurgeryConstants::new(cfg.eta, cfg.alpha)?,
        grid: cfg.grid,
    };
    let report = run_suite(suite, &vcfg)?;
    eprint!("{}", report.render());
    let text = match cfg.format {
        Format::Json => output::envelope(cfg, "report", &report)?,
        Format::Csv => output::csv(cfg, &report.checks)?,
    };
    output::emit(out, &text)?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<String> = report
            .failures()
            .map(|c| format!("{}/{}", c.suite, c.name))
            .collect();
        Err(CliError::Failed(names.join(", ")))
    }
}

fn cmd_surgery(
    cfg: &RunConfig,
    source: &[String],
    out: Option<&Path>,
    c: SurgeryConstants,
) -> Result<(), CliError> {
    if cfg.format != Format::Json {
        return Err(CliError::Invalid("surgery writes JSON only".into()));
    }
    let seed = require_seed(cfg)?;
    let (id, p) = load_source(source)?;
    let p = p.coxeter().ok_or_else(|| {
        CliError::Invalid(format!(
            "{id}: surgery needs a Coxeter polygon (orders missing)"
        ))
    })?;
    let (q, mut report) = remove_small_edges(p, &c)?;
    let r = cfg.r[0];
    report.thin = Some(surgery_thin_comparison(
        p.polygon(),
        &q,
        r,
        cfg.samples,
        &c,
        &sampler(cfg, seed),
    )?);
    let doc = serde_json::json!({
        "polygon_id": id,
        "report": output::to_value(&report)?,
        "output": output::to_value(&PolygonFile::from_polygon(&q, None::<&[AngleOrder]>))?,
    });
    output::emit(out, &output::envelope(cfg, "surgery", &doc)?)?;
    let thin_ok = report.thin.as_ref().is_some_and(|t| t.passed());
    if report.min_edge_ok && report.convex && thin_ok {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "min edge ok: {}, convex: {}, thin comparison ok: {thin_ok}",
            report.min_edge_ok, report.convex
        )))
    }
}

/// `n`, `a..b` (exclusive) or `a..=b`.
fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Invalid(format!("expected n, a..b or a..=b, got {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let sizes: Vec<usize> = if let Some((a, b)) = s.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = s.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else {
        vec![num(s)?]
    };
    if sizes.is_empty() {
        return Err(bad());
    }
    if sizes.iter().any(|&n| n > coxlab::io::MAX_VERTICES) {
        return Err(CliError::Invalid(format!(
            "sizes above {} are not supported",
            coxlab::io::MAX_VERTICES
        )));
    }
    Ok(sizes)
}

fn cmd_tree(
    cfg: &RunConfig,
    sizes: &str,
    dir: Direction,
    dot: bool,
    out: Option<&Path>,
    plot: bool,
) -> Result<(), CliError> {
    let sizes = parse_sizes(sizes)?;
    if dot || (cfg.format == Format::Json && sizes.len() == 1) {
        let [n] = sizes[..] else {
            return Err(CliError::Invalid("--dot needs a single n".into()));
        };
        let (tri, tree) = balanced_triangulate(n, dir)?;
        let text = if dot {
            tree.to_dot()
        } else {
            let mut doc = triangulation_json(&tri, &tree);
            doc["radius"] = tree.radius_from_root().into();
            doc["min_leaf_depth"] = tree.min_leaf_depth().into();
            output::envelope(cfg, "triangulation", &doc)?
        };
        return output::emit(out, &text);
    }
    let rows = sizes
        .iter()
        .map(|&n| tree_stats(n, dir))
        .collect::<coxlab::Result<Vec<_>>>()?;
    output::emit(out, &output::table(cfg, "rows", &rows)?)?;
    plot_if(plot, cfg, out, Plot::Tree)
}

fn cmd_ball(
    cfg: &RunConfig,
    source: &[String],
    check: Option<&Path>,
    out: Option<&Path>,
    plot: bool,
) -> Result<(), CliError> {
    let (_, p) = load_source(source)?;
    let p = p.polygon();
    if let Some(path) = check {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let file = parse_ball_json(&text)?;
        return match file.verify_against(&side_reflections(p), 1e3 * cfg.dedup) {
            Ok(err) => {
                eprintln!(
                    "{} elements match, worst relative error {err:e}",
                    file.elements.len()
                );
                Ok(())
            }
            Err(coxlab::Error::Counterexample(m)) => Err(CliError::Failed(m)),
            Err(e) => Err(e.into()),
        };
    }
    let l = cfg.ball_length.unwrap_or(4);
    let bcfg = BallConfig {
        dedup: cfg.dedup,
        ..BallConfig::default()
    };
    let o = p.incenter();
    match cfg.format {
        Format::Json => {
            let ball = GroupBall::by_length(p, l, &o, &bcfg)?;
            let file = BallFile::from_ball(&ball);
            let file = BallFile {
                meta: Some(meta(cfg)?),
                ..file
            };
            output::emit(out, &coxlab::io::to_json_string(&file)?)
        }
        Format::Csv => {
            let rows = ball_size_table(p, &o, l, &bcfg)?;
            output::emit(out, &output::csv(cfg, &rows)?)?;
            plot_if(plot, cfg, out, Plot::Ball)
        }
    }
}
