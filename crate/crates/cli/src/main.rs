use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fliplab::export;
use fliplab::polygon::PolyModel;
use fliplab::surface::ExceptionalityPredicate;
use fliplab::{Error, ExploreOptions, SurfaceSpec, Tracked, Triangulation};
use serde::Serialize;
use serde_json::json;

mod verify;

const EXIT_VIOLATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_BAD_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "fliplab", version, about = "Explore and verify flip graphs of marked surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complexity, Euler characteristic and exceptionality of a surface.
    Info(InfoArgs),
    /// Enumerate a flip graph or a ball in it.
    Enumerate(EnumerateArgs),
    /// Run verification suites; exit 0 iff all pass.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct SurfaceArgs {
    /// Surface by name: disk6, punctured4, annulus3_2, torus1, sphere5.
    #[arg(long, conflicts_with_all = ["genus", "boundary", "punctures"])]
    surface: Option<String>,
    #[arg(long)]
    genus: Option<u32>,
    /// Marked points on each boundary component, comma separated.
    #[arg(long, value_delimiter = ',')]
    boundary: Vec<u32>,
    #[arg(long)]
    punctures: Option<u32>,
}

impl SurfaceArgs {
    fn spec(&self) -> fliplab::Result<SurfaceSpec> {
        match &self.surface {
            Some(name) => SurfaceSpec::from_name(name),
            None => SurfaceSpec::new(self.genus.unwrap_or(0), self.boundary.clone(), self.punctures.unwrap_or(0)),
        }
    }
}

#[derive(Args)]
struct InfoArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    #[arg(long, value_parser = parse_predicate, default_value = "closed-form")]
    predicate: ExceptionalityPredicate,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Model {
    Generic,
    Polygon,
    Punctured,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Explore a ball of this radius instead of the whole graph.
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long, default_value_t = 200_000)]
    max_vertices: usize,
    #[arg(long, value_enum, default_value = "generic")]
    model: Model,
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for the graph file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Cross-check every flip's coordinate update.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run; all when omitted.
    #[arg(long = "suite", value_enum)]
    suites: Vec<verify::Suite>,
    /// Domain surface name for the rigidity suite.
    #[arg(long, requires = "codomain")]
    domain: Option<String>,
    /// Codomain surface name for the rigidity suite.
    #[arg(long, requires = "domain")]
    codomain: Option<String>,
    #[arg(long, value_parser = parse_predicate, default_value = "closed-form")]
    predicate: ExceptionalityPredicate,
    #[arg(long, default_value_t = 100_000)]
    max_vertices: usize,
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for randomized checks; FLIPLAB_SEED overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run with a deliberately corrupted flip rule.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn parse_predicate(s: &str) -> Result<ExceptionalityPredicate, String> {
    s.parse::<ExceptionalityPredicate>().map_err(|e| e.to_string())
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded(_) => EXIT_BUDGET,
        Error::InvalidSurface(_) | Error::InvalidTriangulation(_) => EXIT_BAD_INPUT,
        _ => EXIT_VIOLATION,
    }
}

fn fail(e: &Error) -> ExitCode {
    let code = exit_for(e);
    emit(&json!({ "error": e.to_string(), "exit": code }).to_string());
    ExitCode::from(code)
}

/// Writes a report line; a closed stdout is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn set_threads(n: Option<usize>) {
    if let Some(n) = n {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn write_out(dir: &PathBuf, name: &str, body: &str) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), body)
}

fn info(args: &InfoArgs) -> ExitCode {
    let spec = match args.surface.spec() {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let formula = spec.triangle_count();
    let built = Triangulation::standard(&spec).ok().map(|t| t.triangles().len() as u64);
    let report = json!({
        "surface": spec,
        "d": spec.complexity(),
        "euler_characteristic": spec.euler_characteristic(),
        "predicate": args.predicate.name(),
        "exceptional": args.predicate.is_exceptional(&spec),
        "exceptional_by_predicate": {
            "closed-form": ExceptionalityPredicate::ClosedForm.is_exceptional(&spec),
            "whitelist": ExceptionalityPredicate::Whitelist.is_exceptional(&spec),
        },
        "triangle_count": formula,
        "triangle_count_check": built.map(|b| Some(b) == formula),
    });
    emit(&serde_json::to_string_pretty(&report).unwrap());
    ExitCode::SUCCESS
}

fn enumerate(args: &EnumerateArgs) -> ExitCode {
    set_threads(args.threads);
    let spec = match args.surface.spec() {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if args.max_vertices == 0 {
        return fail(&Error::InvalidSurface("--max-vertices must be positive".into()));
    }
    if args.model != Model::Generic {
        let model = match PolyModel::for_surface(&spec) {
            Some(m) if (args.model == Model::Polygon) == matches!(m, PolyModel::Disk(_)) => m,
            _ => return fail(&Error::InvalidSurface(format!("no such model for {spec}"))),
        };
        return match model.enumerate(args.max_vertices) {
            Ok(g) => {
                let mut hist = std::collections::BTreeMap::new();
                for d in g.degrees() {
                    *hist.entry(d).or_insert(0usize) += 1;
                }
                let report = json!({
                    "surface": spec,
                    "model": format!("{model:?}"),
                    "vertices": g.vertices.len(),
                    "edges": g.edges.len(),
                    "degree_histogram": hist.into_iter().collect::<Vec<_>>(),
                    "connected": g.is_connected(),
                });
                emit(&serde_json::to_string_pretty(&report).unwrap());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        };
    }
    let root = match Triangulation::standard(&spec) {
        Ok(t) => Tracked::new(t).strict(args.strict),
        Err(e) => return fail(&e),
    };
    let opts = ExploreOptions {
        radius: args.radius,
        max_vertices: args.max_vertices,
        strict: args.strict,
    };
    let g = match fliplab::explore(root, opts) {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    let stats = g.stats();
    if let Some(dir) = &args.out {
        let (name, body) = match args.format {
            Format::Json => ("graph.json", export::to_json(&g)),
            Format::Dot => ("graph.dot", export::to_dot(&g)),
        };
        if let Err(e) = write_out(dir, name, &body) {
            eprintln!("cannot write {}: {e}", dir.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    }
    let report = json!({
        "surface": spec,
        "complexity": g.complexity(),
        "radius": g.radius(),
        "stats": stats,
    });
    emit(&serde_json::to_string_pretty(&report).unwrap());
    ExitCode::SUCCESS
}

fn run_verify(args: &VerifyArgs) -> ExitCode {
    set_threads(args.threads);
    let seed = std::env::var("FLIPLAB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(args.seed);
    let pair = match (&args.domain, &args.codomain) {
        (Some(a), Some(b)) => match (SurfaceSpec::from_name(a), SurfaceSpec::from_name(b)) {
            (Ok(a), Ok(b)) => Some((a, b)),
            (Err(e), _) | (_, Err(e)) => return fail(&e),
        },
        _ => None,
    };
    if args.inject_fault {
        fliplab::triangulation::fault::corrupt_flip_rule(true);
    }
    let cfg = verify::Config {
        suites: args.suites.clone(),
        pair,
        predicate: args.predicate,
        max_vertices: args.max_vertices,
        seed,
        fault: args.inject_fault,
    };
    let report = verify::run(&cfg);
    let text = serde_json::to_string_pretty(&report).unwrap();
    if let Some(dir) = &args.out {
        if let Err(e) = write_out(dir, "report.json", &text) {
            eprintln!("cannot write {}: {e}", dir.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    }
    emit(&text);
    ExitCode::from(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_BAD_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match &cli.command {
        Command::Info(a) => info(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Verify(a) => run_verify(a),
    }
}
