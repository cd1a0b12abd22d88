use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use nearperm::amalgam::build_amalgam_model;
use nearperm::carrier::Point;
use nearperm::catalog::{self, Params};
use nearperm::json::{self as nj, SCHEMA};
use nearperm::nearaction::{rigidity_conjugator, NearAction};
use nearperm::qcyclic::{DigitStream, QcConstruction};
use nearperm::z2class;
use nearperm::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "nearperm", version, about = "Near permutations and near actions on finitely presented carriers")]
struct Cli {
    /// Input file (stdin when absent)
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized steps
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in examples
    Catalog {
        #[command(subcommand)]
        action: CatalogCommand,
    },
    /// Index character, index number, and optionally a commensuration test
    Invariants {
        /// Subset file to test for commensuration
        #[arg(long)]
        subset: Option<PathBuf>,
    },
    /// Check that every relator holds up to finitely many points
    Verify,
    /// Near Schreier graph on a coordinate window
    Schreier {
        #[arg(long, default_value_t = 3)]
        radius: i64,
        /// Keep only the component of this point, written `cell:x,y`
        #[arg(long)]
        basepoint: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Winding numbers and holonomies of a near free near Z^2 action
    #[command(name = "classify-z2")]
    ClassifyZ2 {
        /// Emit the corner graph as DOT instead
        #[arg(long)]
        dot: bool,
        /// Word length up to which near freeness is checked
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// The mod p invariant of the standard model of C_pn *_C_p C_p^2
    Amalgam {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long = "L", default_value_t = 6)]
        l: usize,
        /// Random admissible enlargements to evaluate
        #[arg(long, default_value_t = 5)]
        enlargements: usize,
    },
    /// Residue tables of quasi-cyclic constructions
    Qcyclic(QcArgs),
    /// Finitely supported conjugator to the simply transitive Z^2 action
    Rigidity {
        /// Reference action (the simply transitive plane when absent)
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Ball growth and the growth inequality
    Growth {
        /// Base point, written `cell:x,y`
        #[arg(long)]
        basepoint: String,
        #[arg(long, default_value_t = 12)]
        rmax: u64,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    List,
    Build {
        name: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        s: Option<Vec<i64>>,
        #[arg(long, allow_negative_numbers = true)]
        l: Option<i64>,
    },
}

#[derive(Args)]
struct QcArgs {
    #[arg(long)]
    m: u64,
    /// Nondecreasing block exponents
    #[arg(long, num_args = 0.., conflicts_with = "digits")]
    q: Option<Vec<u32>>,
    /// Representatives s_1, s_2, ... of an m-adic integer
    #[arg(long, num_args = 1..)]
    digits: Option<Vec<u128>>,
    /// Number of levels
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

enum Outcome {
    Ok(String),
    /// Output written, but the check it reports failed.
    Failed(String),
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Error> {
    let mut s = String::new();
    match path {
        Some(p) => s = fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?,
        None => {
            io::stdin().read_to_string(&mut s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
    }
    Ok(s)
}

fn read_action(path: &Option<PathBuf>) -> Result<NearAction, Error> {
    nj::read_action(&read_input(path)?)
}

fn parse_point(a: &NearAction, s: &str) -> Result<Point, Error> {
    let (cell, coords) =
        s.split_once(':').ok_or_else(|| Error::InvalidInput(format!("point `{s}` is not of the form cell:x,y")))?;
    let coords = coords
        .split(',')
        .filter(|c| !c.is_empty())
        .map(|c| c.trim().parse::<i64>().map_err(|e| Error::InvalidInput(format!("coordinate `{c}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    a.carrier().point(cell, &coords)
}

fn line(v: Value) -> String {
    format!("{v}\n")
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Catalog { action: CatalogCommand::List } => {
            let mut out = String::new();
            for e in catalog::list() {
                out.push_str(&format!("{:<18} {:<16} {}\n", e.name, e.params, e.doc));
            }
            Ok(Outcome::Ok(out))
        }
        Command::Catalog { action: CatalogCommand::Build { name, d, k, m, s, l } } => {
            let params = Params { d: *d, k: *k, m: *m, s: s.as_ref().map(|s| (s[0], s[1])), l: *l };
            let a = catalog::build(name, &params)?;
            Ok(Outcome::Ok(nj::write_action(&a) + "\n"))
        }
        Command::Invariants { subset } => {
            let a = read_action(&cli.input)?;
            let mut v = json!({
                "schema": SCHEMA,
                "index_character": a.index_character()?,
                "index_number": a.index_number()?,
            });
            if let Some(path) = subset {
                let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                let y = nj::read_subset(a.carrier(), &text)?;
                v["commensurated"] = serde_json::to_value(a.commensurated_test(&y)?)?;
            }
            Ok(Outcome::Ok(line(v)))
        }
        Command::Verify => {
            let a = read_action(&cli.input)?;
            let report = a.verify()?;
            let text = line(json!({ "schema": SCHEMA, "report": report }));
            Ok(if report.ok { Outcome::Ok(text) } else { Outcome::Failed(text) })
        }
        Command::Schreier { radius, basepoint, format } => {
            let a = read_action(&cli.input)?;
            let mut g = a.schreier_truncation(*radius);
            if let Some(b) = basepoint {
                let p = parse_point(&a, b)?;
                let i = g
                    .vertices
                    .iter()
                    .position(|v| *v == p)
                    .ok_or_else(|| Error::InvalidInput(format!("{b} lies outside the window")))?;
                let keep = g.components().into_iter().find(|c| c.contains(&i)).expect("every vertex has a component");
                let renumber = |v: usize| keep.iter().position(|&k| k == v);
                g.vertices = keep.iter().map(|&k| g.vertices[k].clone()).collect();
                g.edges = g
                    .edges
                    .iter()
                    .filter_map(|&(gen, x, y)| Some((gen, renumber(x)?, renumber(y)?)))
                    .collect();
                g.boundary = g.boundary.iter().filter_map(|&v| renumber(v)).collect();
            }
            Ok(Outcome::Ok(match format {
                Format::Dot => g.to_dot(&a),
                Format::Json => line(g.to_json(&a)),
            }))
        }
        Command::ClassifyZ2 { dot, depth } => {
            let a = read_action(&cli.input)?;
            z2class::check_near_free(&a, *depth)?;
            if *dot {
                let dec = z2class::corner_decomposition(&a)?;
                return Ok(Outcome::Ok(z2class::corner_graph(&a, &dec)?.to_dot(&a)));
            }
            Ok(Outcome::Ok(serde_json::to_string(&z2class::classify(&a)?)? + "\n"))
        }
        Command::Amalgam { p, n, l, enlargements } => {
            let model = build_amalgam_model(*p, *n, *l)?;
            let invariant = model.data.invariant(&model.designated)?;
            let mut orbits: Vec<Vec<usize>> = model
                .data
                .interior_u_orbits()
                .into_iter()
                .filter(|o| o.iter().all(|x| !model.designated.contains(x)))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut samples = Vec::new();
            for _ in 0..*enlargements {
                orbits.shuffle(&mut rng);
                let k = if orbits.is_empty() { 0 } else { rng.gen_range(0..=orbits.len()) };
                let mut y = model.designated.clone();
                y.extend(orbits[..k].iter().flatten());
                samples.push(json!({ "size": y.len(), "invariant": model.data.invariant(&y)? }));
            }
            Ok(Outcome::Ok(line(json!({
                "schema": SCHEMA,
                "p": p,
                "n": n,
                "L": l,
                "window": model.data.len(),
                "boundary": model.data.boundary().len(),
                "f_size": model.data.f_set().len(),
                "invariant": invariant,
                "enlargements": samples,
                "evidence": model.evidence,
                "stable_from": model.stable_from,
            }))))
        }
        Command::Qcyclic(args) => {
            let (construction, digits) = match (&args.q, &args.digits) {
                (_, Some(d)) => {
                    let stream = DigitStream::new(args.m, d)?;
                    let n = args.n.unwrap_or(stream.len());
                    let blocks = stream.digits_to_blocks(n)?;
                    (stream.to_construction(n)?, Some((blocks, n)))
                }
                (q, None) => (QcConstruction::new(args.m, q.clone().unwrap_or_default())?, None),
            };
            let n = args.n.or(digits.as_ref().map(|d| d.1)).unwrap_or(6);
            let table = construction.table(n)?;
            let mut v = json!({ "schema": SCHEMA, "exponents": construction.exponents(), "table": table });
            if let Some((blocks, _)) = digits {
                v["blocks"] = json!(blocks);
            }
            Ok(Outcome::Ok(line(v)))
        }
        Command::Rigidity { reference } => {
            let beta = read_action(&cli.input)?;
            let alpha = match reference {
                Some(p) => read_action(&Some(p.clone()))?,
                None => catalog::build_simply_transitive(2)?,
            };
            let sigma = rigidity_conjugator(&alpha, &beta)?;
            Ok(Outcome::Ok(nj::write_nearmap(&sigma) + "\n"))
        }
        Command::Growth { basepoint, rmax } => {
            let a = read_action(&cli.input)?;
            let p = parse_point(&a, basepoint)?;
            let samples: Vec<u64> = (1..=*rmax).collect();
            let report = a.growth_inequality_check(&p, &samples)?;
            let balls = a.ball_growth(&p, *rmax as usize)?;
            Ok(Outcome::Ok(line(json!({ "schema": SCHEMA, "balls": balls, "report": report }))))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Error::InvalidInput(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("NEARPERM_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().ok();
    }
    let result = run(&cli).and_then(|o| match o {
        Outcome::Ok(text) => emit(&cli, &text).map(|_| ExitCode::SUCCESS),
        Outcome::Failed(text) => emit(&cli, &text).map(|_| ExitCode::from(1)),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let v = json!({ "schema": SCHEMA, "error": { "code": e.code(), "message": e.to_string() } });
            eprintln!("{v}");
            match e.kind() {
                ErrorKind::Validation => ExitCode::from(1),
                ErrorKind::Obstruction => ExitCode::from(2),
            }
        }
    }
}
