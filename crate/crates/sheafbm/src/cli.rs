//! Argument parsing and command dispatch.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sheafbm_core::fixtures::DEFAULT_SEED;
use sheafbm_core::sheaf::ExtensionOrder;

use crate::formats::{kl_csv, load_graph, rank_csv, to_json, KlTableFile, SheafResult};
use crate::run::{
    alcove_window, bm_run, check_gkm, compare, graph_quotient, kl_table, parse_field, parse_type, prepare, read_file, CliError,
    Source, VerifyLevel, WindowSpec,
};
use crate::selftest::{matrix, selftest, SelftestConfig};

#[derive(Parser, Debug)]
#[command(name = "sheafbm", version, about = "Braden-MacPherson sheaves on moment graph quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment graph files.
    Graph {
        #[command(subcommand)]
        action: GraphCommand,
    },
    /// Alcove windows.
    Alcoves {
        #[command(subcommand)]
        action: AlcoveCommand,
    },
    /// Braden-MacPherson construction.
    Bm {
        #[command(subcommand)]
        action: BmCommand,
    },
    /// Kazhdan-Lusztig oracle.
    Kl {
        #[command(subcommand)]
        action: KlCommand,
    },
    /// Diffs a rank table against a KL table.
    Compare {
        #[arg(long)]
        bm: String,
        #[arg(long)]
        kl: String,
    },
    /// Runs the built-in invariant suites.
    Selftest {
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random fixtures per suite.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, hide = true)]
        inject_mutation: bool,
    },
}

#[derive(Subcommand, Debug)]
enum GraphCommand {
    /// Checks graph invariants and the GKM condition.
    Validate {
        #[arg(long)]
        graph_file: String,
        #[arg(long, default_value = "q")]
        field: String,
    },
    /// Quotient by the action generators.
    Quotient {
        #[arg(long)]
        graph_file: String,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum AlcoveCommand {
    /// Certified window above an alcove.
    Build {
        #[arg(long = "type")]
        kind: String,
        #[arg(long, default_value = "A0")]
        w: String,
        #[arg(long = "box", allow_hyphen_values = true)]
        bx: String,
        #[arg(long, default_value_t = 2)]
        margin: i64,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// `X-bruhat` or `affine-X`.
    #[arg(long = "type", conflicts_with = "graph_file", required_unless_present = "graph_file")]
    kind: Option<String>,
    #[arg(long)]
    graph_file: Option<String>,
    #[arg(long)]
    w: Option<String>,
    #[arg(long = "box", allow_hyphen_values = true)]
    bx: Option<String>,
    #[arg(long, default_value_t = 2)]
    margin: i64,
    /// `q` or `fp:P`.
    #[arg(long, default_value = "q")]
    field: String,
    #[arg(long, default_value_t = 12)]
    cutoff: i64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_enum)]
    verify: Option<Level>,
    /// Linear extension followed by the construction.
    #[arg(long, value_enum, default_value_t = Order::Lex)]
    order: Order,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand, Debug)]
enum BmCommand {
    /// Builds the sheaf and writes its rank table.
    Run(RunArgs),
    /// Builds and verifies; exits 2 on any failed check.
    Verify(RunArgs),
}

#[derive(Subcommand, Debug)]
enum KlCommand {
    /// All `(x, w, P_{x,w})`, or one column.
    Table {
        #[arg(long = "type")]
        kind: String,
        #[arg(long)]
        w: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Level {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Lex,
    Revlex,
}

/// Writes to `path` through a temporary file in the same directory, or to
/// `out` when no path is given.
fn emit(text: &str, path: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(e.to_string());
    match path {
        None => out.write_all(text.as_bytes()).map_err(io),
        Some(p) => {
            let target = Path::new(p);
            let dir = target.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let name = target.file_name().ok_or_else(|| CliError::Input(format!("bad output path {}", p)))?;
            let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
            std::fs::write(&tmp, text).map_err(io)?;
            std::fs::rename(&tmp, target).map_err(io)
        }
    }
}

fn check_threads() -> Result<(), CliError> {
    match std::env::var("SHEAFBM_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(CliError::Input(format!("SHEAFBM_THREADS must be a positive integer, got {}", v))),
        },
    }
}

fn run_bm(a: &RunArgs, level: Option<VerifyLevel>, out: &mut dyn Write) -> Result<(), CliError> {
    let source = match (&a.kind, &a.graph_file) {
        (Some(t), None) => parse_type(t)?,
        (None, Some(f)) => Source::GraphFile(f.clone()),
        _ => return Err(CliError::Input("give exactly one of --type and --graph-file".into())),
    };
    let spec = WindowSpec { source, w: a.w.clone(), bx: a.bx.clone(), margin: a.margin };
    let characteristic = parse_field(&a.field)?;
    let prep = prepare(&spec)?;
    let ext = match a.order {
        Order::Lex => ExtensionOrder::Lexicographic,
        Order::Revlex => ExtensionOrder::ReverseLexicographic,
    };
    let result = bm_run(&prep, characteristic, a.cutoff, ext, level)?;
    let text = match a.format {
        Format::Json => to_json(&result),
        Format::Csv => rank_csv(&result),
    };
    emit(&text, a.out.as_deref(), out)?;
    match &result.verification {
        Some(v) if !v.passed => {
            let failed: Vec<&str> = v.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            Err(CliError::Verification(failed.join(", ")))
        }
        _ => Ok(()),
    }
}

fn level(l: Option<Level>) -> Option<VerifyLevel> {
    l.map(|l| match l {
        Level::Fast => VerifyLevel::Fast,
        Level::Full => VerifyLevel::Full,
    })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    check_threads()?;
    match cli.command {
        Command::Graph { action: GraphCommand::Validate { graph_file, field } } => {
            let characteristic = parse_field(&field)?;
            let loaded = load_graph(&read_file(&graph_file)?)?;
            check_gkm(&loaded.graph, characteristic)?;
            writeln!(out, "OK {} vertices, {} edges", loaded.graph.num_vertices(), loaded.graph.edges().len()).map_err(|e| CliError::Input(e.to_string()))
        }
        Command::Graph { action: GraphCommand::Quotient { graph_file, out: path } } => {
            let q = graph_quotient(&read_file(&graph_file)?)?;
            emit(&to_json(&q), path.as_deref(), out)
        }
        Command::Alcoves { action: AlcoveCommand::Build { kind, w, bx, margin, out: path } } => {
            let Source::Affine(t) = parse_type(&kind)? else {
                return Err(CliError::Input("alcove windows need an affine type".into()));
            };
            let f = alcove_window(t, &w, &bx, margin)?;
            emit(&to_json(&f), path.as_deref(), out)
        }
        Command::Bm { action: BmCommand::Run(a) } => run_bm(&a, level(a.verify), out),
        Command::Bm { action: BmCommand::Verify(a) } => run_bm(&a, level(a.verify).or(Some(VerifyLevel::Fast)), out),
        Command::Kl { action: KlCommand::Table { kind, w, format, out: path } } => {
            let t = kl_table(&kind, w.as_deref())?;
            let text = match format {
                Format::Json => to_json(&t),
                Format::Csv => kl_csv(&t),
            };
            emit(&text, path.as_deref(), out)
        }
        Command::Compare { bm, kl } => {
            let parse = |p: &str| -> Result<String, CliError> { read_file(p) };
            let result: SheafResult = serde_json::from_str(&parse(&bm)?).map_err(|e| CliError::Input(format!("{}: {}", bm, e)))?;
            let table: KlTableFile = serde_json::from_str(&parse(&kl)?).map_err(|e| CliError::Input(format!("{}: {}", kl, e)))?;
            let diffs = compare(&result, &table);
            let io = |e: std::io::Error| CliError::Input(e.to_string());
            if diffs.is_empty() {
                writeln!(out, "MATCH {} stalks for w = {}", result.stalks.len(), result.w).map_err(io)
            } else {
                for d in &diffs {
                    writeln!(out, "{}", d).map_err(io)?;
                }
                Err(CliError::Verification(format!("{} mismatches", diffs.len())))
            }
        }
        Command::Selftest { filter, seed, count, inject_mutation } => {
            let lines = selftest(&SelftestConfig { seed, count, filter, inject_mutation });
            out.write_all(matrix(&lines).as_bytes()).map_err(|e| CliError::Input(e.to_string()))?;
            if lines.is_empty() {
                return Err(CliError::Input("filter matches no suite".into()));
            }
            if lines.iter().all(|l| l.ok()) {
                Ok(())
            } else {
                Err(CliError::Verification("selftest".into()))
            }
        }
    }
}

/// Runs the command line and returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = if code == 0 { write!(out, "{}", e) } else { write!(err, "{}", e) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e);
            e.exit_code()
        }
    }
}
