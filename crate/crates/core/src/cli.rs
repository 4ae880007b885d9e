//! The `residua` command line.
//!
//! Exit codes: 0 ok, 1 parse or usage error, 2 verification failed,
//! 3 inconclusive, 4 no constructor for the expression, 5 tree level not
//! materializable, 6 oracle cap exceeded. Artifacts go to stdout (or
//! `--out`), diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::chains::{depth_interval, from_subgroup_sets, verify_with, ChainError, ChainSchema, DepthInterval, VerifyOptions};
use crate::dsl::{parse_expr, GroupExpr};
use crate::oracle::{all_subgroups, core_up_to_index, depth_exact_finite, maximal_subgroup_chain, min_kappa, OracleError, ORACLE_CAP};
use crate::ordinal::CardinalBound;
use crate::realize::{realize_chain, realize_group};
use crate::trees::{coset_tree, emit, truncate, Format, TreeError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_UNREGISTERED: i32 = 4;
pub const EXIT_NON_MATERIALIZABLE: i32 = 5;
pub const EXIT_CAP: i32 = 6;

#[derive(Parser, Debug)]
#[command(name = "residua", version, about = "Residual chains, coset trees and wreath towers of computable groups")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    #[arg(long, global = true, env = "RESIDUA_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 64)]
    pub probes: usize,
    #[arg(long, global = true, default_value_t = 4)]
    pub levels: u64,
    #[arg(long, global = true, default_value = "aleph0")]
    #[serde(serialize_with = "as_text")]
    pub kappa: CardinalBound,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn as_text<S: serde::Serializer>(k: &CardinalBound, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&k.to_string())
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Depth interval of a group expression.
    Depth { expr: String },
    /// Check a prefix of the expression's chain and emit a certificate.
    Verify { expr: String },
    /// Materialize levels of the coset tree.
    Tree {
        expr: String,
        /// ω-block whose levels are drawn.
        #[arg(long, default_value_t = 0)]
        block: u64,
    },
    /// Brute-force answers for small finite groups.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleQuery {
    Lattice { expr: String },
    Core {
        expr: String,
        #[arg(long)]
        max_index: u64,
    },
    MinKappa { expr: String },
    Depth { expr: String },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl ToString) -> Self {
        Failure { code, message: message.to_string() }
    }
}

fn chain_failure(e: ChainError) -> Failure {
    Failure::new(EXIT_UNREGISTERED, format!("no chain: {e}"))
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::Infinite(_) | OracleError::CapExceeded { .. } => Failure::new(EXIT_CAP, e),
        OracleError::Group(g) => Failure::new(EXIT_UNREGISTERED, g),
    }
}

fn parse(text: &str) -> Result<GroupExpr, Failure> {
    parse_expr(text).map_err(|e| Failure::new(EXIT_PARSE, format!("{e}\n  {text}\n  {}^", " ".repeat(e.offset))))
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((artifact, code)) => {
            let written = match &cli.config.out {
                Some(path) => std::fs::write(path, &artifact).map_err(|e| e.to_string()),
                None => stdout.write_all(artifact.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_PARSE;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Depth { expr } => {
            let e = parse(expr)?;
            let d = depth_interval(&e).map_err(chain_failure)?;
            Ok((render_depth(&e, &d, cfg.format), EXIT_OK))
        }
        Command::Verify { expr } => {
            let e = parse(expr)?;
            let chain = realize_chain(&e).map_err(chain_failure)?.with_kappa(cfg.kappa);
            let opts = VerifyOptions { levels: cfg.levels, probes: cfg.probes, seed: cfg.seed, ..VerifyOptions::default() };
            let cert = verify_with(&chain, &opts);
            let code = if cert.verdict.is_pass() {
                EXIT_OK
            } else if cert.verdict.is_fail() {
                EXIT_FAIL
            } else {
                EXIT_INCONCLUSIVE
            };
            let mut doc = json!({
                "tool": "residua",
                "version": env!("CARGO_PKG_VERSION"),
                "command": "verify",
                "expr": e.to_string(),
                "config": cfg_json(cfg),
                "length": chain.length().to_string(),
                "certificate": cert,
            });
            doc["certificate"]["length"] = json!(chain.length().to_string());
            Ok((pretty(&doc), code))
        }
        Command::Tree { expr, block } => {
            let e = parse(expr)?;
            let chain = tree_chain(&e)?;
            let levels = if chain.blocks() == 0 { cfg.levels.min(chain.tail_len()) } else { cfg.levels };
            let depth = usize::try_from(levels).map_err(|_| Failure::new(EXIT_NON_MATERIALIZABLE, "too many levels"))?;
            let tr = truncate(&coset_tree(&chain), depth, *block).map_err(|err| match err {
                TreeError::Chain(c @ ChainError::NoConstructor(_)) => chain_failure(c),
                other => Failure::new(EXIT_NON_MATERIALIZABLE, other),
            })?;
            let text = match cfg.format {
                OutputFormat::Json => emit(&tr, Format::Json) + "\n",
                OutputFormat::Dot => emit(&tr, Format::Dot),
                OutputFormat::Text => {
                    let mut s = format!("{}\n", tr.provenance());
                    for (k, size) in tr.level_sizes().iter().enumerate() {
                        s.push_str(&format!("level {k}: {size}\n"));
                    }
                    s
                }
            };
            Ok((text, EXIT_OK))
        }
        Command::Oracle { query } => oracle(query, cfg),
    }
}

/// Finite groups inside the oracle cap get a maximal-subgroup chain so
/// their trees have more than one level.
fn tree_chain(e: &GroupExpr) -> Result<ChainSchema, Failure> {
    let group = realize_group(e).map_err(chain_failure)?;
    let small = group.order().finite().is_some_and(|n| *n <= ORACLE_CAP.into());
    if small {
        let sets = maximal_subgroup_chain(&group).map_err(oracle_failure)?;
        return from_subgroup_sets(&group, &sets, CardinalBound::Aleph0).map_err(chain_failure);
    }
    realize_chain(e).map_err(chain_failure)
}

fn oracle(query: &OracleQuery, cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let (expr, name) = match query {
        OracleQuery::Lattice { expr } => (expr, "lattice"),
        OracleQuery::Core { expr, .. } => (expr, "core"),
        OracleQuery::MinKappa { expr } => (expr, "min-kappa"),
        OracleQuery::Depth { expr } => (expr, "depth"),
    };
    let e = parse(expr)?;
    let group = realize_group(&e).map_err(chain_failure)?;
    let result = match query {
        OracleQuery::Lattice { .. } => {
            let lattice = all_subgroups(&group).map_err(oracle_failure)?;
            serde_json::from_str(&lattice.to_json()).expect("lattice json")
        }
        OracleQuery::Core { max_index, .. } => {
            let core = core_up_to_index(&group, *max_index).map_err(oracle_failure)?;
            json!({ "max_index": max_index, "order": core.len(), "trivial": core.len() == 1, "elements": core })
        }
        OracleQuery::MinKappa { .. } => json!(min_kappa(&group).map_err(oracle_failure)?),
        OracleQuery::Depth { .. } => json!(depth_exact_finite(&group).map_err(oracle_failure)?.to_string()),
    };
    let doc = json!({
        "tool": "residua",
        "version": env!("CARGO_PKG_VERSION"),
        "command": format!("oracle {name}"),
        "expr": e.to_string(),
        "config": cfg_json(cfg),
        "result": result,
    });
    Ok((pretty(&doc), EXIT_OK))
}

fn cfg_json(cfg: &RunConfig) -> serde_json::Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    v["out"] = json!(cfg.out.as_ref().map(|p| p.display().to_string()));
    v
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn render_depth(e: &GroupExpr, d: &DepthInterval, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => pretty(&json!({
            "tool": "residua",
            "version": env!("CARGO_PKG_VERSION"),
            "command": "depth",
            "expr": e.to_string(),
            "lower": d.lower.to_string(),
            "upper": d.upper.to_string(),
            "paper_claimed": d.paper_claimed.as_ref().map(|c| json!({ "value": c.value.to_string(), "citation": c.citation })),
            "flags": d.flags,
        })),
        _ => {
            let mut s = format!("[{}, {}]\n", d.lower, d.upper);
            s.push_str(&format!("lower: {}\nupper: {}\n", d.lower, d.upper));
            match &d.paper_claimed {
                Some(c) => s.push_str(&format!("paper_claimed: {} ({})\n", c.value, c.citation)),
                None => s.push_str("paper_claimed: none\n"),
            }
            for f in &d.flags {
                s.push_str(&format!("flag: {f}\n"));
            }
            s
        }
    }
}
