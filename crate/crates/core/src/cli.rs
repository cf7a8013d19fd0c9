//! Command-line front end: `check`, `bench toy` and `explore`.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checker::{check, Config, Mode, Verdict};
use crate::parser::{parse, ProtocolFile};
use crate::process::looks_non_blocking;
use crate::reduction::ChannelOrder;
use crate::toy::toy_process;

#[derive(Parser, Debug)]
#[command(name = "porverif", version, about = "Trace equivalence of simple processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide every query of a protocol file.
    Check(CheckArgs),
    /// Run a built-in benchmark family.
    Bench(BenchArgs),
    /// List the symbolic traces explored for the left side of each query.
    Explore(ExploreArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Maximal height of attacker recipes.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Channel order, e.g. `c1<c2<c3`; unlisted channels follow in name order.
    #[arg(long)]
    pub order: Option<String>,
    /// Assume outputs never block and skip the matching disequalities.
    #[arg(long)]
    pub assume_non_blocking: bool,
    /// Worker threads for exploring one level of pairs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Mode used for every query; defaults to the mode written in the query.
    #[arg(long, conflicts_with = "all_modes")]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub all_modes: bool,
    #[command(flatten)]
    pub common: Common,
    /// Print one JSON record per verdict instead of the text report.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Comma-separated modes.
    #[arg(long, default_value = "reference,compressed,reduced")]
    pub modes: String,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ExploreArgs {
    pub file: PathBuf,
    #[arg(long, default_value = "reduced")]
    pub mode: ModeArg,
    /// Write the listing to this file instead of standard output.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Family {
    Toy,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Reference,
    Compressed,
    Reduced,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Reference => Mode::Reference,
            ModeArg::Compressed => Mode::Compressed,
            ModeArg::Reduced => Mode::Reduced,
        }
    }
}

/// Failure reported with exit status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}:{1}")]
    Parse(PathBuf, crate::parser::ParseError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Check(#[from] crate::checker::CheckError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn config(common: &Common, mode: Mode, constants: &[crate::term::Ident]) -> Result<Config, CliError> {
    if common.depth == 0 {
        return Err(CliError::Usage("--depth must be at least 1".into()));
    }
    let mut cfg = Config::new(mode);
    cfg.depth = common.depth;
    cfg.assume_non_blocking = common.assume_non_blocking;
    cfg.jobs = common.jobs.max(1);
    cfg.constants = constants.to_vec();
    if let Some(o) = &common.order {
        cfg.order = o.parse::<ChannelOrder>().map_err(CliError::Usage)?;
    }
    Ok(cfg)
}

fn load(path: &Path) -> Result<ProtocolFile, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    parse(&src).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

/// Runs the command and returns the exit status.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match cli.command {
        Command::Check(a) => cmd_check(&a, out, err),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Explore(a) => cmd_explore(&a, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn cmd_check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let file = load(&a.file)?;
    if file.queries.is_empty() {
        return Err(CliError::Usage(format!("{}: no query", a.file.display())));
    }
    let mut all_equivalent = true;
    for (i, q) in file.queries.iter().enumerate() {
        let (left, right) = file.resolve(q).map_err(|e| CliError::Parse(a.file.clone(), e))?;
        let modes: Vec<Mode> = if a.all_modes {
            Mode::ALL.to_vec()
        } else {
            vec![a.mode.map(Mode::from).unwrap_or(q.mode)]
        };
        if a.common.assume_non_blocking {
            let members = left.procs.members().iter().chain(right.procs.members());
            if !members.clone().all(looks_non_blocking) {
                let _ = writeln!(err, "warning: query {}: --assume-non-blocking may be unsafe, some output is not guarded", i + 1);
            }
        }
        for m in modes {
            let cfg = config(&a.common, m, &file.constants)?;
            let v: Verdict = check(&left, &right, &cfg)?;
            if v.wrapped {
                let _ = writeln!(err, "notice: query {}: processes are not initial, wrapped with start inputs", i + 1);
            }
            all_equivalent &= v.equivalent;
            if a.json {
                let _ = writeln!(out, "{}", v.to_json());
            } else {
                let _ = writeln!(out, "query {} ({}:{}):", i + 1, a.file.display(), q.pos);
                let _ = write!(out, "{}", v.report());
            }
        }
    }
    Ok(if all_equivalent { 0 } else { 1 })
}

pub const CSV_HEADER: [&str; 8] = ["n", "mode", "verdict", "max_traces", "pairs", "solver_branches", "pruned", "wall_ms"];

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let mut modes = Vec::new();
    for m in a.modes.split(',') {
        modes.push(m.trim().parse::<Mode>().map_err(CliError::Usage)?);
    }
    if modes.is_empty() {
        return Err(CliError::Usage("no mode given".into()));
    }
    let fresh = !a.out.exists() || std::fs::metadata(&a.out).map(|m| m.len() == 0).unwrap_or(true);
    let f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&a.out)
        .map_err(|e| CliError::Io(a.out.clone(), e))?;
    let mut w = csv::Writer::from_writer(f);
    if fresh {
        w.write_record(CSV_HEADER)?;
    }
    let mut all_equivalent = true;
    for n in 1..=a.n_max {
        let p = match a.family {
            Family::Toy => toy_process(n),
        };
        for m in &modes {
            let cfg = config(&a.common, *m, &[Arc::from("ok")])?;
            let v = check(&p, &p, &cfg)?;
            all_equivalent &= v.equivalent;
            let s = v.stats;
            w.write_record([
                n.to_string(),
                m.to_string(),
                if v.equivalent { "equivalent" } else { "not_equivalent" }.to_string(),
                s.max_traces.to_string(),
                s.pairs.to_string(),
                s.solver_branches.to_string(),
                s.pruned.to_string(),
                s.wall_ms.to_string(),
            ])?;
            let _ = writeln!(out, "n={n} mode={m} max_traces={} pairs={} wall_ms={}", s.max_traces, s.pairs, s.wall_ms);
        }
    }
    w.flush().map_err(|e| CliError::Io(a.out.clone(), e))?;
    Ok(if all_equivalent { 0 } else { 1 })
}

pub fn cmd_explore(a: &ExploreArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let file = load(&a.file)?;
    let mut listing: Vec<String> = Vec::new();
    for q in &file.queries {
        let (left, _) = file.resolve(q).map_err(|e| CliError::Parse(a.file.clone(), e))?;
        let mut cfg = config(&a.common, a.mode.into(), &file.constants)?;
        cfg.collect_traces = true;
        let v = check(&left, &left, &cfg)?;
        listing.extend(v.traces);
    }
    listing.sort();
    listing.dedup();
    let text: String = listing.iter().map(|t| format!("{t}\n")).collect();
    match &a.dump {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.clone(), e))?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(0)
}
