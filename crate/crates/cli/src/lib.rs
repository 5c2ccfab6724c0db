//! The `netpoll` command line. [`run`] is the whole program minus process
//! exit, so tests can drive it in-process.
//!
//! Exit status: 0 for YES (or plain success), 1 for NO, 2 for any error.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use netpoll_core::dp::{self, SolveOptions};
use netpoll_core::format::{self, FormatError};
use netpoll_core::reductions::{
    cover_to_witness, gen_x3c, reduce_tree, reduce_two_candidates, solve_x3c, Construction, X3CInstance,
};
use netpoll_core::treedecomp::{decompose, pin_x, to_nice, validate, NiceTreeDecomposition};
use netpoll_core::{oracle, prepare_decomposition, verify_witness, ControlInstance, Mode, WitnessSet};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "netpoll", version, about = "Election control over voter networks under plurality")]
pub struct Cli {
    /// Worker threads for the solvers.
    #[arg(long, global = true, env = "NETPOLL_JOBS", default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimum-cost control via tree-decomposition dynamic programming.
    Solve(SolveArgs),
    /// Minimum-cost control by enumerating deletion sets.
    Oracle(OracleArgs),
    /// Print a tree decomposition of an instance's voter graph.
    Decompose(DecomposeArgs),
    /// Check a decomposition file against an instance's voter graph.
    ValidateTd(ValidateTdArgs),
    /// Generate a regular exact 3-cover instance.
    GenX3c(GenX3cArgs),
    /// Decide an exact 3-cover instance by enumeration.
    SolveX3c(SolveX3cArgs),
    /// Build a control instance from an exact 3-cover instance.
    Reduce(ReduceArgs),
    /// Check a deletion set against an instance.
    VerifyWitness(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Constructive,
    Destructive,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Constructive => Mode::Constructive,
            ModeArg::Destructive => Mode::Destructive,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum WhichArg {
    TwoCandidates,
    Tree,
}

impl From<WhichArg> for Construction {
    fn from(w: WhichArg) -> Construction {
        match w {
            WhichArg::TwoCandidates => Construction::TwoCandidates,
            WhichArg::Tree => Construction::Tree,
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long)]
    pub instance: PathBuf,
    /// Decomposition to use instead of building one.
    #[arg(long)]
    pub td: Option<PathBuf>,
    /// Also write the witness here.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long)]
    pub instance: PathBuf,
    /// Comma-separated voter ids; only these may be deleted.
    #[arg(long, value_delimiter = ',')]
    pub deletable: Option<Vec<String>>,
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Instance whose voter graph is decomposed.
    #[arg(long)]
    pub graph_of: PathBuf,
    /// Print the nice form with node kinds.
    #[arg(long)]
    pub nice: bool,
    /// Print the nice form pinned at the initiator (implies --nice).
    #[arg(long)]
    pub pin: bool,
}

#[derive(Args, Debug)]
pub struct ValidateTdArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub td: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenX3cArgs {
    #[arg(long)]
    pub ell: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Guarantee a cover exists.
    #[arg(long)]
    pub planted: bool,
}

#[derive(Args, Debug)]
pub struct SolveX3cArgs {
    #[arg(long)]
    pub x3c: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long, value_enum)]
    pub which: WhichArg,
    #[arg(long)]
    pub x3c: PathBuf,
    /// Write the witness of the first cover here, if a cover exists.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub witness: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, std::io::Error),
    #[error("{}: {1}", .0.display())]
    Format(PathBuf, FormatError),
    #[error(transparent)]
    Core(#[from] netpoll_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load_instance(path: &Path) -> CliResult<ControlInstance> {
    format::parse_instance(&read(path)?).map_err(|e| CliError::Format(path.to_path_buf(), e))
}

fn load_x3c(path: &Path) -> CliResult<X3CInstance> {
    format::parse_x3c(&read(path)?).map_err(|e| CliError::Format(path.to_path_buf(), e))
}

fn load_ntd(path: &Path, instance: &ControlInstance) -> CliResult<NiceTreeDecomposition> {
    let td = format::parse_td(&read(path)?, &instance.election).map_err(|e| CliError::Format(path.to_path_buf(), e))?;
    let nice = to_nice(&instance.graph, &td)?;
    Ok(pin_x(&nice, instance.initiator)?)
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(PathBuf::from("<stdout>"), e)
}

/// Prints the `result`/`cost`/`witness` block after re-checking a YES.
fn report(
    out: &mut dyn Write,
    instance: &ControlInstance,
    mode: Mode,
    found: Option<WitnessSet>,
    witness_out: Option<&Path>,
) -> CliResult<i32> {
    let Some(w) = found else {
        writeln!(out, "result: NO").map_err(io)?;
        return Ok(EXIT_NO);
    };
    if !verify_witness(instance, &w, mode)? {
        return Err(CliError::Internal("solver witness failed verification".into()));
    }
    let names: Vec<&str> = w.deleted.iter().map(|&v| instance.election.voter_name(v)).collect();
    writeln!(out, "result: YES").map_err(io)?;
    writeln!(out, "cost: {}", w.total_cost).map_err(io)?;
    writeln!(out, "witness: {}", names.join(" ")).map_err(io)?;
    if let Some(p) = witness_out {
        write_file(p, &format::write_witness(&w.deleted, &instance.election))?;
    }
    Ok(EXIT_YES)
}

fn solve(args: &SolveArgs, opts: SolveOptions, out: &mut dyn Write) -> CliResult<i32> {
    let instance = load_instance(&args.instance)?;
    let ntd = match &args.td {
        Some(p) => load_ntd(p, &instance)?,
        None => prepare_decomposition(&instance)?,
    };
    let mode = Mode::from(args.mode);
    let found = match mode {
        Mode::Constructive => dp::solve_constructive_with(&instance, &ntd, opts)?,
        Mode::Destructive => dp::solve_destructive_with(&instance, &ntd, opts)?,
    };
    report(out, &instance, mode, found, args.witness_out.as_deref())
}

fn run_oracle(args: &OracleArgs, out: &mut dyn Write) -> CliResult<i32> {
    let instance = load_instance(&args.instance)?;
    let deletable = match &args.deletable {
        None => None,
        Some(ids) => Some(
            ids.iter()
                .filter(|s| !s.is_empty())
                .map(|s| instance.election.find_voter(s).ok_or_else(|| CliError::Usage(format!("unknown voter `{s}`"))))
                .collect::<CliResult<BTreeSet<_>>>()?,
        ),
    };
    let mode = Mode::from(args.mode);
    let found = oracle::brute_force(&instance, mode, deletable.as_ref())?;
    report(out, &instance, mode, found, args.witness_out.as_deref())
}

fn run_decompose(args: &DecomposeArgs, out: &mut dyn Write) -> CliResult<i32> {
    let instance = load_instance(&args.graph_of)?;
    let e = &instance.election;
    let text = if args.pin {
        format::write_nice_td(&prepare_decomposition(&instance)?, e)
    } else if args.nice {
        format::write_nice_td(&to_nice(&instance.graph, &decompose(&instance.graph))?, e)
    } else {
        format::write_td(&decompose(&instance.graph), e)
    };
    out.write_all(text.as_bytes()).map_err(io)?;
    Ok(EXIT_YES)
}

fn run_validate_td(args: &ValidateTdArgs, out: &mut dyn Write) -> CliResult<i32> {
    let instance = load_instance(&args.instance)?;
    let td =
        format::parse_td(&read(&args.td)?, &instance.election).map_err(|e| CliError::Format(args.td.clone(), e))?;
    let report = validate(&instance.graph, &td);
    if report.is_ok() {
        writeln!(out, "valid: width {}", td.width()).map_err(io)?;
        return Ok(EXIT_YES);
    }
    writeln!(out, "invalid").map_err(io)?;
    for v in &report.violations {
        writeln!(out, "violation: {v}").map_err(io)?;
    }
    Ok(EXIT_NO)
}

fn run_solve_x3c(args: &SolveX3cArgs, out: &mut dyn Write) -> CliResult<i32> {
    let x3c = load_x3c(&args.x3c)?;
    match solve_x3c(&x3c)? {
        Some(cover) => {
            let ids: Vec<String> = cover.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(out, "result: YES\ncover: {}", ids.join(" ")).map_err(io)?;
            Ok(EXIT_YES)
        }
        None => {
            writeln!(out, "result: NO").map_err(io)?;
            Ok(EXIT_NO)
        }
    }
}

fn run_reduce(args: &ReduceArgs, out: &mut dyn Write) -> CliResult<i32> {
    let x3c = load_x3c(&args.x3c)?;
    let which = Construction::from(args.which);
    let labeled = match which {
        Construction::TwoCandidates => reduce_two_candidates(&x3c),
        Construction::Tree => reduce_tree(&x3c)?,
    };
    if let Some(p) = &args.witness_out {
        let cover = solve_x3c(&x3c)?.ok_or_else(|| CliError::Usage("no exact cover, so no witness to write".into()))?;
        let w = cover_to_witness(&x3c, &cover, which)?;
        write_file(p, &format::write_witness(&w.deleted, &labeled.instance.election))?;
    }
    out.write_all(format::write_instance(&labeled.instance).as_bytes()).map_err(io)?;
    Ok(EXIT_YES)
}

fn run_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let instance = load_instance(&args.instance)?;
    let deleted = format::parse_witness(&read(&args.witness)?, &instance.election)
        .map_err(|e| CliError::Format(args.witness.clone(), e))?;
    let w = WitnessSet::new(&instance, deleted)?;
    let ok = verify_witness(&instance, &w, args.mode.into())?;
    writeln!(out, "result: {}\ncost: {}", if ok { "YES" } else { "NO" }, w.total_cost).map_err(io)?;
    Ok(if ok { EXIT_YES } else { EXIT_NO })
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let opts = SolveOptions { parallel: cli.jobs > 1 };
    match &cli.command {
        Command::Solve(a) => solve(a, opts, out),
        Command::Oracle(a) => run_oracle(a, out),
        Command::Decompose(a) => run_decompose(a, out),
        Command::ValidateTd(a) => run_validate_td(a, out),
        Command::GenX3c(a) => {
            out.write_all(format::write_x3c(&gen_x3c(a.ell, a.seed, a.planted)).as_bytes()).map_err(io)?;
            Ok(EXIT_YES)
        }
        Command::SolveX3c(a) => run_solve_x3c(a, out),
        Command::Reduce(a) => run_reduce(a, out),
        Command::VerifyWitness(a) => run_verify(a, out),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_YES };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if cli.jobs == 0 {
        let _ = writeln!(err, "error: --jobs must be at least 1");
        return EXIT_ERROR;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buf));
    if let Err(e) = out.write_all(&buf) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_ERROR;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
