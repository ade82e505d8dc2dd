//! `trussbo analyze | optimize | baseline`.
//!
//! Exit codes: 0 success with a feasible design, 1 usage or configuration
//! error, 2 completed but infeasible.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bo::{self, BoConfig, BoError, RunOutput};
use crate::config::{self, RunConfigFile};
use crate::fea::{analyze, FailureMode};
use crate::report::{fmt_sig6, write_trace_csv};
use crate::truss::{derive_design, DesignParams, REFERENCE_MEMBER_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

/// Environment variable consulted for the seed when neither `--seed` nor the config sets one.
pub const SEED_ENV: &str = "TRUSSBO_SEED";

#[derive(Debug, Parser)]
#[command(name = "trussbo", version, about = "Bayesian optimization of a parameterized 2D truss")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze one design (lengths in mm, angles in degrees).
    #[command(allow_negative_numbers = true)]
    Analyze {
        a: String,
        b: String,
        c: String,
        theta1: String,
        theta2: String,
        /// Configuration file supplying material, section and load.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run Bayesian optimization and write the evaluation trace.
    Optimize(RunArgs),
    /// Run uniform random search with the same budget and write its trace.
    Baseline(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Configuration file; defaults apply when omitted.
    config: Option<PathBuf>,
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, S>(args: I, env_seed: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze {
            a,
            b,
            c,
            theta1,
            theta2,
            config,
        } => cmd_analyze([&a, &b, &c, &theta1, &theta2], config.as_deref(), out),
        Command::Optimize(args) => cmd_run(&args, env_seed, bo::run, out),
        Command::Baseline(args) => cmd_run(&args, env_seed, bo::random_search, out),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfigFile, String> {
    match path {
        None => Ok(RunConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            config::parse(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn cmd_analyze(raw: [&String; 5], config: Option<&Path>, out: &mut dyn Write) -> Result<i32, String> {
    const NAMES: [&str; 5] = ["a", "b", "c", "theta1", "theta2"];
    let mut v = [0.0f64; 5];
    for (k, s) in raw.iter().enumerate() {
        v[k] = s
            .trim()
            .parse()
            .map_err(|_| format!("parameter `{}` is not a number: `{s}`", NAMES[k]))?;
    }
    let file = load_config(config)?;
    let c = &file.config;
    let design = derive_design(DesignParams::from_array(v)).map_err(|e| e.to_string())?;
    let result = analyze(&design, &c.material, &c.section, c.total_load);
    let p = design.params();
    let io = |e: std::io::Error| e.to_string();
    writeln!(
        out,
        "a = {} mm\nb = {} mm\nc = {} mm\nd = {} mm\ntheta1 = {} deg\ntheta2 = {} deg",
        fmt_sig6(p.a),
        fmt_sig6(p.b),
        fmt_sig6(p.c),
        fmt_sig6(design.d()),
        fmt_sig6(p.theta1),
        fmt_sig6(p.theta2)
    )
    .map_err(io)?;
    if !result.axial_forces.is_empty() {
        writeln!(out, "member,length_mm,force_n,stress_mpa").map_err(io)?;
        for (k, name) in REFERENCE_MEMBER_NAMES.iter().enumerate() {
            writeln!(
                out,
                "{name},{},{},{}",
                fmt_sig6(result.geometry.member_length(k)),
                fmt_sig6(result.axial_forces[k]),
                fmt_sig6(result.axial_stresses[k])
            )
            .map_err(io)?;
        }
    }
    writeln!(
        out,
        "max_abs_stress = {} MPa\nmass = {} kg\nfeasible = {}\nfailure_mode = {}",
        fmt_sig6(result.max_abs_stress),
        fmt_sig6(result.mass),
        result.feasible,
        result.failure_mode
    )
    .map_err(io)?;
    Ok(if result.feasible && result.failure_mode == FailureMode::None {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

fn resolve_seed(args: &RunArgs, file: &RunConfigFile, env_seed: Option<String>) -> Result<u64, String> {
    if let Some(s) = args.seed {
        return Ok(s);
    }
    if let Some(s) = file.seed {
        return Ok(s);
    }
    match env_seed {
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV} is not an unsigned integer: `{s}`")),
        None => Ok(0),
    }
}

fn cmd_run(
    args: &RunArgs,
    env_seed: Option<String>,
    runner: fn(&BoConfig) -> Result<RunOutput, BoError>,
    out: &mut dyn Write,
) -> Result<i32, String> {
    let file = load_config(args.config.as_deref())?;
    let mut config = file.config.clone();
    config.seed = resolve_seed(args, &file, env_seed)?;
    let (trace, best) = match runner(&config) {
        Ok(o) => (o.trace, Some(o.best)),
        Err(BoError::NoFeasibleDesign { trace }) => (trace, None),
        Err(e) => return Err(e.to_string()),
    };
    let csv = std::fs::File::create(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    let mut csv = std::io::BufWriter::new(csv);
    write_trace_csv(&trace, &mut csv)
        .and_then(|()| csv.flush())
        .map_err(|e| format!("{}: {e}", args.out.display()))?;
    let io = |e: std::io::Error| e.to_string();
    writeln!(out, "seed = {}\nevaluations = {}", config.seed, trace.len()).map_err(io)?;
    match best {
        Some(b) => {
            writeln!(
                out,
                "best_mass = {} kg\na = {} mm\nb = {} mm\nc = {} mm\nd = {} mm\ntheta1 = {} deg\ntheta2 = {} deg\nmax_abs_stress = {} MPa\nfound_at_index = {}\nevaluations_used = {}",
                fmt_sig6(b.mass),
                fmt_sig6(b.params.a),
                fmt_sig6(b.params.b),
                fmt_sig6(b.params.c),
                fmt_sig6(b.d),
                fmt_sig6(b.params.theta1),
                fmt_sig6(b.params.theta2),
                fmt_sig6(b.max_abs_stress),
                b.found_at_index,
                b.evaluations_used
            )
            .map_err(io)?;
            Ok(EXIT_OK)
        }
        None => {
            writeln!(out, "no feasible design found").map_err(io)?;
            Ok(EXIT_INFEASIBLE)
        }
    }
}
