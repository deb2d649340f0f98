use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use segre_cli::manifest::parse_order;
use segre_cli::{render, run, BaseSpec, Command, Format, RunOptions};

#[derive(Parser)]
#[command(name = "segre", version, about = "Segre chains, multitypes and orbits of CR-generic manifolds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Truncation order: EXACT or a nonnegative integer.
    #[arg(long, global = true, value_parser = order_arg)]
    order: Option<segre_core::algebra::Order>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 5)]
    trials: usize,
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// `origin`, `generic` or comma-separated chart coordinates (w, zeta, xi).
    #[arg(long, global = true, default_value = "origin", value_parser = BaseSpec::parse)]
    base: BaseSpec,
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Human)]
    format: Fmt,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Human,
    Machine,
}

fn order_arg(s: &str) -> Result<segre_core::algebra::Order, String> {
    parse_order(s).ok_or_else(|| format!("expected EXACT or an integer, got `{s}`"))
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the reality identity and the CR vector fields.
    Validate { manifest: PathBuf },
    /// Print the chain maps.
    Chains { manifest: PathBuf },
    /// Generic ranks of the chains.
    Ranks { manifest: PathBuf },
    /// Minimality verdict and Segre type.
    Minimality { manifest: PathBuf },
    /// Segre multitype.
    Multitype { manifest: PathBuf },
    /// Return-to-basepoint witness.
    Witness { manifest: PathBuf },
    /// Hörmander numbers and multiplicities.
    Hormander { manifest: PathBuf },
    /// Levi type and holomorphic nondegeneracy.
    Levi { manifest: PathBuf },
    /// The e1 determinant (m = d = 2).
    E1det { manifest: PathBuf },
    /// Greedy multitype and orbit dimension of a system (or of the CR pair).
    Orbit { manifest: PathBuf },
    /// Run a regression corpus (bundled when no directory is given).
    Checkall { dir: Option<PathBuf> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, path) = match cli.cmd {
        Cmd::Validate { manifest } => (Command::Validate, Some(manifest)),
        Cmd::Chains { manifest } => (Command::Chains, Some(manifest)),
        Cmd::Ranks { manifest } => (Command::Ranks, Some(manifest)),
        Cmd::Minimality { manifest } => (Command::Minimality, Some(manifest)),
        Cmd::Multitype { manifest } => (Command::Multitype, Some(manifest)),
        Cmd::Witness { manifest } => (Command::Witness, Some(manifest)),
        Cmd::Hormander { manifest } => (Command::Hormander, Some(manifest)),
        Cmd::Levi { manifest } => (Command::Levi, Some(manifest)),
        Cmd::E1det { manifest } => (Command::E1det, Some(manifest)),
        Cmd::Orbit { manifest } => (Command::Orbit, Some(manifest)),
        Cmd::Checkall { dir } => (Command::Checkall, dir),
    };
    let opts = RunOptions {
        order: cli.order,
        seed: cli.seed,
        trials: cli.trials,
        kmax: cli.kmax,
        base: cli.base,
        format: match cli.format {
            Fmt::Human => Format::Human,
            Fmt::Machine => Format::Machine,
        },
    };
    match run(cmd, path.as_deref(), &opts) {
        Ok(out) => {
            print!("{}", render(&out.report, opts.format));
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
