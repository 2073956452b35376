//! `ndstate`: parameter queries, inclined-vector search, branch families and
//! covering experiments, all emitting canonical JSON.
//!
//! Exit codes: 0 success, 1 negative result or failed bound, 2 input error,
//! 3 search budget exhausted.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ndstate", version, about)]
struct Cli {
    /// Worker threads (affects speed only).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest level dimension satisfying the level predicate.
    Params {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
    },
    /// Search for a unit vector inclined to every vector of a family.
    Incline(InclineArgs),
    /// Re-verify an inclination certificate against its input family.
    VerifyIncline {
        certificate: PathBuf,
        #[arg(long)]
        vectors: PathBuf,
    },
    /// Build, verify and intersect branch projections.
    #[command(subcommand)]
    Family(FamilyCommand),
    /// Look for a unit vector far from every point of a candidate net.
    Cover(CoverArgs),
    /// End-to-end run: inclined vector at d = 128, eight branches on a toy
    /// stage, and all pairwise and triple intersections.
    Demo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct InclineArgs {
    /// JSON list of vectors.
    input: PathBuf,
    #[arg(long, default_value_t = 0.9)]
    bound: f64,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Build the projection of one branch.
    Build(BuildArgs),
    /// Recompute every diagonal entry of a family file.
    Verify {
        family: PathBuf,
        /// Basis file, needed when the family was built from one.
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long, default_value_t = 0.95)]
        bound: f64,
    },
    /// Common fixed vector of two or more branch projections.
    Intersect {
        #[arg(required = true, num_args = 2..)]
        families: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    stage: PathBuf,
    #[arg(long)]
    branch: String,
    /// `random`, `standard`, or a path to a JSON list of basis vectors.
    #[arg(long, default_value = "random")]
    basis: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoverArgs {
    points: PathBuf,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = commands::Context::from_env();
    let started = std::time::Instant::now();
    let result = match cli.command {
        Command::Params { m } => commands::params(m),
        Command::Incline(a) => commands::incline(&ctx, &a.input, a.bound, a.budget, a.seed, a.out.as_deref()),
        Command::VerifyIncline { certificate, vectors } => commands::verify_incline(&certificate, &vectors),
        Command::Family(FamilyCommand::Build(a)) => commands::family_build(
            &ctx,
            commands::BuildRequest {
                stage: &a.stage,
                branch: &a.branch,
                basis: &a.basis,
                seed: a.seed,
                rho: a.rho,
                budget: a.budget,
            },
            a.out.as_deref(),
        ),
        Command::Family(FamilyCommand::Verify { family, basis, bound }) => {
            commands::family_verify(&family, basis.as_deref(), bound)
        }
        Command::Family(FamilyCommand::Intersect { families, out }) => {
            commands::family_intersect(&ctx, &families, out.as_deref())
        }
        Command::Cover(a) => commands::cover(&a.points, a.radius, a.trials, a.seed, a.out.as_deref()),
        Command::Demo { seed, out_dir } => commands::demo(&ctx, seed, &out_dir),
    };
    eprintln!("elapsed: {:.3} s", started.elapsed().as_secs_f64());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
