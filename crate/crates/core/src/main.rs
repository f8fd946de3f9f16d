use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plate_cdg::cli;
use plate_cdg::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "plate-cdg",
    version,
    about = "C0 DG solvers for the Kirchhoff plate frictional contact problem"
)]
struct Args {
    /// JSON run configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the configuration).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for assembly and studies.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print vertex, triangle and edge counts of the mesh.
    MeshInfo,
    /// Write the reduced system as A.mtx, B.mtx and f.mtx.
    Export,
    /// Solve one problem and write solution.csv and report.json.
    Solve,
    /// Run the convergence study and write study.csv, study.md and study.json.
    Study,
    /// Run the invariant suite; exits nonzero if any check fails.
    Verify,
}

fn run(args: Args) -> plate_cdg::Result<ExitCode> {
    let cfg = match &args.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(k) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| plate_cdg::Error::Config(format!("thread pool: {e}")))?;
    }
    // Keep dense/sparse kernels sequential so results do not depend on the
    // worker count.
    faer::set_global_parallelism(faer::Par::Seq);
    let out = args.out.unwrap_or_else(|| cfg.out.clone());
    match args.command {
        Command::MeshInfo => {
            println!(
                "{}",
                serde_json::to_string_pretty(&cli::cmd_mesh_info(&cfg)?)?
            );
        }
        Command::Export => {
            for p in cli::cmd_export(&cfg, &out)? {
                println!("{}", p.display());
            }
        }
        Command::Solve => {
            let s = cli::cmd_solve(&cfg, &out)?;
            match (&s.report, &s.error) {
                (Some(r), _) => println!(
                    "{} eta={} n={}: {} iterations, objective {:.10e}, kkt {:.2e}, converged {}",
                    s.method_name,
                    s.eta,
                    s.n,
                    r.iterations,
                    r.objective,
                    r.kkt_residual,
                    r.converged
                ),
                (None, Some(e)) => eprintln!("solver failed: {e}"),
                (None, None) => {}
            }
            if !s.ok() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Study => {
            let t = cli::cmd_study(&cfg, &out)?;
            print!("{}", t.to_markdown());
        }
        Command::Verify => {
            let start = std::time::Instant::now();
            let r = cli::cmd_verify(&cfg, &out)?;
            print!("{}", r.to_text());
            eprintln!("verify finished in {:.1} s", start.elapsed().as_secs_f64());
            if !r.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
