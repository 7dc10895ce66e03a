use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mlcb::environments::glm_oracle_table;
use mlcb::harness::output::{config_hash, expert_meta, write_outputs};
use mlcb::harness::{jobs, resolve, run_experiment, EnvironmentSpec, ExperimentConfig, Overrides, ResolvedConfig};

#[derive(Parser)]
#[command(name = "mlcb", version, about = "Budgeted selection among self-learning experts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (procedure, M, seed) job of a config.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed_count: Option<i64>,
        /// Comma-separated budgets, e.g. `1,2,3`.
        #[arg(long = "M", value_delimiter = ',')]
        budgets: Option<Vec<i64>>,
        #[arg(long)]
        procedure: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Validate and print the resolved plan without running.
        #[arg(long)]
        dry_run: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config and print every diagnostic.
    Validate { config: PathBuf },
    /// Print the `L_k*` table of a config's environment.
    Oracle { config: PathBuf },
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned())
}

fn load(path: &Path, overrides: &Overrides) -> Result<ResolvedConfig, ExitCode> {
    let mut cfg = match ExperimentConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Err(ExitCode::from(2));
        }
    };
    cfg.apply(overrides);
    resolve(&cfg, &stem(path)).map_err(|diags| {
        for d in diags {
            eprintln!("{}: {d}", path.display());
        }
        ExitCode::from(2)
    })
}

fn run(path: &Path, overrides: Overrides, dry_run: bool, threads: Option<usize>) -> Result<ExitCode, ExitCode> {
    let cfg = load(path, &overrides)?;
    let fail = |e: mlcb::Error| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    };
    if dry_run {
        println!("config hash: {}", config_hash(&cfg).map_err(fail)?);
        println!("preset: {}", cfg.preset);
        println!("experts: {}", cfg.experts.len());
        println!("horizon: {}", cfg.horizon);
        println!("delta: {}", cfg.delta);
        println!("scheme: {:?}, scale: {}", cfg.scheme, cfg.scale);
        println!("budgets: {:?}", cfg.budgets);
        let names: Vec<&str> = cfg.procedures.iter().map(|p| p.name()).collect();
        println!("procedures: {}", names.join(", "));
        println!("seeds: {:?}", cfg.seeds);
        println!("jobs: {}", jobs(&cfg).len());
        println!("output: {}", cfg.output_dir.display());
        return Ok(ExitCode::SUCCESS);
    }
    let result = run_experiment(&cfg, threads).map_err(fail)?;
    let written = write_outputs(&cfg, &result, &cfg.output_dir).map_err(fail)?;
    for p in &written {
        println!("{}", p.display());
    }
    let failed = result.failures();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed; see manifest.json", result.runs.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle(path: &Path) -> Result<ExitCode, ExitCode> {
    let cfg = load(path, &Overrides::default())?;
    let fail = |e: mlcb::Error| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    };
    if let EnvironmentSpec::Glm(p) = &cfg.environment {
        println!("# Monte-Carlo estimate, N = {}", p.oracle_samples);
        glm_oracle_table(p).map_err(fail)?;
    }
    println!("{:>6} {:>14} {:>12}", "expert", "L*", "std_error");
    for e in expert_meta(&cfg).map_err(fail)? {
        let v = e.optimum.map_or("-".into(), |v| format!("{v:.8}"));
        let s = e.optimum_std_error.map_or("-".into(), |v| format!("{v:.2e}"));
        println!("{:>6} {v:>14} {s:>12}", e.id);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Run {
            config,
            seed_count,
            budgets,
            procedure,
            out,
            dry_run,
            threads,
        } => run(
            &config,
            Overrides {
                seed_count,
                budgets,
                procedure,
                out,
            },
            dry_run,
            threads,
        ),
        Command::Validate { config } => load(&config, &Overrides::default()).map(|_| {
            println!("{}: ok", config.display());
            ExitCode::SUCCESS
        }),
        Command::Oracle { config } => oracle(&config),
    };
    out.unwrap_or_else(|code| code)
}
