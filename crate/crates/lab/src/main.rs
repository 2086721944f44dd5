use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hkakeya_lab::config::{Config, ConfigError};
use hkakeya_lab::exec::Pool;
use hkakeya_lab::experiments::{self, ExperimentError, EXPERIMENTS};
use hkakeya_lab::family::{self, GENERATORS};

#[derive(Parser)]
#[command(name = "hkakeya", version, about = "Heisenberg tube and parabola incidence experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment, writing a CSV and a manifest.
    Run {
        name: String,
        #[command(flatten)]
        params: Params,
    },
    /// Write a generated family as CSV.
    Dump {
        generator: String,
        #[command(flatten)]
        params: Params,
    },
    /// List experiments and generators.
    List,
}

/// Every flag overrides the config-file key of the same name.
#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct Params {
    /// Dyadic ladder 2^-A ..= 2^-B, written A..B.
    #[arg(long)]
    delta_exps: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    grid_res: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// A `key = value` file; flags win over its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Params {
    fn resolve(&self) -> Result<Config, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let flags = [
            ("delta-exps", &self.delta_exps),
            ("rho", &self.rho),
            ("alpha", &self.alpha),
            ("p", &self.p),
            ("mu", &self.mu),
            ("nu", &self.nu),
            ("n", &self.n),
            ("t", &self.t),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("grid-res", &self.grid_res),
            ("out", &self.out),
            ("workers", &self.workers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("experiments: {}", EXPERIMENTS.join(", "));
    eprintln!("generators: {}", GENERATORS.join(", "));
    ExitCode::from(2)
}

fn run(name: &str, cfg: &Config) -> ExitCode {
    if !EXPERIMENTS.contains(&name) {
        return usage_error(&format!("unknown experiment `{name}`"));
    }
    let pool = match Pool::new(cfg.workers) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    let start = Instant::now();
    let report = match experiments::run(name, cfg, &pool) {
        Ok(r) => r,
        Err(ExperimentError::Unknown(n)) => return usage_error(&format!("unknown experiment `{n}`")),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let wall = start.elapsed();
    let csv = hkakeya_lab::csv_path(name, cfg);
    let manifest = hkakeya_lab::manifest_path(&csv);
    let written = std::fs::write(&csv, report.csv())
        .and_then(|_| std::fs::write(&manifest, hkakeya_lab::manifest(&report, cfg, pool.workers(), wall)));
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", csv.display());
        return ExitCode::FAILURE;
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {} and {}", csv.display(), manifest.display());
    if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

fn dump(generator: &str, cfg: &Config) -> ExitCode {
    let families = match family::generate(generator, cfg) {
        Ok(Some(f)) => f,
        Ok(None) => return usage_error(&format!("unknown generator `{generator}`")),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let path = cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("{generator}.csv")));
    let result = File::create(&path)
        .map_err(|e| e.to_string())
        .and_then(|f| family::write_families(BufWriter::new(f), &families).map_err(|e| e.to_string()));
    match result {
        Ok(()) => {
            let rows: usize = families.iter().map(|f| f.objects.len()).sum();
            println!("wrote {rows} rows to {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", path.display());
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            println!("experiments: {}", EXPERIMENTS.join(", "));
            println!("generators: {}", GENERATORS.join(", "));
            ExitCode::SUCCESS
        }
        Command::Run { name, params } => match params.resolve() {
            Ok(cfg) => run(&name, &cfg),
            Err(e) => usage_error(&e.to_string()),
        },
        Command::Dump { generator, params } => match params.resolve() {
            Ok(cfg) => dump(&generator, &cfg),
            Err(e) => usage_error(&e.to_string()),
        },
    }
}
