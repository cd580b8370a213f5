use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use harq_cli::config::{entries, Entry};
use harq_cli::output::write_rows;
use harq_cli::presets::{describe, preset, PRESETS};
use harq_cli::verify::DEFAULT_CONFIG;
use harq_cli::{run_sweep, verify, SweepConfig};

#[derive(Parser)]
#[command(name = "harq-lab", version, about = "Relay HARQ-IR performance sweeps")]
struct Cli {
    /// Worker threads for grid points and Monte Carlo batches.
    #[arg(long, global = true, env = "HARQ_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a config file.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        over: Overrides,
    },
    /// Run a bundled plot preset (`--list` to show them).
    Preset {
        name: Option<String>,
        #[arg(long)]
        list: bool,
        /// Print the preset config instead of running it.
        #[arg(long)]
        show: bool,
        #[command(flatten)]
        over: Overrides,
    },
    /// Check dominance, monotonicity, identities, oracle and Monte Carlo
    /// agreement; exits nonzero on any failure.
    Verify {
        config: Option<PathBuf>,
        #[command(flatten)]
        over: Overrides,
    },
}

#[derive(Args)]
struct Overrides {
    /// Extra `key=value` settings applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Contour tail tolerance.
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Contour abscissa (in the Mellin variable), or `auto`.
    #[arg(long)]
    abscissa: Option<String>,
    /// Oracle quadrature tolerance.
    #[arg(long)]
    oracle_tol: Option<f64>,
    /// Output path, `-` for stdout.
    #[arg(long, short)]
    output: Option<String>,
    /// `csv` or `jsonl`.
    #[arg(long)]
    format: Option<String>,
}

impl Overrides {
    fn entries(&self) -> Result<Vec<Entry>, String> {
        let mut out = Vec::new();
        let mut push = |key: &str, value: String| {
            out.push(Entry { origin: "command line".into(), line: 0, key: key.into(), value });
        };
        for s in &self.set {
            let (k, v) = s.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{s}`"))?;
            push(k.trim(), v.trim().to_string());
        }
        if let Some(v) = self.seed {
            push("seed", v.to_string());
        }
        if let Some(v) = self.trials {
            push("trials", v.to_string());
        }
        if let Some(v) = self.tail_tol {
            push("tail_tol", v.to_string());
        }
        if let Some(v) = &self.abscissa {
            push("abscissa", v.clone());
        }
        if let Some(v) = self.oracle_tol {
            push("oracle_tol", v.to_string());
        }
        if let Some(v) = &self.output {
            push("output", v.clone());
        }
        if let Some(v) = &self.format {
            push("format", v.clone());
        }
        Ok(out)
    }
}

fn load(text: &str, origin: &str, over: &Overrides) -> Result<SweepConfig, String> {
    let mut list = entries(text, origin).map_err(|e| e.to_string())?;
    list.extend(over.entries()?);
    SweepConfig::from_entries(&list).map_err(|e| e.to_string())
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn sweep(cfg: &SweepConfig) -> Result<(), String> {
    let rows = run_sweep(cfg);
    let failed = rows.iter().filter(|r| !r.errors.is_empty()).count();
    let result = match &cfg.output {
        Some(path) => {
            let f = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            write_rows(cfg, &rows, BufWriter::new(f))
        }
        None => write_rows(cfg, &rows, io::stdout().lock()),
    };
    result.map_err(|e| e.to_string())?;
    if failed > 0 {
        eprintln!("{failed} of {} rows carry errors (see the error column)", rows.len());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Sweep { config, over } => {
            let cfg = load(&read(&config)?, &config.display().to_string(), &over)?;
            sweep(&cfg)?;
            Ok(true)
        }
        Command::Preset { name, list, show, over } => {
            if list || name.is_none() {
                let mut out = io::stdout().lock();
                for (n, text) in PRESETS {
                    writeln!(out, "{n:<20} {}", describe(text)).map_err(|e| e.to_string())?;
                }
                return Ok(true);
            }
            let name = name.expect("checked above");
            let text = preset(&name).ok_or_else(|| format!("unknown preset `{name}` (try --list)"))?;
            if show {
                print!("{text}");
                return Ok(true);
            }
            sweep(&load(text, &name, &over)?)?;
            Ok(true)
        }
        Command::Verify { config, over } => {
            let cfg = match &config {
                Some(path) => load(&read(path)?, &path.display().to_string(), &over)?,
                None => load(DEFAULT_CONFIG, "default", &over)?,
            };
            let checks = verify(&cfg);
            let mut ok = true;
            for c in &checks {
                ok &= c.pass;
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("harq-lab: worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("harq-lab: {e}");
            ExitCode::from(2)
        }
    }
}
