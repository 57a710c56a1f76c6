use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use viewsim::experiment::{run_scenario, run_sweep};
use viewsim::output::{format_number, write_series_file, write_sweep};
use viewsim::scenario::{bundled, Engine, Scenario};

#[derive(Parser)]
#[command(name = "viewsim", version, about = "Load-balancer view staleness simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario at its base settings and write its time series.
    Run(Common),
    /// Run the scenario's [sweep] and write a summary plus one series per point.
    Sweep(Common),
    /// List bundled scenarios.
    List,
}

#[derive(Args)]
struct Common {
    /// Scenario file, or the name of a bundled scenario.
    scenario: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u32>,
    /// Simulated seconds.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// event or model.
    #[arg(long)]
    engine: Option<Engine>,
}

impl Common {
    fn scenario(&self) -> Result<Scenario, String> {
        let mut s = if Path::new(&self.scenario).is_file() {
            Scenario::load(&self.scenario).map_err(|e| format!("{}: {e}", self.scenario))?
        } else {
            let name = self.scenario.trim_end_matches(".scn");
            bundled::load(name)
                .ok_or_else(|| format!("no scenario file or bundled scenario named `{}`", self.scenario))?
                .map_err(|e| format!("{name}: {e}"))?
        };
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(runs) = self.runs {
            if runs == 0 {
                return Err("--runs must be at least 1".into());
            }
            s.runs = runs;
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) {
                return Err("--horizon must be positive".into());
            }
            s.horizon = h;
        }
        if let Some(e) = self.engine {
            s.engine = e;
        }
        Ok(s)
    }
}

fn show(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_else(|| "-".into())
}

fn run(args: &Common, out: &mut String) -> Result<(), String> {
    let s = args.scenario()?;
    let result = run_scenario(&s).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| format!("{}: {e}", args.out_dir.display()))?;
    let path = args.out_dir.join(format!("{}.csv", s.name));
    write_series_file(result.output_series(), &path).map_err(|e| format!("{}: {e}", path.display()))?;
    let series = &result.series;
    let _ = writeln!(
        out,
        "{} engine={} runs={} xi_f={} xi_b={} sigma_f={} sigma_b={} sync_messages={}",
        s.name,
        s.engine,
        result.executions,
        show(series.mean_xi_f()),
        show(series.mean_xi_b()),
        format_number(series.mean_sigma_f()),
        format_number(series.mean_sigma_b()),
        format_number(result.sync_messages)
    );
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(())
}

fn sweep(args: &Common, out: &mut String) -> Result<(), String> {
    let s = args.scenario()?;
    let (result, failure) = match run_sweep(&s) {
        Ok(r) => (r, None),
        Err(f) => (f.partial, Some(f.error)),
    };
    let written = write_sweep(&s.name, &result, &args.out_dir).map_err(|e| format!("{}: {e}", args.out_dir.display()))?;
    let _ = writeln!(out, "{:>10} {:>12} {:>12} {:>12} {:>14} {:>5}", result.parameter.name(), "xi_f", "xi_b", "sigma_f", "sigma_b", "runs");
    for r in &result.rows {
        let _ = writeln!(
        out,
            "{:>10} {:>12} {:>12} {:>12} {:>14} {:>5}",
            format_number(r.value),
            show(r.xi_f),
            show(r.xi_b),
            format_number(r.sigma_f),
            format_number(r.sigma_b),
            r.runs
        );
    }
    let _ = writeln!(out, "wrote {} files to {}", written.len(), args.out_dir.display());
    match failure {
        None => Ok(()),
        Some(e) => Err(format!("sweep incomplete (partial results written): {e}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let outcome = match &cli.command {
        Command::Run(a) => run(a, &mut out),
        Command::Sweep(a) => sweep(a, &mut out),
        Command::List => {
            for name in bundled::names() {
                let desc = bundled::load(name).and_then(Result::ok).map(|s| s.description).unwrap_or_default();
                let _ = writeln!(out, "{name:<24} {desc}");
            }
            Ok(())
        }
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().write_all(out.as_bytes());
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
