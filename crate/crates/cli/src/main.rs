use std::collections::hash_map::RandomState;
use std::fmt;
use std::fs;
use std::hash::BuildHasher;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hetsample::harness::{presets, run_oracles, run_trace, write_oracle_csv, HarnessError};
use hetsample::{run_experiment, ExperimentSpec, MultiGraph};

#[derive(Parser)]
#[command(name = "hetsample", version, about = "Budget allocation experiments for random-walk graph sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every strategy over the budget schedule and write report.csv.
    Run(Common),
    /// Estimate each statistic's asymptotic variance by brute force and write oracle.csv.
    Oracle(Common),
    /// Write the visit-level trace of the statistic named in the [trace] section.
    Trace(Common),
    /// Print the resolved config as TOML.
    DumpConfig(Source),
}

#[derive(Args)]
struct Source {
    /// Experiment config file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Bundled preset name.
    #[arg(long)]
    preset: Option<String>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    source: Source,
    /// Output directory, created if absent.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
    /// Also write per-replication results.
    #[arg(long)]
    verbose: bool,
    /// Worker threads (default: config value, else available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

struct Loaded {
    spec: ExperimentSpec,
    base: PathBuf,
}

fn load(source: &Source) -> Result<Loaded, Failure> {
    let (text, base) = match (&source.config, &source.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (text, base)
        }
        (None, Some(name)) => {
            let text = presets::preset(name).ok_or_else(|| {
                let known: Vec<_> = presets::names().collect();
                Failure::Config(format!("unknown preset {name:?}; known presets: {}", known.join(", ")))
            })?;
            (text.to_string(), PathBuf::new())
        }
        (None, None) => return Err(Failure::Config("either --config or --preset is required".into())),
    };
    let mut spec = ExperimentSpec::from_toml(&text)?;
    if let Some(seed) = source.seed {
        spec.seed = Some(seed);
    }
    if spec.seed.is_none() {
        let seed = RandomState::new().hash_one(std::time::SystemTime::now());
        println!("seed: {seed}");
        spec.seed = Some(seed);
    }
    spec.validate()?;
    Ok(Loaded { spec, base })
}

fn configure_threads(jobs: Option<usize>, spec: &ExperimentSpec) {
    let n = jobs.unwrap_or(spec.jobs);
    if n > 0 {
        // Only fails when a global pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Output files written atomically: each is rendered into a temporary sibling and renamed.
struct Outputs {
    dir: PathBuf,
    files: Vec<(&'static str, Vec<u8>)>,
}

impl Outputs {
    fn prepare(dir: &Path, names: &[&str], force: bool) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
        if !force {
            if let Some(name) = names.iter().find(|n| dir.join(n).exists()) {
                return Err(Failure::Config(format!(
                    "{} already exists; pass --force to overwrite",
                    dir.join(name).display()
                )));
            }
        }
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn add(&mut self, name: &'static str, write: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) {
        let mut buf = Vec::new();
        write(&mut buf).expect("writing to memory");
        self.files.push((name, buf));
    }

    fn commit(self) -> Result<(), Failure> {
        let mut staged = Vec::new();
        for (name, bytes) in &self.files {
            let tmp = self.dir.join(format!(".{name}.tmp"));
            if let Err(e) = fs::write(&tmp, bytes) {
                for t in &staged {
                    let _ = fs::remove_file(t);
                }
                let _ = fs::remove_file(&tmp);
                return Err(io_failure(&tmp, e));
            }
            staged.push(tmp);
        }
        for (tmp, (name, _)) in staged.iter().zip(&self.files) {
            let target = self.dir.join(name);
            fs::rename(tmp, &target).map_err(|e| io_failure(&target, e))?;
        }
        Ok(())
    }
}

fn build_graph(loaded: &Loaded) -> Result<MultiGraph, Failure> {
    Ok(loaded.spec.build_graph(&loaded.base)?)
}

fn cmd_run(args: &Common) -> Result<(), Failure> {
    let loaded = load(&args.source)?;
    let spec = &loaded.spec;
    let mut names = vec!["report.csv"];
    if args.verbose {
        names.extend(["replications.csv", "frequencies.csv"]);
    }
    if spec.oracle.is_some() {
        names.push("oracle.csv");
    }
    let mut out = Outputs::prepare(&args.out, &names, args.force)?;
    configure_threads(args.jobs, spec);
    let graph = build_graph(&loaded)?;
    let report = run_experiment(spec, &graph)?;

    out.add("report.csv", |w| report.write_csv(w));
    if args.verbose {
        out.add("replications.csv", |w| report.write_replications_csv(w));
        out.add("frequencies.csv", |w| report.write_frequencies_csv(w));
    }
    if spec.oracle.is_some() {
        out.add("oracle.csv", |w| write_oracle_csv(&report.oracles, w));
    }
    out.commit()?;

    let metric = if report.normalized { "nrmse" } else { "rmse" };
    println!("{} (seed {}, truth {})", report.name, report.seed, report.truth);
    println!("{:<24} {:>10} {:>10} {:>12} {:>8}  k_hat_mode", "strategy", "budget", metric, "mean_est", "final_c");
    for r in &report.rows {
        println!(
            "{:<24} {:>10} {:>10.5} {:>12.6} {:>8.3}  {}",
            r.strategy, r.budget, r.nrmse, r.mean_estimate, r.mean_final_c, report.statistics[r.k_hat_mode]
        );
    }
    Ok(())
}

fn cmd_oracle(args: &Common) -> Result<(), Failure> {
    let loaded = load(&args.source)?;
    let spec = &loaded.spec;
    let params = spec
        .oracle
        .as_ref()
        .ok_or_else(|| Failure::Config("config has no [oracle] section".into()))?;
    let mut out = Outputs::prepare(&args.out, &["oracle.csv"], args.force)?;
    configure_threads(args.jobs, spec);
    let graph = build_graph(&loaded)?;
    let reports = run_oracles(spec, &graph, params)?;
    out.add("oracle.csv", |w| write_oracle_csv(&reports, w));
    out.commit()?;

    println!("{:<24} {:>10} {:>14} {:>14} {:>8}  stabilized", "statistic", "budget", "sigma2", "sigma2(2m)", "change");
    for o in &reports {
        let warn = if o.first.degenerate || o.second.degenerate { "  (degenerate: all runs identical)" } else { "" };
        println!(
            "{:<24} {:>10} {:>14.6} {:>14.6} {:>8.3}  {}{}",
            o.statistic, o.first.budget, o.first.value, o.second.value, o.relative_change, o.stabilized, warn
        );
    }
    Ok(())
}

fn cmd_trace(args: &Common) -> Result<(), Failure> {
    let loaded = load(&args.source)?;
    let mut out = Outputs::prepare(&args.out, &["trace.csv"], args.force)?;
    let graph = build_graph(&loaded)?;
    let trace = run_trace(&loaded.spec, &graph)?;
    out.add("trace.csv", |w| trace.write_csv(w));
    out.commit()?;
    println!("{} visits, {} jumps, spent {}", trace.len(), trace.jumps(), trace.ledger.spent);
    Ok(())
}

fn cmd_dump(source: &Source) -> Result<(), Failure> {
    let loaded = load(source)?;
    print!("{}", loaded.spec.to_toml());
    io::stdout().flush().map_err(|e| Failure::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Trace(args) => cmd_trace(args),
        Command::DumpConfig(source) => cmd_dump(source),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
