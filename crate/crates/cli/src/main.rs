//! Command-line front end for the Calogero-Moser toolkit.

mod commands;
mod error;
mod job;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::job::{split_list, JobSpec};

#[derive(Parser, Debug)]
#[command(name = "calogero", version, about = "Root-type Calogero-Moser solver and analysis tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    job: JobArgs,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Roots, simple roots, additivity table size and diagram automorphisms.
    Roots,
    /// Characteristic polynomial of W(t) with exact rational coefficients.
    Charpoly,
    /// Discriminant in t and its factorization over Q.
    Discriminant,
    /// Indicator factor of the discriminant and its sign table.
    Indicator,
    /// Candidate positions at a single time.
    Solve,
    /// Sampled trajectory as CSV.
    Trajectory,
    /// Dominant solutions of a multiset of root values.
    Match,
    /// Search for inner-product multiset collisions.
    Search,
    /// Check a pair of positions for a multiset collision across orbits.
    VerifyCounterexample,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Roots => "roots",
            Command::Charpoly => "charpoly",
            Command::Discriminant => "discriminant",
            Command::Indicator => "indicator",
            Command::Solve => "solve",
            Command::Trajectory => "trajectory",
            Command::Match => "match",
            Command::Search => "search",
            Command::VerifyCounterexample => "verify-counterexample",
        }
    }

    /// Fields a user may set for this subcommand.
    fn accepts(self, field: &str) -> bool {
        const COMMON: [&str; 6] = ["command", "preset", "type", "format", "output", "threads"];
        if COMMON.contains(&field) {
            return true;
        }
        let extra: &[&str] = match self {
            Command::Roots => &[],
            Command::Charpoly | Command::Discriminant => &["q0", "p0"],
            Command::Indicator => &["q0", "p0", "t0", "t1", "steps", "cluster_tol", "match_tol"],
            Command::Solve => &["q0", "p0", "t", "cluster_tol", "match_tol", "unique"],
            Command::Trajectory => &["q0", "p0", "t0", "t1", "steps", "method", "cluster_tol", "match_tol"],
            Command::Match => &["q0", "multiset", "unique"],
            Command::Search => &["bound", "shards", "resume"],
            Command::VerifyCounterexample => &["q0", "q2"],
        };
        extra.contains(&field)
    }
}

#[derive(Args, Debug, Default)]
struct JobArgs {
    /// Root system label, e.g. A2, D4, E6.
    #[arg(long = "type", global = true)]
    system: Option<String>,
    /// Built-in data set (a2-paper, a2-literal, a5-paper).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// JSON job file; flags take precedence over it.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Initial position, comma-separated rationals.
    #[arg(long, global = true, allow_hyphen_values = true)]
    q0: Option<String>,
    /// Initial momentum, comma-separated rationals.
    #[arg(long, global = true, allow_hyphen_values = true)]
    p0: Option<String>,
    /// Second position for verify-counterexample.
    #[arg(long, global = true, allow_hyphen_values = true)]
    q2: Option<String>,
    /// Time for solve.
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<String>,
    /// Start of the time window.
    #[arg(long, global = true, allow_hyphen_values = true)]
    t0: Option<String>,
    /// End of the time window.
    #[arg(long, global = true, allow_hyphen_values = true)]
    t1: Option<String>,
    /// Number of samples in the window.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Trajectory method: lax, ode or classical.
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    cluster_tol: Option<f64>,
    #[arg(long, global = true)]
    match_tol: Option<f64>,
    /// Root values for match, comma-separated rationals.
    #[arg(long, global = true, allow_hyphen_values = true)]
    multiset: Option<String>,
    /// Fail with exit code 3 unless the answer is unique up to automorphism.
    #[arg(long, global = true)]
    unique: bool,
    /// Output format: json, csv or text.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the result here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Search bound on coordinates (type E: on simple-root values).
    #[arg(long, global = true)]
    bound: Option<i64>,
    /// Only process these shards (first coordinates), comma-separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    shards: Option<String>,
    /// Checkpoint directory; finished shards found there are reused.
    #[arg(long, global = true)]
    resume: Option<PathBuf>,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

impl JobArgs {
    fn to_spec(&self) -> Result<JobSpec, CliError> {
        let shards = self
            .shards
            .as_deref()
            .map(|s| {
                split_list(s)
                    .iter()
                    .map(|x| x.parse::<i64>().map_err(|_| CliError::invalid(format!("bad shard {x:?}"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Ok(JobSpec {
            command: None,
            preset: self.preset.clone(),
            system: self.system.clone(),
            q0: self.q0.as_deref().map(split_list),
            p0: self.p0.as_deref().map(split_list),
            q2: self.q2.as_deref().map(split_list),
            t: self.t.clone(),
            t0: self.t0.clone(),
            t1: self.t1.clone(),
            steps: self.steps,
            method: self.method.clone(),
            cluster_tol: self.cluster_tol,
            match_tol: self.match_tol,
            multiset: self.multiset.as_deref().map(split_list),
            unique: self.unique.then_some(true),
            format: self.format.clone(),
            output: self.output.clone(),
            bound: self.bound,
            shards,
            resume: self.resume.clone(),
            threads: self.threads,
        })
    }
}

fn resolve(cli: &Cli) -> Result<JobSpec, CliError> {
    let flags = cli.job.to_spec()?;
    let file = match &cli.job.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<JobSpec>(&text)
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?
        }
        None => JobSpec::default(),
    };
    let user = file.overlay(&flags);
    let name = cli.command.name();
    if let Some(c) = &user.command {
        if c != name {
            return Err(CliError::invalid(format!("job file is for {c:?}, not {name:?}")));
        }
    }
    if let Some(bad) = user.set_fields().into_iter().find(|f| !cli.command.accepts(f)) {
        return Err(CliError::invalid(format!("{bad} does not apply to {name}")));
    }
    let base = match &user.preset {
        Some(p) => JobSpec::from_preset(p)?,
        None => JobSpec::default(),
    };
    let mut job = base.overlay(&user);
    job.command = Some(name.to_string());
    Ok(job)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let job = resolve(cli)?;
    if let Some(n) = job.threads {
        if n == 0 {
            return Err(CliError::invalid("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::new(error::Kind::Failed, e.to_string()))?;
    }
    let out = match cli.command {
        Command::Roots => commands::roots(&job)?,
        Command::Charpoly => commands::charpoly(&job)?,
        Command::Discriminant => commands::discriminant(&job)?,
        Command::Indicator => commands::indicator(&job)?,
        Command::Solve => commands::solve(&job)?,
        Command::Trajectory => commands::trajectory(&job)?,
        Command::Match => commands::matching(&job)?,
        Command::Search => commands::search(&job)?,
        Command::VerifyCounterexample => commands::verify(&job)?,
    };
    match &job.output {
        Some(path) => std::fs::write(path, out)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::invalid(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
