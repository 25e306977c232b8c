//! `jswq` subcommands. Each command is a pure function of the config file
//! and flags; output rows are gathered per seed and written in seed order.
//!
//! Exit codes: 0 pass, 1 violation or counterexample, 2 config error,
//! 3 input error, 4 instability refusal, 5 non-convergence, 6 premise failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::comparison::{
    for_each_profile, verify_theorem1_with, verify_theorem2_with, write_profile_rows, write_violations_csv,
    CheckOptions, ComparisonReport, SystemConfig, TRAJECTORY_HEADER,
};
use crate::config::{config_help, CompareMode, CsvFormat, ExperimentConfig, Overrides, RawConfig, CONFIG_ENV};
use crate::error::Error;
use crate::lemmas::run_lemma_suites;
use crate::loynes::{estimate_stationary_traced, LoynesResult};
use crate::processes::{generate, stability_check, InputModel, MarkSequence, Stability, RNG_ALGORITHM};
use crate::profile::SortedProfile;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_UNSTABLE: u8 = 4;
pub const EXIT_NOT_CONVERGED: u8 = 5;
pub const EXIT_PREMISE: u8 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "jswq",
    version,
    about = "Simulate and verify parallel queues under join-the-shortest-workload allocation",
    after_help = help_footer()
)]
pub struct Cli {
    /// Experiment config file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Run a single seed instead of [experiment] seeds.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides [experiment] horizon.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Overrides [experiment] jobs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Overrides [experiment] out.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Run every [system.*] on shared marks and write their trajectories.
    Simulate,
    /// Estimate the minimal stationary profile by Loynes's backward scheme.
    Loynes,
    /// Check the pathwise comparison between two coupled systems.
    Compare,
    /// Run the randomized ordering-lemma suites.
    VerifyLemmas,
}

fn help_footer() -> String {
    format!(
        "{}\nEXIT CODES: 0 pass, 1 violation/counterexample, 2 config, 3 input, 4 instability, 5 non-convergence, 6 premise\n",
        config_help()
    )
}

/// Where diagnostics and results go; lets tests capture both streams.
pub struct Io<'a> {
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
        Error::Input { .. } => EXIT_INPUT,
        Error::Unstable { .. } => EXIT_UNSTABLE,
        Error::Precondition(_) => EXIT_PREMISE,
    }
}

#[derive(Debug)]
enum Failure {
    Error(Error),
    Io(io::Error, PathBuf),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

trait IoContext<T> {
    fn at(self, path: &Path) -> Result<T, Failure>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn at(self, path: &Path) -> Result<T, Failure> {
        self.map_err(|e| Failure::Io(e, path.to_path_buf()))
    }
}

type CmdResult = Result<u8, Failure>;

pub fn run(cli: &Cli, io: &mut Io<'_>) -> u8 {
    let overrides = Overrides {
        seed: cli.seed,
        horizon: cli.horizon,
        jobs: cli.jobs,
        out: cli.out.clone(),
    };
    let loaded = match &cli.config {
        Some(path) => RawConfig::load(path),
        None => Ok(RawConfig::default()),
    }
    .and_then(|raw| ExperimentConfig::from_raw(raw, &overrides));
    let config = match loaded {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let result = match cli.command {
        Command::Simulate => cmd_simulate(&config, io),
        Command::Loynes => cmd_loynes(&config, io),
        Command::Compare => cmd_compare(&config, io),
        Command::VerifyLemmas => cmd_verify_lemmas(&config, io),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Error(e)) => {
            let _ = writeln!(io.stderr, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Io(e, path)) => {
            let _ = writeln!(io.stderr, "error: cannot write {}: {e}", path.display());
            EXIT_INPUT
        }
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
}

/// Runs `f` over the seeds on `jobs` threads, returning results in seed order.
fn per_seed<T: Send>(config: &ExperimentConfig, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    if config.jobs == 1 {
        return config.seeds.iter().map(|&s| f(s)).collect();
    }
    pool(config.jobs).install(|| config.seeds.par_iter().map(|&s| f(s)).collect())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path).at(path)?))
}

fn profile_field(p: &SortedProfile) -> String {
    p.as_slice().iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
}

const WIDE_HEADER: &str = "seed,system,step,total_workload,offered_wait,workloads";

fn simulate_seed(
    out: &mut dyn Write,
    model: &InputModel,
    seed: u64,
    horizon: usize,
    systems: &[(String, SystemConfig)],
    format: CsvFormat,
) -> Result<Vec<(f64, f64)>, Failure> {
    let marks = generate(model, seed, horizon)?;
    let mut means = Vec::new();
    for (name, system) in systems {
        let (mut total, mut offered) = (0.0, 0.0);
        for_each_profile::<Failure>(system, &marks, |step, p| {
            total += p.total_workload();
            offered += p.offered_wait();
            let written = match format {
                CsvFormat::Wide => writeln!(
                    out,
                    "{seed},{name},{step},{},{},{}",
                    p.total_workload(),
                    p.offered_wait(),
                    profile_field(p)
                ),
                CsvFormat::Long => write_profile_rows(out, seed, step, name, p),
            };
            written.map_err(|e| Failure::Io(e, "<output>".into()))
        })?;
        let n = (horizon + 1) as f64;
        means.push((total / n, offered / n));
    }
    Ok(means)
}

fn cmd_simulate(config: &ExperimentConfig, io: &mut Io<'_>) -> CmdResult {
    let model = config.model()?;
    let systems = config.systems()?;
    if systems.is_empty() {
        return Err(Error::config("[system.<name>] servers: no systems configured").into());
    }
    let header = match config.format {
        CsvFormat::Wide => WIDE_HEADER,
        CsvFormat::Long => TRAJECTORY_HEADER,
    };

    let mut file;
    let (sink, summary): (&mut dyn Write, &mut dyn Write) = match &config.out {
        Some(path) => {
            file = create(path)?;
            (&mut file, &mut *io.stdout)
        }
        None => (&mut *io.stdout, &mut *io.stderr),
    };
    let out_path = config.out.clone().unwrap_or_else(|| "<stdout>".into());
    writeln!(sink, "{header}").at(&out_path)?;

    let means: Vec<Vec<(f64, f64)>> = if config.jobs == 1 {
        let mut all = Vec::new();
        for &seed in &config.seeds {
            all.push(simulate_seed(
                sink,
                &model,
                seed,
                config.horizon,
                &systems,
                config.format,
            )?);
        }
        all
    } else {
        let chunks = per_seed(config, |seed| {
            let mut buf = Vec::new();
            simulate_seed(&mut buf, &model, seed, config.horizon, &systems, config.format).map(|m| (buf, m))
        });
        let mut all = Vec::new();
        for chunk in chunks {
            let (buf, m) = chunk?;
            sink.write_all(&buf).at(&out_path)?;
            all.push(m);
        }
        all
    };
    sink.flush().at(&out_path)?;

    writeln!(
        summary,
        "# model {model}; rng {RNG_ALGORITHM}; horizon {}",
        config.horizon
    )
    .at(&out_path)?;
    for (seed, per_system) in config.seeds.iter().zip(&means) {
        for ((name, _), (total, offered)) in systems.iter().zip(per_system) {
            writeln!(
                summary,
                "seed {seed} system {name}: mean total workload {total}, mean offered wait {offered}"
            )
            .at(&out_path)?;
        }
    }
    Ok(EXIT_OK)
}

fn stability_message(model: &InputModel, servers: usize) -> String {
    let (s, x) = (model.mean_sigma(), model.mean_xi());
    format!(
        "E[sigma] = {}{}, {servers} * E[xi] = {}{}",
        s.value,
        if s.estimated { " (estimated)" } else { "" },
        servers as f64 * x.value,
        if x.estimated { " (estimated)" } else { "" },
    )
}

type SeedRun = (LoynesResult, Vec<(usize, SortedProfile)>);

fn cmd_loynes(config: &ExperimentConfig, io: &mut Io<'_>) -> CmdResult {
    let model = config.model()?;
    let params = config.loynes()?;
    let effective = params.servers - params.rank + 1;
    let verdict = stability_check(&model, effective);
    if verdict != Stability::Stable {
        writeln!(
            io.stderr,
            "error: refusing to estimate a {} system: {}",
            verdict.as_str(),
            stability_message(&model, effective)
        )
        .at(Path::new("<stderr>"))?;
        return Ok(EXIT_UNSTABLE);
    }

    let want_snapshots = params.snapshots_out.is_some();
    let runs: Vec<Result<SeedRun, Error>> = per_seed(config, |seed| {
        let mut snaps = Vec::new();
        estimate_stationary_traced(&model, seed, params.servers, params.rank, &params.settings, |n, p| {
            if want_snapshots {
                snaps.push((n, p.clone()));
            }
        })
        .map(|r| (r, snaps))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;

    if let Some(path) = &params.snapshots_out {
        let mut f = create(path)?;
        writeln!(f, "seed,n,coordinate,value").at(path)?;
        for (seed, (_, snaps)) in config.seeds.iter().zip(&runs) {
            for (n, p) in snaps {
                for (i, w) in p.as_slice().iter().enumerate() {
                    writeln!(f, "{seed},{n},{},{w}", i + 1).at(path)?;
                }
            }
        }
        f.flush().at(path)?;
    }
    if let Some(path) = &config.out {
        let mut f = create(path)?;
        writeln!(
            f,
            "seed,converged,steps_used,last_increment,offered_wait,total_workload,workloads"
        )
        .at(path)?;
        for (seed, (r, _)) in config.seeds.iter().zip(&runs) {
            writeln!(
                f,
                "{seed},{},{},{},{},{},{}",
                r.converged,
                r.steps_used,
                r.last_increment,
                r.profile.offered_wait(),
                r.profile.total_workload(),
                profile_field(&r.profile)
            )
            .at(path)?;
        }
        f.flush().at(path)?;
    }

    let out = &mut *io.stdout;
    let o = Path::new("<stdout>");
    writeln!(
        out,
        "# model {model}; rng {RNG_ALGORITHM}; servers {} rank {}; {}",
        params.servers,
        params.rank,
        stability_message(&model, effective)
    )
    .at(o)?;
    if runs.len() <= 20 {
        for (seed, (r, _)) in config.seeds.iter().zip(&runs) {
            writeln!(
                out,
                "seed {seed}: profile {} steps_used {} last_increment {} converged {}",
                r.profile, r.steps_used, r.last_increment, r.converged
            )
            .at(o)?;
        }
    }
    let waits: Vec<f64> = runs.iter().map(|(r, _)| r.profile.offered_wait()).collect();
    let (mean, se) = mean_and_standard_error(&waits);
    let converged = runs.iter().filter(|(r, _)| r.converged).count();
    writeln!(out, "replications {} converged {converged}", runs.len()).at(o)?;
    writeln!(
        out,
        "mean offered wait {mean} (standard error {se}, 95% band [{}, {}])",
        mean - 1.96 * se,
        mean + 1.96 * se
    )
    .at(o)?;
    let totals: Vec<f64> = runs.iter().map(|(r, _)| r.profile.total_workload()).collect();
    writeln!(out, "mean total workload {}", mean_and_standard_error(&totals).0).at(o)?;
    Ok(if converged == runs.len() {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

/// Sample mean and its standard error (zero for a single sample).
pub fn mean_and_standard_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn cmd_compare(config: &ExperimentConfig, io: &mut Io<'_>) -> CmdResult {
    let model = config.model()?;
    let params = config.compare()?;
    let options = CheckOptions {
        fault_step: params.fault_step,
        ..Default::default()
    };
    if params.mode == CompareMode::Theorem2 {
        // Premise failures are reported before any simulation.
        let premise = crate::orderings::prec_p(&params.initial, &params.initial_tilde, params.rank, 0.0)?;
        if let Some(v) = premise.first_violation {
            writeln!(
                io.stderr,
                "error: premise failed: initial ≺_P initial_tilde violated ({} clause at index {}: {} > {})",
                v.clause, v.index, v.lhs, v.rhs
            )
            .at(Path::new("<stderr>"))?;
            return Ok(EXIT_PREMISE);
        }
    }

    let write_trajectories = params.trajectory_out.is_some() && config.horizon <= params.history_cap;
    let reports: Vec<Result<(ComparisonReport, Vec<u8>), Failure>> = per_seed(config, |seed| {
        let marks = generate(&model, seed, config.horizon)?;
        let (report, systems) = match params.mode {
            CompareMode::Theorem1 => (
                verify_theorem1_with(params.servers, params.fewer, &marks, &options)?,
                vec![
                    (format!("jsw-{}", params.servers), SystemConfig::jsw(params.servers)?),
                    (format!("jsw-{}", params.fewer), SystemConfig::jsw(params.fewer)?),
                ],
            ),
            CompareMode::Theorem2 => (
                verify_theorem2_with(params.rank, &params.initial, &params.initial_tilde, &marks, &options)?,
                vec![
                    (
                        format!("jsw-{}", params.servers),
                        SystemConfig::new(params.servers, 1, params.initial.clone())?,
                    ),
                    (
                        format!("rank{}-{}", params.rank, params.servers),
                        SystemConfig::new(params.servers, params.rank, params.initial_tilde.clone())?,
                    ),
                ],
            ),
        };
        let mut rows = Vec::new();
        if write_trajectories {
            trajectory_rows(&mut rows, &marks, &systems)?;
        }
        Ok((report, rows))
    });

    let mut merged = ComparisonReport::empty();
    let mut trajectory_bytes = Vec::new();
    for r in reports {
        let (report, rows) = r?;
        merged = merged.merge(report);
        trajectory_bytes.extend(rows);
    }

    if let Some(path) = &params.trajectory_out {
        if write_trajectories {
            let mut f = create(path)?;
            writeln!(f, "{TRAJECTORY_HEADER}").at(path)?;
            f.write_all(&trajectory_bytes).at(path)?;
            f.flush().at(path)?;
        } else {
            writeln!(
                io.stderr,
                "warning: horizon {} exceeds history_cap {}; trajectories not written",
                config.horizon, params.history_cap
            )
            .at(Path::new("<stderr>"))?;
        }
    }

    let (sink, summary): (Box<dyn Write + '_>, &mut dyn Write) = match &config.out {
        Some(path) => (Box::new(create(path)?), &mut *io.stdout),
        None => (Box::new(&mut *io.stdout), &mut *io.stderr),
    };
    let out_path = config.out.clone().unwrap_or_else(|| "<stdout>".into());
    let mut sink = sink;
    write_violations_csv(&mut sink, &merged).at(&out_path)?;
    sink.flush().at(&out_path)?;
    drop(sink);

    let o = Path::new("<summary>");
    let what = match params.mode {
        CompareMode::Theorem1 => format!("jsw-{} vs jsw-{}", params.servers, params.fewer),
        CompareMode::Theorem2 => format!("jsw-{} vs rank{}-{}", params.servers, params.rank, params.servers),
    };
    writeln!(
        summary,
        "# model {model}; rng {RNG_ALGORITHM}; {what}; seeds {}",
        config.seeds.len()
    )
    .at(o)?;
    writeln!(
        summary,
        "steps checked {} violations {}",
        merged.steps_checked,
        merged.violations.len()
    )
    .at(o)?;
    for s in &merged.systems {
        writeln!(
            summary,
            "{}: mean total workload {} mean offered wait {}",
            s.label,
            s.mean_total_workload(),
            s.mean_offered_wait()
        )
        .at(o)?;
    }
    writeln!(summary, "{}", if merged.pass { "PASS" } else { "FAIL" }).at(o)?;
    Ok(if merged.pass { EXIT_OK } else { EXIT_VIOLATION })
}

fn trajectory_rows(out: &mut Vec<u8>, marks: &MarkSequence, systems: &[(String, SystemConfig)]) -> Result<(), Failure> {
    for (name, system) in systems {
        for_each_profile::<Failure>(system, marks, |step, p| {
            write_profile_rows(out, marks.seed(), step, name, p).map_err(|e| Failure::Io(e, "<buffer>".into()))
        })?;
    }
    Ok(())
}

fn cmd_verify_lemmas(config: &ExperimentConfig, io: &mut Io<'_>) -> CmdResult {
    let outcomes = run_lemma_suites(&config.lemmas);
    let o = Path::new("<stdout>");
    let s = &config.lemmas;
    writeln!(
        io.stdout,
        "# lemma suites: {} instances, dimensions {}..={}, seed {}",
        s.instances, s.min_dim, s.max_dim, s.seed
    )
    .at(o)?;
    for outcome in &outcomes {
        writeln!(
            io.stdout,
            "{:<20} instances {:>8} counterexamples {}",
            outcome.name, outcome.instances, outcome.counterexamples
        )
        .at(o)?;
        for t in &outcome.transcripts {
            writeln!(io.stdout, "  counterexample: {t}").at(o)?;
        }
    }
    if let Some(path) = &config.out {
        let mut f = create(path)?;
        writeln!(f, "lemma,instances,counterexamples").at(path)?;
        for outcome in &outcomes {
            writeln!(f, "{},{},{}", outcome.name, outcome.instances, outcome.counterexamples).at(path)?;
        }
        f.flush().at(path)?;
    }
    let clean = outcomes.iter().all(|o| o.counterexamples == 0);
    Ok(if clean { EXIT_OK } else { EXIT_VIOLATION })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_error() {
        let (m, se) = mean_and_standard_error(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_standard_error(&[4.0]), (4.0, 0.0));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Precondition("x".into())), EXIT_PREMISE);
        assert_eq!(
            exit_code(&Error::Input {
                path: "p".into(),
                message: "m".into()
            }),
            EXIT_INPUT
        );
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["jswq", "compare", "--seed", "4", "--jobs", "2"]).unwrap();
        assert!(matches!(cli.command, Command::Compare));
        assert_eq!((cli.seed, cli.jobs), (Some(4), Some(2)));
    }
}
