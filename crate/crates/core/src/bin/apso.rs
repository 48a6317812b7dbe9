use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use apso::bench::{self, BenchConfig, ParamSpec};
use apso::jobshop::ScheduleBuilder;
use apso::meta::{self, GaConfig};
use apso::orlib::{self, LoadError};
use apso::{ConfigError, PsoConfig, PsoError};

#[derive(Parser)]
#[command(
    name = "apso",
    version,
    about = "Particle swarm job-shop solver and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the best schedule.
    Solve {
        instance: PathBuf,
        /// Preset label (kennedy, pedersen, apso) or `a1,a2,w,b`.
        #[arg(long, default_value = "kennedy")]
        params: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        swarm: SwarmArgs,
    },
    /// Run seeded benchmark sweeps over a suite of instances.
    Bench {
        suite: PathBuf,
        /// Parameter sets to compare; repeat the flag for several.
        #[arg(long = "params", default_values_t = ["kennedy".to_string(), "pedersen".to_string(), "apso".to_string()])]
        params: Vec<String>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Base seed; run r uses seed + r.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to these instance names (comma-separated).
        #[arg(long, value_delimiter = ',')]
        instances: Vec<String>,
        /// 20 runs per row instead of 100.
        #[arg(long)]
        quick: bool,
        /// Write zero for per-run wall-clock time so reports are reproducible.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        swarm: SwarmArgs,
    },
    /// Tune the swarm parameters with the genetic algorithm.
    Tune {
        suite: PathBuf,
        #[arg(long, default_value_t = 50)]
        population: usize,
        #[arg(long, default_value_t = 100)]
        generations: usize,
        /// Swarm runs per training instance per fitness evaluation.
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0.10)]
        mutation: f64,
        #[arg(long, value_delimiter = ',', default_values_t = ["LA02".to_string(), "LA18".to_string(), "LA20".to_string()])]
        train: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start from a purely random population.
        #[arg(long)]
        no_kennedy_seed: bool,
        /// 10 chromosomes, 10 generations, k = 3, trained on LA02.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        swarm: SwarmArgs,
    },
    /// Print an instance summary.
    Inspect { instance: PathBuf },
}

#[derive(Args)]
struct SwarmArgs {
    #[arg(long, default_value_t = 50)]
    particles: usize,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    /// Worker threads (0 = one per core).
    #[arg(long, visible_alias = "parallelism", default_value_t = 0)]
    jobs: usize,
    /// Schedule builder behind the objective.
    #[arg(long, value_enum, default_value_t = Decoder::GapFilling)]
    decoder: Decoder,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Decoder {
    SemiActive,
    GapFilling,
}

impl From<Decoder> for ScheduleBuilder {
    fn from(d: Decoder) -> Self {
        match d {
            Decoder::SemiActive => ScheduleBuilder::SemiActive,
            Decoder::GapFilling => ScheduleBuilder::GapFilling,
        }
    }
}

impl SwarmArgs {
    fn pso(&self, seed: u64) -> PsoConfig {
        PsoConfig {
            n_particles: self.particles,
            n_iterations: self.iterations,
            seed,
            ..PsoConfig::default()
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

enum Failure {
    Config(String),
    Parse(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Parse(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => Failure::Config(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Pso(PsoError::NumericalFault(_)) => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<PsoError> for Failure {
    fn from(e: PsoError) -> Self {
        ConfigError::from(e).into()
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn solve(instance: &Path, params: &str, seed: u64, swarm: &SwarmArgs) -> Result<(), Failure> {
    let spec = ParamSpec::parse(params)?;
    let record = orlib::load_instance(instance)?;
    let pso = swarm.pso(seed);
    let (schedule, result) =
        bench::solve(&record.instance, &spec.params, &pso, swarm.decoder.into())?;

    let mut out = String::new();
    let _ = writeln!(out, "instance  {}", record.name);
    let _ = writeln!(
        out,
        "params    {} {{alpha1={}, alpha2={}, omega={}, beta={}}}",
        spec.label, spec.params.alpha1, spec.params.alpha2, spec.params.omega, spec.params.beta
    );
    let _ = writeln!(
        out,
        "seed      {seed}  particles {}  iterations {}  decoder {}",
        pso.n_particles,
        pso.n_iterations,
        ScheduleBuilder::from(swarm.decoder).name()
    );
    let _ = writeln!(out, "makespan  {}", schedule.makespan);
    if let Some(bk) = record.best_known {
        let _ = writeln!(out, "best-known {bk}");
    }
    for (m, slots) in schedule
        .machine_sequences(&record.instance)
        .iter()
        .enumerate()
    {
        let _ = write!(out, "M{m:<3}");
        for s in slots {
            let _ = write!(out, " J{}.{}@{}", s.job, s.index, s.start);
        }
        out.push('\n');
    }
    debug_assert_eq!(schedule.makespan as f64, result.best_value);
    print!("{out}");
    Ok(())
}

fn select(
    suite: Vec<orlib::InstanceRecord>,
    names: &[String],
) -> Result<Vec<orlib::InstanceRecord>, Failure> {
    if names.is_empty() {
        return Ok(suite);
    }
    names
        .iter()
        .map(|n| {
            suite
                .iter()
                .find(|r| r.name.eq_ignore_ascii_case(n))
                .cloned()
                .ok_or_else(|| Failure::Config(format!("instance {n} not found in suite")))
        })
        .collect()
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

#[allow(clippy::too_many_arguments)]
fn bench(
    suite: &Path,
    params: &[String],
    runs: usize,
    seed: u64,
    instances: &[String],
    quick: bool,
    no_timing: bool,
    output: &OutputArgs,
    swarm: &SwarmArgs,
) -> Result<(), Failure> {
    let sets = params
        .iter()
        .map(|p| ParamSpec::parse(p))
        .collect::<Result<Vec<_>, _>>()?;
    let records = select(orlib::load_suite(suite)?, instances)?;
    let config = BenchConfig {
        n_runs: if quick {
            BenchConfig::quick().n_runs
        } else {
            runs
        },
        base_seed: seed,
        pso: swarm.pso(seed),
        timing: !no_timing,
        builder: swarm.decoder.into(),
    };
    let report = bench::with_threads(swarm.jobs, || {
        bench::run_benchmark(&records, &sets, &config)
    })?;

    let rendered = match output.format {
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &output.out {
        Some(path) => {
            write_file(path, &rendered)?;
            write_file(&sibling(path, ".runs.csv"), &report.runs_csv())?;
            if output.format != Format::Table {
                print!("{}", report.to_table());
            } else {
                print!("{rendered}");
            }
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn tune(
    suite: &Path,
    population: usize,
    generations: usize,
    k: usize,
    mutation: f64,
    train: &[String],
    seed: u64,
    no_kennedy_seed: bool,
    quick: bool,
    output: &OutputArgs,
    swarm: &SwarmArgs,
) -> Result<(), Failure> {
    let ga = if quick {
        GaConfig {
            seed,
            seed_kennedy: !no_kennedy_seed,
            mutation_prob: mutation,
            builder: swarm.decoder.into(),
            ..GaConfig::quick()
        }
    } else {
        GaConfig {
            population_size: population,
            n_generations: generations,
            k_runs: k,
            mutation_prob: mutation,
            seed,
            training_instances: train.to_vec(),
            seed_kennedy: !no_kennedy_seed,
            builder: swarm.decoder.into(),
            ..GaConfig::default()
        }
    };
    ga.validate()?;
    let pso = swarm.pso(0);
    pso.validate()?;
    let records = orlib::load_suite(suite)?;

    let result = bench::with_threads(swarm.jobs, || {
        meta::run_meta_with(&ga, &pso, &records, |generation, fitness, params| {
            eprintln!(
                "generation {:>4}  best fitness {:.3}  {{{:.6}, {:.6}, {:.6}, {:.6}}}",
                generation + 1,
                fitness,
                params.alpha1,
                params.alpha2,
                params.omega,
                params.beta
            );
        })
    })?;

    let json = serde_json::json!({ "ga": ga, "pso": pso, "result": result });
    let json = serde_json::to_string_pretty(&json).expect("serializable");
    let mut summary = String::new();
    let p = result.best_params;
    let _ = writeln!(
        summary,
        "best parameters  alpha1={} alpha2={} omega={} beta={}",
        p.alpha1, p.alpha2, p.omega, p.beta
    );
    let _ = writeln!(summary, "best fitness     {:.3}", result.best_fitness);
    let _ = writeln!(
        summary,
        "evaluations      {} chromosomes, {} swarm runs",
        result.fitness_evaluations, result.pso_runs
    );
    let history: Vec<String> = result.history.iter().map(|f| format!("{f:.3}")).collect();
    let _ = writeln!(summary, "history          {}", history.join(" "));

    let rendered = match output.format {
        Format::Json => json.clone(),
        Format::Table => summary.clone(),
        Format::Csv => {
            let mut csv = String::from("generation,best_fitness\n");
            for (g, f) in result.history.iter().enumerate() {
                let _ = writeln!(csv, "{},{f}", g + 1);
            }
            csv
        }
    };
    match &output.out {
        Some(path) => {
            write_file(path, &rendered)?;
            print!("{summary}");
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

fn inspect(instance: &Path) -> Result<(), Failure> {
    let record = orlib::load_instance(instance)?;
    let inst = &record.instance;
    let jobs = inst.job_durations();
    let loads = inst.machine_loads();
    println!("instance     {}", record.name);
    println!(
        "size         {} jobs × {} machines",
        inst.n_jobs(),
        inst.n_machines()
    );
    for (j, route) in inst.jobs().iter().enumerate() {
        let ops: Vec<String> = route
            .iter()
            .map(|op| format!("M{}:{}", op.machine, op.duration))
            .collect();
        println!("J{j:<3} {:>6}  {}", jobs[j], ops.join(" "));
    }
    println!(
        "lower bound  {} (longest job {}, busiest machine {})",
        inst.lower_bound(),
        jobs.iter().max().copied().unwrap_or(0),
        loads.iter().max().copied().unwrap_or(0)
    );
    match record.best_known {
        Some(bk) => println!("best-known   {bk}"),
        None => println!("best-known   -"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            instance,
            params,
            seed,
            swarm,
        } => solve(&instance, &params, seed, &swarm),
        Command::Bench {
            suite,
            params,
            runs,
            seed,
            instances,
            quick,
            no_timing,
            output,
            swarm,
        } => bench(
            &suite, &params, runs, seed, &instances, quick, no_timing, &output, &swarm,
        ),
        Command::Tune {
            suite,
            population,
            generations,
            k,
            mutation,
            train,
            seed,
            no_kennedy_seed,
            quick,
            output,
            swarm,
        } => tune(
            &suite,
            population,
            generations,
            k,
            mutation,
            &train,
            seed,
            no_kennedy_seed,
            quick,
            &output,
            &swarm,
        ),
        Command::Inspect { instance } => inspect(&instance),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
