use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use missing_ensemble::ensemble::{EnsembleConfig, EnsembleModel};
use missing_ensemble::fuzzy_artmap::FuzzyArtmapConfig;
use missing_ensemble::ga::GaConfig;
use missing_ensemble::harness::{
    stream_eval, synth_generate, Baseline, MissingMode, MissingnessSpec, StreamConfig, SynthKind, SynthParams,
    Tolerance,
};
use missing_ensemble::mlp::TrainConfig;
use missing_ensemble::persist::{load_baseline, load_ensemble, load_json, save_baseline, save_ensemble, save_json};
use missing_ensemble::{Dataset, Task};

/// Feature-subset ensembles for prediction with missing inputs, with an
/// autoencoder/GA imputation baseline for comparison.
#[derive(Parser)]
#[command(name = "missing-ensemble", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV, plus its generator settings as JSON.
    Synth(SynthArgs),
    /// Train the ensemble and the imputation baseline on complete data.
    Train(TrainArgs),
    /// Fill missing cells of a CSV with the baseline's autoencoder and GA.
    Impute(ImputeArgs),
    /// Replay a test CSV one instance at a time and write a run report.
    Stream(StreamArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Classification,
    Regression,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Classification => Task::Classification,
            TaskArg::Regression => Task::Regression,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MissingModeArg {
    Mcar,
    Mar,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: TaskArg,
    #[arg(long, default_value_t = 6000)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; the generator settings go to `<out>.params.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    /// Comma-separated target columns (default: the last column).
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<String>>,
}

impl DataArgs {
    fn load(&self) -> anyhow::Result<Dataset> {
        Ok(Dataset::from_csv(open(&self.data)?, self.task.into(), self.targets.as_deref())?)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Features seen by each ensemble member.
    #[arg(long)]
    n_avail: usize,
    /// ARTMAP vigilance (classification).
    #[arg(long, default_value_t = 0.75)]
    vigilance: f64,
    /// Hidden units per member network (regression).
    #[arg(long, default_value_t = 5)]
    hidden: usize,
    /// Autoencoder hidden units (default: one fewer than the feature count).
    #[arg(long)]
    ae_hidden: Option<usize>,
    /// Training cycles for every network.
    #[arg(long, default_value_t = 1200)]
    cycles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Share of rows used for training; the rest is the validation set.
    #[arg(long, default_value_t = 0.5)]
    train_fraction: f64,
    /// Output directory; receives `ensemble/` and `baseline/`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ImputeArgs {
    /// Baseline directory written by `train`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<String>>,
    #[arg(long, default_value_t = 20)]
    population: usize,
    #[arg(long, default_value_t = 25)]
    generations: usize,
    #[arg(long, default_value_t = 0.1)]
    crossover: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct StreamArgs {
    /// Ensemble directory written by `train`.
    #[arg(long)]
    ensemble: PathBuf,
    /// Baseline directory; when given the baseline is replayed as well.
    #[arg(long)]
    baseline: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "mcar")]
    missing_mode: MissingModeArg,
    /// Features removed per instance (mcar).
    #[arg(long, default_value_t = 1)]
    missing_count: usize,
    /// Driver feature index (mar).
    #[arg(long)]
    driver: Option<usize>,
    /// Driver reading below which the victim goes missing (mar).
    #[arg(long)]
    threshold: Option<f64>,
    /// Feature that goes missing (mar).
    #[arg(long)]
    victim: Option<usize>,
    /// Relative tolerance for regression scoring.
    #[arg(long, default_value_t = 0.2)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generator settings to echo into the report.
    #[arg(long)]
    generator: Option<PathBuf>,
    /// JSON report destination.
    #[arg(long)]
    report: PathBuf,
}

// File errors keep the library's I/O category so they map to its exit code.
fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let file = File::open(path).map_err(missing_ensemble::Error::from);
    Ok(BufReader::new(file.with_context(|| format!("opening {}", path.display()))?))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).map_err(missing_ensemble::Error::from);
    Ok(BufWriter::new(file.with_context(|| format!("creating {}", path.display()))?))
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let kind = match args.kind {
        TaskArg::Classification => SynthKind::Classification,
        TaskArg::Regression => SynthKind::Regression,
    };
    let (data, params) = synth_generate(kind, args.rows, args.seed);
    data.to_csv(create(&args.out)?)?;
    save_json(&params_path(&args.out), &params)?;
    println!("wrote {} rows to {} (targets: {})", data.len(), args.out.display(), data.target_names.join(","));
    Ok(())
}

fn params_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".params.json");
    PathBuf::from(name)
}

fn train(args: TrainArgs) -> anyhow::Result<()> {
    let data = args.data.load()?;
    let (train, valid) = data.split(args.train_fraction, args.seed)?;
    let n = data.n_features();
    let ae_hidden = args.ae_hidden.unwrap_or(n.saturating_sub(1));
    let tc = TrainConfig { max_cycles: args.cycles, seed: args.seed, ..Default::default() };
    let artmap = FuzzyArtmapConfig { vigilance: args.vigilance, ..Default::default() };
    let config = match data.task {
        Task::Classification => EnsembleConfig {
            seed: args.seed,
            ..EnsembleConfig::classification(args.n_avail, artmap.clone())
        },
        Task::Regression => EnsembleConfig::regression(args.n_avail, args.hidden, tc.clone()),
    };
    let ensemble = EnsembleModel::train(&train, &valid, &config)?;
    let baseline = match data.task {
        Task::Classification => Baseline::train_classification(&train, &valid, artmap, ae_hidden, &tc)?,
        Task::Regression => Baseline::train_regression(&train, &valid, args.hidden, &tc, ae_hidden, &tc)?,
    };
    save_ensemble(&args.out.join("ensemble"), &ensemble)?;
    save_baseline(&args.out.join("baseline"), &baseline)?;
    println!(
        "trained {} members on {} rows ({} validation); committee size {}",
        ensemble.member_count(),
        train.len(),
        valid.len(),
        ensemble.committee_size.map_or("n/a".to_string(), |k| k.to_string())
    );
    Ok(())
}

fn impute(args: ImputeArgs) -> anyhow::Result<()> {
    let baseline = load_baseline(&args.model)?;
    let data = Dataset::from_csv(open(&args.input)?, args.task.into(), args.targets.as_deref())?;
    let mut rows = Vec::with_capacity(data.len());
    let mut objectives = Vec::with_capacity(data.len());
    for (index, inst) in data.instances.iter().enumerate() {
        let ga = GaConfig {
            population_size: args.population,
            generations: args.generations,
            crossover_rate: args.crossover,
            seed: args.seed.wrapping_add(index as u64),
            ..Default::default()
        };
        let out = baseline.imputer.impute(inst, &ga)?;
        rows.push(out.instance);
        objectives.push(out.objective);
    }
    data.with_instances(rows)
        .to_csv_with_extra(create(&args.out)?, Some(("objective", &objectives)))?;
    println!("imputed {} rows into {}", data.len(), args.out.display());
    Ok(())
}

fn stream(args: StreamArgs) -> anyhow::Result<()> {
    let ensemble = load_ensemble(&args.ensemble)?;
    let baseline = args.baseline.as_deref().map(load_baseline).transpose()?;
    let test = args.data.load()?;
    let mode = match args.missing_mode {
        MissingModeArg::Mcar => MissingMode::Mcar { count: args.missing_count },
        MissingModeArg::Mar => MissingMode::Mar {
            driver: args.driver.context("--missing-mode mar needs --driver")?,
            threshold: args.threshold.context("--missing-mode mar needs --threshold")?,
            victim: args.victim.context("--missing-mode mar needs --victim")?,
        },
    };
    let mut config = StreamConfig::new(MissingnessSpec { mode, seed: args.seed });
    config.tolerance = Tolerance { rel_tol: args.tolerance, ..Default::default() };
    config.ga.seed = args.seed;
    let mut report = stream_eval(&ensemble, baseline.as_ref(), &test, &config)?;
    if let Some(path) = &args.generator {
        report.generator = Some(load_json::<SynthParams>(path)?);
    }
    save_json(&args.report, &report)?;
    print!("{}", report.summary_table());
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<missing_ensemble::Error>())
        .map_or(1, |e| e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train(a),
        Command::Impute(a) => impute(a),
        Command::Stream(a) => stream(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
