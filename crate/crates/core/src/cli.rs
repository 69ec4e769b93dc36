//! The `uamcts` command-line driver.
//!
//! Every subcommand reads an optional JSON config, applies flag overrides on
//! top, writes the effective config to `<out>/config.json` and then runs.
//! Passing that file back with `--config` reproduces the run.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bench::{
    format_table, mean_std, run_bench, run_sweep, summary_rows, variance_scatter, write_scatter_csv, write_summary_csv,
    write_sweep_csv, BenchConfig, Execution, Method, ScatterKind, SweepParam,
};
use crate::gp::{
    fit_hyperparams, read_dataset_csv, read_model_json, write_dataset_csv, write_model_json, GpModel, KernelParams,
    MdeKind, SearchSpace,
};
use crate::pouring::{
    gen_dataset, run_episode, write_trace_jsonl, ActionGrid, EpisodeConfig, EpisodeTrace, GoalSpec, GpDynamics,
    GroundTruth, PerfectModel,
};
use crate::rng::stream;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "uamcts", version, about = "Uncertainty-aware MCTS for a simulated pouring task")]
pub struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "uamcts-out")]
    pub out: PathBuf,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override any config key, e.g. `--set search.tau=0.2` (value parsed as JSON).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample transitions from the simulated ground truth.
    GenData(GenDataArgs),
    /// Fit a GP model to a dataset.
    Fit(FitArgs),
    /// Run one planning episode.
    Plan(PlanArgs),
    /// Run the full benchmark.
    Bench(BenchArgs),
    /// Run the benchmark once per value of a search parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Number of transitions.
    #[arg(long)]
    pub n: Option<usize>,
    /// Flow gain of the simulated ground truth.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Tilt below which nothing pours [rad].
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// Observation noise sd [%].
    #[arg(long)]
    pub obs_noise_sd: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Training dataset CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Held-out dataset CSV.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Select hyperparameters by marginal likelihood.
    #[arg(long)]
    pub fit_hyper: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Iteration budget per search.
    #[arg(long)]
    pub iterations: Option<u64>,
    /// UCT exploration constant.
    #[arg(long)]
    pub c_uct: Option<f64>,
    /// Softmax temperature of the selection discount.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Expansion sigmoid steepness.
    #[arg(long)]
    pub h: Option<f64>,
    /// Inflation factor.
    #[arg(long)]
    pub w: Option<f64>,
    /// N_max.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Reverse the expansion keep test (favours high-MDE children).
    #[arg(long)]
    pub literal_expansion: bool,
    /// `goal_band` or `literal`.
    #[arg(long)]
    pub reward_rule: Option<String>,
    /// `variance` or `std`.
    #[arg(long)]
    pub mde_kind: Option<String>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Model JSON written by `fit`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Target fill level [%].
    #[arg(long)]
    pub x_ref: Option<f64>,
    /// Goal tolerance [%].
    #[arg(long)]
    pub tol: Option<f64>,
    /// One of MCTS, MCTS-inflated, UA-MCTS-1.
    #[arg(long)]
    pub method: Option<String>,
    /// Plan with the ground truth as the model and noise-free observations.
    #[arg(long)]
    pub perfect: bool,
    /// Starting level [%].
    #[arg(long)]
    pub initial_level: Option<f64>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Trials per model and method.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated model sizes; smaller sets are drawn from the largest.
    #[arg(long, value_delimiter = ',')]
    pub dataset_sizes: Option<Vec<usize>>,
    /// Held-out points for test MSE.
    #[arg(long)]
    pub test_size: Option<usize>,
    /// Comma-separated method names.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Goal tolerance [%].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Lower end of the sampled targets.
    #[arg(long)]
    pub x_ref_min: Option<f64>,
    /// Upper end of the sampled targets.
    #[arg(long)]
    pub x_ref_max: Option<f64>,
    /// Starting level [%].
    #[arg(long)]
    pub initial_level: Option<f64>,
    /// Select hyperparameters by marginal likelihood.
    #[arg(long)]
    pub fit_hyper: bool,
    /// Grid points per axis in the scatter export.
    #[arg(long)]
    pub scatter_resolution: Option<usize>,
    /// Level at which the scatter grid is evaluated.
    #[arg(long)]
    pub scatter_level: Option<f64>,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// h, tau or w.
    #[arg(long)]
    pub param: Option<String>,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    #[command(flatten)]
    pub bench: BenchArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenDataConfig {
    pub seed: u64,
    pub n: usize,
    pub ground_truth: GroundTruth,
    pub grid: ActionGrid,
}

impl Default for GenDataConfig {
    fn default() -> Self {
        GenDataConfig { seed: 0, n: 40, ground_truth: GroundTruth::default(), grid: ActionGrid::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub seed: u64,
    pub data: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub fit_hyper: bool,
    pub kernel: KernelParams,
    pub search_space: SearchSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanConfig {
    pub seed: u64,
    pub model: Option<PathBuf>,
    pub perfect: bool,
    pub x_ref: Option<f64>,
    pub tol: f64,
    pub method: Method,
    pub episode: EpisodeConfig,
    pub ground_truth: GroundTruth,
    pub mde_kind: MdeKind,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            seed: 0,
            model: None,
            perfect: false,
            x_ref: None,
            tol: 2.5,
            method: Method::UaMcts1,
            episode: EpisodeConfig::default(),
            ground_truth: GroundTruth::default(),
            mde_kind: MdeKind::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub param: Option<SweepParam>,
    pub values: Vec<f64>,
    pub bench: BenchConfig,
}

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    ExperimentFailure,
}

/// Exit code for an error: 2 for usage and configuration problems, 1 otherwise.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::Config(_) | Error::NotImplemented(_) => 2,
        _ => 1,
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::ExperimentFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    let mut ov = Overrides::default();
    ov.put("seed", cli.seed);
    match cli.command {
        Command::GenData(a) => {
            ov.put("n", a.n);
            ov.put("ground_truth.kappa", a.kappa);
            ov.put("ground_truth.alpha0", a.alpha0);
            ov.put("ground_truth.obs_noise_sd", a.obs_noise_sd);
            ov.extend_set(&cli.set)?;
            let cfg: GenDataConfig = ov.load(cli.config.as_deref())?;
            cmd_gen_data(&cfg, &cli.out)
        }
        Command::Fit(a) => {
            ov.put("data", a.data);
            ov.put("test", a.test);
            ov.flag("fit_hyper", a.fit_hyper);
            ov.extend_set(&cli.set)?;
            let cfg: FitConfig = ov.load(cli.config.as_deref())?;
            cmd_fit(&cfg, &cli.out)
        }
        Command::Plan(a) => {
            ov.put("model", a.model);
            ov.put("x_ref", a.x_ref);
            ov.put("tol", a.tol);
            ov.put("method", a.method.map(|m| m.parse::<Method>()).transpose()?);
            ov.flag("perfect", a.perfect);
            ov.put("episode.initial_level", a.initial_level);
            ov.put("episode.reward_rule", a.search.reward_rule.clone());
            ov.put("mde_kind", a.search.mde_kind.clone());
            ov.search("episode.search", &a.search);
            ov.extend_set(&cli.set)?;
            let cfg: PlanConfig = ov.load(cli.config.as_deref())?;
            cmd_plan(&cfg, &cli.out)
        }
        Command::Bench(a) => {
            ov.bench("", &a)?;
            ov.extend_set(&cli.set)?;
            let cfg: BenchConfig = ov.load(cli.config.as_deref())?;
            cmd_bench(&cfg, &cli.out, execution(a.sequential))
        }
        Command::Sweep(a) => {
            ov.rebase("bench");
            ov.put("param", a.param.map(|p| p.parse::<SweepParam>()).transpose()?);
            ov.put("values", a.values);
            ov.bench("bench.", &a.bench)?;
            ov.extend_set(&cli.set)?;
            let cfg: SweepConfig = ov.load(cli.config.as_deref())?;
            cmd_sweep(&cfg, &cli.out, execution(a.bench.sequential))
        }
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

/// Dotted-path overrides applied to a JSON config before deserializing.
#[derive(Debug, Default)]
struct Overrides(Vec<(String, Value)>);

impl Overrides {
    fn put<T: Serialize>(&mut self, path: &str, v: Option<T>) {
        if let Some(v) = v {
            self.0.push((path.to_string(), serde_json::to_value(v).expect("serializable override")));
        }
    }

    fn flag(&mut self, path: &str, on: bool) {
        self.put(path, on.then_some(true));
    }

    /// Moves the seed override under `prefix`.
    fn rebase(&mut self, prefix: &str) {
        for (path, _) in &mut self.0 {
            *path = format!("{prefix}.{path}");
        }
    }

    fn search(&mut self, prefix: &str, a: &SearchArgs) {
        let p = |k: &str| format!("{prefix}.{k}");
        self.put(&p("budget"), a.iterations.map(|n| serde_json::json!({ "iterations": n })));
        self.put(&p("c_uct"), a.c_uct);
        self.put(&p("tau"), a.tau);
        self.put(&p("steepness"), a.h);
        self.put(&p("inflation_w"), a.w);
        self.put(&p("max_depth"), a.max_depth);
        self.flag(&p("literal_expansion"), a.literal_expansion);
    }

    fn bench(&mut self, prefix: &str, a: &BenchArgs) -> Result<()> {
        let p = |k: &str| format!("{prefix}{k}");
        self.put(&p("trials"), a.trials);
        self.put(&p("dataset_sizes"), a.dataset_sizes.clone());
        self.put(&p("test_size"), a.test_size);
        let methods = a
            .methods
            .as_ref()
            .map(|ms| ms.iter().map(|m| m.parse::<Method>()).collect::<Result<Vec<_>>>())
            .transpose()?;
        self.put(&p("methods"), methods);
        self.put(&p("tol"), a.tol);
        self.put(&p("x_ref_min"), a.x_ref_min);
        self.put(&p("x_ref_max"), a.x_ref_max);
        self.put(&p("initial_level"), a.initial_level);
        self.flag(&p("fit_hyper"), a.fit_hyper);
        self.put(&p("scatter_resolution"), a.scatter_resolution);
        self.put(&p("scatter_level"), a.scatter_level);
        self.put(&p("reward_rule"), a.search.reward_rule.clone());
        self.put(&p("mde_kind"), a.search.mde_kind.clone());
        self.search(&p("search"), &a.search);
        Ok(())
    }

    fn extend_set(&mut self, sets: &[String]) -> Result<()> {
        for s in sets {
            let (key, raw) = s
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("--set expects KEY=VALUE, got {s:?}")))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            self.0.push((key.to_string(), value));
        }
        Ok(())
    }

    fn load<T: Serialize + DeserializeOwned + Default>(&self, file: Option<&Path>) -> Result<T> {
        let mut root = match file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str::<Value>(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => serde_json::to_value(T::default())?,
        };
        for (path, value) in &self.0 {
            set_path(&mut root, path, value.clone())?;
        }
        serde_json::from_value(root).map_err(|e| Error::Config(e.to_string()))
    }
}

fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut node = root;
    let mut keys = path.split('.').peekable();
    while let Some(key) = keys.next() {
        let obj = match node {
            Value::Object(map) => map,
            _ => return Err(Error::Config(format!("cannot set {path}: {key} is inside a non-object"))),
        };
        if keys.peek().is_none() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

fn prepare_out(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn echo_config<T: Serialize>(cfg: &T, out: &Path) -> Result<()> {
    prepare_out(out)?;
    write_json(cfg, &out.join("config.json"))
}

pub fn cmd_gen_data(cfg: &GenDataConfig, out: &Path) -> Result<Status> {
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    cfg.ground_truth.validate()?;
    cfg.grid.validate()?;
    echo_config(cfg, out)?;
    let data = gen_dataset(&cfg.ground_truth, &cfg.grid, cfg.n, &mut stream(cfg.seed, "dataset", &[]))?;
    let path = out.join("dataset.csv");
    write_dataset_csv(&data, create(&path)?)?;
    let targets: Vec<f64> = data.samples().iter().map(|s| s.next_level).collect();
    let (lo, hi) = targets.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    println!(
        "wrote {} transitions to {}; next_level mean {:.2}, range [{lo:.2}, {hi:.2}]",
        data.len(),
        path.display(),
        targets.iter().sum::<f64>() / targets.len() as f64
    );
    Ok(Status::Success)
}

fn read_csv_file(path: &Path) -> Result<crate::gp::Dataset> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset_csv(file)
}

pub fn cmd_fit(cfg: &FitConfig, out: &Path) -> Result<Status> {
    let data_path = cfg.data.as_deref().ok_or_else(|| Error::Config("fit needs --data".into()))?;
    let data = read_csv_file(data_path)?;
    let test = cfg.test.as_deref().map(read_csv_file).transpose()?;
    echo_config(cfg, out)?;
    let params = if cfg.fit_hyper { fit_hyperparams(&data, &cfg.search_space)?.params } else { cfg.kernel };
    let model = GpModel::fit(&data, &params)?;
    let path = out.join("model.json");
    write_model_json(&model, &path)?;
    println!("wrote {}", path.display());
    println!(
        "params: dot_sigma0_sq {} rq_scale {} rq_alpha {} noise_var {}",
        params.dot_sigma0_sq, params.rq_scale, params.rq_alpha, params.noise_var
    );
    println!("train MSE {:.4}", model.mse(&data)?);
    if let Some(test) = test {
        println!("test MSE {:.4} ({} points)", model.mse(&test)?, test.len());
    }
    Ok(Status::Success)
}

fn print_trace(trace: &EpisodeTrace) {
    println!("{:>2} {:>9} {:>5} {:>4} {:>9} {:>9} {:>9}", "k", "observed", "alpha", "d", "predicted", "mde", "true");
    for s in &trace.steps {
        println!(
            "{:>2} {:>9.2} {:>5.2} {:>4.1} {:>9.2} {:>9.4} {:>9.2}",
            s.k, s.observed, s.action.alpha, s.action.duration, s.predicted, s.mde, s.true_level
        );
    }
    println!(
        "goal [{:.2}, {:.2}], final true level {:.2}: {:?} after {} actions",
        trace.goal.lower(),
        trace.goal.upper(),
        trace.final_true_level,
        trace.outcome,
        trace.n_actions()
    );
}

pub fn cmd_plan(cfg: &PlanConfig, out: &Path) -> Result<Status> {
    let variant = cfg.method.variant()?;
    let x_ref = cfg.x_ref.ok_or_else(|| Error::Config("plan needs --x-ref".into()))?;
    let goal = GoalSpec::new(x_ref, cfg.tol)?;
    cfg.ground_truth.validate()?;
    let episode = EpisodeConfig { search: crate::mcts::SearchConfig { variant, ..cfg.episode.search }, ..cfg.episode };
    episode.search.validate()?;
    let loaded = match (&cfg.model, cfg.perfect) {
        (_, true) => None,
        (Some(path), false) => Some(read_model_json(path)?),
        (None, false) => return Err(Error::Config("plan needs --model or --perfect".into())),
    };
    echo_config(cfg, out)?;
    let mut rng = stream(cfg.seed, "plan", &[]);
    let result = match &loaded {
        None => {
            let gt = GroundTruth { obs_noise_sd: 0.0, ..cfg.ground_truth };
            run_episode(&gt, &PerfectModel(gt), &goal, &episode, &mut rng)
        }
        Some(model) => run_episode(&cfg.ground_truth, &GpDynamics::new(model, cfg.mde_kind), &goal, &episode, &mut rng),
    };
    let (trace, error) = match result {
        Ok(t) => (t, None),
        Err(f) => (*f.trace, Some(f.error)),
    };
    write_trace_jsonl(&trace, create(&out.join("trace.jsonl"))?)?;
    print_trace(&trace);
    if let Some(e) = error {
        eprintln!("episode aborted: {e}");
        return Ok(Status::ExperimentFailure);
    }
    Ok(if trace.success() { Status::Success } else { Status::ExperimentFailure })
}

pub fn cmd_bench(cfg: &BenchConfig, out: &Path, exec: Execution) -> Result<Status> {
    cfg.validate()?;
    echo_config(cfg, out)?;
    let run = run_bench(cfg, exec)?;
    let report = &run.report;
    write_json(report, &out.join("report.json"))?;
    write_summary_csv(&summary_rows(report), create(&out.join("summary.csv"))?)?;
    let table = format_table(report);
    fs::write(out.join("summary.txt"), &table).map_err(|e| Error::io(out.join("summary.txt"), e))?;
    print!("{table}");
    for res in &report.results {
        let model = run.model(res.dataset_size).expect("one model per size");
        let rows = variance_scatter(model, &cfg.grid, cfg.scatter_level, cfg.scatter_resolution, res.traces())?;
        let name = format!("scatter_{}_{}.csv", res.dataset_size, res.method.name());
        write_scatter_csv(&rows, create(&out.join(&name))?)?;
        if let (Some(a), Some(g)) = (mean_std(&rows, ScatterKind::Action), mean_std(&rows, ScatterKind::Grid)) {
            println!("{name}: executed-action mean std {a:.4}, grid mean std {g:.4}");
        }
    }
    if report.failed_episodes > 0 {
        eprintln!("{} episodes aborted with errors; see report.json", report.failed_episodes);
        return Ok(Status::ExperimentFailure);
    }
    Ok(Status::Success)
}

pub fn cmd_sweep(cfg: &SweepConfig, out: &Path, exec: Execution) -> Result<Status> {
    let param = cfg.param.ok_or_else(|| Error::Config("sweep needs --param".into()))?;
    if cfg.values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    for &v in &cfg.values {
        let mut b = cfg.bench.clone();
        param.apply(&mut b, v);
        b.validate()?;
    }
    echo_config(cfg, out)?;
    let values: Vec<String> = cfg.values.iter().map(|v| v.to_string()).collect();
    println!("sweep {param} over [{}]", values.join(", "));
    let points = run_sweep(&cfg.bench, param, &cfg.values, exec)?;
    write_sweep_csv(param, &points, create(&out.join("sweep.csv"))?)?;
    write_json(&points, &out.join("sweep.json"))?;
    let mut failed = 0;
    for p in &points {
        println!("\n{param} = {}", p.value);
        print!("{}", format_table(&p.report));
        failed += p.report.failed_episodes;
    }
    Ok(if failed > 0 { Status::ExperimentFailure } else { Status::Success })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_path_creates_and_replaces() {
        let mut v = serde_json::json!({ "a": { "b": 1 } });
        set_path(&mut v, "a.b", Value::from(2)).unwrap();
        set_path(&mut v, "a.c.d", Value::from(true)).unwrap();
        assert_eq!(v, serde_json::json!({ "a": { "b": 2, "c": { "d": true } } }));
        assert!(set_path(&mut v, "a.b.x", Value::from(0)).is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("c.json");
        fs::write(&file, r#"{"trials": 5, "seed": 9, "search": {"tau": 0.3}}"#).unwrap();
        let mut ov = Overrides::default();
        ov.put("trials", Some(7));
        ov.extend_set(&["search.steepness=4".to_string()]).unwrap();
        let cfg: BenchConfig = ov.load(Some(&file)).unwrap();
        assert_eq!((cfg.trials, cfg.seed, cfg.search.tau, cfg.search.steepness), (7, 9, 0.3, 4.0));
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let mut ov = Overrides::default();
        ov.put("trails", Some(3));
        let err = ov.load::<BenchConfig>(None).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn exit_code_classes() {
        assert_eq!(exit_code(&Error::NotImplemented("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), 2);
        assert_eq!(exit_code(&Error::Timeout), 1);
        assert_eq!(exit_code(&Error::io("x", std::io::Error::other("denied"))), 1);
    }
}
