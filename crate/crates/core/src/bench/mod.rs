//! Experiment harness: fit GP models on nested datasets, run every method on
//! the same goals, aggregate success rates and action counts.

mod report;
mod scatter;
mod sweep;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gp::{fit_hyperparams, Dataset, GpModel, KernelParams, MdeKind, SearchSpace};
use crate::mcts::{SearchConfig, Variant};
use crate::pouring::{
    gen_dataset, run_episode, subsample, ActionGrid, EpisodeConfig, EpisodeTrace, GoalSpec, GpDynamics, GroundTruth,
    RewardRule,
};
use crate::rng::stream;
use crate::{Error, Result};

pub use report::{format_table, read_summary_csv, summary_rows, write_summary_csv, SummaryRow};
pub use scatter::{mean_std, read_scatter_csv, variance_scatter, write_scatter_csv, ScatterKind, ScatterRow};
pub use sweep::{run_sweep, write_sweep_csv, SweepParam, SweepPoint};

/// The compared planners. The discriminant is a stable id used to derive
/// per-trial random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MCTS")]
    Mcts = 0,
    #[serde(rename = "UA-MCTS-0")]
    UaMcts0 = 1,
    #[serde(rename = "MCTS-inflated")]
    MctsInflated = 2,
    #[serde(rename = "UA-MCTS-1")]
    UaMcts1 = 3,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Mcts, Method::UaMcts0, Method::MctsInflated, Method::UaMcts1];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mcts => "MCTS",
            Method::UaMcts0 => "UA-MCTS-0",
            Method::MctsInflated => "MCTS-inflated",
            Method::UaMcts1 => "UA-MCTS-1",
        }
    }

    pub fn id(self) -> u64 {
        self as u64
    }

    /// Search variant implementing this method.
    pub fn variant(self) -> Result<Variant> {
        match self {
            Method::Mcts => Ok(Variant::Standard),
            Method::MctsInflated => Ok(Variant::Inflated),
            Method::UaMcts1 => Ok(Variant::UncertaintyAware),
            Method::UaMcts0 => Err(Error::NotImplemented("UA-MCTS-0 is an external reference method".into())),
        }
    }

    pub fn registry() -> String {
        Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}; known: {}", Method::registry())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub trials: usize,
    /// The largest size is drawn from the ground truth; smaller ones are
    /// subsampled from it.
    pub dataset_sizes: Vec<usize>,
    /// Held-out points for reporting model MSE.
    pub test_size: usize,
    pub methods: Vec<Method>,
    /// Shared search settings; the variant is set per method.
    pub search: SearchConfig,
    pub ground_truth: GroundTruth,
    pub grid: ActionGrid,
    pub tol: f64,
    pub x_ref_min: f64,
    pub x_ref_max: f64,
    pub initial_level: f64,
    pub reward_rule: RewardRule,
    pub kernel: KernelParams,
    pub fit_hyper: bool,
    pub search_space: SearchSpace,
    pub mde_kind: MdeKind,
    /// Points per axis of the variance-scatter background grid.
    pub scatter_resolution: usize,
    /// Level at which the background grid is evaluated.
    pub scatter_level: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 0,
            trials: 100,
            dataset_sizes: vec![40, 20, 10, 5],
            test_size: 200,
            methods: vec![Method::Mcts, Method::MctsInflated, Method::UaMcts1],
            search: SearchConfig::default(),
            ground_truth: GroundTruth::default(),
            grid: ActionGrid::default(),
            tol: 2.5,
            x_ref_min: 20.0,
            x_ref_max: 90.0,
            initial_level: 0.0,
            reward_rule: RewardRule::default(),
            kernel: KernelParams::default(),
            fit_hyper: false,
            search_space: SearchSpace::default(),
            mde_kind: MdeKind::default(),
            scatter_resolution: 25,
            scatter_level: 0.0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.dataset_sizes.is_empty() || self.dataset_sizes.contains(&0) {
            return bad(format!("dataset sizes must be positive, got {:?}", self.dataset_sizes));
        }
        let mut sizes = self.dataset_sizes.clone();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() != self.dataset_sizes.len() {
            return bad(format!("duplicate dataset sizes in {:?}", self.dataset_sizes));
        }
        if self.test_size == 0 {
            return bad("test_size must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        for m in &self.methods {
            m.variant()?;
        }
        if self.x_ref_min.is_nan() || self.x_ref_max.is_nan() || self.x_ref_min > self.x_ref_max {
            return bad(format!("x_ref range [{}, {}] is empty", self.x_ref_min, self.x_ref_max));
        }
        GoalSpec::new(self.x_ref_min, self.tol)?;
        GoalSpec::new(self.x_ref_max, self.tol)?;
        if !(0.0..=100.0).contains(&self.initial_level) || !(0.0..=100.0).contains(&self.scatter_level) {
            return bad("initial and scatter levels must lie in [0, 100]".into());
        }
        if self.scatter_resolution < 2 {
            return bad("scatter_resolution must be at least 2".into());
        }
        self.search.validate()?;
        self.ground_truth.validate()?;
        self.grid.validate()?;
        self.kernel.validate()?;
        Ok(())
    }

    fn episode_config(&self, method: Method) -> Result<EpisodeConfig> {
        Ok(EpisodeConfig {
            search: SearchConfig { variant: method.variant()?, ..self.search },
            grid: self.grid,
            initial_level: self.initial_level,
            reward_rule: self.reward_rule,
        })
    }

    /// Goal of trial `t`, shared by every method and dataset size.
    pub fn goal(&self, trial: usize) -> GoalSpec {
        let x_ref = if self.x_ref_min == self.x_ref_max {
            self.x_ref_min
        } else {
            stream(self.seed, "x_ref", &[trial as u64]).random_range(self.x_ref_min..=self.x_ref_max)
        };
        GoalSpec { x_ref, tol: self.tol }
    }
}

/// Serial or data-parallel trial execution. Both give identical reports;
/// without the `parallel` feature `Parallel` runs serially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub dataset_size: usize,
    pub params: KernelParams,
    pub train_mse: f64,
    pub test_mse: f64,
    pub dataset: Dataset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub x_ref: f64,
    pub success: bool,
    pub n_actions: usize,
    /// Search error that aborted the episode, if any.
    pub error: Option<String>,
    pub trace: EpisodeTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub dataset_size: usize,
    pub method: Method,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub n_actions_mean: f64,
    pub n_actions_sd: f64,
    pub records: Vec<TrialRecord>,
}

impl MethodResult {
    fn from_records(dataset_size: usize, method: Method, records: Vec<TrialRecord>) -> Self {
        let trials = records.len();
        let successes = records.iter().filter(|r| r.success).count();
        let counts: Vec<f64> = records.iter().map(|r| r.n_actions as f64).collect();
        let (mean, sd) = mean_sd(&counts);
        MethodResult {
            dataset_size,
            method,
            trials,
            successes,
            success_rate: 100.0 * successes as f64 / trials as f64,
            n_actions_mean: mean,
            n_actions_sd: sd,
            records,
        }
    }

    pub fn traces(&self) -> impl Iterator<Item = &EpisodeTrace> {
        self.records.iter().map(|r| &r.trace)
    }
}

/// Mean and sample standard deviation (`n − 1`); the sd of one value is 0.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub models: Vec<ModelSummary>,
    /// Ordered by dataset size (as configured), then method.
    pub results: Vec<MethodResult>,
    pub failed_episodes: usize,
}

impl BenchReport {
    pub fn result(&self, dataset_size: usize, method: Method) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.dataset_size == dataset_size && r.method == method)
    }
}

/// A report together with the fitted models it was produced with.
#[derive(Debug, Clone)]
pub struct BenchRun {
    pub report: BenchReport,
    pub models: Vec<GpModel>,
}

impl BenchRun {
    pub fn model(&self, dataset_size: usize) -> Option<&GpModel> {
        self.report.models.iter().position(|m| m.dataset_size == dataset_size).map(|i| &self.models[i])
    }
}

/// Draws the datasets and fits one model per configured size.
pub fn fit_models(config: &BenchConfig) -> Result<(Vec<GpModel>, Vec<ModelSummary>)> {
    config.validate()?;
    let gt = &config.ground_truth;
    let largest = *config.dataset_sizes.iter().max().expect("validated non-empty");
    let base = gen_dataset(gt, &config.grid, largest, &mut stream(config.seed, "dataset", &[]))?;
    let test = gen_dataset(gt, &config.grid, config.test_size, &mut stream(config.seed, "test", &[]))?;
    let mut models = Vec::new();
    let mut summaries = Vec::new();
    for &size in &config.dataset_sizes {
        let data = if size == largest {
            base.clone()
        } else {
            subsample(&base, size, &mut stream(config.seed, "subsample", &[size as u64]))?
        };
        let params =
            if config.fit_hyper { fit_hyperparams(&data, &config.search_space)?.params } else { config.kernel };
        let model = GpModel::fit(&data, &params)?;
        summaries.push(ModelSummary {
            dataset_size: size,
            params,
            train_mse: model.mse(&data)?,
            test_mse: model.mse(&test)?,
            dataset: data,
        });
        models.push(model);
    }
    Ok((models, summaries))
}

#[derive(Debug, Clone, Copy)]
struct Job {
    model: usize,
    method: Method,
    trial: usize,
}

fn run_trial(config: &BenchConfig, models: &[GpModel], job: Job) -> Result<TrialRecord> {
    let size = config.dataset_sizes[job.model];
    let goal = config.goal(job.trial);
    let episode = config.episode_config(job.method)?;
    let dynamics = GpDynamics::new(&models[job.model], config.mde_kind);
    let mut rng = stream(config.seed, "episode", &[size as u64, job.method.id(), job.trial as u64]);
    let (trace, error) = match run_episode(&config.ground_truth, &dynamics, &goal, &episode, &mut rng) {
        Ok(trace) => (trace, None),
        Err(failure) => (*failure.trace, Some(failure.error.to_string())),
    };
    Ok(TrialRecord {
        trial: job.trial,
        x_ref: goal.x_ref,
        success: error.is_none() && trace.success(),
        n_actions: trace.n_actions(),
        error,
        trace,
    })
}

#[cfg(feature = "parallel")]
fn run_jobs(config: &BenchConfig, models: &[GpModel], jobs: &[Job], exec: Execution) -> Result<Vec<TrialRecord>> {
    use rayon::prelude::*;
    match exec {
        Execution::Parallel => jobs.par_iter().map(|&j| run_trial(config, models, j)).collect(),
        Execution::Sequential => jobs.iter().map(|&j| run_trial(config, models, j)).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_jobs(config: &BenchConfig, models: &[GpModel], jobs: &[Job], _exec: Execution) -> Result<Vec<TrialRecord>> {
    jobs.iter().map(|&j| run_trial(config, models, j)).collect()
}

/// Runs every (dataset size, method, trial) episode. Episode errors are kept
/// as failed trials; configuration and model-fitting errors abort.
pub fn run_bench(config: &BenchConfig, exec: Execution) -> Result<BenchRun> {
    let (models, summaries) = fit_models(config)?;
    let mut jobs = Vec::new();
    for model in 0..config.dataset_sizes.len() {
        for &method in &config.methods {
            jobs.extend((0..config.trials).map(|trial| Job { model, method, trial }));
        }
    }
    let mut records = run_jobs(config, &models, &jobs, exec)?.into_iter();
    let mut results = Vec::new();
    for &size in &config.dataset_sizes {
        for &method in &config.methods {
            let chunk: Vec<TrialRecord> = records.by_ref().take(config.trials).collect();
            results.push(MethodResult::from_records(size, method, chunk));
        }
    }
    let failed_episodes = results.iter().flat_map(|r| &r.records).filter(|r| r.error.is_some()).count();
    Ok(BenchRun { report: BenchReport { config: config.clone(), models: summaries, results, failed_episodes }, models })
}
