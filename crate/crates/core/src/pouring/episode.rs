//! Receding-horizon execution: plan from the observed level, apply the first
//! action to the ground truth, observe, repeat.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ActionGrid, GoalSpec, GroundTruth, PourAction, PourState, PouringDomain, RewardRule, TransitionModel};
use crate::mcts::{search, SearchConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub search: SearchConfig,
    pub grid: ActionGrid,
    pub initial_level: f64,
    #[serde(default)]
    pub reward_rule: RewardRule,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            search: SearchConfig::default(),
            grid: ActionGrid::default(),
            initial_level: 0.0,
            reward_rule: RewardRule::default(),
        }
    }
}

/// One executed action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub k: usize,
    /// Observed level the search started from.
    pub observed: f64,
    pub action: PourAction,
    /// Model mean for `(observed, action)`.
    pub predicted: f64,
    pub mde: f64,
    /// True level after the action.
    pub true_level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    /// Final true level above the goal band.
    Overshoot,
    /// Final true level below the goal band.
    Undershoot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub goal: GoalSpec,
    pub initial_true_level: f64,
    pub initial_observed: f64,
    pub steps: Vec<TraceStep>,
    pub final_true_level: f64,
    pub final_observed: f64,
    pub outcome: Outcome,
}

impl EpisodeTrace {
    pub fn success(&self) -> bool {
        self.outcome == Outcome::Success
    }

    pub fn n_actions(&self) -> usize {
        self.steps.len()
    }
}

/// A search error, with everything executed before it.
#[derive(Debug)]
pub struct EpisodeFailure {
    pub error: Error,
    pub trace: Box<EpisodeTrace>,
}

impl std::fmt::Display for EpisodeFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "episode aborted after {} actions: {}", self.trace.steps.len(), self.error)
    }
}

impl std::error::Error for EpisodeFailure {}

fn classify(goal: &GoalSpec, level: f64) -> Outcome {
    if goal.contains(level) {
        Outcome::Success
    } else if level > goal.upper() {
        Outcome::Overshoot
    } else {
        Outcome::Undershoot
    }
}

/// Runs one episode. Stops once the observed level reaches `x_ref − c` or more
/// than `N_max` actions were executed; success is judged on the true level.
pub fn run_episode<M: TransitionModel + ?Sized, R: Rng>(
    gt: &GroundTruth,
    model: &M,
    goal: &GoalSpec,
    config: &EpisodeConfig,
    rng: &mut R,
) -> std::result::Result<EpisodeTrace, EpisodeFailure> {
    let n_max = config.search.max_depth;
    let domain = PouringDomain::new(model, *goal, &config.grid, n_max).with_reward_rule(config.reward_rule);
    let mut true_level = PourState::clamped(config.initial_level);
    let initial_observed = gt.observe(true_level.level(), rng);
    let mut observed = initial_observed;
    let mut steps = Vec::new();

    let finish = |steps: Vec<TraceStep>, true_level: f64, observed: f64| EpisodeTrace {
        goal: *goal,
        initial_true_level: config.initial_level,
        initial_observed,
        steps,
        final_true_level: true_level,
        final_observed: observed,
        outcome: classify(goal, true_level),
    };

    while observed < goal.lower() && steps.len() <= n_max {
        let state = PourState::clamped(observed);
        let search_cfg = SearchConfig { rng_seed: rng.next_u64(), ..config.search };
        let planned = search(&domain, state, &search_cfg).and_then(|action| {
            let t = model.predict(&state, &action)?;
            Ok((action, t))
        });
        let (action, prediction) = match planned {
            Ok(p) => p,
            Err(error) => {
                return Err(EpisodeFailure { error, trace: Box::new(finish(steps, true_level.level(), observed)) })
            }
        };
        true_level = gt.true_step(&true_level, &action);
        steps.push(TraceStep {
            k: steps.len(),
            observed,
            action,
            predicted: prediction.next.level(),
            mde: prediction.mde,
            true_level: true_level.level(),
        });
        observed = gt.observe(true_level.level(), rng);
    }
    Ok(finish(steps, true_level.level(), observed))
}

/// One JSON object per executed step.
pub fn write_trace_jsonl<W: Write>(trace: &EpisodeTrace, mut out: W) -> Result<()> {
    for step in &trace.steps {
        serde_json::to_writer(&mut out, step)?;
        out.write_all(b"\n").map_err(|e| Error::io("<trace>", e))?;
    }
    Ok(())
}
