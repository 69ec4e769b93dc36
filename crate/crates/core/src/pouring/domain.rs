use serde::{Deserialize, Serialize};

use super::{ActionGrid, GoalSpec, GroundTruth, PourAction, PourState};
use crate::gp::{Feature, GpModel, MdeKind};
use crate::mcts::{PlanningDomain, Transition};
use crate::Result;

/// A learned (or perfect) pouring model `f̂` with its deviation estimate.
pub trait TransitionModel: Sync {
    /// Predicted next level (clamped to `[0, 100]`) and its MDE.
    fn predict(&self, state: &PourState, action: &PourAction) -> Result<Transition<PourState>>;

    fn predict_mean(&self, state: &PourState, action: &PourAction) -> Result<PourState> {
        Ok(self.predict(state, action)?.next)
    }
}

/// Gaussian-process model; the MDE is its predictive variance (or std).
#[derive(Debug, Clone, Copy)]
pub struct GpDynamics<'m> {
    pub model: &'m GpModel,
    pub kind: MdeKind,
}

impl<'m> GpDynamics<'m> {
    pub fn new(model: &'m GpModel, kind: MdeKind) -> Self {
        GpDynamics { model, kind }
    }
}

impl TransitionModel for GpDynamics<'_> {
    fn predict(&self, state: &PourState, action: &PourAction) -> Result<Transition<PourState>> {
        let p = self.model.predict(&Feature::from_transition(state, action))?;
        let mde = match self.kind {
            MdeKind::Variance => p.variance,
            MdeKind::Std => p.std(),
        };
        Ok(Transition { next: PourState::clamped(p.mean), mde })
    }

    fn predict_mean(&self, state: &PourState, action: &PourAction) -> Result<PourState> {
        let m = self.model.predict_mean(&Feature::from_transition(state, action))?;
        Ok(PourState::clamped(m))
    }
}

/// The ground truth used as its own model, with zero deviation.
#[derive(Debug, Clone, Copy)]
pub struct PerfectModel(pub GroundTruth);

impl TransitionModel for PerfectModel {
    fn predict(&self, state: &PourState, action: &PourAction) -> Result<Transition<PourState>> {
        Ok(Transition { next: self.0.true_step(state, action), mde: 0.0 })
    }
}

/// Terminal reward `1 + 1/(k+1)` unless the predicted level overshoots.
pub fn rho(predicted: f64, k: usize, goal: &GoalSpec) -> f64 {
    if predicted <= goal.upper() {
        1.0 + 1.0 / (k as f64 + 1.0)
    } else {
        0.0
    }
}

/// Which terminal transitions earn `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardRule {
    /// Only transitions predicted to reach `x_ref − c` without overshooting.
    #[default]
    GoalBand,
    /// Every terminal transition that does not overshoot, including the
    /// `k > N_max` cutoff below the band.
    Literal,
}

/// Reward of a transition predicted to end at `predicted`, taken at depth `k`.
pub fn terminal_reward(predicted: f64, k: usize, goal: &GoalSpec, n_max: usize, rule: RewardRule) -> f64 {
    if !terminal_rule(predicted, k, goal, n_max) {
        return 0.0;
    }
    match rule {
        RewardRule::GoalBand if predicted < goal.lower() => 0.0,
        _ => rho(predicted, k, goal),
    }
}

/// Terminal once the predicted level reaches the goal band or `k > n_max`.
pub fn terminal_rule(predicted: f64, k: usize, goal: &GoalSpec, n_max: usize) -> bool {
    predicted >= goal.lower() || k > n_max
}

/// Sparse reward of applying `action` at depth `k`.
pub fn reward<M: TransitionModel + ?Sized>(
    state: &PourState,
    action: &PourAction,
    k: usize,
    goal: &GoalSpec,
    n_max: usize,
    rule: RewardRule,
    model: &M,
) -> Result<f64> {
    let predicted = model.predict_mean(state, action)?.level();
    Ok(terminal_reward(predicted, k, goal, n_max, rule))
}

pub fn is_terminal<M: TransitionModel + ?Sized>(
    state: &PourState,
    action: &PourAction,
    k: usize,
    goal: &GoalSpec,
    n_max: usize,
    model: &M,
) -> Result<bool> {
    let predicted = model.predict_mean(state, action)?.level();
    Ok(terminal_rule(predicted, k, goal, n_max))
}

/// Pouring as a search problem for one goal and one model.
#[derive(Debug, Clone)]
pub struct PouringDomain<'m, M: ?Sized> {
    model: &'m M,
    goal: GoalSpec,
    actions: Vec<PourAction>,
    n_max: usize,
    rule: RewardRule,
}

impl<'m, M: TransitionModel + ?Sized> PouringDomain<'m, M> {
    pub fn new(model: &'m M, goal: GoalSpec, grid: &ActionGrid, n_max: usize) -> Self {
        PouringDomain { model, goal, actions: grid.actions(), n_max, rule: RewardRule::default() }
    }

    pub fn with_reward_rule(mut self, rule: RewardRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn goal(&self) -> &GoalSpec {
        &self.goal
    }
}

impl<M: TransitionModel + ?Sized> PlanningDomain for PouringDomain<'_, M> {
    type State = PourState;
    type Action = PourAction;

    fn legal_actions(&self, _state: &PourState, _depth: usize) -> Vec<PourAction> {
        self.actions.clone()
    }

    fn model_step(&self, state: &PourState, action: &PourAction) -> Result<Transition<PourState>> {
        self.model.predict(state, action)
    }

    fn model_mean(&self, state: &PourState, action: &PourAction) -> Result<PourState> {
        self.model.predict_mean(state, action)
    }

    fn inflate(&self, next: &PourState, amount: f64) -> PourState {
        PourState::clamped(next.level() + amount)
    }

    fn reward(&self, _state: &PourState, _action: &PourAction, next: &PourState, depth: usize) -> f64 {
        terminal_reward(next.level(), depth, &self.goal, self.n_max, self.rule)
    }

    fn is_terminal(&self, _state: &PourState, _action: &PourAction, next: &PourState, depth: usize) -> bool {
        terminal_rule(next.level(), depth, &self.goal, self.n_max)
    }
}
