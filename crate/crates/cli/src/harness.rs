//! Bernoulli-bandit regret experiments.
//!
//! Every run derives its seed from the base seed, so all agents face the same
//! arm means and the same reward noise in run `i`: the environment stream
//! draws the arm means first and then exactly one uniform per step, and a
//! pull pays 1 when that uniform falls below the chosen arm's mean. Agents
//! draw their own randomness from a separate stream.

use std::fmt;
use std::str::FromStr;

use bamdp_core::{
    bayes_greedy, expand_tree, Belief, ExpansionBudget, ExpansionStrategy, HyperState, Ucb1State,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{HarnessError, Result};

/// Seed stride between consecutive runs.
pub const RUN_SEED_STRIDE: u64 = 1_000_003;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentKind {
    Bamdp,
    Ucb,
    Base,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Bamdp => "bamdp",
            Self::Ucb => "ucb",
            Self::Base => "base",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bamdp" => Ok(Self::Bamdp),
            "ucb" => Ok(Self::Ucb),
            "base" => Ok(Self::Base),
            other => Err(HarnessError::Config(format!(
                "unknown agent {other:?} (expected bamdp, ucb or base)"
            ))),
        }
    }
}

/// A fully specified agent: the tree planner carries a strategy and a
/// per-step expansion budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    Bamdp {
        strategy: ExpansionStrategy,
        lookaheads: usize,
    },
    Ucb,
    Base,
}

impl Agent {
    pub fn kind(&self) -> AgentKind {
        match self {
            Self::Bamdp { .. } => AgentKind::Bamdp,
            Self::Ucb => AgentKind::Ucb,
            Self::Base => AgentKind::Base,
        }
    }

    pub fn strategy(&self) -> Option<ExpansionStrategy> {
        match self {
            Self::Bamdp { strategy, .. } => Some(*strategy),
            _ => None,
        }
    }

    /// Expansion budget; 0 for the baselines.
    pub fn lookaheads(&self) -> usize {
        match self {
            Self::Bamdp { lookaheads, .. } => *lookaheads,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArmMeans {
    /// Fresh means drawn uniformly from `[0, 1]` for every run.
    UniformPerRun,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_arms: usize,
    pub gamma: f64,
    pub horizon: usize,
    pub n_runs: usize,
    pub lookaheads: Vec<usize>,
    pub strategies: Vec<ExpansionStrategy>,
    pub agents: Vec<AgentKind>,
    pub prior_alpha: f64,
    pub prior_beta: f64,
    pub arm_means: ArmMeans,
    pub seed: u64,
}

/// `⌈2 / (1 − γ)⌉`.
pub fn default_horizon(gamma: f64) -> usize {
    // the 1e-9 slack keeps 2/(1-0.99) from rounding up to 201
    ((2.0 / (1.0 - gamma)) - 1e-9).ceil().max(1.0) as usize
}

impl ExperimentConfig {
    /// Two arms, γ = 0.99, horizon 200, upper-bound expansion with budgets
    /// 1, 4 and 16 against both baselines.
    pub fn new(n_arms: usize, gamma: f64) -> Self {
        Self {
            n_arms,
            gamma,
            horizon: default_horizon(gamma),
            n_runs: 100,
            lookaheads: vec![1, 4, 16],
            strategies: vec![ExpansionStrategy::HighProbUpperBound],
            agents: vec![AgentKind::Bamdp, AgentKind::Ucb, AgentKind::Base],
            prior_alpha: 1.0,
            prior_beta: 1.0,
            arm_means: ArmMeans::UniformPerRun,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.n_arms < 2 {
            return fail(format!("need at least 2 arms, got {}", self.n_arms));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return fail(format!("gamma {} outside [0, 1)", self.gamma));
        }
        if self.horizon == 0 {
            return fail("horizon must be at least 1".into());
        }
        if self.n_runs == 0 {
            return fail("need at least one run".into());
        }
        if self.agents.is_empty() {
            return fail("no agents selected".into());
        }
        if self.agents.contains(&AgentKind::Bamdp) {
            if self.strategies.is_empty() {
                return fail("bamdp agent needs at least one strategy".into());
            }
            if self.lookaheads.is_empty() || self.lookaheads.contains(&0) {
                return fail("lookahead budgets must be positive".into());
            }
        }
        if !(self.prior_alpha >= 0.0 && self.prior_beta >= 0.0)
            || !(self.prior_alpha.is_finite() && self.prior_beta.is_finite())
        {
            return fail("prior parameters must be finite and nonnegative".into());
        }
        if let ArmMeans::Explicit(means) = &self.arm_means {
            if means.len() != self.n_arms {
                return fail(format!(
                    "{} arm means given for {} arms",
                    means.len(),
                    self.n_arms
                ));
            }
            if means.iter().any(|m| !(0.0..=1.0).contains(m)) {
                return fail("arm means must lie in [0, 1]".into());
            }
        }
        Ok(())
    }

    /// Every agent configuration the experiment evaluates, in output order.
    pub fn agent_grid(&self) -> Vec<Agent> {
        let mut grid = Vec::new();
        for kind in &self.agents {
            match kind {
                AgentKind::Bamdp => {
                    for &strategy in &self.strategies {
                        for &lookaheads in &self.lookaheads {
                            grid.push(Agent::Bamdp {
                                strategy,
                                lookaheads,
                            });
                        }
                    }
                }
                AgentKind::Ucb => grid.push(Agent::Ucb),
                AgentKind::Base => grid.push(Agent::Base),
            }
        }
        grid
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed
            .wrapping_add((run as u64).wrapping_mul(RUN_SEED_STRIDE))
    }

    fn prior(&self) -> Result<Belief> {
        Ok(Belief::with_priors(
            1,
            self.n_arms,
            1.0,
            self.prior_alpha,
            self.prior_beta,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub arm_means: Vec<f64>,
    pub arms: Vec<usize>,
    pub rewards: Vec<bool>,
}

enum AgentState {
    Planner {
        belief: Belief,
        strategy: ExpansionStrategy,
        budget: ExpansionBudget,
    },
    Ucb(Ucb1State),
    Greedy(Belief),
}

impl AgentState {
    fn new(agent: Agent, config: &ExperimentConfig) -> Result<Self> {
        Ok(match agent {
            Agent::Bamdp {
                strategy,
                lookaheads,
            } => Self::Planner {
                belief: config.prior()?,
                strategy,
                budget: ExpansionBudget::expansions(lookaheads)?,
            },
            Agent::Ucb => Self::Ucb(Ucb1State::new(config.n_arms)),
            Agent::Base => Self::Greedy(config.prior()?),
        })
    }

    fn act<R: Rng>(&self, gamma: f64, rng: &mut R) -> Result<usize> {
        Ok(match self {
            Self::Planner {
                belief,
                strategy,
                budget,
            } => {
                let root = HyperState::new(0, belief.clone())?;
                expand_tree(root, *budget, *strategy, gamma, rng)?.action
            }
            Self::Ucb(state) => state.select(),
            Self::Greedy(belief) => bayes_greedy(belief, 0, gamma)?,
        })
    }

    fn observe(&mut self, arm: usize, reward: bool) -> Result<()> {
        match self {
            Self::Planner { belief, .. } | Self::Greedy(belief) => {
                belief.update_in_place(0, arm, 0, reward)?
            }
            Self::Ucb(state) => state.observe(arm, reward)?,
        }
        Ok(())
    }
}

/// Simulates one bandit instance for `config.horizon` steps.
pub fn run_episode(config: &ExperimentConfig, agent: Agent, seed: u64) -> Result<EpisodeTrace> {
    config.validate()?;
    let mut env_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agent_rng = ChaCha8Rng::seed_from_u64(seed);
    agent_rng.set_stream(1);

    let arm_means = match &config.arm_means {
        ArmMeans::Explicit(m) => m.clone(),
        ArmMeans::UniformPerRun => (0..config.n_arms).map(|_| env_rng.random::<f64>()).collect(),
    };
    let mut state = AgentState::new(agent, config)?;
    let mut arms = Vec::with_capacity(config.horizon);
    let mut rewards = Vec::with_capacity(config.horizon);
    for _ in 0..config.horizon {
        let arm = state.act(config.gamma, &mut agent_rng)?;
        let reward = env_rng.random::<f64>() < arm_means[arm];
        state.observe(arm, reward)?;
        arms.push(arm);
        rewards.push(reward);
    }
    Ok(EpisodeTrace {
        arm_means,
        arms,
        rewards,
    })
}

/// `regret[t] = Σ_{k ≤ t} (max_a μ_a − μ_{a_k})`, from the true means.
pub fn cumulative_regret(arms: &[usize], arm_means: &[f64]) -> Vec<f64> {
    let best = arm_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    arms.iter()
        .scan(0.0, |acc, &a| {
            *acc += best - arm_means[a];
            Some(*acc)
        })
        .collect()
}

/// Mean cumulative regret (and its standard error) per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub agent: AgentKind,
    pub strategy: Option<ExpansionStrategy>,
    pub lookaheads: usize,
    pub gamma: f64,
    pub runs: usize,
    pub mean_regret: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl RegretCurve {
    pub fn final_regret(&self) -> FinalRegret {
        FinalRegret {
            agent: self.agent,
            strategy: self.strategy,
            lookaheads: self.lookaheads,
            final_mean_regret: self.mean_regret.last().copied().unwrap_or(0.0),
            stderr: self.stderr.last().copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalRegret {
    pub agent: AgentKind,
    pub strategy: Option<ExpansionStrategy>,
    pub lookaheads: usize,
    pub final_mean_regret: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub curves: Vec<RegretCurve>,
}

impl ExperimentResult {
    /// Final-step regret per configuration, the regret-versus-budget summary.
    pub fn finals(&self) -> Vec<FinalRegret> {
        self.curves.iter().map(RegretCurve::final_regret).collect()
    }

    pub fn find(
        &self,
        agent: AgentKind,
        strategy: Option<ExpansionStrategy>,
        lookaheads: usize,
    ) -> Option<&RegretCurve> {
        self.curves
            .iter()
            .find(|c| c.agent == agent && c.strategy == strategy && c.lookaheads == lookaheads)
    }
}

/// Per-step mean and standard error over runs (sample deviation, `n − 1`).
pub fn aggregate(per_run: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = per_run.len();
    let len = per_run.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; len];
    let mut stderr = vec![0.0; len];
    for t in 0..len {
        let m = per_run.iter().map(|r| r[t]).sum::<f64>() / n as f64;
        mean[t] = m;
        if n > 1 {
            let var = per_run.iter().map(|r| (r[t] - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            stderr[t] = (var / n as f64).sqrt();
        }
    }
    (mean, stderr)
}

/// Runs one agent configuration over every seeded run.
pub fn run_curve(config: &ExperimentConfig, agent: Agent) -> Result<RegretCurve> {
    config.validate()?;
    let per_run: Vec<Vec<f64>> = (0..config.n_runs)
        .into_par_iter()
        .map(|i| {
            let trace = run_episode(config, agent, config.run_seed(i))?;
            Ok(cumulative_regret(&trace.arms, &trace.arm_means))
        })
        .collect::<Result<_>>()?;
    let (mean_regret, stderr) = aggregate(&per_run);
    Ok(RegretCurve {
        agent: agent.kind(),
        strategy: agent.strategy(),
        lookaheads: agent.lookaheads(),
        gamma: config.gamma,
        runs: config.n_runs,
        mean_regret,
        stderr,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let curves = config
        .agent_grid()
        .into_iter()
        .map(|agent| run_curve(config, agent))
        .collect::<Result<_>>()?;
    Ok(ExperimentResult { curves })
}
