//! Bernoulli-bandit regret harness for belief-tree planners and baselines.

pub mod error;
pub mod harness;
pub mod report;

pub use error::{HarnessError, Result};
pub use harness::{
    cumulative_regret, default_horizon, run_curve, run_episode, run_experiment, Agent, AgentKind,
    ArmMeans, EpisodeTrace, ExperimentConfig, ExperimentResult, FinalRegret, RegretCurve,
};
