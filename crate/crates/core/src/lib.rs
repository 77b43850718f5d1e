//! Bayesian belief-tree planning for exploration in unknown discrete MDPs.
//!
//! The crate is organised bottom-up:
//!
//! - [`belief`]: conjugate Dirichlet/Beta posterior over MDPs,
//! - [`mdp`] and [`solver`]: concrete MDPs and value iteration,
//! - [`tree`]: the hyper-state tree with leaf value bounds and backups,
//! - [`expansion`]: the anytime expansion loop and its leaf-selection strategies,
//! - [`baselines`]: UCB1 and greedy mean-MDP action selection.

pub mod baselines;
pub mod belief;
pub mod error;
pub mod expansion;
pub mod mdp;
pub mod solver;
pub mod tree;

pub use baselines::{bayes_greedy, ucb1_select, ucb1_update, Ucb1State};
pub use belief::{Belief, BetaRewardBelief, DirichletTransitionBelief};
pub use error::{Error, NodeId, Result};
pub use expansion::{
    expand_tree, grow_tree, node_utility, Decision, Diagnostics, ExpansionBudget,
    ExpansionStrategy,
};
pub use mdp::Mdp;
pub use solver::{policy_evaluation, value_iteration, Policy, ValueFunction, DEFAULT_TOL};
pub use tree::{hoeffding_epsilon, BeliefTree, Branch, HyperState, RootBounds, TreeNode};
