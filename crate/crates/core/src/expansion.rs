//! Anytime tree expansion with pluggable leaf-selection strategies.
//!
//! Each iteration scores every current leaf with a utility `U` and expands the
//! best-scoring one (lowest creation index on ties). After the budget is spent
//! the leaves receive lower bounds and upper values, both are backed up to the
//! root, and the action with the highest lower-bound backup is returned.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, NodeId, Result};
use crate::solver::DEFAULT_TOL;
use crate::tree::{BeliefTree, HyperState, RootBounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpansionStrategy {
    /// Oldest leaf first: `U = −creation index`.
    Serial,
    /// Uniformly random leaf.
    Random,
    /// `U = γ^depth · lower bound`.
    HighestLowerBound,
    /// `U = γ^depth · (one fresh upper-bound sample)`.
    ThompsonSampling,
    /// `U = γ^depth · max(mean of upper samples, lower bound)`.
    HighProbUpperBound,
}

impl ExpansionStrategy {
    pub const ALL: [ExpansionStrategy; 5] = [
        ExpansionStrategy::Serial,
        ExpansionStrategy::Random,
        ExpansionStrategy::HighestLowerBound,
        ExpansionStrategy::ThompsonSampling,
        ExpansionStrategy::HighProbUpperBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Serial => "serial",
            Self::Random => "random",
            Self::HighestLowerBound => "lower",
            Self::ThompsonSampling => "thompson",
            Self::HighProbUpperBound => "upper",
        }
    }

    fn needs_lower_bound(self) -> bool {
        matches!(self, Self::HighestLowerBound | Self::HighProbUpperBound)
    }
}

impl fmt::Display for ExpansionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ExpansionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown strategy {s:?} (expected serial, random, lower, thompson or upper)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionBudget {
    n_expansions: usize,
    samples_per_iteration: usize,
}

impl ExpansionBudget {
    pub fn new(n_expansions: usize, samples_per_iteration: usize) -> Result<Self> {
        if n_expansions == 0 || samples_per_iteration == 0 {
            return Err(Error::InvalidArgument(
                "expansion budget and samples per iteration must be at least 1".into(),
            ));
        }
        Ok(Self {
            n_expansions,
            samples_per_iteration,
        })
    }

    /// `n` expansions, one upper-bound sample per leaf per iteration.
    pub fn expansions(n: usize) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn n_expansions(&self) -> usize {
        self.n_expansions
    }

    pub fn samples_per_iteration(&self) -> usize {
        self.samples_per_iteration
    }
}

/// Scores the leaf `id` for expansion.
///
/// For [`ExpansionStrategy::ThompsonSampling`] this draws one fresh
/// upper-bound sample, which is also retained on the node.
pub fn node_utility<R: Rng + ?Sized>(
    tree: &mut BeliefTree,
    strategy: ExpansionStrategy,
    id: NodeId,
    tol: f64,
    rng: &mut R,
) -> Result<f64> {
    let node = tree.node(id)?;
    if !node.is_leaf() {
        return Err(Error::NotALeaf(id));
    }
    let discount = tree.gamma().powi(node.depth as i32);
    match strategy {
        ExpansionStrategy::Serial => Ok(-(id.0 as f64)),
        ExpansionStrategy::Random => Ok(rng.random::<f64>()),
        ExpansionStrategy::HighestLowerBound => {
            let lower = node.lower_bound().ok_or(Error::IncompleteNode {
                node: id,
                missing: "lower bound",
            })?;
            Ok(discount * lower)
        }
        ExpansionStrategy::ThompsonSampling => {
            let sample = tree.leaf_upper_bound_sample(id, tol, rng)?;
            Ok(discount * sample)
        }
        ExpansionStrategy::HighProbUpperBound => {
            let lower = node.lower_bound().ok_or(Error::IncompleteNode {
                node: id,
                missing: "lower bound",
            })?;
            let mean = node.upper_mean().ok_or(Error::IncompleteNode {
                node: id,
                missing: "upper-bound samples",
            })?;
            Ok(discount * mean.max(lower))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub expansions: usize,
    pub tree_size: usize,
    pub n_leaves: usize,
    /// Upper-bound samples drawn over the whole run.
    pub samples_drawn: usize,
    pub root_bounds: RootBounds,
    pub unambiguous_action: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: usize,
    pub diagnostics: Diagnostics,
}

/// Runs the expansion loop and keeps the tree for inspection.
pub fn grow_tree<R: Rng + ?Sized>(
    root: HyperState,
    budget: ExpansionBudget,
    strategy: ExpansionStrategy,
    gamma: f64,
    rng: &mut R,
) -> Result<(BeliefTree, Decision)> {
    let tol = DEFAULT_TOL;
    let mut tree = BeliefTree::new(root, gamma)?;
    let mut samples_drawn = 0;
    let mut leaves: Vec<NodeId> = Vec::new();

    if strategy.needs_lower_bound() {
        tree.leaf_lower_bound(tree.root(), tol)?;
    }
    for _ in 0..budget.n_expansions {
        leaves.clear();
        leaves.extend(tree.leaves());

        if strategy == ExpansionStrategy::HighProbUpperBound {
            for &id in &leaves {
                for _ in 0..budget.samples_per_iteration {
                    tree.leaf_upper_bound_sample(id, tol, rng)?;
                }
            }
            samples_drawn += leaves.len() * budget.samples_per_iteration;
        }
        if strategy == ExpansionStrategy::ThompsonSampling {
            samples_drawn += leaves.len();
        }

        let mut best: Option<(NodeId, f64)> = None;
        for &id in &leaves {
            let u = node_utility(&mut tree, strategy, id, tol, rng)?;
            if best.is_none_or(|(_, b)| u > b) {
                best = Some((id, u));
            }
        }
        let (chosen, _) = best.expect("a tree always has at least one leaf");
        let children = tree.expand_node(chosen)?;
        if strategy.needs_lower_bound() {
            for child in children {
                tree.leaf_lower_bound(child, tol)?;
            }
        }
    }

    tree.compute_leaf_lower_bounds(tol)?;
    let root_bounds = tree.backup_bounds()?;
    let action = select_root_action(&root_bounds);
    let diagnostics = Diagnostics {
        expansions: budget.n_expansions,
        tree_size: tree.len(),
        n_leaves: tree.n_leaves(),
        samples_drawn,
        unambiguous_action: root_bounds.unambiguous_action(),
        root_bounds,
    };
    Ok((
        tree,
        Decision {
            action,
            diagnostics,
        },
    ))
}

/// Expands a fresh tree from `root` and returns the recommended action.
pub fn expand_tree<R: Rng + ?Sized>(
    root: HyperState,
    budget: ExpansionBudget,
    strategy: ExpansionStrategy,
    gamma: f64,
    rng: &mut R,
) -> Result<Decision> {
    grow_tree(root, budget, strategy, gamma, rng).map(|(_, d)| d)
}

// Highest lower bound; ties go to the higher upper bound, then the lower index.
fn select_root_action(bounds: &RootBounds) -> usize {
    let mut best = 0;
    for a in 1..bounds.lower.len() {
        let (l, u) = (bounds.lower[a], bounds.upper[a]);
        let (bl, bu) = (bounds.lower[best], bounds.upper[best]);
        if l > bl || (l == bl && u > bu) {
            best = a;
        }
    }
    best
}
