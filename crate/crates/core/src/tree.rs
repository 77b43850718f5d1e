//! The belief tree over hyper-states.
//!
//! Nodes live in an arena and are addressed by [`NodeId`]. Handles are
//! assigned in creation order, so a child always has a larger handle than its
//! parent and the handle doubles as the node's creation index.
//!
//! Each internal node stores, per action, the list of outcome branches
//! `(s', r)` together with their predictive probability. Leaves carry value
//! bounds: a lower bound from the mean MDP, and Monte-Carlo samples of the
//! optimal value of MDPs drawn from the leaf's belief, whose mean estimates an
//! upper bound.

use std::collections::BTreeSet;
use std::io::{self, Write};

use rand::Rng;

use crate::belief::Belief;
use crate::error::{check_discount, check_index, Error, NodeId, Result};
use crate::solver::value_iteration;

/// Tolerance on per-action branch probability sums.
pub const BRANCH_SUM_TOL: f64 = 1e-9;

/// The state of the Bayes-adaptive MDP: environment state plus belief.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperState {
    pub state: usize,
    pub belief: Belief,
}

impl HyperState {
    pub fn new(state: usize, belief: Belief) -> Result<Self> {
        check_index("state", state, belief.n_states())?;
        Ok(Self { state, belief })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub child: NodeId,
    pub prob: f64,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub hyper: HyperState,
    /// Environment steps from the root.
    pub depth: usize,
    pub parent: Option<NodeId>,
    /// Action taken at the parent to reach this node.
    pub entry_action: Option<usize>,
    /// Reward observed on the entry edge.
    pub incoming_reward: bool,
    /// Predictive probability of the entry edge given the parent and action.
    pub branch_prob: f64,
    children: Vec<Vec<Branch>>,
    lower_bound: Option<f64>,
    upper_samples: Vec<f64>,
    upper_sum: f64,
}

impl TreeNode {
    fn new(
        hyper: HyperState,
        depth: usize,
        parent: Option<NodeId>,
        entry_action: Option<usize>,
        incoming_reward: bool,
        branch_prob: f64,
    ) -> Self {
        Self {
            hyper,
            depth,
            parent,
            entry_action,
            incoming_reward,
            branch_prob,
            children: Vec::new(),
            lower_bound: None,
            upper_samples: Vec::new(),
            upper_sum: 0.0,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Outcome branches of `action`; empty for leaves.
    pub fn branches(&self, action: usize) -> &[Branch] {
        self.children.get(action).map_or(&[], Vec::as_slice)
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    pub fn upper_samples(&self) -> &[f64] {
        &self.upper_samples
    }

    /// Mean of the retained upper-bound samples.
    pub fn upper_mean(&self) -> Option<f64> {
        if self.upper_samples.is_empty() {
            None
        } else {
            Some(self.upper_sum / self.upper_samples.len() as f64)
        }
    }

    /// Upper value used in backups: `max(sample mean, lower bound)`, or the
    /// lower bound alone while no samples exist.
    pub fn upper_value(&self) -> Option<f64> {
        match (self.upper_mean(), self.lower_bound) {
            (Some(mean), Some(lower)) => Some(mean.max(lower)),
            (None, lower) => lower,
            (Some(_), None) => None,
        }
    }

    fn push_sample(&mut self, v: f64) {
        self.upper_samples.push(v);
        self.upper_sum += v;
    }
}

/// `ε = (1/(1−γ)) · sqrt(ln(2/δ) / (2c))`: the Hoeffding half-width for the
/// mean of `c` samples with range `1/(1−γ)` at failure probability `δ`.
pub fn hoeffding_epsilon(c: usize, delta: f64, gamma: f64) -> Result<f64> {
    if c == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "failure probability {delta} outside (0, 1)"
        )));
    }
    check_discount(gamma)?;
    let range = 1.0 / (1.0 - gamma);
    Ok(range * ((2.0 / delta).ln() / (2.0 * c as f64)).sqrt())
}

/// Result of a backwards-induction pass at the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Backup {
    /// Argmax of `q_values`, lowest index on ties.
    pub action: usize,
    pub q_values: Vec<f64>,
    pub value: f64,
}

/// Per-action lower and upper value bounds at the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl RootBounds {
    /// An action whose lower bound is at least the upper bound of every other
    /// action, if one exists.
    pub fn unambiguous_action(&self) -> Option<usize> {
        (0..self.lower.len()).find(|&best| {
            (0..self.upper.len())
                .filter(|&a| a != best)
                .all(|a| self.lower[best] >= self.upper[a])
        })
    }
}

#[derive(Debug, Clone)]
pub struct BeliefTree {
    nodes: Vec<TreeNode>,
    gamma: f64,
    leaves: BTreeSet<NodeId>,
}

impl BeliefTree {
    pub fn new(root: HyperState, gamma: f64) -> Result<Self> {
        check_discount(gamma)?;
        check_index("state", root.state, root.belief.n_states())?;
        let mut leaves = BTreeSet::new();
        leaves.insert(NodeId(0));
        Ok(Self {
            nodes: vec![TreeNode::new(root, 0, None, None, false, 1.0)],
            gamma,
            leaves,
        })
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_actions(&self) -> usize {
        self.nodes[0].hyper.belief.n_actions()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Result<&TreeNode> {
        self.nodes.get(id.0).ok_or(Error::UnknownNode(id))
    }

    fn node_mut(&mut self, id: NodeId) -> Result<&mut TreeNode> {
        self.nodes.get_mut(id.0).ok_or(Error::UnknownNode(id))
    }

    /// Current leaves in creation order.
    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.leaves.iter().copied()
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    /// Enumerates every action and every outcome `(s', r)` with positive
    /// predictive probability below `id`, returning the new leaves.
    pub fn expand_node(&mut self, id: NodeId) -> Result<Vec<NodeId>> {
        let node = self.node(id)?;
        if !node.is_leaf() {
            return Err(Error::NotALeaf(id));
        }
        let s = node.hyper.state;
        let depth = node.depth + 1;
        let belief = node.hyper.belief.clone();
        let (n_states, n_actions) = (belief.n_states(), belief.n_actions());

        let mut created = Vec::new();
        let mut per_action = Vec::with_capacity(n_actions);
        let mut pending = Vec::new();
        for a in 0..n_actions {
            let mut branches = Vec::new();
            for s_next in 0..n_states {
                for reward in [false, true] {
                    let prob = belief.predictive_prob(s, a, s_next, reward)?;
                    if prob <= 0.0 {
                        continue;
                    }
                    let child_belief = belief.posterior_update(s, a, s_next, reward)?;
                    let child = NodeId(self.nodes.len() + pending.len());
                    pending.push(TreeNode::new(
                        HyperState {
                            state: s_next,
                            belief: child_belief,
                        },
                        depth,
                        Some(id),
                        Some(a),
                        reward,
                        prob,
                    ));
                    branches.push(Branch { child, prob });
                    created.push(child);
                }
            }
            per_action.push(branches);
        }
        self.nodes.extend(pending);
        self.nodes[id.0].children = per_action;
        self.leaves.remove(&id);
        self.leaves.extend(created.iter().copied());
        Ok(created)
    }

    /// Value of the mean-MDP optimal policy at the node's state, cached on the node.
    pub fn leaf_lower_bound(&mut self, id: NodeId, tol: f64) -> Result<f64> {
        let gamma = self.gamma;
        let node = self.node_mut(id)?;
        if let Some(v) = node.lower_bound {
            return Ok(v);
        }
        let mean = node.hyper.belief.mean_mdp()?;
        let (v, _) = value_iteration(&mean, gamma, tol)?;
        let lower = v.value(node.hyper.state);
        node.lower_bound = Some(lower);
        Ok(lower)
    }

    /// Computes lower bounds for every current leaf that lacks one.
    pub fn compute_leaf_lower_bounds(&mut self, tol: f64) -> Result<()> {
        let leaves: Vec<NodeId> = self.leaves().collect();
        for id in leaves {
            self.leaf_lower_bound(id, tol)?;
        }
        Ok(())
    }

    /// Draws one MDP from the node's belief and records its optimal value at
    /// the node's state as an upper-bound sample.
    pub fn leaf_upper_bound_sample<R: Rng + ?Sized>(
        &mut self,
        id: NodeId,
        tol: f64,
        rng: &mut R,
    ) -> Result<f64> {
        let gamma = self.gamma;
        let node = self.node_mut(id)?;
        let mdp = node.hyper.belief.sample_mdp(rng)?;
        let (v, _) = value_iteration(&mdp, gamma, tol)?;
        let sample = v.value(node.hyper.state);
        node.push_sample(sample);
        Ok(sample)
    }

    /// Records an externally computed upper-bound sample on a node.
    pub fn record_upper_sample(&mut self, id: NodeId, value: f64) -> Result<()> {
        self.node_mut(id)?.push_sample(value);
        Ok(())
    }

    pub fn leaf_upper_bound_mean(&self, id: NodeId) -> Result<f64> {
        self.node(id)?.upper_mean().ok_or(Error::NoSamples(id))
    }

    /// Bottom-up Bellman backup over the tree with `leaf_value` at the leaves.
    ///
    /// Internal nodes take `V = max_a Σ_b p_b (r_b + γ V(child_b))`, where `r_b`
    /// is the reward on the branch's entry edge. A root that is still a leaf
    /// reports its own value for every action.
    pub fn backwards_induction<F>(&self, leaf_value: F) -> Result<Backup>
    where
        F: Fn(NodeId, &TreeNode) -> Option<f64>,
    {
        let n_actions = self.n_actions();
        let mut values = vec![0.0; self.nodes.len()];
        let mut root_q = Vec::new();
        // Children always carry larger handles than their parent.
        for (i, node) in self.nodes.iter().enumerate().rev() {
            let id = NodeId(i);
            if node.is_leaf() {
                values[i] =
                    leaf_value(id, node).ok_or(Error::IncompleteValuation(id))?;
                if i == 0 {
                    root_q = vec![values[0]; n_actions];
                }
                continue;
            }
            let q: Vec<f64> = node
                .children
                .iter()
                .map(|branches| {
                    branches
                        .iter()
                        .map(|b| {
                            let child = &self.nodes[b.child.0];
                            let r = if child.incoming_reward { 1.0 } else { 0.0 };
                            b.prob * (r + self.gamma * values[b.child.0])
                        })
                        .sum()
                })
                .collect();
            values[i] = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if i == 0 {
                root_q = q;
            }
        }
        let action = crate::solver::argmax(&root_q);
        Ok(Backup {
            action,
            q_values: root_q,
            value: values[0],
        })
    }

    /// Backs up leaf lower bounds and leaf upper values to per-action root bounds.
    pub fn backup_bounds(&self) -> Result<RootBounds> {
        let lower = self.backwards_induction(|_, n| n.lower_bound())?;
        let upper = self.backwards_induction(|_, n| n.upper_value())?;
        Ok(RootBounds {
            lower: lower.q_values,
            upper: upper.q_values,
        })
    }

    /// Writes one line per node:
    /// `handle parent action reward prob depth lower samples mean`,
    /// with `-` for absent fields.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# handle parent action reward prob depth lower samples mean")?;
        for (id, node) in self.nodes() {
            let dash = || "-".to_string();
            writeln!(
                out,
                "{} {} {} {} {} {} {} {} {}",
                id.0,
                node.parent.map_or_else(dash, |p| p.0.to_string()),
                node.entry_action.map_or_else(dash, |a| a.to_string()),
                u8::from(node.incoming_reward),
                node.branch_prob,
                node.depth,
                node.lower_bound.map_or_else(dash, |v| v.to_string()),
                node.upper_samples.len(),
                node.upper_mean().map_or_else(dash, |v| v.to_string()),
            )?;
        }
        Ok(())
    }
}
