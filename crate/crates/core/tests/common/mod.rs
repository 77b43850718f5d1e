//! Reference computations that share no code path with the library's solver
//! or backup routines. Used by integration and acceptance tests.
#![allow(dead_code)]

use bamdp_core::{Belief, BeliefTree, BetaRewardBelief, DirichletTransitionBelief, Mdp, NodeId};
use rand::Rng;

/// Finite-horizon optimal values by plain backwards induction from `V_0 = 0`.
pub fn finite_horizon_values(mdp: &Mdp, gamma: f64, horizon: usize) -> Vec<f64> {
    let (ns, na) = (mdp.n_states(), mdp.n_actions());
    let mut v = vec![0.0; ns];
    for _ in 0..horizon {
        let mut next = vec![0.0; ns];
        for (s, slot) in next.iter_mut().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for a in 0..na {
                let mut q = mdp.reward(s, a);
                for (s2, vs2) in v.iter().enumerate() {
                    q += gamma * mdp.transition_prob(s, a, s2).unwrap() * vs2;
                }
                if q > best {
                    best = q;
                }
            }
            *slot = best;
        }
        v = next;
    }
    v
}

/// Finite-horizon value of a fixed policy.
pub fn finite_horizon_policy_values(mdp: &Mdp, actions: &[usize], gamma: f64, horizon: usize) -> Vec<f64> {
    let ns = mdp.n_states();
    let mut v = vec![0.0; ns];
    for _ in 0..horizon {
        v = (0..ns)
            .map(|s| {
                let a = actions[s];
                mdp.reward(s, a)
                    + gamma
                        * (0..ns)
                            .map(|s2| mdp.transition_prob(s, a, s2).unwrap() * v[s2])
                            .sum::<f64>()
            })
            .collect();
    }
    v
}

pub fn random_mdp<R: Rng>(rng: &mut R, ns: usize, na: usize) -> Mdp {
    let mut transition = Vec::with_capacity(ns * na * ns);
    for _ in 0..ns * na {
        let raw: Vec<f64> = (0..ns).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let mut row: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // absorb rounding in the last entry so rows sum to 1 exactly enough
        let head: f64 = row[..ns - 1].iter().sum();
        row[ns - 1] = 1.0 - head;
        transition.extend(row);
    }
    let reward = (0..ns * na).map(|_| rng.random::<f64>()).collect();
    Mdp::new(ns, na, transition, reward).unwrap()
}

/// Belief with integer parameters in `1..=max_param`.
pub fn random_belief<R: Rng>(rng: &mut R, ns: usize, na: usize, max_param: u32) -> Belief {
    let mut draw = |n: usize| -> Vec<f64> {
        (0..n).map(|_| rng.random_range(1..=max_param) as f64).collect()
    };
    let t = DirichletTransitionBelief::from_counts(ns, na, draw(ns * na * ns)).unwrap();
    let r = BetaRewardBelief::from_params(ns, na, draw(ns * na), draw(ns * na)).unwrap();
    Belief::new(t, r).unwrap()
}

/// Root Q-values by enumerating every deterministic action assignment to the
/// internal non-root nodes and keeping the best assignment per root action.
pub fn exhaustive_root_q(tree: &BeliefTree, leaf_value: &dyn Fn(NodeId) -> f64) -> Vec<f64> {
    let n_actions = tree.n_actions();
    let gamma = tree.gamma();
    let root = tree.root();
    if tree.node(root).unwrap().is_leaf() {
        return vec![leaf_value(root); n_actions];
    }
    let internal: Vec<NodeId> = tree
        .nodes()
        .filter(|(id, n)| *id != root && !n.is_leaf())
        .map(|(id, _)| id)
        .collect();
    let n_policies = n_actions.pow(internal.len() as u32);
    let mut best = vec![f64::NEG_INFINITY; n_actions];
    let mut assignment = vec![0usize; tree.len()];
    for code in 0..n_policies {
        let mut c = code;
        for id in &internal {
            assignment[id.0] = c % n_actions;
            c /= n_actions;
        }
        for (a, slot) in best.iter_mut().enumerate() {
            let v = policy_q(tree, root, a, &assignment, leaf_value, gamma);
            if v > *slot {
                *slot = v;
            }
        }
    }
    best
}

fn policy_q(
    tree: &BeliefTree,
    id: NodeId,
    action: usize,
    assignment: &[usize],
    leaf_value: &dyn Fn(NodeId) -> f64,
    gamma: f64,
) -> f64 {
    let node = tree.node(id).unwrap();
    node.branches(action)
        .iter()
        .map(|b| {
            let child = tree.node(b.child).unwrap();
            let r = if child.incoming_reward { 1.0 } else { 0.0 };
            let v = if child.is_leaf() {
                leaf_value(b.child)
            } else {
                policy_q(tree, b.child, assignment[b.child.0], assignment, leaf_value, gamma)
            };
            b.prob * (r + gamma * v)
        })
        .sum()
}

/// Bayes-optimal expectimax over a Bernoulli bandit with Beta posteriors,
/// truncated at `depth` with `leaf(params)` as the continuation value.
/// Values a frontier belief given as per-arm `(alpha, beta)`.
pub type BanditLeaf<'a> = dyn Fn(&[(f64, f64)]) -> f64 + 'a;

pub fn bandit_expectimax(
    params: &mut Vec<(f64, f64)>,
    gamma: f64,
    depth: usize,
    leaf: &BanditLeaf<'_>,
) -> f64 {
    if depth == 0 {
        return leaf(params);
    }
    let mut best = f64::NEG_INFINITY;
    for a in 0..params.len() {
        let (alpha, beta) = params[a];
        let p = alpha / (alpha + beta);
        params[a] = (alpha + 1.0, beta);
        let win = bandit_expectimax(params, gamma, depth - 1, leaf);
        params[a] = (alpha, beta + 1.0);
        let lose = bandit_expectimax(params, gamma, depth - 1, leaf);
        params[a] = (alpha, beta);
        let q = p * (1.0 + gamma * win) + (1.0 - p) * gamma * lose;
        if q > best {
            best = q;
        }
    }
    best
}

/// Value of committing forever to the arm with the best posterior mean.
pub fn commit_value(params: &[(f64, f64)], gamma: f64) -> f64 {
    params
        .iter()
        .map(|(a, b)| a / (a + b))
        .fold(f64::NEG_INFINITY, f64::max)
        / (1.0 - gamma)
}

/// Random tree: expand the root, then each leaf above `max_depth` with
/// probability `p_expand`, stopping after `max_internal` expansions.
pub fn random_tree<R: Rng>(
    rng: &mut R,
    belief: Belief,
    gamma: f64,
    max_depth: usize,
    max_internal: usize,
    p_expand: f64,
) -> BeliefTree {
    let state = rng.random_range(0..belief.n_states());
    let root = bamdp_core::HyperState::new(state, belief).unwrap();
    let mut tree = BeliefTree::new(root, gamma).unwrap();
    tree.expand_node(tree.root()).unwrap();
    let mut internal = 1;
    let mut frontier: Vec<NodeId> = tree.leaves().collect();
    while let Some(id) = frontier.pop() {
        if internal >= max_internal {
            break;
        }
        let depth = tree.node(id).unwrap().depth;
        if depth < max_depth && rng.random::<f64>() < p_expand {
            let children = tree.expand_node(id).unwrap();
            internal += 1;
            frontier.extend(children);
        }
    }
    tree
}
