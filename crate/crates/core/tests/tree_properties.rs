mod common;

use bamdp_core::tree::BRANCH_SUM_TOL;
use bamdp_core::{
    grow_tree, hoeffding_epsilon, Belief, BeliefTree, ExpansionBudget, ExpansionStrategy,
    HyperState, NodeId, DEFAULT_TOL,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn leaf_values(tree: &BeliefTree, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..tree.len()).map(|_| rng.random_range(0.0..10.0)).collect()
}

// Total probability of reaching a leaf when actions are picked uniformly.
fn leaf_mass(tree: &BeliefTree, id: NodeId, n_actions: usize) -> f64 {
    let node = tree.node(id).unwrap();
    if node.is_leaf() {
        return 1.0;
    }
    (0..n_actions)
        .map(|a| {
            node.branches(a)
                .iter()
                .map(|b| b.prob * leaf_mass(tree, b.child, n_actions))
                .sum::<f64>()
        })
        .sum::<f64>()
        / n_actions as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn induction_matches_exhaustive_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ns = rng.random_range(1..=2);
        let na = rng.random_range(1..=3);
        let belief = common::random_belief(&mut rng, ns, na, 5);
        let gamma = rng.random_range(0.0..0.99);
        let tree = common::random_tree(&mut rng, belief, gamma, 3, 5, 0.4);
        let values = leaf_values(&tree, &mut rng);
        let backup = tree.backwards_induction(|id, _| Some(values[id.0])).unwrap();
        let oracle = common::exhaustive_root_q(&tree, &|id| values[id.0]);
        for (x, y) in backup.q_values.iter().zip(&oracle) {
            prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
        }
        let mut best = 0;
        for (a, q) in oracle.iter().enumerate() {
            if *q > oracle[best] { best = a; }
        }
        prop_assert_eq!(backup.action, best);
    }

    #[test]
    fn expansion_preserves_probability_mass(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ns = rng.random_range(1..=3);
        let na = rng.random_range(1..=3);
        let belief = common::random_belief(&mut rng, ns, na, 6);
        let tree = common::random_tree(&mut rng, belief, 0.9, 3, 8, 0.5);
        for (id, node) in tree.nodes() {
            if node.is_leaf() {
                prop_assert!(tree.leaves().any(|l| l == id));
                continue;
            }
            prop_assert!(!tree.leaves().any(|l| l == id));
            for a in 0..na {
                let total: f64 = node.branches(a).iter().map(|b| b.prob).sum();
                prop_assert!((total - 1.0).abs() < BRANCH_SUM_TOL);
                prop_assert!(node.branches(a).len() <= 2 * ns);
            }
        }
        prop_assert!((leaf_mass(&tree, tree.root(), na) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn root_action_invariant_to_constant_shift(seed in any::<u64>(), shift in -5.0f64..5.0) {
        // Fully expanded depth-2 bandit trees: every leaf sits at the same depth.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arms: Vec<(f64, f64)> = (0..2)
            .map(|_| (rng.random_range(1..=5) as f64, rng.random_range(1..=5) as f64))
            .collect();
        let root = HyperState::new(0, Belief::bandit(&arms).unwrap()).unwrap();
        let mut tree = BeliefTree::new(root, 0.8).unwrap();
        let first = tree.expand_node(tree.root()).unwrap();
        for id in first {
            tree.expand_node(id).unwrap();
        }
        let values = leaf_values(&tree, &mut rng);
        let base = tree.backwards_induction(|id, _| Some(values[id.0])).unwrap();
        let shifted = tree.backwards_induction(|id, _| Some(values[id.0] + shift)).unwrap();
        prop_assert_eq!(base.action, shifted.action);
    }

    #[test]
    fn scaling_leaves_scales_q_when_rewards_vanish(seed in any::<u64>(), k in 0.0f64..4.0) {
        // Beta(0, b) arms never pay, so every entry reward is 0.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arms = vec![(0.0, rng.random_range(1..=4) as f64), (0.0, 1.0)];
        let root = HyperState::new(0, Belief::bandit(&arms).unwrap()).unwrap();
        let mut tree = BeliefTree::new(root, 0.7).unwrap();
        let kids = tree.expand_node(tree.root()).unwrap();
        tree.expand_node(kids[0]).unwrap();
        let values = leaf_values(&tree, &mut rng);
        let base = tree.backwards_induction(|id, _| Some(values[id.0])).unwrap();
        let scaled = tree.backwards_induction(|id, _| Some(k * values[id.0])).unwrap();
        for (x, y) in base.q_values.iter().zip(&scaled.q_values) {
            prop_assert!((k * x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn lower_bound_sandwich_is_statistically_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let gamma = 0.9;
    let c = 100;
    let eps = hoeffding_epsilon(c, 0.05, gamma).unwrap();
    let mut ok = 0;
    for _ in 0..100 {
        let belief = common::random_belief(&mut rng, 1, 2, 5);
        let mut tree = BeliefTree::new(HyperState::new(0, belief).unwrap(), gamma).unwrap();
        let root = tree.root();
        let lower = tree.leaf_lower_bound(root, DEFAULT_TOL).unwrap();
        for _ in 0..c {
            tree.leaf_upper_bound_sample(root, DEFAULT_TOL, &mut rng).unwrap();
        }
        if lower <= tree.leaf_upper_bound_mean(root).unwrap() + eps {
            ok += 1;
        }
    }
    assert!(ok >= 95, "{ok}/100");
}

#[test]
fn expectimax_lies_between_bounds() {
    // Depth-6 expectimax continued with the commit-to-best-mean value is a
    // realizable policy value, so it sits above the lower bound and below the
    // Bayes-optimal value, which the MC upper bound estimates.
    let gamma = 0.9;
    let c = 400;
    let eps = hoeffding_epsilon(c, 0.05, gamma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut inside = 0;
    let trials = 40;
    for _ in 0..trials {
        let arms: Vec<(f64, f64)> = (0..2)
            .map(|_| (rng.random_range(1..=5) as f64, rng.random_range(1..=5) as f64))
            .collect();
        let mut tree =
            BeliefTree::new(HyperState::new(0, Belief::bandit(&arms).unwrap()).unwrap(), gamma)
                .unwrap();
        let root = tree.root();
        let lower = tree.leaf_lower_bound(root, DEFAULT_TOL).unwrap();
        for _ in 0..c {
            tree.leaf_upper_bound_sample(root, DEFAULT_TOL, &mut rng).unwrap();
        }
        let upper = tree.node(root).unwrap().upper_value().unwrap();
        let mut params = arms.clone();
        let v6 = common::bandit_expectimax(&mut params, gamma, 6, &|p| common::commit_value(p, gamma));
        assert!(v6 >= lower - 1e-9, "{v6} < {lower}");
        if v6 <= upper + eps {
            inside += 1;
        }
    }
    assert!(inside >= trials * 95 / 100, "{inside}/{trials}");
}

#[test]
fn sampled_bandit_trees_have_ordered_bounds() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arms: Vec<(f64, f64)> = (0..2)
            .map(|_| (rng.random_range(1..=5) as f64, rng.random_range(1..=5) as f64))
            .collect();
        let root = HyperState::new(0, Belief::bandit(&arms).unwrap()).unwrap();
        // five serial-order expansions of the upper strategy reach depth 2
        let (tree, decision) = grow_tree(
            root,
            ExpansionBudget::expansions(5).unwrap(),
            ExpansionStrategy::HighProbUpperBound,
            0.9,
            &mut rng,
        )
        .unwrap();
        assert!(tree.nodes().any(|(_, n)| n.depth == 2));
        let b = &decision.diagnostics.root_bounds;
        for a in 0..2 {
            assert!(b.lower[a] <= b.upper[a] + 1e-12, "seed {seed}: {b:?}");
        }
    }
}
