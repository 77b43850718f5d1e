//! Seeded fixtures shared by the planning benchmarks.

use bamdp_core::{Belief, HyperState, Mdp, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a fixture seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// MDP with dense random transition rows and uniform reward means.
pub fn random_mdp(n_states: usize, n_actions: usize, seed: u64) -> Result<Mdp> {
    let mut rng = rng(seed);
    let mut transition = Vec::with_capacity(n_states * n_actions * n_states);
    for _ in 0..n_states * n_actions {
        let row: Vec<f64> = (0..n_states).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = row.iter().sum();
        transition.extend(row.iter().map(|p| p / total));
    }
    let rewards = (0..n_states * n_actions).map(|_| rng.random()).collect();
    Mdp::new(n_states, n_actions, transition, rewards)
}

/// Root hyper-state of a bandit whose arms have seen a few random pulls.
pub fn bandit_root(n_arms: usize, seed: u64) -> Result<HyperState> {
    let mut rng = rng(seed);
    let params: Vec<(f64, f64)> = (0..n_arms)
        .map(|_| {
            (
                1.0 + rng.random_range(0..5) as f64,
                1.0 + rng.random_range(0..5) as f64,
            )
        })
        .collect();
    HyperState::new(0, Belief::bandit(&params)?)
}

/// Root hyper-state of a multi-state problem under the uniform prior.
pub fn mdp_root(n_states: usize, n_actions: usize) -> Result<HyperState> {
    HyperState::new(0, Belief::uniform(n_states, n_actions)?)
}
