//! Reference agents for regret comparisons: UCB1 and greedy selection on the
//! mean MDP.

use crate::belief::Belief;
use crate::error::{check_index, Result};
use crate::solver::{argmax, q_values, value_iteration, DEFAULT_TOL};

/// Pull counts and reward sums for UCB1 over `n` arms.
#[derive(Debug, Clone, PartialEq)]
pub struct Ucb1State {
    pull_count: Vec<u64>,
    reward_sum: Vec<f64>,
    t: u64,
}

impl Ucb1State {
    pub fn new(n_arms: usize) -> Self {
        Self {
            pull_count: vec![0; n_arms],
            reward_sum: vec![0.0; n_arms],
            t: 0,
        }
    }

    /// Builds a state from explicit statistics; `t` is the total pull count.
    pub fn from_counts(pull_count: Vec<u64>, reward_sum: Vec<f64>) -> Self {
        let t = pull_count.iter().sum();
        Self {
            pull_count,
            reward_sum,
            t,
        }
    }

    pub fn pull_count(&self) -> &[u64] {
        &self.pull_count
    }

    pub fn reward_sum(&self) -> &[f64] {
        &self.reward_sum
    }

    pub fn total_pulls(&self) -> u64 {
        self.t
    }

    /// Unpulled arms first (lowest index), then the arm maximizing
    /// `mean + sqrt(2 ln t / n_a)`.
    pub fn select(&self) -> usize {
        if let Some(arm) = self.pull_count.iter().position(|&n| n == 0) {
            return arm;
        }
        let log_t = (self.t as f64).ln();
        let index: Vec<f64> = self
            .pull_count
            .iter()
            .zip(&self.reward_sum)
            .map(|(&n, &sum)| {
                let n = n as f64;
                sum / n + (2.0 * log_t / n).sqrt()
            })
            .collect();
        argmax(&index)
    }

    pub fn observe(&mut self, arm: usize, reward: bool) -> Result<()> {
        check_index("arm", arm, self.pull_count.len())?;
        self.pull_count[arm] += 1;
        self.reward_sum[arm] += if reward { 1.0 } else { 0.0 };
        self.t += 1;
        Ok(())
    }
}

pub fn ucb1_select(state: &Ucb1State) -> usize {
    state.select()
}

pub fn ucb1_update(state: &Ucb1State, arm: usize, reward: bool) -> Result<Ucb1State> {
    let mut next = state.clone();
    next.observe(arm, reward)?;
    Ok(next)
}

/// The action maximizing `Q*(s, ·)` in the belief's mean MDP.
pub fn bayes_greedy(belief: &Belief, s: usize, gamma: f64) -> Result<usize> {
    check_index("state", s, belief.n_states())?;
    let mean = belief.mean_mdp()?;
    let (v, _) = value_iteration(&mean, gamma, DEFAULT_TOL)?;
    Ok(argmax(&q_values(&mean, &v, gamma, s)?))
}
