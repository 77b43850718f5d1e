//! Concrete discrete MDPs with Bernoulli reward means.

use crate::error::{check_index, Error, Result};

/// Tolerance on row sums of a transition kernel.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// A finite MDP: transition kernel `P(s' | s, a)` and mean reward in `[0, 1]`
/// for every state-action pair.
///
/// Storage is flat: transitions are laid out `[s][a][s']`, rewards `[s][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    n_states: usize,
    n_actions: usize,
    transition: Vec<f64>,
    reward_mean: Vec<f64>,
}

impl Mdp {
    /// Builds an MDP after checking that every row is a probability vector and
    /// every reward mean lies in `[0, 1]`.
    pub fn new(
        n_states: usize,
        n_actions: usize,
        transition: Vec<f64>,
        reward_mean: Vec<f64>,
    ) -> Result<Self> {
        if n_states == 0 || n_actions == 0 {
            return Err(Error::InvalidMdp(
                "state and action counts must be positive".into(),
            ));
        }
        if transition.len() != n_states * n_actions * n_states {
            return Err(Error::InvalidMdp(format!(
                "transition tensor has {} entries, expected {}",
                transition.len(),
                n_states * n_actions * n_states
            )));
        }
        if reward_mean.len() != n_states * n_actions {
            return Err(Error::InvalidMdp(format!(
                "reward table has {} entries, expected {}",
                reward_mean.len(),
                n_states * n_actions
            )));
        }
        let mdp = Self {
            n_states,
            n_actions,
            transition,
            reward_mean,
        };
        for s in 0..n_states {
            for a in 0..n_actions {
                let row = mdp.row(s, a);
                if row.iter().any(|p| p.is_nan() || *p < 0.0) {
                    return Err(Error::InvalidMdp(format!(
                        "negative or NaN transition probability at ({s}, {a})"
                    )));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(Error::InvalidMdp(format!(
                        "transition row ({s}, {a}) sums to {total}"
                    )));
                }
                let r = mdp.reward(s, a);
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::InvalidMdp(format!(
                        "reward mean {r} at ({s}, {a}) outside [0, 1]"
                    )));
                }
            }
        }
        Ok(mdp)
    }

    /// A single-state MDP whose actions are Bernoulli arms.
    pub fn bandit(arm_means: &[f64]) -> Result<Self> {
        Self::new(
            1,
            arm_means.len(),
            vec![1.0; arm_means.len()],
            arm_means.to_vec(),
        )
    }

    pub(crate) fn from_parts_unchecked(
        n_states: usize,
        n_actions: usize,
        transition: Vec<f64>,
        reward_mean: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(transition.len(), n_states * n_actions * n_states);
        debug_assert_eq!(reward_mean.len(), n_states * n_actions);
        Self {
            n_states,
            n_actions,
            transition,
            reward_mean,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// `P(· | s, a)`.
    pub fn row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &self.transition[start..start + self.n_states]
    }

    pub fn transition_prob(&self, s: usize, a: usize, s_next: usize) -> Result<f64> {
        check_index("state", s, self.n_states)?;
        check_index("action", a, self.n_actions)?;
        check_index("state", s_next, self.n_states)?;
        Ok(self.row(s, a)[s_next])
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.reward_mean[s * self.n_actions + a]
    }

    pub fn reward_means(&self) -> &[f64] {
        &self.reward_mean
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_rows_that_do_not_sum_to_one() {
        let err = Mdp::new(2, 1, vec![0.5, 0.4, 0.0, 1.0], vec![0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidMdp(_)));
    }

    #[test]
    fn rejects_reward_outside_unit_interval() {
        assert!(Mdp::bandit(&[0.2, 1.5]).is_err());
        assert!(Mdp::bandit(&[-0.1]).is_err());
    }

    #[test]
    fn bandit_layout() {
        let m = Mdp::bandit(&[0.6, 0.4]).unwrap();
        assert_eq!(m.n_states(), 1);
        assert_eq!(m.n_actions(), 2);
        assert_eq!(m.row(0, 1), &[1.0]);
        assert_eq!(m.reward(0, 1), 0.4);
        assert!(m.transition_prob(0, 2, 0).is_err());
    }
}
