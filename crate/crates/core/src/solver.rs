//! Exact planning in known MDPs by discounted value iteration.

use crate::error::{check_discount, check_index, check_tolerance, Error, Result};
use crate::mdp::Mdp;

/// Default solver tolerance in sup-norm.
pub const DEFAULT_TOL: f64 = 1e-6;

/// A deterministic stationary policy: one action per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy(Vec<usize>);

impl Policy {
    pub fn new(actions: Vec<usize>, n_actions: usize) -> Result<Self> {
        for &a in &actions {
            check_index("action", a, n_actions)?;
        }
        Ok(Self(actions))
    }

    pub fn action(&self, s: usize) -> usize {
        self.0[s]
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction(Vec<f64>);

impl ValueFunction {
    pub fn value(&self, s: usize) -> f64 {
        self.0[s]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn sup_distance(&self, other: &ValueFunction) -> f64 {
        sup_distance(&self.0, &other.0)
    }
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn q_value(mdp: &Mdp, v: &[f64], gamma: f64, s: usize, a: usize) -> f64 {
    let future: f64 = mdp.row(s, a).iter().zip(v).map(|(p, x)| p * x).sum();
    mdp.reward(s, a) + gamma * future
}

/// `Q(s, a) = r(s, a) + γ Σ_{s'} P(s' | s, a) V(s')` for every action.
pub fn q_values(mdp: &Mdp, v: &ValueFunction, gamma: f64, s: usize) -> Result<Vec<f64>> {
    check_index("state", s, mdp.n_states())?;
    if v.0.len() != mdp.n_states() {
        return Err(Error::InvalidArgument(format!(
            "value function has {} entries for {} states",
            v.0.len(),
            mdp.n_states()
        )));
    }
    Ok((0..mdp.n_actions())
        .map(|a| q_value(mdp, &v.0, gamma, s, a))
        .collect())
}

/// One Bellman optimality sweep `V ↦ max_a Q(·, a)`.
pub fn bellman_sweep(mdp: &Mdp, gamma: f64, v: &[f64]) -> Vec<f64> {
    (0..mdp.n_states())
        .map(|s| {
            (0..mdp.n_actions())
                .map(|a| q_value(mdp, v, gamma, s, a))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Lowest-index argmax.
pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

fn greedy_policy(mdp: &Mdp, gamma: f64, v: &[f64]) -> Policy {
    let actions = (0..mdp.n_states())
        .map(|s| {
            let q: Vec<f64> = (0..mdp.n_actions())
                .map(|a| q_value(mdp, v, gamma, s, a))
                .collect();
            argmax(&q)
        })
        .collect();
    Policy(actions)
}

// Sweeps stop once the change drops below tol·(1−γ)/(2γ), which puts the
// iterate within tol/2 of the fixed point.
fn stop_threshold(gamma: f64, tol: f64) -> f64 {
    if gamma == 0.0 {
        f64::INFINITY
    } else {
        tol * (1.0 - gamma) / (2.0 * gamma)
    }
}

/// Optimal values and a greedy policy, with `V` within `tol` of `V*` in sup-norm.
///
/// Single-state MDPs are solved in closed form: `V* = max_a r(a) / (1 − γ)`.
pub fn value_iteration(mdp: &Mdp, gamma: f64, tol: f64) -> Result<(ValueFunction, Policy)> {
    check_discount(gamma)?;
    check_tolerance(tol)?;
    if mdp.n_states() == 1 {
        let rewards = mdp.reward_means();
        let best = argmax(rewards);
        let v = rewards[best] / (1.0 - gamma);
        return Ok((ValueFunction(vec![v]), Policy(vec![best])));
    }
    let threshold = stop_threshold(gamma, tol);
    let mut v = vec![0.0; mdp.n_states()];
    loop {
        let next = bellman_sweep(mdp, gamma, &v);
        let delta = sup_distance(&next, &v);
        v = next;
        if delta < threshold || delta == 0.0 {
            break;
        }
    }
    let policy = greedy_policy(mdp, gamma, &v);
    Ok((ValueFunction(v), policy))
}

/// `V^π` within `tol` in sup-norm.
pub fn policy_evaluation(
    mdp: &Mdp,
    policy: &Policy,
    gamma: f64,
    tol: f64,
) -> Result<ValueFunction> {
    check_discount(gamma)?;
    check_tolerance(tol)?;
    if policy.0.len() != mdp.n_states() {
        return Err(Error::InvalidArgument(format!(
            "policy covers {} states, MDP has {}",
            policy.0.len(),
            mdp.n_states()
        )));
    }
    for &a in &policy.0 {
        check_index("action", a, mdp.n_actions())?;
    }
    if mdp.n_states() == 1 {
        return Ok(ValueFunction(vec![
            mdp.reward(0, policy.0[0]) / (1.0 - gamma)
        ]));
    }
    let threshold = stop_threshold(gamma, tol);
    let mut v = vec![0.0; mdp.n_states()];
    loop {
        let next: Vec<f64> = (0..mdp.n_states())
            .map(|s| q_value(mdp, &v, gamma, s, policy.0[s]))
            .collect();
        let delta = sup_distance(&next, &v);
        v = next;
        if delta < threshold || delta == 0.0 {
            break;
        }
    }
    Ok(ValueFunction(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_bandit() {
        let m = Mdp::bandit(&[0.6, 0.4]).unwrap();
        let (v, pi) = value_iteration(&m, 0.5, DEFAULT_TOL).unwrap();
        assert!((v.value(0) - 1.2).abs() < 1e-12);
        assert_eq!(pi.action(0), 0);

        let worse = Policy::new(vec![1], 2).unwrap();
        let v = policy_evaluation(&m, &worse, 0.5, DEFAULT_TOL).unwrap();
        assert!((v.value(0) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn myopic_discount() {
        let m = Mdp::new(
            2,
            2,
            vec![0.3, 0.7, 1.0, 0.0, 0.5, 0.5, 0.0, 1.0],
            vec![0.1, 0.9, 0.4, 0.2],
        )
        .unwrap();
        let (v, pi) = value_iteration(&m, 0.0, DEFAULT_TOL).unwrap();
        assert_eq!(v.values(), &[0.9, 0.4]);
        assert_eq!(pi.actions(), &[1, 0]);
    }

    #[test]
    fn deterministic_cycle() {
        // 0 -> 1 -> 0 with rewards (1, 0), γ = 0.5. Solving
        // V0 = 1 + 0.5 V1, V1 = 0.5 V0 gives V0 = 4/3, V1 = 2/3.
        let m = Mdp::new(2, 1, vec![0.0, 1.0, 1.0, 0.0], vec![1.0, 0.0]).unwrap();
        let pi = Policy::new(vec![0, 0], 1).unwrap();
        let tol = 1e-9;
        let v = policy_evaluation(&m, &pi, 0.5, tol).unwrap();
        assert!((v.value(0) - 4.0 / 3.0).abs() < tol);
        assert!((v.value(1) - 2.0 / 3.0).abs() < tol);
    }

    #[test]
    fn rejects_bad_discount_and_tolerance() {
        let m = Mdp::bandit(&[0.5]).unwrap();
        assert_eq!(
            value_iteration(&m, 1.0, 1e-6).unwrap_err(),
            Error::InvalidDiscount(1.0)
        );
        assert!(value_iteration(&m, -0.1, 1e-6).is_err());
        assert!(value_iteration(&m, 0.5, 0.0).is_err());
        let pi = Policy::new(vec![0], 1).unwrap();
        assert!(policy_evaluation(&m, &pi, 1.5, 1e-6).is_err());
    }

    #[test]
    fn ties_prefer_lowest_action() {
        let m = Mdp::bandit(&[0.5, 0.5, 0.5]).unwrap();
        let (_, pi) = value_iteration(&m, 0.9, DEFAULT_TOL).unwrap();
        assert_eq!(pi.action(0), 0);
    }

    #[test]
    fn policy_rejects_out_of_range_action() {
        assert!(Policy::new(vec![0, 3], 3).is_err());
    }
}
