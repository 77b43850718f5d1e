//! Conjugate belief over discrete MDPs.
//!
//! The posterior factorizes over state-action pairs: each `(s, a)` carries a
//! Dirichlet over next states and a Beta over the Bernoulli reward. Updating
//! with an observation `(s, a, s', r)` touches only the `(s, a)` factor.
//!
//! Beliefs are plain values. [`Belief::posterior_update`] returns a new belief and
//! leaves the receiver untouched, so tree nodes can hold their own copies.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{check_index, Error, Result};
use crate::mdp::Mdp;

/// Dirichlet parameters `ψ^{s,a}` laid out `[s][a][s']`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletTransitionBelief {
    n_states: usize,
    n_actions: usize,
    counts: Vec<f64>,
}

impl DirichletTransitionBelief {
    /// Every parameter set to `prior`.
    pub fn uniform(n_states: usize, n_actions: usize, prior: f64) -> Result<Self> {
        Self::from_counts(
            n_states,
            n_actions,
            vec![prior; n_states * n_actions * n_states],
        )
    }

    pub fn from_counts(n_states: usize, n_actions: usize, counts: Vec<f64>) -> Result<Self> {
        if n_states == 0 || n_actions == 0 {
            return Err(Error::InvalidArgument(
                "belief needs at least one state and one action".into(),
            ));
        }
        if counts.len() != n_states * n_actions * n_states {
            return Err(Error::InvalidArgument(format!(
                "expected {} transition counts, got {}",
                n_states * n_actions * n_states,
                counts.len()
            )));
        }
        if let Some(c) = counts.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "transition count {c} is not a finite nonnegative number"
            )));
        }
        Ok(Self {
            n_states,
            n_actions,
            counts,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// `ψ^{s,a}` as a slice over next states.
    pub fn params(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &self.counts[start..start + self.n_states]
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    fn params_mut(&mut self, s: usize, a: usize) -> &mut [f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &mut self.counts[start..start + self.n_states]
    }

    fn total(&self, s: usize, a: usize) -> Result<f64> {
        let total: f64 = self.params(s, a).iter().sum();
        if total > 0.0 {
            Ok(total)
        } else {
            Err(Error::DegenerateBelief {
                state: s,
                action: a,
                reason: "Dirichlet parameters sum to zero",
            })
        }
    }
}

/// Beta parameters `(α^{s,a}, β^{s,a})` for Bernoulli rewards, laid out `[s][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaRewardBelief {
    n_actions: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl BetaRewardBelief {
    pub fn uniform(n_states: usize, n_actions: usize, alpha: f64, beta: f64) -> Result<Self> {
        let n = n_states * n_actions;
        Self::from_params(n_states, n_actions, vec![alpha; n], vec![beta; n])
    }

    pub fn from_params(
        n_states: usize,
        n_actions: usize,
        alpha: Vec<f64>,
        beta: Vec<f64>,
    ) -> Result<Self> {
        let n = n_states * n_actions;
        if n == 0 {
            return Err(Error::InvalidArgument(
                "belief needs at least one state and one action".into(),
            ));
        }
        if alpha.len() != n || beta.len() != n {
            return Err(Error::InvalidArgument(format!(
                "expected {n} Beta parameters per side, got {} and {}",
                alpha.len(),
                beta.len()
            )));
        }
        if let Some(p) = alpha
            .iter()
            .chain(&beta)
            .find(|p| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "Beta parameter {p} is not a finite nonnegative number"
            )));
        }
        Ok(Self {
            n_actions,
            alpha,
            beta,
        })
    }

    pub fn alpha(&self, s: usize, a: usize) -> f64 {
        self.alpha[s * self.n_actions + a]
    }

    pub fn beta(&self, s: usize, a: usize) -> f64 {
        self.beta[s * self.n_actions + a]
    }

    /// Posterior mean `α / (α + β)`.
    pub fn mean(&self, s: usize, a: usize) -> Result<f64> {
        let (alpha, beta) = (self.alpha(s, a), self.beta(s, a));
        let total = alpha + beta;
        if total > 0.0 {
            Ok(alpha / total)
        } else {
            Err(Error::DegenerateBelief {
                state: s,
                action: a,
                reason: "Beta parameters sum to zero",
            })
        }
    }
}

/// Product of per-`(s, a)` Dirichlet transition and Beta reward posteriors.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    pub transitions: DirichletTransitionBelief,
    pub rewards: BetaRewardBelief,
}

impl Belief {
    /// Dirichlet(1, …, 1) transitions and Beta(1, 1) rewards everywhere.
    pub fn uniform(n_states: usize, n_actions: usize) -> Result<Self> {
        Self::with_priors(n_states, n_actions, 1.0, 1.0, 1.0)
    }

    /// Same prior for every pair: Dirichlet(`dirichlet`, …) and Beta(`alpha`, `beta`).
    ///
    /// Zero parameters are accepted here; they only fail once a prediction
    /// needs them.
    pub fn with_priors(
        n_states: usize,
        n_actions: usize,
        dirichlet: f64,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        Ok(Self {
            transitions: DirichletTransitionBelief::uniform(n_states, n_actions, dirichlet)?,
            rewards: BetaRewardBelief::uniform(n_states, n_actions, alpha, beta)?,
        })
    }

    /// A one-state belief where arm `a` has reward prior Beta(`arms[a].0`, `arms[a].1`).
    pub fn bandit(arms: &[(f64, f64)]) -> Result<Self> {
        let n = arms.len();
        Ok(Self {
            transitions: DirichletTransitionBelief::uniform(1, n, 1.0)?,
            rewards: BetaRewardBelief::from_params(
                1,
                n,
                arms.iter().map(|p| p.0).collect(),
                arms.iter().map(|p| p.1).collect(),
            )?,
        })
    }

    pub fn new(transitions: DirichletTransitionBelief, rewards: BetaRewardBelief) -> Result<Self> {
        if rewards.alpha.len() != transitions.n_states * transitions.n_actions
            || rewards.n_actions != transitions.n_actions
        {
            return Err(Error::InvalidArgument(
                "transition and reward beliefs disagree on shape".into(),
            ));
        }
        Ok(Self {
            transitions,
            rewards,
        })
    }

    pub fn n_states(&self) -> usize {
        self.transitions.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.transitions.n_actions
    }

    fn check_pair(&self, s: usize, a: usize) -> Result<()> {
        check_index("state", s, self.n_states())?;
        check_index("action", a, self.n_actions())
    }

    /// Conjugate update with the observation `(s, a) → (s_next, reward)`.
    pub fn posterior_update(&self, s: usize, a: usize, s_next: usize, reward: bool) -> Result<Self> {
        let mut next = self.clone();
        next.update_in_place(s, a, s_next, reward)?;
        Ok(next)
    }

    pub fn update_in_place(&mut self, s: usize, a: usize, s_next: usize, reward: bool) -> Result<()> {
        self.check_pair(s, a)?;
        check_index("state", s_next, self.n_states())?;
        self.transitions.params_mut(s, a)[s_next] += 1.0;
        let idx = s * self.n_actions() + a;
        if reward {
            self.rewards.alpha[idx] += 1.0;
        } else {
            self.rewards.beta[idx] += 1.0;
        }
        Ok(())
    }

    /// Predictive probability of the outcome `(s_next, reward)` after taking
    /// `a` in `s`: `μ̄(s_next | s, a) · P̄(reward | s, a)`.
    pub fn predictive_prob(&self, s: usize, a: usize, s_next: usize, reward: bool) -> Result<f64> {
        self.check_pair(s, a)?;
        check_index("state", s_next, self.n_states())?;
        let p_next = self.transitions.params(s, a)[s_next] / self.transitions.total(s, a)?;
        let p_one = self.rewards.mean(s, a)?;
        Ok(p_next * if reward { p_one } else { 1.0 - p_one })
    }

    /// The MDP whose parameters are the posterior means.
    pub fn mean_mdp(&self) -> Result<Mdp> {
        let (ns, na) = (self.n_states(), self.n_actions());
        let mut transition = Vec::with_capacity(ns * na * ns);
        let mut reward = Vec::with_capacity(ns * na);
        for s in 0..ns {
            for a in 0..na {
                let total = self.transitions.total(s, a)?;
                transition.extend(self.transitions.params(s, a).iter().map(|c| c / total));
                reward.push(self.rewards.mean(s, a)?);
            }
        }
        Ok(Mdp::from_parts_unchecked(ns, na, transition, reward))
    }

    /// Draws one MDP from the posterior. Dirichlet rows come from normalized
    /// Gamma draws and reward means from a pair of Gamma draws.
    pub fn sample_mdp<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Mdp> {
        let (ns, na) = (self.n_states(), self.n_actions());
        let mut transition = Vec::with_capacity(ns * na * ns);
        let mut reward = Vec::with_capacity(ns * na);
        for s in 0..ns {
            for a in 0..na {
                let params = self.transitions.params(s, a);
                if params.iter().any(|p| *p <= 0.0) {
                    return Err(Error::DegenerateBelief {
                        state: s,
                        action: a,
                        reason: "sampling needs strictly positive Dirichlet parameters",
                    });
                }
                let (alpha, beta) = (self.rewards.alpha(s, a), self.rewards.beta(s, a));
                if alpha <= 0.0 || beta <= 0.0 {
                    return Err(Error::DegenerateBelief {
                        state: s,
                        action: a,
                        reason: "sampling needs strictly positive Beta parameters",
                    });
                }
                let start = transition.len();
                if ns == 1 {
                    transition.push(1.0);
                } else {
                    sample_dirichlet_into(params, rng, &mut transition);
                }
                debug_assert_eq!(transition.len(), start + ns);
                reward.push(sample_beta(alpha, beta, rng));
            }
        }
        Ok(Mdp::from_parts_unchecked(ns, na, transition, reward))
    }
}

fn gamma_draw<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    // shape > 0 and finite are checked by the callers
    Gamma::new(shape, 1.0)
        .expect("positive finite gamma shape")
        .sample(rng)
}

fn sample_dirichlet_into<R: Rng + ?Sized>(params: &[f64], rng: &mut R, out: &mut Vec<f64>) {
    let start = out.len();
    let mut total = 0.0;
    for &p in params {
        let g = gamma_draw(p, rng);
        total += g;
        out.push(g);
    }
    if total > 0.0 {
        for x in &mut out[start..] {
            *x /= total;
        }
    } else {
        // Every draw underflowed (tiny shapes): put the mass on the largest parameter.
        let best = argmax(params);
        for (i, x) in out[start..].iter_mut().enumerate() {
            *x = if i == best { 1.0 } else { 0.0 };
        }
    }
}

fn sample_beta<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    let x = gamma_draw(alpha, rng);
    let y = gamma_draw(beta, rng);
    if x + y > 0.0 {
        x / (x + y)
    } else {
        alpha / (alpha + beta)
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}
