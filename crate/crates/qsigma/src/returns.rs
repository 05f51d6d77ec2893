//! Multi-step TD errors and backup returns computed over recorded trajectory
//! windows. A window holds one entry per visited time index plus a tail that
//! says how it ends (episode termination or bootstrapping at a final state).
//!
//! Index convention: `steps[j]` describes time t+j. The TD error at interior
//! index j reads the next entry's stored values; the TD error at the last
//! index reads the tail. Products that weight later corrections (expectation
//! weights, importance-sampling factors) run over indices 1.. of the window,
//! matching recursions that start one step after the update target.

use crate::error::{Error, Result};
use crate::policy::PolicyModel;
use crate::state::StateRef;
use crate::values::ActionValues;

/// One recorded time index inside a window.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentStep {
    /// Target-policy probability of the action actually taken here.
    pub target_prob: f64,
    /// Behavior-policy probability of that same action.
    pub behavior_prob: f64,
    /// Sampling degree queried for this time index. The leading entry's value
    /// never enters any computation (recursions start one index later).
    pub sigma: f64,
    /// Action-value estimate of (state, action) recorded when visited.
    pub q_sa: f64,
    /// Expected action value under the target policy, recorded when visited.
    pub v: f64,
    /// Reward observed on leaving this index.
    pub reward: f64,
}

/// How the window ends at the index after the last step.
#[derive(Clone, Debug, PartialEq)]
pub enum SegmentTail {
    /// The episode terminated; all bootstrap terms are zero.
    Terminal,
    /// The trajectory continues; bootstrap from the recorded estimates.
    Bootstrap { q_sa: f64, v: f64, sigma: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySegment {
    pub gamma: f64,
    pub steps: Vec<SegmentStep>,
    pub tail: SegmentTail,
}

impl TrajectorySegment {
    fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::EmptySegment);
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma", format!("{} outside [0, 1]", self.gamma)));
        }
        Ok(())
    }

    /// Per-index view used by the blended return: (sigma, q, v, reward at j,
    /// terminal?) for the entry after index j.
    fn after(&self, j: usize) -> (f64, f64, f64, bool) {
        if j + 1 < self.steps.len() {
            let nxt = &self.steps[j + 1];
            (nxt.sigma, nxt.q_sa, nxt.v, false)
        } else {
            match &self.tail {
                SegmentTail::Terminal => (0.0, 0.0, 0.0, true),
                SegmentTail::Bootstrap { q_sa, v, sigma } => (*sigma, *q_sa, *v, false),
            }
        }
    }
}

/// Sampled one-step TD error: r + gamma * q_next - q_cur.
pub fn td_error_sarsa(r: f64, gamma: f64, q_next: f64, q_cur: f64) -> f64 {
    r + gamma * q_next - q_cur
}

/// Expectation-based one-step TD error: r + gamma * v_next - q_cur.
pub fn td_error_expected_sarsa(r: f64, gamma: f64, v_next: f64, q_cur: f64) -> f64 {
    r + gamma * v_next - q_cur
}

/// Max-bootstrap TD error; an empty next row means the transition terminated.
pub fn td_error_q_learning(r: f64, gamma: f64, q_next_row: &[f64], q_cur: f64) -> f64 {
    let best = q_next_row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bootstrap = if q_next_row.is_empty() { 0.0 } else { best };
    r + gamma * bootstrap - q_cur
}

/// Blended TD error: sigma interpolates between the sampled bootstrap q_next
/// and the expected bootstrap v_next.
pub fn td_error_sigma(
    r: f64,
    gamma: f64,
    sigma: f64,
    q_next: f64,
    v_next: f64,
    q_cur: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::invalid("sigma", format!("{sigma} outside [0, 1]")));
    }
    Ok(r + gamma * (sigma * q_next + (1.0 - sigma) * v_next) - q_cur)
}

/// Expected action value under `policy`; zero exactly at terminal states.
pub fn expected_action_value(q: &ActionValues, policy: &PolicyModel, s: &StateRef) -> Result<f64> {
    policy.expected_value(q, s)
}

/// Discounted sum of rewards, bootstrapping on the tail's sampled value.
pub fn nstep_return_sarsa(seg: &TrajectorySegment) -> Result<f64> {
    seg.validate()?;
    let mut g = 0.0;
    let mut discount = 1.0;
    for step in &seg.steps {
        g += discount * step.reward;
        discount *= seg.gamma;
    }
    if let SegmentTail::Bootstrap { q_sa, .. } = &seg.tail {
        g += discount * q_sa;
    }
    Ok(g)
}

/// Discounted sum of rewards, bootstrapping on the tail's expected value.
pub fn nstep_return_expected_sarsa(seg: &TrajectorySegment) -> Result<f64> {
    seg.validate()?;
    let mut g = 0.0;
    let mut discount = 1.0;
    for step in &seg.steps {
        g += discount * step.reward;
        discount *= seg.gamma;
    }
    if let SegmentTail::Bootstrap { v, .. } = &seg.tail {
        g += discount * v;
    }
    Ok(g)
}

/// Expectation-backup return: the leading estimate plus expectation-weighted
/// TD errors, each later correction scaled by the product of gamma times the
/// target probabilities of the actions actually taken along the way.
pub fn nstep_return_tree_backup(seg: &TrajectorySegment) -> Result<f64> {
    seg.validate()?;
    let mut g = seg.steps[0].q_sa;
    let mut weight = 1.0;
    let last = seg.steps.len() - 1;
    for j in 0..=last {
        let (_, _, v_next, terminal) = seg.after(j);
        let step = &seg.steps[j];
        let delta = if terminal {
            step.reward - step.q_sa
        } else {
            td_error_expected_sarsa(step.reward, seg.gamma, v_next, step.q_sa)
        };
        g += weight * delta;
        if j < last {
            weight *= seg.gamma * seg.steps[j + 1].target_prob;
        }
    }
    Ok(g)
}

/// Blended-backup return: like the tree backup but each later correction is
/// weighted by gamma * ((1 - sigma) * target_prob + sigma), and each TD error
/// blends sampled and expected bootstraps by that index's sigma.
pub fn nstep_return_q_sigma(seg: &TrajectorySegment) -> Result<f64> {
    seg.validate()?;
    for step in &seg.steps {
        if !(0.0..=1.0).contains(&step.sigma) {
            return Err(Error::invalid("sigma", format!("{} outside [0, 1]", step.sigma)));
        }
    }
    if let SegmentTail::Bootstrap { sigma, .. } = &seg.tail {
        if !(0.0..=1.0).contains(sigma) {
            return Err(Error::invalid("sigma", format!("{sigma} outside [0, 1]")));
        }
    }
    let mut g = seg.steps[0].q_sa;
    let mut weight = 1.0;
    let last = seg.steps.len() - 1;
    for j in 0..=last {
        let (sig_next, q_next, v_next, terminal) = seg.after(j);
        let step = &seg.steps[j];
        let delta = if terminal {
            step.reward - step.q_sa
        } else {
            td_error_sigma(step.reward, seg.gamma, sig_next, q_next, v_next, step.q_sa)?
        };
        g += weight * delta;
        if j < last {
            let nxt = &seg.steps[j + 1];
            weight *= seg.gamma * ((1.0 - nxt.sigma) * nxt.target_prob + nxt.sigma);
        }
    }
    Ok(g)
}

/// Ordinary importance-sampling ratio over every action in the window.
pub fn importance_ratio(seg: &TrajectorySegment) -> Result<f64> {
    seg.validate()?;
    let mut rho = 1.0;
    for step in &seg.steps {
        if !(step.behavior_prob > 0.0) {
            return Err(Error::ZeroBehaviorProb);
        }
        rho *= step.target_prob / step.behavior_prob;
    }
    Ok(rho)
}

/// Sigma-weighted importance-sampling ratio over indices 1.. of the window:
/// each factor is sigma * (target / behavior) + 1 - sigma, so fully expected
/// steps contribute no correction.
pub fn importance_ratio_sigma(seg: &TrajectorySegment) -> Result<f64> {
    seg.validate()?;
    let mut rho = 1.0;
    for step in &seg.steps[1..] {
        if !(step.behavior_prob > 0.0) {
            return Err(Error::ZeroBehaviorProb);
        }
        rho *= step.sigma * (step.target_prob / step.behavior_prob) + 1.0 - step.sigma;
    }
    Ok(rho)
}
