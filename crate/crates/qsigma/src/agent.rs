//! Incremental multi-step TD control with a per-step sampling degree.
//!
//! The agent stores one record per visited time index in a ring buffer of
//! capacity n + 1 and applies the update for time tau = t - n + 1 as soon as
//! its window of TD errors is complete, so memory stays O(n) regardless of
//! episode length. Each record snapshots the value estimates at visit time;
//! TD errors blend sampled and expected bootstraps by the sigma queried for
//! the following index. The applied step is alpha * rho * (G - Q(S_tau,A_tau))
//! computed as alpha * rho * sum of weighted TD errors, which is that exact
//! quantity because the return's base estimate cancels against the subtraction.

use crate::error::{Error, Result};
use crate::policy::PolicyModel;
use crate::returns::{td_error_sigma, SegmentStep, SegmentTail, TrajectorySegment};
use crate::rng::RngStream;
use crate::sigma::SigmaSchedule;
use crate::state::{ActionId, StateRef};
use crate::values::ActionValues;

/// Everything remembered about one visited time index.
#[derive(Clone, Debug)]
pub struct TransitionRecord {
    pub state: StateRef,
    pub action: ActionId,
    /// Reward observed on leaving this index; filled by the next step call.
    pub reward: f64,
    /// Q(state, action) at visit time.
    pub q_snapshot: f64,
    /// Expected action value under the target policy at visit time.
    pub v_snapshot: f64,
    /// Blended TD error for leaving this index; filled by the next step call.
    pub delta_sigma: f64,
    /// Sampling degree queried for this index.
    pub sigma: f64,
    /// Target-policy probability of the action taken.
    pub target_prob: f64,
    /// Behavior-policy probability of the action taken.
    pub behavior_prob: f64,
    /// target_prob / behavior_prob.
    pub rho: f64,
}

/// One applied update, recorded when tracing is enabled.
#[derive(Clone, Debug)]
pub struct UpdateTrace {
    /// Time index whose (state, action) estimate was moved.
    pub tau: usize,
    /// Sigma-weighted importance ratio applied to the step.
    pub rho: f64,
    /// Sum of expectation-weighted TD errors: G minus the stored snapshot.
    pub delta_sum: f64,
    /// The multi-step return seen by this update.
    pub g: f64,
    /// alpha * rho * delta_sum, exactly as handed to the estimates.
    pub applied_step: f64,
    /// The window this update was computed from, in replayable form.
    pub segment: TrajectorySegment,
}

/// The named backup rules expressible as special cases of the blended update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmKind {
    Sarsa,
    ExpectedSarsa,
    TreeBackup,
    QLearning,
    QSigma,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::Sarsa,
        AlgorithmKind::ExpectedSarsa,
        AlgorithmKind::TreeBackup,
        AlgorithmKind::QLearning,
        AlgorithmKind::QSigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Sarsa => "sarsa",
            AlgorithmKind::ExpectedSarsa => "expected_sarsa",
            AlgorithmKind::TreeBackup => "tree_backup",
            AlgorithmKind::QLearning => "q_learning",
            AlgorithmKind::QSigma => "q_sigma",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::UnknownName { kind: "algorithm", name: name.to_string() })
    }
}

/// Construction parameters shared by all algorithm variants.
pub struct AgentParams {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub q: ActionValues,
    pub behavior: PolicyModel,
    /// Policy whose expectations the backup targets; None means on-policy
    /// (target = behavior).
    pub target: Option<PolicyModel>,
    /// Sampling-degree schedule; only the blended variant accepts one.
    pub sigma: Option<SigmaSchedule>,
}

/// Builds an agent configured as the requested named algorithm.
pub fn make_algorithm(kind: AlgorithmKind, params: AgentParams) -> Result<QSigmaAgent> {
    let AgentParams { n, alpha, gamma, q, behavior, target, sigma } = params;
    if sigma.is_some() && kind != AlgorithmKind::QSigma {
        return Err(Error::invalid(
            "sigma schedule",
            format!("{} fixes its own sampling degree", kind.name()),
        ));
    }
    let target = match (kind, target) {
        (AlgorithmKind::QLearning, None) => PolicyModel::greedy(),
        (AlgorithmKind::QLearning, Some(t)) => {
            if t != PolicyModel::greedy() {
                return Err(Error::invalid(
                    "target policy",
                    "q_learning requires the greedy target; omit the target",
                ));
            }
            t
        }
        (_, Some(t)) => t,
        (_, None) => behavior.clone(),
    };
    let (schedule, final_step_expectation) = match kind {
        AlgorithmKind::Sarsa => (SigmaSchedule::constant(1.0)?, false),
        AlgorithmKind::ExpectedSarsa => (SigmaSchedule::constant(1.0)?, true),
        AlgorithmKind::TreeBackup => (SigmaSchedule::constant(0.0)?, false),
        AlgorithmKind::QLearning => (SigmaSchedule::constant(0.0)?, false),
        AlgorithmKind::QSigma => (
            sigma.ok_or_else(|| {
                Error::invalid("sigma schedule", "q_sigma needs a sampling-degree schedule")
            })?,
            false,
        ),
    };
    QSigmaAgent::new(q, behavior, target, n, alpha, gamma, schedule, final_step_expectation)
}

pub struct QSigmaAgent {
    q: ActionValues,
    behavior: PolicyModel,
    target: PolicyModel,
    n: usize,
    alpha: f64,
    gamma: f64,
    sigma: SigmaSchedule,
    /// Replace the last TD error of each full-length window with its
    /// expectation form (the classical multi-step Expected Sarsa backup).
    final_step_expectation: bool,
    /// Ring buffer of the last n + 1 records, indexed by time mod (n + 1).
    buf: Vec<Option<TransitionRecord>>,
    /// Number of time indices recorded in the current episode.
    len: usize,
    /// Episode length T, once the terminal transition has been observed.
    horizon: Option<usize>,
    in_episode: bool,
    /// Highest tau already updated this episode; -1 before the first.
    applied_hi: isize,
    traces: Option<Vec<UpdateTrace>>,
}

impl QSigmaAgent {
    #[allow(clippy::too_many_arguments)]
    fn new(
        q: ActionValues,
        behavior: PolicyModel,
        target: PolicyModel,
        n: usize,
        alpha: f64,
        gamma: f64,
        sigma: SigmaSchedule,
        final_step_expectation: bool,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "the backup length must be at least 1"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid("alpha", format!("{alpha} outside (0, 1]")));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid("gamma", format!("{gamma} outside [0, 1]")));
        }
        let capacity = n + 1;
        Ok(Self {
            q,
            behavior,
            target,
            n,
            alpha,
            gamma,
            sigma,
            final_step_expectation,
            buf: (0..capacity).map(|_| None).collect(),
            len: 0,
            horizon: None,
            in_episode: false,
            applied_hi: -1,
            traces: None,
        })
    }

    pub fn q(&self) -> &ActionValues {
        &self.q
    }

    pub fn into_q(self) -> ActionValues {
        self.q
    }

    pub fn target_policy(&self) -> &PolicyModel {
        &self.target
    }

    /// Start recording one [`UpdateTrace`] per applied update.
    pub fn enable_tracing(&mut self) {
        if self.traces.is_none() {
            self.traces = Some(Vec::new());
        }
    }

    pub fn drain_traces(&mut self) -> Vec<UpdateTrace> {
        self.traces.as_mut().map(std::mem::take).unwrap_or_default()
    }

    fn rec(&self, time: usize) -> &TransitionRecord {
        self.buf[time % self.buf.len()].as_ref().expect("record in window")
    }

    fn rec_mut(&mut self, time: usize) -> &mut TransitionRecord {
        let cap = self.buf.len();
        self.buf[time % cap].as_mut().expect("record in window")
    }

    /// Snapshots the estimates at `state`, samples an action from the behavior
    /// policy, and stores the record for this time index.
    fn record_visit(&mut self, state: &StateRef, rng: &mut RngStream) -> Result<ActionId> {
        let row = self.q.values_row(state)?;
        let action = self.behavior.sample_from_row(&row, rng);
        let target_prob = self.target.prob_from_row(&row, action);
        let behavior_prob = self.behavior.prob_from_row(&row, action);
        let record = TransitionRecord {
            state: state.clone(),
            action,
            reward: f64::NAN,
            q_snapshot: row[action],
            v_snapshot: self.target.expected_from_row(&row),
            delta_sigma: f64::NAN,
            sigma: self.sigma.query_step(),
            target_prob,
            behavior_prob,
            rho: target_prob / behavior_prob,
        };
        let cap = self.buf.len();
        self.buf[self.len % cap] = Some(record);
        self.len += 1;
        Ok(action)
    }

    /// Begins an episode at `s0` and returns the first action to take.
    pub fn begin_episode(&mut self, s0: &StateRef, rng: &mut RngStream) -> Result<ActionId> {
        if self.in_episode {
            return Err(Error::Protocol("begin_episode called while an episode is open"));
        }
        if s0.is_terminal() {
            return Err(Error::Terminal { op: "begin_episode" });
        }
        self.in_episode = true;
        self.len = 0;
        self.horizon = None;
        self.applied_hi = -1;
        self.record_visit(s0, rng)
    }

    /// Feeds back the observed reward and successor state, returning the next
    /// action to take, or None when the successor is terminal.
    pub fn step(
        &mut self,
        reward: f64,
        s_next: &StateRef,
        rng: &mut RngStream,
    ) -> Result<Option<ActionId>> {
        if !self.in_episode {
            return Err(Error::Protocol("step called before begin_episode"));
        }
        if self.horizon.is_some() {
            return Err(Error::Protocol("step called after the terminal transition"));
        }
        if !reward.is_finite() {
            return Err(Error::NonFinite { what: "reward" });
        }
        let t = self.len - 1;
        let next_action = if s_next.is_terminal() {
            self.horizon = Some(t + 1);
            let rec = self.rec_mut(t);
            rec.reward = reward;
            rec.delta_sigma = reward - rec.q_snapshot;
            None
        } else {
            let row = self.q.values_row(s_next)?;
            let action = self.behavior.sample_from_row(&row, rng);
            let sigma_next = self.sigma.query_step();
            let target_prob = self.target.prob_from_row(&row, action);
            let behavior_prob = self.behavior.prob_from_row(&row, action);
            let q_next = row[action];
            let v_next = self.target.expected_from_row(&row);
            let delta = td_error_sigma(
                reward,
                self.gamma,
                sigma_next,
                q_next,
                v_next,
                self.rec(t).q_snapshot,
            )?;
            let rec = self.rec_mut(t);
            rec.reward = reward;
            rec.delta_sigma = delta;
            let record = TransitionRecord {
                state: s_next.clone(),
                action,
                reward: f64::NAN,
                q_snapshot: q_next,
                v_snapshot: v_next,
                delta_sigma: f64::NAN,
                sigma: sigma_next,
                target_prob,
                behavior_prob,
                rho: target_prob / behavior_prob,
            };
            let cap = self.buf.len();
            self.buf[self.len % cap] = Some(record);
            self.len += 1;
            Some(action)
        };
        if t + 1 >= self.n {
            self.apply_update(t + 1 - self.n, t)?;
        }
        Ok(next_action)
    }

    /// Applies the remaining updates after the terminal transition and closes
    /// the episode.
    pub fn finish_episode(&mut self) -> Result<()> {
        if !self.in_episode {
            return Err(Error::Protocol("finish_episode called outside an episode"));
        }
        let horizon = self.horizon.ok_or(Error::Protocol(
            "finish_episode called before the terminal transition; use truncate_episode",
        ))?;
        self.flush(horizon - 1)
    }

    /// Cuts a running episode short: applies every update whose TD errors are
    /// already known (later windows shorten accordingly) and closes the
    /// episode without a terminal transition.
    pub fn truncate_episode(&mut self) -> Result<()> {
        if !self.in_episode {
            return Err(Error::Protocol("truncate_episode called outside an episode"));
        }
        match self.horizon {
            Some(t_end) => self.flush(t_end - 1),
            None if self.len <= 1 => {
                // Nothing observed yet; drop the episode silently.
                self.reset_episode();
                Ok(())
            }
            None => self.flush(self.len - 2),
        }
    }

    fn flush(&mut self, delta_hi: usize) -> Result<()> {
        let from = (self.applied_hi + 1).max(0) as usize;
        for tau in from..=delta_hi {
            self.apply_update(tau, delta_hi)?;
        }
        self.reset_episode();
        Ok(())
    }

    fn reset_episode(&mut self) {
        for slot in &mut self.buf {
            *slot = None;
        }
        self.len = 0;
        self.horizon = None;
        self.in_episode = false;
        self.applied_hi = -1;
        self.sigma.on_episode_end();
    }

    /// Applies the update for time `tau` over the window ending at the last
    /// index with a known TD error, `delta_hi`.
    fn apply_update(&mut self, tau: usize, delta_hi: usize) -> Result<()> {
        let w = (tau + self.n - 1).min(delta_hi);
        // Whether the window runs into the episode's terminal transition.
        let ends_at_terminal = self.horizon == Some(w + 1);
        let mut expectation_weight = 1.0;
        let mut delta_sum = 0.0;
        let mut rho = 1.0;
        for k in tau..=w {
            let delta = if self.final_step_expectation && k == w && !ends_at_terminal {
                // The classical multi-step expected backup closes each window
                // with the expectation over the final action rather than the
                // sampled draw recorded for later windows.
                let rec_k = self.rec(k);
                let bootstrap = self.rec(w + 1);
                td_error_sigma(
                    rec_k.reward,
                    self.gamma,
                    0.0,
                    bootstrap.q_snapshot,
                    bootstrap.v_snapshot,
                    rec_k.q_snapshot,
                )?
            } else {
                self.rec(k).delta_sigma
            };
            delta_sum += expectation_weight * delta;
            if k < w {
                let nxt = self.rec(k + 1);
                expectation_weight *=
                    self.gamma * ((1.0 - nxt.sigma) * nxt.target_prob + nxt.sigma);
                rho *= 1.0 - nxt.sigma + nxt.sigma * nxt.rho;
            }
        }
        let applied_step = self.alpha * rho * delta_sum;
        let (state, action, q_snapshot) = {
            let rec = self.rec(tau);
            (rec.state.clone(), rec.action, rec.q_snapshot)
        };
        self.q.apply_delta(&state, action, applied_step)?;
        self.applied_hi = tau as isize;
        if self.traces.is_some() {
            let segment = self.window_segment(tau, w, ends_at_terminal);
            if let Some(traces) = &mut self.traces {
                traces.push(UpdateTrace {
                    tau,
                    rho,
                    delta_sum,
                    g: q_snapshot + delta_sum,
                    applied_step,
                    segment,
                });
            }
        }
        Ok(())
    }

    /// Rebuilds the window for `tau` as a standalone segment whose direct
    /// return evaluation reproduces this update's G.
    fn window_segment(&self, tau: usize, w: usize, ends_at_terminal: bool) -> TrajectorySegment {
        let steps = (tau..=w)
            .map(|k| {
                let rec = self.rec(k);
                SegmentStep {
                    target_prob: rec.target_prob,
                    behavior_prob: rec.behavior_prob,
                    sigma: rec.sigma,
                    q_sa: rec.q_snapshot,
                    v: rec.v_snapshot,
                    reward: rec.reward,
                }
            })
            .collect();
        let tail = if ends_at_terminal {
            SegmentTail::Terminal
        } else {
            let rec = self.rec(w + 1);
            SegmentTail::Bootstrap {
                q_sa: rec.q_snapshot,
                v: rec.v_snapshot,
                sigma: if self.final_step_expectation { 0.0 } else { rec.sigma },
            }
        };
        TrajectorySegment { gamma: self.gamma, steps, tail }
    }
}

/// Single-transition blended update applied directly to the estimates:
/// moves Q(s, a) toward r + gamma * (sigma * Q(s', a') + (1 - sigma) * V(s')),
/// where V is the expectation under `target` and both bootstrap terms are
/// zero at terminal successors.
#[allow(clippy::too_many_arguments)]
pub fn one_step_q_sigma_update(
    q: &mut ActionValues,
    s: &StateRef,
    a: ActionId,
    reward: f64,
    s_next: &StateRef,
    a_next: Option<ActionId>,
    sigma: f64,
    alpha: f64,
    gamma: f64,
    target: &PolicyModel,
) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", format!("{alpha} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid("gamma", format!("{gamma} outside [0, 1]")));
    }
    if !reward.is_finite() {
        return Err(Error::NonFinite { what: "reward" });
    }
    let q_cur = q.value(s, a)?;
    let delta = if s_next.is_terminal() {
        td_error_sigma(reward, gamma, sigma, 0.0, 0.0, q_cur)?
    } else {
        let row = q.values_row(s_next)?;
        let a_next = a_next.ok_or(Error::Protocol(
            "one-step update needs the next action unless the successor is terminal",
        ))?;
        if a_next >= row.len() {
            return Err(Error::OutOfRange { what: "action", index: a_next, limit: row.len() });
        }
        let v_next = target.expected_from_row(&row);
        td_error_sigma(reward, gamma, sigma, row[a_next], v_next, q_cur)?
    };
    q.apply_delta(s, a, alpha * delta)
}
