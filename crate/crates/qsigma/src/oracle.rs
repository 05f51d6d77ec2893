//! Exact reference solutions for tabular tasks: model enumeration, linear-
//! system policy evaluation, and value iteration. These back the statistical
//! experiments with ground truth and exist for correctness checks, not speed.

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::policy::PolicyModel;
use crate::state::StateRef;
use crate::values::ActionValues;

/// Explicit finite MDP: transition lists per (state, action) plus terminal
/// flags and a discount.
#[derive(Clone, Debug)]
pub struct TabularMdp {
    num_states: usize,
    num_actions: usize,
    gamma: f64,
    terminal: Vec<bool>,
    /// Indexed s * num_actions + a; entries are (next, prob, reward).
    transitions: Vec<Vec<(usize, f64, f64)>>,
}

impl TabularMdp {
    pub fn new(num_states: usize, num_actions: usize, gamma: f64) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::invalid("mdp", "state and action counts must be positive"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid("gamma", format!("{gamma} outside [0, 1]")));
        }
        Ok(Self {
            num_states,
            num_actions,
            gamma,
            terminal: vec![false; num_states],
            transitions: vec![Vec::new(); num_states * num_actions],
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminal[s]
    }

    pub fn set_terminal(&mut self, s: usize) {
        self.terminal[s] = true;
    }

    pub fn add_transition(&mut self, s: usize, a: usize, next: usize, prob: f64, reward: f64) {
        self.transitions[s * self.num_actions + a].push((next, prob, reward));
    }

    pub fn transitions(&self, s: usize, a: usize) -> &[(usize, f64, f64)] {
        &self.transitions[s * self.num_actions + a]
    }

    /// Checks that every non-terminal (s, a) carries a proper distribution.
    pub fn validate(&self) -> Result<()> {
        for s in 0..self.num_states {
            if self.terminal[s] {
                continue;
            }
            for a in 0..self.num_actions {
                let rows = self.transitions(s, a);
                if rows.is_empty() {
                    return Err(Error::invalid(
                        "mdp transitions",
                        format!("state {s} action {a} has no outcomes"),
                    ));
                }
                let total: f64 = rows.iter().map(|(_, p, _)| p).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid(
                        "mdp transitions",
                        format!("state {s} action {a} probabilities sum to {total}"),
                    ));
                }
                for &(next, p, _) in rows {
                    if next >= self.num_states || !(0.0..=1.0 + 1e-12).contains(&p) {
                        return Err(Error::invalid(
                            "mdp transitions",
                            format!("state {s} action {a} has a malformed outcome"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Action distribution of `policy` at every non-terminal state, reading
    /// greedy structure from `q`. Terminal rows are empty.
    fn policy_probs(&self, policy: &PolicyModel, q: &ActionValues) -> Result<Vec<Vec<f64>>> {
        let mut all = Vec::with_capacity(self.num_states);
        for s in 0..self.num_states {
            if self.terminal[s] {
                all.push(Vec::new());
            } else {
                all.push(policy.probs(q, &StateRef::tabular(s))?);
            }
        }
        Ok(all)
    }
}

/// Extracts the exact transition model of a tabular environment by querying
/// its outcome distributions state by state.
pub fn enumerate_mdp(env: &dyn Environment, gamma: f64) -> Result<TabularMdp> {
    let num_states = env
        .num_states()
        .ok_or(Error::Unsupported("cannot enumerate a continuous state space"))?;
    let mut mdp = TabularMdp::new(num_states, env.num_actions(), gamma)?;
    for s in 0..num_states {
        if env.is_terminal_index(s) {
            mdp.set_terminal(s);
            continue;
        }
        let state = StateRef::tabular(s);
        for a in 0..env.num_actions() {
            let outs = env
                .outcomes(&state, a)
                .ok_or(Error::Unsupported("environment does not expose exact outcomes"))?;
            for o in outs {
                let next = o.next.tabular_index().ok_or_else(|| {
                    Error::invalid("environment outcomes", "non-tabular successor state")
                })?;
                mdp.add_transition(s, a, next, o.prob, o.reward);
            }
        }
    }
    mdp.validate()?;
    Ok(mdp)
}

/// Dense Gaussian elimination with partial pivoting; consumes its inputs.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 {
            return Err(Error::Singular);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Exact state values of `policy` by solving (I - gamma * P) v = r directly.
/// Terminal states get value zero. `q` supplies the greedy structure for
/// value-dependent policies; equiprobable policies ignore it.
pub fn policy_evaluation(
    mdp: &TabularMdp,
    policy: &PolicyModel,
    q: &ActionValues,
) -> Result<Vec<f64>> {
    mdp.validate()?;
    let probs = mdp.policy_probs(policy, q)?;
    let live: Vec<usize> = (0..mdp.num_states).filter(|&s| !mdp.terminal[s]).collect();
    let col_of: Vec<Option<usize>> = {
        let mut m = vec![None; mdp.num_states];
        for (i, &s) in live.iter().enumerate() {
            m[s] = Some(i);
        }
        m
    };
    let n = live.len();
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (i, &s) in live.iter().enumerate() {
        a[i][i] = 1.0;
        for act in 0..mdp.num_actions {
            let pi = probs[s][act];
            if pi == 0.0 {
                continue;
            }
            for &(next, p, reward) in mdp.transitions(s, act) {
                b[i] += pi * p * reward;
                if let Some(j) = col_of[next] {
                    a[i][j] -= mdp.gamma * pi * p;
                }
            }
        }
    }
    let x = solve_linear(a, b)?;
    let mut v = vec![0.0; mdp.num_states];
    for (i, &s) in live.iter().enumerate() {
        v[s] = x[i];
    }
    Ok(v)
}

const MAX_SWEEPS: usize = 1_000_000;

/// Optimal action values by synchronous value iteration, run until the
/// sup-norm Bellman residual drops below `tolerance`.
pub fn value_iteration(mdp: &TabularMdp, tolerance: f64) -> Result<ActionValues> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance", "must be positive"));
    }
    mdp.validate()?;
    let ns = mdp.num_states;
    let na = mdp.num_actions;
    let mut q = vec![0.0; ns * na];
    for _ in 0..MAX_SWEEPS {
        let mut next = vec![0.0; ns * na];
        let mut residual = 0.0_f64;
        for s in 0..ns {
            if mdp.terminal[s] {
                continue;
            }
            for a in 0..na {
                let mut total = 0.0;
                for &(nxt, p, reward) in mdp.transitions(s, a) {
                    let bootstrap = if mdp.terminal[nxt] {
                        0.0
                    } else {
                        let row = &q[nxt * na..(nxt + 1) * na];
                        row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                    };
                    total += p * (reward + mdp.gamma * bootstrap);
                }
                next[s * na + a] = total;
                residual = residual.max((total - q[s * na + a]).abs());
            }
        }
        if residual < tolerance {
            // q is a fixed point to within the tolerance; return it rather
            // than the fresher sweep so the reported residual bound holds.
            let mut out = ActionValues::tabular(ns, na)?;
            for s in 0..ns {
                if mdp.terminal[s] {
                    continue;
                }
                for a in 0..na {
                    out.apply_delta(&StateRef::tabular(s), a, q[s * na + a])?;
                }
            }
            return Ok(out);
        }
        q = next;
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
}

/// Root-mean-square gap between the policy's state values implied by `q` and
/// a ground-truth vector. Ground truth covers states 0..truth.len(), which
/// must all be non-terminal under the caller's indexing.
pub fn rms_state_value_error(
    q: &ActionValues,
    policy: &PolicyModel,
    truth: &[f64],
) -> Result<f64> {
    let num_states = q
        .num_states()
        .ok_or(Error::Unsupported("state-value error needs a tabular estimate"))?;
    if truth.is_empty() || truth.len() > num_states {
        return Err(Error::invalid(
            "ground truth",
            format!("{} values for {} states", truth.len(), num_states),
        ));
    }
    let mut sum = 0.0;
    for (s, &target) in truth.iter().enumerate() {
        let v = policy.expected_value(q, &StateRef::tabular(s))?;
        sum += (v - target) * (v - target);
    }
    Ok((sum / truth.len() as f64).sqrt())
}
