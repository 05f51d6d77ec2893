use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::state::{ActionId, StateRef};
use crate::values::{ActionRow, ActionValues};

/// Action-selection rule parameterized by the current value estimates.
///
/// Epsilon-greedy splits (1 - epsilon) equally among all maximizing actions,
/// plus epsilon / k on every action; epsilon = 0 is pure greedy and
/// epsilon = 1 is equiprobable.
#[derive(Clone, Debug, PartialEq)]
pub enum PolicyModel {
    Equiprobable,
    EpsilonGreedy { epsilon: f64 },
}

impl PolicyModel {
    pub fn epsilon_greedy(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::invalid("epsilon", format!("{epsilon} outside [0, 1]")));
        }
        Ok(PolicyModel::EpsilonGreedy { epsilon })
    }

    pub fn greedy() -> Self {
        PolicyModel::EpsilonGreedy { epsilon: 0.0 }
    }

    /// Probability of taking `action` at `state` under current estimates.
    pub fn prob(&self, q: &ActionValues, state: &StateRef, action: ActionId) -> Result<f64> {
        if state.is_terminal() {
            return Err(Error::Terminal { op: "policy prob" });
        }
        if action >= q.num_actions() {
            return Err(Error::OutOfRange { what: "action", index: action, limit: q.num_actions() });
        }
        match self {
            PolicyModel::Equiprobable => Ok(1.0 / q.num_actions() as f64),
            PolicyModel::EpsilonGreedy { .. } => {
                let row = q.values_row(state)?;
                Ok(self.prob_from_row(&row, action))
            }
        }
    }

    /// Full action distribution at `state`.
    pub fn probs(&self, q: &ActionValues, state: &StateRef) -> Result<Vec<f64>> {
        if state.is_terminal() {
            return Err(Error::Terminal { op: "policy probs" });
        }
        match self {
            PolicyModel::Equiprobable => {
                let k = q.num_actions();
                Ok(vec![1.0 / k as f64; k])
            }
            PolicyModel::EpsilonGreedy { .. } => {
                let row = q.values_row(state)?;
                Ok((0..row.len()).map(|a| self.prob_from_row(&row, a)).collect())
            }
        }
    }

    /// Samples an action at `state`. Epsilon-greedy draws one uniform variate,
    /// explores uniformly below epsilon, and otherwise picks uniformly among
    /// the maximizing actions.
    pub fn sample(&self, q: &ActionValues, state: &StateRef, rng: &mut RngStream) -> Result<ActionId> {
        if state.is_terminal() {
            return Err(Error::Terminal { op: "policy sample" });
        }
        match self {
            PolicyModel::Equiprobable => Ok(rng.index(q.num_actions())),
            PolicyModel::EpsilonGreedy { .. } => {
                let row = q.values_row(state)?;
                Ok(self.sample_from_row(&row, rng))
            }
        }
    }

    /// Probability computed from a pre-fetched value row (hot path).
    pub(crate) fn prob_from_row(&self, row: &[f64], action: ActionId) -> f64 {
        let k = row.len() as f64;
        match self {
            PolicyModel::Equiprobable => 1.0 / k,
            PolicyModel::EpsilonGreedy { epsilon } => {
                let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let ties = row.iter().filter(|&&v| v == max).count() as f64;
                let base = epsilon / k;
                if row[action] == max {
                    base + (1.0 - epsilon) / ties
                } else {
                    base
                }
            }
        }
    }

    pub(crate) fn sample_from_row(&self, row: &[f64], rng: &mut RngStream) -> ActionId {
        match self {
            PolicyModel::Equiprobable => rng.index(row.len()),
            PolicyModel::EpsilonGreedy { epsilon } => {
                if rng.uniform() < *epsilon {
                    return rng.index(row.len());
                }
                let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let ties: ActionRow = row.iter().copied().filter(|&v| v == max).collect();
                let mut pick = if ties.len() > 1 { rng.index(ties.len()) } else { 0 };
                for (a, &v) in row.iter().enumerate() {
                    if v == max {
                        if pick == 0 {
                            return a;
                        }
                        pick -= 1;
                    }
                }
                unreachable!("row has a maximum");
            }
        }
    }

    /// Expected value of the estimates under this policy's distribution.
    /// Terminal states carry zero value by convention.
    pub fn expected_value(&self, q: &ActionValues, state: &StateRef) -> Result<f64> {
        if state.is_terminal() {
            return Ok(0.0);
        }
        let row = q.values_row(state)?;
        Ok(self.expected_from_row(&row))
    }

    pub(crate) fn expected_from_row(&self, row: &[f64]) -> f64 {
        (0..row.len()).map(|a| self.prob_from_row(row, a) * row[a]).sum()
    }
}
