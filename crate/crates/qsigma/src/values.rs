use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::state::{ActionId, StateRef};
use crate::tilecoding::{TileCoder, NUM_TILINGS};

/// Active feature indices for one (state, action) query. Sized for the tile
/// coder's tiling count; one-hot queries use a single slot.
pub type ActiveSet = SmallVec<[usize; NUM_TILINGS]>;

/// Row of action values at one state. Sized for small discrete action sets.
pub type ActionRow = SmallVec<[f64; 4]>;

/// Maps states to sparse binary feature vectors, per action.
#[derive(Clone, Debug)]
pub enum Featurizer {
    Tiles(TileCoder),
    /// Indicator feature per tabular state; makes the linear representation
    /// coincide with a lookup table.
    OneHot { num_states: usize, num_actions: usize },
}

impl Featurizer {
    pub fn num_actions(&self) -> usize {
        match self {
            Featurizer::Tiles(c) => c.num_actions(),
            Featurizer::OneHot { num_actions, .. } => *num_actions,
        }
    }

    /// Number of active features in every query.
    pub fn num_active(&self) -> usize {
        match self {
            Featurizer::Tiles(_) => NUM_TILINGS,
            Featurizer::OneHot { .. } => 1,
        }
    }

    pub fn weights_len(&self) -> usize {
        match self {
            Featurizer::Tiles(c) => c.weights_len(),
            Featurizer::OneHot { num_states, num_actions } => num_states * num_actions,
        }
    }

    pub fn active(&self, state: &StateRef, action: ActionId) -> Result<ActiveSet> {
        match self {
            Featurizer::Tiles(c) => {
                let coords = state.coords().ok_or_else(|| {
                    Error::invalid("featurizer input", "tile coding needs continuous coordinates")
                })?;
                c.active_tiles(coords, action)
            }
            Featurizer::OneHot { num_states, num_actions } => {
                let s = state.tabular_index().ok_or_else(|| {
                    Error::invalid("featurizer input", "one-hot features need a tabular state")
                })?;
                if s >= *num_states {
                    return Err(Error::OutOfRange { what: "state", index: s, limit: *num_states });
                }
                if action >= *num_actions {
                    return Err(Error::OutOfRange { what: "action", index: action, limit: *num_actions });
                }
                Ok(smallvec![action * num_states + s])
            }
        }
    }
}

/// Action-value estimates: either a dense lookup table over tabular states or
/// a linear function over sparse binary features. Both start at zero.
#[derive(Clone, Debug)]
pub enum ActionValues {
    Tabular {
        /// Row-major: entry for (s, a) lives at s * num_actions + a.
        table: Vec<f64>,
        num_states: usize,
        num_actions: usize,
    },
    Linear {
        weights: Vec<f64>,
        features: Featurizer,
        num_actions: usize,
    },
}

impl ActionValues {
    pub fn tabular(num_states: usize, num_actions: usize) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(Error::invalid("action values", "state and action counts must be positive"));
        }
        Ok(ActionValues::Tabular {
            table: vec![0.0; num_states * num_actions],
            num_states,
            num_actions,
        })
    }

    pub fn linear(features: Featurizer) -> Self {
        let num_actions = features.num_actions();
        ActionValues::Linear {
            weights: vec![0.0; features.weights_len()],
            features,
            num_actions,
        }
    }

    pub fn num_actions(&self) -> usize {
        match self {
            ActionValues::Tabular { num_actions, .. } => *num_actions,
            ActionValues::Linear { num_actions, .. } => *num_actions,
        }
    }

    /// State count for the tabular representation; None for linear.
    pub fn num_states(&self) -> Option<usize> {
        match self {
            ActionValues::Tabular { num_states, .. } => Some(*num_states),
            ActionValues::Linear { .. } => None,
        }
    }

    fn check_query(&self, state: &StateRef, op: &'static str) -> Result<()> {
        if state.is_terminal() {
            return Err(Error::Terminal { op });
        }
        Ok(())
    }

    pub fn value(&self, state: &StateRef, action: ActionId) -> Result<f64> {
        self.check_query(state, "value")?;
        match self {
            ActionValues::Tabular { table, num_states, num_actions } => {
                let s = state
                    .tabular_index()
                    .ok_or_else(|| Error::invalid("value query", "tabular estimate needs a tabular state"))?;
                if s >= *num_states {
                    return Err(Error::OutOfRange { what: "state", index: s, limit: *num_states });
                }
                if action >= *num_actions {
                    return Err(Error::OutOfRange { what: "action", index: action, limit: *num_actions });
                }
                Ok(table[s * num_actions + action])
            }
            ActionValues::Linear { weights, features, .. } => {
                let active = features.active(state, action)?;
                Ok(active.iter().map(|&i| weights[i]).sum())
            }
        }
    }

    /// All action values at a state, indexed by action.
    pub fn values_row(&self, state: &StateRef) -> Result<ActionRow> {
        self.check_query(state, "values_row")?;
        match self {
            ActionValues::Tabular { table, num_states, num_actions } => {
                let s = state
                    .tabular_index()
                    .ok_or_else(|| Error::invalid("value query", "tabular estimate needs a tabular state"))?;
                if s >= *num_states {
                    return Err(Error::OutOfRange { what: "state", index: s, limit: *num_states });
                }
                let row = &table[s * num_actions..(s + 1) * num_actions];
                Ok(SmallVec::from_slice(row))
            }
            ActionValues::Linear { weights, features, num_actions } => {
                let mut row = ActionRow::new();
                for a in 0..*num_actions {
                    let active = features.active(state, a)?;
                    row.push(active.iter().map(|&i| weights[i]).sum());
                }
                Ok(row)
            }
        }
    }

    /// Moves the represented value of (state, action) by exactly `step`:
    /// the tabular entry is incremented, linear weights each absorb an equal
    /// share of the step across the active features.
    pub fn apply_delta(&mut self, state: &StateRef, action: ActionId, step: f64) -> Result<()> {
        if !step.is_finite() {
            return Err(Error::NonFinite { what: "value update step" });
        }
        self.check_query(state, "apply_delta")?;
        match self {
            ActionValues::Tabular { table, num_states, num_actions } => {
                let s = state
                    .tabular_index()
                    .ok_or_else(|| Error::invalid("value update", "tabular estimate needs a tabular state"))?;
                if s >= *num_states {
                    return Err(Error::OutOfRange { what: "state", index: s, limit: *num_states });
                }
                if action >= *num_actions {
                    return Err(Error::OutOfRange { what: "action", index: action, limit: *num_actions });
                }
                table[s * *num_actions + action] += step;
                Ok(())
            }
            ActionValues::Linear { weights, features, .. } => {
                let active = features.active(state, action)?;
                let share = step / active.len() as f64;
                for &i in &active {
                    weights[i] += share;
                }
                Ok(())
            }
        }
    }

    /// Direct table access for analysis and testing; None for linear.
    pub fn table(&self) -> Option<&[f64]> {
        match self {
            ActionValues::Tabular { table, .. } => Some(table),
            ActionValues::Linear { .. } => None,
        }
    }
}
