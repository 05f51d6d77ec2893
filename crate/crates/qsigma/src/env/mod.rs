mod mountain_cliff;
mod random_walk;
mod windy;

pub use mountain_cliff::MountainCliff;
pub use random_walk::{random_walk_true_values, RandomWalk};
pub use windy::WindyGridworld;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::state::{ActionId, StateRef};

/// One sampled transition.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvStep {
    pub reward: f64,
    pub next: StateRef,
}

/// One entry of an exact transition distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub prob: f64,
    pub reward: f64,
    pub next: StateRef,
}

/// A reinforcement-learning task. Implementations are stateless: all episode
/// state lives in the `StateRef` values passed back and forth, so one instance
/// can serve many concurrent rollouts.
pub trait Environment: Send + Sync {
    fn name(&self) -> &'static str;

    fn num_actions(&self) -> usize;

    /// Total state count (including terminal states) for tabular tasks;
    /// None for continuous state spaces.
    fn num_states(&self) -> Option<usize>;

    /// Coordinate bounds per dimension for continuous tasks; None for tabular.
    fn coord_ranges(&self) -> Option<Vec<(f64, f64)>> {
        None
    }

    fn episodic(&self) -> bool {
        true
    }

    /// Whether a tabular state index is terminal. Only meaningful when
    /// `num_states` is Some.
    fn is_terminal_index(&self, _index: usize) -> bool {
        false
    }

    /// Draws an initial state.
    fn reset(&self, rng: &mut RngStream) -> StateRef;

    /// Samples one transition from a non-terminal state.
    fn step(&self, s: &StateRef, a: ActionId, rng: &mut RngStream) -> Result<EnvStep>;

    /// Exact outcome distribution of (s, a) for enumerable dynamics; None when
    /// the model cannot be enumerated. Entries may repeat next states; callers
    /// accumulate probabilities.
    fn outcomes(&self, s: &StateRef, a: ActionId) -> Option<Vec<Outcome>>;
}

/// Names accepted by [`by_name`], in presentation order.
pub const ENV_NAMES: [&str; 4] = [
    "random_walk_19",
    "windy_gridworld",
    "windy_gridworld_stochastic",
    "mountain_cliff",
];

pub fn by_name(name: &str) -> Result<Box<dyn Environment>> {
    match name {
        "random_walk_19" => Ok(Box::new(RandomWalk)),
        "windy_gridworld" => Ok(Box::new(WindyGridworld::deterministic())),
        "windy_gridworld_stochastic" => Ok(Box::new(WindyGridworld::stochastic())),
        "mountain_cliff" => Ok(Box::new(MountainCliff)),
        _ => Err(Error::UnknownName { kind: "environment", name: name.to_string() }),
    }
}

pub(crate) fn check_tabular_query(
    env: &dyn Environment,
    s: &StateRef,
    a: ActionId,
) -> Result<usize> {
    if s.is_terminal() {
        return Err(Error::Terminal { op: "environment step" });
    }
    let idx = s
        .tabular_index()
        .ok_or_else(|| Error::invalid("environment step", "expected a tabular state"))?;
    let limit = env.num_states().expect("tabular environment");
    if idx >= limit || env.is_terminal_index(idx) {
        return Err(Error::OutOfRange { what: "state", index: idx, limit });
    }
    if a >= env.num_actions() {
        return Err(Error::OutOfRange { what: "action", index: a, limit: env.num_actions() });
    }
    Ok(idx)
}
