use super::{check_tabular_query, EnvStep, Environment, Outcome};
use crate::error::Result;
use crate::rng::RngStream;
use crate::state::{ActionId, StateRef};

const INTERIOR: usize = 19;
const LEFT_EXIT: usize = 19;
const RIGHT_EXIT: usize = 20;
const START: usize = 9;

/// Linear chain of 19 interior states with two absorbing exits. Both actions
/// move deterministically (0 left, 1 right); stepping off the left end pays -1,
/// off the right end +1, every other transition 0. Episodes start in the
/// middle. Terminal indices 19 (left) and 20 (right) follow the interior.
pub struct RandomWalk;

impl RandomWalk {
    fn transition(&self, idx: usize, a: ActionId) -> (f64, StateRef) {
        match (idx, a) {
            (0, 0) => (-1.0, StateRef::terminal_tabular(LEFT_EXIT)),
            (s, 0) => (0.0, StateRef::tabular(s - 1)),
            (s, _) if s + 1 == INTERIOR => (1.0, StateRef::terminal_tabular(RIGHT_EXIT)),
            (s, _) => (0.0, StateRef::tabular(s + 1)),
        }
    }
}

impl Environment for RandomWalk {
    fn name(&self) -> &'static str {
        "random_walk_19"
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn num_states(&self) -> Option<usize> {
        Some(INTERIOR + 2)
    }

    fn is_terminal_index(&self, index: usize) -> bool {
        index >= INTERIOR
    }

    fn reset(&self, _rng: &mut RngStream) -> StateRef {
        StateRef::tabular(START)
    }

    fn step(&self, s: &StateRef, a: ActionId, _rng: &mut RngStream) -> Result<EnvStep> {
        let idx = check_tabular_query(self, s, a)?;
        let (reward, next) = self.transition(idx, a);
        Ok(EnvStep { reward, next })
    }

    fn outcomes(&self, s: &StateRef, a: ActionId) -> Option<Vec<Outcome>> {
        let idx = check_tabular_query(self, s, a).ok()?;
        let (reward, next) = self.transition(idx, a);
        Some(vec![Outcome { prob: 1.0, reward, next }])
    }
}

/// State values of the equiprobable policy on the chain: a linear ramp from
/// -0.9 at the left end to 0.9 at the right, crossing zero at the start state.
pub fn random_walk_true_values() -> [f64; INTERIOR] {
    let mut v = [0.0; INTERIOR];
    for (i, slot) in v.iter_mut().enumerate() {
        *slot = (i as f64 + 1.0) / 10.0 - 1.0;
    }
    v
}
