use super::{check_tabular_query, EnvStep, Environment, Outcome};
use crate::error::Result;
use crate::rng::RngStream;
use crate::state::{ActionId, StateRef};

const WIDTH: usize = 10;
const HEIGHT: usize = 7;
const WIND: [isize; WIDTH] = [0, 0, 0, 1, 1, 1, 2, 2, 1, 0];
const START: (isize, isize) = (0, 3);
const GOAL: (isize, isize) = (7, 3);
/// Chance of a uniform jump to one of the 8 surrounding cells (stochastic
/// variant only).
const JUMP_PROB: f64 = 0.1;
const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// 10 x 7 gridworld with a column-dependent crosswind pushing the agent
/// sideways on every move; each step pays -1 until the goal cell is reached.
/// Actions: 0 up, 1 down, 2 left, 3 right. The stochastic variant ignores the
/// chosen action with probability 0.1 and jumps uniformly to one of the 8
/// cells around the current position (clamped to the board).
///
/// States index row-major as row * 10 + column.
pub struct WindyGridworld {
    stochastic: bool,
}

impl WindyGridworld {
    pub fn deterministic() -> Self {
        Self { stochastic: false }
    }

    pub fn stochastic() -> Self {
        Self { stochastic: true }
    }

    fn decode(idx: usize) -> (isize, isize) {
        ((idx % WIDTH) as isize, (idx / WIDTH) as isize)
    }

    fn encode(col: isize, row: isize) -> usize {
        row as usize * WIDTH + col as usize
    }

    fn clamp(col: isize, row: isize) -> (isize, isize) {
        (col.clamp(0, WIDTH as isize - 1), row.clamp(0, HEIGHT as isize - 1))
    }

    fn action_delta(a: ActionId) -> (isize, isize) {
        match a {
            0 => (0, 1),
            1 => (0, -1),
            2 => (-1, 0),
            _ => (1, 0),
        }
    }

    /// Intended move: the action plus the wind of the column being left.
    fn intended(col: isize, row: isize, a: ActionId) -> (isize, isize) {
        let (dc, dr) = Self::action_delta(a);
        Self::clamp(col + dc, row + dr + WIND[col as usize])
    }

    fn jump(col: isize, row: isize, which: usize) -> (isize, isize) {
        let (dc, dr) = NEIGHBORS[which];
        Self::clamp(col + dc, row + dr)
    }

    fn arrive(col: isize, row: isize) -> EnvStep {
        let idx = Self::encode(col, row);
        let next = if (col, row) == GOAL {
            StateRef::terminal_tabular(idx)
        } else {
            StateRef::tabular(idx)
        };
        EnvStep { reward: -1.0, next }
    }
}

impl Environment for WindyGridworld {
    fn name(&self) -> &'static str {
        if self.stochastic {
            "windy_gridworld_stochastic"
        } else {
            "windy_gridworld"
        }
    }

    fn num_actions(&self) -> usize {
        4
    }

    fn num_states(&self) -> Option<usize> {
        Some(WIDTH * HEIGHT)
    }

    fn is_terminal_index(&self, index: usize) -> bool {
        Self::decode(index) == GOAL
    }

    fn reset(&self, _rng: &mut RngStream) -> StateRef {
        StateRef::tabular(Self::encode(START.0, START.1))
    }

    fn step(&self, s: &StateRef, a: ActionId, rng: &mut RngStream) -> Result<EnvStep> {
        let idx = check_tabular_query(self, s, a)?;
        let (col, row) = Self::decode(idx);
        let (nc, nr) = if self.stochastic && rng.uniform() < JUMP_PROB {
            Self::jump(col, row, rng.index(NEIGHBORS.len()))
        } else {
            Self::intended(col, row, a)
        };
        Ok(Self::arrive(nc, nr))
    }

    fn outcomes(&self, s: &StateRef, a: ActionId) -> Option<Vec<Outcome>> {
        let idx = check_tabular_query(self, s, a).ok()?;
        let (col, row) = Self::decode(idx);
        let to_outcome = |prob: f64, (nc, nr): (isize, isize)| {
            let step = Self::arrive(nc, nr);
            Outcome { prob, reward: step.reward, next: step.next }
        };
        let mut out = Vec::with_capacity(9);
        let intended_prob = if self.stochastic { 1.0 - JUMP_PROB } else { 1.0 };
        out.push(to_outcome(intended_prob, Self::intended(col, row, a)));
        if self.stochastic {
            let each = JUMP_PROB / NEIGHBORS.len() as f64;
            for which in 0..NEIGHBORS.len() {
                out.push(to_outcome(each, Self::jump(col, row, which)));
            }
        }
        Some(out)
    }
}
