use super::{EnvStep, Environment, Outcome};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::state::{ActionId, StateRef};

pub const X_MIN: f64 = -1.2;
pub const X_MAX: f64 = 0.5;
pub const V_MAX: f64 = 0.07;
const FORCE: f64 = 0.001;
const GRAVITY: f64 = 0.0025;
const START_LO: f64 = -0.6;
const START_HI: f64 = -0.4;
const CLIFF_PENALTY: f64 = -100.0;

/// Mountain-car dynamics with the left wall replaced by a cliff: position in
/// [-1.2, 0.5], velocity in [-0.07, 0.07], throttle actions 0 (reverse),
/// 1 (coast), 2 (forward). Reaching the right summit ends the episode; every
/// step pays -1 except falling off the left edge, which pays -100 instead and
/// teleports the car back to a random start (the episode continues).
///
/// States are continuous pairs [position, velocity].
pub struct MountainCliff;

impl MountainCliff {
    fn start(rng: &mut RngStream) -> StateRef {
        StateRef::continuous(vec![rng.uniform_in(START_LO, START_HI), 0.0])
    }
}

impl Environment for MountainCliff {
    fn name(&self) -> &'static str {
        "mountain_cliff"
    }

    fn num_actions(&self) -> usize {
        3
    }

    fn num_states(&self) -> Option<usize> {
        None
    }

    fn coord_ranges(&self) -> Option<Vec<(f64, f64)>> {
        Some(vec![(X_MIN, X_MAX), (-V_MAX, V_MAX)])
    }

    fn reset(&self, rng: &mut RngStream) -> StateRef {
        Self::start(rng)
    }

    fn step(&self, s: &StateRef, a: ActionId, rng: &mut RngStream) -> Result<EnvStep> {
        if s.is_terminal() {
            return Err(Error::Terminal { op: "environment step" });
        }
        let coords = s
            .coords()
            .ok_or_else(|| Error::invalid("environment step", "expected continuous coordinates"))?;
        if coords.len() != 2 {
            return Err(Error::invalid("environment step", "expected [position, velocity]"));
        }
        if a >= 3 {
            return Err(Error::OutOfRange { what: "action", index: a, limit: 3 });
        }
        let (x, v) = (coords[0], coords[1]);
        let throttle = a as f64 - 1.0;
        let v_new = (v + FORCE * throttle - GRAVITY * (3.0 * x).cos()).clamp(-V_MAX, V_MAX);
        let x_new = x + v_new;
        if x_new >= X_MAX {
            return Ok(EnvStep {
                reward: -1.0,
                next: StateRef::terminal_continuous(vec![X_MAX, v_new]),
            });
        }
        if x_new <= X_MIN {
            // Off the cliff: penalty replaces the step cost and the car is
            // placed back at a fresh start position.
            return Ok(EnvStep { reward: CLIFF_PENALTY, next: Self::start(rng) });
        }
        Ok(EnvStep { reward: -1.0, next: StateRef::continuous(vec![x_new, v_new]) })
    }

    fn outcomes(&self, _s: &StateRef, _a: ActionId) -> Option<Vec<Outcome>> {
        None
    }
}
