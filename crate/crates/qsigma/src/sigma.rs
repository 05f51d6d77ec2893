use crate::error::{Error, Result};

/// Source of the per-step sampling degree sigma in [0, 1]: 1 selects the
/// sampled (Sarsa) backup, 0 the expected (tree) backup, values between blend.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaSchedule {
    Constant(f64),
    /// Starts at `initial` and multiplies by `factor` at every episode end,
    /// so episode k (zero-based) uses initial * factor^k throughout.
    EpisodeDecay { initial: f64, factor: f64, current: f64 },
    /// Cycles through a fixed list, advancing once per queried time step.
    /// Exists to exercise mixed-sigma backups deterministically; experiment
    /// configs only expose the constant and decay variants.
    StepCycle { values: Vec<f64>, pos: usize },
}

fn check_unit(what: &'static str, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(what, format!("{x} outside [0, 1]")));
    }
    Ok(x)
}

impl SigmaSchedule {
    pub fn constant(sigma: f64) -> Result<Self> {
        Ok(SigmaSchedule::Constant(check_unit("sigma", sigma)?))
    }

    pub fn episode_decay(initial: f64, factor: f64) -> Result<Self> {
        check_unit("sigma decay initial", initial)?;
        check_unit("sigma decay factor", factor)?;
        Ok(SigmaSchedule::EpisodeDecay { initial, factor, current: initial })
    }

    pub fn step_cycle(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sigma cycle", "needs at least one value"));
        }
        for &v in &values {
            check_unit("sigma", v)?;
        }
        Ok(SigmaSchedule::StepCycle { values, pos: 0 })
    }

    /// Value in effect right now; does not advance any variant.
    pub fn current(&self) -> f64 {
        match self {
            SigmaSchedule::Constant(s) => *s,
            SigmaSchedule::EpisodeDecay { current, .. } => *current,
            SigmaSchedule::StepCycle { values, pos } => values[pos % values.len()],
        }
    }

    /// Value for the next time step. Identical to `current` for the constant
    /// and decay variants; advances the cycle variant by one position.
    pub fn query_step(&mut self) -> f64 {
        match self {
            SigmaSchedule::StepCycle { values, pos } => {
                let v = values[*pos % values.len()];
                *pos += 1;
                v
            }
            _ => self.current(),
        }
    }

    pub fn on_episode_end(&mut self) {
        if let SigmaSchedule::EpisodeDecay { factor, current, .. } = self {
            *current *= *factor;
        }
    }
}
