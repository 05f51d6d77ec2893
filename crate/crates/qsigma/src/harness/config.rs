use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::agent::AlgorithmKind;
use crate::env;
use crate::error::{Error, Result};
use crate::sigma::SigmaSchedule;

/// What each episode contributes to the result matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    /// Root-mean-square error of the implied state values against the task's
    /// exact solution, recorded after the episode. Prediction tasks only.
    RmsPerEpisode,
    /// Sum of rewards collected during the episode.
    ReturnPerEpisode,
}

/// Sigma specification as written in config files: either a bare constant or
/// a decay table with `initial` and `factor`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum SigmaSpec {
    Constant(f64),
    Decay { initial: f64, factor: f64 },
}

impl SigmaSpec {
    pub fn schedule(&self) -> Result<SigmaSchedule> {
        match *self {
            SigmaSpec::Constant(s) => SigmaSchedule::constant(s),
            SigmaSpec::Decay { initial, factor } => SigmaSchedule::episode_decay(initial, factor),
        }
    }
}

fn default_window() -> usize {
    30
}

/// One experiment: an algorithm, an environment, and the run layout.
/// Unknown keys are rejected so typos fail loudly.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: String,
    pub algorithm: String,
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    /// Exploration rate of the (epsilon-greedy) behavior policy; 1.0 behaves
    /// uniformly at random.
    pub epsilon: f64,
    /// Sampling-degree schedule; required by q_sigma, rejected otherwise.
    pub sigma: Option<SigmaSpec>,
    pub episodes: usize,
    pub runs: usize,
    /// Base seed; run i draws its stream from seed + i.
    pub seed: u64,
    pub measurement: Measurement,
    /// Step-size grid for sweeps; `alpha` is ignored by the sweep command.
    pub alphas: Option<Vec<f64>>,
    /// Default output path for the CSV (overridable on the command line).
    pub out: Option<PathBuf>,
    /// Window of the trailing moving average column in episode CSVs.
    #[serde(default = "default_window")]
    pub moving_average_window: usize,
    /// Abort an episode after this many steps, applying all updates whose TD
    /// errors exist. Unset means episodes run to termination.
    pub max_steps_per_episode: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn algorithm_kind(&self) -> Result<AlgorithmKind> {
        AlgorithmKind::parse(&self.algorithm)
    }

    pub fn validate(&self) -> Result<()> {
        let environment = env::by_name(&self.environment)?;
        let kind = self.algorithm_kind()?;
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if self.gamma == 1.0 && !environment.episodic() {
            return Err(Error::Config(
                "gamma = 1 needs an episodic environment".into(),
            ));
        }
        match (kind, &self.sigma) {
            (AlgorithmKind::QSigma, None) => {
                return Err(Error::Config("q_sigma needs a sigma key".into()));
            }
            (AlgorithmKind::QSigma, Some(spec)) => {
                spec.schedule().map_err(|e| Error::Config(e.to_string()))?;
            }
            (_, Some(_)) => {
                return Err(Error::Config(format!(
                    "{} fixes its own sampling degree; remove the sigma key",
                    kind.name()
                )));
            }
            (_, None) => {}
        }
        if self.episodes == 0 || self.runs == 0 {
            return Err(Error::Config("episodes and runs must be at least 1".into()));
        }
        if self.measurement == Measurement::RmsPerEpisode
            && self.environment != "random_walk_19"
        {
            return Err(Error::Config(
                "rms_per_episode needs a task with an exact solution (random_walk_19)".into(),
            ));
        }
        if let Some(alphas) = &self.alphas {
            if alphas.is_empty() {
                return Err(Error::Config("alphas must not be empty".into()));
            }
            for &a in alphas {
                if !(a > 0.0 && a <= 1.0) {
                    return Err(Error::Config(format!("alphas entry {a} outside (0, 1]")));
                }
            }
        }
        if self.moving_average_window == 0 {
            return Err(Error::Config("moving_average_window must be at least 1".into()));
        }
        if self.max_steps_per_episode == Some(0) {
            return Err(Error::Config("max_steps_per_episode must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
        environment = "random_walk_19"
        algorithm = "q_sigma"
        n = 3
        alpha = 0.4
        gamma = 1.0
        epsilon = 1.0
        sigma = 0.5
        episodes = 50
        runs = 100
        seed = 1234
        measurement = "rms_per_episode"
    "#;

    #[test]
    fn a_complete_config_parses_and_validates() {
        let cfg = ExperimentConfig::from_toml_str(GOOD).unwrap();
        assert_eq!(cfg.environment, "random_walk_19");
        assert_eq!(cfg.moving_average_window, 30);
        assert!(matches!(cfg.sigma, Some(SigmaSpec::Constant(s)) if s == 0.5));
        assert!(cfg.max_steps_per_episode.is_none());
    }

    #[test]
    fn decay_sigma_parses_from_a_table() {
        let text = GOOD.replace("sigma = 0.5", "sigma = { initial = 1.0, factor = 0.95 }");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        match cfg.sigma {
            Some(SigmaSpec::Decay { initial, factor }) => {
                assert_eq!((initial, factor), (1.0, 0.95));
            }
            other => panic!("expected decay sigma, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{GOOD}\nnonsense = 3\n");
        assert!(ExperimentConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn out_of_range_and_mismatched_fields_are_rejected() {
        for (from, to) in [
            ("alpha = 0.4", "alpha = 0.0"),
            ("alpha = 0.4", "alpha = 1.5"),
            ("epsilon = 1.0", "epsilon = -0.1"),
            ("gamma = 1.0", "gamma = 1.2"),
            ("n = 3", "n = 0"),
            ("runs = 100", "runs = 0"),
            ("episodes = 50", "episodes = 0"),
            ("sigma = 0.5", "sigma = 1.7"),
            (r#"environment = "random_walk_19""#, r#"environment = "lunar_lander""#),
            (r#"algorithm = "q_sigma""#, r#"algorithm = "dyna_q""#),
        ] {
            let text = GOOD.replace(from, to);
            assert!(
                ExperimentConfig::from_toml_str(&text).is_err(),
                "expected rejection for {to}"
            );
        }
    }

    #[test]
    fn sigma_key_pairs_only_with_the_blended_algorithm() {
        let no_sigma = GOOD.replace("sigma = 0.5\n", "");
        assert!(ExperimentConfig::from_toml_str(&no_sigma).is_err());
        let sarsa_with_sigma = GOOD.replace(r#"algorithm = "q_sigma""#, r#"algorithm = "sarsa""#);
        assert!(ExperimentConfig::from_toml_str(&sarsa_with_sigma).is_err());
        let sarsa = GOOD
            .replace(r#"algorithm = "q_sigma""#, r#"algorithm = "sarsa""#)
            .replace("sigma = 0.5\n", "");
        assert!(ExperimentConfig::from_toml_str(&sarsa).is_ok());
    }

    #[test]
    fn rms_measurement_requires_the_prediction_task() {
        let text = GOOD
            .replace(r#"environment = "random_walk_19""#, r#"environment = "windy_gridworld""#);
        assert!(ExperimentConfig::from_toml_str(&text).is_err());
        let ok = text.replace(
            r#"measurement = "rms_per_episode""#,
            r#"measurement = "return_per_episode""#,
        );
        assert!(ExperimentConfig::from_toml_str(&ok).is_ok());
    }

    #[test]
    fn missing_files_surface_their_path() {
        let err = ExperimentConfig::load(Path::new("/nonexistent/exp.toml")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/exp.toml"));
    }
}
