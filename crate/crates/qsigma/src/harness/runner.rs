use rayon::prelude::*;

use crate::agent::{make_algorithm, AgentParams, QSigmaAgent};
use crate::env::{self, Environment};
use crate::error::Result;
use crate::oracle::rms_state_value_error;
use crate::policy::PolicyModel;
use crate::rng::RngStream;
use crate::tilecoding::TileCoder;
use crate::values::{ActionValues, Featurizer};

use super::config::{ExperimentConfig, Measurement};
use super::stats::RunStatistics;

/// One point of a step-size sweep: the overall average measurement (per-run
/// averages over all episodes) and its standard error over runs.
#[derive(Clone, Copy, Debug)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Fresh zero-initialized estimates matching the environment's state space:
/// a table for enumerable tasks, tile-coded linear weights for continuous ones.
pub fn action_values_for(environment: &dyn Environment) -> Result<ActionValues> {
    match environment.num_states() {
        Some(ns) => ActionValues::tabular(ns, environment.num_actions()),
        None => {
            let ranges = environment
                .coord_ranges()
                .expect("continuous environments declare coordinate ranges");
            let coder = TileCoder::new([ranges[0], ranges[1]], environment.num_actions())?;
            Ok(ActionValues::linear(Featurizer::Tiles(coder)))
        }
    }
}

fn build_agent(cfg: &ExperimentConfig, environment: &dyn Environment) -> Result<QSigmaAgent> {
    let behavior = PolicyModel::epsilon_greedy(cfg.epsilon)?;
    let sigma = match &cfg.sigma {
        Some(spec) => Some(spec.schedule()?),
        None => None,
    };
    make_algorithm(cfg.algorithm_kind()?, AgentParams {
        n: cfg.n,
        alpha: cfg.alpha,
        gamma: cfg.gamma,
        q: action_values_for(environment)?,
        behavior,
        target: None,
        sigma,
    })
}

/// Runs one seeded lifetime of `episodes` episodes and returns the per-episode
/// measurement series.
fn run_single(cfg: &ExperimentConfig, environment: &dyn Environment, seed: u64) -> Result<Vec<f64>> {
    let mut agent = build_agent(cfg, environment)?;
    let mut rng = RngStream::from_seed(seed);
    let truth = match cfg.measurement {
        Measurement::RmsPerEpisode => Some(env::random_walk_true_values()),
        Measurement::ReturnPerEpisode => None,
    };
    let mut series = Vec::with_capacity(cfg.episodes);
    for _ in 0..cfg.episodes {
        let mut state = environment.reset(&mut rng);
        let mut action = agent.begin_episode(&state, &mut rng)?;
        let mut episode_return = 0.0;
        let mut steps = 0usize;
        loop {
            let transition = environment.step(&state, action, &mut rng)?;
            episode_return += transition.reward;
            steps += 1;
            let next_action = agent.step(transition.reward, &transition.next, &mut rng)?;
            match next_action {
                None => {
                    agent.finish_episode()?;
                    break;
                }
                Some(a) => {
                    if cfg.max_steps_per_episode == Some(steps) {
                        agent.truncate_episode()?;
                        break;
                    }
                    state = transition.next;
                    action = a;
                }
            }
        }
        let measurement = match &truth {
            Some(truth) => rms_state_value_error(agent.q(), agent.target_policy(), truth)?,
            None => episode_return,
        };
        series.push(measurement);
    }
    Ok(series)
}

/// Runs the configured batch. Run i seeds its own random stream with
/// seed + i, so results are identical however the runs are scheduled across
/// threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunStatistics> {
    cfg.validate()?;
    let environment = env::by_name(&cfg.environment)?;
    let rows: Result<Vec<Vec<f64>>> = (0..cfg.runs)
        .into_par_iter()
        .map(|i| run_single(cfg, environment.as_ref(), cfg.seed.wrapping_add(i as u64)))
        .collect();
    RunStatistics::from_matrix(rows?, cfg.moving_average_window)
}

/// Repeats the experiment once per step size in the config's `alphas` grid.
pub fn sweep_alpha(cfg: &ExperimentConfig) -> Result<Vec<AlphaPoint>> {
    cfg.validate()?;
    let alphas = cfg
        .alphas
        .clone()
        .ok_or_else(|| crate::error::Error::Config("sweep needs an alphas grid".into()))?;
    let mut points = Vec::with_capacity(alphas.len());
    for alpha in alphas {
        let mut one = cfg.clone();
        one.alpha = alpha;
        one.alphas = None;
        let stats = run_experiment(&one)?;
        let (mean, stderr) = stats.overall_summary();
        points.push(AlphaPoint { alpha, mean, stderr });
    }
    Ok(points)
}
