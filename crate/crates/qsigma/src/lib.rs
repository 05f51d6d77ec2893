//! Multi-step temporal-difference control with a per-step sampling degree.
//!
//! A single degree-of-sampling parameter, queried per time step, spans the
//! space between fully sampled backups (Sarsa) and fully expected ones (tree
//! backup); classic algorithms fall out as fixed settings. The crate provides:
//!
//! - the incremental agent ([`QSigmaAgent`]) plus the named special cases via
//!   [`make_algorithm`];
//! - the underlying return and TD-error computations over recorded windows
//!   ([`returns`]);
//! - tabular and tile-coded linear value estimates ([`ActionValues`]);
//! - three benchmark tasks: a 19-state random walk, a windy gridworld with an
//!   optional stochastic variant, and a mountain-car variant with a cliff;
//! - exact solvers for tabular tasks ([`oracle`]) used as ground truth;
//! - a seeded, reproducible experiment harness with CSV output ([`harness`]).

pub mod agent;
pub mod env;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod policy;
pub mod returns;
pub mod rng;
pub mod sigma;
pub mod state;
pub mod tilecoding;
pub mod values;

pub use agent::{
    make_algorithm, one_step_q_sigma_update, AgentParams, AlgorithmKind, QSigmaAgent,
    TransitionRecord, UpdateTrace,
};
pub use env::{
    by_name as env_by_name, random_walk_true_values, EnvStep, Environment, Outcome, ENV_NAMES,
};
pub use error::{Error, Result};
pub use harness::{
    run_experiment, sweep_alpha, AlphaPoint, ExperimentConfig, Measurement, RunStatistics,
};
pub use oracle::{
    enumerate_mdp, policy_evaluation, rms_state_value_error, value_iteration, TabularMdp,
};
pub use policy::PolicyModel;
pub use returns::{
    expected_action_value, importance_ratio, importance_ratio_sigma, nstep_return_expected_sarsa,
    nstep_return_q_sigma, nstep_return_sarsa, nstep_return_tree_backup, td_error_expected_sarsa,
    td_error_q_learning, td_error_sarsa, td_error_sigma, SegmentStep, SegmentTail,
    TrajectorySegment,
};
pub use rng::RngStream;
pub use sigma::SigmaSchedule;
pub use state::{ActionId, StateRef, StateRepr};
pub use tilecoding::TileCoder;
pub use values::{ActionValues, Featurizer};
