//! Acceptance gate: nine checks covering the algorithm identities, the
//! incremental agent, the exact solvers, convergence, the three published
//! experiment reproductions, and byte-level determinism of the tool itself.
//! Each test prints one PASS line with its measurements (visible with
//! `--nocapture`); the test harness itself reports the per-criterion verdict.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qsigma::{
    enumerate_mdp, importance_ratio_sigma, make_algorithm, nstep_return_expected_sarsa,
    nstep_return_q_sigma, nstep_return_sarsa, nstep_return_tree_backup, one_step_q_sigma_update,
    policy_evaluation, random_walk_true_values, rms_state_value_error, td_error_expected_sarsa,
    td_error_sarsa, td_error_sigma, value_iteration, ActionValues, AgentParams, AlgorithmKind,
    PolicyModel, RngStream, SegmentStep, SegmentTail, SigmaSchedule, StateRef, TabularMdp,
    TrajectorySegment,
};
use qsigma_cli::reproduce;

fn finish(name: &str, started: Instant, budget: Duration, detail: &str) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "{name} took {elapsed:?}, over its {budget:?} budget"
    );
    println!("{name}: PASS ({detail}; {elapsed:.2?} of {budget:?})");
}

fn random_segment(rng: &mut RngStream, len: usize) -> TrajectorySegment {
    let steps = (0..len)
        .map(|_| SegmentStep {
            target_prob: rng.uniform_in(0.05, 1.0),
            behavior_prob: rng.uniform_in(0.05, 1.0),
            sigma: rng.uniform(),
            q_sa: rng.uniform_in(-2.0, 2.0),
            v: rng.uniform_in(-2.0, 2.0),
            reward: rng.uniform_in(-2.0, 2.0),
        })
        .collect();
    let tail = if rng.uniform() < 0.5 {
        SegmentTail::Terminal
    } else {
        SegmentTail::Bootstrap {
            q_sa: rng.uniform_in(-2.0, 2.0),
            v: rng.uniform_in(-2.0, 2.0),
            sigma: rng.uniform(),
        }
    };
    TrajectorySegment { gamma: rng.uniform(), steps, tail }
}

fn with_sigmas(seg: &TrajectorySegment, interior: f64, tail_sigma: f64) -> TrajectorySegment {
    let mut out = seg.clone();
    for step in &mut out.steps {
        step.sigma = interior;
    }
    if let SegmentTail::Bootstrap { sigma, .. } = &mut out.tail {
        *sigma = tail_sigma;
    }
    out
}

/// Fixed sampling degrees reduce the blended return to each named return.
#[test]
fn c1_return_identities_across_sampling_degrees() {
    let started = Instant::now();
    let mut rng = RngStream::from_seed(101);
    let mut worst = 0.0_f64;
    for i in 0..12_000usize {
        let len = 1 + rng.index(8);
        let seg = random_segment(&mut rng, len);

        let sampled = with_sigmas(&seg, 1.0, 1.0);
        let d1 = (nstep_return_q_sigma(&sampled).unwrap()
            - nstep_return_sarsa(&sampled).unwrap())
        .abs();

        let expected = with_sigmas(&seg, 0.0, 0.0);
        let d2 = (nstep_return_q_sigma(&expected).unwrap()
            - nstep_return_tree_backup(&expected).unwrap())
        .abs();

        // Sampled interior, expectation only at the final step.
        let stair = with_sigmas(&seg, 1.0, 0.0);
        let d3 = match stair.tail {
            SegmentTail::Terminal => (nstep_return_q_sigma(&stair).unwrap()
                - nstep_return_sarsa(&stair).unwrap())
            .abs(),
            SegmentTail::Bootstrap { .. } => (nstep_return_q_sigma(&stair).unwrap()
                - nstep_return_expected_sarsa(&stair).unwrap())
            .abs(),
        };

        worst = worst.max(d1).max(d2).max(d3);
        assert!(
            d1 < 1e-12 && d2 < 1e-12 && d3 < 1e-12,
            "segment {i}: deviations {d1:.2e} {d2:.2e} {d3:.2e}"
        );
    }
    finish(
        "criterion 1 (return identities, 36000 segments)",
        started,
        Duration::from_secs(5),
        &format!("worst deviation {worst:.2e} < 1e-12"),
    );
}

/// The ring-buffer agent's applied updates match direct evaluation of the
/// recorded windows: return, importance ratio, and step size.
#[test]
fn c2_incremental_agent_matches_direct_evaluation() {
    let started = Instant::now();
    let mut episodes_checked = 0usize;
    let mut worst = 0.0_f64;
    let mut rng = RngStream::from_seed(202);
    for (i, n) in [1usize, 2, 3, 5].into_iter().enumerate() {
        let mut agent = make_algorithm(AlgorithmKind::QSigma, AgentParams {
            n,
            alpha: 0.3,
            gamma: 0.9,
            q: ActionValues::tabular(7, 3).unwrap(),
            behavior: PolicyModel::epsilon_greedy(0.4).unwrap(),
            target: Some(PolicyModel::epsilon_greedy(0.1).unwrap()),
            sigma: Some(
                SigmaSchedule::step_cycle(vec![0.3, 1.0, 0.0, 0.7, 0.5]).unwrap(),
            ),
        })
        .unwrap();
        agent.enable_tracing();
        for _ in 0..30 {
            agent.begin_episode(&StateRef::tabular(rng.index(6)), &mut rng).unwrap();
            for step in 0.. {
                let reward = rng.uniform_in(-2.0, 2.0);
                let next = if step >= 50 || rng.uniform() < 0.15 {
                    StateRef::terminal_tabular(6)
                } else {
                    StateRef::tabular(rng.index(6))
                };
                if agent.step(reward, &next, &mut rng).unwrap().is_none() {
                    break;
                }
            }
            agent.finish_episode().unwrap();
            episodes_checked += 1;
            for tr in agent.drain_traces() {
                let g = nstep_return_q_sigma(&tr.segment).unwrap();
                let rho = importance_ratio_sigma(&tr.segment).unwrap();
                let dg = (tr.g - g).abs();
                let dr = (tr.rho - rho).abs() / rho.abs().max(1.0);
                worst = worst.max(dg).max(dr);
                assert!(dg < 1e-12, "config {i} tau {}: return {} vs {g}", tr.tau, tr.g);
                assert!(dr < 1e-12, "config {i} tau {}: ratio {} vs {rho}", tr.tau, tr.rho);
                assert_eq!(
                    tr.applied_step.to_bits(),
                    (0.3 * tr.rho * tr.delta_sum).to_bits(),
                    "applied step must be alpha * rho * accumulated error"
                );
            }
        }
    }
    assert!(episodes_checked >= 100);
    finish(
        "criterion 2 (incremental vs direct over random episodes)",
        started,
        Duration::from_secs(5),
        &format!("{episodes_checked} episodes, worst deviation {worst:.2e} < 1e-12"),
    );
}

/// The blended one-step error is the sigma-weighted mix of the sampled and
/// expected one-step errors.
#[test]
fn c3_td_error_decomposition() {
    let started = Instant::now();
    let mut rng = RngStream::from_seed(303);
    let mut worst = 0.0_f64;
    for _ in 0..100_000 {
        let r = rng.uniform_in(-0.5, 0.5);
        let gamma = rng.uniform();
        let sigma = rng.uniform();
        let q_next = rng.uniform_in(-0.5, 0.5);
        let v_next = rng.uniform_in(-0.5, 0.5);
        let q_cur = rng.uniform_in(-0.5, 0.5);
        let blended = td_error_sigma(r, gamma, sigma, q_next, v_next, q_cur).unwrap();
        let sampled = td_error_sarsa(r, gamma, q_next, q_cur);
        let expected = td_error_expected_sarsa(r, gamma, v_next, q_cur);
        let mix = sigma * sampled + (1.0 - sigma) * expected;
        let d = (blended - mix).abs();
        worst = worst.max(d);
        assert!(d < 1e-15, "decomposition off by {d:.2e}");
    }
    finish(
        "criterion 3 (td error decomposition, 100000 draws)",
        started,
        Duration::from_secs(1),
        &format!("worst deviation {worst:.2e} < 1e-15"),
    );
}

/// Builds a fixed seeded episodic task: 10 interior states, 2 actions, every
/// action has three weighted arcs (one of them to the terminal state).
fn seeded_mdp() -> TabularMdp {
    let mut rng = RngStream::from_seed(404);
    let mut mdp = TabularMdp::new(11, 2, 0.5).unwrap();
    mdp.set_terminal(10);
    for s in 0..10 {
        for a in 0..2 {
            let n1 = rng.index(10);
            let n2 = rng.index(10);
            let w = rng.uniform_in(0.3, 0.6);
            mdp.add_transition(s, a, n1, w, rng.uniform_in(-1.0, 1.0));
            mdp.add_transition(s, a, n2, 0.9 - w, rng.uniform_in(-1.0, 1.0));
            mdp.add_transition(s, a, 10, 0.1, rng.uniform_in(-1.0, 1.0));
        }
    }
    mdp.validate().unwrap();
    mdp
}

fn sample_arc(mdp: &TabularMdp, s: usize, a: usize, rng: &mut RngStream) -> (usize, f64) {
    let mut u = rng.uniform();
    let arcs = mdp.transitions(s, a);
    for &(next, p, reward) in arcs {
        if u < p {
            return (next, reward);
        }
        u -= p;
    }
    let &(next, _, reward) = arcs.last().unwrap();
    (next, reward)
}

/// One-step control with decaying exploration and visit-count step sizes
/// drives the estimates to the optimal action values for any sampling degree.
#[test]
fn c4_one_step_control_converges_with_decaying_exploration() {
    let started = Instant::now();
    let mdp = seeded_mdp();
    let optimal = value_iteration(&mdp, 1e-12).unwrap();
    let opt_table = optimal.table().unwrap();

    let mut details = Vec::new();
    for sigma in [0.0, 0.5, 1.0] {
        let mut rng = RngStream::from_seed(405);
        let mut q = ActionValues::tabular(11, 2).unwrap();
        let mut visits = vec![0u64; 20];
        for episode in 1..=400_000u64 {
            // Exploration decays to zero while still visiting every pair
            // infinitely often in the limit.
            let eps = (episode as f64).powf(-0.25);
            let policy = PolicyModel::epsilon_greedy(eps).unwrap();
            let mut s = rng.index(10);
            let mut a = policy.sample(&q, &StateRef::tabular(s), &mut rng).unwrap();
            loop {
                let (next, reward) = sample_arc(&mdp, s, a, &mut rng);
                visits[s * 2 + a] += 1;
                let alpha = 1.0 / visits[s * 2 + a] as f64;
                if next == 10 {
                    one_step_q_sigma_update(
                        &mut q,
                        &StateRef::tabular(s),
                        a,
                        reward,
                        &StateRef::terminal_tabular(10),
                        None,
                        sigma,
                        alpha,
                        mdp.gamma(),
                        &policy,
                    )
                    .unwrap();
                    break;
                }
                let a_next = policy.sample(&q, &StateRef::tabular(next), &mut rng).unwrap();
                one_step_q_sigma_update(
                    &mut q,
                    &StateRef::tabular(s),
                    a,
                    reward,
                    &StateRef::tabular(next),
                    Some(a_next),
                    sigma,
                    alpha,
                    mdp.gamma(),
                    &policy,
                )
                .unwrap();
                s = next;
                a = a_next;
            }
        }
        let table = q.table().unwrap();
        let gap = table[..20]
            .iter()
            .zip(&opt_table[..20])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(
            gap < 0.05,
            "sigma {sigma}: estimates stopped {gap:.4} from optimal (limit 0.05)"
        );
        details.push(format!("sigma {sigma}: gap {gap:.4}"));
    }
    finish(
        "criterion 4 (decaying-exploration convergence to optimal)",
        started,
        Duration::from_secs(60),
        &details.join(", "),
    );
}

/// The exact evaluator reproduces the walk's closed-form values, and the
/// error measure reports the known all-zero-estimate error.
#[test]
fn c5_exact_evaluation_matches_closed_form() {
    let started = Instant::now();
    let env = qsigma::env_by_name("random_walk_19").unwrap();
    let mdp = enumerate_mdp(env.as_ref(), 1.0).unwrap();
    let zero = ActionValues::tabular(21, 2).unwrap();
    let uniform = PolicyModel::epsilon_greedy(1.0).unwrap();
    let v = policy_evaluation(&mdp, &uniform, &zero).unwrap();
    let truth = random_walk_true_values();
    let worst = v
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    assert!(worst < 1e-10, "evaluation off closed form by {worst:.2e}");

    // Root-mean-square of the ramp itself: sqrt(2 * (0.1^2 + ... + 0.9^2) / 19).
    let rms = rms_state_value_error(&zero, &uniform, &truth).unwrap();
    let frozen = 0.5477225575051661;
    assert!(
        (rms - frozen).abs() < 1e-3,
        "zero-estimate rms {rms} vs derived {frozen}"
    );
    finish(
        "criterion 5 (exact evaluation and error measure)",
        started,
        Duration::from_secs(5),
        &format!("worst state error {worst:.2e}, zero-estimate rms {rms:.10}"),
    );
}

fn assert_suite(name: &str, report: &reproduce::SuiteReport) {
    for check in &report.checks {
        assert!(
            check.passed,
            "{name} check {} failed: {}",
            check.name, check.detail
        );
    }
}

#[test]
fn c6_random_walk_reproduction() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce::randomwalk(dir.path()).unwrap();
    assert_suite("random walk", &report);
    finish(
        "criterion 6 (random walk reproduction)",
        started,
        Duration::from_secs(60),
        &format!("{} checks passed", report.checks.len()),
    );
}

#[test]
fn c7_windy_gridworld_reproduction() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce::windygrid(dir.path()).unwrap();
    assert_suite("windy gridworld", &report);
    finish(
        "criterion 7 (stochastic windy gridworld reproduction)",
        started,
        Duration::from_secs(15 * 60),
        &format!("{} checks passed", report.checks.len()),
    );
}

#[test]
fn c8_mountain_cliff_reproduction() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let report = reproduce::mountaincliff(dir.path()).unwrap();
    assert_suite("mountain cliff", &report);
    finish(
        "criterion 8 (mountain cliff reproduction)",
        started,
        Duration::from_secs(30 * 60),
        &format!("{} checks passed", report.checks.len()),
    );
}

fn reproduce_randomwalk_bytes(dir: &Path, parallel: Option<usize>) -> Vec<(String, Vec<u8>)> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qsigma"));
    cmd.arg("reproduce").arg("randomwalk").arg("--out").arg(dir);
    if let Some(n) = parallel {
        cmd.arg("--parallel").arg(n.to_string());
    }
    let output = cmd.output().expect("binary runs");
    assert!(
        output.status.success(),
        "reproduce failed: {}",
        String::from_utf8_lossy(&output.stdout)
    );
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

/// The shipped binary emits byte-identical CSVs across repeat invocations and
/// across thread-pool sizes.
#[test]
fn c9_reproduce_output_is_byte_identical() {
    let started = Instant::now();
    let base = tempfile::tempdir().unwrap();
    let first = reproduce_randomwalk_bytes(&base.path().join("a"), None);
    assert_eq!(first.len(), 6);
    let again = reproduce_randomwalk_bytes(&base.path().join("b"), None);
    let serial = reproduce_randomwalk_bytes(&base.path().join("c"), Some(1));
    let threaded = reproduce_randomwalk_bytes(&base.path().join("d"), Some(3));
    assert_eq!(first, again, "repeat invocation changed bytes");
    assert_eq!(first, serial, "--parallel 1 changed bytes");
    assert_eq!(first, threaded, "--parallel 3 changed bytes");
    let bytes: usize = first.iter().map(|(_, b)| b.len()).sum();
    finish(
        "criterion 9 (byte-identical reproduction)",
        started,
        Duration::from_secs(300),
        &format!("4 invocations, 6 files, {bytes} bytes each way"),
    );
}
