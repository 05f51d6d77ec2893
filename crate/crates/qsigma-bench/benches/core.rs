//! Throughput benchmarks for the hot paths: the agent's per-step update, tile
//! coding, direct return evaluation, and the exact solvers.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use qsigma::{
    enumerate_mdp, env_by_name, make_algorithm, nstep_return_q_sigma, value_iteration, AgentParams,
    AlgorithmKind, PolicyModel, RngStream, SegmentStep, SegmentTail, SigmaSchedule, TileCoder,
    TrajectorySegment,
};

fn agent_params(n: usize, num_states: usize, num_actions: usize) -> AgentParams {
    AgentParams {
        n,
        alpha: 0.4,
        gamma: 1.0,
        q: qsigma::ActionValues::tabular(num_states, num_actions).unwrap(),
        behavior: PolicyModel::epsilon_greedy(1.0).unwrap(),
        target: None,
        sigma: Some(SigmaSchedule::constant(0.5).unwrap()),
    }
}

/// Whole random-walk episodes through the agent, the dominant cost of every
/// experiment in the harness.
fn bench_agent_episodes(c: &mut Criterion) {
    let env = env_by_name("random_walk_19").unwrap();
    for n in [1usize, 3, 8] {
        c.bench_function(&format!("agent_episode_walk_n{n}"), |b| {
            let mut agent =
                make_algorithm(AlgorithmKind::QSigma, agent_params(n, 21, 2)).unwrap();
            let mut rng = RngStream::from_seed(7);
            b.iter(|| {
                let mut state = env.reset(&mut rng);
                let mut action = agent.begin_episode(&state, &mut rng).unwrap();
                loop {
                    let step = env.step(&state, action, &mut rng).unwrap();
                    match agent.step(step.reward, &step.next, &mut rng).unwrap() {
                        None => break agent.finish_episode().unwrap(),
                        Some(a) => {
                            state = step.next;
                            action = a;
                        }
                    }
                }
            });
        });
    }
}

fn bench_tile_coding(c: &mut Criterion) {
    let coder = TileCoder::new([(-1.2, 0.5), (-0.07, 0.07)], 3).unwrap();
    let mut rng = RngStream::from_seed(11);
    let points: Vec<[f64; 2]> = (0..1024)
        .map(|_| [rng.uniform_in(-1.2, 0.5), rng.uniform_in(-0.07, 0.07)])
        .collect();
    let mut i = 0;
    c.bench_function("tile_coder_active_tiles", |b| {
        b.iter(|| {
            i = (i + 1) & 1023;
            black_box(coder.active_tiles(&points[i], 1).unwrap())
        })
    });
}

fn bench_return_evaluation(c: &mut Criterion) {
    let mut rng = RngStream::from_seed(13);
    let steps: Vec<SegmentStep> = (0..8)
        .map(|_| SegmentStep {
            target_prob: rng.uniform_in(0.1, 1.0),
            behavior_prob: rng.uniform_in(0.1, 1.0),
            sigma: rng.uniform(),
            q_sa: rng.uniform_in(-1.0, 1.0),
            v: rng.uniform_in(-1.0, 1.0),
            reward: rng.uniform_in(-1.0, 1.0),
        })
        .collect();
    let segment = TrajectorySegment {
        gamma: 0.99,
        steps,
        tail: SegmentTail::Bootstrap { q_sa: 0.3, v: 0.2, sigma: 0.5 },
    };
    c.bench_function("nstep_return_blended_len8", |b| {
        b.iter(|| nstep_return_q_sigma(black_box(&segment)).unwrap())
    });
}

fn bench_exact_solver(c: &mut Criterion) {
    let env = env_by_name("windy_gridworld_stochastic").unwrap();
    let mdp = enumerate_mdp(env.as_ref(), 1.0).unwrap();
    c.bench_function("value_iteration_windy_1e-8", |b| {
        b.iter(|| value_iteration(black_box(&mdp), 1e-8).unwrap())
    });
}

criterion_group!(
    benches,
    bench_agent_episodes,
    bench_tile_coding,
    bench_return_evaluation,
    bench_exact_solver
);
criterion_main!(benches);
