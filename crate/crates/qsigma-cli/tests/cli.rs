//! End-to-end checks of the installed binary: exit codes, listing commands,
//! and the run/sweep subcommands against a small throwaway config.

use std::path::Path;
use std::process::{Command, Output};

fn qsigma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsigma"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.into_os_string().into_string().unwrap()
}

const SMALL_WALK: &str = r#"
environment = "random_walk_19"
algorithm = "q_sigma"
n = 3
alpha = 0.4
gamma = 1.0
epsilon = 1.0
sigma = 0.5
episodes = 5
runs = 4
seed = 7
measurement = "rms_per_episode"
"#;

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(code(&qsigma(&["--help"])), 0);
    assert_eq!(code(&qsigma(&["run", "--help"])), 0);
    assert_eq!(code(&qsigma(&["no-such-command"])), 1);
    assert_eq!(code(&qsigma(&["run"])), 1, "missing config path is a usage error");
    assert_eq!(code(&qsigma(&["reproduce", "no-such-task"])), 1);
}

#[test]
fn listing_commands_enumerate_names() {
    let envs = qsigma(&["list-envs"]);
    assert_eq!(code(&envs), 0);
    let envs = stdout(&envs);
    for name in ["random_walk_19", "windy_gridworld_stochastic", "mountain_cliff"] {
        assert!(envs.lines().any(|l| l == name), "missing env {name} in {envs}");
    }

    let algos = qsigma(&["list-algorithms"]);
    assert_eq!(code(&algos), 0);
    let algos = stdout(&algos);
    for name in ["sarsa", "expected_sarsa", "tree_backup", "q_learning", "q_sigma"] {
        assert!(algos.lines().any(|l| l == name), "missing algorithm {name} in {algos}");
    }
}

#[test]
fn run_rejects_broken_configs_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let out = qsigma(&["run", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    // Valid TOML, invalid experiment: sarsa must not carry a sampling degree.
    let bad = write_config(
        dir.path(),
        "bad.toml",
        &SMALL_WALK.replace("\"q_sigma\"", "\"sarsa\""),
    );
    let out = qsigma(&["run", &bad]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn run_writes_episode_csv_and_honors_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "walk.toml", SMALL_WALK);
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let out_c = dir.path().join("c.csv");

    let run = qsigma(&["run", &cfg, "--out", out_a.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout(&run).contains("4 runs x 5 episodes"));

    let text = std::fs::read_to_string(&out_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("episode,mean,stderr,moving_avg"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("1,"));
    assert!(rows[4].starts_with("5,"));

    // Same config, same seed: identical bytes. A different seed moves them.
    qsigma(&["run", &cfg, "--out", out_b.to_str().unwrap()]);
    qsigma(&["run", &cfg, "--seed", "8", "--out", out_c.to_str().unwrap()]);
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());
    assert_ne!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_c).unwrap());

    // Without --out the CSV lands next to the config.
    let run = qsigma(&["run", &cfg, "--runs", "2"]);
    assert_eq!(code(&run), 0);
    assert!(stdout(&run).contains("2 runs"));
    assert!(dir.path().join("walk.csv").exists());
}

#[test]
fn sweep_writes_one_row_per_step_size() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.toml",
        &format!("{SMALL_WALK}alphas = [0.2, 0.4, 0.6]\n"),
    );
    let out = dir.path().join("grid.csv");
    let run = qsigma(&["sweep", &cfg, "--out", out.to_str().unwrap(), "--parallel", "2"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout(&run).contains("3 step sizes"));

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,mean,stderr"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    let alpha_of = |row: &str| row.split(',').next().unwrap().parse::<f64>().unwrap();
    assert_eq!(alpha_of(rows[0]), 0.2);
    assert_eq!(alpha_of(rows[2]), 0.6);

    // A sweep needs a grid to walk.
    let bare = write_config(dir.path(), "bare.toml", SMALL_WALK);
    assert_eq!(code(&qsigma(&["sweep", &bare])), 2);
}
