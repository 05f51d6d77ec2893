use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::runner::AlphaPoint;
use super::stats::RunStatistics;

/// Formats floats with 17 significant digits so values round-trip exactly and
/// files are byte-identical across re-runs.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io { path: path.to_path_buf(), source };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(contents.as_bytes()).map_err(io_err)
}

/// Episode series as CSV: `episode,mean,stderr,moving_avg`, episodes 1-based.
pub fn episode_csv(stats: &RunStatistics) -> String {
    let mut out = String::from("episode,mean,stderr,moving_avg\n");
    for e in 0..stats.episodes() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e + 1,
            fmt(stats.mean()[e]),
            fmt(stats.stderr()[e]),
            fmt(stats.moving_avg()[e]),
        ));
    }
    out
}

pub fn write_episode_csv(stats: &RunStatistics, path: &Path) -> Result<()> {
    write_atomically(path, &episode_csv(stats))
}

/// Sweep results as CSV: `alpha,mean,stderr`.
pub fn sweep_csv(points: &[AlphaPoint]) -> String {
    let mut out = String::from("alpha,mean,stderr\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", fmt(p.alpha), fmt(p.mean), fmt(p.stderr)));
    }
    out
}

pub fn write_sweep_csv(points: &[AlphaPoint], path: &Path) -> Result<()> {
    write_atomically(path, &sweep_csv(points))
}
