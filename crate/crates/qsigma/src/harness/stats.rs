use std::ops::Range;

use crate::error::{Error, Result};

/// Per-episode measurements of a batch of independent runs, with the
/// aggregates the experiments report: episode means over runs, their standard
/// errors, and a trailing moving average of the means.
#[derive(Clone, Debug)]
pub struct RunStatistics {
    /// Row per run, column per episode.
    data: Vec<Vec<f64>>,
    episodes: usize,
    mean: Vec<f64>,
    stderr: Vec<f64>,
    moving_avg: Vec<f64>,
}

impl RunStatistics {
    /// `window` sizes the trailing moving average; early episodes average
    /// whatever prefix exists.
    pub fn from_matrix(data: Vec<Vec<f64>>, window: usize) -> Result<Self> {
        if data.is_empty() || data[0].is_empty() {
            return Err(Error::invalid("run matrix", "needs at least one run and one episode"));
        }
        if window == 0 {
            return Err(Error::invalid("moving average window", "must be at least 1"));
        }
        let episodes = data[0].len();
        if data.iter().any(|row| row.len() != episodes) {
            return Err(Error::invalid("run matrix", "runs have unequal episode counts"));
        }
        let runs = data.len();
        let mut mean = vec![0.0; episodes];
        for row in &data {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= runs as f64;
        }
        let mut stderr = vec![0.0; episodes];
        if runs > 1 {
            for (e, se) in stderr.iter_mut().enumerate() {
                let mut ss = 0.0;
                for row in &data {
                    let d = row[e] - mean[e];
                    ss += d * d;
                }
                *se = (ss / (runs - 1) as f64).sqrt() / (runs as f64).sqrt();
            }
        }
        let mut moving_avg = vec![0.0; episodes];
        for e in 0..episodes {
            let lo = (e + 1).saturating_sub(window);
            let span = &mean[lo..=e];
            moving_avg[e] = span.iter().sum::<f64>() / span.len() as f64;
        }
        Ok(Self { data, episodes, mean, stderr, moving_avg })
    }

    pub fn runs(&self) -> usize {
        self.data.len()
    }

    pub fn episodes(&self) -> usize {
        self.episodes
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn stderr(&self) -> &[f64] {
        &self.stderr
    }

    pub fn moving_avg(&self) -> &[f64] {
        &self.moving_avg
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    /// Mean and standard error (over runs) of the per-run average measurement
    /// across an episode range. This is the summary a parameter-sweep point
    /// reports.
    pub fn summary_over(&self, range: Range<usize>) -> Result<(f64, f64)> {
        if range.is_empty() || range.end > self.episodes {
            return Err(Error::invalid(
                "episode range",
                format!("{}..{} outside 0..{}", range.start, range.end, self.episodes),
            ));
        }
        let runs = self.runs();
        let per_run: Vec<f64> = self
            .data
            .iter()
            .map(|row| row[range.clone()].iter().sum::<f64>() / range.len() as f64)
            .collect();
        let mean = per_run.iter().sum::<f64>() / runs as f64;
        let se = if runs > 1 {
            let ss: f64 = per_run.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (runs - 1) as f64).sqrt() / (runs as f64).sqrt()
        } else {
            0.0
        };
        Ok((mean, se))
    }

    /// Summary over every episode.
    pub fn overall_summary(&self) -> (f64, f64) {
        self.summary_over(0..self.episodes).expect("full range is valid")
    }
}
