use qsigma::{Error, Result};

/// Runs `f` inside a rayon pool of the requested size, or on the global pool
/// when no size is given. Results are ordered by run index either way, so the
/// pool size changes scheduling but never output bytes.
pub fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(f)
        }
    }
}
