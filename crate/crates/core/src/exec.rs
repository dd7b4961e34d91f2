//! Execution plan for data-parallel loops.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool of
//! the requested size. Without it, or with `Workers::Sequential`, every loop
//! runs on the calling thread. Every parallel loop in the crate computes each
//! item from its index alone, so both paths produce identical results.

/// Name of the environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CORRUPTSCM_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    /// Run on the calling thread.
    Sequential,
    /// A pool with this many threads.
    Threads(usize),
    /// Rayon's global pool.
    #[default]
    Auto,
}

impl Workers {
    /// Read the worker count from [`WORKERS_ENV`], falling back to `Auto`.
    pub fn from_env() -> Self {
        match std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(n) => Self::from_count(n),
            None => Workers::Auto,
        }
    }

    /// `0` means automatic, `1` sequential.
    pub fn from_count(n: usize) -> Self {
        match n {
            0 => Workers::Auto,
            1 => Workers::Sequential,
            n => Workers::Threads(n),
        }
    }

    /// Map `f` over `0..n`, returning results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            match self {
                Workers::Sequential => (0..n).map(f).collect(),
                Workers::Auto => (0..n).into_par_iter().map(f).collect(),
                Workers::Threads(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build()
                {
                    Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                    Err(e) => {
                        log::warn!("thread pool unavailable ({e}); running sequentially");
                        (0..n).map(f).collect()
                    }
                },
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = self;
            (0..n).map(f).collect()
        }
    }

    /// Like [`Workers::map`] but stops at the first error in index order.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }
}
