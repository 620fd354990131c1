use crate::error::Result;

/// How independent samples are spread over threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// A dedicated pool with this many workers; zero means one per core.
    Threads(usize),
    /// rayon's global pool.
    #[default]
    Global,
}

impl Parallelism {
    pub fn from_workers(workers: usize) -> Self {
        if workers == 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Threads(workers)
        }
    }
}

/// `(0..n).map(f)` collected in index order, evaluated according to `par`.
///
/// Without the `parallel` feature every mode runs sequentially.
pub fn ordered_map<T, F>(n: usize, par: Parallelism, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match par {
        Parallelism::Sequential => Ok((0..n).map(f).collect()),
        #[cfg(feature = "parallel")]
        Parallelism::Global => {
            use rayon::prelude::*;
            Ok((0..n).into_par_iter().map(f).collect())
        }
        #[cfg(feature = "parallel")]
        Parallelism::Threads(workers) => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| crate::error::SffError::Config(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
        }
        #[cfg(not(feature = "parallel"))]
        Parallelism::Global | Parallelism::Threads(_) => Ok((0..n).map(f).collect()),
    }
}

/// Like [`ordered_map`] for fallible work; the error of the lowest failing
/// index is returned.
pub fn try_ordered_map<T, F>(n: usize, par: Parallelism, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    ordered_map(n, par, f)?.into_iter().collect()
}
