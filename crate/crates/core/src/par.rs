//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the `Parallel` mode runs on a rayon pool;
//! without it every mode runs sequentially. Output order always follows
//! input order, so results do not depend on the schedule.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// `jobs == 0` uses the global pool.
    Parallel { jobs: usize },
}

impl Default for Exec {
    fn default() -> Self {
        Exec::Parallel { jobs: 0 }
    }
}

impl Exec {
    /// Job count from the `WFOCK_JOBS` environment variable, if set.
    pub fn from_env() -> Self {
        match std::env::var("WFOCK_JOBS").ok().and_then(|v| v.parse().ok()) {
            Some(1) => Exec::Sequential,
            Some(jobs) => Exec::Parallel { jobs },
            None => Exec::default(),
        }
    }

    pub fn with_jobs(jobs: Option<usize>) -> Self {
        match jobs {
            Some(1) => Exec::Sequential,
            Some(jobs) => Exec::Parallel { jobs },
            None => Self::from_env(),
        }
    }

    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter().map(f).collect(),
            Exec::Parallel { jobs } => parallel_map(*jobs, items, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if jobs == 0 {
        return items.par_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(f).collect()),
        Err(_) => items.par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(_jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..200).collect();
        let a = Exec::Sequential.map(&xs, |x| x * x);
        let b = Exec::Parallel { jobs: 3 }.map(&xs, |x| x * x);
        assert_eq!(a, b);
    }
}
