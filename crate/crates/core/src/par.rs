//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it, or with [`Parallelism::Sequential`], everything runs on the
//! calling thread. Results always come back in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// `Parallel` degrades to `Sequential` when the crate is built without rayon.
    pub fn effective(self) -> Parallelism {
        if cfg!(feature = "parallel") {
            self
        } else {
            Parallelism::Sequential
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(par: Parallelism, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    match par.effective() {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => items.into_par_iter().map(f).collect(),
        _ => items.into_iter().map(f).collect(),
    }
}

/// Folds `f` over `0..n` into per-worker accumulators created by `init`,
/// then combines them with `merge`.
#[cfg_attr(not(feature = "parallel"), allow(unused_variables))]
pub fn fold_range<A, I, F, M>(par: Parallelism, n: usize, init: I, f: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Send + Sync,
    F: Fn(&mut A, usize) + Send + Sync,
    M: Fn(A, A) -> A + Send + Sync,
{
    match par.effective() {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => (0..n)
            .into_par_iter()
            .fold(&init, |mut acc, i| {
                f(&mut acc, i);
                acc
            })
            .reduce(&init, &merge),
        _ => {
            let mut acc = init();
            for i in 0..n {
                f(&mut acc, i);
            }
            acc
        }
    }
}

/// Runs `op` inside a pool bounded to `jobs` threads (ignored when sequential).
pub fn with_jobs<R: Send>(jobs: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(jobs) = jobs {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
        {
            return pool.install(op);
        }
    }
    let _ = jobs;
    op()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        for par in [Parallelism::Sequential, Parallelism::Parallel] {
            let out = map(par, (0..1000).collect(), |i: u64| i * i);
            assert_eq!(out, (0..1000u64).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn fold_matches_sequential_sum() {
        let seq = fold_range(
            Parallelism::Sequential,
            500,
            || 0u64,
            |a, i| *a += i as u64,
            |a, b| a + b,
        );
        let par = fold_range(
            Parallelism::Parallel,
            500,
            || 0u64,
            |a, i| *a += i as u64,
            |a, b| a + b,
        );
        assert_eq!(seq, 124_750);
        assert_eq!(par, seq);
    }
}
