//! Batch evaluation helpers. Inner loops over independent items (sweep rows,
//! seeds, random configurations) go through here so that the `parallel`
//! feature can switch them onto rayon. Output order always matches input
//! order, so results are identical under either strategy.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing; falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether this strategy really runs on multiple threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn map_range<R, F>(range: Range<u64>, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => range.into_par_iter().map(f).collect(),
        _ => range.map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = map(&xs, Execution::Sequential, |x| x * x + 1);
        let par = map(&xs, Execution::Parallel, |x| x * x + 1);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 50);

        let seq = map_range(0..500, Execution::Sequential, |s| s ^ 0xabcd);
        let par = map_range(0..500, Execution::Parallel, |s| s ^ 0xabcd);
        assert_eq!(seq, par);
    }
}
