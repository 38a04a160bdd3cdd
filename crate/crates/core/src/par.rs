//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) `Execution::Parallel` runs on the
//! rayon global pool; without it every call runs sequentially. Results keep
//! input order either way.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether `Parallel` actually runs on a thread pool in this build.
    pub const PARALLEL_AVAILABLE: bool = cfg!(feature = "parallel");
}

pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = map(&xs, Execution::Sequential, |x| x * x);
        let par = map(&xs, Execution::Parallel, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 998_001);
    }
}
