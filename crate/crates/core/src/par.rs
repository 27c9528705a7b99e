//! Node-wise data parallelism with a sequential fallback.
//!
//! Every per-node map in the crate goes through [`Execution::map`], which
//! collects results in index order. Reductions happen afterwards over the
//! collected vector, so output is identical whichever mode runs.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise
    /// behaves like `Sequential`.
    #[default]
    Parallel,
}

/// Below this many items the rayon split overhead dominates.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_LEN: usize = 512;

impl Execution {
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel if len >= MIN_PARALLEL_LEN => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    /// Maps over a slice of independent jobs (curves, files) in order.
    pub fn map_items<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let f = |i: usize| (i as f64).sin() * 1e-3;
        let a = Execution::Sequential.map(5000, f);
        let b = Execution::Parallel.map(5000, f);
        assert_eq!(a, b);
    }
}
