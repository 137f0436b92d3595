//! Index-ordered map over independent jobs, parallel when the `parallel`
//! feature is enabled and requested, sequential otherwise. Results always
//! come back in index order, so reductions over them are deterministic.

pub fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Whether `map_indexed(.., true, ..)` actually runs in parallel.
pub const PARALLEL_AVAILABLE: bool = cfg!(feature = "parallel");
