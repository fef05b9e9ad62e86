//! Data-parallel helpers. With the `parallel` feature disabled every
//! [`Execution`] runs sequentially.

/// How independent work items are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run work items concurrently.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..len).map(f).collect()`, possibly spread over the rayon pool. Output
/// order always follows the index.
pub fn map_indexed<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Fills `out[k] = f(k)`, in parallel chunks when allowed.
pub fn fill_indexed<T, F>(exec: Execution, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        out.par_iter_mut()
            .enumerate()
            .with_min_len(1024)
            .for_each(|(k, slot)| *slot = f(k));
        return;
    }
    let _ = exec;
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = f(k);
    }
}
