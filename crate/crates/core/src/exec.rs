//! Sequential or rayon-backed execution of the data-parallel loops.
//!
//! Without the `parallel` feature every [`Exec::Parallel`] request quietly runs
//! on the calling thread, so callers never need their own `cfg` switches.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Row count below which sparse products stay on one thread even when
/// parallel execution is requested.
pub const PAR_MIN_ROWS: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Whether work really fans out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Calls `f(offset, chunk)` over consecutive chunks of `out`.
pub(crate) fn for_each_chunk<T, F>(exec: Exec, out: &mut [T], min_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && out.len() >= min_len {
        let chunk = (out.len() / (4 * rayon::current_num_threads())).max(256);
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i * chunk, c));
        return;
    }
    let _ = (exec, min_len);
    f(0, out);
}

/// Order-preserving map over a slice.
pub(crate) fn map<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
