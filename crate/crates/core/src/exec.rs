// SPDX-License-Identifier: Apache-2.0

//! Work distribution: a rayon pool per requested width when the `parallel`
//! feature is on, a plain loop otherwise or when the width is 1.

#[cfg(feature = "parallel")]
use std::collections::HashMap;
#[cfg(feature = "parallel")]
use std::sync::{Arc, Mutex, OnceLock};

/// Number of hardware threads, at least 1.
pub fn available_width() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Whether work at `width` actually runs on more than one thread.
pub(crate) fn is_parallel(width: usize) -> bool {
    cfg!(feature = "parallel") && width > 1
}

#[cfg(feature = "parallel")]
fn pool(width: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    pools
        .entry(width)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(width)
                    .thread_name(|i| format!("idw-worker-{i}"))
                    .build()
                    .expect("failed to build worker pool"),
            )
        })
        .clone()
}

/// Splits `out` into consecutive blocks of `block` elements and calls
/// `f(first_index, block)` for each, on up to `width` threads. Results come
/// back in block order.
pub(crate) fn map_blocks<R, F>(out: &mut [f64], block: usize, width: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, &mut [f64]) -> R + Sync + Send,
{
    let block = block.max(1);
    #[cfg(feature = "parallel")]
    if is_parallel(width) {
        use rayon::prelude::*;
        return pool(width).install(|| {
            out.par_chunks_mut(block)
                .enumerate()
                .map(|(b, chunk)| f(b * block, chunk))
                .collect()
        });
    }
    let _ = width;
    out.chunks_mut(block)
        .enumerate()
        .map(|(b, chunk)| f(b * block, chunk))
        .collect()
}

/// Evaluates `f(i)` for `i in 0..count`, in parallel when `parallel` is set
/// and the feature is enabled, sequentially otherwise. Results are in index
/// order either way.
pub(crate) fn map_indices<R, F>(count: usize, parallel: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..count).map(f).collect()
}

/// Calls `f(i)` for `i in 0..count` with no ordering guarantee when run in
/// parallel.
pub(crate) fn for_each_index<F>(count: usize, parallel: bool, f: F)
where
    F: Fn(usize) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        (0..count).into_par_iter().for_each(f);
        return;
    }
    let _ = parallel;
    (0..count).for_each(f);
}
