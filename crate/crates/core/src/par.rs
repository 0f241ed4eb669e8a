//! Batch mapping that fans out on rayon when the `parallel` feature is
//! enabled and falls back to a plain sequential loop otherwise. Output order
//! always matches input order, so results are identical either way.

#[cfg(feature = "parallel")]
pub fn map_batch<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Send + Sync) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_batch<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Sequential mapping with the same signature, kept for benchmark
/// comparisons against the parallel path.
pub fn map_batch_seq<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}
