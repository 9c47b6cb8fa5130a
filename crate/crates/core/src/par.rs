//! Ordered data-parallel maps over sweep grids.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it the same calls run sequentially. Results always come back in
//! input order, so output is identical either way.

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_sequential(items, f)
}

/// Always-sequential variant, kept available for benchmarking against the pool.
pub fn map_sequential<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Runs `f` on a dedicated pool of `threads` workers (ignored without `parallel`).
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send, F: FnOnce() -> R + Send>(threads: Option<usize>, f: F) -> R {
    match threads {
        Some(k) if k > 0 => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send, F: FnOnce() -> R + Send>(_threads: Option<usize>, f: F) -> R {
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_and_sequential_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map_ordered(&xs, |x| x * x);
        let b = map_sequential(&xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(with_threads(Some(2), || map_ordered(&xs, |x| x + 1)), map_sequential(&xs, |x| x + 1));
    }
}
