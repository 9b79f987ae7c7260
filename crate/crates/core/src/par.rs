//! Data-parallel map over independent runs. Uses rayon when the `parallel`
//! feature is on, a plain iterator otherwise.

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Like [`map`] but bounded to `jobs` worker threads. `None` uses the
/// global pool (one worker per logical CPU).
pub fn map_with_jobs<T, R, F>(items: &[T], jobs: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = jobs {
            if n <= 1 {
                return map_sequential(items, f);
            }
            match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => return pool.install(|| map(items, f)),
                Err(e) => log::warn!("thread pool unavailable ({e}); running sequentially"),
            }
            return map_sequential(items, f);
        }
        map(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        map_sequential(items, f)
    }
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let xs: Vec<u64> = (0..100).collect();
        let seq = map_sequential(&xs, |x| x * x);
        assert_eq!(map(&xs, |x| x * x), seq);
        assert_eq!(map_with_jobs(&xs, Some(3), |x| x * x), seq);
        assert_eq!(map_with_jobs(&xs, Some(1), |x| x * x), seq);
    }
}
