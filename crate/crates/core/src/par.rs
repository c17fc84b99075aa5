use rayon::ThreadPoolBuilder;

/// Runs `f` on a dedicated pool of `workers` threads, or on the global
/// pool (one thread per available core) when `workers` is `None`.
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match workers {
        None => f(),
        Some(n) => ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("failed to start worker pool")
            .install(f),
    }
}

pub fn available_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
