//! Minimal ordered parallel map over scoped threads.
//!
//! The freeness sweep runs one certificate per subgroup; certificates are
//! independent, so they can fan out across threads.  Results come back in
//! input order regardless of completion order, keeping every report
//! deterministic.  `degree <= 1` (or a single job) short-circuits to a plain
//! sequential map so single-core hosts pay nothing.

/// Apply `f` to every item, using up to `degree` worker threads, preserving
/// input order in the output.
pub(crate) fn parallel_map<T, U, F>(items: Vec<T>, degree: usize, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync,
{
    let n = items.len();
    if degree <= 1 || n <= 1 {
        return items.into_iter().map(f).collect();
    }
    let workers = degree.min(n);
    let mut slots: Vec<Option<U>> = Vec::with_capacity(n);
    slots.resize_with(n, || None);
    let jobs: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let queue = std::sync::Mutex::new(jobs.into_iter());
    let results = std::sync::Mutex::new(slots);
    let f = &f;
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = queue.lock().expect("queue lock").next();
                match job {
                    Some((idx, item)) => {
                        let out = f(item);
                        results.lock().expect("results lock")[idx] = Some(out);
                    }
                    None => break,
                }
            });
        }
    });
    results
        .into_inner()
        .expect("no panics in workers")
        .into_iter()
        .map(|s| s.expect("every slot filled"))
        .collect()
}
