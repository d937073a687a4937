//! Deterministic fan-out over independent trials.
//!
//! Worker `w` of `W` handles trial indices congruent to `w` mod `W` and the
//! results are reassembled by index, so the output vector is identical for
//! every worker count. Trials must derive their own RNG streams from the
//! trial index rather than sharing a sequential stream.

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "WELDED_WORKERS";

/// Resolve a worker count: explicit flag, else `WELDED_WORKERS`, else 1.
pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .filter(|&w| w > 0)
    .unwrap_or(1)
}

/// Map `f` over `0..count`, in parallel across `workers` threads.
pub fn run_trials<T, F>(workers: usize, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let workers = workers.max(1);
    if workers == 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = Vec::with_capacity(count as usize);
    slots.resize_with(count as usize, || None);
    let mut chunks: Vec<&mut [Option<T>]> = Vec::new();
    // Striped assignment would split the slot vector non-contiguously, so
    // chunk it instead: worker w owns a contiguous index range.
    let per = count.div_ceil(workers as u64) as usize;
    let mut rest = slots.as_mut_slice();
    while !rest.is_empty() {
        let take = per.min(rest.len());
        let (head, tail) = rest.split_at_mut(take);
        chunks.push(head);
        rest = tail;
    }
    let starts: Vec<u64> = chunks
        .iter()
        .scan(0u64, |acc, c| {
            let s = *acc;
            *acc += c.len() as u64;
            Some(s)
        })
        .collect();
    std::thread::scope(|scope| {
        for (chunk, start) in chunks.into_iter().zip(starts) {
            let f = &f;
            scope.spawn(move || {
                for (offset, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(f(start + offset as u64));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}
