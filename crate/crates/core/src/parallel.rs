use std::ops::Range;
use std::thread;

use crate::error::{Error, Result};

/// Splits `0..total` into `workers` contiguous blocks of `total / workers`
/// items; the remainder goes to the last block. Never returns more blocks
/// than items.
pub fn partition(total: usize, workers: usize) -> Vec<Range<usize>> {
    let workers = workers.clamp(1, total.max(1));
    let block = total / workers;
    (0..workers)
        .map(|t| {
            let start = t * block;
            let end = if t + 1 == workers {
                total
            } else {
                start + block
            };
            start..end
        })
        .collect()
}

/// Runs `job` on each block of a partition of `0..total`, one scoped thread
/// per block, and returns the per-block results in block order after all
/// threads have joined.
pub(crate) fn run_blocks<T, F>(total: usize, workers: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<usize>) -> Result<T> + Sync,
{
    if workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let blocks = partition(total, workers);
    if blocks.len() == 1 {
        return Ok(vec![job(blocks[0].clone())?]);
    }
    let job = &job;
    let joined: Vec<thread::Result<Result<T>>> = thread::scope(|s| {
        let handles: Vec<_> = blocks
            .into_iter()
            .map(|rows| s.spawn(move || job(rows)))
            .collect();
        handles.into_iter().map(|h| h.join()).collect()
    });
    joined
        .into_iter()
        .map(|r| r.unwrap_or_else(|_| Err(Error::Inconsistent("worker thread panicked".into()))))
        .collect()
}
