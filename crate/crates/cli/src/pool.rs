//! Tiny fixed-size worker pool for parameter sweeps. Dispatch order is
//! shuffled by the run seed; results always come back in input order, so
//! output files do not depend on the thread count.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub fn run_indexed<T, R, F>(items: &[T], threads: usize, seed: u64, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let threads = threads.max(1).min(items.len().max(1));
    let cursor = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<R>>> = (0..items.len()).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let k = cursor.fetch_add(1, Ordering::Relaxed);
                if k >= order.len() {
                    break;
                }
                let idx = order[k];
                let out = f(&items[idx]);
                *results[idx].lock().expect("result slot poisoned") = Some(out);
            });
        }
    });

    results
        .into_iter()
        .map(|slot| slot.into_inner().expect("slot poisoned").expect("worker completed"))
        .collect()
}
