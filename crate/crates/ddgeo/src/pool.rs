//! A fixed-size worker pool whose map preserves input order.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

pub struct Pool(ThreadPool);

impl Pool {
    /// `threads == 0` means one per core.
    pub fn new(threads: usize) -> Pool {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        Pool(pool)
    }

    pub fn threads(&self) -> usize {
        self.0.current_num_threads()
    }

    /// Applies `f` to every item; results come back in input order. Idle
    /// workers steal queued items, so no worker waits while work remains.
    pub fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        self.0.install(|| items.into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kept() {
        let p = Pool::new(4);
        let out = p.map((0..1000u64).collect(), |x| x * x);
        assert_eq!(out, (0..1000u64).map(|x| x * x).collect::<Vec<_>>());
        assert_eq!(p.threads(), 4);
    }
}
