//! Execution policy for the data-parallel kernels.
//!
//! Every grid sweep, point batch and quadrature reduction in the crate goes
//! through [`Exec`]. With the `parallel` feature (default) the `Parallel`
//! policy is backed by rayon; without it both policies run sequentially.
//! Reductions are blocked and combined pairwise in a fixed order, so the
//! result of [`Exec::sum`] does not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block length of the deterministic reductions.
const SUM_BLOCK: usize = 2048;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Policy for a requested thread count (`1` forces sequential execution).
    pub fn for_threads(threads: usize) -> Self {
        if threads <= 1 {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `out[i] = f(i)` for every index.
    pub fn fill<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i);
        }
    }

    /// Collects `f(0), …, f(n-1)` in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Runs `f(chunk_index, chunk)` over consecutive chunks of `data`.
    pub fn for_chunks<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
            return;
        }
        for (i, c) in data.chunks_mut(chunk).enumerate() {
            f(i, c);
        }
    }

    /// Deterministic sum of `f(i)` over `0..n`: fixed blocks summed in order,
    /// block sums combined by pairwise reduction.
    pub fn sum<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let blocks = n.div_ceil(SUM_BLOCK);
        let partial = self.map(blocks, |b| {
            let lo = b * SUM_BLOCK;
            let hi = (lo + SUM_BLOCK).min(n);
            (lo..hi).map(&f).sum::<f64>()
        });
        pairwise(&partial)
    }
}

/// Pairwise summation of a slice.
pub fn pairwise(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => {
            let (a, b) = v.split_at(n / 2);
            pairwise(a) + pairwise(b)
        }
    }
}

/// Configures the global rayon pool. Only the first call has an effect.
pub fn init_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_policy_independent() {
        let f = |i: usize| ((i as f64) * 0.37).sin() * 1e-3 + 1.0 / (1.0 + i as f64);
        let a = Exec::Sequential.sum(100_003, f);
        let b = Exec::Parallel.sum(100_003, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn fill_and_map_agree() {
        let mut out = vec![0usize; 1000];
        Exec::Parallel.fill(&mut out, |i| i * i);
        assert_eq!(out, Exec::Sequential.map(1000, |i| i * i));
    }

    #[test]
    fn chunks_cover_everything() {
        let mut v = vec![0u32; 1001];
        Exec::Parallel.for_chunks(&mut v, 100, |ci, c| {
            for x in c.iter_mut() {
                *x = ci as u32 + 1;
            }
        });
        assert!(v.iter().all(|&x| x > 0));
        assert_eq!(v[1000], 11);
    }
}
