//! Seeded index-tuple sampling.
//!
//! Samples are produced in fixed-size chunks; chunk `c` draws from ChaCha8
//! seeded with `seed_from_u64(seed)` on stream `c`. Chunk boundaries do not
//! depend on the worker count, so parallel runs reproduce sequential ones.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const CHUNK: usize = 4096;

/// How many random tuples to draw, and from which seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleSample {
    pub count: usize,
    pub seed: u64,
}

impl TupleSample {
    pub fn new(count: usize, seed: u64) -> Self {
        TupleSample { count, seed }
    }

    pub fn chunk_count(&self) -> usize {
        self.count.div_ceil(CHUNK)
    }

    /// Length of chunk `c`; the last one may be short.
    pub fn chunk_len(&self, c: usize) -> usize {
        CHUNK.min(self.count - c * CHUNK)
    }
}

pub fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Uniform tuple over `0..n`, repeats allowed.
pub fn any_tuple<const R: usize>(rng: &mut impl Rng, n: usize) -> [usize; R] {
    std::array::from_fn(|_| rng.gen_range(0..n))
}

/// Uniform tuple of pairwise distinct indices, sorted ascending. Needs `n >= R`.
pub fn distinct_sorted_tuple<const R: usize>(rng: &mut impl Rng, n: usize) -> [usize; R] {
    debug_assert!(n >= R);
    let mut out = [0usize; R];
    let mut filled = 0;
    while filled < R {
        let c = rng.gen_range(0..n);
        if !out[..filled].contains(&c) {
            out[filled] = c;
            filled += 1;
        }
    }
    out.sort_unstable();
    out
}

/// Every `R`-tuple over a small index set built from the anchors and the
/// first and last points: repeats, anchor coincidences, all-equal tuples.
pub fn degenerate_battery<const R: usize>(n: usize, anchors: &[usize]) -> Vec<[usize; R]> {
    if n == 0 {
        return Vec::new();
    }
    let mut base: BTreeSet<usize> = anchors.iter().copied().filter(|&a| a < n).take(2).collect();
    base.extend([0, 1.min(n - 1), n - 1]);
    let base: Vec<usize> = base.into_iter().collect();
    let total = base.len().pow(R as u32);
    (0..total)
        .map(|mut code| {
            std::array::from_fn(|_| {
                let v = base[code % base.len()];
                code /= base.len();
                v
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_tuples_are_distinct_and_sorted() {
        let mut rng = chunk_rng(9, 0);
        for _ in 0..1000 {
            let t: [usize; 4] = distinct_sorted_tuple(&mut rng, 5);
            assert!(t.windows(2).all(|w| w[0] < w[1]));
            assert!(t[3] < 5);
        }
    }

    #[test]
    fn chunks_cover_count() {
        let s = TupleSample::new(CHUNK * 2 + 5, 0);
        assert_eq!(s.chunk_count(), 3);
        assert_eq!(s.chunk_len(2), 5);
        let total: usize = (0..s.chunk_count()).map(|c| s.chunk_len(c)).sum();
        assert_eq!(total, s.count);
        assert_eq!(TupleSample::new(0, 1).chunk_count(), 0);
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: [usize; 3] = any_tuple(&mut chunk_rng(1, 0), 1000);
        let b: [usize; 3] = any_tuple(&mut chunk_rng(1, 0), 1000);
        let c: [usize; 3] = any_tuple(&mut chunk_rng(1, 1), 1000);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn battery_contains_anchor_coincidences() {
        let b: Vec<[usize; 3]> = degenerate_battery(10, &[4]);
        assert!(b.contains(&[4, 4, 4]));
        assert!(b.contains(&[0, 4, 9]));
        assert_eq!(b.len(), 4usize.pow(3));
        let tiny: Vec<[usize; 2]> = degenerate_battery(1, &[]);
        assert_eq!(tiny, vec![[0, 0]]);
    }
}
