//! Four-point Gromov delta.
//!
//! For a quadruple with pairing sums `S1 >= S2 >= S3` (over
//! `d(x,y)+d(z,v)`, `d(x,z)+d(y,v)`, `d(x,v)+d(y,z)`) the quadruple delta is
//! `(S1 - S2) / 2`, the least `delta` for which
//! `d(x,y) + d(z,v) <= max(d(x,z) + d(y,v), d(x,v) + d(y,z)) + 2 delta`
//! holds under every relabeling. The space delta is the max over quadruples.
//!
//! [`exact_delta`] streams all `C(n,4)` distinct quadruples, split into one
//! block per outermost index; blocks run on the current rayon pool and merge
//! by `(max delta, then lexicographically smallest witness)`, so the result
//! does not depend on scheduling or worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricOracle;
use crate::sampling::{chunk_rng, distinct_sorted_tuple, TupleSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta: f64,
    pub witness: [usize; 4],
    pub mode: DeltaMode,
    pub quadruples: u64,
    pub seed: Option<u64>,
    pub elapsed_ms: f64,
}

/// Half the gap between the largest and the middle of three sums.
#[inline(always)]
fn top_gap(a: f64, b: f64, c: f64) -> f64 {
    let (hi, mid) = if a >= b {
        if b >= c {
            (a, b)
        } else if a >= c {
            (a, c)
        } else {
            (c, a)
        }
    } else if a >= c {
        (b, a)
    } else if b >= c {
        (b, c)
    } else {
        (c, b)
    };
    (hi - mid) * 0.5
}

/// Quadruple delta `(S1 - S2) / 2`. Invariant under all 24 orderings of the
/// indices (bit for bit, given an exactly symmetric oracle).
pub fn quadruple_delta<M: MetricOracle>(d: &M, x: usize, y: usize, z: usize, v: usize) -> f64 {
    top_gap(
        d.dist(x, y) + d.dist(z, v),
        d.dist(x, z) + d.dist(y, v),
        d.dist(x, v) + d.dist(y, z),
    )
}

#[derive(Debug, Clone, Copy)]
struct Best {
    delta: f64,
    witness: [usize; 4],
}

impl Best {
    const NONE: Best = Best {
        delta: f64::NEG_INFINITY,
        witness: [usize::MAX; 4],
    };

    fn merge(self, other: Best) -> Best {
        if other.delta > self.delta || (other.delta == self.delta && other.witness < self.witness) {
            other
        } else {
            self
        }
    }
}

pub fn binomial4(n: usize) -> u64 {
    if n < 4 {
        return 0;
    }
    let n = n as u128;
    (n * (n - 1) * (n - 2) * (n - 3) / 24) as u64
}

fn require_four(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::input(format!("need at least 4 points for a delta, got {n}")));
    }
    Ok(())
}

/// All quadruples whose smallest index is `i`, in lexicographic order.
/// Only strict improvements replace the running best, which keeps the
/// lexicographically first witness among ties.
fn block_dense<M: MetricOracle>(d: &M, i: usize) -> Best {
    let n = d.len();
    let row_i = d.row(i).expect("dense rows");
    let mut best = Best::NONE;
    for j in i + 1..n {
        let row_j = d.row(j).expect("dense rows");
        let dij = row_i[j];
        for k in j + 1..n {
            let row_k = d.row(k).expect("dense rows");
            let (dik, djk) = (row_i[k], row_j[k]);
            for l in k + 1..n {
                let g = top_gap(dij + row_k[l], dik + row_j[l], row_i[l] + djk);
                if g > best.delta {
                    best = Best {
                        delta: g,
                        witness: [i, j, k, l],
                    };
                }
            }
        }
    }
    best
}

fn block_generic<M: MetricOracle>(d: &M, i: usize) -> Best {
    let n = d.len();
    let mut best = Best::NONE;
    for j in i + 1..n {
        let dij = d.dist(i, j);
        for k in j + 1..n {
            let (dik, djk) = (d.dist(i, k), d.dist(j, k));
            for l in k + 1..n {
                let g = top_gap(dij + d.dist(k, l), dik + d.dist(j, l), d.dist(i, l) + djk);
                if g > best.delta {
                    best = Best {
                        delta: g,
                        witness: [i, j, k, l],
                    };
                }
            }
        }
    }
    best
}

/// Exact delta over all distinct quadruples, on the current rayon pool.
/// Wrap in [`crate::par::with_workers`] to pin the worker count.
pub fn exact_delta<M: MetricOracle>(d: &M) -> Result<DeltaReport> {
    let n = d.len();
    require_four(n)?;
    let start = Instant::now();
    let dense = d.row(0).is_some();
    let best = (0..n - 3)
        .into_par_iter()
        .map(|i| if dense { block_dense(d, i) } else { block_generic(d, i) })
        .reduce(|| Best::NONE, Best::merge);
    Ok(DeltaReport {
        delta: best.delta,
        witness: best.witness,
        mode: DeltaMode::Exact,
        quadruples: binomial4(n),
        seed: None,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Max quadruple delta over `samples` uniformly drawn distinct quadruples.
///
/// A lower bound on [`exact_delta`]. When `samples >= C(n,4)` the full
/// enumeration is cheaper than sampling and is used instead (mode `exact`).
pub fn sampled_delta<M: MetricOracle>(d: &M, samples: usize, seed: u64) -> Result<DeltaReport> {
    let n = d.len();
    require_four(n)?;
    if samples == 0 {
        return Err(Error::input("sample count must be at least 1"));
    }
    if samples as u64 >= binomial4(n) {
        let mut report = exact_delta(d)?;
        report.seed = Some(seed);
        return Ok(report);
    }
    let start = Instant::now();
    let plan = TupleSample::new(samples, seed);
    let best = (0..plan.chunk_count())
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut best = Best::NONE;
            for _ in 0..plan.chunk_len(c) {
                let q: [usize; 4] = distinct_sorted_tuple(&mut rng, n);
                best = best.merge(Best {
                    delta: quadruple_delta(d, q[0], q[1], q[2], q[3]),
                    witness: q,
                });
            }
            best
        })
        .reduce(|| Best::NONE, Best::merge);
    Ok(DeltaReport {
        delta: best.delta,
        witness: best.witness,
        mode: DeltaMode::Sampled,
        quadruples: samples as u64,
        seed: Some(seed),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{build_distance_matrix, BaseMetric, DistanceMatrix, PointCloud};
    use crate::par::with_workers;

    fn line(n: usize) -> DistanceMatrix {
        let cloud = PointCloud::new(1, (0..n).map(|i| vec![i as f64]).collect()).unwrap();
        build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap()
    }

    /// Oracle: the smallest delta making the labeled condition hold for
    /// every ordering, found by enumerating orderings directly.
    fn brute_quadruple_delta(d: &DistanceMatrix, q: [usize; 4]) -> f64 {
        let mut worst: f64 = 0.0;
        for perm in permutations(q) {
            let [x, y, z, v] = perm;
            let lhs = d.get(x, y) + d.get(z, v);
            let rhs = (d.get(x, z) + d.get(y, v)).max(d.get(x, v) + d.get(y, z));
            worst = worst.max((lhs - rhs) / 2.0);
        }
        worst
    }

    fn permutations(q: [usize; 4]) -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for e in 0..4 {
                        let idx = [a, b, c, e];
                        let mut seen = [false; 4];
                        if idx.iter().all(|&t| !std::mem::replace(&mut seen[t], true)) {
                            out.push([q[a], q[b], q[c], q[e]]);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn collinear_is_zero() {
        let d = line(4);
        assert_eq!(quadruple_delta(&d, 0, 1, 2, 3), 0.0);
        let r = exact_delta(&line(12)).unwrap();
        assert_eq!(r.delta, 0.0);
        assert_eq!(r.witness, [0, 1, 2, 3]);
        assert_eq!(r.quadruples, 495);
    }

    #[test]
    fn taxicab_corners() {
        let cloud = PointCloud::new(2, vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let d = build_distance_matrix(&cloud, BaseMetric::Taxicab).unwrap();
        assert_eq!(quadruple_delta(&d, 0, 1, 2, 3), 1.0);
        assert_eq!(exact_delta(&d).unwrap().delta, 1.0);
    }

    #[test]
    fn coincident_points_give_zero() {
        let cloud = PointCloud::random_uniform(6, 3, 11).unwrap();
        let d = build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap();
        for (a, b, c) in [(0, 1, 2), (3, 4, 5), (1, 3, 5)] {
            assert_eq!(quadruple_delta(&d, a, a, b, c), 0.0);
            assert_eq!(quadruple_delta(&d, a, b, a, c), 0.0);
            assert_eq!(quadruple_delta(&d, a, b, c, a), 0.0);
        }
    }

    #[test]
    fn matches_brute_force_on_random_quadruples() {
        let cloud = PointCloud::random_uniform(9, 2, 3).unwrap();
        for metric in [BaseMetric::Euclidean, BaseMetric::D1, BaseMetric::D1PlusD2] {
            let d = build_distance_matrix(&cloud, metric).unwrap();
            for i in 0..6 {
                let q = [i, i + 1, i + 2, i + 3];
                let fast = quadruple_delta(&d, q[0], q[1], q[2], q[3]);
                let slow = brute_quadruple_delta(&d, q);
                assert!((fast - slow).abs() <= 1e-12, "{fast} vs {slow}");
            }
        }
    }

    #[test]
    fn relabeling_invariance_is_bitwise() {
        let cloud = PointCloud::random_uniform(4, 5, 99).unwrap();
        let d = build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap();
        let reference = quadruple_delta(&d, 0, 1, 2, 3);
        for p in permutations([0, 1, 2, 3]) {
            assert_eq!(
                quadruple_delta(&d, p[0], p[1], p[2], p[3]).to_bits(),
                reference.to_bits()
            );
        }
    }

    #[test]
    fn four_point_space_equals_its_quadruple() {
        let cloud = PointCloud::random_uniform(4, 2, 5).unwrap();
        let d = build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap();
        let r = exact_delta(&d).unwrap();
        assert_eq!(r.delta, quadruple_delta(&d, 0, 1, 2, 3));
        assert_eq!(r.quadruples, 1);
    }

    #[test]
    fn witness_reproduces_delta_and_generic_path_agrees() {
        let cloud = PointCloud::random_uniform(25, 2, 8).unwrap();
        let d = build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap();
        let r = exact_delta(&d).unwrap();
        let [a, b, c, e] = r.witness;
        assert_eq!(quadruple_delta(&d, a, b, c, e), r.delta);

        struct Lazy<'a>(&'a DistanceMatrix);
        impl MetricOracle for Lazy<'_> {
            fn len(&self) -> usize {
                self.0.n()
            }
            fn dist(&self, i: usize, j: usize) -> f64 {
                self.0.get(i, j)
            }
        }
        let g = exact_delta(&Lazy(&d)).unwrap();
        assert_eq!(g.delta.to_bits(), r.delta.to_bits());
        assert_eq!(g.witness, r.witness);
    }

    #[test]
    fn ties_pick_lexicographically_smallest_witness() {
        // All pairwise distances 1: every quadruple has delta 0.
        let n = 7;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        let d = DistanceMatrix::from_rows(rows).unwrap();
        let r = with_workers(Some(3), || exact_delta(&d)).unwrap();
        assert_eq!(r.witness, [0, 1, 2, 3]);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let cloud = PointCloud::random_uniform(40, 2, 21).unwrap();
        let d = build_distance_matrix(&cloud, BaseMetric::Taxicab).unwrap();
        let one = with_workers(Some(1), || exact_delta(&d)).unwrap();
        let many = with_workers(Some(4), || exact_delta(&d)).unwrap();
        assert_eq!(one.delta.to_bits(), many.delta.to_bits());
        assert_eq!(one.witness, many.witness);
        let s1 = with_workers(Some(1), || sampled_delta(&d, 20_000, 7)).unwrap();
        let s4 = with_workers(Some(4), || sampled_delta(&d, 20_000, 7)).unwrap();
        assert_eq!(s1.delta.to_bits(), s4.delta.to_bits());
        assert_eq!(s1.witness, s4.witness);
    }

    #[test]
    fn sampled_is_bounded_by_exact() {
        let cloud = PointCloud::random_uniform(30, 2, 4).unwrap();
        let d = build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap();
        let exact = exact_delta(&d).unwrap();
        for seed in 0..5 {
            let s = sampled_delta(&d, 2_000, seed).unwrap();
            assert!(s.delta <= exact.delta);
            assert_eq!(s.mode, DeltaMode::Sampled);
            assert_eq!(s.seed, Some(seed));
            let [a, b, c, e] = s.witness;
            assert_eq!(quadruple_delta(&d, a, b, c, e), s.delta);
        }
    }

    #[test]
    fn sampling_with_full_coverage_is_exact() {
        let cloud = PointCloud::random_uniform(8, 2, 4).unwrap();
        let d = build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap();
        let exact = exact_delta(&d).unwrap();
        let s = sampled_delta(&d, 70, 1).unwrap();
        assert_eq!(s.delta, exact.delta);
        assert_eq!(s.witness, exact.witness);
        assert_eq!(s.mode, DeltaMode::Exact);
    }

    #[test]
    fn too_few_points() {
        assert!(exact_delta(&line(3)).is_err());
        assert!(sampled_delta(&line(3), 10, 0).is_err());
        assert!(sampled_delta(&line(10), 0, 0).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = DeltaReport {
            delta: 0.5,
            witness: [0, 1, 2, 3],
            mode: DeltaMode::Sampled,
            quadruples: 10,
            seed: Some(3),
            elapsed_ms: 1.0,
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["mode"], "sampled");
        assert_eq!(v["witness"], serde_json::json!([0, 1, 2, 3]));
        assert_eq!(v["quadruples"], 10);
        assert_eq!(v["seed"], 3);
        assert!(v.get("elapsed_ms").is_some());
    }

    #[test]
    fn binomial() {
        assert_eq!(binomial4(3), 0);
        assert_eq!(binomial4(4), 1);
        assert_eq!(binomial4(40), 91_390);
        assert_eq!(binomial4(200), 64_684_950);
    }
}
