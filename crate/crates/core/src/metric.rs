//! Base metric spaces: point clouds, coordinate distance functions and the
//! dense distance matrix every other module consumes.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation contract `(i, j) -> distance` over the index set `0..len()`.
///
/// Implementors must be symmetric, zero on the diagonal and nonnegative.
/// The triangle inequality is not part of the contract.
pub trait MetricOracle: Sync {
    fn len(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Contiguous row `i`, when the oracle is backed by dense storage.
    /// The delta kernel uses it to skip per-entry dispatch.
    fn row(&self, _i: usize) -> Option<&[f64]> {
        None
    }
}

impl<M: MetricOracle + ?Sized> MetricOracle for &M {
    fn len(&self) -> usize {
        (**self).len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }

    fn row(&self, i: usize) -> Option<&[f64]> {
        (**self).row(i)
    }
}

/// Symmetric, nonnegative `n x n` matrix with an exactly zero diagonal.
#[derive(Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl fmt::Debug for DistanceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceMatrix")
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl DistanceMatrix {
    /// Builds a matrix from explicit rows, rejecting anything that breaks the
    /// invariants (checked bit-exactly).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            entries.extend_from_slice(row);
        }
        let m = DistanceMatrix { n, entries };
        m.validate()?;
        Ok(m)
    }

    /// Materializes `f(i, j)` for `i < j` and mirrors it, so the result is
    /// symmetric by construction. Rows are filled in parallel.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let mut entries = vec![0.0; n * n];
        if n > 0 {
            entries.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = match i.cmp(&j) {
                        std::cmp::Ordering::Less => f(i, j),
                        std::cmp::Ordering::Greater => f(j, i),
                        std::cmp::Ordering::Equal => 0.0,
                    };
                }
            });
        }
        let m = DistanceMatrix { n, entries };
        m.validate()?;
        Ok(m)
    }

    /// Materializes any oracle.
    pub fn from_oracle<M: MetricOracle>(oracle: &M) -> Result<Self> {
        Self::from_fn(oracle.len(), |i, j| oracle.dist(i, j))
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.entries[i * n + i] != 0.0 {
                return Err(Error::input(format!("diagonal entry ({i},{i}) is not zero")));
            }
            for j in 0..n {
                let v = self.entries[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::input(format!(
                        "entry ({i},{j}) = {v} is not a finite nonnegative number"
                    )));
                }
                if v.to_bits() != self.entries[j * n + i].to_bits() {
                    return Err(Error::input(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row_slice(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row_slice(i).to_vec()).collect()
    }

    /// Sub-matrix on the given indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::input(format!("index {bad} out of range for {} points", self.n)));
        }
        Self::from_fn(indices.len(), |a, b| self.get(indices[a], indices[b]))
    }

    /// Every entry multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::input(format!("scale factor {factor} must be positive")));
        }
        Self::from_fn(self.n, |i, j| self.get(i, j) * factor)
    }
}

impl MetricOracle for DistanceMatrix {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    fn row(&self, i: usize) -> Option<&[f64]> {
        Some(self.row_slice(i))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl Serialize for DistanceMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            n: self.n,
            entries: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistanceMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(d)?;
        if wire.entries.len() != wire.n {
            return Err(serde::de::Error::custom(format!(
                "declared n = {} but {} rows given",
                wire.n,
                wire.entries.len()
            )));
        }
        DistanceMatrix::from_rows(wire.entries).map_err(serde::de::Error::custom)
    }
}

/// Labeled points in `R^dim`. Coordinates are finite; labels, where
/// present, are unique. Duplicate coordinates are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    labels: Vec<Option<String>>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let labels = vec![None; points.len()];
        Self::with_labels(dim, points, labels)
    }

    pub fn with_labels(dim: usize, points: Vec<Vec<f64>>, labels: Vec<Option<String>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dimension must be positive"));
        }
        if labels.len() != points.len() {
            return Err(Error::input("label count does not match point count"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::input(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if let Some(c) = p.iter().find(|c| !c.is_finite()) {
                return Err(Error::input(format!("point {i} has non-finite coordinate {c}")));
            }
        }
        let mut seen = HashSet::new();
        for label in labels.iter().flatten() {
            if !seen.insert(label.as_str()) {
                return Err(Error::input(format!("duplicate label {label:?}")));
            }
        }
        Ok(PointCloud { dim, points, labels })
    }

    /// `n` points uniform in `[0, 1)^dim`.
    ///
    /// The generator is ChaCha8 seeded with `seed` via `seed_from_u64`;
    /// coordinates are drawn point by point, axis by axis, each as the
    /// standard `[0, 1)` float sample. The stream is platform independent.
    pub fn random_uniform(n: usize, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
        Self::new(dim, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Appends points (unlabeled) and returns the new cloud.
    pub fn extended(&self, extra: &[Vec<f64>]) -> Result<Self> {
        let mut points = self.points.clone();
        let mut labels = self.labels.clone();
        points.extend(extra.iter().cloned());
        labels.extend(std::iter::repeat_n(None, extra.len()));
        Self::with_labels(self.dim, points, labels)
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|c| c * factor).collect())
            .collect();
        Self::with_labels(self.dim, points, self.labels.clone())
    }
}

#[derive(Serialize, Deserialize)]
struct CloudWire {
    dim: usize,
    points: Vec<PointWire>,
}

#[derive(Serialize, Deserialize)]
struct PointWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    coords: Vec<f64>,
}

impl Serialize for PointCloud {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let points = self
            .points
            .iter()
            .zip(&self.labels)
            .map(|(c, l)| PointWire {
                label: l.clone(),
                coords: c.clone(),
            })
            .collect();
        CloudWire { dim: self.dim, points }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointCloud {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = CloudWire::deserialize(d)?;
        let (labels, points) = wire.points.into_iter().map(|p| (p.label, p.coords)).unzip();
        PointCloud::with_labels(wire.dim, points, labels).map_err(serde::de::Error::custom)
    }
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::input(format!("dimension mismatch: {} vs {}", x.len(), y.len())));
    }
    Ok(())
}

pub fn euclidean_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// `sum_i |x_i - y_i|`, in any dimension.
pub fn taxicab_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum())
}

/// Which planar arctan-split metric to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArctanSplit {
    /// `|x1 - y1| + atan|x2 - y2|`
    D1,
    /// `|x2 - y2| + atan|x1 - y1|`
    D2,
    /// `d1 + d2`
    Sum,
}

pub fn arctan_split_distance(which: ArctanSplit, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != 2 || y.len() != 2 {
        return Err(Error::input(format!(
            "arctan-split metrics need planar points, got dimensions {} and {}",
            x.len(),
            y.len()
        )));
    }
    let a = (x[0] - y[0]).abs();
    let b = (x[1] - y[1]).abs();
    Ok(match which {
        ArctanSplit::D1 => a + b.atan(),
        ArctanSplit::D2 => b + a.atan(),
        ArctanSplit::Sum => (a + b.atan()) + (b + a.atan()),
    })
}

/// Distance-function selector for coordinate clouds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BaseMetric {
    #[default]
    #[serde(rename = "euclidean")]
    Euclidean,
    #[serde(rename = "taxicab")]
    Taxicab,
    #[serde(rename = "d1")]
    D1,
    #[serde(rename = "d2")]
    D2,
    #[serde(rename = "d1+d2")]
    D1PlusD2,
}

impl BaseMetric {
    pub fn distance(self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            BaseMetric::Euclidean => euclidean_distance(x, y),
            BaseMetric::Taxicab => taxicab_distance(x, y),
            BaseMetric::D1 => arctan_split_distance(ArctanSplit::D1, x, y),
            BaseMetric::D2 => arctan_split_distance(ArctanSplit::D2, x, y),
            BaseMetric::D1PlusD2 => arctan_split_distance(ArctanSplit::Sum, x, y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseMetric::Euclidean => "euclidean",
            BaseMetric::Taxicab => "taxicab",
            BaseMetric::D1 => "d1",
            BaseMetric::D2 => "d2",
            BaseMetric::D1PlusD2 => "d1+d2",
        }
    }
}

impl fmt::Display for BaseMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "euclidean" => BaseMetric::Euclidean,
            "taxicab" => BaseMetric::Taxicab,
            "d1" => BaseMetric::D1,
            "d2" => BaseMetric::D2,
            "d1+d2" | "sum" => BaseMetric::D1PlusD2,
            other => return Err(Error::input(format!("unknown metric {other:?}"))),
        })
    }
}

pub fn build_distance_matrix(cloud: &PointCloud, metric: BaseMetric) -> Result<DistanceMatrix> {
    if cloud.is_empty() {
        return Err(Error::input("point cloud is empty"));
    }
    // Dimension errors surface once, up front, instead of inside the fill.
    if cloud.len() >= 2 {
        metric.distance(cloud.point(0), cloud.point(1))?;
    } else {
        metric.distance(cloud.point(0), cloud.point(0))?;
    }
    DistanceMatrix::from_fn(cloud.len(), |i, j| {
        metric
            .distance(cloud.point(i), cloud.point(j))
            .expect("dimensions validated")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean_distance(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            euclidean_distance(&[0.0, 0.0], &[1.0, 1.0]).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
        assert!(matches!(euclidean_distance(&[0.0], &[1.0, 2.0]), Err(Error::Input(_))));
    }

    #[test]
    fn taxicab_examples() {
        assert_eq!(taxicab_distance(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(taxicab_distance(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(taxicab_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 7.0);
        assert!(taxicab_distance(&[0.0, 0.0, 0.0], &[1.0]).is_err());
    }

    #[test]
    fn arctan_split_examples() {
        let o = [0.0, 0.0];
        assert_abs_diff_eq!(
            arctan_split_distance(ArctanSplit::D1, &o, &[0.0, 1.0]).unwrap(),
            std::f64::consts::FRAC_PI_4,
            epsilon = 1e-15
        );
        assert_eq!(arctan_split_distance(ArctanSplit::D2, &o, &[0.0, 1.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(
            arctan_split_distance(ArctanSplit::Sum, &o, &[1.0, 1.0]).unwrap(),
            3.570_796_326_794_896_6,
            epsilon = 1e-15
        );
        assert!(arctan_split_distance(ArctanSplit::D1, &[0.0], &[1.0]).is_err());
        assert!(BaseMetric::D2.distance(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn matrix_from_clouds() {
        let single = PointCloud::new(3, vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let m = build_distance_matrix(&single, BaseMetric::Euclidean).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.get(0, 0), 0.0);

        let line = PointCloud::new(1, vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let m = build_distance_matrix(&line, BaseMetric::Euclidean).unwrap();
        assert_eq!(m.get(0, 2), 2.0);
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 2), 1.0);

        let empty = PointCloud::new(2, vec![]).unwrap();
        assert!(build_distance_matrix(&empty, BaseMetric::Euclidean).is_err());

        let planar_only = PointCloud::random_uniform(5, 3, 1).unwrap();
        assert!(build_distance_matrix(&planar_only, BaseMetric::D1).is_err());
    }

    #[test]
    fn constructed_matrices_are_exactly_symmetric() {
        let cloud = PointCloud::random_uniform(30, 4, 7).unwrap();
        for metric in [BaseMetric::Euclidean, BaseMetric::Taxicab] {
            let m = build_distance_matrix(&cloud, metric).unwrap();
            for i in 0..m.n() {
                assert_eq!(m.get(i, i), 0.0);
                for j in 0..m.n() {
                    assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
                    assert!(m.get(i, j) >= 0.0);
                }
            }
        }
    }

    #[test]
    fn from_rows_rejects_invalid() {
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![1.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]]).is_err());
    }

    #[test]
    fn cloud_validation() {
        assert!(PointCloud::new(2, vec![vec![0.0]]).is_err());
        assert!(PointCloud::new(1, vec![vec![f64::INFINITY]]).is_err());
        assert!(PointCloud::new(1, vec![vec![f64::NAN]]).is_err());
        assert!(
            PointCloud::with_labels(1, vec![vec![0.0], vec![1.0]], vec![Some("a".into()), Some("a".into())]).is_err()
        );
        // duplicates are fine
        let dup = PointCloud::new(1, vec![vec![0.5], vec![0.5]]).unwrap();
        let m = build_distance_matrix(&dup, BaseMetric::Euclidean).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn random_cloud_is_reproducible() {
        let a = PointCloud::random_uniform(10, 2, 42).unwrap();
        let b = PointCloud::random_uniform(10, 2, 42).unwrap();
        let c = PointCloud::random_uniform(10, 2, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.points().iter().flatten().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn matrix_json_shape() {
        let m = DistanceMatrix::from_rows(vec![vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":2,"entries":[[0.0,1.5],[1.5,0.0]]}"#);
        let back: DistanceMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<DistanceMatrix>(r#"{"n":3,"entries":[[0.0]]}"#).is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in [
            BaseMetric::Euclidean,
            BaseMetric::Taxicab,
            BaseMetric::D1,
            BaseMetric::D2,
            BaseMetric::D1PlusD2,
        ] {
            assert_eq!(m.name().parse::<BaseMetric>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.name()));
        }
        assert!("chebyshev".parse::<BaseMetric>().is_err());
    }
}
