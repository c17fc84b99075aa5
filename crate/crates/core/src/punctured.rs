//! Hyperbolic-type metrics on a punctured space `D = X \ P`.
//!
//! All point arguments are indices into the base oracle over `X`; puncture
//! sets are index lists into the same oracle. Logarithms are natural.
//!
//! | variant         | value at `(x, y)`                                           |
//! |-----------------|-------------------------------------------------------------|
//! | `tau_p`         | `log(1 + 2 d(x,y) / sqrt(d(x,p) d(y,p)))`                   |
//! | `tilde_tau_p`   | `log(1 + d(x,y) / sqrt(d(x,p) d(y,p)))`                     |
//! | `avg_tau`       | mean of `tau_p` over `p in P`                               |
//! | `tilde_avg_tau` | mean of `tilde_tau_p` over `p in P`                         |
//! | `sup_tau`       | max of `tau_p` over `p in P`                                |
//! | `j`             | mean of `log(1 + d(x,y)/dist(x,P))` and the `y` counterpart |
//! | `j_tilde`       | max of the same two logs                                    |

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::metric::{build_distance_matrix, BaseMetric, DistanceMatrix, MetricOracle, PointCloud};

/// Formulas on raw distances. Callers guarantee positive puncture distances.
pub mod formula {
    #[inline]
    pub fn mu(dxy: f64, dxp: f64, dyp: f64) -> f64 {
        dxy + (dxp * dyp).sqrt()
    }

    #[inline]
    pub fn tau(dxy: f64, dxp: f64, dyp: f64) -> f64 {
        (2.0 * dxy / (dxp * dyp).sqrt()).ln_1p()
    }

    #[inline]
    pub fn tilde_tau(dxy: f64, dxp: f64, dyp: f64) -> f64 {
        (dxy / (dxp * dyp).sqrt()).ln_1p()
    }

    /// `(j, j_tilde)` given `d(x,y)` and the boundary distances of `x` and `y`.
    #[inline]
    pub fn j_pair(dxy: f64, bx: f64, by: f64) -> (f64, f64) {
        let a = (dxy / bx).ln_1p();
        let b = (dxy / by).ln_1p();
        (0.5 * (a + b), a.max(b))
    }
}

fn require_nonempty(ps: &[usize]) -> Result<()> {
    if ps.is_empty() {
        return Err(Error::input("puncture set is empty"));
    }
    Ok(())
}

fn guard<M: MetricOracle>(d: &M, x: usize, p: usize) -> Result<f64> {
    let v = d.dist(x, p);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::PointOnPuncture { point: x, puncture: p })
    }
}

/// `d(x,y) + sqrt(d(x,p) d(y,p))`. Defined everywhere, including at `p`.
pub fn mu_p<M: MetricOracle>(d: &M, x: usize, y: usize, p: usize) -> f64 {
    formula::mu(d.dist(x, y), d.dist(x, p), d.dist(y, p))
}

/// Product of [`mu_p`] over the puncture set.
pub fn mu_set<M: MetricOracle>(d: &M, x: usize, y: usize, ps: &[usize]) -> f64 {
    ps.iter().map(|&p| mu_p(d, x, y, p)).product()
}

pub fn tau_p<M: MetricOracle>(d: &M, x: usize, y: usize, p: usize) -> Result<f64> {
    let (dxp, dyp) = (guard(d, x, p)?, guard(d, y, p)?);
    Ok(formula::tau(d.dist(x, y), dxp, dyp))
}

pub fn tilde_tau_p<M: MetricOracle>(d: &M, x: usize, y: usize, p: usize) -> Result<f64> {
    let (dxp, dyp) = (guard(d, x, p)?, guard(d, y, p)?);
    Ok(formula::tilde_tau(d.dist(x, y), dxp, dyp))
}

pub fn avg_tau<M: MetricOracle>(d: &M, x: usize, y: usize, ps: &[usize]) -> Result<f64> {
    require_nonempty(ps)?;
    let mut sum = 0.0;
    for &p in ps {
        sum += tau_p(d, x, y, p)?;
    }
    Ok(sum / ps.len() as f64)
}

pub fn tilde_avg_tau<M: MetricOracle>(d: &M, x: usize, y: usize, ps: &[usize]) -> Result<f64> {
    require_nonempty(ps)?;
    let mut sum = 0.0;
    for &p in ps {
        sum += tilde_tau_p(d, x, y, p)?;
    }
    Ok(sum / ps.len() as f64)
}

pub fn sup_tau<M: MetricOracle>(d: &M, x: usize, y: usize, ps: &[usize]) -> Result<f64> {
    require_nonempty(ps)?;
    let mut best = f64::NEG_INFINITY;
    for &p in ps {
        best = best.max(tau_p(d, x, y, p)?);
    }
    Ok(best)
}

/// `min_i d(x, p_i)`, the distance to the boundary of `X \ P`.
fn boundary_distance<M: MetricOracle>(d: &M, x: usize, ps: &[usize]) -> Result<f64> {
    require_nonempty(ps)?;
    let mut best = f64::INFINITY;
    for &p in ps {
        best = best.min(guard(d, x, p)?);
    }
    Ok(best)
}

pub fn j_metric<M: MetricOracle>(d: &M, x: usize, y: usize, ps: &[usize]) -> Result<f64> {
    let (bx, by) = (boundary_distance(d, x, ps)?, boundary_distance(d, y, ps)?);
    Ok(formula::j_pair(d.dist(x, y), bx, by).0)
}

pub fn j_tilde_metric<M: MetricOracle>(d: &M, x: usize, y: usize, ps: &[usize]) -> Result<f64> {
    let (bx, by) = (boundary_distance(d, x, ps)?, boundary_distance(d, y, ps)?);
    Ok(formula::j_pair(d.dist(x, y), bx, by).1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    TauP,
    TildeTauP,
    AvgTau,
    TildeAvgTau,
    SupTau,
    J,
    JTilde,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::TauP,
        Variant::TildeTauP,
        Variant::AvgTau,
        Variant::TildeAvgTau,
        Variant::SupTau,
        Variant::J,
        Variant::JTilde,
    ];

    /// Variants built from a single anchor puncture.
    pub fn is_one_point(self) -> bool {
        matches!(self, Variant::TauP | Variant::TildeTauP)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::TauP => "tau_p",
            Variant::TildeTauP => "tilde_tau_p",
            Variant::AvgTau => "avg_tau",
            Variant::TildeAvgTau => "tilde_avg_tau",
            Variant::SupTau => "sup_tau",
            Variant::J => "j",
            Variant::JTilde => "j_tilde",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::input(format!("unknown variant {s:?}")))
    }
}

/// A validated punctured space: the base matrix over `X`, the puncture
/// indices `P` and the surviving domain `D = X \ P` in index order.
#[derive(Debug, Clone)]
pub struct PuncturedSpace {
    base: DistanceMatrix,
    punctures: Vec<usize>,
    domain: Vec<usize>,
}

impl PuncturedSpace {
    /// Rejects empty or repeated puncture sets, coincident punctures, an
    /// empty domain, and any domain point at distance zero from a puncture.
    pub fn new(base: DistanceMatrix, punctures: Vec<usize>) -> Result<Self> {
        let n = base.n();
        require_nonempty(&punctures)?;
        for (a, &p) in punctures.iter().enumerate() {
            if p >= n {
                return Err(Error::input(format!("puncture index {p} out of range for {n} points")));
            }
            for &q in &punctures[..a] {
                if p == q || base.get(p, q) == 0.0 {
                    return Err(Error::input(format!("punctures {q} and {p} are not distinct")));
                }
            }
        }
        let domain: Vec<usize> = (0..n).filter(|i| !punctures.contains(i)).collect();
        if domain.is_empty() {
            return Err(Error::input("domain X \\ P is empty"));
        }
        for &x in &domain {
            for &p in &punctures {
                guard(&base, x, p)?;
            }
        }
        Ok(PuncturedSpace {
            base,
            punctures,
            domain,
        })
    }

    pub fn base(&self) -> &DistanceMatrix {
        &self.base
    }

    pub fn punctures(&self) -> &[usize] {
        &self.punctures
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn k(&self) -> usize {
        self.punctures.len()
    }

    /// Lazy evaluation of `variant` over the domain, indexed `0..|D|`.
    ///
    /// `anchor` is a position in the puncture list. One-point variants need
    /// it unless `k = 1`; the other variants ignore it.
    pub fn oracle(&self, variant: Variant, anchor: Option<usize>) -> Result<VariantOracle<'_>> {
        let anchor = if variant.is_one_point() {
            let pos = match anchor {
                Some(a) => a,
                None if self.k() == 1 => 0,
                None => {
                    return Err(Error::input(format!(
                        "variant {variant} needs an anchor puncture when k = {}",
                        self.k()
                    )))
                }
            };
            let p = *self
                .punctures
                .get(pos)
                .ok_or_else(|| Error::input(format!("anchor {pos} out of range for {} punctures", self.k())))?;
            Some(p)
        } else {
            None
        };
        Ok(VariantOracle {
            space: self,
            variant,
            anchor,
        })
    }

    /// Eager materialization of `variant` over the domain.
    pub fn matrix(&self, variant: Variant, anchor: Option<usize>) -> Result<DistanceMatrix> {
        DistanceMatrix::from_oracle(&self.oracle(variant, anchor)?)
    }

    /// Same punctures over the base scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        PuncturedSpace::new(self.base.scaled(factor)?, self.punctures.clone())
    }
}

/// A [`MetricOracle`] over the domain of a [`PuncturedSpace`].
#[derive(Debug, Clone, Copy)]
pub struct VariantOracle<'a> {
    space: &'a PuncturedSpace,
    variant: Variant,
    anchor: Option<usize>,
}

impl VariantOracle<'_> {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Global index of the anchor puncture for one-point variants.
    pub fn anchor(&self) -> Option<usize> {
        self.anchor
    }

    fn boundary(&self, x: usize) -> f64 {
        let d = &self.space.base;
        self.space
            .punctures
            .iter()
            .map(|&p| d.get(x, p))
            .fold(f64::INFINITY, f64::min)
    }
}

impl MetricOracle for VariantOracle<'_> {
    fn len(&self) -> usize {
        self.space.domain.len()
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let d = &self.space.base;
        let (x, y) = (self.space.domain[a], self.space.domain[b]);
        let dxy = d.get(x, y);
        let ps = &self.space.punctures;
        let k = ps.len() as f64;
        match self.variant {
            Variant::TauP => {
                let p = self.anchor.expect("anchor resolved");
                formula::tau(dxy, d.get(x, p), d.get(y, p))
            }
            Variant::TildeTauP => {
                let p = self.anchor.expect("anchor resolved");
                formula::tilde_tau(dxy, d.get(x, p), d.get(y, p))
            }
            Variant::AvgTau => {
                ps.iter()
                    .map(|&p| formula::tau(dxy, d.get(x, p), d.get(y, p)))
                    .sum::<f64>()
                    / k
            }
            Variant::TildeAvgTau => {
                ps.iter()
                    .map(|&p| formula::tilde_tau(dxy, d.get(x, p), d.get(y, p)))
                    .sum::<f64>()
                    / k
            }
            Variant::SupTau => ps
                .iter()
                .map(|&p| formula::tau(dxy, d.get(x, p), d.get(y, p)))
                .fold(f64::NEG_INFINITY, f64::max),
            Variant::J => formula::j_pair(dxy, self.boundary(x), self.boundary(y)).0,
            Variant::JTilde => formula::j_pair(dxy, self.boundary(x), self.boundary(y)).1,
        }
    }
}

/// Where the base space comes from: a file path, an inline cloud, or an
/// inline distance matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseSource {
    Path(PathBuf),
    Cloud(PointCloud),
    Matrix(DistanceMatrix),
}

/// A puncture given either as an index into `X` or as coordinates of a new
/// point appended to a cloud base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PunctureRef {
    Index(usize),
    Coords(Vec<f64>),
}

/// Serializable description of a punctured metric:
/// `{"base": ..., "metric": "...", "punctures": [...], "variant": "...", "anchor": i}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PuncturedSpec {
    pub base: BaseSource,
    #[serde(default)]
    pub metric: BaseMetric,
    pub punctures: Vec<PunctureRef>,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<usize>,
}

enum LoadedBase {
    Cloud(PointCloud),
    Matrix(DistanceMatrix),
}

/// Loads a base file. JSON with an `entries` field is a matrix, other JSON a
/// cloud; any other extension is read as a cloud CSV.
pub fn load_base(path: &Path) -> Result<(Option<PointCloud>, Option<DistanceMatrix>)> {
    match load_base_inner(path)? {
        LoadedBase::Cloud(c) => Ok((Some(c), None)),
        LoadedBase::Matrix(m) => Ok((None, Some(m))),
    }
}

fn load_base_inner(path: &Path) -> Result<LoadedBase> {
    let is_json = path.extension().and_then(|e| e.to_str()) == Some("json");
    if is_json {
        let value: serde_json::Value = serde_json::from_reader(std::fs::File::open(path)?)?;
        if value.get("entries").is_some() {
            Ok(LoadedBase::Matrix(serde_json::from_value(value)?))
        } else {
            Ok(LoadedBase::Cloud(serde_json::from_value(value)?))
        }
    } else {
        Ok(LoadedBase::Cloud(io::read_cloud(path)?))
    }
}

impl PuncturedSpec {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(std::fs::File::open(path)?)?)
    }

    /// Builds the [`PuncturedSpace`]. Relative base paths resolve against
    /// `base_dir` when given.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<PuncturedSpace> {
        let loaded = match &self.base {
            BaseSource::Path(p) => {
                let full = match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.clone(),
                };
                load_base_inner(&full)?
            }
            BaseSource::Cloud(c) => LoadedBase::Cloud(c.clone()),
            BaseSource::Matrix(m) => LoadedBase::Matrix(m.clone()),
        };
        let extra: Vec<Vec<f64>> = self
            .punctures
            .iter()
            .filter_map(|p| match p {
                PunctureRef::Coords(c) => Some(c.clone()),
                PunctureRef::Index(_) => None,
            })
            .collect();
        let (base, n_orig) = match loaded {
            LoadedBase::Cloud(cloud) => {
                let n = cloud.len();
                let full = cloud.extended(&extra)?;
                (build_distance_matrix(&full, self.metric)?, n)
            }
            LoadedBase::Matrix(m) => {
                if !extra.is_empty() {
                    return Err(Error::input(
                        "coordinate punctures need a point-cloud base, not a distance matrix",
                    ));
                }
                let n = m.n();
                (m, n)
            }
        };
        let mut next_new = n_orig;
        let punctures = self
            .punctures
            .iter()
            .map(|p| match p {
                PunctureRef::Index(i) => *i,
                PunctureRef::Coords(_) => {
                    next_new += 1;
                    next_new - 1
                }
            })
            .collect();
        PuncturedSpace::new(base, punctures)
    }
}

/// Materializes the spec's variant over `D = X \ P`.
pub fn punctured_matrix(spec: &PuncturedSpec, base_dir: Option<&Path>) -> Result<DistanceMatrix> {
    spec.resolve(base_dir)?.matrix(spec.variant, spec.anchor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// p = 0, x = 1, y = 2, z = 3 with d(p,x) = d(y,z) = 2, all others 1.
    fn four_point() -> DistanceMatrix {
        DistanceMatrix::from_rows(vec![
            vec![0.0, 2.0, 1.0, 1.0],
            vec![2.0, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 2.0],
            vec![1.0, 1.0, 2.0, 0.0],
        ])
        .unwrap()
    }

    /// Points 0, 2, 5, 10 on the line; punctures are 0 and 10 (indices 0, 3).
    fn line() -> DistanceMatrix {
        let cloud = PointCloud::new(1, vec![vec![0.0], vec![2.0], vec![5.0], vec![10.0]]).unwrap();
        build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap()
    }

    #[test]
    fn mu_examples() {
        let d = DistanceMatrix::from_rows(vec![vec![0.0, 3.0, 2.0], vec![3.0, 0.0, 5.0], vec![2.0, 5.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(mu_p(&d, 0, 1, 2), 3.0 + 10f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(mu_p(&d, 0, 1, 2), 6.162_277_660_168_379, epsilon = 1e-12);
        assert_eq!(mu_p(&d, 0, 0, 2), 2.0);
        assert_eq!(mu_p(&d, 2, 1, 2), 5.0);
    }

    #[test]
    fn tau_examples_on_four_point_space() {
        let d = four_point();
        assert_abs_diff_eq!(tau_p(&d, 2, 3, 0).unwrap(), 5f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(tau_p(&d, 2, 3, 0).unwrap(), 1.609_437_912_434_100_3, epsilon = 1e-12);
        assert_eq!(tau_p(&d, 1, 1, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(tau_p(&d, 1, 2, 0).unwrap(), 0.881_373_587_019_543, epsilon = 1e-12);
        assert!(matches!(
            tau_p(&d, 0, 2, 0),
            Err(Error::PointOnPuncture { point: 0, puncture: 0 })
        ));
    }

    #[test]
    fn tilde_tau_examples_on_four_point_space() {
        let d = four_point();
        assert_abs_diff_eq!(
            tilde_tau_p(&d, 2, 3, 0).unwrap(),
            1.098_612_288_668_109_8,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            tilde_tau_p(&d, 1, 2, 0).unwrap(),
            0.534_799_996_739_570_7,
            epsilon = 1e-12
        );
        assert_eq!(tilde_tau_p(&d, 3, 3, 0).unwrap(), 0.0);
        assert!(tilde_tau_p(&d, 2, 0, 0).is_err());
    }

    #[test]
    fn mu_set_examples() {
        let d = line();
        let ps = [0, 3];
        // (3 + sqrt(2*5)) (3 + sqrt(8*5))
        let expected = (3.0 + 10f64.sqrt()) * (3.0 + 40f64.sqrt());
        assert_abs_diff_eq!(mu_set(&d, 1, 2, &ps), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(mu_set(&d, 1, 2, &ps), 57.460_498_941_515_41, epsilon = 1e-9);
        assert_eq!(mu_set(&d, 1, 2, &[0]), mu_p(&d, 1, 2, 0));
        assert_eq!(mu_set(&d, 1, 1, &ps), 2.0 * 8.0);
    }

    #[test]
    fn averaged_examples_on_line() {
        let d = line();
        let ps = [0, 3];
        let expected = 0.5 * ((1.0 + 6.0 / 10f64.sqrt()).ln() + (1.0 + 6.0 / 40f64.sqrt()).ln());
        assert_abs_diff_eq!(avg_tau(&d, 1, 2, &ps).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(avg_tau(&d, 1, 2, &ps).unwrap(), 0.865_478_083_435_936, epsilon = 1e-12);
        assert_eq!(avg_tau(&d, 1, 2, &[0]).unwrap(), tau_p(&d, 1, 2, 0).unwrap());
        assert_eq!(avg_tau(&d, 2, 2, &ps).unwrap(), 0.0);
        assert_eq!(
            tilde_avg_tau(&d, 1, 2, &[3]).unwrap(),
            tilde_tau_p(&d, 1, 2, 3).unwrap()
        );
        assert_eq!(tilde_avg_tau(&d, 1, 1, &ps).unwrap(), 0.0);

        // log-of-product form
        let prod: f64 = ps
            .iter()
            .map(|&p| mu_p(&d, 1, 2, p) / (d.get(1, p) * d.get(2, p)).sqrt())
            .product();
        assert_abs_diff_eq!(tilde_avg_tau(&d, 1, 2, &ps).unwrap(), prod.ln() / 2.0, epsilon = 1e-14);

        let gap = avg_tau(&d, 1, 2, &ps).unwrap() - tilde_avg_tau(&d, 1, 2, &ps).unwrap();
        assert!((0.0..=std::f64::consts::LN_2).contains(&gap));

        assert_eq!(sup_tau(&d, 1, 2, &[3]).unwrap(), tau_p(&d, 1, 2, 3).unwrap());
        assert!(sup_tau(&d, 1, 2, &ps).unwrap() >= avg_tau(&d, 1, 2, &ps).unwrap());
        assert_eq!(sup_tau(&d, 1, 1, &ps).unwrap(), 0.0);
        assert!(avg_tau(&d, 1, 2, &[]).is_err());
        assert!(avg_tau(&d, 0, 2, &ps).is_err());
    }

    #[test]
    fn j_examples_on_line() {
        let d = line();
        let ps = [0, 3];
        assert_abs_diff_eq!(
            j_metric(&d, 1, 2, &ps).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        assert_eq!(j_metric(&d, 1, 1, &ps).unwrap(), 0.0);
        assert_eq!(j_tilde_metric(&d, 2, 2, &ps).unwrap(), 0.0);
        assert!(j_tilde_metric(&d, 1, 2, &ps).unwrap() >= j_metric(&d, 1, 2, &ps).unwrap());
        assert!(matches!(
            j_metric(&d, 3, 1, &ps),
            Err(Error::PointOnPuncture { point: 3, .. })
        ));
    }

    #[test]
    fn space_validation() {
        assert!(PuncturedSpace::new(line(), vec![]).is_err());
        assert!(PuncturedSpace::new(line(), vec![0, 0]).is_err());
        assert!(PuncturedSpace::new(line(), vec![9]).is_err());
        assert!(PuncturedSpace::new(line(), vec![0, 1, 2, 3]).is_err());
        let dup = PointCloud::new(1, vec![vec![0.0], vec![1.0], vec![1.0]]).unwrap();
        let m = build_distance_matrix(&dup, BaseMetric::Euclidean).unwrap();
        assert!(matches!(
            PuncturedSpace::new(m, vec![1]),
            Err(Error::PointOnPuncture { point: 2, puncture: 1 })
        ));
    }

    #[test]
    fn oracle_matches_pointwise_functions() {
        let d = line();
        let s = PuncturedSpace::new(d.clone(), vec![0, 3]).unwrap();
        assert_eq!(s.domain(), &[1, 2]);
        let check = |v: Variant, expected: f64| {
            let m = s.matrix(v, Some(1)).unwrap();
            assert_eq!(m.get(0, 1), expected, "{v}");
        };
        check(Variant::TauP, tau_p(&d, 1, 2, 3).unwrap());
        check(Variant::TildeTauP, tilde_tau_p(&d, 1, 2, 3).unwrap());
        check(Variant::AvgTau, avg_tau(&d, 1, 2, &[0, 3]).unwrap());
        check(Variant::TildeAvgTau, tilde_avg_tau(&d, 1, 2, &[0, 3]).unwrap());
        check(Variant::SupTau, sup_tau(&d, 1, 2, &[0, 3]).unwrap());
        check(Variant::J, j_metric(&d, 1, 2, &[0, 3]).unwrap());
        check(Variant::JTilde, j_tilde_metric(&d, 1, 2, &[0, 3]).unwrap());
        assert!(s.oracle(Variant::TauP, None).is_err());
        assert!(s.oracle(Variant::TauP, Some(2)).is_err());
        assert!(s.oracle(Variant::AvgTau, None).is_ok());
    }

    #[test]
    fn avg_with_one_puncture_equals_tau_matrix() {
        let cloud = PointCloud::random_uniform(12, 2, 5).unwrap();
        let m = build_distance_matrix(&cloud, BaseMetric::Euclidean).unwrap();
        let s = PuncturedSpace::new(m, vec![4]).unwrap();
        assert_eq!(
            s.matrix(Variant::AvgTau, None).unwrap(),
            s.matrix(Variant::TauP, None).unwrap()
        );
        assert_eq!(
            s.matrix(Variant::TildeAvgTau, None).unwrap(),
            s.matrix(Variant::TildeTauP, None).unwrap()
        );
    }

    #[test]
    fn spec_json_with_coordinate_punctures() {
        let json = r#"{
            "base": {"dim": 1, "points": [{"coords": [2]}, {"coords": [5]}]},
            "metric": "euclidean",
            "punctures": [[0], [10]],
            "variant": "j"
        }"#;
        let spec: PuncturedSpec = serde_json::from_str(json).unwrap();
        let m = punctured_matrix(&spec, None).unwrap();
        assert_eq!(m.n(), 2);
        assert_abs_diff_eq!(m.get(0, 1), std::f64::consts::LN_2, epsilon = 1e-15);
    }

    #[test]
    fn spec_json_with_matrix_base() {
        let json = r#"{
            "base": {"n": 4, "entries": [[0,2,1,1],[2,0,1,1],[1,1,0,2],[1,1,2,0]]},
            "punctures": [0],
            "variant": "tilde_tau_p",
            "anchor": 0
        }"#;
        let spec: PuncturedSpec = serde_json::from_str(json).unwrap();
        let m = punctured_matrix(&spec, None).unwrap();
        assert_abs_diff_eq!(m.get(1, 2), 3f64.ln(), epsilon = 1e-15);

        let coords_on_matrix = r#"{
            "base": {"n": 2, "entries": [[0,1],[1,0]]},
            "punctures": [[0.0]],
            "variant": "j"
        }"#;
        let spec: PuncturedSpec = serde_json::from_str(coords_on_matrix).unwrap();
        assert!(spec.resolve(None).is_err());
    }

    #[test]
    fn variant_names() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{}\"", v.name()));
        }
        assert!("tau".parse::<Variant>().is_err());
    }
}
