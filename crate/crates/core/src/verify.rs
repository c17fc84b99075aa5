//! Numerical checks for metric axioms and the inequalities satisfied by the
//! Cassinian constructions.
//!
//! Every check compares `lhs <= rhs` and passes when
//! `lhs - rhs <= tol * max(1, |lhs|, |rhs|)`. The inequalities are exact in
//! real arithmetic; the tolerance only absorbs rounding.
//!
//! Sampled checks draw index tuples uniformly (repeats allowed) from a
//! seeded stream and always prepend a fixed battery of degenerate tuples
//! built from the anchors and the first and last points. Reports are
//! deterministic for a fixed seed regardless of worker count.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{arctan_split_distance, taxicab_distance, ArctanSplit, MetricOracle, PointCloud};
use crate::punctured::{formula, mu_p, PuncturedSpace, Variant};
use crate::sampling::{any_tuple, chunk_rng, degenerate_battery, TupleSample};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Puncture counts at or above this use log-domain products.
pub const LOG_DOMAIN_MIN_K: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Which inequality failed.
    pub inequality: String,
    pub tuple: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub check: String,
    /// Tuples whose inequalities were evaluated.
    pub checked: u64,
    /// Tuples set aside because a lemma hypothesis did not hold.
    pub skipped: u64,
    pub tolerance: f64,
    /// Largest `lhs - rhs` seen; `None` when nothing was evaluated.
    pub worst_slack: Option<f64>,
    /// Largest observed ratio against the constant-free right-hand side,
    /// for checks that probe tightness of a constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    /// Off-diagonal zero entries (coincident points); axioms check only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_off_diagonal: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone)]
struct Acc {
    checked: u64,
    skipped: u64,
    worst: f64,
    ratio: f64,
    tol: f64,
    violations: Vec<Violation>,
}

impl Acc {
    fn new(tol: f64) -> Self {
        Acc {
            checked: 0,
            skipped: 0,
            worst: f64::NEG_INFINITY,
            ratio: f64::NEG_INFINITY,
            tol,
            violations: Vec::new(),
        }
    }

    /// Records `lhs <= rhs` for `tuple`.
    fn le(&mut self, inequality: &str, tuple: &[usize], lhs: f64, rhs: f64) {
        // equal infinities (log of zero products) compare as equal
        let slack = if lhs == rhs { 0.0 } else { lhs - rhs };
        let scale = [1.0, lhs.abs(), rhs.abs()]
            .into_iter()
            .filter(|v| v.is_finite())
            .fold(1.0, f64::max);
        self.worst = self.worst.max(slack);
        if slack.is_nan() || slack > self.tol * scale {
            self.violations.push(Violation {
                inequality: inequality.to_string(),
                tuple: tuple.to_vec(),
                lhs,
                rhs,
                slack,
            });
        }
    }

    fn ratio(&mut self, r: f64) {
        if r.is_finite() {
            self.ratio = self.ratio.max(r);
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.worst = self.worst.max(other.worst);
        self.ratio = self.ratio.max(other.ratio);
        self.violations.extend(other.violations);
        self
    }

    fn finish(self, check: &str) -> ViolationReport {
        ViolationReport {
            check: check.to_string(),
            checked: self.checked,
            skipped: self.skipped,
            tolerance: self.tol,
            worst_slack: self.worst.is_finite().then_some(self.worst),
            max_ratio: self.ratio.is_finite().then_some(self.ratio),
            zero_off_diagonal: None,
            note: None,
            violations: self.violations,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::input(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

/// Runs `f` over the degenerate battery and then the seeded sample. `f`
/// returns `false` to mark a tuple as skipped.
fn run_sampled<const R: usize, F>(n: usize, anchors: &[usize], sample: TupleSample, tol: f64, f: F) -> Acc
where
    F: Fn([usize; R], &mut Acc) -> bool + Sync,
{
    let tally = |t: [usize; R], acc: &mut Acc| {
        if f(t, acc) {
            acc.checked += 1;
        } else {
            acc.skipped += 1;
        }
    };
    let mut acc = Acc::new(tol);
    if n == 0 {
        return acc;
    }
    for t in degenerate_battery::<R>(n, anchors) {
        tally(t, &mut acc);
    }
    let parts: Vec<Acc> = (0..sample.chunk_count())
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(sample.seed, c);
            let mut part = Acc::new(tol);
            for _ in 0..sample.chunk_len(c) {
                tally(any_tuple::<R>(&mut rng, n), &mut part);
            }
            part
        })
        .collect();
    parts.into_iter().fold(acc, Acc::merge)
}

fn check_index<M: MetricOracle>(d: &M, idx: &[usize]) -> Result<()> {
    if let Some(&bad) = idx.iter().find(|&&i| i >= d.len()) {
        return Err(Error::input(format!("index {bad} out of range for {} points", d.len())));
    }
    Ok(())
}

/// Symmetry, zero diagonal, nonnegativity and the triangle inequality
/// `d(x,y) <= d(x,z) + d(z,y)` for every pair `x < y` and every other `z`.
/// Triangle tuples are reported as `[x, y, z]`.
pub fn check_metric_axioms<M: MetricOracle>(m: &M, tol: f64) -> Result<ViolationReport> {
    check_tol(tol)?;
    let n = m.len();
    let parts: Vec<(Acc, u64)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut acc = Acc::new(tol);
            let mut zeros = 0;
            acc.le("zero_diagonal", &[x, x], m.dist(x, x).abs(), 0.0);
            for y in 0..n {
                if y == x {
                    continue;
                }
                let dxy = m.dist(x, y);
                acc.le("nonnegativity", &[x, y], -dxy, 0.0);
                if y > x {
                    acc.le("symmetry", &[x, y], (dxy - m.dist(y, x)).abs(), 0.0);
                    if dxy == 0.0 {
                        zeros += 1;
                    }
                    for z in 0..n {
                        if z != x && z != y {
                            acc.le("triangle", &[x, y, z], dxy, m.dist(x, z) + m.dist(z, y));
                            acc.checked += 1;
                        }
                    }
                }
            }
            (acc, zeros)
        })
        .collect();
    let mut zeros = 0;
    let acc = parts.into_iter().fold(Acc::new(tol), |a, (b, z)| {
        zeros += z;
        a.merge(b)
    });
    let mut report = acc.finish("metric_axioms");
    report.zero_off_diagonal = Some(zeros);
    Ok(report)
}

/// `d(x,y) d(z,w) <= d(x,z) d(y,w) + d(x,w) d(y,z)` over every 4-subset and
/// each of its three pairings. Tuples list the left-hand pairs first.
pub fn check_ptolemaic<M: MetricOracle>(m: &M, tol: f64) -> Result<ViolationReport> {
    check_tol(tol)?;
    let n = m.len();
    let parts: Vec<Acc> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Acc::new(tol);
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let a = m.dist(i, j) * m.dist(k, l);
                        let b = m.dist(i, k) * m.dist(j, l);
                        let c = m.dist(i, l) * m.dist(j, k);
                        acc.le("ptolemy", &[i, j, k, l], a, b + c);
                        acc.le("ptolemy", &[i, k, j, l], b, a + c);
                        acc.le("ptolemy", &[i, l, j, k], c, a + b);
                        acc.checked += 1;
                    }
                }
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(Acc::new(tol), Acc::merge).finish("ptolemy"))
}

/// Which two-sided additive bound to check.
#[derive(Debug, Clone, Copy)]
pub enum Sandwich<'a> {
    /// `tilde_tau_p <= tau_p <= tilde_tau_p + log 2` at the anchor (a position
    /// in the puncture list).
    OnePoint { space: &'a PuncturedSpace, anchor: usize },
    /// `tilde_avg_tau <= avg_tau <= tilde_avg_tau + log 2`.
    Average { space: &'a PuncturedSpace },
    /// `d_T <= d1 + d2 <= d_T + pi` on a planar cloud.
    Taxicab { cloud: &'a PointCloud },
}

/// Checks the chosen sandwich over all unordered pairs.
pub fn check_sandwich(kind: Sandwich<'_>, tol: f64) -> Result<ViolationReport> {
    check_tol(tol)?;
    match kind {
        Sandwich::OnePoint { space, anchor } => {
            let lo = space.oracle(Variant::TildeTauP, Some(anchor))?;
            let hi = space.oracle(Variant::TauP, Some(anchor))?;
            Ok(pairwise(lo.len(), tol, "sandwich_one_point", LN_2, |a, b| {
                (lo.dist(a, b), hi.dist(a, b))
            }))
        }
        Sandwich::Average { space } => {
            let lo = space.oracle(Variant::TildeAvgTau, None)?;
            let hi = space.oracle(Variant::AvgTau, None)?;
            Ok(pairwise(lo.len(), tol, "sandwich_average", LN_2, |a, b| {
                (lo.dist(a, b), hi.dist(a, b))
            }))
        }
        Sandwich::Taxicab { cloud } => {
            if cloud.dim() != 2 {
                return Err(Error::input("taxicab sandwich needs a planar cloud"));
            }
            Ok(pairwise(cloud.len(), tol, "sandwich_taxicab", PI, |a, b| {
                let (x, y) = (cloud.point(a), cloud.point(b));
                (
                    taxicab_distance(x, y).expect("planar"),
                    arctan_split_distance(ArctanSplit::Sum, x, y).expect("planar"),
                )
            }))
        }
    }
}

/// `lo <= hi <= lo + gap` over all pairs `a < b`.
fn pairwise<F>(n: usize, tol: f64, check: &str, gap: f64, f: F) -> ViolationReport
where
    F: Fn(usize, usize) -> (f64, f64) + Sync,
{
    let parts: Vec<Acc> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut acc = Acc::new(tol);
            for b in a + 1..n {
                let (lo, hi) = f(a, b);
                acc.le("lower", &[a, b], lo, hi);
                acc.le("upper", &[a, b], hi, lo + gap);
                acc.checked += 1;
            }
            acc
        })
        .collect();
    parts.into_iter().fold(Acc::new(tol), Acc::merge).finish(check)
}

/// The elementary `mu` bounds on sampled triples `(x, y, z)` with anchors
/// `p` and `q`:
///
/// - `mu_p(x,y) <= 3/2 (d(x,p) + d(y,p)) <= 3 max(d(x,p), d(y,p))`
/// - `mu_p(x,y) >= max(d(x,p), d(y,p)) >= (d(x,p) + d(y,p)) / 2`
/// - `mu_p(x,z) + mu_q(y,z) >= d(x,z) + d(y,z) >= d(x,y)`
/// - `max(mu_p(x,z), mu_q(y,z)) >= d(x,y) / 2`
pub fn check_mu_bounds<M: MetricOracle>(
    d: &M,
    p: usize,
    q: usize,
    sample: TupleSample,
    tol: f64,
) -> Result<ViolationReport> {
    check_tol(tol)?;
    check_index(d, &[p, q])?;
    let acc = run_sampled::<3, _>(d.len(), &[p, q], sample, tol, |[x, y, z], acc| {
        let t = [x, y, z];
        let (dxp, dyp) = (d.dist(x, p), d.dist(y, p));
        let mu = mu_p(d, x, y, p);
        let hi = dxp.max(dyp);
        acc.le("upper_mu", &t, mu, 1.5 * (dxp + dyp));
        acc.le("upper_mu_max", &t, 1.5 * (dxp + dyp), 3.0 * hi);
        acc.le("lower_mu", &t, hi, mu);
        acc.le("lower_mu_mean", &t, 0.5 * (dxp + dyp), hi);
        let (a, b) = (mu_p(d, x, z, p), mu_p(d, y, z, q));
        let (dxz, dyz) = (d.dist(x, z), d.dist(y, z));
        acc.le("mixed_sum", &t, dxz + dyz, a + b);
        acc.le("mixed_sum_triangle", &t, d.dist(x, y), dxz + dyz);
        acc.le("mixed_max", &t, 0.5 * d.dist(x, y), a.max(b));
        true
    });
    Ok(acc.finish("mu_bounds"))
}

/// `mu_p(x,y) mu_p(z,w) <= 9 max(mu_p(x,z) mu_p(y,w), mu_p(x,w) mu_p(y,z))`
/// on sampled quadruples. `max_ratio` records the largest observed ratio of
/// the left side to the bracket, which the constant 9 bounds.
pub fn check_lemma_nine<M: MetricOracle>(d: &M, p: usize, sample: TupleSample, tol: f64) -> Result<ViolationReport> {
    check_tol(tol)?;
    check_index(d, &[p])?;
    let acc = run_sampled::<4, _>(d.len(), &[p], sample, tol, |[x, y, z, w], acc| {
        let m = |a, b| mu_p(d, a, b, p);
        let lhs = m(x, y) * m(z, w);
        let bracket = (m(x, z) * m(y, w)).max(m(x, w) * m(y, z));
        acc.le("factor_nine", &[x, y, z, w], lhs, 9.0 * bracket);
        if bracket > 0.0 {
            acc.ratio(lhs / bracket);
        }
        true
    });
    Ok(acc.finish("lemma_nine"))
}

/// `3 (K + 3) / (2 (K - 3))`.
pub fn lemma_k_constant(k: f64) -> f64 {
    3.0 * (k + 3.0) / (2.0 * (k - 3.0))
}

/// For sampled triples with `max(a, b) >= K min(a, b)` where
/// `a = mu_p(x,z)`, `b = mu_p(y,z)`, checks
/// `a + b <= 3 (K + 3) / (2 (K - 3)) d(x,y)`. Triples failing the
/// hypothesis are counted in `skipped`.
pub fn check_lemma_k<M: MetricOracle>(
    d: &M,
    p: usize,
    k: f64,
    sample: TupleSample,
    tol: f64,
) -> Result<ViolationReport> {
    check_tol(tol)?;
    check_index(d, &[p])?;
    if !(k.is_finite() && k > 3.0) {
        return Err(Error::input(format!("K = {k} must exceed 3")));
    }
    let c = lemma_k_constant(k);
    let acc = run_sampled::<3, _>(d.len(), &[p], sample, tol, |[x, y, z], acc| {
        let (a, b) = (mu_p(d, x, z, p), mu_p(d, y, z, p));
        if a.max(b) < k * a.min(b) {
            return false;
        }
        let dxy = d.dist(x, y);
        acc.le("ratio_conclusion", &[x, y, z], a + b, c * dxy);
        if dxy > 0.0 {
            acc.ratio((a + b) / dxy);
        }
        true
    });
    let mut report = acc.finish("lemma_k");
    report.note = Some(format!("K = {k}, constant = {c}"));
    Ok(report)
}

/// `log(e^a + e^b)`, exact for infinite arguments.
fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Both sides of `prod(a_i + b_i) <= 9^k (prod a_i + prod b_i)`, returned
/// as `(lhs, rhs_without_constant, rhs)`; in log form when `log_domain`.
pub fn product_lemma_sides(a: &[f64], b: &[f64], log_domain: bool) -> (f64, f64, f64) {
    let k = a.len() as f64;
    if log_domain {
        let lhs: f64 = a.iter().zip(b).map(|(x, y)| (x + y).ln()).sum();
        let la: f64 = a.iter().map(|x| x.ln()).sum();
        let lb: f64 = b.iter().map(|y| y.ln()).sum();
        let bare = ln_add_exp(la, lb);
        (lhs, bare, k * 9f64.ln() + bare)
    } else {
        let lhs: f64 = a.iter().zip(b).map(|(x, y)| x + y).product();
        let bare = a.iter().product::<f64>() + b.iter().product::<f64>();
        (lhs, bare, 9f64.powi(a.len() as i32) * bare)
    }
}

/// `prod_i (mu_{p_i}(x,z) + mu_{p_i}(y,z)) <= 9^k (prod_i mu_{p_i}(x,z) + prod_i mu_{p_i}(y,z))`
/// on sampled triples; log-domain for `k >= 4`.
pub fn check_product_lemma<M: MetricOracle>(
    d: &M,
    ps: &[usize],
    sample: TupleSample,
    tol: f64,
) -> Result<ViolationReport> {
    check_tol(tol)?;
    check_index(d, ps)?;
    if ps.is_empty() {
        return Err(Error::input("puncture set is empty"));
    }
    let log_domain = ps.len() >= LOG_DOMAIN_MIN_K;
    let acc = run_sampled::<3, _>(d.len(), ps, sample, tol, |[x, y, z], acc| {
        let a: Vec<f64> = ps.iter().map(|&p| mu_p(d, x, z, p)).collect();
        let b: Vec<f64> = ps.iter().map(|&p| mu_p(d, y, z, p)).collect();
        let (lhs, bare, rhs) = product_lemma_sides(&a, &b, log_domain);
        acc.le("product_nine_k", &[x, y, z], lhs, rhs);
        if log_domain {
            acc.ratio((lhs - bare).exp());
        } else if bare > 0.0 {
            acc.ratio(lhs / bare);
        }
        true
    });
    let mut report = acc.finish("product_lemma");
    report.note = Some(format!("k = {}, log_domain = {log_domain}", ps.len()));
    Ok(report)
}

#[allow(clippy::needless_range_loop)]
fn check_r(r: &[[f64; 4]; 4]) -> Result<()> {
    for i in 0..4 {
        for j in 0..4 {
            let v = r[i][j];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::input(format!("r[{i}][{j}] = {v} is not finite and nonnegative")));
            }
            if v != r[j][i] {
                return Err(Error::input(format!("r is not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

/// Evaluates the quasi-Ptolemy lemma on one 4x4 table; `false` when the
/// hypothesis `r_ij <= K (r_ik + r_jk)` fails for some distinct `i, j`.
/// Each of the three pairings is checked as the left-hand side, in both
/// the square-root and the squared forms.
fn quasi_ptolemy_into(r: &[[f64; 4]; 4], k: f64, tuple: &[usize], acc: &mut Acc) -> bool {
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            for m in 0..4 {
                let rhs = k * (r[i][m] + r[j][m]);
                if r[i][j] > rhs + acc.tol * rhs.max(1.0) {
                    return false;
                }
            }
        }
    }
    let pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    for (a, ((i, j), (s, t))) in pairings.into_iter().enumerate() {
        let lhs = r[i][j] * r[s][t];
        let (b, c) = (pairings[(a + 1) % 3], pairings[(a + 2) % 3]);
        let pb = r[b.0 .0][b.0 .1] * r[b.1 .0][b.1 .1];
        let pc = r[c.0 .0][c.0 .1] * r[c.1 .0][c.1 .1];
        acc.le("sqrt_form", tuple, lhs.sqrt(), k * (pb.sqrt() + pc.sqrt()));
        acc.le("squared_form", tuple, lhs, 2.0 * k * k * (pb + pc));
        acc.le(
            "squared_max_form",
            tuple,
            2.0 * k * k * (pb + pc),
            4.0 * k * k * pb.max(pc),
        );
    }
    true
}

/// Quasi-Ptolemy lemma on a single symmetric nonnegative table (diagonal
/// ignored). If the quasi-triangle hypothesis fails the conclusion is not
/// checked and the report says so.
pub fn check_quasi_ptolemy(r: &[[f64; 4]; 4], k: f64, tol: f64) -> Result<ViolationReport> {
    check_tol(tol)?;
    check_r(r)?;
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::input(format!("K = {k} must be at least 1")));
    }
    let mut acc = Acc::new(tol);
    let ok = quasi_ptolemy_into(r, k, &[0, 1, 2, 3], &mut acc);
    if ok {
        acc.checked += 1;
    } else {
        acc.skipped += 1;
    }
    let mut report = acc.finish("quasi_ptolemy");
    if !ok {
        report.note = Some("hypothesis not satisfied".into());
    }
    Ok(report)
}

/// Where the `r` table of a sampled quasi-Ptolemy check comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuasiSource {
    /// `r_ij = d(x_i, x_j)`; a metric satisfies the hypothesis with `K = 1`.
    Base,
    /// `r_ij = mu_p(x_i, x_j)`; satisfies it with `K = 3/2`.
    Mu(usize),
}

/// Quasi-Ptolemy lemma on `r` tables built from sampled quadruples.
pub fn check_quasi_ptolemy_sampled<M: MetricOracle>(
    d: &M,
    source: QuasiSource,
    k: f64,
    sample: TupleSample,
    tol: f64,
) -> Result<ViolationReport> {
    check_tol(tol)?;
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::input(format!("K = {k} must be at least 1")));
    }
    let anchors: Vec<usize> = match source {
        QuasiSource::Base => vec![],
        QuasiSource::Mu(p) => {
            check_index(d, &[p])?;
            vec![p]
        }
    };
    let acc = run_sampled::<4, _>(d.len(), &anchors, sample, tol, |q, acc| {
        let r: [[f64; 4]; 4] = std::array::from_fn(|i| {
            std::array::from_fn(|j| match source {
                QuasiSource::Base => d.dist(q[i], q[j]),
                QuasiSource::Mu(p) => mu_p(d, q[i], q[j], p),
            })
        });
        quasi_ptolemy_into(&r, k, &q, acc)
    });
    let mut report = acc.finish("quasi_ptolemy");
    report.note = Some(format!("K = {k}, source = {source:?}"));
    Ok(report)
}

/// `log mu_P(x, y)`.
fn ln_mu_set<M: MetricOracle>(d: &M, x: usize, y: usize, ps: &[usize]) -> f64 {
    ps.iter().map(|&p| mu_p(d, x, y, p).ln()).sum()
}

fn mu_set_direct<M: MetricOracle>(d: &M, x: usize, y: usize, ps: &[usize]) -> f64 {
    ps.iter().map(|&p| mu_p(d, x, y, p)).product()
}

/// Both parts of the `(27/2)^k` lemma on sampled quadruples `(x, y, z, w)`:
///
/// - `mu_P(x,y) <= (27/2)^k (mu_P(x,z) + mu_P(z,y))`
/// - `mu_P(x,y) mu_P(z,w) <= 4 (27/2)^(2k) max(mu_P(x,z) mu_P(y,w), mu_P(x,w) mu_P(y,z))`
///
/// Log-domain for `k >= 4`.
pub fn check_mu_set_quasi_triangle<M: MetricOracle>(
    d: &M,
    ps: &[usize],
    sample: TupleSample,
    tol: f64,
) -> Result<ViolationReport> {
    check_tol(tol)?;
    check_index(d, ps)?;
    if ps.is_empty() {
        return Err(Error::input("puncture set is empty"));
    }
    let k = ps.len() as f64;
    let log_domain = ps.len() >= LOG_DOMAIN_MIN_K;
    let ln_c = (27.0f64 / 2.0).ln();
    let acc = run_sampled::<4, _>(d.len(), ps, sample, tol, |[x, y, z, w], acc| {
        let t = [x, y, z, w];
        if log_domain {
            let m = |a, b| ln_mu_set(d, a, b, ps);
            let (mxy, mxz, mzy) = (m(x, y), m(x, z), m(z, y));
            acc.le("triangle_27_2", &t, mxy, k * ln_c + ln_add_exp(mxz, mzy));
            let lhs = mxy + m(z, w);
            let bracket = (mxz + m(y, w)).max(m(x, w) + m(y, z));
            acc.le("four_point_27_2", &t, lhs, 4f64.ln() + 2.0 * k * ln_c + bracket);
        } else {
            let m = |a, b| mu_set_direct(d, a, b, ps);
            let c = 13.5f64.powi(ps.len() as i32);
            let (mxy, mxz, mzy) = (m(x, y), m(x, z), m(z, y));
            acc.le("triangle_27_2", &t, mxy, c * (mxz + mzy));
            let lhs = mxy * m(z, w);
            let bracket = (mxz * m(y, w)).max(m(x, w) * m(y, z));
            acc.le("four_point_27_2", &t, lhs, 4.0 * c * c * bracket);
        }
        true
    });
    let mut report = acc.finish("mu_set_quasi_triangle");
    report.note = Some(format!("k = {}, log_domain = {log_domain}", ps.len()));
    Ok(report)
}

/// The two elementary Cassinian identities used to build the averaged
/// bound, checked exactly per pair: `tilde_avg_tau` equals
/// `(1/k) log(mu_P / prod sqrt(d(x,p_i) d(y,p_i)))`.
pub fn check_tilde_average_identity(space: &PuncturedSpace, tol: f64) -> Result<ViolationReport> {
    check_tol(tol)?;
    let oracle = space.oracle(Variant::TildeAvgTau, None)?;
    let d = space.base();
    let ps = space.punctures();
    let dom = space.domain();
    let k = ps.len() as f64;
    let mut acc = Acc::new(tol);
    for a in 0..dom.len() {
        for b in a + 1..dom.len() {
            let (x, y) = (dom[a], dom[b]);
            let via_mu: f64 = ps
                .iter()
                .map(|&p| {
                    (formula::mu(d.get(x, y), d.get(x, p), d.get(y, p)) / (d.get(x, p) * d.get(y, p)).sqrt()).ln()
                })
                .sum::<f64>()
                / k;
            let direct = oracle.dist(a, b);
            acc.le("identity", &[a, b], (direct - via_mu).abs(), 0.0);
            acc.checked += 1;
        }
    }
    Ok(acc.finish("tilde_average_identity"))
}
