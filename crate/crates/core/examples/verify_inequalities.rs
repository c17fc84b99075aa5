use cassinian::metric::{build_distance_matrix, BaseMetric, PointCloud};
use cassinian::sampling::TupleSample;
use cassinian::verify::{
    check_lemma_k, check_lemma_nine, check_metric_axioms, check_mu_bounds, check_mu_set_quasi_triangle,
    check_product_lemma, check_ptolemaic, check_sandwich, Sandwich, DEFAULT_TOLERANCE,
};
use cassinian::PuncturedSpace;

fn main() -> cassinian::Result<()> {
    let tol = DEFAULT_TOLERANCE;
    let cloud = PointCloud::random_uniform(60, 2, 11)?;
    let d = build_distance_matrix(&cloud, BaseMetric::Euclidean)?;
    let sample = TupleSample::new(200_000, 3);
    let ps: Vec<usize> = (0..6).collect();
    let space = PuncturedSpace::new(d.clone(), ps.clone())?;

    let reports = vec![
        check_metric_axioms(&d, tol)?,
        check_ptolemaic(&d, tol)?,
        check_sandwich(Sandwich::Average { space: &space }, tol)?,
        check_sandwich(Sandwich::Taxicab { cloud: &cloud }, tol)?,
        check_mu_bounds(&d, 0, 1, sample, tol)?,
        check_lemma_nine(&d, 0, sample, tol)?,
        check_lemma_k(&d, 0, 4.0, sample, tol)?,
        check_product_lemma(&d, &ps, sample, tol)?,
        check_mu_set_quasi_triangle(&d, &ps, sample, tol)?,
    ];
    for r in &reports {
        println!(
            "{:<22} checked {:>8} skipped {:>8} violations {} worst slack {:>12.4e} max ratio {}",
            r.check,
            r.checked,
            r.skipped,
            r.violations.len(),
            r.worst_slack.unwrap_or(f64::NAN),
            r.max_ratio.map_or("-".into(), |v| format!("{v:.4}")),
        );
    }
    Ok(())
}
