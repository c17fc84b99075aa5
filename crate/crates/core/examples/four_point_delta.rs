use std::env;

use cassinian::metric::{build_distance_matrix, BaseMetric, PointCloud};
use cassinian::par::with_workers;
use cassinian::{exact_delta, sampled_delta};

fn main() -> cassinian::Result<()> {
    let n: usize = env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(120);
    let cloud = PointCloud::random_uniform(n, 2, 7)?;
    let m = build_distance_matrix(&cloud, BaseMetric::Euclidean)?;

    let one = with_workers(Some(1), || exact_delta(&m))?;
    let all = exact_delta(&m)?;
    println!("exact   delta = {:.15} witness {:?}", one.delta, one.witness);
    println!(
        "          {} quadruples, {:.1} ms on 1 worker, {:.1} ms on the default pool",
        one.quadruples, one.elapsed_ms, all.elapsed_ms
    );
    assert_eq!(one.delta.to_bits(), all.delta.to_bits());
    assert_eq!(one.witness, all.witness);

    let s = sampled_delta(&m, 50_000, 1)?;
    println!("sampled delta = {:.15} over {} quadruples", s.delta, s.quadruples);
    Ok(())
}
