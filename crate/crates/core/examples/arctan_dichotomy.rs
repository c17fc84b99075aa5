use cassinian::metric::{build_distance_matrix, BaseMetric};
use cassinian::quadruple_delta;
use cassinian::repro::{arctan_family, corner_quadruple, ArctanConfig};

fn main() -> cassinian::Result<()> {
    println!("{:>8} {:>12} {:>12} {:>14} {:>10}", "t", "d1", "d2", "d1+d2", "taxicab");
    for t in [0.5, 1.0, 10.0, 100.0, 1000.0] {
        let q = corner_quadruple(t);
        let delta =
            |metric| -> cassinian::Result<f64> { Ok(quadruple_delta(&build_distance_matrix(&q, metric)?, 0, 1, 2, 3)) };
        println!(
            "{t:>8} {:>12.9} {:>12.9} {:>14.9} {:>10.4}",
            delta(BaseMetric::D1)?,
            delta(BaseMetric::D2)?,
            delta(BaseMetric::D1PlusD2)?,
            delta(BaseMetric::Taxicab)?,
        );
    }
    print!("{}", arctan_family(&ArctanConfig::default())?);
    Ok(())
}
