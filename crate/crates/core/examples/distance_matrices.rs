use cassinian::metric::{build_distance_matrix, BaseMetric, PointCloud};

fn main() -> cassinian::Result<()> {
    let cloud = PointCloud::new(2, vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![0.0, 10.0], vec![1.0, 1.0]])?;
    for metric in [
        BaseMetric::Euclidean,
        BaseMetric::Taxicab,
        BaseMetric::D1,
        BaseMetric::D1PlusD2,
    ] {
        let m = build_distance_matrix(&cloud, metric)?;
        println!("{metric}:");
        for row in m.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:8.4}")).collect();
            println!("  {}", cells.join(" "));
        }
    }
    Ok(())
}
