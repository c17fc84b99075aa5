use cassinian::metric::{build_distance_matrix, BaseMetric, PointCloud};
use cassinian::{PuncturedSpace, Variant};

fn main() -> cassinian::Result<()> {
    // the line {0, 2, 5, 10}, punctured at 0 and 10
    let cloud = PointCloud::new(1, vec![vec![0.0], vec![2.0], vec![5.0], vec![10.0]])?;
    let base = build_distance_matrix(&cloud, BaseMetric::Euclidean)?;
    let space = PuncturedSpace::new(base, vec![0, 3])?;
    println!("domain = {:?}, punctures = {:?}", space.domain(), space.punctures());
    for variant in Variant::ALL {
        let anchor = variant.is_one_point().then_some(0);
        let m = space.matrix(variant, anchor)?;
        println!("{:<14} d(2, 5) = {:.12}", variant.name(), m.get(0, 1));
    }
    Ok(())
}
