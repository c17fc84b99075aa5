use cassinian::repro::four_point_counterexample;

fn main() -> cassinian::Result<()> {
    let result = four_point_counterexample()?;
    print!("{result}");
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}
