use cassinian::repro::{hyperbolicity_sweep, sweep_rows, SweepConfig};

fn main() -> cassinian::Result<()> {
    let cfg = SweepConfig {
        trials: 10,
        ks: vec![1, 2, 4, 8, 16],
        ..SweepConfig::default()
    };
    println!(
        "{:>3} {:>6} {:>12} {:>12} {:>12}",
        "k", "trial", "tilde_avg", "avg", "sup"
    );
    for row in sweep_rows(&cfg)? {
        println!(
            "{:>3} {:>6} {:>12.6} {:>12.6} {:>12.6}",
            row.k, row.trial, row.delta_tilde_avg, row.delta_avg, row.delta_sup
        );
    }
    print!("{}", hyperbolicity_sweep(&cfg)?);
    Ok(())
}
