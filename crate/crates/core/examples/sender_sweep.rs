//! Goodput and excess trimming as the number of senders onto 16 receivers
//! grows. Pass `--all` for every count from 1 to 64.

use trimsim::harness::{sweep_values, AxisValue, Scenario, TrimExcess};

fn main() -> trimsim::Result<()> {
    let counts: Vec<u16> = if std::env::args().any(|a| a == "--all") {
        (1..=64).collect()
    } else {
        vec![1, 8, 16, 17, 18, 24, 32, 48, 64]
    };
    let values: Vec<AxisValue> = counts.into_iter().map(AxisValue::Senders).collect();
    let base = Scenario::build_incast(64, 16)?;
    println!("{:>7} {:>9} {:>9} {:>8} {:>8}", "senders", "goodput", "ideal", "excess", "signals");
    for p in sweep_values(&values, &base)? {
        let excess = match p.excess() {
            TrimExcess::Ratio(r) => format!("{:.1}%", r * 100.0),
            TrimExcess::Absolute(a) => format!("+{a}"),
        };
        println!(
            "{:>7} {:>9.2} {:>9.2} {:>8} {:>8}",
            p.value.to_string(),
            p.run.mean_goodput(),
            p.ideal.mean_goodput(),
            excess,
            p.run.counters.signals
        );
    }
    Ok(())
}
