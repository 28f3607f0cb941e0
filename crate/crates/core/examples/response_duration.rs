//! How long the switch stays pessimistic after a signal, 0 to 30 us, at
//! 32 senders. Too short and the recirculation queue runs away.

use trimsim::harness::{sweep, AxisValue, Scenario, SweepAxis};

fn main() -> trimsim::Result<()> {
    let base = Scenario::build_incast(32, 16)?;
    println!("{:>6} {:>10} {:>8} {:>9}", "hold", "max queue", "trims", "goodput");
    for p in sweep(SweepAxis::ResponseDuration, &base)? {
        let AxisValue::Duration(d) = p.value else { unreachable!() };
        println!(
            "{:>4}us {:>10} {:>8} {:>9.2}",
            d.as_us(),
            p.run.max_dod_queue(),
            p.run.total_trims(),
            p.run.mean_goodput()
        );
    }
    Ok(())
}
