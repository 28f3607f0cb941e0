//! Sixteen parallel 4:1 incasts. Without feedback the recirculation queues
//! grow for as long as the incast lasts; with it they stay short.

use trimsim::harness::{run_scenario, Scenario};
use trimsim::switch::SwitchVariant;

fn main() -> trimsim::Result<()> {
    let base = Scenario::build_incast(64, 16)?;
    for v in [SwitchVariant::Ideal, SwitchVariant::TofinoDod, SwitchVariant::TofinoFull] {
        let m = run_scenario(&base.clone().with_variant(v))?;
        println!(
            "{:<12} max recirc queue {:>6}  trims {:>7}  signals {:>6}  goodput {:>5.1} Gb/s",
            v.as_str(),
            m.max_dod_queue(),
            m.total_trims(),
            m.counters.signals,
            m.mean_goodput()
        );
    }
    Ok(())
}
