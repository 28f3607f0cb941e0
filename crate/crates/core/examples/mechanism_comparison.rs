//! 64:1 initial-window blast: when do trimmed headers reach the receiver
//! under output-queued trimming versus mirror-on-drop?

use trimsim::harness::{quantile, run_scenario, Scenario};
use trimsim::switch::SwitchVariant;
use trimsim::SimTime;

fn main() -> trimsim::Result<()> {
    let mut base = Scenario::build_incast(64, 1)?;
    base.initial_window = 100;
    base.flow_packets = 100;
    base.duration = SimTime::from_us(200);
    // the blast overruns the default header queue
    base.switch.header_queue_cap = 1 << 20;

    println!("{:<16} {:>7} {:>9} {:>9} {:>9}", "variant", "headers", "p10 us", "p50 us", "p90 us");
    for v in [SwitchVariant::Ideal, SwitchVariant::MirrorOnDrop] {
        let m = run_scenario(&base.clone().with_variant(v))?;
        let cdf = m.header_cdf();
        let q = |p| quantile(&cdf, p).map_or(f64::NAN, |t| t.as_us());
        println!(
            "{:<16} {:>7} {:>9.2} {:>9.2} {:>9.2}",
            v.as_str(),
            m.header_arrivals.len(),
            q(0.1),
            q(0.5),
            q(0.9)
        );
    }
    Ok(())
}
