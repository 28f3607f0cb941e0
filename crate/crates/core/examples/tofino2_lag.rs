//! Queue-reading ingress (TOFINO2) at incast onset: how many packets get past
//! ingress before the lagged queue length shows the port is full.

use trimsim::harness::{run_scenario, Scenario};
use trimsim::switch::SwitchVariant;

fn main() -> trimsim::Result<()> {
    for (n, r) in [(4u16, 1u16), (16, 1), (64, 16), (64, 1)] {
        let mut s = Scenario::build_incast(n, r)?.with_variant(SwitchVariant::Tofino2);
        s.duration = trimsim::SimTime::from_us(100);
        if r == 1 {
            s.switch.header_queue_cap = 1 << 20;
        }
        let m = run_scenario(&s)?;
        let bound = s.switch.n_pipes as u64 * s.switch.tofino2_stages as u64;
        println!(
            "{n:>2}:{r:<2} onset slips {:>3} (bound {bound}), ingress trims {:>6}, recirculated {:>5}",
            m.counters.onset_slips, m.counters.ingress_trims, m.counters.deflections
        );
    }
    Ok(())
}
