//! Where trimming happens in a 4:1 incast from four pipes: at the ingress
//! meters or on recirculation. Signalling on every recirculated packet, and
//! only on ones that queued, give very different splits.

use trimsim::harness::{run_scenario, Scenario};
use trimsim::switch::SwitchVariant;

fn main() -> trimsim::Result<()> {
    let mut base = Scenario::build_incast(4, 1)?.with_variant(SwitchVariant::TofinoFull);
    base.ingress_ports = Some(vec![0, 16, 32, 48]);
    base.egress_ports = Some(vec![0; 4]);
    base.initial_window = 5000;
    base.flow_packets = 5000;
    for gated in [true, false] {
        let mut s = base.clone();
        s.switch.signal_requires_backlog = gated;
        let m = run_scenario(&s)?;
        let (i, d) = (m.counters.ingress_trims, m.counters.dod_trims);
        println!(
            "signal {}: ingress {i}, recirculation {d}, signals {}",
            if gated { "on backlog" } else { "always   " },
            m.counters.signals
        );
    }
    Ok(())
}
