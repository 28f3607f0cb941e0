//! Full three-mode policy against pessimistic-only and trim-everything
//! responses, at a few hold durations.

use trimsim::harness::{run_scenario, Scenario};
use trimsim::policy::PolicyVariant;
use trimsim::SimTime;

fn main() -> trimsim::Result<()> {
    let base = Scenario::build_incast(32, 16)?;
    let ideal = run_scenario(&base.clone().with_variant(trimsim::switch::SwitchVariant::Ideal))?;
    println!("ideal: {} trims, {:.2} Gb/s", ideal.total_trims(), ideal.mean_goodput());
    for variant in [PolicyVariant::Full, PolicyVariant::PessiOnly, PolicyVariant::TrimAll] {
        for us in [2, 6, 14, 20] {
            let mut s = base.clone();
            s.switch.policy = s.switch.policy.with_response_duration(SimTime::from_us(us));
            s.switch.policy.variant = variant;
            let m = run_scenario(&s)?;
            println!(
                "{variant:?} {us:>2}us: max queue {:>5}, trims {:>6}, goodput {:>5.2}",
                m.max_dod_queue(),
                m.total_trims(),
                m.mean_goodput()
            );
        }
    }
    Ok(())
}
