//! Write the output files of a short run and compare them with a second run.

use trimsim::harness::{compare, run_scenario, write_run, Scenario};
use trimsim::switch::SwitchVariant;

fn main() -> trimsim::Result<()> {
    let dir = std::env::temp_dir().join("trimsim_outputs");
    let mut s = Scenario::build_incast(32, 16)?;
    s.duration = trimsim::SimTime::from_us(100);
    s.record_queues = true;
    for v in [SwitchVariant::TofinoDod, SwitchVariant::TofinoFull] {
        let m = run_scenario(&s.clone().with_variant(v))?;
        for p in write_run(&m, &dir.join(v.as_str()))? {
            println!("{}", p.display());
        }
    }
    print!("{}", compare(&dir.join("TOFINO_DOD"), &dir.join("TOFINO_FULL"))?);
    Ok(())
}
