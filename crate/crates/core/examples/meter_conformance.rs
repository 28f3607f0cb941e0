//! Colour shares of single-rate and two-rate meters fed back-to-back MTU
//! packets at 100 Gb/s.

use trimsim::meter::{Color, TrTcmMeter};
use trimsim::{Rate, SimTime};

fn shares(mut meter: TrTcmMeter) -> [f64; 3] {
    let gap = Rate::gbps(100).serialization_time(1500);
    let mut counts = [0u64; 3];
    let mut t = SimTime::ZERO;
    while t < SimTime::from_us(1000) {
        counts[meter.execute(t, 1500) as usize] += 1;
        t += gap;
    }
    let total = counts.iter().sum::<u64>() as f64;
    counts.map(|c| c as f64 / total)
}

fn main() {
    let burst = trimsim::meter::DEFAULT_BURST_BYTES;
    let meters = [
        ("100G", TrTcmMeter::single_rate(Rate::gbps(100), burst)),
        ("50G", TrTcmMeter::single_rate(Rate::gbps(50), burst)),
        ("25G", TrTcmMeter::single_rate(Rate::gbps(25), burst)),
        ("50G/75G", TrTcmMeter::new(Rate::gbps(50), Rate::gbps(75), burst, burst)),
    ];
    println!("{:<8} {:>7} {:>7} {:>7}", "meter", "green", "yellow", "red");
    for (name, m) in meters {
        let s = shares(m);
        println!(
            "{name:<8} {:>7.3} {:>7.3} {:>7.3}",
            s[Color::Green as usize],
            s[Color::Yellow as usize],
            s[Color::Red as usize]
        );
    }
}
