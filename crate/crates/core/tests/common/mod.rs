//! Independent oracles shared by the property tests and the acceptance run.
//! Each returns `Err` with a description of the first mismatch.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trimsim::harness::cdf;
use trimsim::meter::{Color, TrTcmMeter};
use trimsim::policy::{decide_two_meter, Mode, PolicyConfig, PortTrimState, TrimVerdict};
use trimsim::sim::{Process, Scheduler};
use trimsim::{Rate, SimTime};

pub type Check = Result<(), String>;

struct Recorder(Vec<u64>);

impl Process<u64> for Recorder {
    fn handle(&mut self, id: u64, _: &mut Scheduler<u64>) {
        self.0.push(id);
    }
}

/// Random events must execute in (time, insertion) order.
pub fn event_ordering(n: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sched = Scheduler::new();
    let mut expected: Vec<(u64, u64)> = Vec::with_capacity(n);
    for id in 0..n as u64 {
        // narrow range so equal times are common
        let t = rng.gen_range(0..n as u64 / 8 + 1);
        sched.schedule(SimTime::from_ps(t), id);
        expected.push((t, id));
    }
    expected.sort();
    let mut rec = Recorder(Vec::with_capacity(n));
    sched.run(&mut rec);
    let want: Vec<u64> = expected.into_iter().map(|(_, id)| id).collect();
    match rec.0.iter().zip(&want).position(|(a, b)| a != b) {
        None if rec.0.len() == want.len() => Ok(()),
        None => Err(format!("executed {} of {} events", rec.0.len(), want.len())),
        Some(i) => Err(format!("position {i}: executed event {} but expected {}", rec.0[i], want[i])),
    }
}

/// Step CDF against a count-below-or-equal computed on a sorted copy.
pub fn cdf_matches_sort(n: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<SimTime> = (0..n).map(|_| SimTime::from_ns(rng.gen_range(0..n as u64 / 4))).collect();
    let got = cdf(&values);
    let mut sorted: Vec<u64> = values.iter().map(|t| t.as_ps()).collect();
    sorted.sort_unstable();
    let mut distinct = sorted.clone();
    distinct.dedup();
    if got.len() != distinct.len() {
        return Err(format!("{} points for {} distinct values", got.len(), distinct.len()));
    }
    for ((t, f), v) in got.iter().zip(&distinct) {
        let at_or_below = sorted.partition_point(|x| x <= v);
        let want = at_or_below as f64 / n as f64;
        if t.as_ps() != *v || (f - want).abs() > 1e-12 {
            return Err(format!("point ({}, {f}) but expected ({v}ps, {want})", t.as_ps()));
        }
    }
    Ok(())
}

/// Colour counts of a meter fed back-to-back MTU packets at `offered`.
pub fn meter_run(meter: &mut TrTcmMeter, offered: Rate, window: SimTime) -> [u64; 3] {
    let gap = offered.serialization_time(1500);
    let mut counts = [0u64; 3];
    let mut t = SimTime::ZERO;
    while t < window {
        let c = meter.execute(t, 1500);
        counts[c as usize] += 1;
        t += gap;
    }
    counts
}

fn fraction(counts: [u64; 3], c: Color) -> f64 {
    counts[c as usize] as f64 / counts.iter().sum::<u64>() as f64
}

/// Long-run colour shares equal the ratio of token rate to offered rate.
pub fn meter_fluid_conformance() -> Check {
    let ms = SimTime::from_us(1_000);
    let burst = 3000;
    let mut m = TrTcmMeter::single_rate(Rate::gbps(25), burst);
    let red = fraction(meter_run(&mut m, Rate::gbps(100), ms), Color::Red);
    if (red - 0.75).abs() > 0.01 {
        return Err(format!("25G meter under 100G: red share {red:.4}, want 0.75"));
    }
    let mut m = TrTcmMeter::new(Rate::gbps(50), Rate::gbps(100), burst, burst);
    let c = meter_run(&mut m, Rate::gbps(75), ms);
    let (g, y, r) = (fraction(c, Color::Green), fraction(c, Color::Yellow), fraction(c, Color::Red));
    if (g - 2.0 / 3.0).abs() > 0.01 || (y - 1.0 / 3.0).abs() > 0.01 || r != 0.0 {
        return Err(format!("two-rate meter at 75G: green {g:.4} yellow {y:.4} red {r:.4}"));
    }
    for rate in [100, 50] {
        let mut m = TrTcmMeter::single_rate(Rate::gbps(rate), burst);
        let c = meter_run(&mut m, Rate::gbps(rate), ms);
        if c[Color::Red as usize] != 0 {
            return Err(format!("{rate}G meter at its own rate coloured {} packets red", c[Color::Red as usize]));
        }
    }
    Ok(())
}

/// Rows of the switch decision table as written: (state, pessi, opti, trim).
/// `None` is a wildcard; `Some((c, false))` means "NOT c".
type Cond = Option<(Color, bool)>;

const TABLE: [(Mode, Cond, Cond, bool); 6] = [
    (Mode::Pessimistic, Some((Color::Green, false)), None, true),
    (Mode::Halftimistic, None, Some((Color::Green, false)), true),
    (Mode::Optimistic, None, Some((Color::Red, true)), true),
    (Mode::Pessimistic, Some((Color::Green, true)), None, false),
    (Mode::Halftimistic, None, Some((Color::Green, true)), false),
    (Mode::Optimistic, None, Some((Color::Red, false)), false),
];

fn cond_holds(cond: Cond, c: Color) -> bool {
    match cond {
        None => true,
        Some((want, true)) => c == want,
        Some((want, false)) => c != want,
    }
}

/// Every (state, pessi, opti) combination against the table.
pub fn two_meter_table() -> Check {
    let colors = [Color::Green, Color::Yellow, Color::Red];
    let mut cases = 0;
    for mode in Mode::ALL {
        for pessi in colors {
            for opti in colors {
                let rows: Vec<bool> = TABLE
                    .iter()
                    .filter(|(m, p, o, _)| *m == mode && cond_holds(*p, pessi) && cond_holds(*o, opti))
                    .map(|r| r.3)
                    .collect();
                if rows.len() != 1 {
                    return Err(format!("table ambiguous for {mode:?}/{pessi:?}/{opti:?}"));
                }
                let want = if rows[0] { TrimVerdict::Trim } else { TrimVerdict::Forward };
                let got = decide_two_meter(mode, opti, pessi);
                if got != want {
                    return Err(format!("{mode:?} pessi={pessi:?} opti={opti:?}: got {got:?}, want {want:?}"));
                }
                cases += 1;
            }
        }
    }
    if cases != 27 {
        return Err(format!("checked {cases} cases"));
    }
    Ok(())
}

/// Mode changes exactly when the registers expire.
pub fn decay_timing() -> Check {
    let cfg = PolicyConfig::default();
    let mut st = PortTrimState::default();
    let mut trace = Vec::new();
    let sig = SimTime::from_ns(1_234);
    st.on_congestion_signal(sig, &cfg, &mut trace);
    let t0 = sig + cfg.t0;
    let t1 = sig + cfg.t1;
    let one = SimTime::from_ps(1);
    let probes = [
        (sig, Mode::Pessimistic),
        (t0, Mode::Pessimistic),
        (t0 + one, Mode::Halftimistic),
        (t1, Mode::Halftimistic),
        (t1 + one, Mode::Optimistic),
    ];
    for (t, want) in probes {
        let got = st.clone().classify(t);
        if got != want {
            return Err(format!("at {t}: {got:?}, want {want:?}"));
        }
    }
    Ok(())
}
