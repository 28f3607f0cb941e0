//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::sync::OnceLock;

use rayon::prelude::*;

use trimsim::harness::{quantile, run_scenario, spearman, sweep, AxisValue, MetricStore, Scenario, SweepAxis, SweepPoint};
use trimsim::policy::{PolicyVariant, SignalFanout};
use trimsim::switch::SwitchVariant;

type Outcome = Result<String, String>;

fn incast(n: u16, receivers: u16, variant: SwitchVariant) -> Scenario {
    Scenario::build_incast(n, receivers).unwrap().with_variant(variant)
}

fn run(s: &Scenario) -> MetricStore {
    run_scenario(s).unwrap_or_else(|e| panic!("{}: {e}", s.name))
}

fn sender_sweep() -> &'static [SweepPoint] {
    static CELL: OnceLock<Vec<SweepPoint>> = OnceLock::new();
    CELL.get_or_init(|| sweep(SweepAxis::NSenders, &incast(64, 16, SwitchVariant::TofinoFull)).unwrap())
}

fn duration_sweep(n: u16, variant: PolicyVariant, fanout: SignalFanout) -> Vec<SweepPoint> {
    let mut base = incast(n, 16, SwitchVariant::TofinoFull);
    base.switch.policy.variant = variant;
    base.switch.policy.signal_fanout = fanout;
    sweep(SweepAxis::ResponseDuration, &base).unwrap()
}

fn full_duration_sweep(n: u16) -> &'static [SweepPoint] {
    static S32: OnceLock<Vec<SweepPoint>> = OnceLock::new();
    static S64: OnceLock<Vec<SweepPoint>> = OnceLock::new();
    let cell = if n == 32 { &S32 } else { &S64 };
    cell.get_or_init(|| duration_sweep(n, PolicyVariant::Full, SignalFanout::AllPipes))
}

fn us_of(p: &SweepPoint) -> u64 {
    match p.value {
        AxisValue::Duration(d) => d.as_ps() / 1_000_000,
        _ => unreachable!(),
    }
}

fn excess(p: &SweepPoint) -> f64 {
    p.excess().ratio().unwrap_or(f64::INFINITY)
}

// 64:1 header load exceeds the port rate, so that run gets a header queue
// deep enough to hold the whole blast.
fn big_header_queue(mut s: Scenario) -> Scenario {
    s.switch.header_queue_cap = 1 << 20;
    s
}

fn trim_split_scenario() -> Scenario {
    let mut s = incast(4, 1, SwitchVariant::TofinoFull);
    s.ingress_ports = Some(vec![0, 16, 32, 48]);
    s.egress_ports = Some(vec![0; 4]);
    s.initial_window = 5_000;
    s.flow_packets = 5_000;
    s
}

fn c1_conservation() -> Outcome {
    let mut runs: Vec<(String, MetricStore)> = Vec::new();
    for p in sender_sweep() {
        runs.push((format!("{} senders", p.run.n_senders), p.run.clone()));
        runs.push((format!("{} senders ideal", p.run.n_senders), p.ideal.clone()));
    }
    let mut extra: Vec<Scenario> = Vec::new();
    for v in [SwitchVariant::Ideal, SwitchVariant::TofinoFull] {
        extra.push(big_header_queue(incast(64, 1, v)));
        for r in [4, 8, 16] {
            extra.push(incast(64, r, v));
        }
        extra.push(trim_split_scenario().with_variant(v));
    }
    let more: Vec<(String, MetricStore)> =
        extra.par_iter().map(|s| (format!("{} {:?}", s.name, s.switch.variant), run(s))).collect();
    runs.extend(more);
    for (name, m) in &runs {
        m.check_conservation().map_err(|e| e.to_string())?;
        if m.counters.dod_dropped != 0 || m.counters.header_dropped != 0 {
            return Err(format!(
                "{name}: dod_dropped={} header_dropped={}",
                m.counters.dod_dropped, m.counters.header_dropped
            ));
        }
    }
    Ok(format!("{} runs, sent = full + headers with no drops", runs.len()))
}

fn c2_mod_latency() -> Outcome {
    let ideal = run(&big_header_queue(incast(64, 1, SwitchVariant::Ideal)));
    let mod_ = run(&big_header_queue(incast(64, 1, SwitchVariant::MirrorOnDrop)));
    let med = |m: &MetricStore| quantile(&m.header_cdf(), 0.5).expect("headers arrived");
    let shift = med(&mod_).as_us() - med(&ideal).as_us();
    let msg = format!("median header arrival shift {shift:.3} us");
    if (0.8..=1.3).contains(&shift) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c3_dod_instability() -> Outcome {
    let m = run(&incast(64, 16, SwitchVariant::TofinoDod));
    let q = m.max_dod_queue();
    let msg = format!("max recirculation queue {q} packets");
    if q >= 10_000 && (11_200..=16_800).contains(&q) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c4_feedback() -> Outcome {
    let m = run(&incast(64, 16, SwitchVariant::TofinoFull));
    let q = m.max_dod_queue();
    let msg = format!("max recirculation queue {q} packets");
    if q <= 250 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c5_excess_trims() -> Outcome {
    let pts = sender_sweep();
    let mut ratios = Vec::new();
    for p in pts {
        let r = excess(p);
        if r > 0.15 {
            return Err(format!("{} senders: excess {:.1}%", p.run.n_senders, r * 100.0));
        }
        ratios.push(r);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max = ratios.iter().copied().fold(f64::MIN, f64::max);
    let msg = format!("max excess {:.1}%, mean {:.1}%", max * 100.0, mean * 100.0);
    if mean <= 0.10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c6_goodput() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in sender_sweep() {
        let (a, b) = (p.run.mean_goodput(), p.ideal.mean_goodput());
        let dev = (a - b).abs() / b;
        worst = worst.max(dev);
        if dev > 0.10 {
            return Err(format!("{} senders: {a:.2} vs ideal {b:.2} Gb/s", p.run.n_senders));
        }
    }
    Ok(format!("worst deviation from ideal {:.1}%", worst * 100.0))
}

fn c7_threshold() -> Outcome {
    let m16 = run(&incast(16, 16, SwitchVariant::TofinoFull));
    let m17 = run(&incast(17, 16, SwitchVariant::TofinoFull));
    let m18 = run(&incast(18, 16, SwitchVariant::TofinoFull));
    let msg = format!(
        "16: {} trims; 17: {} trims, {} signals; 18: signals on ports {:?}",
        m16.total_trims(),
        m17.total_trims(),
        m17.counters.signals,
        m18.signalled_ports()
    );
    if m16.total_trims() == 0 && m17.total_trims() > 0 && m17.counters.signals == 0 && m18.signalled_ports() == [0, 1] {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c8_fairness() -> Outcome {
    let m = run(&incast(64, 16, SwitchVariant::TofinoFull));
    let g = m.goodputs();
    let (lo, hi) = (g.iter().copied().fold(f64::MAX, f64::min), g.iter().copied().fold(0.0, f64::max));
    // 4 flows share 100G; every 1500 B packet costs a 64 B pull on the way back
    let fair = 25.0 * 1500.0 / 1564.0;
    let msg = format!("per-flow goodput {lo:.2}..{hi:.2} Gb/s, fair share {fair:.2}");
    if hi / lo - 1.0 <= 0.06 && g.iter().all(|x| (x - fair).abs() / fair <= 0.10) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c9_response_duration() -> Outcome {
    let pts = full_duration_sweep(64);
    let mut bad = Vec::new();
    for p in pts {
        let d = us_of(p);
        let q = p.run.max_dod_queue();
        let e = excess(p);
        if d == 0 && q <= 1000 {
            bad.push(format!("0us: queue {q}"));
        } else if (1..3).contains(&d) && (q <= 1000 || e <= 0.30) {
            bad.push(format!("{d}us: queue {q}, excess {:.1}%", e * 100.0));
        } else if d >= 3 && q > 500 {
            bad.push(format!("{d}us: queue {q}"));
        }
    }
    let tail: Vec<&SweepPoint> = pts.iter().filter(|p| us_of(p) >= 6).collect();
    let x: Vec<f64> = tail.iter().map(|p| us_of(p) as f64).collect();
    let y: Vec<f64> = tail.iter().map(|p| excess(p)).collect();
    let rho = spearman(&x, &y);
    if rho <= 0.5 {
        bad.push(format!("excess vs duration rho {rho:.2}"));
    }
    if bad.is_empty() {
        Ok(format!("short responses unstable, >=3us stable, rho {rho:.2}"))
    } else {
        Err(bad.join("; "))
    }
}

fn c10_variants() -> Outcome {
    let pessi = duration_sweep(32, PolicyVariant::PessiOnly, SignalFanout::AllPipes);
    let all = duration_sweep(32, PolicyVariant::TrimAll, SignalFanout::AllPipes);
    let full = full_duration_sweep(32);
    let mut bad = Vec::new();
    for p in &pessi {
        let d = us_of(p);
        if (1..=14).contains(&d) && p.run.max_dod_queue() <= 1000 {
            bad.push(format!("pessimistic-only stable at {d}us (queue {})", p.run.max_dod_queue()));
        }
    }
    let best_pessi = pessi.iter().filter(|p| us_of(p) > 0).map(|p| p.run.mean_goodput()).fold(0.0, f64::max);
    let full6 = full.iter().find(|p| us_of(p) == 6).unwrap().run.mean_goodput();
    if (best_pessi - 42.0).abs() > 4.2 {
        bad.push(format!("pessimistic-only best goodput {best_pessi:.1}"));
    }
    if (full6 - 46.0).abs() > 4.6 {
        bad.push(format!("full goodput {full6:.1}"));
    }
    for p in &all {
        let d = us_of(p);
        let q = p.run.max_dod_queue();
        if (1..12).contains(&d) && q <= 500 {
            bad.push(format!("trim-all stable at {d}us"));
        }
        if d >= 12 {
            if q > 500 {
                bad.push(format!("trim-all unstable at {d}us (queue {q})"));
            } else if (excess(p) - 0.80).abs() > 0.20 {
                bad.push(format!("trim-all excess {:.1}% at {d}us", excess(p) * 100.0));
            }
        }
    }
    let msg = format!("pessimistic-only best {best_pessi:.1} Gb/s, full {full6:.1} Gb/s");
    if bad.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; {}", bad.join("; ")))
    }
}

fn c11_send_to_one() -> Outcome {
    let mut bad = Vec::new();
    let mut ratios = Vec::new();
    for n in [32, 64] {
        let one = duration_sweep(n, PolicyVariant::Full, SignalFanout::OriginPipe);
        let all = full_duration_sweep(n);
        let first_stable = one.iter().filter(|p| us_of(p) > 0).find(|p| p.run.max_dod_queue() <= 500).map(us_of);
        if first_stable.is_none_or(|d| d < 9) {
            bad.push(format!("{n} senders: origin-only stable from {first_stable:?}us"));
        }
        for (a, b) in one.iter().zip(all) {
            let d = us_of(a);
            if d >= 9 {
                let r = a.run.total_trims() as f64 / b.run.total_trims() as f64 - 1.0;
                ratios.push(r);
                if r < 0.08 {
                    bad.push(format!("{n} senders {d}us: {:.1}% more trims", r * 100.0));
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("origin-only needs >=9us, min extra trims {:.1}%", ratios.iter().copied().fold(f64::MAX, f64::min) * 100.0))
    } else {
        bad.truncate(6);
        Err(bad.join("; "))
    }
}

fn c12_trim_split() -> Outcome {
    let m = run(&trim_split_scenario());
    let (i, d) = (m.counters.ingress_trims, m.counters.dod_trims);
    let ratio = i as f64 / d.max(1) as f64;
    let msg = format!("ingress {i} : recirculation {d} = {ratio:.1}:1");
    if (15.0..=25.0).contains(&ratio) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c13_properties() -> Outcome {
    common::meter_fluid_conformance()?;
    common::two_meter_table()?;
    common::decay_timing()?;
    common::cdf_matches_sort(100_000, 7)?;
    common::event_ordering(1_000_000, 11)?;
    Ok("meter fluid oracle, 27-case decision table, decay timing, CDF and event-order oracles".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("conservation", c1_conservation),
        ("mirror-on-drop latency", c2_mod_latency),
        ("recirculation instability without feedback", c3_dod_instability),
        ("feedback bounds recirculation queue", c4_feedback),
        ("excess trims over sender sweep", c5_excess_trims),
        ("goodput over sender sweep", c6_goodput),
        ("16/17/18 sender threshold", c7_threshold),
        ("64-sender fairness", c8_fairness),
        ("response-duration sweep", c9_response_duration),
        ("policy variants at 32 senders", c10_variants),
        ("origin-pipeline signalling", c11_send_to_one),
        ("ingress vs recirculation trim split", c12_trim_split),
        ("property oracles", c13_properties),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|a| a == &n.to_string()) {
            continue;
        }
        match f() {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
