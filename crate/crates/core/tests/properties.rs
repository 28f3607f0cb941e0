use proptest::prelude::*;

use trimsim::harness::{run_scenario, Scenario};
use trimsim::meter::{Color, TrTcmMeter};
use trimsim::packet::Packet;
use trimsim::policy::{
    decide_three_meter, mode_target_rate, Mode, PolicyConfig, PolicyVariant, PortTrimState, TrimVerdict,
};
use trimsim::switch::{DodPort, EgressDiscipline, EgressPort, SwitchVariant};
use trimsim::transport::PullPacer;
use trimsim::sim::Link;
use trimsim::{Rate, SimTime};

fn variant() -> impl Strategy<Value = SwitchVariant> {
    prop_oneof![
        Just(SwitchVariant::Ideal),
        Just(SwitchVariant::MirrorOnDrop),
        Just(SwitchVariant::TofinoDod),
        Just(SwitchVariant::TofinoFull),
        Just(SwitchVariant::Tofino2),
    ]
}

fn small_scenario(v: SwitchVariant, n: u16, r: u16, seed: u64) -> Scenario {
    let mut s = Scenario::build_incast(n, r).unwrap().with_variant(v);
    s.duration = SimTime::from_us(40);
    s.initial_window = 50;
    s.flow_packets = 400;
    s.start_jitter = SimTime::from_ns(1000);
    s.seed = seed;
    s.switch.header_queue_cap = 1 << 16;
    s
}

fn pkt(seq: u64) -> Packet {
    Packet::data(0, seq, 1500, 0, 1, 0, 0, 1, SimTime::ZERO)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_are_deterministic(v in variant(), n in 2u16..24, seed in any::<u64>()) {
        let s = small_scenario(v, n, 2, seed);
        let a = run_scenario(&s).unwrap();
        let b = run_scenario(&s).unwrap();
        prop_assert_eq!(&a.counters, &b.counters);
        prop_assert_eq!(&a.flows, &b.flows);
        prop_assert_eq!(&a.header_arrivals, &b.header_arrivals);
    }

    #[test]
    fn every_packet_is_accounted(v in variant(), n in 1u16..40, r in 1u16..8, seed in any::<u64>()) {
        let m = run_scenario(&small_scenario(v, n, r.min(n), seed)).unwrap();
        prop_assert!(m.check_conservation().is_ok());
        prop_assert!(m.counters.max_data_queue.iter().all(|&q| q <= 10));
    }
}

proptest! {
    #[test]
    fn meter_never_exceeds_its_rates(
        gaps in prop::collection::vec(0u64..400_000, 500..2000),
        cir in 10u64..100,
        extra in 0u64..50,
    ) {
        let burst = 3000;
        let mut m = TrTcmMeter::new(Rate::gbps(cir), Rate::gbps(cir + extra), burst, burst);
        let (mut green, mut not_red) = (0u64, 0u64);
        let mut t = SimTime::ZERO;
        for g in gaps {
            t += SimTime::from_ps(g);
            match m.execute(t, 1500) {
                Color::Green => { green += 1500; not_red += 1500; }
                Color::Yellow => not_red += 1500,
                Color::Red => {}
            }
            prop_assert!(m.c_tokens() <= burst as u64 && m.p_tokens() <= burst as u64);
        }
        let window = t.as_ps() as f64 * 1e-12;
        prop_assert!(green as f64 <= cir as f64 * 1e9 / 8.0 * window + burst as f64 + 1.0);
        prop_assert!(not_red as f64 <= (cir + extra) as f64 * 1e9 / 8.0 * window + burst as f64 + 1.0);
    }

    #[test]
    fn forwarded_rate_stays_under_mode_target(mode_i in 0usize..3, offered in 30u64..400) {
        let mode = Mode::ALL[mode_i];
        let line = Rate::gbps(100);
        let burst = 3000;
        let mut meters = [100, 50, 25].map(|g| TrTcmMeter::single_rate(Rate::gbps(g), burst));
        let gap = Rate::gbps(offered).serialization_time(1500);
        let window = SimTime::from_us(200);
        let mut forwarded = 0u64;
        let mut t = SimTime::ZERO;
        while t < window {
            let [o, h, p] = meters.each_mut().map(|m| m.execute(t, 1500));
            if decide_three_meter(mode, o, h, p) == TrimVerdict::Forward {
                forwarded += 1500;
            }
            t += gap;
        }
        let cap = mode_target_rate(mode, line).as_bps() as f64 / 8.0 * window.as_ps() as f64 * 1e-12 + burst as f64;
        prop_assert!(forwarded as f64 <= cap);
    }

    #[test]
    fn modes_only_decay_after_last_signal(
        signals in prop::collection::vec(0u64..50_000, 1..8),
        pessi_only in any::<bool>(),
    ) {
        let mut cfg = PolicyConfig::default();
        if pessi_only {
            cfg.variant = PolicyVariant::PessiOnly;
        }
        let mut st = PortTrimState::default();
        let mut trace = Vec::new();
        let mut times: Vec<SimTime> = signals.into_iter().map(SimTime::from_ns).collect();
        times.sort();
        for &t in &times {
            st.on_congestion_signal(t, &cfg, &mut trace);
        }
        let last = *times.last().unwrap();
        prop_assert!(st.t0_reg() <= st.t1_reg());
        let mut prev = Mode::Pessimistic;
        for step in 0..600 {
            let now = last + SimTime::from_ns(step * 50);
            let m = st.classify(now);
            prop_assert!(m <= prev, "{:?} after {:?}", m, prev);
            if now <= last + cfg.t0 {
                prop_assert_eq!(m, Mode::Pessimistic);
            }
            if now > last + cfg.t1 {
                prop_assert_eq!(m, Mode::Optimistic);
            }
            prev = m;
        }
    }

    #[test]
    fn pulls_are_fair_across_backlogged_flows(k in 1u32..12, per_flow in 1usize..30) {
        let interval = SimTime::from_ns(120);
        let mut p = PullPacer::new(interval);
        for _ in 0..per_flow {
            for f in 0..k {
                p.add_credit(f, None, SimTime::ZERO);
            }
        }
        let mut counts = vec![0i64; k as usize];
        let mut now = SimTime::ZERO;
        // any prefix while all flows are still backlogged
        for _ in 0..(k as usize * (per_flow - 1)) {
            let (f, _) = p.tick(now).unwrap();
            counts[f as usize] += 1;
            let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
            prop_assert!(spread <= 1);
            now += interval;
        }
    }

    #[test]
    fn link_never_overcommits(sizes in prop::collection::vec(64u32..=1500, 1..300), gaps in prop::collection::vec(0u64..200_000, 300)) {
        let rate = Rate::gbps(100);
        let mut link = Link::new(rate, SimTime::ZERO).unwrap();
        let mut now = SimTime::ZERO;
        let mut bytes = 0u64;
        let mut prev_done = SimTime::ZERO;
        for (s, g) in sizes.iter().zip(&gaps) {
            now += SimTime::from_ps(*g);
            let done = link.serialize(*s, now);
            prop_assert!(done >= prev_done + rate.serialization_time(*s));
            prev_done = done;
            bytes += *s as u64;
        }
        let window = prev_done.as_ps() as f64 * 1e-12;
        prop_assert!(bytes as f64 <= rate.as_bps() as f64 / 8.0 * window + 1500.0);
    }

    #[test]
    fn queues_are_fifo(n in 1usize..60, headers in prop::collection::vec(any::<bool>(), 60)) {
        let link = || Link::new(Rate::gbps(100), SimTime::ZERO).unwrap();
        let mut dod = DodPort::new(link(), 1000);
        let mut eg = EgressPort::new(link(), 100, 100, EgressDiscipline::Weighted { header_weight: 10 }, 1500);
        for i in 0..n as u64 {
            prop_assert!(dod.offer(pkt(i), SimTime::ZERO));
            let p = if headers[i as usize] { pkt(i).trim(trimsim::packet::TrimOrigin::Ideal, 64).unwrap() } else { pkt(i) };
            if p.is_header() { eg.offer_header(p).unwrap() } else { eg.offer_data(p).unwrap() }
        }
        let mut out = Vec::new();
        let mut now = SimTime::ZERO;
        while let Some(d) = dod.start_next(now) {
            now = d.completes_at;
            out.push(dod.finish().seqno);
        }
        prop_assert_eq!(out, (0..n as u64).collect::<Vec<_>>());
        let (mut last_h, mut last_d) = (None, None);
        while let Some(p) = eg.dequeue() {
            let last = if p.is_header() { &mut last_h } else { &mut last_d };
            prop_assert!(last.is_none_or(|l| l < p.seqno));
            *last = Some(p.seqno);
        }
    }
}

#[test]
fn queue_reading_ingress_slips_are_bounded_per_port() {
    for (n, r) in [(4u16, 1u16), (16, 1), (64, 1), (64, 16)] {
        let mut s = Scenario::build_incast(n, r).unwrap().with_variant(SwitchVariant::Tofino2);
        s.duration = SimTime::from_us(60);
        s.switch.header_queue_cap = 1 << 20;
        let m = run_scenario(&s).unwrap();
        let bound = s.switch.n_pipes as u64 * s.switch.tofino2_stages as u64 * r as u64;
        assert!(m.counters.onset_slips <= bound, "{n}:{r} slipped {} > {bound}", m.counters.onset_slips);
    }
}

#[test]
fn threshold_between_seventeen_and_eighteen_senders() {
    let signals = |n| run_scenario(&Scenario::build_incast(n, 16).unwrap()).unwrap().counters.signals;
    assert_eq!(signals(16), 0);
    assert_eq!(signals(17), 0);
    assert!(signals(18) > 0);
}
