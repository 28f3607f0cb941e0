use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::event::Event;
use crate::packet::{Flow, HostId, Packet, PortId};
use crate::sim::{Link, Process, Scheduler, SimTime};
use crate::switch::Switch;
use crate::transport::{PullPacer, Receiver, Sender};

use super::metrics::{FlowRecord, MetricStore, TraceRow};
use super::scenario::Scenario;

/// Hosts plus the switch, wired through one event queue.
struct World {
    switch: Switch,
    senders: Vec<Sender>,
    receivers: Vec<Receiver>,
    pacers: Vec<PullPacer>,
    // ingress port -> sender index
    sender_at: Vec<Option<usize>>,
    host_latency: SimTime,
    reverse_delay: SimTime,
    stop: SimTime,
    delivered_full: u64,
    delivered_header: u64,
    header_arrivals: Vec<SimTime>,
    trace: Option<Vec<TraceRow>>,
}

impl World {
    fn kick_sender(&mut self, idx: usize, sched: &mut Scheduler<Event>) {
        let now = sched.now();
        let s = &mut self.senders[idx];
        if let Some((pkt, done)) = s.try_send(now) {
            let host = s.ingress_port as HostId;
            sched.schedule(done, Event::SenderTxDone { host });
            sched.schedule(done + self.host_latency, Event::IngressArrive(pkt));
        }
    }

    fn deliver(&mut self, pkt: Packet, sched: &mut Scheduler<Event>) {
        let now = sched.now();
        let flow = pkt.flow_id as usize;
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceRow {
                time: now,
                flow_id: pkt.flow_id,
                seqno: pkt.seqno,
                kind: pkt.kind,
                trim_origin: pkt.trim_origin,
                egress_port: pkt.egress_port,
            });
        }
        let credit = if pkt.is_data() {
            self.delivered_full += 1;
            if !self.receivers[flow].on_data(pkt.seqno, now, self.stop) {
                return;
            }
            None
        } else {
            self.delivered_header += 1;
            self.header_arrivals.push(now);
            self.receivers[flow].on_header();
            Some(pkt.seqno)
        };
        if now >= self.stop {
            return;
        }
        let port = pkt.egress_port;
        if let Some(at) = self.pacers[port as usize].add_credit(pkt.flow_id, credit, now) {
            sched.schedule(at, Event::PacerTick { port });
        }
    }

    fn pacer_tick(&mut self, port: PortId, sched: &mut Scheduler<Event>) {
        let now = sched.now();
        let pacer = &mut self.pacers[port as usize];
        if now >= self.stop {
            pacer.stop();
            return;
        }
        if let Some((flow, rtx)) = pacer.tick(now) {
            sched.schedule(now + self.reverse_delay, Event::PullArrive { flow, rtx });
        }
        if pacer.is_armed() {
            sched.schedule(now + pacer.interval(), Event::PacerTick { port });
        }
    }
}

impl Process<Event> for World {
    fn handle(&mut self, event: Event, sched: &mut Scheduler<Event>) {
        let Some(event) = self.switch.handle(event, sched) else { return };
        match event {
            Event::SenderTxDone { host } => {
                let idx = self.sender_at[host as usize].expect("tx done from a sending host");
                self.senders[idx].tx_done();
                self.kick_sender(idx, sched);
            }
            Event::ReceiverArrive(pkt) => self.deliver(pkt, sched),
            Event::PacerTick { port } => self.pacer_tick(port, sched),
            Event::PullArrive { flow, rtx } => {
                if sched.now() < self.stop {
                    self.senders[flow as usize].on_pull(rtx);
                    self.kick_sender(flow as usize, sched);
                }
            }
            other => unreachable!("switch did not consume {other:?}"),
        }
    }
}

/// Runs a scenario to quiescence and returns its metrics. Senders and
/// pullers stop at `duration`; packets still in flight then drain so that
/// every sent packet is accounted for.
pub fn run_scenario(scenario: &Scenario) -> Result<MetricStore> {
    scenario.validate()?;
    let cfg = &scenario.switch;
    let line = cfg.line_rate();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let n = scenario.n_senders as usize;
    let mut senders = Vec::with_capacity(n);
    let mut sender_at = vec![None; cfg.n_ports as usize];
    let mut starts = Vec::with_capacity(n);
    for i in 0..n {
        let ingress = scenario.ingress_port(i);
        let egress = scenario.egress_port(i);
        let flow = Flow::new(i as u32, ingress as HostId, egress as HostId, scenario.flow_packets, scenario.initial_window)?;
        let link = Link::new(line, scenario.host_latency)?;
        senders.push(Sender::new(flow, ingress, cfg.pipe_of(ingress), egress, link, cfg.mtu));
        sender_at[ingress as usize] = Some(i);
        let jitter = scenario.start_jitter.as_ps();
        starts.push(if jitter == 0 { SimTime::ZERO } else { SimTime::from_ps(rng.gen_range(0..=jitter)) });
    }
    let control = line.serialization_time(cfg.header_size);
    let mut world = World {
        switch: Switch::new(cfg.clone(), scenario.host_latency, scenario.record_queues)?,
        receivers: (0..n).map(|_| Receiver::new(scenario.flow_packets)).collect(),
        pacers: (0..cfg.n_ports).map(|_| PullPacer::new(line.serialization_time(cfg.mtu))).collect(),
        senders,
        sender_at,
        host_latency: scenario.host_latency,
        reverse_delay: scenario.host_latency + scenario.host_latency + control + control,
        stop: scenario.duration,
        delivered_full: 0,
        delivered_header: 0,
        header_arrivals: Vec::new(),
        trace: scenario.record_trace.then(Vec::new),
    };

    let mut sched = Scheduler::new();
    // an idle NIC treats a completion as the cue to start sending
    for (s, &start) in world.senders.iter().zip(&starts) {
        sched.schedule(start, Event::SenderTxDone { host: s.ingress_port as HostId });
    }
    sched.run(&mut world);

    let end_time = sched.now();
    let duration_s = scenario.duration.as_ps() as f64 * 1e-12;
    let mtu = cfg.mtu as u64;
    let flows = world
        .senders
        .iter()
        .zip(&world.receivers)
        .enumerate()
        .map(|(i, (s, r))| {
            let bytes = r.unique_by_deadline() * mtu;
            let start = starts[i];
            FlowRecord {
                flow_id: s.flow.flow_id,
                bytes,
                start_ns: start.as_ns(),
                end_ns: r.last_unique().unwrap_or(start).as_ns(),
                goodput_gbps: bytes as f64 * 8.0 / duration_s / 1e9,
                rtx_count: s.rtx_count(),
            }
        })
        .collect();
    let sent = world.senders.iter().map(Sender::sent).sum();
    let duplicates = world.receivers.iter().map(Receiver::duplicates).sum();
    let (counters, modes, queues) = world.switch.finish(end_time);
    let store = MetricStore {
        scenario: scenario.name.clone(),
        variant: cfg.variant,
        n_senders: scenario.n_senders,
        duration: scenario.duration,
        counters,
        sent,
        delivered_full: world.delivered_full,
        delivered_header: world.delivered_header,
        duplicates,
        header_arrivals: world.header_arrivals,
        flows,
        modes,
        queues,
        trace: world.trace.unwrap_or_default(),
        end_time,
        events: sched.executed(),
    };
    store.check_conservation()?;
    Ok(store)
}
