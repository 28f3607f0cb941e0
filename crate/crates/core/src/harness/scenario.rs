use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::packet::PortId;
use crate::sim::{serde_ns, SimTime};
use crate::switch::{SwitchConfig, SwitchVariant};

/// Maximum number of senders a 64-port switch can attach.
pub const MAX_SENDERS: u16 = 64;

/// One simulated experiment. Unknown keys are rejected when loaded from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub name: String,
    pub n_senders: u16,
    /// Sender `i` targets port `i % n_receivers` unless `egress_ports` is set.
    pub n_receivers: u16,
    /// Explicit egress port per sender.
    pub egress_ports: Option<Vec<PortId>>,
    /// Explicit ingress port per sender; by default sender `i` sits on port `i`.
    pub ingress_ports: Option<Vec<PortId>>,
    pub switch: SwitchConfig,
    #[serde(rename = "duration_ns", with = "serde_ns")]
    pub duration: SimTime,
    pub initial_window: u64,
    /// Packets per flow; large values model long-lived flows.
    pub flow_packets: u64,
    /// One-way propagation between a host and the switch.
    #[serde(rename = "host_latency_ns", with = "serde_ns")]
    pub host_latency: SimTime,
    /// Upper bound of the uniform per-sender start offset.
    #[serde(rename = "start_jitter_ns", with = "serde_ns")]
    pub start_jitter: SimTime,
    pub seed: u64,
    /// Keep a per-packet delivery trace.
    pub record_trace: bool,
    /// Keep the data / recirculation queue-depth series.
    pub record_queues: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "incast".into(),
            n_senders: 64,
            n_receivers: 16,
            egress_ports: None,
            ingress_ports: None,
            switch: SwitchConfig::default(),
            duration: SimTime::from_us(500),
            initial_window: 1000,
            flow_packets: 1_000_000,
            host_latency: SimTime::from_ns(500),
            start_jitter: SimTime::ZERO,
            seed: 1,
            record_trace: false,
            record_queues: false,
        }
    }
}

impl Scenario {
    /// `n_senders` hosts on ingress ports `0..n_senders`, sender `i` sending to
    /// port `i % n_receivers`.
    pub fn build_incast(n_senders: u16, n_receivers: u16) -> Result<Self> {
        let s = Scenario { name: format!("incast_{n_senders}x{n_receivers}"), n_senders, n_receivers, ..Default::default() };
        s.validate()?;
        Ok(s)
    }

    pub fn with_variant(mut self, variant: SwitchVariant) -> Self {
        self.switch.variant = variant;
        self
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Json { path: "<config>".into(), source: e })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
        let s: Scenario = serde_json::from_str(&text).map_err(|e| Error::Json { path: path.into(), source: e })?;
        s.validate()?;
        Ok(s)
    }

    pub fn ingress_port(&self, sender: usize) -> PortId {
        match &self.ingress_ports {
            Some(v) => v[sender],
            None => sender as PortId,
        }
    }

    pub fn egress_port(&self, sender: usize) -> PortId {
        match &self.egress_ports {
            Some(v) => v[sender],
            None => (sender as u16 % self.n_receivers) as PortId,
        }
    }

    /// `(ingress_port, egress_port)` for every sender.
    pub fn mapping(&self) -> Vec<(PortId, PortId)> {
        (0..self.n_senders as usize).map(|i| (self.ingress_port(i), self.egress_port(i))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.switch.validate()?;
        let err = |m: String| Err(Error::Config(m));
        let max = MAX_SENDERS.min(self.switch.n_ports);
        if self.n_senders == 0 || self.n_senders > max {
            return err(format!("n_senders must be in 1..={max}, got {}", self.n_senders));
        }
        if self.egress_ports.is_none() && self.n_receivers == 0 {
            return err("n_receivers must be at least 1".into());
        }
        for (name, ports) in [("egress_ports", &self.egress_ports), ("ingress_ports", &self.ingress_ports)] {
            if let Some(v) = ports {
                if v.len() != self.n_senders as usize {
                    return err(format!("{name} lists {} ports for {} senders", v.len(), self.n_senders));
                }
                if let Some(p) = v.iter().find(|&&p| p >= self.switch.n_ports) {
                    return err(format!("{name}: port {p} does not exist"));
                }
            }
        }
        let mut ingress: Vec<_> = (0..self.n_senders as usize).map(|i| self.ingress_port(i)).collect();
        if ingress.iter().any(|&p| p >= self.switch.n_ports) {
            return err("sender ingress port out of range".into());
        }
        ingress.sort_unstable();
        ingress.dedup();
        if ingress.len() != self.n_senders as usize {
            return err("two senders share an ingress port".into());
        }
        if (0..self.n_senders as usize).any(|i| self.egress_port(i) >= self.switch.n_ports) {
            return err("egress port out of range".into());
        }
        if self.initial_window == 0 || self.flow_packets < self.initial_window {
            return err(format!(
                "need 1 <= initial_window ({}) <= flow_packets ({})",
                self.initial_window, self.flow_packets
            ));
        }
        if self.duration == SimTime::ZERO {
            return err("duration must be positive".into());
        }
        Ok(())
    }
}
