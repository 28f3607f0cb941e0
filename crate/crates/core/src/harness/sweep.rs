use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::policy::PolicyVariant;
use crate::sim::SimTime;
use crate::switch::SwitchVariant;

use super::metrics::{excess_of, MetricStore, TrimExcess};
use super::run::run_scenario;
use super::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// 1..=64 senders.
    NSenders,
    /// Pessimistic hold 0..=30 us in 1 us steps; total hold is four times that.
    ResponseDuration,
    /// FULL, PESSI_ONLY and TRIM_ALL policies.
    Variant,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_senders" => Ok(SweepAxis::NSenders),
            "response_duration" => Ok(SweepAxis::ResponseDuration),
            "variant" => Ok(SweepAxis::Variant),
            other => Err(Error::Config(format!(
                "unknown sweep axis {other:?} (expected n_senders, response_duration or variant)"
            ))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::NSenders => "n_senders",
            SweepAxis::ResponseDuration => "response_duration",
            SweepAxis::Variant => "variant",
        })
    }
}

/// One value along a sweep axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxisValue {
    Senders(u16),
    Duration(SimTime),
    Policy(PolicyVariant),
}

impl AxisValue {
    pub fn apply(self, base: &Scenario) -> Scenario {
        let mut s = base.clone();
        match self {
            AxisValue::Senders(n) => s.n_senders = n,
            AxisValue::Duration(d) => s.switch.policy = s.switch.policy.clone().with_response_duration(d),
            AxisValue::Policy(v) => s.switch.policy.variant = v,
        }
        s.name = format!("{}_{}", base.name, self);
        s
    }
}

impl fmt::Display for AxisValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisValue::Senders(n) => write!(f, "{n}"),
            AxisValue::Duration(d) => write!(f, "{}", d.as_ns()),
            AxisValue::Policy(v) => write!(f, "{v:?}"),
        }
    }
}

pub fn axis_values(axis: SweepAxis) -> Vec<AxisValue> {
    match axis {
        SweepAxis::NSenders => (1..=64).map(AxisValue::Senders).collect(),
        SweepAxis::ResponseDuration => (0..=30).map(|us| AxisValue::Duration(SimTime::from_us(us))).collect(),
        SweepAxis::Variant => [PolicyVariant::Full, PolicyVariant::PessiOnly, PolicyVariant::TrimAll]
            .into_iter()
            .map(AxisValue::Policy)
            .collect(),
    }
}

/// A run and the output-queued baseline of the same traffic.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub value: AxisValue,
    pub run: MetricStore,
    pub ideal: MetricStore,
}

impl SweepPoint {
    pub fn excess(&self) -> TrimExcess {
        excess_of(self.run.total_trims(), self.ideal.total_trims())
    }

    pub fn row(&self, axis: SweepAxis) -> SweepRow {
        let g = self.run.goodputs();
        let (excess_ratio, excess_abs) = match self.excess() {
            TrimExcess::Ratio(r) => (Some(r), None),
            TrimExcess::Absolute(a) => (None, Some(a)),
        };
        SweepRow {
            axis: axis.to_string(),
            value: self.value.to_string(),
            variant: self.run.variant.as_str().to_string(),
            n_senders: self.run.n_senders,
            goodput_mean_gbps: super::metrics::mean(&g),
            goodput_min_gbps: g.iter().copied().fold(f64::INFINITY, f64::min),
            goodput_max_gbps: g.iter().copied().fold(0.0, f64::max),
            ideal_goodput_mean_gbps: self.ideal.mean_goodput(),
            trims: self.run.total_trims(),
            ingress_trims: self.run.counters.ingress_trims,
            dod_trims: self.run.counters.dod_trims,
            ideal_trims: self.ideal.total_trims(),
            excess_trims: excess_ratio,
            excess_trims_absolute: excess_abs,
            max_dod_queue: self.run.max_dod_queue(),
            signals: self.run.counters.signals,
            dod_dropped: self.run.counters.dod_dropped,
            header_dropped: self.run.counters.header_dropped,
        }
    }
}

/// One line of `sweep.csv`.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub variant: String,
    pub n_senders: u16,
    pub goodput_mean_gbps: f64,
    pub goodput_min_gbps: f64,
    pub goodput_max_gbps: f64,
    pub ideal_goodput_mean_gbps: f64,
    pub trims: u64,
    pub ingress_trims: u64,
    pub dod_trims: u64,
    pub ideal_trims: u64,
    pub excess_trims: Option<f64>,
    pub excess_trims_absolute: Option<u64>,
    pub max_dod_queue: usize,
    pub signals: u64,
    pub dod_dropped: u64,
    pub header_dropped: u64,
}

/// Runs `base` at each value (in parallel), each paired with an ideal-switch
/// baseline. Results come back in axis order.
pub fn sweep_values(values: &[AxisValue], base: &Scenario) -> Result<Vec<SweepPoint>> {
    values
        .par_iter()
        .map(|&value| {
            let scenario = value.apply(base);
            let ideal = scenario.clone().with_variant(SwitchVariant::Ideal);
            let (run, ideal) = rayon::join(|| run_scenario(&scenario), || run_scenario(&ideal));
            Ok(SweepPoint { value, run: run?, ideal: ideal? })
        })
        .collect()
}

pub fn sweep(axis: SweepAxis, base: &Scenario) -> Result<Vec<SweepPoint>> {
    sweep_values(&axis_values(axis), base)
}
