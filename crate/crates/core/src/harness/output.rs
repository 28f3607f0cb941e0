use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::switch::{QueueKind, SwitchCounters};

use super::metrics::{FlowRecord, MetricStore};
use super::sweep::{SweepAxis, SweepPoint};

pub const COUNTERS_FILE: &str = "counters.json";
pub const HEADER_CDF_FILE: &str = "header_cdf.csv";
pub const FLOWS_FILE: &str = "flows.csv";
pub const MODES_FILE: &str = "modes.csv";
pub const QUEUES_FILE: &str = "queues.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

/// Counters plus run totals, as written to `counters.json`.
#[derive(Debug, Serialize, serde::Deserialize)]
pub struct CountersFile {
    #[serde(flatten)]
    pub counters: SwitchCounters,
    pub variant: String,
    pub n_senders: u16,
    pub sent: u64,
    pub delivered_full: u64,
    pub delivered_header: u64,
    pub duplicates: u64,
    pub mean_goodput_gbps: f64,
}

/// Writes every per-run output file into `dir`, creating it if needed.
pub fn write_run(store: &MetricStore, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let path = dir.join(COUNTERS_FILE);
    let counters = CountersFile {
        counters: store.counters.clone(),
        variant: store.variant.as_str().into(),
        n_senders: store.n_senders,
        sent: store.sent,
        delivered_full: store.delivered_full,
        delivered_header: store.delivered_header,
        duplicates: store.duplicates,
        mean_goodput_gbps: store.mean_goodput(),
    };
    let text = serde_json::to_string_pretty(&counters).map_err(|e| Error::Json { path: path.clone(), source: e })?;
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    written.push(path);

    let path = dir.join(HEADER_CDF_FILE);
    let mut w = csv_writer(&path)?;
    w.write_record(["time_ns", "fraction"])?;
    for (t, f) in store.header_cdf() {
        w.write_record([t.as_ns().to_string(), f.to_string()])?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    let path = dir.join(FLOWS_FILE);
    let mut w = csv_writer(&path)?;
    if store.flows.is_empty() {
        w.write_record(["flow_id", "bytes", "start_ns", "end_ns", "goodput_gbps", "rtx_count"])?;
    }
    for f in &store.flows {
        w.serialize(f)?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    let path = dir.join(MODES_FILE);
    let mut w = csv_writer(&path)?;
    w.write_record(["time_ns", "pipe", "port", "mode"])?;
    for r in &store.modes {
        w.write_record([r.time.as_ns().to_string(), r.pipe.to_string(), r.port.to_string(), r.mode.as_str().into()])?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    let path = dir.join(QUEUES_FILE);
    let mut w = csv_writer(&path)?;
    w.write_record(["time_ns", "queue", "index", "len"])?;
    for q in &store.queues {
        let kind = match q.kind {
            QueueKind::Data => "data",
            QueueKind::Dod => "dod",
        };
        w.write_record([q.time.as_ns().to_string(), kind.into(), q.index.to_string(), q.len.to_string()])?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    if !store.trace.is_empty() {
        let path = dir.join(TRACE_FILE);
        let mut w = csv_writer(&path)?;
        w.write_record(["time_ns", "flow_id", "seqno", "kind", "trim_origin", "egress_port"])?;
        for r in &store.trace {
            w.write_record([
                r.time.as_ns().to_string(),
                r.flow_id.to_string(),
                r.seqno.to_string(),
                r.kind.as_str().into(),
                r.trim_origin.as_str().into(),
                r.egress_port.to_string(),
            ])?;
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_sweep(axis: SweepAxis, points: &[SweepPoint], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(SWEEP_FILE);
    let mut w = csv_writer(&path)?;
    for p in points {
        w.serialize(p.row(axis))?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(path)
}

pub fn read_counters(dir: &Path) -> Result<CountersFile> {
    let path = dir.join(COUNTERS_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| Error::Json { path, source: e })
}

pub fn read_flows(dir: &Path) -> Result<Vec<FlowRecord>> {
    let path = dir.join(FLOWS_FILE);
    let file = fs::File::open(&path).map_err(io_err(&path))?;
    csv::Reader::from_reader(file).deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Side-by-side summary of two run directories.
pub fn compare(a: &Path, b: &Path) -> Result<String> {
    let (ca, cb) = (read_counters(a)?, read_counters(b)?);
    let rows: Vec<(&str, f64, f64)> = vec![
        ("mean_goodput_gbps", ca.mean_goodput_gbps, cb.mean_goodput_gbps),
        ("trims", ca.counters.total_trims() as f64, cb.counters.total_trims() as f64),
        ("ingress_trims", ca.counters.ingress_trims as f64, cb.counters.ingress_trims as f64),
        ("dod_trims", ca.counters.dod_trims as f64, cb.counters.dod_trims as f64),
        ("ideal_trims", ca.counters.ideal_trims as f64, cb.counters.ideal_trims as f64),
        ("mod_trims", ca.counters.mod_trims as f64, cb.counters.mod_trims as f64),
        ("dod_dropped", ca.counters.dod_dropped as f64, cb.counters.dod_dropped as f64),
        ("header_dropped", ca.counters.header_dropped as f64, cb.counters.header_dropped as f64),
        ("signals", ca.counters.signals as f64, cb.counters.signals as f64),
        (
            "max_dod_queue",
            ca.counters.max_dod_queue.iter().copied().max().unwrap_or(0) as f64,
            cb.counters.max_dod_queue.iter().copied().max().unwrap_or(0) as f64,
        ),
    ];
    let mut out = format!("{:<20} {:>14} {:>14} {:>10}\n", "metric", ca.variant, cb.variant, "b/a");
    for (name, x, y) in rows {
        let ratio = if x == 0.0 { "-".to_string() } else { format!("{:.3}", y / x) };
        out += &format!("{name:<20} {x:>14.3} {y:>14.3} {ratio:>10}\n");
    }
    Ok(out)
}
