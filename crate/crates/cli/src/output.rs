//! Result files. CSV time series have the fixed header
//! `t,W_t,phi,gevrey_norm_U,l2_norm_U,gevrey_norm_V`; every JSON-lines record
//! carries `schema_version`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use hydrostat::dynamics::{RunRecord, Sample};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Row {
    t: f64,
    #[serde(rename = "W_t")]
    w_t: f64,
    phi: f64,
    #[serde(rename = "gevrey_norm_U")]
    gevrey_norm_u: f64,
    #[serde(rename = "l2_norm_U")]
    l2_norm_u: f64,
    /// Empty when `V` cannot be recovered.
    #[serde(rename = "gevrey_norm_V")]
    gevrey_norm_v: Option<f64>,
}

impl From<&Sample> for Row {
    fn from(s: &Sample) -> Self {
        Row {
            t: s.t,
            w_t: s.w,
            phi: s.phi,
            gevrey_norm_u: s.gevrey_u,
            l2_norm_u: s.l2_u,
            gevrey_norm_v: s.gevrey_v,
        }
    }
}

pub fn write_series(path: &Path, record: &RunRecord) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    for s in &record.samples {
        w.serialize(Row::from(s))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct RunSummary<'a> {
    pub schema_version: u32,
    pub name: &'a str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<u64>,
    pub status: &'static str,
    pub t_final: f64,
    pub max_gevrey_norm: f64,
    pub goodset: bool,
    pub backend: &'static str,
    /// Largest relative deviation of the L2 norm from its initial value.
    pub l2_drift: f64,
}

impl<'a> RunSummary<'a> {
    pub fn new(name: &'a str, seed: u64, path: Option<u64>, r: &RunRecord) -> Self {
        let e0 = r.initial().l2_u;
        let l2_drift = if e0 > 0.0 {
            r.samples
                .iter()
                .map(|s| (s.l2_u - e0).abs() / e0)
                .fold(0.0, f64::max)
        } else {
            0.0
        };
        RunSummary {
            schema_version: SCHEMA_VERSION,
            name,
            seed,
            path,
            status: r.status.as_str(),
            t_final: r.t_final,
            max_gevrey_norm: r.max_gevrey_norm(),
            goodset: r.goodset,
            backend: r.backend,
            l2_drift,
        }
    }
}

/// Writes one JSON object per line, replacing the file.
pub fn write_json_lines<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn json_line<T: Serialize>(record: &T) -> Result<String> {
    Ok(serde_json::to_string(record)?)
}
