//! CSV and JSON serialization.
//!
//! CSV files are comma separated, `.` decimal point, LF line endings, UTF-8,
//! with a one-line header. Floats are written with Rust's shortest
//! round-trip formatting, so export-then-import is lossless. Data files
//! carry no timestamps; run metadata lives in the JSON summary.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use memvdp_core::circuit::{CircuitEvent, CircuitTrace};
use memvdp_core::dynamics::{Trace, TraceSample};
use memvdp_core::memristor::IvPoint;
use memvdp_core::sweep::{CouplingSetting, SweepResult};

use crate::error::CliError;

pub const MODEL_TRACE_HEADER: &str = "t,x1,v1,x2,v2,m";
pub const CIRCUIT_TRACE_HEADER: &str = "t,v_c1,v_c2,v_g1,v_g2,r_mem";
pub const SWEEP_HEADER: &str = "coupling,swept_value,f1,f2,delta_f_norm,F1,F2,delta_F_norm,locked";
pub const IV_HEADER: &str = "v,i,event";

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}

pub fn write_model_trace(trace: &Trace, path: &Path) -> Result<(), CliError> {
    let mut out = String::with_capacity(64 * (trace.samples.len() + 1));
    out.push_str(MODEL_TRACE_HEADER);
    out.push('\n');
    for s in &trace.samples {
        let _ = writeln!(out, "{},{},{},{},{},{}", s.t, s.x1, s.v1, s.x2, s.v2, s.m);
    }
    write_file(path, &out)
}

pub fn read_model_trace(path: &Path) -> Result<Trace, CliError> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != MODEL_TRACE_HEADER {
        return Err(CliError::Parse(format!(
            "{}: expected header {MODEL_TRACE_HEADER:?}, got {header:?}",
            path.display()
        )));
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields = parse_floats(line, 6)
            .map_err(|e| CliError::Parse(format!("{}:{}: {e}", path.display(), i + 2)))?;
        samples.push(TraceSample {
            t: fields[0],
            x1: fields[1],
            v1: fields[2],
            x2: fields[3],
            v2: fields[4],
            m: fields[5],
        });
    }
    let dt_record = if samples.len() >= 2 {
        samples[1].t - samples[0].t
    } else {
        0.0
    };
    Ok(Trace { dt_record, samples })
}

fn parse_floats(line: &str, n: usize) -> Result<Vec<f64>, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != n {
        return Err(format!("expected {n} fields, got {}", fields.len()));
    }
    fields
        .iter()
        .map(|f| f.parse::<f64>().map_err(|e| format!("{f:?}: {e}")))
        .collect()
}

pub fn write_circuit_trace(trace: &CircuitTrace, path: &Path) -> Result<(), CliError> {
    let mut out = String::with_capacity(64 * (trace.samples.len() + 1));
    out.push_str(CIRCUIT_TRACE_HEADER);
    out.push('\n');
    for s in &trace.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.t, s.v_c1, s.v_c2, s.v_g1, s.v_g2, s.r_mem
        );
    }
    write_file(path, &out)
}

fn coupling_value(c: &CouplingSetting) -> f64 {
    match c {
        CouplingSetting::ModelM(m) => *m,
        CouplingSetting::CircuitRk1 { r_k1, .. } => *r_k1,
    }
}

pub fn write_sweep(result: &SweepResult, path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for curve in &result.curves {
        let cv = coupling_value(&curve.coupling);
        for r in &curve.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                cv,
                r.swept_value,
                r.f1_uncoupled,
                r.f2_uncoupled,
                r.delta_f_norm,
                r.f1_coupled,
                r.f2_coupled,
                r.delta_cap_f_norm,
                r.locked
            );
        }
    }
    write_file(path, &out)
}

/// Flat sweep row as re-imported from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCsvRow {
    pub coupling: f64,
    pub swept_value: f64,
    pub f1: f64,
    pub f2: f64,
    pub delta_f_norm: f64,
    pub f1_coupled: f64,
    pub f2_coupled: f64,
    pub delta_cap_f_norm: f64,
    pub locked: bool,
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepCsvRow>, CliError> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != SWEEP_HEADER {
        return Err(CliError::Parse(format!(
            "{}: expected header {SWEEP_HEADER:?}, got {header:?}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(CliError::Parse(format!(
                "{}:{}: expected 9 fields, got {}",
                path.display(),
                i + 2,
                fields.len()
            )));
        }
        let nums = fields[..8]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Parse(format!("{}:{}: {e}", path.display(), i + 2)))?;
        let locked = fields[8]
            .parse::<bool>()
            .map_err(|e| CliError::Parse(format!("{}:{}: {e}", path.display(), i + 2)))?;
        rows.push(SweepCsvRow {
            coupling: nums[0],
            swept_value: nums[1],
            f1: nums[2],
            f2: nums[3],
            delta_f_norm: nums[4],
            f1_coupled: nums[5],
            f2_coupled: nums[6],
            delta_cap_f_norm: nums[7],
            locked,
        });
    }
    Ok(rows)
}

pub fn write_iv(points: &[IvPoint], path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(IV_HEADER);
    out.push('\n');
    for p in points {
        let ev = match p.event {
            Some(memvdp_core::memristor::SwitchEvent::Set { .. }) => "set",
            Some(memvdp_core::memristor::SwitchEvent::Reset) => "reset",
            None => "",
        };
        let _ = writeln!(out, "{},{},{}", p.v, p.i, ev);
    }
    write_file(path, &out)
}

/// Serializable circuit event for the JSON summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: String,
    pub osc: Option<u8>,
    pub t: f64,
}

impl From<&CircuitEvent> for EventRecord {
    fn from(e: &CircuitEvent) -> Self {
        match *e {
            CircuitEvent::Fire { osc, t } => EventRecord {
                kind: "fire".into(),
                osc: Some(osc),
                t,
            },
            CircuitEvent::Set { t } => EventRecord {
                kind: "set".into(),
                osc: None,
                t,
            },
            CircuitEvent::Reset { t } => EventRecord {
                kind: "reset".into(),
                osc: None,
                t,
            },
        }
    }
}

/// Lock report fields for the JSON summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LockSummary {
    pub window: [f64; 2],
    pub f1: f64,
    pub f2: f64,
    pub delta_f_rel: f64,
    pub phase_range: f64,
    pub locked: bool,
}

impl LockSummary {
    pub fn from_report(window: [f64; 2], r: &memvdp_core::analysis::LockReport) -> Self {
        Self {
            window,
            f1: r.f1,
            f2: r.f2,
            delta_f_rel: r.delta_f_rel,
            phase_range: r.phase_range,
            locked: r.locked,
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serializing {}: {e}", path.display())))?;
    write_file(path, &text)
}
