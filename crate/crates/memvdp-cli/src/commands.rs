//! Subcommand implementations.

use std::path::{Path, PathBuf};

use serde::Serialize;

use memvdp_core::analysis::{self, SpikeTrain};
use memvdp_core::circuit::{self, CircuitTrace};
use memvdp_core::dynamics::{self, SimOptions, Trace};
use memvdp_core::memristor::{self, ResState};
use memvdp_core::sweep as sweep_engine;

use crate::config::{self, ExperimentConfig, ExperimentKind};
use crate::error::CliError;
use crate::export::{self, EventRecord, LockSummary};
use crate::{CommonArgs, OutputFormat};

fn prepare(args: &CommonArgs, kind: ExperimentKind) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let cfg = match &args.config {
        Some(path) => config::load_config(path)?,
        None => ExperimentConfig {
            schema_version: config::SCHEMA_VERSION,
            kind,
            model: Default::default(),
            circuit: Default::default(),
            device: Default::default(),
            sweep: Default::default(),
            analysis: Default::default(),
        },
    };
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", args.out.display())))?;
    let resolved = config::resolved_toml(&cfg);
    std::fs::write(args.out.join("resolved_config.toml"), &resolved)
        .map_err(|e| CliError::Io(format!("writing resolved config: {e}")))?;
    if args.verbose {
        eprintln!("resolved configuration:\n{resolved}");
    }
    Ok((cfg, args.out.clone()))
}

fn write_spikes(train: &SpikeTrain, path: &Path) -> Result<(), CliError> {
    let mut out = String::from("t\n");
    for t in &train.times {
        out.push_str(&format!("{t}\n"));
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn write_cycle(points: &[(f64, f64)], path: &Path) -> Result<(), CliError> {
    let mut out = String::from("a,b\n");
    for (a, b) in points {
        out.push_str(&format!("{a},{b}\n"));
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct ModelSummary {
    config: ExperimentConfig,
    spike_counts: [usize; 2],
    pre_switch: Option<LockSummary>,
    post_switch: Option<LockSummary>,
    pre_cycle_closure: Option<f64>,
    post_cycle_closure: Option<f64>,
    trace_file: String,
}

/// Which cycle of a window to highlight in the phase-plane export.
enum CyclePick {
    /// Most open cycle; before the switch at least one cycle fails to close.
    MostOpen,
    /// Most closed cycle; after the switch the loop is hysteretic and closed.
    MostClosed,
}

/// One highlighted cycle of the reference channel inside [t0, t1], as
/// (x1, x2) points, with its closure ratio.
fn cycle_points(
    trace: &Trace,
    train: &SpikeTrain,
    t0: f64,
    t1: f64,
    pick: CyclePick,
) -> Option<(Vec<(f64, f64)>, f64)> {
    let w = train.window(t0, t1);
    let times: Vec<f64> = trace.samples.iter().map(|s| s.t).collect();
    let cycles = analysis::cycle_segment(&times, &w).ok()?;
    cycles
        .iter()
        .map(|cycle| {
            let pts: Vec<(f64, f64)> = trace.samples[cycle.start..cycle.end]
                .iter()
                .map(|s| (s.x1, s.x2))
                .collect();
            let closure = analysis::cycle_closure_ratio(&pts);
            (pts, closure)
        })
        .reduce(|best, cand| {
            let better = match pick {
                CyclePick::MostOpen => cand.1 > best.1,
                CyclePick::MostClosed => cand.1 < best.1,
            };
            if better { cand } else { best }
        })
}

pub fn simulate_model(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, out) = prepare(args, ExperimentKind::ModelSim)?;
    let params = cfg.model.params()?;
    let schedule = cfg.model.schedule()?;
    let opts = SimOptions::new(cfg.model.t_end)
        .with_dt(cfg.model.dt)
        .with_stride(cfg.model.record_stride);
    let trace = dynamics::simulate(&params, schedule.into(), cfg.model.init_state(), &opts)?;

    let trace_file = match args.format {
        OutputFormat::Csv => {
            export::write_model_trace(&trace, &out.join("trace.csv"))?;
            "trace.csv"
        }
        OutputFormat::Json => {
            let rows: Vec<[f64; 6]> = trace
                .samples
                .iter()
                .map(|s| [s.t, s.x1, s.v1, s.x2, s.v2, s.m])
                .collect();
            export::write_json(&rows, &out.join("trace.json"))?;
            "trace.json"
        }
    };

    let ana = &cfg.analysis;
    let (s1, s2) =
        sweep_engine::trains_from_trace(&trace, ana.model_spike_threshold, ana.model_refractory);
    write_spikes(&s1, &out.join("spikes1.csv"))?;
    write_spikes(&s2, &out.join("spikes2.csv"))?;

    let t_s = cfg.model.t_s;
    let t_end = cfg.model.t_end;
    let tf = ana.transient_fraction;
    let pre_window = [tf * t_s, t_s];
    let post_window = [t_s + tf * (t_end - t_s), t_end];
    let lock = |w: [f64; 2]| {
        analysis::is_locked(&s1, &s2, w[0], w[1], ana.freq_tol, ana.phase_tol)
            .ok()
            .map(|r| LockSummary::from_report(w, &r))
    };
    let pre_switch = lock(pre_window);
    let post_switch = lock(post_window);

    let pre_cycle = cycle_points(&trace, &s1, pre_window[0], pre_window[1], CyclePick::MostOpen);
    let post_cycle =
        cycle_points(&trace, &s1, post_window[0], post_window[1], CyclePick::MostClosed);
    if let Some((pts, _)) = &pre_cycle {
        write_cycle(pts, &out.join("cycle_pre.csv"))?;
    }
    if let Some((pts, _)) = &post_cycle {
        write_cycle(pts, &out.join("cycle_post.csv"))?;
    }

    let summary = ModelSummary {
        spike_counts: [s1.len(), s2.len()],
        pre_switch,
        post_switch,
        pre_cycle_closure: pre_cycle.map(|(_, c)| c),
        post_cycle_closure: post_cycle.map(|(_, c)| c),
        trace_file: trace_file.into(),
        config: cfg,
    };
    export::write_json(&summary, &out.join("summary.json"))
}

#[derive(Debug, Serialize)]
struct CircuitSummary {
    config: ExperimentConfig,
    cutoff_hz_hrs: f64,
    cutoff_hz_lrs: f64,
    set_time: Option<f64>,
    fire_counts: [usize; 2],
    pre_set: Option<LockSummary>,
    post_set: Option<LockSummary>,
    pre_set_pulse_amplitude: Option<f64>,
    post_set_pulse_amplitude: Option<f64>,
    events: Vec<EventRecord>,
    trace_file: String,
}

/// Peak deviation of the differential gate voltage from its rest baseline
/// inside [t0, t1].
fn pulse_amplitude(trace: &CircuitTrace, baseline: f64, t0: f64, t1: f64) -> Option<f64> {
    let amp = trace
        .samples
        .iter()
        .filter(|s| s.t >= t0 && s.t < t1)
        .map(|s| ((s.v_g1 - s.v_g2) - baseline).abs())
        .fold(f64::NEG_INFINITY, f64::max);
    amp.is_finite().then_some(amp)
}

pub fn simulate_circuit(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, out) = prepare(args, ExperimentKind::CircuitSim)?;
    let circuit_cfg = cfg.circuit.circuit_config(&cfg.device)?;
    let trace = circuit::simulate_circuit(
        &circuit_cfg,
        cfg.circuit.t_end,
        cfg.circuit.dt,
        cfg.circuit.record_stride,
    )?;

    let trace_file = match args.format {
        OutputFormat::Csv => {
            export::write_circuit_trace(&trace, &out.join("circuit_trace.csv"))?;
            "circuit_trace.csv"
        }
        OutputFormat::Json => {
            let rows: Vec<[f64; 6]> = trace
                .samples
                .iter()
                .map(|s| [s.t, s.v_c1, s.v_c2, s.v_g1, s.v_g2, s.r_mem])
                .collect();
            export::write_json(&rows, &out.join("circuit_trace.json"))?;
            "circuit_trace.json"
        }
    };

    // Fire events are the exact spike times.
    let s1 = SpikeTrain::new(trace.fire_times(1));
    let s2 = SpikeTrain::new(trace.fire_times(2));
    write_spikes(&s1, &out.join("spikes1.csv"))?;
    write_spikes(&s2, &out.join("spikes2.csv"))?;

    let ana = &cfg.analysis;
    let t_end = cfg.circuit.t_end;
    let set_time = trace.first_set_time();
    let lock = |w: [f64; 2]| {
        analysis::is_locked(&s1, &s2, w[0], w[1], ana.freq_tol, ana.phase_tol)
            .ok()
            .map(|r| LockSummary::from_report(w, &r))
    };
    let (pre_set, post_set) = match set_time {
        Some(ts) => (
            lock([0.0, ts]),
            lock([ts + ana.transient_fraction * (t_end - ts), t_end]),
        ),
        None => (lock([ana.transient_fraction * t_end, t_end]), None),
    };

    let baseline = circuit_cfg.v_offset1() - circuit_cfg.v_offset2();
    let (pre_amp, post_amp) = match set_time {
        Some(ts) => (
            pulse_amplitude(&trace, baseline, 0.0, ts),
            pulse_amplitude(
                &trace,
                baseline,
                ts + ana.transient_fraction * (t_end - ts),
                t_end,
            ),
        ),
        None => (pulse_amplitude(&trace, baseline, 0.0, t_end), None),
    };

    let branch_hrs = circuit_cfg.r_k1 + circuit_cfg.memristor.r_hrs;
    let branch_lrs = circuit_cfg.r_k1 + circuit_cfg.memristor.k_lrs / circuit_cfg.memristor.i_cc;
    let m_hrs = circuit_cfg.r_k2 * branch_hrs / (circuit_cfg.r_k2 + branch_hrs);
    let m_lrs = circuit_cfg.r_k2 * branch_lrs / (circuit_cfg.r_k2 + branch_lrs);

    let summary = CircuitSummary {
        cutoff_hz_hrs: circuit::cutoff_frequency(m_hrs, circuit_cfg.c_k1, circuit_cfg.c_k2),
        cutoff_hz_lrs: circuit::cutoff_frequency(m_lrs, circuit_cfg.c_k1, circuit_cfg.c_k2),
        set_time,
        fire_counts: [s1.len(), s2.len()],
        pre_set,
        post_set,
        pre_set_pulse_amplitude: pre_amp,
        post_set_pulse_amplitude: post_amp,
        events: trace.events.iter().map(EventRecord::from).collect(),
        trace_file: trace_file.into(),
        config: cfg,
    };
    export::write_json(&summary, &out.join("summary.json"))
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    config: ExperimentConfig,
    f0: f64,
    locking_ranges: Vec<Option<[f64; 3]>>,
    table_file: String,
}

pub fn sweep(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, out) = prepare(args, ExperimentKind::DetuningSweep)?;
    let spec = cfg
        .sweep
        .spec(&cfg.model, &cfg.circuit, &cfg.device, &cfg.analysis)?;
    if args.verbose {
        eprintln!(
            "running sweep: {} points x {} couplings",
            spec.sweep_points,
            spec.couplings.len()
        );
    }
    let result = sweep_engine::run_sweep(&spec)?;
    export::write_sweep(&result, &out.join("sweep.csv"))?;

    let locking_ranges = (0..result.curves.len())
        .map(|i| {
            sweep_engine::locking_range(&result, i).map(|r| [r.min, r.max, r.asymmetry])
        })
        .collect();
    let summary = SweepSummary {
        f0: result.f0,
        locking_ranges,
        table_file: "sweep.csv".into(),
        config: cfg,
    };
    export::write_json(&summary, &out.join("summary.json"))
}

#[derive(Debug, Serialize)]
struct IvSummary {
    config: ExperimentConfig,
    set_events: usize,
    reset_events: usize,
    final_state: String,
    final_resistance: f64,
    table_file: String,
}

pub fn iv_sweep(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, out) = prepare(args, ExperimentKind::IvSweep)?;
    let mut device = cfg.device.device()?;
    let waveform = memristor::triangular_waveform(
        cfg.device.sweep_v_peak,
        cfg.device.sweep_steps,
        cfg.device.sweep_dt,
    );
    let points = device.iv_sweep(&waveform);
    export::write_iv(&points, &out.join("iv.csv"))?;
    let summary = IvSummary {
        set_events: points
            .iter()
            .filter(|p| matches!(p.event, Some(memristor::SwitchEvent::Set { .. })))
            .count(),
        reset_events: points
            .iter()
            .filter(|p| matches!(p.event, Some(memristor::SwitchEvent::Reset)))
            .count(),
        final_state: match device.state {
            ResState::Hrs => "hrs".into(),
            ResState::Lrs => "lrs".into(),
        },
        final_resistance: device.device_resistance(),
        table_file: "iv.csv".into(),
        config: cfg,
    };
    export::write_json(&summary, &out.join("summary.json"))
}

#[derive(Debug, Serialize)]
struct AnalyzeSummary {
    config: ExperimentConfig,
    trace_kind: String,
    spike_counts: [usize; 2],
    report: Option<LockSummary>,
}

pub fn analyze(trace_path: &Path, args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, out) = prepare(args, ExperimentKind::ModelSim)?;
    let text = std::fs::read_to_string(trace_path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", trace_path.display())))?;
    let header = text.lines().next().unwrap_or_default().to_owned();
    let ana = &cfg.analysis;

    let (kind, s1, s2, t_end) = if header == export::MODEL_TRACE_HEADER {
        let trace = export::read_model_trace(trace_path)?;
        let (s1, s2) = sweep_engine::trains_from_trace(
            &trace,
            ana.model_spike_threshold,
            ana.model_refractory,
        );
        let t_end = trace.samples.last().map(|s| s.t).unwrap_or(0.0);
        ("model", s1, s2, t_end)
    } else if header == export::CIRCUIT_TRACE_HEADER {
        // Anode sawtooth crossings carry the cycle timing.
        let mut rows = Vec::new();
        for (i, line) in text.lines().skip(1).enumerate() {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| {
                    CliError::Parse(format!("{}:{}: {e}", trace_path.display(), i + 2))
                })?;
            if fields.len() != 6 {
                return Err(CliError::Parse(format!(
                    "{}:{}: expected 6 fields",
                    trace_path.display(),
                    i + 2
                )));
            }
            rows.push((fields[0], fields[1], fields[2]));
        }
        let s1 = analysis::detect_spikes(
            rows.iter().map(|r| (r.0, r.1)),
            ana.circuit_spike_threshold,
            ana.circuit_refractory,
        );
        let s2 = analysis::detect_spikes(
            rows.iter().map(|r| (r.0, r.2)),
            ana.circuit_spike_threshold,
            ana.circuit_refractory,
        );
        let t_end = rows.last().map(|r| r.0).unwrap_or(0.0);
        ("circuit", s1, s2, t_end)
    } else {
        return Err(CliError::Parse(format!(
            "{}: unrecognized trace header {header:?}",
            trace_path.display()
        )));
    };

    let report = analysis::is_locked(&s1, &s2, 0.0, t_end, ana.freq_tol, ana.phase_tol)
        .ok()
        .map(|r| LockSummary::from_report([0.0, t_end], &r));
    let summary = AnalyzeSummary {
        trace_kind: kind.into(),
        spike_counts: [s1.len(), s2.len()],
        report,
        config: cfg,
    };
    export::write_json(&summary, &out.join("summary.json"))
}
