//! Detuning sweeps: vary one oscillator's uncoupled frequency across a range
//! at several fixed coupling strengths, measure the coupled mismatch against
//! the uncoupled mismatch, and extract locking-region widths.

use alloc::vec::Vec;

use crate::analysis::{self, SpikeTrain};
use crate::circuit::{self, CircuitConfig};
use crate::dynamics::{
    CouplingSchedule, OscPairState, SimOptions, Trace, VdpParams,
};
use crate::error::SimError;
use crate::memristor::ResState;

/// Fraction of the analysis window discarded as transient after any change
/// in coupling conditions.
pub const TRANSIENT_FRACTION: f64 = 0.2;

/// What a sweep varies and simulates.
#[derive(Debug, Clone)]
pub enum SweepMode {
    /// Dimensionless model: sweep oscillator 2's `alpha2` over a range and
    /// apply each constant coupling `m`.
    Model {
        params: VdpParams,
        alpha2_range: (f64, f64),
        t_end: f64,
        dt: f64,
        spike_threshold: f64,
        refractory: f64,
    },
    /// Circuit: sweep oscillator 2's anode resistor `r2` over a range; each
    /// "coupling" is a series resistor value with the memristor forced to a
    /// resistance state. Uncoupled reference runs use a disconnected network.
    Circuit {
        config: CircuitConfig,
        r2_range: (f64, f64),
        t_end: f64,
        dt: f64,
    },
}

/// Coupling settings applied per curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingSetting {
    /// Constant model coupling strength m.
    ModelM(f64),
    /// Circuit series resistor r_k1 with the device pinned to a state.
    CircuitRk1 { r_k1: f64, state: ResState },
}

/// Full sweep specification.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub sweep_points: usize,
    pub couplings: Vec<CouplingSetting>,
    pub freq_tol: f64,
    pub phase_tol: f64,
}

impl SweepSpec {
    /// Reference model sweep: alpha2 in [2, 8], 41 points, couplings as given.
    pub fn model_reference(couplings: &[f64]) -> Self {
        SweepSpec {
            mode: SweepMode::Model {
                params: VdpParams::reference(),
                alpha2_range: (2.0, 8.0),
                t_end: 6000.0,
                dt: 2e-3,
                spike_threshold: 0.0,
                refractory: 5.0,
            },
            sweep_points: 41,
            couplings: couplings.iter().map(|&m| CouplingSetting::ModelM(m)).collect(),
            freq_tol: analysis::DEFAULT_FREQ_TOL,
            phase_tol: analysis::DEFAULT_PHASE_TOL,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.sweep_points < 2 {
            return Err(SimError::InvalidParameter {
                name: "sweep_points",
                value: self.sweep_points as f64,
            });
        }
        if self.couplings.is_empty() {
            return Err(SimError::InvalidParameter {
                name: "couplings",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// One measured sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub swept_value: f64,
    pub f1_uncoupled: f64,
    pub f2_uncoupled: f64,
    pub delta_f_norm: f64,
    pub f1_coupled: f64,
    pub f2_coupled: f64,
    pub delta_cap_f_norm: f64,
    pub locked: bool,
    /// Set when simulation or analysis failed at this point; the numeric
    /// fields are NaN in that case.
    pub failed: bool,
}

/// One curve: all sweep points under a single coupling setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub coupling: CouplingSetting,
    pub rows: Vec<SweepRow>,
}

/// Complete sweep result, one curve per coupling setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub f0: f64,
    pub curves: Vec<SweepCurve>,
}

/// Measured frequencies of both oscillators with coupling removed.
pub fn measure_uncoupled(mode: &SweepMode, swept_value: f64) -> Result<(f64, f64), SimError> {
    match mode {
        SweepMode::Model {
            params,
            t_end,
            dt,
            spike_threshold,
            refractory,
            ..
        } => {
            let p = VdpParams {
                alpha2: swept_value,
                ..*params
            };
            let (s1, s2) = model_trains(&p, 0.0, *t_end, *dt, *spike_threshold, *refractory)?;
            let (w0, w1) = analysis_window(*t_end);
            Ok((
                analysis::estimate_frequency(&s1, w0, w1)?,
                analysis::estimate_frequency(&s2, w0, w1)?,
            ))
        }
        SweepMode::Circuit {
            config,
            t_end,
            dt,
            ..
        } => {
            let mut cfg = config.clone();
            cfg.r2 = swept_value;
            cfg.coupling_connected = false;
            let trace = circuit::simulate_circuit(&cfg, *t_end, *dt, 1)?;
            let (s1, s2) = circuit_trains(&cfg, &trace);
            let (w0, w1) = analysis_window(*t_end);
            Ok((
                analysis::estimate_frequency(&s1, w0, w1)?,
                analysis::estimate_frequency(&s2, w0, w1)?,
            ))
        }
    }
}

fn analysis_window(t_end: f64) -> (f64, f64) {
    (TRANSIENT_FRACTION * t_end, t_end)
}

fn model_trains(
    params: &VdpParams,
    m: f64,
    t_end: f64,
    dt: f64,
    threshold: f64,
    refractory: f64,
) -> Result<(SpikeTrain, SpikeTrain), SimError> {
    let opts = SimOptions::new(t_end).with_dt(dt);
    let trace = crate::dynamics::simulate(
        params,
        CouplingSchedule::constant(m).into(),
        OscPairState::default_init(),
        &opts,
    )?;
    Ok(trains_from_trace(&trace, threshold, refractory))
}

/// Spike trains of both model channels.
pub fn trains_from_trace(trace: &Trace, threshold: f64, refractory: f64) -> (SpikeTrain, SpikeTrain) {
    let s1 = analysis::detect_spikes(trace.channel(0), threshold, refractory);
    let s2 = analysis::detect_spikes(trace.channel(1), threshold, refractory);
    (s1, s2)
}

fn circuit_trains(
    cfg: &CircuitConfig,
    trace: &circuit::CircuitTrace,
) -> (SpikeTrain, SpikeTrain) {
    // Gate pulses are downward; detect on the inverted pulse depth.
    let thr = 1.0;
    let refractory = 2e-4;
    let s1 = analysis::detect_spikes(
        trace
            .samples
            .iter()
            .map(|s| (s.t, cfg.v_offset1() - s.v_g1)),
        thr,
        refractory,
    );
    let s2 = analysis::detect_spikes(
        trace
            .samples
            .iter()
            .map(|s| (s.t, cfg.v_offset2() - s.v_g2)),
        thr,
        refractory,
    );
    (s1, s2)
}

fn coupled_trains(
    mode: &SweepMode,
    coupling: CouplingSetting,
    swept_value: f64,
) -> Result<(SpikeTrain, SpikeTrain, f64), SimError> {
    match (mode, coupling) {
        (
            SweepMode::Model {
                params,
                t_end,
                dt,
                spike_threshold,
                refractory,
                ..
            },
            CouplingSetting::ModelM(m),
        ) => {
            let p = VdpParams {
                alpha2: swept_value,
                ..*params
            };
            let (s1, s2) = model_trains(&p, m, *t_end, *dt, *spike_threshold, *refractory)?;
            Ok((s1, s2, *t_end))
        }
        (
            SweepMode::Circuit {
                config,
                t_end,
                dt,
                ..
            },
            CouplingSetting::CircuitRk1 { r_k1, state },
        ) => {
            let mut cfg = config.clone();
            cfg.r2 = swept_value;
            cfg.r_k1 = r_k1;
            cfg.initial_memristor_state = state;
            // Freeze the device so the sweep measures the steady coupled
            // regime of that resistance state.
            cfg.memristor_switching_enabled = false;
            let trace = circuit::simulate_circuit(&cfg, *t_end, *dt, 1)?;
            let (s1, s2) = circuit_trains(&cfg, &trace);
            Ok((s1, s2, *t_end))
        }
        _ => Err(SimError::InvalidParameter {
            name: "coupling",
            value: f64::NAN,
        }),
    }
}

/// Run the full sweep. Deterministic: every point restarts from the fixed
/// default initial conditions. Per-point failures are recorded as failed rows
/// and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SimError> {
    spec.validate()?;
    let (lo, hi) = match &spec.mode {
        SweepMode::Model { alpha2_range, .. } => *alpha2_range,
        SweepMode::Circuit { r2_range, .. } => *r2_range,
    };
    let n = spec.sweep_points;
    let values: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();

    // Uncoupled frequencies are independent of the coupling setting, so
    // measure them once per sweep point.
    let uncoupled: Vec<Result<(f64, f64), SimError>> = values
        .iter()
        .map(|&sv| measure_uncoupled(&spec.mode, sv))
        .collect();

    // f0: oscillator 1's uncoupled frequency at the first sweep point
    // (oscillator 1 is held fixed, so any point serves).
    let f0 = uncoupled[0].clone()?.0;

    let mut curves = Vec::with_capacity(spec.couplings.len());
    for &coupling in &spec.couplings {
        let mut rows = Vec::with_capacity(n);
        for (&sv, unc) in values.iter().zip(&uncoupled) {
            rows.push(measure_point(spec, coupling, sv, unc, f0));
        }
        curves.push(SweepCurve { coupling, rows });
    }
    Ok(SweepResult { f0, curves })
}

fn measure_point(
    spec: &SweepSpec,
    coupling: CouplingSetting,
    swept_value: f64,
    uncoupled: &Result<(f64, f64), SimError>,
    f0: f64,
) -> SweepRow {
    let failed_row = |sv: f64| SweepRow {
        swept_value: sv,
        f1_uncoupled: f64::NAN,
        f2_uncoupled: f64::NAN,
        delta_f_norm: f64::NAN,
        f1_coupled: f64::NAN,
        f2_coupled: f64::NAN,
        delta_cap_f_norm: f64::NAN,
        locked: false,
        failed: true,
    };
    let Ok((f1u, f2u)) = *uncoupled else {
        return failed_row(swept_value);
    };
    let Ok((s1, s2, t_end)) = coupled_trains(&spec.mode, coupling, swept_value) else {
        return failed_row(swept_value);
    };
    let (w0, w1) = analysis_window(t_end);
    let Ok(report) = analysis::is_locked(&s1, &s2, w0, w1, spec.freq_tol, spec.phase_tol) else {
        return failed_row(swept_value);
    };
    SweepRow {
        swept_value,
        f1_uncoupled: f1u,
        f2_uncoupled: f2u,
        delta_f_norm: (f1u - f2u) / f0,
        f1_coupled: report.f1,
        f2_coupled: report.f2,
        delta_cap_f_norm: (report.f1 - report.f2) / f0,
        locked: report.locked,
        failed: false,
    }
}

/// Locking interval of one curve: [min, max] of `delta_f_norm` over locked
/// rows, plus the asymmetry |max| − |min|. Empty when nothing locked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockingRange {
    pub min: f64,
    pub max: f64,
    pub asymmetry: f64,
}

impl LockingRange {
    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

pub fn locking_range(result: &SweepResult, coupling_index: usize) -> Option<LockingRange> {
    let curve = result.curves.get(coupling_index)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut any = false;
    for row in &curve.rows {
        if row.locked && !row.failed {
            lo = lo.min(row.delta_f_norm);
            hi = hi.max(row.delta_f_norm);
            any = true;
        }
    }
    if !any {
        return None;
    }
    Some(LockingRange {
        min: lo,
        max: hi,
        asymmetry: hi.abs() - lo.abs(),
    })
}
