//! Experiment configuration: a single TOML file per experiment.
//!
//! Unknown keys are rejected, missing optional keys are filled from the
//! documented defaults, and the resolved configuration is echoed back into
//! the output directory so every data file can be traced to the exact
//! parameters that produced it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use memvdp_core::circuit::CircuitConfig;
use memvdp_core::dynamics::{
    CouplingSchedule, CubicSign, OscPairState, SwitchOrientation, VdpParams,
};
use memvdp_core::memristor::{MemristorDevice, ResState};
use memvdp_core::sweep::{CouplingSetting, SweepMode, SweepSpec};
use memvdp_core::analysis;

use crate::error::CliError;

/// Config schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ModelSim,
    CircuitSim,
    DetuningSweep,
    IvSweep,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub circuit: CircuitSection,
    #[serde(default)]
    pub device: DeviceSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

/// Dimensionless model parameters. Defaults are the reference set
/// (α1 = 3.5, α2 = 4.8, β = 0.1, γ = 3.0, m0 = 0.01, m1 = 0.1).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// "negative" (calibrated default, self-sustained spiking) or "positive".
    pub cubic_sign: String,
    pub m0: f64,
    pub m1: f64,
    pub t_s: f64,
    /// "weak-then-strong" (default) or "strong-then-weak".
    pub orientation: String,
    pub init: [f64; 4],
    pub t_end: f64,
    pub dt: f64,
    pub record_stride: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = VdpParams::reference();
        let init = OscPairState::default_init();
        Self {
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            beta1: p.beta1,
            beta2: p.beta2,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            cubic_sign: "negative".into(),
            m0: 0.01,
            m1: 0.1,
            t_s: 1500.0,
            orientation: "weak-then-strong".into(),
            init: [init.x1, init.v1, init.x2, init.v2],
            t_end: 3000.0,
            dt: 1e-3,
            record_stride: 20,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> Result<VdpParams, CliError> {
        let cubic_sign = match self.cubic_sign.as_str() {
            "negative" => CubicSign::Negative,
            "positive" => CubicSign::Positive,
            other => {
                return Err(CliError::Validation(format!(
                    "model.cubic_sign must be \"negative\" or \"positive\", got {other:?}"
                )))
            }
        };
        let p = VdpParams {
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            beta1: self.beta1,
            beta2: self.beta2,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            cubic_sign,
        };
        p.validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(p)
    }

    pub fn schedule(&self) -> Result<CouplingSchedule, CliError> {
        let orientation = match self.orientation.as_str() {
            "weak-then-strong" => SwitchOrientation::WeakThenStrong,
            "strong-then-weak" => SwitchOrientation::StrongThenWeak,
            other => {
                return Err(CliError::Validation(format!(
                    "model.orientation must be \"weak-then-strong\" or \"strong-then-weak\", got {other:?}"
                )))
            }
        };
        let s = CouplingSchedule {
            m0: self.m0,
            m1: self.m1,
            t_s: self.t_s,
            orientation,
        };
        s.validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(s)
    }

    pub fn init_state(&self) -> OscPairState {
        OscPairState::new(0.0, self.init[0], self.init[1], self.init[2], self.init[3])
    }
}

/// Circuit component values. Defaults mirror [`CircuitConfig::default`]:
/// the reference board values plus anode RC products solved for
/// 540 Hz / 410 Hz.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitSection {
    pub v_bb: f64,
    pub r1: f64,
    pub r2: f64,
    pub c1: f64,
    pub c2: f64,
    pub r_b1: f64,
    pub r_b2: f64,
    pub r_g1: f64,
    pub r_g2: f64,
    pub v_cal1: f64,
    pub v_cal2: f64,
    pub r_k1: f64,
    pub r_k2: f64,
    pub c_k1: f64,
    pub c_k2: f64,
    pub put_offset: f64,
    pub put_r_on: f64,
    pub put_r_gate_on: f64,
    pub v_valley: f64,
    pub coupling_connected: bool,
    pub memristor_switching_enabled: bool,
    /// "hrs" or "lrs".
    pub initial_memristor_state: String,
    pub t_end: f64,
    pub dt: f64,
    pub record_stride: usize,
}

impl Default for CircuitSection {
    fn default() -> Self {
        let c = CircuitConfig::default();
        Self {
            v_bb: c.v_bb,
            r1: c.r1,
            r2: c.r2,
            c1: c.c1,
            c2: c.c2,
            r_b1: c.r_b1,
            r_b2: c.r_b2,
            r_g1: c.r_g1,
            r_g2: c.r_g2,
            v_cal1: c.v_cal1,
            v_cal2: c.v_cal2,
            r_k1: c.r_k1,
            r_k2: c.r_k2,
            c_k1: c.c_k1,
            c_k2: c.c_k2,
            put_offset: c.put_offset,
            put_r_on: c.put_r_on,
            put_r_gate_on: c.put_r_gate_on,
            v_valley: c.v_valley,
            coupling_connected: true,
            memristor_switching_enabled: true,
            initial_memristor_state: "hrs".into(),
            t_end: 0.1,
            dt: 0.5e-6,
            record_stride: 1,
        }
    }
}

fn parse_res_state(s: &str, field: &str) -> Result<ResState, CliError> {
    match s {
        "hrs" => Ok(ResState::Hrs),
        "lrs" => Ok(ResState::Lrs),
        other => Err(CliError::Validation(format!(
            "{field} must be \"hrs\" or \"lrs\", got {other:?}"
        ))),
    }
}

impl CircuitSection {
    pub fn circuit_config(&self, device: &DeviceSection) -> Result<CircuitConfig, CliError> {
        let cfg = CircuitConfig {
            v_bb: self.v_bb,
            r1: self.r1,
            r2: self.r2,
            c1: self.c1,
            c2: self.c2,
            r_b1: self.r_b1,
            r_b2: self.r_b2,
            r_g1: self.r_g1,
            r_g2: self.r_g2,
            v_cal1: self.v_cal1,
            v_cal2: self.v_cal2,
            r_k1: self.r_k1,
            r_k2: self.r_k2,
            c_k1: self.c_k1,
            c_k2: self.c_k2,
            put_offset: self.put_offset,
            put_r_on: self.put_r_on,
            put_r_gate_on: self.put_r_gate_on,
            v_valley: self.v_valley,
            memristor: device.device()?,
            initial_memristor_state: parse_res_state(
                &self.initial_memristor_state,
                "circuit.initial_memristor_state",
            )?,
            memristor_switching_enabled: self.memristor_switching_enabled,
            coupling_connected: self.coupling_connected,
        };
        cfg.validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(cfg)
    }
}

/// Memristive device parameters and the I-V sweep waveform.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    pub r_hrs: f64,
    pub v_set: f64,
    pub v_reset: f64,
    pub i_cc: f64,
    pub k_lrs: f64,
    pub tau_dwell: f64,
    /// Triangular sweep peak voltage and points per ramp leg.
    pub sweep_v_peak: f64,
    pub sweep_steps: usize,
    pub sweep_dt: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        let d = MemristorDevice::default();
        Self {
            r_hrs: d.r_hrs,
            v_set: d.v_set,
            v_reset: d.v_reset,
            i_cc: d.i_cc,
            k_lrs: d.k_lrs,
            tau_dwell: d.tau_dwell,
            sweep_v_peak: 1.0,
            sweep_steps: 200,
            sweep_dt: 1e-5,
        }
    }
}

impl DeviceSection {
    pub fn device(&self) -> Result<MemristorDevice, CliError> {
        if !(self.v_set > 0.0) || !(self.v_reset < 0.0) {
            return Err(CliError::Validation(format!(
                "device thresholds must satisfy v_set > 0 > v_reset, got v_set = {}, v_reset = {}",
                self.v_set, self.v_reset
            )));
        }
        if !(self.i_cc > 0.0) {
            return Err(CliError::Validation(format!(
                "device.i_cc must be positive, got {}",
                self.i_cc
            )));
        }
        Ok(MemristorDevice {
            r_hrs: self.r_hrs,
            v_set: self.v_set,
            v_reset: self.v_reset,
            i_cc: self.i_cc,
            k_lrs: self.k_lrs,
            tau_dwell: self.tau_dwell,
            ..MemristorDevice::default()
        })
    }
}

/// Detuning sweep layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// "model" or "circuit".
    pub mode: String,
    pub sweep_points: usize,
    /// Model couplings m (used when mode = "model").
    pub couplings: Vec<f64>,
    /// Circuit couplings (used when mode = "circuit").
    pub circuit_r_k1: Vec<f64>,
    /// Device state pinned during circuit sweep runs: "hrs" or "lrs".
    pub circuit_device_state: String,
    pub alpha2_min: f64,
    pub alpha2_max: f64,
    pub r2_min: f64,
    pub r2_max: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            mode: "model".into(),
            sweep_points: 41,
            couplings: vec![0.01, 0.05, 0.1],
            circuit_r_k1: vec![10e3, 1e3],
            circuit_device_state: "lrs".into(),
            alpha2_min: 2.0,
            alpha2_max: 8.0,
            r2_min: 100e3,
            r2_max: 260e3,
            t_end: 6000.0,
            dt: 2e-3,
        }
    }
}

impl SweepSection {
    pub fn spec(
        &self,
        model: &ModelSection,
        circuit: &CircuitSection,
        device: &DeviceSection,
        analysis_cfg: &AnalysisSection,
    ) -> Result<SweepSpec, CliError> {
        let (mode, couplings) = match self.mode.as_str() {
            "model" => (
                SweepMode::Model {
                    params: model.params()?,
                    alpha2_range: (self.alpha2_min, self.alpha2_max),
                    t_end: self.t_end,
                    dt: self.dt,
                    spike_threshold: analysis_cfg.model_spike_threshold,
                    refractory: analysis_cfg.model_refractory,
                },
                self.couplings
                    .iter()
                    .map(|&m| CouplingSetting::ModelM(m))
                    .collect::<Vec<_>>(),
            ),
            "circuit" => {
                let state =
                    parse_res_state(&self.circuit_device_state, "sweep.circuit_device_state")?;
                (
                    SweepMode::Circuit {
                        config: circuit.circuit_config(device)?,
                        r2_range: (self.r2_min, self.r2_max),
                        t_end: self.t_end,
                        dt: self.dt,
                    },
                    self.circuit_r_k1
                        .iter()
                        .map(|&r_k1| CouplingSetting::CircuitRk1 { r_k1, state })
                        .collect(),
                )
            }
            other => {
                return Err(CliError::Validation(format!(
                    "sweep.mode must be \"model\" or \"circuit\", got {other:?}"
                )))
            }
        };
        let spec = SweepSpec {
            mode,
            sweep_points: self.sweep_points,
            couplings,
            freq_tol: analysis_cfg.freq_tol,
            phase_tol: analysis_cfg.phase_tol,
        };
        spec.validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(spec)
    }
}

/// Spike detection and lock-verdict settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub model_spike_threshold: f64,
    pub model_refractory: f64,
    pub circuit_spike_threshold: f64,
    pub circuit_refractory: f64,
    pub freq_tol: f64,
    pub phase_tol: f64,
    /// Fraction of the window discarded as transient after a coupling change.
    pub transient_fraction: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            model_spike_threshold: 0.0,
            model_refractory: 5.0,
            circuit_spike_threshold: 2.0,
            circuit_refractory: 2e-4,
            freq_tol: analysis::DEFAULT_FREQ_TOL,
            phase_tol: analysis::DEFAULT_PHASE_TOL,
            transient_fraction: memvdp_core::sweep::TRANSIENT_FRACTION,
        }
    }
}

/// Parse and validate a config file, applying defaults.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading config {}: {e}", path.display())))?;
    let cfg: ExperimentConfig = toml::from_str(&text)
        .map_err(|e| CliError::Parse(format!("parsing config {}: {e}", path.display())))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "schema_version {} is not supported (this build supports {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    // Resolve every derived object once so field constraints surface at load
    // time rather than mid-run.
    cfg.model.params()?;
    cfg.model.schedule()?;
    cfg.device.device()?;
    cfg.circuit.circuit_config(&cfg.device)?;
    if cfg.kind == ExperimentKind::DetuningSweep {
        cfg.sweep
            .spec(&cfg.model, &cfg.circuit, &cfg.device, &cfg.analysis)?;
    }
    for (name, v) in [
        ("model.t_end", cfg.model.t_end),
        ("model.dt", cfg.model.dt),
        ("circuit.t_end", cfg.circuit.t_end),
        ("circuit.dt", cfg.circuit.dt),
    ] {
        if !(v > 0.0) {
            return Err(CliError::Validation(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// Serialize the fully resolved config (all defaults applied).
pub fn resolved_toml(cfg: &ExperimentConfig) -> String {
    toml::to_string_pretty(cfg).expect("resolved config always serializes")
}
