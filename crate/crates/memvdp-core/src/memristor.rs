//! Behavioral model of a bipolar resistive switching device.
//!
//! The device is a binary resistance state machine: a high resistance state
//! (HRS, ~1 MΩ) and a low resistance state (LRS) whose value is set by the
//! compliance current at the SET event. Switching is threshold driven with a
//! short dwell-time requirement so sub-microsecond glitches do not flip the
//! state.

use alloc::vec::Vec;

use crate::error::SimError;

/// Resistance state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResState {
    Hrs,
    Lrs,
}

/// Switching event emitted by [`MemristorDevice::apply_voltage`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchEvent {
    /// HRS -> LRS; carries the new LRS resistance.
    Set { r_lrs: f64 },
    /// LRS -> HRS.
    Reset,
}

/// LRS resistance resulting from a SET under compliance current `i_cc`,
/// following the inverse law R_LRS = k / I_CC calibrated so 1 mA gives 0.5 kΩ.
pub fn lrs_from_compliance(i_cc: f64, k_lrs: f64) -> Result<f64, SimError> {
    if !(i_cc > 0.0) {
        return Err(SimError::InvalidParameter {
            name: "i_cc",
            value: i_cc,
        });
    }
    Ok(k_lrs / i_cc)
}

/// Binary memristive device.
#[derive(Debug, Clone, PartialEq)]
pub struct MemristorDevice {
    pub state: ResState,
    pub r_hrs: f64,
    pub r_lrs: f64,
    pub v_set: f64,
    pub v_reset: f64,
    pub i_cc: f64,
    pub k_lrs: f64,
    pub tau_dwell: f64,
    pub dwell_accum: f64,
}

impl Default for MemristorDevice {
    fn default() -> Self {
        Self {
            state: ResState::Hrs,
            r_hrs: 1e6,
            // Placeholder until the first SET; device_resistance never reads
            // this while in HRS.
            r_lrs: 500.0,
            v_set: 0.6,
            v_reset: -0.3,
            i_cc: 1e-3,
            k_lrs: 0.5,
            tau_dwell: 1e-6,
            dwell_accum: 0.0,
        }
    }
}

impl MemristorDevice {
    /// Fresh device in HRS with the given compliance current.
    pub fn with_compliance(i_cc: f64) -> Self {
        Self {
            i_cc,
            ..Self::default()
        }
    }

    /// Current two-terminal resistance.
    pub fn device_resistance(&self) -> f64 {
        match self.state {
            ResState::Hrs => self.r_hrs,
            ResState::Lrs => self.r_lrs,
        }
    }

    /// Apply voltage `v` for duration `dt`.
    ///
    /// Above-threshold voltage accumulates dwell time; reaching `tau_dwell`
    /// triggers the transition. Any sub-threshold interval resets the dwell
    /// accumulator.
    pub fn apply_voltage(&mut self, v: f64, dt: f64) -> Option<SwitchEvent> {
        debug_assert!(dt > 0.0);
        let armed = match self.state {
            ResState::Hrs => v >= self.v_set,
            ResState::Lrs => v <= self.v_reset,
        };
        if !armed {
            self.dwell_accum = 0.0;
            return None;
        }
        self.dwell_accum = (self.dwell_accum + dt).min(self.tau_dwell);
        if self.dwell_accum < self.tau_dwell {
            return None;
        }
        self.dwell_accum = 0.0;
        match self.state {
            ResState::Hrs => {
                let r_lrs = lrs_from_compliance(self.i_cc, self.k_lrs)
                    .expect("compliance current must be positive");
                self.state = ResState::Lrs;
                self.r_lrs = r_lrs;
                Some(SwitchEvent::Set { r_lrs })
            }
            ResState::Lrs => {
                self.state = ResState::Hrs;
                Some(SwitchEvent::Reset)
            }
        }
    }

    /// Drive the device through a waveform of (voltage, duration) segments,
    /// reporting the compliance-clamped current at each segment.
    pub fn iv_sweep(&mut self, waveform: &[(f64, f64)]) -> Vec<IvPoint> {
        let mut out = Vec::with_capacity(waveform.len());
        for &(v, dt) in waveform {
            let event = self.apply_voltage(v, dt);
            let raw = v / self.device_resistance();
            let i = raw.clamp(-self.i_cc, self.i_cc);
            out.push(IvPoint { v, i, event });
        }
        out
    }
}

/// One reported point of an I-V sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvPoint {
    pub v: f64,
    pub i: f64,
    pub event: Option<SwitchEvent>,
}


/// Triangular sweep 0 → +v_peak → −v_peak → 0 with `steps` points per ramp
/// leg and `dt` per point. Convenience generator for pinched-hysteresis runs.
pub fn triangular_waveform(v_peak: f64, steps: usize, dt: f64) -> Vec<(f64, f64)> {
    let mut w = Vec::with_capacity(4 * steps);
    let dv = v_peak / steps as f64;
    for i in 0..=steps {
        w.push((i as f64 * dv, dt));
    }
    for i in (-(steps as i64)..steps as i64).rev() {
        w.push((i as f64 * dv, dt));
    }
    for i in -(steps as i64) + 1..=0 {
        w.push((i as f64 * dv, dt));
    }
    w
}
