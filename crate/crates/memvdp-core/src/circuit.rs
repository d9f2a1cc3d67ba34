//! Event-driven simulation of the two PUT relaxation oscillators coupled
//! through the RC-memristor network.
//!
//! Each oscillator is an anode RC charge ramp with a behavioral PUT switch:
//! the PUT conducts once the anode voltage exceeds the gate voltage plus a
//! fixed offset, discharging the anode capacitor through a small on
//! resistance until the valley voltage is reached. While a PUT conducts it
//! clamps its gate node toward ground, producing the sharp downward gate
//! pulse seen at the divider output.
//!
//! The coupling network is C_K1 in series from gate 1 to node A, the
//! parallel pair {R_K2, R_K1 + R_M} between nodes A and B, and C_K2 from
//! node B to gate 2. Gate nodes are purely resistive, so they are solved
//! algebraically each step; the two coupling capacitors are the only extra
//! state. A gate pulse on one side drags the partner's gate down through the
//! network, lowering its firing threshold: the partner fires earlier, which
//! is what pulls the slow oscillator onto the fast oscillator's rhythm. The
//! voltage dropped across the memristive device is fed to the device state
//! machine every step, so SET/RESET events change the network mid-run.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::SimError;
use crate::memristor::{MemristorDevice, ResState, SwitchEvent};

/// Gate divider output: v_bb · r_g / (r_g + r_b).
pub fn gate_offset(v_bb: f64, r_b: f64, r_g: f64) -> f64 {
    debug_assert!(r_b + r_g > 0.0);
    v_bb * r_g / (r_g + r_b)
}

/// High-pass cutoff of the coupling network: 1 / (2π · m_total · c_series)
/// with the two coupling capacitors in series.
pub fn cutoff_frequency(m_total: f64, c_k1: f64, c_k2: f64) -> f64 {
    debug_assert!(m_total > 0.0 && c_k1 > 0.0 && c_k2 > 0.0);
    let c_series = c_k1 * c_k2 / (c_k1 + c_k2);
    1.0 / (2.0 * PI * m_total * c_series)
}

/// RC charge time from `v_valley` to `v_threshold` toward asymptote `v_bb`.
pub fn charging_period(
    v_bb: f64,
    v_valley: f64,
    v_threshold: f64,
    r: f64,
    c: f64,
) -> Result<f64, SimError> {
    if !(v_bb > v_threshold && v_threshold >= v_valley && v_valley >= 0.0) {
        return Err(SimError::InvalidParameter {
            name: "v_threshold",
            value: v_threshold,
        });
    }
    Ok(r * c * libm::log((v_bb - v_valley) / (v_bb - v_threshold)))
}

/// Anode resistor value giving charge period `1 / f_target` for capacitor
/// `c`, inverting [`charging_period`].
pub fn solve_anode_resistor(
    f_target: f64,
    v_bb: f64,
    v_valley: f64,
    v_threshold: f64,
    c: f64,
) -> f64 {
    let log_ratio = libm::log((v_bb - v_valley) / (v_bb - v_threshold));
    1.0 / (f_target * c * log_ratio)
}

/// Component values and behavioral parameters of the coupled circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitConfig {
    pub v_bb: f64,
    /// Anode charging resistors and capacitors.
    pub r1: f64,
    pub r2: f64,
    pub c1: f64,
    pub c2: f64,
    /// Gate divider resistors.
    pub r_b1: f64,
    pub r_b2: f64,
    pub r_g1: f64,
    pub r_g2: f64,
    /// Additive gate calibration: measured offset minus ideal divider value.
    pub v_cal1: f64,
    pub v_cal2: f64,
    /// Coupling network.
    pub r_k1: f64,
    pub r_k2: f64,
    pub c_k1: f64,
    pub c_k2: f64,
    /// PUT behavioral model.
    pub put_offset: f64,
    pub put_r_on: f64,
    /// Resistance of the gate clamp while the PUT conducts.
    pub put_r_gate_on: f64,
    pub v_valley: f64,
    /// Memristive device in the coupling branch.
    pub memristor: MemristorDevice,
    pub initial_memristor_state: ResState,
    /// When false the device resistance is frozen for the whole run.
    pub memristor_switching_enabled: bool,
    /// When false the coupling network is absent entirely.
    pub coupling_connected: bool,
}

/// Gate divider operating points measured on the reference board.
pub const MEASURED_V01: f64 = 2.66;
pub const MEASURED_V02: f64 = 2.76;
/// Uncoupled frequencies the default components are solved for.
pub const TARGET_F1: f64 = 540.0;
pub const TARGET_F2: f64 = 410.0;

impl Default for CircuitConfig {
    /// Board defaults: reference divider and coupling components, anode RC
    /// values solved so the uncoupled oscillators run at 540 Hz and 410 Hz,
    /// and gate calibration offsets matching the measured operating points.
    fn default() -> Self {
        let v_bb = 20.0;
        let (r_b1, r_b2) = (20.8e3, 40.5e3);
        let (r_g1, r_g2) = (2.37e3, 2.37e3);
        let v_cal1 = MEASURED_V01 - gate_offset(v_bb, r_b1, r_g1);
        let v_cal2 = MEASURED_V02 - gate_offset(v_bb, r_b2, r_g2);
        let put_offset = 0.5;
        let v_valley = 0.7;
        let (c1, c2) = (100e-9, 100e-9);
        let r1 = solve_anode_resistor(TARGET_F1, v_bb, v_valley, MEASURED_V01 + put_offset, c1);
        let r2 = solve_anode_resistor(TARGET_F2, v_bb, v_valley, MEASURED_V02 + put_offset, c2);
        Self {
            v_bb,
            r1,
            r2,
            c1,
            c2,
            r_b1,
            r_b2,
            r_g1,
            r_g2,
            v_cal1,
            v_cal2,
            r_k1: 4.7e3,
            r_k2: 47e3,
            c_k1: 33e-9,
            c_k2: 33e-9,
            put_offset,
            put_r_on: 50.0,
            put_r_gate_on: 250.0,
            v_valley,
            memristor: MemristorDevice::default(),
            initial_memristor_state: ResState::Hrs,
            memristor_switching_enabled: true,
            coupling_connected: true,
        }
    }
}

impl CircuitConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("v_bb", self.v_bb),
            ("r1", self.r1),
            ("r2", self.r2),
            ("c1", self.c1),
            ("c2", self.c2),
            ("r_b1", self.r_b1),
            ("r_b2", self.r_b2),
            ("r_g1", self.r_g1),
            ("r_g2", self.r_g2),
            ("r_k1", self.r_k1),
            ("r_k2", self.r_k2),
            ("c_k1", self.c_k1),
            ("c_k2", self.c_k2),
            ("put_r_on", self.put_r_on),
            ("put_r_gate_on", self.put_r_gate_on),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SimError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// Effective gate rest offset of oscillator 1 (divider plus calibration).
    pub fn v_offset1(&self) -> f64 {
        gate_offset(self.v_bb, self.r_b1, self.r_g1) + self.v_cal1
    }

    pub fn v_offset2(&self) -> f64 {
        gate_offset(self.v_bb, self.r_b2, self.r_g2) + self.v_cal2
    }

    /// Thevenin source resistance at each gate node.
    fn r_th1(&self) -> f64 {
        parallel(self.r_b1, self.r_g1)
    }

    fn r_th2(&self) -> f64 {
        parallel(self.r_b2, self.r_g2)
    }
}

fn parallel(a: f64, b: f64) -> f64 {
    a * b / (a + b)
}

/// Timestamped run events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitEvent {
    /// PUT of oscillator `osc` (1 or 2) started conducting.
    Fire { osc: u8, t: f64 },
    Set { t: f64 },
    Reset { t: f64 },
}

impl CircuitEvent {
    pub fn time(&self) -> f64 {
        match *self {
            CircuitEvent::Fire { t, .. } | CircuitEvent::Set { t } | CircuitEvent::Reset { t } => t,
        }
    }
}

/// One recorded circuit sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitSample {
    pub t: f64,
    pub v_c1: f64,
    pub v_c2: f64,
    pub v_g1: f64,
    pub v_g2: f64,
    pub r_mem: f64,
}

/// Sampled circuit run plus its event log.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitTrace {
    pub dt_record: f64,
    pub samples: Vec<CircuitSample>,
    pub events: Vec<CircuitEvent>,
}

impl CircuitTrace {
    pub fn first_set_time(&self) -> Option<f64> {
        self.events.iter().find_map(|e| match e {
            CircuitEvent::Set { t } => Some(*t),
            _ => None,
        })
    }

    pub fn fire_times(&self, osc: u8) -> Vec<f64> {
        self.events
            .iter()
            .filter_map(|e| match e {
                CircuitEvent::Fire { osc: o, t } if *o == osc => Some(*t),
                _ => None,
            })
            .collect()
    }
}


struct OscRuntime {
    v_c: f64,
    on: bool,
    r: f64,
    c: f64,
}

impl OscRuntime {
    /// Exact exponential update of the anode node over one step.
    fn advance(&mut self, v_bb: f64, put_r_on: f64, dt: f64) {
        let (v_inf, tau) = if self.on {
            let r_par = parallel(self.r, put_r_on);
            (v_bb * put_r_on / (self.r + put_r_on), r_par * self.c)
        } else {
            (v_bb, self.r * self.c)
        };
        self.v_c = v_inf + (self.v_c - v_inf) * libm::exp(-dt / tau);
    }
}

/// Run the circuit from rest (discharged anode and coupling capacitors) for
/// `t_end` seconds with fixed step `dt`, recording every `record_stride`-th
/// step.
pub fn simulate_circuit(
    config: &CircuitConfig,
    t_end: f64,
    dt: f64,
    record_stride: usize,
) -> Result<CircuitTrace, SimError> {
    config.validate()?;
    if !(dt > 0.0) {
        return Err(SimError::InvalidParameter { name: "dt", value: dt });
    }
    if !(t_end > 0.0) {
        return Err(SimError::InvalidParameter {
            name: "t_end",
            value: t_end,
        });
    }
    let stride = record_stride.max(1);
    let n_steps = libm::ceil(t_end / dt) as usize;

    let mut device = config.memristor.clone();
    device.state = config.initial_memristor_state;

    let mut osc1 = OscRuntime {
        v_c: 0.0,
        on: false,
        r: config.r1,
        c: config.c1,
    };
    let mut osc2 = OscRuntime {
        v_c: 0.0,
        on: false,
        r: config.r2,
        c: config.c2,
    };
    // Voltages across the coupling capacitors: u1 = v_g1 - v_a, u2 = v_b - v_g2.
    let mut u1 = 0.0;
    let mut u2 = 0.0;

    let v01 = config.v_offset1();
    let v02 = config.v_offset2();
    let (r_th1, r_th2) = (config.r_th1(), config.r_th2());

    let mut samples = Vec::with_capacity(n_steps / stride + 2);
    let mut events = Vec::new();

    for step in 0..=n_steps {
        let t = step as f64 * dt;
        let r_m = device.device_resistance();
        let branch_r = config.r_k1 + r_m;
        let m_par = parallel(config.r_k2, branch_r);

        // Algebraic solve of the two gate nodes.
        let g1 = 1.0 / r_th1 + if osc1.on { 1.0 / config.put_r_gate_on } else { 0.0 };
        let g2 = 1.0 / r_th2 + if osc2.on { 1.0 / config.put_r_gate_on } else { 0.0 };
        let gm = if config.coupling_connected { 1.0 / m_par } else { 0.0 };
        let u_total = u1 + u2;
        // (g1+gm) v_g1 - gm v_g2 = v01/r_th1 + gm*u_total
        // -gm v_g1 + (g2+gm) v_g2 = v02/r_th2 - gm*u_total
        let a = g1 + gm;
        let b = -gm;
        let c_ = -gm;
        let d = g2 + gm;
        let rhs1 = v01 / r_th1 + gm * u_total;
        let rhs2 = v02 / r_th2 - gm * u_total;
        let det = a * d - b * c_;
        let v_g1 = (rhs1 * d - b * rhs2) / det;
        let v_g2 = (a * rhs2 - c_ * rhs1) / det;

        if step % stride == 0 {
            samples.push(CircuitSample {
                t,
                v_c1: osc1.v_c,
                v_c2: osc2.v_c,
                v_g1,
                v_g2,
                r_mem: r_m,
            });
        }
        if step == n_steps {
            break;
        }

        // Coupling network currents and capacitor updates.
        if config.coupling_connected {
            let i_net = (v_g1 - u1 - v_g2 - u2) / m_par;
            u1 += i_net / config.c_k1 * dt;
            u2 += i_net / config.c_k2 * dt;

            // Voltage across the memristive device, oriented so the faster
            // oscillator's downward pulse appears as a positive SET drive.
            let v_a = v_g1 - u1;
            let v_b = v_g2 + u2;
            let v_mem = (v_b - v_a) * r_m / branch_r;
            if config.memristor_switching_enabled {
                match device.apply_voltage(v_mem, dt) {
                    Some(SwitchEvent::Set { .. }) => events.push(CircuitEvent::Set { t }),
                    Some(SwitchEvent::Reset) => events.push(CircuitEvent::Reset { t }),
                    None => {}
                }
            }
        }

        // Anode dynamics and PUT switching.
        for (idx, osc, v_g) in [(1u8, &mut osc1, v_g1), (2u8, &mut osc2, v_g2)] {
            let v_prev = osc.v_c;
            osc.advance(config.v_bb, config.put_r_on, dt);
            if !osc.on {
                let v_th = v_g + config.put_offset;
                if osc.v_c >= v_th {
                    // Linear interpolation of the crossing time inside the step.
                    let frac = if osc.v_c > v_prev {
                        ((v_th - v_prev) / (osc.v_c - v_prev)).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    events.push(CircuitEvent::Fire {
                        osc: idx,
                        t: t + frac * dt,
                    });
                    osc.on = true;
                }
            } else if osc.v_c <= config.v_valley {
                osc.on = false;
            }
            if !(-config.v_bb..=2.0 * config.v_bb).contains(&osc.v_c) {
                return Err(SimError::Diverged {
                    t,
                    magnitude: osc.v_c.abs(),
                });
            }
        }
        if !u1.is_finite() || !u2.is_finite() {
            return Err(SimError::NonFiniteStep { t });
        }
    }

    Ok(CircuitTrace {
        dt_record: dt * stride as f64,
        samples,
        events,
    })
}
