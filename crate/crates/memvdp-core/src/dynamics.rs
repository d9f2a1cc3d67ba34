//! The dimensionless coupled oscillator pair.
//!
//! Each oscillator is a van der Pol oscillator whose restoring force is
//! replaced by a cubic term `x (x - γ)² / γ²`, which shapes the waveform into
//! sparse relaxation spikes; `γ` controls the spike rate. The two oscillators
//! exchange a symmetric diffusive coupling `m (x_other - x)` whose strength
//! follows a Heaviside schedule switching from a weak value `m0` to a strong
//! value `m1` at `t_s`.

use alloc::vec::Vec;

use crate::error::SimError;

/// Default integrator step.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default divergence bound on any state component magnitude.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e6;

/// Instantaneous state of the coupled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscPairState {
    pub t: f64,
    pub x1: f64,
    pub v1: f64,
    pub x2: f64,
    pub v2: f64,
}

impl OscPairState {
    pub fn new(t: f64, x1: f64, v1: f64, x2: f64, v2: f64) -> Self {
        Self { t, x1, v1, x2, v2 }
    }

    /// Default initial condition: small, asymmetric, off the unstable origin
    /// so the two oscillators start visibly desynchronized.
    pub fn default_init() -> Self {
        Self::new(0.0, 0.1, 0.0, 0.2, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.x1.is_finite()
            && self.v1.is_finite()
            && self.x2.is_finite()
            && self.v2.is_finite()
    }

    /// Largest component magnitude, used for divergence detection.
    pub fn magnitude(&self) -> f64 {
        let m = self.x1.abs().max(self.v1.abs());
        m.max(self.x2.abs()).max(self.v2.abs())
    }
}

/// Sign convention for the cubic term once moved to the right-hand side.
///
/// `Negative` yields self-sustained spiking (the calibrated default);
/// `Positive` drives the state to a rest point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicSign {
    Positive,
    Negative,
}

impl CubicSign {
    pub fn factor(self) -> f64 {
        match self {
            CubicSign::Positive => 1.0,
            CubicSign::Negative => -1.0,
        }
    }
}

/// Parameters of the oscillator pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdpParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub cubic_sign: CubicSign,
}

impl VdpParams {
    /// Reference parameter set used throughout: α1 = 3.5, α2 = 4.8,
    /// β = 0.1, γ = 3.0, with the calibrated cubic sign.
    pub fn reference() -> Self {
        Self {
            alpha1: 3.5,
            alpha2: 4.8,
            beta1: 0.1,
            beta2: 0.1,
            gamma1: 3.0,
            gamma2: 3.0,
            cubic_sign: CubicSign::Negative,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fields = [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SimError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// Swap the roles of the two oscillators.
    pub fn swapped(&self) -> Self {
        Self {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            beta1: self.beta2,
            beta2: self.beta1,
            gamma1: self.gamma2,
            gamma2: self.gamma1,
            cubic_sign: self.cubic_sign,
        }
    }
}

/// Which coupling value applies before the switch at `t_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchOrientation {
    /// `m0` before `t_s`, `m1` from `t_s` on. Matches the experiment: the
    /// HRS-to-LRS transition raises the coupling.
    WeakThenStrong,
    /// `m1` before `t_s`, `m0` from `t_s` on.
    StrongThenWeak,
}

/// Heaviside coupling schedule m(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSchedule {
    pub m0: f64,
    pub m1: f64,
    pub t_s: f64,
    pub orientation: SwitchOrientation,
}

impl CouplingSchedule {
    pub fn new(m0: f64, m1: f64, t_s: f64) -> Self {
        Self {
            m0,
            m1,
            t_s,
            orientation: SwitchOrientation::WeakThenStrong,
        }
    }

    /// Constant coupling, switch never taken.
    pub fn constant(m: f64) -> Self {
        Self::new(m, m, 0.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, value) in [("m0", self.m0), ("m1", self.m1), ("t_s", self.t_s)] {
            if value < 0.0 || !value.is_finite() {
                return Err(SimError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// Coupling strength at time `t`. The tie at `t = t_s` resolves to the
    /// post-switch value, so the schedule is right-continuous.
    pub fn coupling_at(&self, t: f64) -> f64 {
        let (pre, post) = match self.orientation {
            SwitchOrientation::WeakThenStrong => (self.m0, self.m1),
            SwitchOrientation::StrongThenWeak => (self.m1, self.m0),
        };
        if t < self.t_s {
            pre
        } else {
            post
        }
    }
}

/// Time derivative of the pair state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDeriv {
    pub dx1: f64,
    pub dv1: f64,
    pub dx2: f64,
    pub dv2: f64,
}

/// Right-hand side of the coupled system:
///
/// ```text
/// ẍᵢ = αᵢ (1 − xᵢ²) ẋᵢ + s·βᵢ xᵢ (xᵢ − γᵢ)² / γᵢ² + m (x_other − xᵢ)
/// ```
///
/// The two coupling contributions are exactly antisymmetric.
pub fn vdp_rhs(state: &OscPairState, params: &VdpParams, m: f64) -> PairDeriv {
    debug_assert!(state.is_finite(), "non-finite state passed to vdp_rhs");
    debug_assert!(m >= 0.0);
    let s = params.cubic_sign.factor();
    let cubic = |x: f64, beta: f64, gamma: f64| {
        let d = x - gamma;
        s * beta * x * d * d / (gamma * gamma)
    };
    let coupling = m * (state.x2 - state.x1);
    PairDeriv {
        dx1: state.v1,
        dv1: params.alpha1 * (1.0 - state.x1 * state.x1) * state.v1
            + cubic(state.x1, params.beta1, params.gamma1)
            + coupling,
        dx2: state.v2,
        dv2: params.alpha2 * (1.0 - state.x2 * state.x2) * state.v2
            + cubic(state.x2, params.beta2, params.gamma2)
            - coupling,
    }
}

/// Source of the coupling strength during a run. `Provider` lets an external
/// subsystem (the circuit's memristor state, in practice) drive m step by
/// step.
pub enum CouplingSource<'a> {
    Schedule(CouplingSchedule),
    Provider(&'a mut dyn FnMut(f64) -> f64),
}

impl<'a> CouplingSource<'a> {
    fn at(&mut self, t: f64) -> f64 {
        match self {
            CouplingSource::Schedule(s) => s.coupling_at(t),
            CouplingSource::Provider(f) => f(t),
        }
    }
}

impl<'a> From<CouplingSchedule> for CouplingSource<'a> {
    fn from(s: CouplingSchedule) -> Self {
        CouplingSource::Schedule(s)
    }
}

/// One recorded sample of a model trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub x1: f64,
    pub v1: f64,
    pub x2: f64,
    pub v2: f64,
    /// Coupling strength actually used for the step that produced this sample.
    pub m: f64,
}

/// Uniformly sampled model trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub dt_record: f64,
    pub samples: Vec<TraceSample>,
}

impl Trace {
    /// Extract one channel as (t, value) pairs. Channel 0 is x1, channel 1 is x2.
    pub fn channel(&self, idx: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(move |s| match idx {
            0 => (s.t, s.x1),
            _ => (s.t, s.x2),
        })
    }
}

/// One classical RK4 step of an arbitrary right-hand side over the pair
/// state. Returns an error if the update produces a non-finite component.
pub fn rk4_step_with<F>(rhs: F, state: &OscPairState, dt: f64) -> Result<OscPairState, SimError>
where
    F: Fn(&OscPairState) -> PairDeriv,
{
    debug_assert!(dt > 0.0);
    let k1 = rhs(state);
    let mid1 = advance(state, &k1, dt / 2.0);
    let k2 = rhs(&mid1);
    let mid2 = advance(state, &k2, dt / 2.0);
    let k3 = rhs(&mid2);
    let end = advance(state, &k3, dt);
    let k4 = rhs(&end);

    let next = OscPairState {
        t: state.t + dt,
        x1: state.x1 + dt / 6.0 * (k1.dx1 + 2.0 * k2.dx1 + 2.0 * k3.dx1 + k4.dx1),
        v1: state.v1 + dt / 6.0 * (k1.dv1 + 2.0 * k2.dv1 + 2.0 * k3.dv1 + k4.dv1),
        x2: state.x2 + dt / 6.0 * (k1.dx2 + 2.0 * k2.dx2 + 2.0 * k3.dx2 + k4.dx2),
        v2: state.v2 + dt / 6.0 * (k1.dv2 + 2.0 * k2.dv2 + 2.0 * k3.dv2 + k4.dv2),
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(SimError::NonFiniteStep { t: state.t })
    }
}

/// One classical RK4 step of the pair under a frozen coupling strength `m`.
pub fn rk4_step(
    state: &OscPairState,
    params: &VdpParams,
    m: f64,
    dt: f64,
) -> Result<OscPairState, SimError> {
    rk4_step_with(|s| vdp_rhs(s, params, m), state, dt)
}

fn advance(state: &OscPairState, d: &PairDeriv, h: f64) -> OscPairState {
    OscPairState {
        t: state.t + h,
        x1: state.x1 + h * d.dx1,
        v1: state.v1 + h * d.dv1,
        x2: state.x2 + h * d.dx2,
        v2: state.v2 + h * d.dv2,
    }
}

/// Simulation controls for [`simulate`].
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Record every `record_stride`-th step (>= 1).
    pub record_stride: usize,
    pub divergence_bound: f64,
}

impl SimOptions {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            dt: DEFAULT_DT,
            record_stride: 1,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }
}

/// Integrate the pair from `init` to `t_end` with fixed step `dt`.
///
/// The coupling is sampled once per step (at the step start) and held frozen
/// across the RK4 stages, so a schedule switch takes effect at the first step
/// whose start time is at or past `t_s`. The initial state is recorded as the
/// first sample.
pub fn simulate(
    params: &VdpParams,
    mut coupling: CouplingSource<'_>,
    init: OscPairState,
    opts: &SimOptions,
) -> Result<Trace, SimError> {
    params.validate()?;
    if !(opts.t_end > 0.0) {
        return Err(SimError::InvalidParameter {
            name: "t_end",
            value: opts.t_end,
        });
    }
    if !(opts.dt > 0.0) {
        return Err(SimError::InvalidParameter {
            name: "dt",
            value: opts.dt,
        });
    }
    let n_steps = libm::ceil(opts.t_end / opts.dt) as usize;
    let stride = opts.record_stride.max(1);
    let mut samples = Vec::with_capacity(n_steps / stride + 2);
    let mut state = init;
    let m0 = coupling.at(state.t);
    samples.push(sample_of(&state, m0));
    for step in 1..=n_steps {
        let m = coupling.at(state.t);
        state = rk4_step(&state, params, m, opts.dt)?;
        // Fixed-step grid: avoid accumulating t += dt rounding error.
        state.t = init.t + step as f64 * opts.dt;
        if state.magnitude() > opts.divergence_bound {
            return Err(SimError::Diverged {
                t: state.t,
                magnitude: state.magnitude(),
            });
        }
        if step % stride == 0 {
            samples.push(sample_of(&state, m));
        }
    }
    Ok(Trace {
        dt_record: opts.dt * stride as f64,
        samples,
    })
}

fn sample_of(s: &OscPairState, m: f64) -> TraceSample {
    TraceSample {
        t: s.t,
        x1: s.x1,
        v1: s.v1,
        x2: s.x2,
        v2: s.v2,
        m,
    }
}


/// Decide the cubic sign that yields self-sustained spiking for the given
/// parameters: run both signs uncoupled and keep the one whose position
/// keeps crossing zero late in the run.
pub fn calibrate_cubic_sign(base: &VdpParams, t_end: f64, dt: f64) -> Option<CubicSign> {
    let mut best = None;
    for sign in [CubicSign::Negative, CubicSign::Positive] {
        let params = VdpParams {
            cubic_sign: sign,
            ..*base
        };
        let opts = SimOptions::new(t_end).with_dt(dt).with_stride(10);
        let Ok(trace) = simulate(
            &params,
            CouplingSchedule::constant(0.0).into(),
            OscPairState::default_init(),
            &opts,
        ) else {
            continue;
        };
        // Count upward zero crossings of x1 in the second half.
        let half = trace.samples.len() / 2;
        let crossings = trace.samples[half..]
            .windows(2)
            .filter(|w| w[0].x1 < 0.0 && w[1].x1 >= 0.0)
            .count();
        if crossings >= 2 {
            best = Some(sign);
            break;
        }
    }
    best
}
