use core::fmt;

/// Errors raised by simulations and analyses.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// The state magnitude exceeded the divergence bound during integration.
    Diverged { t: f64, magnitude: f64 },
    /// An integration step produced a non-finite value.
    NonFiniteStep { t: f64 },
    /// Fewer spikes than required for the requested analysis.
    InsufficientSpikes { needed: usize, got: usize },
    /// A parameter violated its documented constraint.
    InvalidParameter { name: &'static str, value: f64 },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Diverged { t, magnitude } => {
                write!(f, "state diverged at t = {t}: |state| = {magnitude:e}")
            }
            SimError::NonFiniteStep { t } => {
                write!(f, "non-finite value produced by integration step at t = {t}")
            }
            SimError::InsufficientSpikes { needed, got } => {
                write!(f, "analysis needs at least {needed} spikes, got {got}")
            }
            SimError::InvalidParameter { name, value } => {
                write!(f, "parameter `{name}` = {value} violates its constraint")
            }
        }
    }
}

impl core::error::Error for SimError {}
