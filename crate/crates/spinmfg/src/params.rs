//! Model parameters and the small domain types shared by every module.
//!
//! A game instance is the triple (T, ε, m₀): the horizon, the strength of the
//! private local field, and the mean of the initial state distribution.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The three parameters of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Time horizon T > 0.
    pub horizon: f64,
    /// Local field strength ε ∈ (0, 1].
    pub field_strength: f64,
    /// Initial mean m₀ ∈ [-1, 1].
    pub initial_mean: f64,
}

impl ModelParams {
    pub fn new(horizon: f64, field_strength: f64, initial_mean: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon T = {horizon}, need T > 0")));
        }
        if !(field_strength > 0.0 && field_strength <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "field strength eps = {field_strength}, need 0 < eps <= 1"
            )));
        }
        if !(initial_mean.is_finite() && initial_mean.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "initial mean m0 = {initial_mean}, need |m0| <= 1"
            )));
        }
        Ok(Self { horizon, field_strength, initial_mean })
    }

    /// Checks t ∈ [0, T].
    pub fn check_time(&self, t: f64) -> Result<()> {
        if t.is_finite() && (0.0..=self.horizon).contains(&t) {
            Ok(())
        } else {
            Err(Error::TimeOutOfRange { t, horizon: self.horizon })
        }
    }
}

/// Binary player state, x ∈ {-1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinState {
    Down,
    Up,
}

impl SpinState {
    pub fn value(self) -> f64 {
        match self {
            SpinState::Down => -1.0,
            SpinState::Up => 1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SpinState::Down => SpinState::Up,
            SpinState::Up => SpinState::Down,
        }
    }

    pub fn from_sign(v: f64) -> Self {
        if v >= 0.0 { SpinState::Up } else { SpinState::Down }
    }
}

/// Static private field, y ∈ {-ε, +ε}. Stored as the sign; the magnitude
/// comes from [`ModelParams::field_strength`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalField {
    Minus,
    Plus,
}

impl LocalField {
    pub fn signed(self, eps: f64) -> f64 {
        match self {
            LocalField::Minus => -eps,
            LocalField::Plus => eps,
        }
    }

    pub const BOTH: [LocalField; 2] = [LocalField::Minus, LocalField::Plus];
}

/// A candidate terminal mean m ∈ [-1, 1] for the fixed-point problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminalMean(pub f64);

impl TerminalMean {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m.abs() <= 1.0 {
            Ok(Self(m))
        } else {
            Err(Error::Domain(format!("terminal mean m = {m}, need |m| <= 1")))
        }
    }
}
