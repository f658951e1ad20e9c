//! Solver and experiment toolkit for a binary-state mean field game with
//! private random fields.
//!
//! Players control the flip rate of a ±1 state under a quadratic running
//! cost; at the horizon each earns a conformity reward aligned with the
//! population mean plus a private reward aligned with a static field ±ε.
//! The crate covers:
//!
//! - the closed forms of the representative-player problem ([`mfg`]),
//! - exhaustive enumeration and classification of the mean-field equilibria
//!   and the full (ε, T) phase diagram with its critical curves
//!   ([`equilibrium`], [`curves`]),
//! - per-subpopulation cost functionals and the equilibrium-selection
//!   predictor ([`selection`]),
//! - the symmetric N-player HJB system, solved backward on a fixed grid, and
//!   the continuous-time Markov chain simulation it drives ([`hjb`], [`sim`]).

pub mod curves;
pub mod equilibrium;
pub mod error;
pub mod hjb;
pub mod mfg;
mod numerics;
pub mod params;
pub mod selection;
pub mod sim;

pub use error::{Error, Result};
pub use params::{LocalField, ModelParams, SpinState, TerminalMean};
