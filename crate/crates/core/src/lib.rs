//! Ground-state phases of the Jaynes-Cummings-Hubbard chain with long-range
//! Rydberg-mediated photon repulsion.
//!
//! [`staircase`] builds the zero-hopping Devil's staircase, [`defects`] melts
//! it into the floating solid, [`frozen`] handles the resonant two-excitation
//! regime, and [`oracle`] checks all of them by brute force on small rings.

pub mod config;
pub mod defects;
pub mod error;
pub mod estimate;
pub mod frozen;
pub mod model;
pub mod oracle;
pub mod phase_map;
pub mod staircase;
pub mod validation;

pub use error::{Error, Result};
pub use model::{Convention, ModelParams, RangeCutoff};
pub use phase_map::{Axis, Cell, MapLabel, PhaseMap};
pub use staircase::{CrystalPhase, Filling, StaircaseModel};
