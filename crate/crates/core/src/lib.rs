//! Front tracking and boundary control for one-dimensional hyperbolic
//! systems of conservation laws on a bounded interval.
//!
//! The crate is layered bottom-up:
//!
//! * [`flux_models`]: systems, eigenstructure, hypothesis checks;
//! * [`wave_curves`]: rarefaction, shock and composite Lax curves;
//! * [`riemann`]: Riemann problems and the boundary splitting problems;
//! * [`fronttrack`]: the event-driven front-tracking engine;
//! * [`control`]: exact linear control, steering and stabilization;
//! * [`analysis`]: wave-density, shock-persistence and census diagnostics;
//! * [`scenario`]: configuration files, the runner and report writers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod control;
pub mod error;
pub mod flux_models;
pub mod fronttrack;
pub mod linalg;
pub mod profile;
pub mod riemann;
pub mod scenario;
pub mod wave_curves;

pub use error::{Error, Result};
pub use flux_models::{state, FluxModel, State};
