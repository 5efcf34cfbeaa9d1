//! Models of photon condensation in dye-filled optical microcavities.
//!
//! The crate covers two statistical pictures of a few-photon condensate and
//! the machinery around them:
//!
//! * [`bose`]: Bose-Einstein occupation of a 2D isotropic harmonic trap, the
//!   chemical-potential solver and ground-state population curves.
//! * [`microlaser`]: single-mode microlaser rate equations, their closed-form
//!   steady state and a time-domain integrator.
//! * [`comparison`]: matching of the two models through their low-population
//!   slope and the resulting deviation curves.
//! * [`cavity`]: microcavity geometry mapped onto a massive particle in a trap.
//! * [`gpe`]: split-step solver for the driven-dissipative Gross-Pitaevskii
//!   equation on a periodic 2D grid.
//! * [`spectro`]: Kennard-Stepanov analysis of absorption and fluorescence
//!   spectra.
//!
//! Everything is a pure function of its inputs; sweeps may be parallelised
//! freely by the caller.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bose;
pub mod cavity;
pub mod comparison;
pub mod constants;
pub mod error;
pub mod gpe;
pub mod knee;
pub mod microlaser;
pub mod ode;
pub mod spectro;

pub use error::{Error, Result};
