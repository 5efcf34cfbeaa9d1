//! Driven-dissipative Gross-Pitaevskii equation for the condensate mode.
//!
//! The order parameter obeys
//!
//! ```text
//! iħ ∂ψ/∂t = [V(r) - ħ²∇²/2m + g|ψ|²] ψ + iħ (γ_net - Γ|ψ|²) ψ
//! ```
//!
//! with `γ_net` (1/s) the net gain and `Γ` (m²/s) the gain saturation, so a
//! uniform driven state relaxes to `|ψ|² = γ_net/Γ`. The rest-mass energy is
//! a global phase and is left out. Integration is Strang split-step: half a
//! kinetic step in Fourier space, an exact local step in position space,
//! another half kinetic step. Boundaries are periodic, optionally with an
//! absorbing edge layer.

mod fft;
mod field;
mod solver;

pub use field::{ComplexField2D, Grid2D};
pub use solver::{
    evolve, ground_state, ground_state_with, observables, Boundary, Evolution, GpeParams,
    GroundStateOptions, Observables, Potential, Sample,
};
