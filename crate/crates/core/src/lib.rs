//! Biquaternionic electro-gravimagnetic field model.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: biquaternion values, their product, conjugations and norms.
//! * [`fields`]: periodic grids of biquaternions, finite-difference
//!   bigradients `∇± = ∂τ ± i∇` and the wave operator.
//! * [`egm`]: tension `A`, charge-current `Θ`, energy-pulse `Ξ`, the
//!   (modified) Maxwell equations `∇⁺A = Θ` and their conservation laws.
//! * [`lorentz`]: boosts and rotations as biquaternion conjugations.
//! * [`dynamics`]: power-force densities, the charge-current interaction
//!   equations and their energy/stress diagnostics.
//! * [`propagator`]: light-cone (Kirchhoff-type) solvers for `∇±K = G`.
//!
//! Units are nondimensional with the wave speed equal to one. The guide in
//! `book/` walks through each layer with runnable snippets.

pub mod algebra;
pub mod dynamics;
pub mod egm;
pub mod fields;
pub mod lorentz;
pub mod propagator;

pub use algebra::{Biquaternion, Complex, Vec3C};
pub use fields::{BiqField, Field, Grid, SampleStack, Sign, Stencil};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),
    #[error("sample stack needs at least {needed} slices, got {got}")]
    InsufficientSlices { needed: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("speed |v| = {0} must be below 1")]
    Superluminal(f64),
    #[error("malformed event: {0}")]
    MalformedEvent(String),
    #[error("time step dt = {dt} exceeds the bound h/2 = {limit}")]
    TimeStep { dt: f64, limit: f64 },
    #[error("NaN detected at step {step} in {field} at grid index {index}")]
    NanDetected {
        step: usize,
        field: String,
        index: usize,
    },
    #[error("imaginary residue {residue:e} of {quantity} exceeds tolerance")]
    NonReal { quantity: &'static str, residue: f64 },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("time {tau} outside (0, {horizon}]")]
    OutsideHorizon { tau: f64, horizon: f64 },
    #[error("bad field dump: {0}")]
    Dump(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/algebra.md")]
    mod algebra {}
    #[doc = include_str!("../../../book/src/bigradients.md")]
    mod bigradients {}
    #[doc = include_str!("../../../book/src/maxwell.md")]
    mod maxwell {}
    #[doc = include_str!("../../../book/src/lorentz.md")]
    mod lorentz {}
    #[doc = include_str!("../../../book/src/newton.md")]
    mod newton {}
    #[doc = include_str!("../../../book/src/kirchhoff.md")]
    mod kirchhoff {}
}
