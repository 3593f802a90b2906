//! Dynamics of point poles with complex, position-dependent strengths.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod invariants;
pub mod output;
pub mod plot;
pub mod scenario;
pub mod seabed;
pub mod types;
pub mod verify;

pub use dynamics::{velocity_fixed, velocity_general, velocity_seabed, VelocityField};
pub use error::{Error, Result};
pub use integrator::{
    integrate, integrate_ensemble, locate_crossing, Crossing, IntegratorConfig, Method, ZenoWindow,
};
pub use seabed::{PiecewiseLinearProfile, Seabed};
pub use types::{
    ComplexNumber, Event, EventKind, Pole, Separation, StrengthSpec, SystemState, Trajectory,
};
