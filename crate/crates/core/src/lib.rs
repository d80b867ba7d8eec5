//! Kinetic model of opinion exchange with hard bounds |m| < 1.
//!
//! Opinions are treated as unit-mass particles in 1+1 dimensions: the
//! momentum p = m gamma(m) is unbounded while the opinion stays inside
//! (-1, 1). Pairs exchange momentum inelastically with a random kick, and
//! an external party pulls every momentum towards a fixed value.
//!
//! * [`dsmc`] solves the kinetic equation with particles.
//! * [`diagnostics`] turns an ensemble into density, flow, temperature and
//!   the nonequilibrium parts of the stress tensor.
//! * [`theory`] holds the closed-form equilibrium results the simulations
//!   are checked against.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collision;
pub mod diagnostics;
pub mod dsmc;
pub mod equilibrium;
pub mod error;
pub mod kinematics;
pub mod par;
pub mod quad;
pub mod specfun;
pub mod theory;

pub use error::{Error, Result};
