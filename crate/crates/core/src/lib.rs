//! Slab-geometry transport in binary stochastic mixtures.
//!
//! The crate solves the Levermore-Pomraning model for two randomly mixed
//! materials with homogeneous Markov statistics. Two iteration schemes are
//! provided:
//!
//! * [`driver::run_multilevel`]: a three-level nonlinear projection method.
//!   Material angular fluxes are relaxed by Gauss-Seidel transport sweeps,
//!   then corrected through low-order Yvon-Mertens equations for the material
//!   partial scalar fluxes and low-order quasidiffusion equations for the
//!   ensemble scalar flux and current, traversed as a V-cycle.
//! * [`baseline::run_source_iteration`]: plain source iteration sharing the
//!   same transport sweep, used as the unaccelerated reference.
//!
//! Space is discretized with linear discontinuous finite elements, stored as
//! left/right nodal values per cell. Angle uses a double Gauss-Legendre set.
//! The low-order equations are the exact angular moments of the discrete
//! transport equations, so both solvers converge to the same discrete
//! solution.

pub mod baseline;
pub mod blocktri;
pub mod closures;
pub mod driver;
mod error;
pub mod field;
pub mod highorder;
pub mod loqd;
pub mod loym;
pub mod problem;
pub mod quadrature;

pub use driver::{IterationHistory, IterationOptions, MultilevelSolution};
pub use error::{Error, Result};
pub use field::LdField;
pub use problem::{MaterialSpec, ProblemSpec, TestId};
pub use quadrature::AngularQuadrature;
