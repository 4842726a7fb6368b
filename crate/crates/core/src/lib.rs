//! Two-player games over non-distributive lattices of yes/no questions.
//!
//! Each player's strategy is a qubit wave function; a lattice atom (a question
//! or a ball position) is represented by a rank-one projector and the Born rule
//! turns a strategy into frequencies on every complement pair at once. Alice's
//! average profit is the expectation of a payoff operator in the product state.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`.
// Index loops read closest to the matrix algebra; `!(x > 0)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]


pub mod equilibrium;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod payoff;
pub mod scalar;
pub mod simulator;
pub mod strategy;

pub use error::{Error, Result};
pub use lattice::{build_lattice, BooleanBlock, LatticeElement, OrthoLattice};
pub use scalar::Scalar;

pub type StateVector = linalg::StateVector<f64>;
pub type ComplexMatrix2 = linalg::ComplexMatrix2<f64>;
pub type ComplexMatrix4 = linalg::ComplexMatrix4<f64>;
pub type ObservableFrame = strategy::ObservableFrame<f64>;
pub type BornProfile = strategy::BornProfile<f64>;
pub type UncertaintyReport = strategy::UncertaintyReport<f64>;
pub type InterferenceReport = strategy::InterferenceReport<f64>;
pub type PayoffMatrix = payoff::PayoffMatrix<f64>;
pub type ReducedCoefficients = payoff::ReducedCoefficients<f64>;
pub type GameSpec = payoff::GameSpec<f64>;
pub type RealGame = payoff::RealGame<f64>;
pub type BlochForm = payoff::BlochForm<f64>;
pub type ReactionCurve = equilibrium::ReactionCurve<f64>;
pub type EquilibriumResult = equilibrium::EquilibriumResult<f64>;

pub type StateVector32 = linalg::StateVector<f32>;
pub type GameSpec32 = payoff::GameSpec<f32>;
pub type RealGame32 = payoff::RealGame<f32>;
