//! Harmonic multi-particle systems on metric graphs.
//!
//! Particles sit on a segment, a circle or a two-edge star graph and interact
//! with their nearest neighbours through quadratic springs. The crate provides
//!
//! * the potential energy and forces of every supported scenario ([`chain_model`]),
//! * closed-form equilibria together with an independent quadratic minimiser
//!   ([`equilibria`]),
//! * the eigen-decomposition of the periodically forced fixed-end chain and its
//!   exact modal trajectories ([`spectral`]),
//! * exact and empirical time averages of per-particle energies, N to infinity
//!   limits and the continuum energy density ([`energy_stats`]),
//! * fixed-step time integration of damped and driven dynamics ([`dynamics`]).
//!
//! The static parts (`chain_model`, `equilibria`) are generic over any
//! [`Scalar`], which includes exact rationals; everything that needs `sin`,
//! `cos` or `sqrt` is generic over [`Real`].

pub mod chain_model;
pub mod dynamics;
pub mod energy_stats;
pub mod equilibria;
mod error;
pub mod linalg;
pub mod ode;
pub mod quadrature;
mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{compensated_sum, Real, Scalar};

/// Exact rational scalar used for bit-exact checks of the static formulas.
pub type Rational = num_rational::Ratio<i128>;

pub type ScenarioSpec = chain_model::ScenarioSpec<f64>;
pub type Configuration = chain_model::Configuration<f64>;
pub type ChainState = chain_model::ChainState<f64>;
pub type EquilibriumResult = equilibria::EquilibriumResult<f64>;
pub type SpectralModel = spectral::SpectralModel<f64>;
pub type ForcedResponse = spectral::ForcedResponse<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;

pub type ExactScenarioSpec = chain_model::ScenarioSpec<Rational>;
pub type ExactConfiguration = chain_model::Configuration<Rational>;
pub type ExactEquilibriumResult = equilibria::EquilibriumResult<Rational>;
