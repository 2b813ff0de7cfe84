//! Stochastic evaluation of fractional-order derivatives and integrals.
//!
//! The crate simulates the Sibuya family of heavy-tailed discrete
//! distributions (three interchangeable methods), splits the binomial
//! weights of the backward fractional difference into signed probability
//! mixtures for any non-integer order in (0, 5), and evaluates
//!
//! * derivatives of Grünwald–Letnikov type by a Monte Carlo scheme over the
//!   sieved mixture distributions ([`estimators::gl_mc_estimate`]), checked
//!   against the deterministic backward difference
//!   ([`estimators::gl_deterministic`]),
//! * Riemann–Liouville integrals by averaging over the continuous Sibuya
//!   distribution on (0, 1) ([`estimators::rl_integral_mc_estimate`]),
//!   checked against adaptive quadrature
//!   ([`estimators::rl_integral_quadrature`]),
//!
//! with Mittag-Leffler closed forms ([`special`], [`functions`]) as exact
//! oracles and reproducible seeded sampling throughout ([`samplers`]).
//!
//! All numeric code is generic over the scalar type via [`Real`]
//! (`f32`/`f64`); the aliases at the crate root pin the `f64` instantiations
//! that the accuracy contracts and the command-line tool use.
//!
//! ```
//! use fracmc_core::samplers::{SibuyaMethod, UniformSource};
//! use fracmc_core::SibuyaSpec64;
//!
//! let spec = SibuyaSpec64::new(0.5, SibuyaMethod::BetaGeometric).unwrap();
//! let mut src = UniformSource::new(42);
//! let y = spec.sample(&mut src).unwrap();
//! assert!(y >= 1);
//! ```

pub mod error;
pub mod estimators;
pub mod functions;
mod quad;
pub mod real;
pub mod samplers;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` instantiations of the core generic types.
pub type FractionalOrder64 = weights::FractionalOrder<f64>;
pub type WeightSequence64 = weights::WeightSequence<f64>;
pub type WeightPartition64 = weights::WeightPartition<f64>;
pub type MlParams64 = special::MlParams<f64>;
pub type SibuyaSpec64 = samplers::SibuyaSpec<f64>;
pub type EstimatorConfig64 = estimators::EstimatorConfig<f64>;
pub type TrialSummary64 = estimators::TrialSummary<f64>;
pub type Evaluand64 = estimators::Evaluand<f64>;
pub type TestFunction64 = functions::TestFunction<f64>;

/// `f32` instantiations, for callers that trade precision for footprint.
pub type SibuyaSpec32 = samplers::SibuyaSpec<f32>;
pub type MlParams32 = special::MlParams<f32>;
