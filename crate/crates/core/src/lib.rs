//! Equilibria, polarization and opinion dynamics for the indoctrination
//! contest: players spend effort to make their fixed opinion prominent in a
//! public debate, paying for effort and losing the expected distance between
//! their opinion and what is publicly observed.
//!
//! - [`game`]: domain types, observed distributions and payoffs.
//! - [`equilibrium`]: closed-form equilibria of the full-monitoring game.
//! - [`limited`]: the three-opinion game under limited exposure.
//! - [`dynamics`]: the generational process and its stationary shares.
//! - [`verification`]: best-response, first-order and finite-difference oracles.
//! - [`cli`]: the command-line front end.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod limited;
pub mod verification;

pub use error::{GameError, Result};
pub use game::{
    AggregateEfforts, EffortProfile, ExposureLevel, ObservedDistribution, OpinionConfig, Payoff,
};
