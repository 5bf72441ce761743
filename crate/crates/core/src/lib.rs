//! Cooperative-equilibrium and social-preference predictions for N-player
//! highly symmetric social dilemmas: the public goods game, the N-person
//! prisoner's dilemma, Bertrand competition and a public goods game with
//! an arbitrary benefit sequence.
//!
//! Every closed form is paired with a brute-force check in [`oracle`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coopeq;
pub mod empirics;
pub mod error;
pub mod games;
pub mod oracle;
pub mod preferences;

pub use coopeq::{forecast, solve, CoalitionStructure, ForecastReport, Prediction};
pub use error::{Error, Result};
pub use games::{GameSpec, SymmetricAction, Variant};
