//! Timing-channel jamming game between a covert transmitter and a reactive
//! jammer: best responses, Nash and Stackelberg equilibria, leader play
//! under an uncertain jammer weight, and a cycle-level simulator.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod belief;
pub mod best_response;
pub mod config;
pub mod error;
pub mod model;
pub mod nash;
pub mod quadrature;
pub mod report;
pub mod sim;
pub mod special_fn;
pub mod stackelberg;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{GameParams, StrategyProfile, UtilityPair};
pub use nash::{EquilibriumResult, Regime};
