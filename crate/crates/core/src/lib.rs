//! Dynamic draft valuation for head-to-head category fantasy basketball.
//!
//! The crate models a manager's remaining draft as a continuous strategy
//! (category weights plus flex-slot shares), turns that strategy into a
//! Gaussian differential against every opponent, and picks the candidate
//! whose locally optimized strategy maximizes the expected result under
//! either the Each Category or the Most Categories format.
//!
//! Module map:
//!
//! - [`ingest`]: weekly stats CSV, eligible pool, relevant set selection
//! - [`scoring`]: league aggregates, X-scores, G-scores, the `v` vector
//! - [`future_picks`]: covariance of player means and the future-pick differential
//! - [`roster`] / [`lap`]: positional slots and the assignment solver
//! - [`objective`]: win probabilities, format objectives and gradients
//! - [`optimizer`]: Adam ascent over strategy parameters
//! - [`engine`]: draft state, candidate evaluation, pick selection
//! - [`auction`]: replacement level, dollar benefit and cash equivalents

pub mod auction;
pub mod category;
pub mod config;
pub mod engine;
pub mod error;
pub mod future_picks;
pub mod ingest;
pub mod lap;
pub mod normal;
pub mod objective;
pub mod optimizer;
pub mod roster;
pub mod scoring;

pub use category::{Category, CategoryKind, Position, Slot};
pub use config::{Format, LeagueConfig};
pub use error::{Error, Result};

/// Category-indexed real vector. Which basis it lives in (raw, X-score,
/// G-score, weight) is carried by the name of the binding, not the type.
pub type CategoryVector = nalgebra::DVector<f64>;
