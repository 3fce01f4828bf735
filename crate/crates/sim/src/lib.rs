//! Monte Carlo seasons for head-to-head category leagues.
//!
//! - [`synth`]: reproducible synthetic player pools
//! - [`season`]: bootstrap week sampling, weekly scoring, round robin seasons
//! - [`experiment`]: seat-by-seat H-score versus G-score drafts
//! - [`gradient`]: objective sensitivities under correlated categories
//! - [`output`]: CSV and JSON-lines writers for experiment results

pub mod experiment;
pub mod gradient;
pub mod output;
pub mod season;
pub mod synth;

pub use experiment::{binomial_std_error, run_experiment, ExperimentConfig, ExperimentReport, SeatOutcome};
pub use gradient::{default_correlation, gradient_analysis, read_correlation, GradientConfig, GradientRow};
pub use season::{score_matchup, simulate_season, SeasonResult, WeekBank};
pub use synth::{generate_pool, SynthConfig};
pub use output::write_experiment;
