//! Three small views over the valuation model, compiled to WebAssembly.
//!
//! Every export takes plain numbers or strings and returns a JSON string so
//! the page needs no bindings beyond `JSON.parse`.

use hscore::engine::{EngineSettings, Model};
use hscore::future_picks::{sigma_of_weights, x_delta};
use hscore::ingest::read_weekly_stats;
use hscore::objective::{evaluate, tipping_points, DifferentialDistribution};
use hscore::roster::assign_open_slots;
use hscore::{Format, LeagueConfig, Position};
use nalgebra::DVector;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const DEMO_STATS: &str = include_str!("../data/demo_stats.csv");

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

#[derive(Debug, Serialize)]
pub struct MatchupView {
    pub value: f64,
    pub win_probabilities: Vec<f64>,
    pub tipping_points: Vec<f64>,
    pub mean_gradient: Vec<f64>,
}

/// Category win probabilities, tipping points and `∂V/∂μ` for one matchup.
pub fn matchup_view(means: &[f64], variances: &[f64], format: &str) -> hscore::Result<MatchupView> {
    let format: Format = format.parse()?;
    let dist = DifferentialDistribution::new(DVector::from_column_slice(means), DVector::from_column_slice(variances));
    let eval = evaluate(format, &dist)?;
    Ok(MatchupView {
        value: eval.value,
        tipping_points: tipping_points(&eval.win_probabilities).as_slice().to_vec(),
        win_probabilities: eval.win_probabilities.as_slice().to_vec(),
        mean_gradient: eval.mean_gradient.as_slice().to_vec(),
    })
}

#[wasm_bindgen]
pub fn matchup(means: &[f64], variances: &[f64], format: &str) -> Result<String, JsError> {
    matchup_view(means, variances, format).map(|v| json(&v)).map_err(js)
}

#[derive(Debug, Serialize)]
pub struct SlotView {
    pub player: usize,
    pub slot: String,
}

#[derive(Debug, Serialize)]
pub struct RosterView {
    pub feasible: bool,
    pub slots: Vec<SlotView>,
    pub open: Vec<String>,
}

/// Places a roster (one `PG/SG` style string per player) into the default
/// slot structure and lists the slots left open.
pub fn roster_view(players: &[String]) -> hscore::Result<RosterView> {
    let structure = LeagueConfig::default().position_structure;
    let parsed = players
        .iter()
        .map(|s| s.split(['/', '|', ',']).map(str::parse).collect::<hscore::Result<Vec<Position>>>())
        .collect::<hscore::Result<Vec<_>>>()?;
    let chosen: Vec<&[Position]> = parsed.iter().map(Vec::as_slice).collect();
    match assign_open_slots(&chosen, &structure, &DVector::zeros(5)) {
        Ok((assignment, _)) => {
            let cols = &assignment.row_to_col;
            Ok(RosterView {
                feasible: true,
                slots: (0..chosen.len()).map(|r| SlotView { player: r, slot: structure[cols[r]].to_string() }).collect(),
                open: cols[chosen.len()..].iter().map(|&c| structure[c].to_string()).collect(),
            })
        }
        Err(hscore::Error::Infeasible) => Ok(RosterView { feasible: false, slots: Vec::new(), open: Vec::new() }),
        Err(e) => Err(e),
    }
}

#[wasm_bindgen]
pub fn roster(players_json: &str) -> Result<String, JsError> {
    let players: Vec<String> = serde_json::from_str(players_json).map_err(js)?;
    roster_view(&players).map(|v| json(&v)).map_err(js)
}

#[derive(Debug, Serialize)]
pub struct FuturePicksView {
    pub categories: Vec<String>,
    pub v: Vec<f64>,
    pub sigma: f64,
    pub x_delta: Vec<f64>,
}

/// A 12-team league built from a bundled synthetic pool.
#[wasm_bindgen]
pub struct Demo {
    model: Model,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Demo, JsError> {
        let pool = read_weekly_stats(DEMO_STATS.as_bytes()).map_err(js)?;
        let model = Model::new(pool, LeagueConfig::default(), EngineSettings::default()).map_err(js)?;
        Ok(Demo { model })
    }

    /// Expected shortfall of the remaining picks when drafting toward
    /// `weights`.
    #[wasm_bindgen(js_name = futurePicks)]
    pub fn future_picks(&self, weights: &[f64], picks_remaining: usize) -> Result<String, JsError> {
        self.future_picks_view(weights, picks_remaining).map(|v| json(&v)).map_err(js)
    }
}

impl Demo {
    pub fn future_picks_view(&self, weights: &[f64], picks_remaining: usize) -> hscore::Result<FuturePicksView> {
        let m = &self.model;
        if weights.len() != m.v.len() {
            return Err(hscore::Error::Sizing(format!("{} weights for {} categories", weights.len(), m.v.len())));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(hscore::Error::Domain("weights must be non-negative with a positive sum".into()));
        }
        let j = DVector::from_column_slice(weights) / total;
        Ok(FuturePicksView {
            categories: m.config.categories.iter().map(|c| c.code().to_string()).collect(),
            v: m.v.as_slice().to_vec(),
            sigma: sigma_of_weights(&j, &m.v, &m.covariance)?,
            x_delta: x_delta(&j, m.delta_params(), &m.covariance, &m.v, picks_remaining)?.as_slice().to_vec(),
        })
    }
}
