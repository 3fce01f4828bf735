//! Seat-by-seat agent comparisons.
//!
//! For each seat under test, one snake draft is run with the H-score agent
//! in that seat and G-score drafters everywhere else. The drafted rosters
//! then play many bootstrapped seasons.

use hscore::engine::{run_draft, DraftState, Drafter, Model, TranscriptEntry};
use hscore::future_picks::{sigma_of_weights, CalibrationObservation};
use hscore::{CategoryVector, Error, Format, Result};
use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::season::{simulate_season, WeekBank};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seasons: usize,
    /// Weeks per season; the league config's value when absent.
    pub weeks: Option<usize>,
    pub seed: u64,
    /// Seats that take the H-score agent in turn. All seats when empty.
    pub seats: Vec<usize>,
    /// All-G-score control: draft order reshuffled every season.
    pub control: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { seasons: 1000, weeks: None, seed: 0, seats: Vec::new(), control: false }
    }
}

/// Binomial standard error of a rate.
pub fn binomial_std_error(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatOutcome {
    pub seat: usize,
    pub seasons: usize,
    pub championships: usize,
    pub rate: f64,
    pub std_error: f64,
    /// Championship rate of every team; sums to one.
    pub team_rates: Vec<f64>,
    /// The seat's per-category weekly win rate, one row per season.
    pub category_rates: Vec<Vec<f64>>,
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format: Format,
    pub categories: Vec<hscore::Category>,
    pub seats: Vec<SeatOutcome>,
    pub calibration: Vec<CalibrationObservation>,
}

impl ExperimentReport {
    /// Championship rate pooled over all seats and its standard error.
    pub fn mean_rate(&self) -> (f64, f64) {
        let n: usize = self.seats.iter().map(|s| s.seasons).sum();
        let wins: usize = self.seats.iter().map(|s| s.championships).sum();
        let p = if n == 0 { 0.0 } else { wins as f64 / n as f64 };
        (p, binomial_std_error(p, n))
    }

    /// Every category-season win rate of the tested seats.
    pub fn category_cells(&self) -> Vec<f64> {
        self.seats
            .iter()
            .flat_map(|s| s.category_rates.iter().flatten().copied())
            .collect()
    }
}

fn season_rng(seed: u64, seat: usize, season: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((seat as u64) << 32) | season as u64);
    rng
}

fn banks(model: &Model) -> Result<Vec<Option<WeekBank>>> {
    Ok(model.players.iter().map(WeekBank::new).collect())
}

fn roster_banks<'a>(state: &DraftState, banks: &'a [Option<WeekBank>], model: &Model) -> Result<Vec<Vec<&'a WeekBank>>> {
    state
        .rosters
        .iter()
        .map(|r| {
            r.iter()
                .map(|&i| {
                    banks[i].as_ref().ok_or_else(|| {
                        Error::Domain(format!("player `{}` has no healthy weeks", model.players[i].player_id))
                    })
                })
                .collect()
        })
        .collect()
}

fn play_seasons(
    model: &Model,
    state: &DraftState,
    banks: &[Option<WeekBank>],
    seat: usize,
    cfg: &ExperimentConfig,
    weeks: usize,
) -> Result<(Vec<usize>, Vec<Vec<f64>>)> {
    let rosters = roster_banks(state, banks, model)?;
    let cats = &model.config.categories;
    let format = model.config.format;
    let seasons: Vec<(usize, Vec<f64>)> = (0..cfg.seasons)
        .into_par_iter()
        .map(|s| {
            let mut rng = season_rng(cfg.seed, seat, s);
            let result = simulate_season(&rosters, cats, format, weeks, &mut rng);
            (result.champion, result.category_rates(seat))
        })
        .collect();
    let mut counts = vec![0usize; model.config.num_teams];
    let mut rates = Vec::with_capacity(seasons.len());
    for (champ, r) in seasons {
        counts[champ] += 1;
        rates.push(r);
    }
    Ok((counts, rates))
}

/// `(σ, m, k)` for each of a team's H-score decisions that has later picks.
///
/// `m` and `k` average, over the team's later picks, the pick's advantage
/// over the mean of other teams' picks in the same round, measured along
/// the decision's weights and against `v` respectively.
pub fn calibration_observations(
    model: &Model,
    state: &DraftState,
    transcript: &[TranscriptEntry],
    team: usize,
) -> Result<Vec<CalibrationObservation>> {
    let n = state.num_teams;
    let dim = model.v.len();
    let rounds = state.picks.len().div_ceil(n);
    let mut advantage: Vec<Option<CategoryVector>> = vec![None; rounds];
    for (r, slot) in advantage.iter_mut().enumerate() {
        let picks = &state.picks[r * n..((r + 1) * n).min(state.picks.len())];
        let mine = picks.iter().find(|p| p.team == team);
        let others: Vec<&CategoryVector> = picks.iter().filter(|p| p.team != team).map(|p| &model.x_scores[p.player]).collect();
        if let (Some(mine), false) = (mine, others.is_empty()) {
            let baseline = others.iter().fold(DVector::zeros(dim), |a, x| a + *x) / others.len() as f64;
            *slot = Some(&model.x_scores[mine.player] - baseline);
        }
    }
    let mut out = Vec::new();
    for entry in transcript.iter().filter(|e| e.team == team && !e.weights.is_empty()) {
        let round = entry.ordinal / n;
        let later: Vec<&CategoryVector> = advantage[round + 1..].iter().flatten().collect();
        if later.is_empty() {
            continue;
        }
        let j = DVector::from_vec(entry.weights.clone());
        let sigma = sigma_of_weights(&j, &model.v, &model.covariance)?;
        let count = later.len() as f64;
        let m = later.iter().map(|d| j.dot(d)).sum::<f64>() / count;
        let k = -later.iter().map(|d| model.v.dot(d)).sum::<f64>() / count;
        out.push(CalibrationObservation { sigma, m, k });
    }
    Ok(out)
}

fn finish_seat(
    seat: usize,
    counts: Vec<usize>,
    category_rates: Vec<Vec<f64>>,
    transcript: Vec<TranscriptEntry>,
) -> SeatOutcome {
    let seasons: usize = counts.iter().sum();
    let team_rates: Vec<f64> = counts.iter().map(|&c| c as f64 / seasons.max(1) as f64).collect();
    let rate = team_rates.get(seat).copied().unwrap_or(0.0);
    SeatOutcome {
        seat,
        seasons,
        championships: counts.get(seat).copied().unwrap_or(0),
        rate,
        std_error: binomial_std_error(rate, seasons),
        team_rates,
        category_rates,
        transcript,
    }
}

/// Runs the experiment for every configured seat.
pub fn run_experiment(model: &Model, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.seasons == 0 {
        return Err(Error::Config("seasons must be at least 1".into()));
    }
    let num_teams = model.config.num_teams;
    let weeks = cfg.weeks.unwrap_or(model.config.weeks_per_season);
    if weeks == 0 {
        return Err(Error::Config("weeks must be at least 1".into()));
    }
    let seats: Vec<usize> = if cfg.seats.is_empty() { (0..num_teams).collect() } else { cfg.seats.clone() };
    if let Some(&bad) = seats.iter().find(|&&s| s >= num_teams) {
        return Err(Error::Config(format!("seat {bad} outside a {num_teams}-team league")));
    }
    let banks = banks(model)?;
    if cfg.control {
        return run_control(model, cfg, &banks, weeks);
    }
    let mut outcomes = Vec::with_capacity(seats.len());
    let mut calibration = Vec::new();
    for &seat in &seats {
        let mut drafters = vec![Drafter::GScore; num_teams];
        drafters[seat] = Drafter::HScore;
        let (state, transcript) = run_draft(model, &drafters)?;
        calibration.extend(calibration_observations(model, &state, &transcript, seat)?);
        let (counts, rates) = play_seasons(model, &state, &banks, seat, cfg, weeks)?;
        outcomes.push(finish_seat(seat, counts, rates, transcript));
    }
    Ok(ExperimentReport {
        format: model.config.format,
        categories: model.config.categories.clone(),
        seats: outcomes,
        calibration,
    })
}

/// All teams draft by G-score. Each season every seat takes a random draft
/// position, so seats differ only by luck of the draw.
fn run_control(model: &Model, cfg: &ExperimentConfig, banks: &[Option<WeekBank>], weeks: usize) -> Result<ExperimentReport> {
    let n = model.config.num_teams;
    // G-score drafting is deterministic, so one draft gives the roster of every draft position
    let (state, transcript) = run_draft(model, &vec![Drafter::GScore; n])?;
    let rosters = roster_banks(&state, banks, model)?;
    let cats = &model.config.categories;
    let seasons: Vec<(usize, Vec<Vec<f64>>)> = (0..cfg.seasons)
        .into_par_iter()
        .map(|s| {
            let mut rng = season_rng(cfg.seed, usize::MAX >> 32, s);
            // seat t drafts from position order[t]
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let seated: Vec<Vec<&WeekBank>> = order.iter().map(|&pos| rosters[pos].clone()).collect();
            let result = simulate_season(&seated, cats, model.config.format, weeks, &mut rng);
            let rates = (0..n).map(|t| result.category_rates(t)).collect();
            (result.champion, rates)
        })
        .collect();
    let mut counts = vec![0usize; n];
    let mut per_seat: Vec<Vec<Vec<f64>>> = vec![Vec::new(); n];
    for (champ, rates) in seasons {
        counts[champ] += 1;
        for (seat, r) in rates.into_iter().enumerate() {
            per_seat[seat].push(r);
        }
    }
    let seats = per_seat
        .into_iter()
        .enumerate()
        .map(|(seat, rates)| {
            let mut out = finish_seat(seat, counts.clone(), rates, Vec::new());
            if seat == 0 {
                out.transcript = transcript.clone();
            }
            out
        })
        .collect();
    Ok(ExperimentReport {
        format: model.config.format,
        categories: model.config.categories.clone(),
        seats,
        calibration: Vec::new(),
    })
}
