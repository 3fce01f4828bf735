//! Draft state, per-candidate H-scores and pick selection.
//!
//! For a team holding `K` players, the candidate's matchup against each
//! opponent is modeled as
//!
//! ```text
//! mean     = X_s + X_p + X_δ(j) + μ_Cᵀ P(j) − X_Om
//! variance = 2N + (N − K − 1) · σ²_X
//! ```
//!
//! where `X_s` are the team's players, `X_p` the candidate, `X_Om` the
//! opponent's `K + 1` players (padded with the mean of the next `N_T`
//! undrafted players when they have only `K`), and the future-pick terms
//! depend on the strategy `j`. The H-score is the format objective,
//! averaged over opponents, at the locally optimal `j`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::category::Position;
use crate::config::LeagueConfig;
use crate::error::{Error, Result};
use crate::future_picks::{x_delta, x_delta_jacobian, CategoryCovariance, DeltaParams};
use crate::ingest::{select_q, PlayerRecord};
use crate::objective::{evaluate, DifferentialDistribution};
use crate::optimizer::{initialize, optimize, OptimizerConfig, StrategyParams};
use crate::roster::{
    assign_open_slots, future_position_counts, is_feasible, position_rewards, positional_adjustment,
    FlexShares, OpenSlots, PositionMeans,
};
use crate::scoring::LeagueAggregates;
use crate::CategoryVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineSettings {
    /// Candidates considered per pick, taken from the top of the G-score order.
    pub shortlist: usize,
    pub optimizer: OptimizerConfig,
}

impl Default for EngineSettings {
    fn default() -> Self {
        Self { shortlist: 50, optimizer: OptimizerConfig::default() }
    }
}

/// Everything about the player universe that stays fixed during a draft.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: LeagueConfig,
    pub settings: EngineSettings,
    pub players: Vec<PlayerRecord>,
    pub x_scores: Vec<CategoryVector>,
    pub g_totals: Vec<f64>,
    /// Player indices by G-score total, descending; ties by player id.
    pub g_order: Vec<usize>,
    pub aggregates: LeagueAggregates,
    pub v: CategoryVector,
    pub covariance: CategoryCovariance,
    pub position_means: PositionMeans,
    index: HashMap<String, usize>,
}

impl Model {
    /// Builds aggregates, covariance and position means from the relevant
    /// set chosen out of `pool`.
    pub fn new(pool: Vec<PlayerRecord>, config: LeagueConfig, settings: EngineSettings) -> Result<Self> {
        config.validate()?;
        let q = select_q(&pool, &config)?;
        let aggregates = LeagueAggregates::compute(&q, &config.categories)?;
        let covariance = CategoryCovariance::from_players(&q, &aggregates)?;
        let position_means = PositionMeans::from_players(&q, &aggregates)?;
        Self::from_parts(pool, config, settings, aggregates, covariance, position_means)
    }

    /// Assembles a model from precomputed statistics.
    pub fn from_parts(
        players: Vec<PlayerRecord>,
        config: LeagueConfig,
        settings: EngineSettings,
        aggregates: LeagueAggregates,
        covariance: CategoryCovariance,
        position_means: PositionMeans,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(players.len());
        for (i, p) in players.iter().enumerate() {
            if index.insert(p.player_id.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate player id `{}`", p.player_id)));
            }
        }
        let x_scores: Vec<CategoryVector> = players.iter().map(|p| aggregates.x_score(p)).collect();
        let v_raw = aggregates.v_raw();
        let g_totals: Vec<f64> = x_scores.iter().map(|x| x.dot(&v_raw)).collect();
        let mut g_order: Vec<usize> = (0..players.len()).collect();
        g_order.sort_by(|&a, &b| {
            g_totals[b]
                .total_cmp(&g_totals[a])
                .then_with(|| players[a].player_id.cmp(&players[b].player_id))
        });
        let v = aggregates.v_vector();
        Ok(Self {
            config,
            settings,
            players,
            x_scores,
            g_totals,
            g_order,
            aggregates,
            v,
            covariance,
            position_means,
            index,
        })
    }

    pub fn player_index(&self, player_id: &str) -> Result<usize> {
        self.index
            .get(player_id)
            .copied()
            .ok_or_else(|| Error::UnknownPlayer(player_id.to_string()))
    }

    pub fn delta_params(&self) -> DeltaParams {
        DeltaParams { omega: self.config.omega, gamma: self.config.gamma }
    }

    fn positions(&self, player: usize) -> &[Position] {
        &self.players[player].positions
    }
}

/// Team picking at a 0-based overall ordinal of a snake draft.
pub fn snake_team(ordinal: usize, num_teams: usize) -> usize {
    let round = ordinal / num_teams;
    let slot = ordinal % num_teams;
    if round % 2 == 0 {
        slot
    } else {
        num_teams - 1 - slot
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pick {
    pub ordinal: usize,
    pub team: usize,
    pub player: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DraftState {
    pub num_teams: usize,
    pub roster_size: usize,
    pub rosters: Vec<Vec<usize>>,
    pub picks: Vec<Pick>,
    drafted: Vec<bool>,
    /// Each team's last optimized strategy, used to seed the next decision.
    pub previous: Vec<Option<StrategyParams>>,
}

impl DraftState {
    pub fn new(model: &Model) -> Self {
        let n = model.config.num_teams;
        Self {
            num_teams: n,
            roster_size: model.config.roster_size,
            rosters: vec![Vec::new(); n],
            picks: Vec::new(),
            drafted: vec![false; model.players.len()],
            previous: vec![None; n],
        }
    }

    pub fn total_picks(&self) -> usize {
        self.num_teams * self.roster_size
    }

    pub fn is_complete(&self) -> bool {
        self.picks.len() >= self.total_picks()
    }

    /// Team on the clock under snake order, if the draft is not over.
    pub fn team_on_clock(&self) -> Option<usize> {
        (!self.is_complete()).then(|| snake_team(self.picks.len(), self.num_teams))
    }

    pub fn is_drafted(&self, player: usize) -> bool {
        self.drafted[player]
    }

    pub fn drafted_count(&self) -> usize {
        self.picks.len()
    }

    /// Records a pick for `team`, regardless of whose turn it is.
    pub fn apply(&mut self, model: &Model, team: usize, player: usize) -> Result<()> {
        if team >= self.num_teams {
            return Err(Error::Domain(format!("team {team} does not exist")));
        }
        if player >= self.drafted.len() {
            return Err(Error::Domain(format!("player index {player} out of range")));
        }
        if self.drafted[player] {
            return Err(Error::AlreadyDrafted(model.players[player].player_id.clone()));
        }
        if self.rosters[team].len() >= self.roster_size {
            return Err(Error::Sizing(format!("team {team} roster is full")));
        }
        self.drafted[player] = true;
        self.rosters[team].push(player);
        self.picks.push(Pick { ordinal: self.picks.len(), team, player });
        Ok(())
    }

    /// Undrafted players in G-score order.
    pub fn undrafted<'a>(&'a self, model: &'a Model) -> impl Iterator<Item = usize> + 'a {
        model.g_order.iter().copied().filter(|&i| !self.drafted[i])
    }

    fn chosen_positions<'a>(&self, model: &'a Model, team: usize, candidate: Option<usize>) -> Vec<&'a [Position]> {
        self.rosters[team]
            .iter()
            .chain(candidate.as_ref())
            .map(|&i| model.positions(i))
            .collect()
    }

    /// Whether `team` can add `candidate` and still fit the slot structure.
    pub fn is_feasible_pick(&self, model: &Model, team: usize, candidate: usize) -> bool {
        !self.drafted[candidate]
            && self.rosters[team].len() < self.roster_size
            && is_feasible(&self.chosen_positions(model, team, Some(candidate)), &model.config.position_structure)
    }

    pub fn team_x_sum(&self, model: &Model, team: usize) -> CategoryVector {
        self.rosters[team]
            .iter()
            .fold(DVector::zeros(model.v.len()), |acc, &i| acc + &model.x_scores[i])
    }
}

/// Mean X-score of the next `N_T` undrafted players in G-score order.
pub fn fill_profile(model: &Model, state: &DraftState) -> Result<CategoryVector> {
    let n = model.config.num_teams;
    let next: Vec<usize> = state.undrafted(model).take(n).collect();
    if next.len() < n {
        return Err(Error::PoolExhausted(format!("{} undrafted players left, need {n}", next.len())));
    }
    let sum = next.iter().fold(DVector::zeros(model.v.len()), |acc, &i| acc + &model.x_scores[i]);
    Ok(sum / n as f64)
}

/// `X_Om`: the opponent's players, padded to `k + 1` with the fill profile.
pub fn opponent_fill(model: &Model, state: &DraftState, opponent: usize, k: usize) -> Result<CategoryVector> {
    let have = state.rosters[opponent].len();
    let sum = state.team_x_sum(model, opponent);
    if have > k {
        return Ok(sum);
    }
    Ok(sum + fill_profile(model, state)? * (k + 1 - have) as f64)
}

/// Per-team quantities shared by every candidate at one decision.
#[derive(Debug, Clone)]
pub struct TeamContext<'a> {
    pub team: usize,
    /// Players already held.
    pub k: usize,
    pub picks_remaining: usize,
    pub x_s: CategoryVector,
    pub opponents: Vec<CategoryVector>,
    pub variance: CategoryVector,
    roster: Vec<&'a [Position]>,
}

impl<'a> TeamContext<'a> {
    pub fn new(model: &'a Model, state: &DraftState, team: usize) -> Result<Self> {
        let k = state.rosters.get(team).map_or(0, Vec::len);
        let opponents = (0..state.num_teams)
            .filter(|&o| o != team)
            .map(|o| opponent_fill(model, state, o, k))
            .collect::<Result<Vec<_>>>()?;
        Self::with_opponents(model, state, team, opponents)
    }

    /// Context with caller-supplied opponent terms: everything subtracted
    /// from the team's mean that does not depend on the strategy.
    pub fn with_opponents(
        model: &'a Model,
        state: &DraftState,
        team: usize,
        opponents: Vec<CategoryVector>,
    ) -> Result<Self> {
        if team >= state.num_teams {
            return Err(Error::Domain(format!("team {team} does not exist")));
        }
        let k = state.rosters[team].len();
        let n = model.config.roster_size;
        if k >= n {
            return Err(Error::Sizing(format!("team {team} roster is full")));
        }
        let picks_remaining = n - k - 1;
        if opponents.is_empty() {
            return Err(Error::Config("a league needs at least two teams".into()));
        }
        let variance = model.aggregates.x_sigma_sq.map(|s| 2.0 * n as f64 + picks_remaining as f64 * s);
        Ok(Self {
            team,
            k,
            picks_remaining,
            x_s: state.team_x_sum(model, team),
            opponents,
            variance,
            roster: state.chosen_positions(model, team, None),
        })
    }
}

/// Terms of one candidate's matchup mean at a fixed strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchupDecomposition {
    pub x_s: CategoryVector,
    pub x_p: CategoryVector,
    pub x_delta: CategoryVector,
    pub positional: CategoryVector,
    pub open: OpenSlots,
    pub variance: CategoryVector,
}

impl MatchupDecomposition {
    /// Mean differential before subtracting the opponent.
    pub fn team_mean(&self) -> CategoryVector {
        &self.x_s + &self.x_p + &self.x_delta + &self.positional
    }

    pub fn against(&self, opponent: &CategoryVector) -> DifferentialDistribution {
        DifferentialDistribution::new(self.team_mean() - opponent, self.variance.clone())
    }
}

pub fn decompose(
    model: &Model,
    ctx: &TeamContext<'_>,
    candidate: usize,
    params: &StrategyParams,
) -> Result<MatchupDecomposition> {
    let mut chosen = ctx.roster.clone();
    chosen.push(model.positions(candidate));
    let rewards = position_rewards(&params.weights, &model.position_means);
    let (_, open) = assign_open_slots(&chosen, &model.config.position_structure, &rewards)?;
    let p = future_position_counts(&open, &params.shares);
    Ok(MatchupDecomposition {
        x_s: ctx.x_s.clone(),
        x_p: model.x_scores[candidate].clone(),
        x_delta: x_delta(&params.weights, model.delta_params(), &model.covariance, &model.v, ctx.picks_remaining)?,
        positional: positional_adjustment(&p, &model.position_means),
        open,
        variance: ctx.variance.clone(),
    })
}

/// Distribution of the candidate's matchup against one opponent.
pub fn matchup_distribution(
    model: &Model,
    ctx: &TeamContext<'_>,
    candidate: usize,
    params: &StrategyParams,
    opponent: usize,
) -> Result<DifferentialDistribution> {
    let d = decompose(model, ctx, candidate, params)?;
    Ok(d.against(&ctx.opponents[opponent]))
}

/// `∂mean/∂params` in the flat strategy layout (categories x parameters).
fn mean_jacobian(model: &Model, ctx: &TeamContext<'_>, params: &StrategyParams, open: &OpenSlots) -> Result<DMatrix<f64>> {
    let c = params.weights.len();
    let mut jac = DMatrix::zeros(c, c + 9);
    let xd = x_delta_jacobian(&params.weights, model.delta_params(), &model.covariance, &model.v, ctx.picks_remaining)?;
    jac.view_mut((0, 0), (c, c)).copy_from(&xd);
    let mu = &model.position_means;
    for pos in Position::ALL {
        jac.set_column(c + pos.index(), &(mu.row(pos) * open.util));
    }
    jac.set_column(c + 5, &(mu.row(Position::PG) * open.guard));
    jac.set_column(c + 6, &(mu.row(Position::SG) * open.guard));
    jac.set_column(c + 7, &(mu.row(Position::PF) * open.forward));
    jac.set_column(c + 8, &(mu.row(Position::SF) * open.forward));
    Ok(jac)
}

/// Opponent-averaged objective at one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub win_probabilities: CategoryVector,
}

pub fn evaluate_strategy(
    model: &Model,
    ctx: &TeamContext<'_>,
    candidate: usize,
    params: &StrategyParams,
) -> Result<Evaluation> {
    let d = decompose(model, ctx, candidate, params)?;
    let team_mean = d.team_mean();
    let c = team_mean.len();
    let mut value = 0.0;
    let mut mean_grad = DVector::zeros(c);
    let mut w = DVector::zeros(c);
    for opp in &ctx.opponents {
        let dist = DifferentialDistribution::new(&team_mean - opp, d.variance.clone());
        let e = evaluate(model.config.format, &dist)?;
        value += e.value;
        mean_grad += e.mean_gradient;
        w += e.win_probabilities;
    }
    let n = ctx.opponents.len() as f64;
    let jac = mean_jacobian(model, ctx, params, &d.open)?;
    Ok(Evaluation {
        value: value / n,
        gradient: jac.transpose() * (mean_grad / n),
        win_probabilities: w / n,
    })
}

/// Result of valuing one candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    pub player_id: String,
    pub name: String,
    pub positions: Vec<Position>,
    #[serde(rename = "V")]
    pub value: f64,
    /// Opponent-averaged win probability per category.
    pub w: Vec<f64>,
    #[serde(rename = "j_C")]
    pub weights: Vec<f64>,
    pub shares: FlexShares,
    pub g_score: f64,
    pub iterations: usize,
    pub feasible: bool,
}

impl ObjectiveReport {
    pub fn strategy(&self) -> StrategyParams {
        StrategyParams::new(DVector::from_vec(self.weights.clone()), self.shares)
    }
}

/// H-score of one candidate for the context's team.
pub fn h_score(model: &Model, state: &DraftState, ctx: &TeamContext<'_>, candidate: usize) -> Result<ObjectiveReport> {
    if state.is_drafted(candidate) {
        return Err(Error::AlreadyDrafted(model.players[candidate].player_id.clone()));
    }
    if !state.is_feasible_pick(model, ctx.team, candidate) {
        return Err(Error::Infeasible);
    }
    let settings = &model.settings;
    let init = initialize(
        ctx.k + 1,
        state.previous[ctx.team].as_ref(),
        &model.v,
        &model.x_scores[candidate],
        settings.optimizer.init_mix,
    );
    let best = optimize(
        &init,
        |p| evaluate_strategy(model, ctx, candidate, p).map(|e| (e.value, e.gradient)),
        &settings.optimizer,
    )?;
    let eval = evaluate_strategy(model, ctx, candidate, &best.params)?;
    let player = &model.players[candidate];
    Ok(ObjectiveReport {
        player_id: player.player_id.clone(),
        name: player.name.clone(),
        positions: player.positions.clone(),
        value: eval.value,
        w: eval.win_probabilities.iter().copied().collect(),
        weights: best.params.weights.iter().copied().collect(),
        shares: best.params.shares,
        g_score: model.g_totals[candidate],
        iterations: best.iterations,
        feasible: true,
    })
}

/// Top feasible undrafted players by G-score.
pub fn shortlist(model: &Model, state: &DraftState, team: usize, size: usize) -> Vec<usize> {
    state
        .undrafted(model)
        .filter(|&i| state.is_feasible_pick(model, team, i))
        .take(size)
        .collect()
}

fn score_all(model: &Model, state: &DraftState, ctx: &TeamContext<'_>, candidates: &[usize]) -> Vec<Result<ObjectiveReport>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        candidates.par_iter().map(|&c| h_score(model, state, ctx, c)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        candidates.iter().map(|&c| h_score(model, state, ctx, c)).collect()
    }
}

/// Orders reports by `V` descending, then player id.
pub fn rank_reports(reports: &mut [ObjectiveReport]) {
    reports.sort_by(|a, b| b.value.total_cmp(&a.value).then_with(|| a.player_id.cmp(&b.player_id)));
}

/// H-scores of the team's shortlist, best first. Candidates whose roster
/// would not fit, or whose strategy stays singular, are left out.
pub fn recommend(model: &Model, state: &DraftState, team: usize) -> Result<Vec<ObjectiveReport>> {
    let ctx = TeamContext::new(model, state, team)?;
    let candidates = shortlist(model, state, team, model.settings.shortlist);
    let mut reports = Vec::with_capacity(candidates.len());
    for r in score_all(model, state, &ctx, &candidates) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(Error::Infeasible | Error::Singular) => {}
            Err(e) => return Err(e),
        }
    }
    rank_reports(&mut reports);
    Ok(reports)
}

/// The H₀ choice: the best-ranked candidate and its report.
pub fn make_pick(model: &Model, state: &DraftState, team: usize) -> Result<(usize, ObjectiveReport)> {
    let best = recommend(model, state, team)?
        .into_iter()
        .next()
        .ok_or(Error::NoCandidate(team))?;
    Ok((model.player_index(&best.player_id)?, best))
}

/// Highest G-score player that keeps the roster feasible.
pub fn g_score_pick(model: &Model, state: &DraftState, team: usize) -> Result<usize> {
    shortlist(model, state, team, 1).into_iter().next().ok_or(Error::NoCandidate(team))
}

/// How a team drafts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drafter {
    HScore,
    GScore,
}

/// One line of a draft transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub ordinal: usize,
    pub team: usize,
    pub player_id: String,
    pub method: Drafter,
    #[serde(rename = "V")]
    pub value: Option<f64>,
    pub w: Vec<f64>,
    #[serde(rename = "j_C")]
    pub weights: Vec<f64>,
}

/// Makes the next pick for the team on the clock.
pub fn step(model: &Model, state: &mut DraftState, drafter: Drafter) -> Result<TranscriptEntry> {
    let team = state
        .team_on_clock()
        .ok_or_else(|| Error::Domain("the draft is complete".into()))?;
    let ordinal = state.picks.len();
    let (player, value, w, weights) = match drafter {
        Drafter::GScore => (g_score_pick(model, state, team)?, None, Vec::new(), Vec::new()),
        Drafter::HScore => {
            let (player, report) = make_pick(model, state, team)?;
            state.previous[team] = Some(report.strategy());
            (player, Some(report.value), report.w, report.weights)
        }
    };
    state.apply(model, team, player)?;
    Ok(TranscriptEntry {
        ordinal,
        team,
        player_id: model.players[player].player_id.clone(),
        method: drafter,
        value,
        w,
        weights,
    })
}

/// Runs a full snake draft with one drafter per team.
pub fn run_draft(model: &Model, drafters: &[Drafter]) -> Result<(DraftState, Vec<TranscriptEntry>)> {
    if drafters.len() != model.config.num_teams {
        return Err(Error::Config(format!(
            "{} drafters for {} teams",
            drafters.len(),
            model.config.num_teams
        )));
    }
    let mut state = DraftState::new(model);
    let mut transcript = Vec::with_capacity(state.total_picks());
    while let Some(team) = state.team_on_clock() {
        transcript.push(step(model, &mut state, drafters[team])?);
    }
    Ok((state, transcript))
}
