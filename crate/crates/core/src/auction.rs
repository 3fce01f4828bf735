//! Auction valuation.
//!
//! In an auction the opponent's unknown players are not drafted in turn,
//! so the matchup mean becomes
//!
//! ```text
//! X_s + X_p − X_os + M·R + L·D + X_δ(j)
//! ```
//!
//! where `M` is the team's surplus of replacement-level slots over the
//! opponent's, `R` the replacement player's profile, `L` the team's extra
//! dollars and `D` the category value of one dollar. Dollar values come from
//! comparing a candidate's H-score with the H-score of a replacement player
//! bought together with extra cash.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::engine::{h_score, DraftState, Model, ObjectiveReport, TeamContext};
use crate::error::{Error, Result};
use crate::objective::DifferentialDistribution;
use crate::optimizer::StrategyParams;
use crate::CategoryVector;

/// Points on the cash grid, endpoints included.
pub const CASH_GRID_POINTS: usize = 41;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionState {
    pub draft: DraftState,
    /// Dollars left per team.
    pub money: Vec<f64>,
}

impl AuctionState {
    pub fn new(model: &Model, budget: f64) -> Result<Self> {
        if !(budget >= 0.0) {
            return Err(Error::Domain(format!("budget must be nonnegative, got {budget}")));
        }
        let draft = DraftState::new(model);
        let money = vec![budget; draft.num_teams];
        Ok(Self { draft, money })
    }

    /// Records a purchase.
    pub fn buy(&mut self, model: &Model, team: usize, player: usize, price: f64) -> Result<()> {
        let left = self.money.get(team).copied().ok_or_else(|| Error::Domain(format!("team {team} does not exist")))?;
        if !(price >= 0.0) || price > left {
            return Err(Error::Domain(format!("team {team} cannot pay {price} with {left} left")));
        }
        self.draft.apply(model, team, player)?;
        self.money[team] -= price;
        Ok(())
    }

    pub fn total_money(&self) -> f64 {
        self.money.iter().sum()
    }

    /// Roster slots still empty across the league.
    pub fn open_slots(&self) -> usize {
        self.draft.total_picks() - self.draft.drafted_count()
    }
}

/// Spreads a G-score total evenly over categories in X-score units, with
/// turnovers taking the opposite sign.
pub fn spread_value(model: &Model, total: f64) -> Result<CategoryVector> {
    let cats = &model.aggregates.categories;
    let tov = cats.iter().filter(|&&c| c.lower_is_better()).count() as f64;
    let net = cats.len() as f64 - 2.0 * tov;
    if net <= 0.0 {
        return Err(Error::Config("cannot spread value: turnovers outweigh other categories".into()));
    }
    let v_raw = model.aggregates.v_raw();
    Ok(DVector::from_iterator(
        cats.len(),
        cats.iter().zip(v_raw.iter()).map(|(&c, &v)| {
            let sign = if c.lower_is_better() { -1.0 } else { 1.0 };
            sign * total / net / v
        }),
    ))
}

/// The best undrafted player not expected to be bought: the first one past
/// the number of open roster slots in G-score order.
pub fn replacement_player(model: &Model, draft: &DraftState) -> Result<usize> {
    let open = draft.total_picks() - draft.drafted_count();
    draft
        .undrafted(model)
        .nth(open)
        .ok_or_else(|| Error::PoolExhausted(format!("no undrafted player beyond the {open} open slots")))
}

/// `R`: the replacement player's G-score total spread over categories.
pub fn replacement_profile(model: &Model, draft: &DraftState) -> Result<CategoryVector> {
    let r = replacement_player(model, draft)?;
    spread_value(model, model.g_totals[r])
}

/// `D`: above-replacement G-score left in the pool per remaining dollar.
pub fn dollar_benefit(model: &Model, draft: &DraftState, money_total: f64) -> Result<CategoryVector> {
    if !(money_total > 0.0) {
        return Err(Error::Domain("no money remains in the pool".into()));
    }
    let open = draft.total_picks() - draft.drafted_count();
    let repl = model.g_totals[replacement_player(model, draft)?];
    let surplus: f64 = draft.undrafted(model).take(open).map(|i| model.g_totals[i] - repl).sum();
    spread_value(model, surplus / money_total)
}

/// Replacement and dollar terms of one opponent pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpponentTerms {
    pub opponent: usize,
    pub x_os: CategoryVector,
    /// Team's replacement slots minus the opponent's, with the candidate counted.
    pub m: f64,
    /// Team's dollars minus the opponent's.
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionTerms {
    pub replacement: CategoryVector,
    pub dollar: CategoryVector,
    pub opponents: Vec<OpponentTerms>,
}

pub fn auction_terms(model: &Model, auction: &AuctionState, team: usize) -> Result<AuctionTerms> {
    let draft = &auction.draft;
    let n = model.config.roster_size as f64;
    let mine = draft.rosters[team].len() as f64 + 1.0;
    let opponents = (0..draft.num_teams)
        .filter(|&o| o != team)
        .map(|o| {
            let theirs = draft.rosters[o].len() as f64;
            OpponentTerms {
                opponent: o,
                x_os: draft.team_x_sum(model, o),
                m: (n - mine) - (n - theirs),
                l: auction.money[team] - auction.money[o],
            }
        })
        .collect();
    Ok(AuctionTerms {
        replacement: replacement_profile(model, draft)?,
        dollar: dollar_benefit(model, draft, auction.total_money())?,
        opponents,
    })
}

/// Strategy-independent part subtracted from the team's mean, with `extra`
/// dollars added to the team's side.
fn opponent_offsets(terms: &AuctionTerms, extra: f64) -> Vec<CategoryVector> {
    terms
        .opponents
        .iter()
        .map(|o| &o.x_os - &terms.replacement * o.m - &terms.dollar * (o.l + extra))
        .collect()
}

fn auction_context<'a>(
    model: &'a Model,
    auction: &AuctionState,
    team: usize,
    terms: &AuctionTerms,
    extra: f64,
) -> Result<TeamContext<'a>> {
    TeamContext::with_opponents(model, &auction.draft, team, opponent_offsets(terms, extra))
}

/// Differential against the `index`-th opponent at a fixed strategy.
pub fn auction_differential(
    model: &Model,
    auction: &AuctionState,
    team: usize,
    candidate: usize,
    params: &StrategyParams,
    index: usize,
) -> Result<DifferentialDistribution> {
    let terms = auction_terms(model, auction, team)?;
    let ctx = auction_context(model, auction, team, &terms, 0.0)?;
    crate::engine::matchup_distribution(model, &ctx, candidate, params, index)
}

/// Auction H-score of a candidate when the team also holds `extra` dollars.
pub fn auction_h_score(
    model: &Model,
    auction: &AuctionState,
    team: usize,
    candidate: usize,
    extra: f64,
) -> Result<ObjectiveReport> {
    let terms = auction_terms(model, auction, team)?;
    let ctx = auction_context(model, auction, team, &terms, extra)?;
    h_score(model, &auction.draft, &ctx, candidate)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CashCurve {
    pub cash: Vec<f64>,
    /// Running maximum of the replacement player's H-score at each cash level.
    pub value: Vec<f64>,
}

impl CashCurve {
    /// Cash level matching `target`, interpolated linearly, and whether the
    /// target lies above the whole curve.
    pub fn invert(&self, target: f64) -> (f64, bool) {
        let last = self.value.len() - 1;
        if target <= self.value[0] {
            return (self.cash[0], false);
        }
        if target > self.value[last] {
            return (self.cash[last], true);
        }
        for k in 1..=last {
            let (lo, hi) = (self.value[k - 1], self.value[k]);
            if target <= hi {
                if hi == lo {
                    return (self.cash[k - 1], false);
                }
                let t = (target - lo) / (hi - lo);
                return (self.cash[k - 1] + t * (self.cash[k] - self.cash[k - 1]), false);
            }
        }
        (self.cash[last], true)
    }
}

/// Replacement player's H-score over a cash grid from zero to twice the
/// richest team's budget.
pub fn cash_curve(model: &Model, auction: &AuctionState, team: usize) -> Result<CashCurve> {
    let terms = auction_terms(model, auction, team)?;
    let repl = replacement_player(model, &auction.draft)?;
    let top = 2.0 * auction.money.iter().copied().fold(0.0, f64::max);
    let mut cash = Vec::with_capacity(CASH_GRID_POINTS);
    let mut value = Vec::with_capacity(CASH_GRID_POINTS);
    let mut running = f64::NEG_INFINITY;
    for k in 0..CASH_GRID_POINTS {
        let c = top * k as f64 / (CASH_GRID_POINTS - 1) as f64;
        let ctx = auction_context(model, auction, team, &terms, c)?;
        running = running.max(h_score(model, &auction.draft, &ctx, repl)?.value);
        cash.push(c);
        value.push(running);
    }
    Ok(CashCurve { cash, value })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CashEquivalent {
    pub player_id: String,
    #[serde(rename = "V")]
    pub value: f64,
    pub dollars: f64,
    pub saturated: bool,
}

/// Dollar value of a candidate for `team`.
pub fn cash_equivalent(model: &Model, auction: &AuctionState, team: usize, candidate: usize) -> Result<CashEquivalent> {
    let curve = cash_curve(model, auction, team)?;
    cash_equivalent_on(model, auction, team, candidate, &curve)
}

/// As [`cash_equivalent`], reusing a precomputed curve.
pub fn cash_equivalent_on(
    model: &Model,
    auction: &AuctionState,
    team: usize,
    candidate: usize,
    curve: &CashCurve,
) -> Result<CashEquivalent> {
    let report = auction_h_score(model, auction, team, candidate, 0.0)?;
    let (dollars, saturated) = curve.invert(report.value);
    Ok(CashEquivalent { player_id: report.player_id, value: report.value, dollars, saturated })
}
