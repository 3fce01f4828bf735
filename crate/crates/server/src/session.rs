//! Draft sessions as an append-only pick log.
//!
//! The live state is never edited in place: it is a replay of the log,
//! where an undo entry cancels the latest pick still in effect. Replaying
//! from scratch keeps every response a function of the log alone.

use std::sync::Arc;

use hscore::auction::{auction_h_score, cash_curve, AuctionState};
use hscore::engine::{h_score, recommend, shortlist, DraftState, Model, ObjectiveReport, TeamContext};
use hscore::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Snake,
    Auction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogEntry {
    Pick {
        team: usize,
        player_id: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        price: Option<f64>,
    },
    Undo,
}

/// Replayed state of a session.
#[derive(Debug, Clone, PartialEq)]
pub enum Board {
    Snake(DraftState),
    Auction(AuctionState),
}

impl Board {
    pub fn draft(&self) -> &DraftState {
        match self {
            Board::Snake(s) => s,
            Board::Auction(a) => &a.draft,
        }
    }
}

pub struct Session {
    pub id: String,
    pub mode: Mode,
    pub budget: f64,
    pub created_at: u64,
    pub model: Arc<Model>,
    pub log: Vec<LogEntry>,
    board: Arc<Board>,
    /// Bumped on every log change; keys the recommendation cache.
    pub version: u64,
    cache: Option<(u64, usize, Arc<Vec<Recommendation>>)>,
}

/// A ranked report, with its dollar value in auction mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    #[serde(flatten)]
    pub report: ObjectiveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dollars: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturated: Option<bool>,
}

fn effective(log: &[LogEntry]) -> Vec<&LogEntry> {
    let mut live = Vec::new();
    for e in log {
        match e {
            LogEntry::Pick { .. } => live.push(e),
            LogEntry::Undo => {
                live.pop();
            }
        }
    }
    live
}

fn replay(model: &Model, mode: Mode, budget: f64, log: &[LogEntry]) -> Result<Board> {
    let mut board = match mode {
        Mode::Snake => Board::Snake(DraftState::new(model)),
        Mode::Auction => Board::Auction(AuctionState::new(model, budget)?),
    };
    for e in effective(log) {
        if let LogEntry::Pick { team, player_id, price } = e {
            let player = model.player_index(player_id)?;
            match &mut board {
                Board::Snake(s) => s.apply(model, *team, player)?,
                Board::Auction(a) => a.buy(model, *team, player, price.unwrap_or(0.0))?,
            }
        }
    }
    Ok(board)
}

impl Session {
    pub fn new(id: String, model: Model, mode: Mode, budget: f64, created_at: u64) -> Result<Self> {
        let board = replay(&model, mode, budget, &[])?;
        Ok(Self {
            id,
            mode,
            budget,
            created_at,
            model: Arc::new(model),
            log: Vec::new(),
            board: Arc::new(board),
            version: 0,
            cache: None,
        })
    }

    pub fn board(&self) -> Arc<Board> {
        self.board.clone()
    }

    fn commit(&mut self, entry: LogEntry) -> Result<()> {
        self.log.push(entry);
        match replay(&self.model, self.mode, self.budget, &self.log) {
            Ok(board) => {
                self.board = Arc::new(board);
                self.version += 1;
                self.cache = None;
                Ok(())
            }
            Err(e) => {
                self.log.pop();
                Err(e)
            }
        }
    }

    /// Records a pick. Snake picks default to the team on the clock and
    /// must come from it unless `override_order` is set.
    pub fn pick(&mut self, team: Option<usize>, player_id: &str, override_order: bool, price: Option<f64>) -> Result<usize> {
        let player = self.model.player_index(player_id)?;
        let draft = self.board.draft();
        if draft.is_drafted(player) {
            return Err(Error::AlreadyDrafted(player_id.to_string()));
        }
        let team = match (self.mode, team) {
            (Mode::Snake, t) => {
                let clock = draft.team_on_clock().ok_or_else(|| Error::Domain("the draft is complete".into()))?;
                let t = t.unwrap_or(clock);
                if t != clock && !override_order {
                    return Err(Error::Domain(format!("team {clock} is on the clock, not team {t}")));
                }
                t
            }
            (Mode::Auction, Some(t)) => t,
            (Mode::Auction, None) => return Err(Error::Config("auction purchases need a team".into())),
        };
        if self.mode == Mode::Auction && price.is_none() {
            return Err(Error::Config("auction purchases need a price".into()));
        }
        self.commit(LogEntry::Pick { team, player_id: player_id.to_string(), price })?;
        Ok(team)
    }

    pub fn undo(&mut self) -> Result<()> {
        if effective(&self.log).is_empty() {
            return Err(Error::Domain("no pick to undo".into()));
        }
        self.commit(LogEntry::Undo)
    }

    /// Team a request is about: the explicit one, else the team on the clock.
    pub fn resolve_team(&self, team: Option<usize>) -> Result<usize> {
        let draft = self.board.draft();
        match team {
            Some(t) if t < draft.num_teams => Ok(t),
            Some(t) => Err(Error::Domain(format!("team {t} does not exist"))),
            None => draft
                .team_on_clock()
                .ok_or_else(|| Error::Domain("the draft is complete; name a team".into())),
        }
    }

    pub fn cached(&self, team: usize) -> Option<Arc<Vec<Recommendation>>> {
        match &self.cache {
            Some((v, t, r)) if *v == self.version && *t == team => Some(r.clone()),
            _ => None,
        }
    }

    pub fn store(&mut self, version: u64, team: usize, recs: Arc<Vec<Recommendation>>) {
        if version == self.version {
            self.cache = Some((version, team, recs));
        }
    }
}

/// Full ranked recommendations for `team` on a board snapshot.
pub fn recommendations(model: &Model, board: &Board, team: usize) -> Result<Vec<Recommendation>> {
    match board {
        Board::Snake(state) => Ok(recommend(model, state, team)?
            .into_iter()
            .map(|report| Recommendation { report, dollars: None, saturated: None })
            .collect()),
        Board::Auction(auction) => {
            let curve = cash_curve(model, auction, team)?;
            let mut out = Vec::new();
            for c in shortlist(model, &auction.draft, team, model.settings.shortlist) {
                match auction_h_score(model, auction, team, c, 0.0) {
                    Ok(report) => {
                        let (dollars, saturated) = curve.invert(report.value);
                        out.push(Recommendation { report, dollars: Some(dollars), saturated: Some(saturated) });
                    }
                    Err(Error::Infeasible | Error::Singular) => {}
                    Err(e) => return Err(e),
                }
            }
            out.sort_by(|a, b| {
                b.report
                    .value
                    .total_cmp(&a.report.value)
                    .then_with(|| a.report.player_id.cmp(&b.report.player_id))
            });
            Ok(out)
        }
    }
}

/// Report for one hypothetical pick; the board is not touched.
pub fn what_if(model: &Model, board: &Board, team: usize, player_id: &str) -> Result<ObjectiveReport> {
    let player = model.player_index(player_id)?;
    match board {
        Board::Snake(state) => {
            let ctx = TeamContext::new(model, state, team)?;
            h_score(model, state, &ctx, player)
        }
        Board::Auction(auction) => auction_h_score(model, auction, team, player, 0.0),
    }
}
