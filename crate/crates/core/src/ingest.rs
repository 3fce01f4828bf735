//! Weekly stats ingestion, the eligible pool and the relevant set `Q`.
//!
//! The canonical input is a CSV file with one row per player-week:
//!
//! ```text
//! player_id,name,positions,week,games,pts,reb,ast,stl,blk,tpm,tov,fgm,fga,ftm,fta,injured
//! ```
//!
//! `positions` is `|`-separated (`PG|SG`) and `injured` is `0` or `1`.
//! Injured weeks stay in storage so injury rates remain computable, but
//! they are skipped by every mean and by bootstrap sampling.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::category::{Category, CategoryKind, Position};
use crate::config::LeagueConfig;
use crate::error::{Error, Result};
use crate::scoring::z_score_totals;

pub const CSV_HEADER: &str =
    "player_id,name,positions,week,games,pts,reb,ast,stl,blk,tpm,tov,fgm,fga,ftm,fta,injured";

/// Raw box-score totals for one week (or their per-week means).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StatLine {
    pub games: f64,
    pub pts: f64,
    pub reb: f64,
    pub ast: f64,
    pub stl: f64,
    pub blk: f64,
    pub tpm: f64,
    pub tov: f64,
    pub fgm: f64,
    pub fga: f64,
    pub ftm: f64,
    pub fta: f64,
}

impl StatLine {
    /// Total for a counting category. Percentage categories return makes.
    pub fn counting(&self, category: Category) -> f64 {
        match category {
            Category::Points => self.pts,
            Category::Rebounds => self.reb,
            Category::Assists => self.ast,
            Category::Steals => self.stl,
            Category::Blocks => self.blk,
            Category::Threes => self.tpm,
            Category::Turnovers => self.tov,
            Category::FieldGoalPct => self.fgm,
            Category::FreeThrowPct => self.ftm,
        }
    }

    /// (makes, attempts) behind a percentage category.
    pub fn makes_attempts(&self, category: Category) -> (f64, f64) {
        match category {
            Category::FieldGoalPct => (self.fgm, self.fga),
            Category::FreeThrowPct => (self.ftm, self.fta),
            other => (self.counting(other), 0.0),
        }
    }

    pub fn add_assign(&mut self, other: &StatLine) {
        self.games += other.games;
        self.pts += other.pts;
        self.reb += other.reb;
        self.ast += other.ast;
        self.stl += other.stl;
        self.blk += other.blk;
        self.tpm += other.tpm;
        self.tov += other.tov;
        self.fgm += other.fgm;
        self.fga += other.fga;
        self.ftm += other.ftm;
        self.fta += other.fta;
    }

    pub fn scaled(&self, k: f64) -> StatLine {
        StatLine {
            games: self.games * k,
            pts: self.pts * k,
            reb: self.reb * k,
            ast: self.ast * k,
            stl: self.stl * k,
            blk: self.blk * k,
            tpm: self.tpm * k,
            tov: self.tov * k,
            fgm: self.fgm * k,
            fga: self.fga * k,
            ftm: self.ftm * k,
            fta: self.fta * k,
        }
    }

    fn values(&self) -> [f64; 12] {
        [
            self.games, self.pts, self.reb, self.ast, self.stl, self.blk, self.tpm, self.tov,
            self.fgm, self.fga, self.ftm, self.fta,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyLine {
    pub week: u32,
    pub injured: bool,
    pub stats: StatLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerRecord {
    pub player_id: String,
    pub name: String,
    pub positions: Vec<Position>,
    /// All stored weeks in week order, injured ones included.
    pub weeks: Vec<WeeklyLine>,
    /// Per-week means over the non-injured weeks.
    pub means: StatLine,
}

impl PlayerRecord {
    pub fn new(
        player_id: impl Into<String>,
        name: impl Into<String>,
        positions: Vec<Position>,
        mut weeks: Vec<WeeklyLine>,
    ) -> Self {
        weeks.sort_by_key(|w| w.week);
        let mut sum = StatLine::default();
        let mut n = 0usize;
        for w in weeks.iter().filter(|w| !w.injured) {
            sum.add_assign(&w.stats);
            n += 1;
        }
        let means = if n == 0 { sum } else { sum.scaled(1.0 / n as f64) };
        Self {
            player_id: player_id.into(),
            name: name.into(),
            positions,
            weeks,
            means,
        }
    }

    pub fn active_weeks(&self) -> impl Iterator<Item = &WeeklyLine> {
        self.weeks.iter().filter(|w| !w.injured)
    }

    pub fn active_week_count(&self) -> usize {
        self.active_weeks().count()
    }

    pub fn is_eligible(&self, position: Position) -> bool {
        self.positions.contains(&position)
    }

    /// Mean weekly total `m_p` for a counting category.
    pub fn counting_mean(&self, category: Category) -> f64 {
        self.means.counting(category)
    }

    /// `(r_q, a_q)`: season rate as total makes over total attempts, and
    /// mean weekly attempts. A player with no attempts has rate zero.
    pub fn rate_and_volume(&self, category: Category) -> (f64, f64) {
        let (makes, attempts) = self.means.makes_attempts(category);
        let rate = if attempts > 0.0 { makes / attempts } else { 0.0 };
        (rate, attempts)
    }

    /// Raw per-category means in the given order: `m_p` for counting
    /// categories and `r_q` for percentage categories. No sign flips.
    pub fn category_means(&self, categories: &[Category]) -> Vec<f64> {
        categories
            .iter()
            .map(|&c| match c.kind() {
                CategoryKind::Counting => self.counting_mean(c),
                CategoryKind::Percentage => self.rate_and_volume(c).0,
            })
            .collect()
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct CsvRow {
    player_id: String,
    name: String,
    positions: String,
    week: u32,
    games: f64,
    pts: f64,
    reb: f64,
    ast: f64,
    stl: f64,
    blk: f64,
    tpm: f64,
    tov: f64,
    fgm: f64,
    fga: f64,
    ftm: f64,
    fta: f64,
    injured: u8,
}

fn validation(line: u64, message: impl Into<String>) -> Error {
    Error::Validation {
        line,
        message: message.into(),
    }
}

fn parse_positions(s: &str, line: u64) -> Result<Vec<Position>> {
    let mut out = Vec::new();
    for part in s.split('|').filter(|p| !p.trim().is_empty()) {
        let pos = part.parse::<Position>().map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if !out.contains(&pos) {
            out.push(pos);
        }
    }
    if out.is_empty() {
        return Err(validation(line, "player has no eligible positions"));
    }
    Ok(out)
}

impl CsvRow {
    fn into_line(self, line: u64) -> Result<(String, String, Vec<Position>, WeeklyLine)> {
        let positions = parse_positions(&self.positions, line)?;
        if self.week == 0 {
            return Err(validation(line, "week must be at least 1"));
        }
        let injured = match self.injured {
            0 => false,
            1 => true,
            other => return Err(validation(line, format!("injured must be 0 or 1, got {other}"))),
        };
        let stats = StatLine {
            games: self.games,
            pts: self.pts,
            reb: self.reb,
            ast: self.ast,
            stl: self.stl,
            blk: self.blk,
            tpm: self.tpm,
            tov: self.tov,
            fgm: self.fgm,
            fga: self.fga,
            ftm: self.ftm,
            fta: self.fta,
        };
        if stats.values().iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(validation(line, "totals must be finite and nonnegative"));
        }
        if stats.games.fract() != 0.0 {
            return Err(validation(line, "games must be an integer"));
        }
        if stats.fgm > stats.fga {
            return Err(validation(line, format!("fgm {} exceeds fga {}", stats.fgm, stats.fga)));
        }
        if stats.ftm > stats.fta {
            return Err(validation(line, format!("ftm {} exceeds fta {}", stats.ftm, stats.fta)));
        }
        if stats.games == 0.0 && stats.values().iter().any(|v| *v != 0.0) {
            return Err(validation(line, "totals must be zero when no games were played"));
        }
        Ok((
            self.player_id,
            self.name,
            positions,
            WeeklyLine {
                week: self.week,
                injured,
                stats,
            },
        ))
    }
}

/// Parses weekly stats from any reader. Players appear in order of first
/// appearance; weeks are sorted.
pub fn read_weekly_stats(reader: impl Read) -> Result<Vec<PlayerRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let got = headers.iter().collect::<Vec<_>>().join(",");
    if got != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{got}`"),
        });
    }
    let headers = headers.clone();

    let mut order: Vec<String> = Vec::new();
    let mut grouped: HashMap<String, (String, Vec<Position>, Vec<WeeklyLine>)> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: CsvRow = record.deserialize(Some(&headers)).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let (id, name, positions, weekly) = row.into_line(line)?;
        match grouped.get_mut(&id) {
            Some((_, known, weeks)) => {
                if *known != positions {
                    return Err(validation(line, format!("positions for `{id}` changed between rows")));
                }
                if weeks.iter().any(|w| w.week == weekly.week) {
                    return Err(validation(line, format!("duplicate week {} for `{id}`", weekly.week)));
                }
                weeks.push(weekly);
            }
            None => {
                order.push(id.clone());
                grouped.insert(id, (name, positions, vec![weekly]));
            }
        }
    }

    Ok(order
        .into_iter()
        .map(|id| {
            let (name, positions, weeks) = grouped.remove(&id).expect("grouped by id");
            PlayerRecord::new(id, name, positions, weeks)
        })
        .collect())
}

pub fn load_weekly_stats(path: impl AsRef<Path>) -> Result<Vec<PlayerRecord>> {
    read_weekly_stats(std::fs::File::open(path)?)
}

/// Writes records in the canonical CSV layout.
pub fn write_weekly_stats(writer: impl Write, records: &[PlayerRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in records {
        let positions = p.positions.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("|");
        for w in &p.weeks {
            let s = &w.stats;
            wtr.serialize(CsvRow {
                player_id: p.player_id.clone(),
                name: p.name.clone(),
                positions: positions.clone(),
                week: w.week,
                games: s.games,
                pts: s.pts,
                reb: s.reb,
                ast: s.ast,
                stl: s.stl,
                blk: s.blk,
                tpm: s.tpm,
                tov: s.tov,
                fgm: s.fgm,
                fga: s.fga,
                ftm: s.ftm,
                fta: s.fta,
                injured: w.injured as u8,
            })
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Keeps players with at least `min_weeks` non-injured weeks.
pub fn build_pool(records: &[PlayerRecord], min_weeks: usize) -> Vec<PlayerRecord> {
    records
        .iter()
        .filter(|p| p.active_week_count() >= min_weeks.max(1))
        .cloned()
        .collect()
}

/// Top `N_T x N` players of the pool by full-pool Z-score total, sorted
/// descending. Ties go to the lexicographically smaller player id.
pub fn select_q(pool: &[PlayerRecord], config: &LeagueConfig) -> Result<Vec<PlayerRecord>> {
    let size = config.drafted_total();
    if pool.len() < size {
        return Err(Error::Sizing(format!(
            "pool has {} players but the league drafts {size}",
            pool.len()
        )));
    }
    let totals = z_score_totals(pool, &config.categories);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| {
        totals[b]
            .total_cmp(&totals[a])
            .then_with(|| pool[a].player_id.cmp(&pool[b].player_id))
    });
    Ok(order.into_iter().take(size).map(|i| pool[i].clone()).collect())
}
