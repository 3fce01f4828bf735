//! Synthetic weekly stat lines.
//!
//! Each player gets a primary position archetype, a playing-time factor and
//! per-category tendencies; weekly lines are drawn game by game from
//! Poisson attempt counts with binomial makes, so percentages and points
//! stay internally consistent.

use hscore::ingest::{PlayerRecord, StatLine, WeeklyLine};
use hscore::Position;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, LogNormal, Normal, Poisson};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub players: usize,
    pub weeks: u32,
    /// Spread of the playing-time factor (log scale).
    pub quality_spread: f64,
    /// Spread of per-category tendencies (log scale).
    pub style_spread: f64,
    /// Probability that a player has a second eligible position.
    pub dual_eligibility: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            players: 200,
            weeks: 20,
            quality_spread: 0.3,
            style_spread: 0.35,
            dual_eligibility: 0.35,
            seed: 7,
        }
    }
}

/// Per-game rates: reb, ast, stl, blk, tov, fga, fg%, 3pa share of makes, fta, ft%.
struct Archetype {
    reb: f64,
    ast: f64,
    stl: f64,
    blk: f64,
    tov: f64,
    fga: f64,
    fg_pct: f64,
    three_share: f64,
    fta: f64,
    ft_pct: f64,
}

fn archetype(p: Position) -> Archetype {
    match p {
        Position::C => Archetype {
            reb: 8.5, ast: 1.8, stl: 0.6, blk: 1.4, tov: 1.6,
            fga: 9.0, fg_pct: 0.56, three_share: 0.06, fta: 3.4, ft_pct: 0.68,
        },
        Position::PG => Archetype {
            reb: 3.6, ast: 6.2, stl: 1.2, blk: 0.25, tov: 2.4,
            fga: 12.5, fg_pct: 0.44, three_share: 0.34, fta: 3.0, ft_pct: 0.84,
        },
        Position::SG => Archetype {
            reb: 3.8, ast: 3.2, stl: 1.0, blk: 0.3, tov: 1.6,
            fga: 12.5, fg_pct: 0.445, three_share: 0.38, fta: 2.8, ft_pct: 0.83,
        },
        Position::PF => Archetype {
            reb: 6.8, ast: 2.2, stl: 0.7, blk: 0.8, tov: 1.4,
            fga: 10.5, fg_pct: 0.5, three_share: 0.17, fta: 3.0, ft_pct: 0.74,
        },
        Position::SF => Archetype {
            reb: 5.0, ast: 2.6, stl: 0.95, blk: 0.5, tov: 1.5,
            fga: 10.5, fg_pct: 0.46, three_share: 0.28, fta: 2.6, ft_pct: 0.78,
        },
    }
}

fn neighbour(p: Position) -> Position {
    match p {
        Position::PG => Position::SG,
        Position::SG => Position::SF,
        Position::SF => Position::PF,
        Position::PF => Position::C,
        Position::C => Position::PF,
    }
}

struct Profile {
    reb: f64,
    ast: f64,
    stl: f64,
    blk: f64,
    tov: f64,
    fga: f64,
    fg_pct: f64,
    three_share: f64,
    fta: f64,
    ft_pct: f64,
    injury_rate: f64,
}

fn draw_profile(a: &Archetype, cfg: &SynthConfig, rng: &mut impl Rng) -> Profile {
    let quality = LogNormal::new(0.0, cfg.quality_spread).expect("valid spread").sample(rng);
    let style = LogNormal::new(0.0, cfg.style_spread).expect("valid spread");
    let mut s = |base: f64| base * quality * style.sample(rng);
    let reb = s(a.reb);
    let ast = s(a.ast);
    let stl = s(a.stl);
    let blk = s(a.blk);
    let fga = s(a.fga);
    let fta = s(a.fta);
    // turnovers follow ball handling more than anything else
    let tov = a.tov * quality * (0.6 + 0.4 * ast / (a.ast * quality)) * style.sample(rng).sqrt();
    let pct = Normal::new(0.0, 1.0).expect("unit normal");
    let fg_pct = (a.fg_pct + 0.035 * pct.sample(rng)).clamp(0.35, 0.7);
    let ft_pct = (a.ft_pct + 0.07 * pct.sample(rng)).clamp(0.4, 0.95);
    let three_share = (a.three_share * style.sample(rng)).clamp(0.0, 0.8);
    let injury_rate = if rng.random_bool(0.2) { rng.random_range(0.15..0.4) } else { rng.random_range(0.0..0.08) };
    Profile { reb, ast, stl, blk, tov, fga, fg_pct, three_share, fta, ft_pct, injury_rate }
}

fn poisson(rate: f64, rng: &mut impl Rng) -> f64 {
    if rate <= 0.0 {
        0.0
    } else {
        Poisson::new(rate).expect("positive rate").sample(rng)
    }
}

fn binomial(n: f64, p: f64, rng: &mut impl Rng) -> f64 {
    Binomial::new(n as u64, p.clamp(0.0, 1.0)).expect("valid binomial").sample(rng) as f64
}

fn draw_week(profile: &Profile, rng: &mut impl Rng) -> StatLine {
    let games = match rng.random_range(0..20) {
        0..=2 => 2.0,
        3..=12 => 3.0,
        _ => 4.0,
    };
    let fga = poisson(profile.fga * games, rng);
    let fgm = binomial(fga, profile.fg_pct, rng);
    let tpm = binomial(fgm, profile.three_share, rng);
    let fta = poisson(profile.fta * games, rng);
    let ftm = binomial(fta, profile.ft_pct, rng);
    StatLine {
        games,
        pts: 2.0 * fgm + tpm + ftm,
        reb: poisson(profile.reb * games, rng),
        ast: poisson(profile.ast * games, rng),
        stl: poisson(profile.stl * games, rng),
        blk: poisson(profile.blk * games, rng),
        tpm,
        tov: poisson(profile.tov * games, rng),
        fgm,
        fga,
        ftm,
        fta,
    }
}

/// Generates a reproducible pool of players with weekly histories.
pub fn generate_pool(cfg: &SynthConfig) -> Vec<PlayerRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = cfg.players.max(1).to_string().len();
    (0..cfg.players)
        .map(|i| {
            let primary = Position::ALL[i % Position::ALL.len()];
            let mut positions = vec![primary];
            if rng.random_bool(cfg.dual_eligibility) {
                positions.push(neighbour(primary));
            }
            let profile = draw_profile(&archetype(primary), cfg, &mut rng);
            let weeks = (1..=cfg.weeks)
                .map(|week| {
                    if rng.random_bool(profile.injury_rate) {
                        WeeklyLine { week, injured: true, stats: StatLine::default() }
                    } else {
                        WeeklyLine { week, injured: false, stats: draw_week(&profile, &mut rng) }
                    }
                })
                .collect();
            PlayerRecord::new(format!("p{i:0width$}"), format!("Player {i}"), positions, weeks)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_is_reproducible() {
        let cfg = SynthConfig { players: 20, ..Default::default() };
        assert_eq!(generate_pool(&cfg), generate_pool(&cfg));
    }

    #[test]
    fn lines_are_consistent() {
        let cfg = SynthConfig { players: 30, ..Default::default() };
        for p in generate_pool(&cfg) {
            for w in &p.weeks {
                let s = w.stats;
                assert!(s.fgm <= s.fga && s.ftm <= s.fta && s.tpm <= s.fgm);
                assert_eq!(s.pts, 2.0 * s.fgm + s.tpm + s.ftm);
                if w.injured {
                    assert_eq!(s, StatLine::default());
                }
            }
        }
    }
}
