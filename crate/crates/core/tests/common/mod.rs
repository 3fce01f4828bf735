//! Small deterministic player pools shared by the integration tests.
#![allow(dead_code)]

use hscore::engine::{EngineSettings, Model};
use hscore::ingest::{PlayerRecord, StatLine, WeeklyLine};
use hscore::{Format, LeagueConfig, Position};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn line(pts: f64, reb: f64, ast: f64, stl: f64, blk: f64, tpm: f64, tov: f64, fg: (f64, f64), ft: (f64, f64)) -> StatLine {
    StatLine { games: 3.0, pts, reb, ast, stl, blk, tpm, tov, fgm: fg.0, fga: fg.1, ftm: ft.0, fta: ft.1 }
}

pub fn player(id: &str, positions: Vec<Position>, weeks: Vec<StatLine>) -> PlayerRecord {
    let weeks = weeks
        .into_iter()
        .enumerate()
        .map(|(i, stats)| WeeklyLine { week: i as u32 + 1, injured: false, stats })
        .collect();
    PlayerRecord::new(id, format!("Player {id}"), positions, weeks)
}

fn random_week(rng: &mut impl Rng, quality: f64, style: &[f64; 7]) -> StatLine {
    let noise: [f64; 8] = std::array::from_fn(|_| rng.random_range(0.6..1.4));
    let draw = |k: usize, mean: f64| (mean * quality * noise[k]).round().max(0.0);
    let fga = draw(0, 40.0 * style[0]).max(1.0);
    let fgm = (fga * rng.random_range(0.40..0.55)).round();
    let fta = draw(1, 12.0 * style[0]).max(1.0);
    let ftm = (fta * rng.random_range(0.6..0.9)).round();
    let tpm = draw(2, 5.0 * style[1]).min(fgm);
    StatLine {
        games: 3.0,
        pts: 2.0 * fgm + tpm + ftm,
        reb: draw(3, 15.0 * style[2]),
        ast: draw(4, 10.0 * style[3]),
        stl: draw(5, 3.0 * style[4]),
        blk: draw(6, 2.5 * style[5]),
        tpm,
        tov: draw(7, 5.0 * style[6]),
        fgm,
        fga,
        ftm,
        fta,
    }
}

/// `n` players with cycling positions (some dual-eligible) and `weeks`
/// random weekly lines each.
pub fn random_pool(n: usize, weeks: usize, seed: u64) -> Vec<PlayerRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let pos = Position::ALL[i % 5];
            let mut positions = vec![pos];
            if i % 3 == 0 {
                let other = Position::ALL[(i + 1) % 5];
                positions.push(other);
            }
            let quality = rng.random_range(0.5..1.5);
            let style: [f64; 7] = std::array::from_fn(|_| rng.random_range(0.3..1.7));
            let lines = (0..weeks).map(|_| random_week(&mut rng, quality, &style)).collect();
            player(&format!("p{i:03}"), positions, lines)
        })
        .collect()
}

pub fn small_config(num_teams: usize, format: Format) -> LeagueConfig {
    LeagueConfig { num_teams, format, ..Default::default() }
}

/// Model over a random pool sized for the league, with a short optimizer
/// budget to keep tests quick.
pub fn small_model(num_teams: usize, format: Format, seed: u64) -> Model {
    let config = small_config(num_teams, format);
    let pool = random_pool(num_teams * 13 + 20, 12, seed);
    let mut settings = EngineSettings::default();
    settings.shortlist = 12;
    settings.optimizer.max_iters = 30;
    Model::new(pool, config, settings).unwrap()
}
