mod common;

use common::random_pool;
use hscore::ingest::{build_pool, load_weekly_stats, read_weekly_stats, write_weekly_stats, PlayerRecord, StatLine, WeeklyLine};
use hscore::Position;
use proptest::prelude::*;
use std::io::Write;

fn sort(mut v: Vec<PlayerRecord>) -> Vec<PlayerRecord> {
    v.sort_by(|a, b| a.player_id.cmp(&b.player_id));
    v
}

#[test]
fn written_pool_reads_back_unchanged() {
    let pool = random_pool(25, 6, 11);
    let mut buf = Vec::new();
    write_weekly_stats(&mut buf, &pool).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with(hscore::ingest::CSV_HEADER));
    let back = read_weekly_stats(buf.as_slice()).unwrap();
    assert_eq!(sort(back), sort(pool.clone()));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(&buf).unwrap();
    assert_eq!(sort(load_weekly_stats(file.path()).unwrap()), sort(pool));
}

fn stat_line() -> impl Strategy<Value = StatLine> {
    (0u8..5, 0u16..200, 0u16..80, 0u16..80, 0u8..20, 0u8..20, 0u8..30, 0u8..30, 0u16..100, 0u16..60).prop_flat_map(
        |(games, pts, reb, ast, stl, blk, tpm, tov, fga, fta)| {
            (Just((games, pts, reb, ast, stl, blk, tpm, tov, fga, fta)), 0..=fga, 0..=fta)
        },
    )
    .prop_map(|((games, pts, reb, ast, stl, blk, tpm, tov, fga, fta), fgm, ftm)| {
        // a week without games has no stats
        let k = if games == 0 { 0.0 } else { 1.0 };
        StatLine {
            games: games as f64,
            pts: k * pts as f64,
            reb: k * reb as f64,
            ast: k * ast as f64,
            stl: k * stl as f64,
            blk: k * blk as f64,
            tpm: k * tpm.min(fgm.min(255) as u8) as f64,
            tov: k * tov as f64,
            fgm: k * fgm as f64,
            fga: k * fga as f64,
            ftm: k * ftm as f64,
            fta: k * fta as f64,
        }
    })
}

fn record() -> impl Strategy<Value = PlayerRecord> {
    (
        "[a-z][a-z0-9]{0,6}",
        "[A-Za-z ]{1,12}",
        proptest::sample::subsequence(Position::ALL.to_vec(), 1..=2),
        proptest::collection::vec((stat_line(), any::<bool>()), 1..8),
    )
        .prop_map(|(id, name, positions, weeks)| {
            let weeks = weeks
                .into_iter()
                .enumerate()
                .map(|(i, (stats, injured))| WeeklyLine { week: i as u32 + 1, injured, stats })
                .collect();
            PlayerRecord::new(id, name.trim().to_string() + "x", positions, weeks)
        })
}

proptest! {
    #[test]
    fn any_record_survives_a_round_trip(p in record()) {
        let mut buf = Vec::new();
        write_weekly_stats(&mut buf, std::slice::from_ref(&p)).unwrap();
        let back = read_weekly_stats(buf.as_slice()).unwrap();
        prop_assert_eq!(back, vec![p]);
    }

    #[test]
    fn pool_threshold_counts_only_healthy_weeks(ps in proptest::collection::vec(record(), 0..10), min in 1usize..8) {
        let kept = build_pool(&ps, min);
        for p in &ps {
            let healthy = p.weeks.iter().filter(|w| !w.injured).count();
            prop_assert_eq!(kept.iter().any(|k| k == p), healthy >= min);
        }
    }

    #[test]
    fn means_ignore_injured_weeks(p in record()) {
        let healthy: Vec<&WeeklyLine> = p.weeks.iter().filter(|w| !w.injured).collect();
        if !healthy.is_empty() {
            let pts = healthy.iter().map(|w| w.stats.pts).sum::<f64>() / healthy.len() as f64;
            prop_assert!((p.means.pts - pts).abs() < 1e-9);
        }
    }
}
