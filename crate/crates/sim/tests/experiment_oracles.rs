use hscore::engine::{EngineSettings, Model};
use hscore::future_picks::{calibrate, read_observations};
use hscore::ingest::build_pool;
use hscore::{Category, Format, LeagueConfig};
use hscore_sim::*;
use nalgebra::DMatrix;

fn model(num_teams: usize, players: usize, format: Format) -> Model {
    let pool = build_pool(&generate_pool(&SynthConfig { players, seed: 11, ..Default::default() }), 10);
    let config = LeagueConfig { num_teams, format, ..Default::default() };
    let mut settings = EngineSettings::default();
    settings.shortlist = 15;
    Model::new(pool, config, settings).unwrap()
}

#[test]
fn standard_error_at_a_thousand_fair_seasons() {
    let se = binomial_std_error(0.5, 1000);
    assert!((se - 0.01581).abs() < 1e-5);
    assert_eq!(binomial_std_error(0.3, 0), 0.0);
}

#[test]
fn control_seats_are_symmetric() {
    let model = model(12, 200, Format::MostCategories);
    let cfg = ExperimentConfig { seasons: 1000, seed: 3, control: true, ..Default::default() };
    let report = run_experiment(&model, &cfg).unwrap();
    assert_eq!(report.seats.len(), 12);
    let base = 1.0 / 12.0;
    let se = binomial_std_error(base, 1000);
    for s in &report.seats {
        assert_eq!(s.seasons, 1000);
        assert!((s.rate - base).abs() < 5.0 * se, "seat {} rate {}", s.seat, s.rate);
        assert!((s.team_rates.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn small_experiment_is_reproducible_and_well_formed() {
    let model = model(4, 80, Format::EachCategory);
    let cfg = ExperimentConfig { seasons: 40, seed: 4, seats: vec![0, 3], ..Default::default() };
    let a = run_experiment(&model, &cfg).unwrap();
    let b = run_experiment(&model, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.seats.len(), 2);
    for s in &a.seats {
        assert!((0.0..=1.0).contains(&s.rate));
        assert!((s.team_rates.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(s.category_rates.len(), 40);
        assert!(s.category_rates.iter().flatten().all(|r| (0.0..=1.0).contains(r)));
        assert_eq!(s.transcript.len(), 4 * 13);
    }
    assert!(!a.calibration.is_empty());
}

#[test]
fn exported_observations_feed_calibration() {
    let model = model(4, 80, Format::MostCategories);
    let cfg = ExperimentConfig { seasons: 5, seed: 5, ..Default::default() };
    let report = run_experiment(&model, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_experiment(dir.path(), &report).unwrap();
    for f in ["winrates.csv", "category_hist.csv", "calibration_obs.csv", "transcript.jsonl"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let obs = read_observations(std::fs::File::open(dir.path().join("calibration_obs.csv")).unwrap()).unwrap();
    assert_eq!(obs.len(), report.calibration.len());
    for (a, b) in obs.iter().zip(&report.calibration) {
        assert!((a.sigma - b.sigma).abs() < 1e-9 * (1.0 + b.sigma.abs()));
    }
    assert!(calibrate(&obs).is_ok());
}

#[test]
fn symmetric_categories_share_sensitivity_evenly() {
    let cats = Category::NINE;
    let rows = gradient_analysis(
        &DMatrix::identity(9, 9),
        &cats,
        &[0.0],
        Format::MostCategories,
        &GradientConfig { pairs: 100_000, seed: 6 },
    )
    .unwrap();
    let row = &rows[0];
    assert!((row.victory - 0.5).abs() < 0.005, "{}", row.victory);
    let mean = row.sensitivities.iter().sum::<f64>() / 9.0;
    for (s, se) in row.sensitivities.iter().zip(&row.std_errors) {
        assert!((s - mean).abs() < 4.0 * se.max(1e-12) + 1e-12, "{s} vs {mean} (se {se})");
    }
    // exact value: φ(0) times the tipping point
    let expected = hscore::normal::pdf(0.0) * 70.0 / 256.0;
    assert!((mean - expected).abs() < 0.01 * expected);
    assert!((row.shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}
