use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hscore::engine::{EngineSettings, Model};
use hscore::future_picks::{calibrate, read_observations};
use hscore::ingest::{load_weekly_stats, write_weekly_stats};
use hscore::{Format, LeagueConfig};
use hscore_sim::output::write_gradient_table;
use hscore_sim::{
    default_correlation, generate_pool, gradient_analysis, read_correlation, run_experiment, write_experiment,
    ExperimentConfig, GradientConfig, SynthConfig,
};

#[derive(Parser)]
#[command(name = "hscore", version, about = "Dynamic draft valuation for head-to-head category leagues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic weekly stats CSV.
    Synth {
        #[arg(long, default_value_t = 200)]
        players: usize,
        #[arg(long, default_value_t = 20)]
        weeks: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-player X-score and G-score table as CSV, in G-score order.
    Scores {
        #[arg(long)]
        stats: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the future-pick parameters from `sigma,m,k` observations.
    Calibrate {
        #[arg(long)]
        obs: PathBuf,
    },
    /// Draft with the H-score agent in each seat and simulate seasons.
    Simulate {
        #[arg(long)]
        stats: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's format (`ec` or `mc`).
        #[arg(long)]
        format: Option<Format>,
        /// Seat to evaluate; repeat for several. All seats when omitted.
        #[arg(long)]
        seat: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        seasons: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Candidates evaluated per pick.
        #[arg(long, default_value_t = 50)]
        shortlist: usize,
        /// Run the all-G-score control instead.
        #[arg(long)]
        control: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Objective sensitivity per category across advantage levels.
    GradientAnalysis {
        /// Category correlation CSV; a built-in matrix when omitted.
        #[arg(long)]
        corr: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        levels: Vec<f64>,
        #[arg(long, default_value = "mc")]
        format: Format,
        #[arg(long, default_value_t = 50_000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the draft session API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Default player pool for new sessions; synthetic when omitted.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn league(config: Option<&Path>) -> Result<LeagueConfig> {
    match config {
        Some(p) => LeagueConfig::from_path(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(LeagueConfig::default()),
    }
}

fn write_scores(model: &Model, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let cats = &model.config.categories;
    let mut header = vec!["player_id".to_string(), "name".into(), "positions".into(), "g_total".into()];
    header.extend(cats.iter().map(|c| format!("x_{}", c.code())));
    header.extend(cats.iter().map(|c| format!("g_{}", c.code())));
    out.write_record(&header)?;
    let v = model.aggregates.v_raw();
    for &i in &model.g_order {
        let p = &model.players[i];
        let x = &model.x_scores[i];
        let positions: Vec<String> = p.positions.iter().map(|q| q.to_string()).collect();
        let mut rec = vec![p.player_id.clone(), p.name.clone(), positions.join("/"), format!("{:.6}", model.g_totals[i])];
        rec.extend(x.iter().map(|a| format!("{a:.6}")));
        rec.extend(x.iter().zip(v.iter()).map(|(a, b)| format!("{:.6}", a * b)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    match run(Cli::parse()) {
        // a closed pipe (`| head`) is not a failure
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => Ok(()),
        other => other,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { players, weeks, seed, out } => {
            let pool = generate_pool(&SynthConfig { players, weeks, seed, ..Default::default() });
            write_weekly_stats(output(out.as_deref())?, &pool)?;
        }
        Command::Scores { stats, config, out } => {
            let model = Model::new(load_weekly_stats(&stats)?, league(config.as_deref())?, EngineSettings::default())?;
            write_scores(&model, output(out.as_deref())?)?;
        }
        Command::Calibrate { obs } => {
            let fit = calibrate(&read_observations(File::open(&obs)?)?)?;
            println!("omega={:.4} r2={:.4} se={:.4}", fit.omega.slope, fit.omega.r_squared, fit.omega.std_error);
            println!("gamma={:.4} r2={:.4} se={:.4}", fit.gamma.slope, fit.gamma.r_squared, fit.gamma.std_error);
            println!("n={}", fit.omega.n);
        }
        Command::Simulate { stats, config, format, seat, seasons, seed, shortlist, control, out } => {
            let mut cfg = league(config.as_deref())?;
            if let Some(f) = format {
                cfg.format = f;
            }
            let settings = EngineSettings { shortlist, ..Default::default() };
            let model = Model::new(load_weekly_stats(&stats)?, cfg, settings)?;
            let report = run_experiment(&model, &ExperimentConfig { seasons, weeks: None, seed, seats: seat, control })?;
            write_experiment(&out, &report)?;
            for s in &report.seats {
                println!("seat {:>2}: {:.4} ± {:.4}", s.seat, s.rate, s.std_error);
            }
            let (mean, se) = report.mean_rate();
            println!("mean: {mean:.4} ± {se:.4}");
        }
        Command::GradientAnalysis { corr, levels, format, pairs, seed, out } => {
            let corr = match corr {
                Some(p) => read_correlation(File::open(&p)?)?,
                None => default_correlation(),
            };
            let cats = LeagueConfig::default().categories;
            let rows = gradient_analysis(&corr, &cats, &levels, format, &GradientConfig { pairs, seed })?;
            write_gradient_table(output(out.as_deref())?, &cats, &rows)?;
        }
        Command::Serve { addr, stats } => {
            let pool = match stats {
                Some(p) => load_weekly_stats(&p)?,
                None => generate_pool(&SynthConfig::default()),
            };
            let app = hscore_server::AppState::new(pool);
            tokio::runtime::Runtime::new()?.block_on(async {
                eprintln!("listening on {addr}");
                hscore_server::serve(addr, app).await
            })?;
        }
    }
    Ok(())
}
