//! Writers for experiment artifacts.

use std::io::Write;
use std::path::Path;

use hscore::engine::TranscriptEntry;
use hscore::{Category, Result};
use serde::Serialize;

use crate::experiment::ExperimentReport;
use crate::gradient::GradientRow;

/// Bins of the per-category season win-rate histogram.
pub const HISTOGRAM_BINS: usize = 10;

fn csv_err(e: csv::Error) -> hscore::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => hscore::Error::Io(io),
        other => hscore::Error::Domain(format!("csv: {other:?}")),
    }
}

pub fn write_winrates(w: impl Write, report: &ExperimentReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["seat", "seasons", "championships", "rate", "std_error"]).map_err(csv_err)?;
    for s in &report.seats {
        out.write_record([
            s.seat.to_string(),
            s.seasons.to_string(),
            s.championships.to_string(),
            format!("{:.6}", s.rate),
            format!("{:.6}", s.std_error),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Counts of category-season win rates in equal-width bins over `[0, 1]`.
pub fn histogram(values: impl IntoIterator<Item = f64>) -> [usize; HISTOGRAM_BINS] {
    let mut bins = [0usize; HISTOGRAM_BINS];
    for v in values {
        let b = ((v * HISTOGRAM_BINS as f64).floor() as usize).min(HISTOGRAM_BINS - 1);
        bins[b] += 1;
    }
    bins
}

pub fn write_category_hist(w: impl Write, report: &ExperimentReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["category", "bin_lo", "bin_hi", "count"]).map_err(csv_err)?;
    for (k, cat) in report.categories.iter().enumerate() {
        let values = report.seats.iter().flat_map(|s| s.category_rates.iter().map(move |r| r[k]));
        for (b, count) in histogram(values).iter().enumerate() {
            out.write_record([
                cat.code().to_string(),
                format!("{:.1}", b as f64 / HISTOGRAM_BINS as f64),
                format!("{:.1}", (b + 1) as f64 / HISTOGRAM_BINS as f64),
                count.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_calibration(w: impl Write, report: &ExperimentReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for obs in &report.calibration {
        out.serialize(obs).map_err(csv_err)?;
    }
    if report.calibration.is_empty() {
        out.write_record(["sigma", "m", "k"]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SeatLine<'a> {
    seat: usize,
    #[serde(flatten)]
    entry: &'a TranscriptEntry,
}

pub fn write_transcripts(mut w: impl Write, report: &ExperimentReport) -> Result<()> {
    for s in &report.seats {
        for entry in &s.transcript {
            let line = serde_json::to_string(&SeatLine { seat: s.seat, entry })
                .map_err(|e| hscore::Error::Domain(e.to_string()))?;
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}

/// Writes all experiment files into `dir`.
pub fn write_experiment(dir: &Path, report: &ExperimentReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let open = |name: &str| std::fs::File::create(dir.join(name)).map(std::io::BufWriter::new);
    write_winrates(open("winrates.csv")?, report)?;
    write_category_hist(open("category_hist.csv")?, report)?;
    write_calibration(open("calibration_obs.csv")?, report)?;
    write_transcripts(open("transcript.jsonl")?, report)?;
    Ok(())
}

pub fn write_gradient_table(w: impl Write, categories: &[Category], rows: &[GradientRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["advantage".to_string(), "victory".to_string()];
    header.extend(categories.iter().map(|c| c.code().to_string()));
    header.extend(categories.iter().map(|c| format!("{}_share", c.code())));
    out.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![format!("{}", r.advantage), format!("{:.4}", r.victory)];
        rec.extend(r.sensitivities.iter().map(|s| format!("{s:.6}")));
        rec.extend(r.shares.iter().map(|s| format!("{s:.4}")));
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_edges() {
        let h = histogram([0.0, 0.05, 0.1, 0.99, 1.0]);
        assert_eq!(h[0], 2);
        assert_eq!(h[1], 1);
        assert_eq!(h[9], 2);
    }
}
