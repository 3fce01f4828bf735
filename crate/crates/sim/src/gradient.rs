//! Objective sensitivities under correlated weekly performance.
//!
//! The weekly differential `D` is multivariate normal in the oriented basis
//! (larger is better for every category): mean `+a` for counting
//! categories, `−a` for turnovers (a stronger team also turns the ball over
//! more), zero for percentages, and the supplied correlation with the
//! turnover row and column flipped. The sensitivity to category `c` is
//!
//! ```text
//! ∂V/∂μ_c = E[ f_{D_c | D_-c}(0) · (V(c won) − V(c lost)) ]
//! ```
//!
//! estimated with antithetic Monte Carlo draws.

use hscore::{Category, CategoryKind, Error, Format, Result};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// A plausible weekly correlation between category differentials, raw
/// orientation, in the default category order.
pub fn default_correlation() -> DMatrix<f64> {
    // pts reb ast stl blk tpm tov ft fg
    #[rustfmt::skip]
    let rows = [
        1.00, 0.30, 0.40, 0.25, 0.10, 0.55, 0.45, 0.10, 0.20,
        0.30, 1.00, 0.15, 0.10, 0.40, 0.00, 0.25, -0.10, 0.25,
        0.40, 0.15, 1.00, 0.35, 0.00, 0.25, 0.55, 0.10, 0.05,
        0.25, 0.10, 0.35, 1.00, 0.10, 0.15, 0.25, 0.05, 0.05,
        0.10, 0.40, 0.00, 0.10, 1.00, -0.05, 0.10, -0.10, 0.20,
        0.55, 0.00, 0.25, 0.15, -0.05, 1.00, 0.20, 0.15, -0.05,
        0.45, 0.25, 0.55, 0.25, 0.10, 0.20, 1.00, 0.00, 0.05,
        0.10, -0.10, 0.10, 0.05, -0.10, 0.15, 0.00, 1.00, 0.00,
        0.20, 0.25, 0.05, 0.05, 0.20, -0.05, 0.05, 0.00, 1.00,
    ];
    DMatrix::from_row_slice(9, 9, &rows)
}

/// Reads a square correlation matrix from a header-less CSV.
pub fn read_correlation(reader: impl std::io::Read) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse { line: line as u64 + 1, message: e.to_string() })?;
        for field in rec.iter() {
            values.push(field.parse::<f64>().map_err(|e| Error::Parse {
                line: line as u64 + 1,
                message: format!("`{field}`: {e}"),
            })?);
        }
        rows += 1;
    }
    if rows == 0 || values.len() != rows * rows {
        return Err(Error::Sizing(format!("correlation matrix is not square ({} values, {rows} rows)", values.len())));
    }
    Ok(DMatrix::from_row_slice(rows, rows, &values))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GradientConfig {
    /// Antithetic pairs per advantage level.
    pub pairs: usize,
    pub seed: u64,
}

impl Default for GradientConfig {
    fn default() -> Self {
        Self { pairs: 50_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientRow {
    pub advantage: f64,
    /// Match win probability (MC) or expected share of categories won (EC).
    pub victory: f64,
    pub sensitivities: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Sensitivities divided by their sum.
    pub shares: Vec<f64>,
}

fn match_value(wins: usize, categories: usize, format: Format) -> f64 {
    match format {
        Format::EachCategory => wins as f64,
        Format::MostCategories => match (2 * wins).cmp(&categories) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Less => 0.0,
        },
    }
}

fn oriented(corr: &DMatrix<f64>, categories: &[Category]) -> DMatrix<f64> {
    let s = DVector::from_iterator(categories.len(), categories.iter().map(|c| c.orientation()));
    DMatrix::from_fn(corr.nrows(), corr.ncols(), |i, j| corr[(i, j)] * s[i] * s[j])
}

/// Sensitivity table, one row per advantage level.
pub fn gradient_analysis(
    corr: &DMatrix<f64>,
    categories: &[Category],
    levels: &[f64],
    format: Format,
    cfg: &GradientConfig,
) -> Result<Vec<GradientRow>> {
    let c = categories.len();
    if corr.nrows() != c || corr.ncols() != c {
        return Err(Error::Sizing(format!("correlation is {}x{} for {c} categories", corr.nrows(), corr.ncols())));
    }
    if cfg.pairs == 0 {
        return Err(Error::Config("at least one sample pair is required".into()));
    }
    let sigma = oriented(corr, categories);
    if (0..c).any(|i| (sigma[(i, i)] - 1.0).abs() > 1e-9) || (&sigma - sigma.transpose()).amax() > 1e-9 {
        return Err(Error::Domain("correlation matrix must be symmetric with unit diagonal".into()));
    }
    let chol = sigma.clone().cholesky().ok_or(Error::DegenerateCovariance)?;
    let precision = chol.inverse();
    let l = chol.l();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut rows = Vec::with_capacity(levels.len());
    for &a in levels {
        let mu = DVector::from_iterator(
            c,
            categories.iter().map(|cat| match cat.kind() {
                CategoryKind::Counting => a * cat.orientation(),
                CategoryKind::Percentage => 0.0,
            }),
        );
        let n = 2 * cfg.pairs;
        let mut victory = 0.0;
        let mut sum = vec![0.0; c];
        let mut sum_sq = vec![0.0; c];
        for _ in 0..cfg.pairs {
            let z = DVector::from_iterator(c, (0..c).map(|_| StandardNormal.sample(&mut rng)));
            let lz = &l * z;
            for sign in [1.0, -1.0] {
                let d = &mu + &lz * sign;
                let dev = &d - &mu;
                let wins = d.iter().filter(|x| **x > 0.0).count();
                victory += match_value(wins, c, format);
                let pdev = &precision * &dev;
                for k in 0..c {
                    let p_kk = precision[(k, k)];
                    // conditional mean of D_k given the others
                    let cond_mean = mu[k] - (pdev[k] - p_kk * dev[k]) / p_kk;
                    let s = 1.0 / p_kk.sqrt();
                    let density = hscore::normal::pdf(cond_mean / s) / s;
                    let others = wins - usize::from(d[k] > 0.0);
                    let jump = match_value(others + 1, c, format) - match_value(others, c, format);
                    let x = density * jump;
                    sum[k] += x;
                    sum_sq[k] += x * x;
                }
            }
        }
        let nf = n as f64;
        let sensitivities: Vec<f64> = sum.iter().map(|s| s / nf).collect();
        let std_errors = sum_sq
            .iter()
            .zip(&sensitivities)
            .map(|(sq, m)| ((sq / nf - m * m).max(0.0) / nf).sqrt())
            .collect();
        let total: f64 = sensitivities.iter().sum();
        let shares = sensitivities.iter().map(|s| if total > 0.0 { s / total } else { 0.0 }).collect();
        let victory = match format {
            Format::EachCategory => victory / nf / c as f64,
            Format::MostCategories => victory / nf,
        };
        rows.push(GradientRow { advantage: a, victory, sensitivities, std_errors, shares });
    }
    Ok(rows)
}
