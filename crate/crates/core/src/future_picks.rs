//! Expected statistics of the manager's unknown future picks.
//!
//! Candidate players' deviations from a baseline player are modeled as a
//! zero-mean Gaussian with covariance `Σ` (the covariance of X-scores over
//! `Q`, computed per position and averaged). A manager drafting with weights
//! `j` gains `ω·σ` in the `j` basis per pick and gives up `γ·σ` of generic
//! (`v`-weighted) value, where `σ` is the spread of `jᵀx` once the generic
//! component has been conditioned away. The expected per-pick deviation is
//! the minimum-Mahalanobis-norm vector meeting both constraints:
//!
//! ```text
//! x_δ = Σ Uᵀ (U Σ Uᵀ)⁻¹ b,   U = [v; j],   b = σ·[-γ, ω]
//!     = Σ (v jᵀ − j vᵀ) Σ (−γ j − ω v) · σ / (jᵀΣj · vᵀΣv − (vᵀΣj)²)
//! ```
//!
//! and the full differential `X_δ` is `x_δ` times the number of picks left.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::category::Position;
use crate::error::{Error, Result};
use crate::ingest::PlayerRecord;
use crate::scoring::LeagueAggregates;
use crate::CategoryVector;

/// Sine of the angle between `j` and `v` below which they count as collinear.
pub const COLLINEAR_SINE: f64 = 1e-8;
const MIN_DETERMINANT: f64 = 1e-14;

/// `Σ`: covariance of player X-scores between categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryCovariance {
    pub matrix: DMatrix<f64>,
}

/// Per-position weighted groups of X-scores. Players eligible for `k`
/// positions enter each of their groups with weight `1/k`.
pub(crate) fn position_groups<'a>(
    q: &'a [PlayerRecord],
    xs: &'a [CategoryVector],
) -> [Vec<(f64, &'a CategoryVector)>; 5] {
    let mut groups: [Vec<(f64, &CategoryVector)>; 5] = Default::default();
    for (p, x) in q.iter().zip(xs) {
        let w = 1.0 / p.positions.len() as f64;
        for pos in &p.positions {
            groups[pos.index()].push((w, x));
        }
    }
    groups
}

pub(crate) fn weighted_mean(group: &[(f64, &CategoryVector)], dim: usize) -> CategoryVector {
    let total: f64 = group.iter().map(|(w, _)| w).sum();
    group
        .iter()
        .fold(DVector::zeros(dim), |acc, (w, x)| acc + *x * *w)
        / total
}

impl CategoryCovariance {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    /// Average of the five per-position weighted covariance matrices.
    pub fn from_players(q: &[PlayerRecord], agg: &LeagueAggregates) -> Result<Self> {
        let dim = agg.num_categories();
        let xs: Vec<CategoryVector> = q.iter().map(|p| agg.x_score(p)).collect();
        let groups = position_groups(q, &xs);
        let mut sum = DMatrix::zeros(dim, dim);
        for (pos, group) in Position::ALL.iter().zip(&groups) {
            if group.len() < 2 {
                return Err(Error::Grouping(pos.to_string()));
            }
            let mean = weighted_mean(group, dim);
            let total: f64 = group.iter().map(|(w, _)| w).sum();
            let mut cov = DMatrix::zeros(dim, dim);
            for (w, x) in group {
                let d = *x - &mean;
                cov += (&d * d.transpose()) * *w;
            }
            sum += cov / total;
        }
        let mut matrix = sum / Position::ALL.len() as f64;
        // exact symmetry
        matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `ω` and `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaParams {
    pub omega: f64,
    pub gamma: f64,
}

impl Default for DeltaParams {
    fn default() -> Self {
        Self { omega: 0.7, gamma: 0.25 }
    }
}

fn quad(cov: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&(cov * b))
}

/// Standard deviation of `jᵀx` across candidates once the generic
/// (`v`-weighted) component is held fixed.
pub fn sigma_of_weights(j: &CategoryVector, v: &CategoryVector, cov: &CategoryCovariance) -> Result<f64> {
    let sv = &cov.matrix * v;
    let kappa = v.dot(&sv);
    if !(kappa > 0.0) {
        return Err(Error::DegenerateCovariance);
    }
    let beta = sv.dot(j);
    let u = j - v * (beta / kappa);
    let var = quad(&cov.matrix, &u, &u);
    Ok(var.max(0.0).sqrt())
}

fn check_direction(j: &CategoryVector, v: &CategoryVector) -> Result<()> {
    let jn = j.norm();
    let vn = v.norm();
    if jn == 0.0 || vn == 0.0 {
        return Err(Error::Singular);
    }
    let cos = j.dot(v) / (jn * vn);
    let residual = j - v * (j.dot(v) / (vn * vn));
    let sine = residual.norm() / jn;
    if sine < COLLINEAR_SINE || cos.abs() > 1.0 {
        return Err(Error::Singular);
    }
    Ok(())
}

struct Pieces {
    sj: DVector<f64>,
    sv: DVector<f64>,
    alpha: f64,
    beta: f64,
    kappa: f64,
    det: f64,
}

fn pieces(j: &CategoryVector, v: &CategoryVector, cov: &CategoryCovariance) -> Result<Pieces> {
    check_direction(j, v)?;
    let sj = &cov.matrix * j;
    let sv = &cov.matrix * v;
    let alpha = j.dot(&sj);
    let beta = v.dot(&sj);
    let kappa = v.dot(&sv);
    if !(kappa > 0.0) {
        return Err(Error::DegenerateCovariance);
    }
    let det = alpha * kappa - beta * beta;
    if !(det > MIN_DETERMINANT) {
        return Err(Error::Singular);
    }
    Ok(Pieces { sj, sv, alpha, beta, kappa, det })
}

/// Per-pick expected deviation `x_δ(j)` of the manager's future picks.
pub fn per_pick_delta(
    j: &CategoryVector,
    params: DeltaParams,
    cov: &CategoryCovariance,
    v: &CategoryVector,
) -> Result<CategoryVector> {
    let p = pieces(j, v, cov)?;
    let DeltaParams { omega, gamma } = params;
    // (v jᵀ − j vᵀ) Σ (−γ j − ω v)
    let inner = v * (-(gamma * p.alpha + omega * p.beta)) + j * (gamma * p.beta + omega * p.kappa);
    // σ / det = sqrt(det / κ) / det
    let scale = 1.0 / (p.kappa * p.det).sqrt();
    Ok(&cov.matrix * inner * scale)
}

/// `X_δ(j)`: the per-pick deviation scaled by the picks remaining.
pub fn x_delta(
    j: &CategoryVector,
    params: DeltaParams,
    cov: &CategoryCovariance,
    v: &CategoryVector,
    picks_remaining: usize,
) -> Result<CategoryVector> {
    if picks_remaining == 0 {
        return Ok(DVector::zeros(j.len()));
    }
    Ok(per_pick_delta(j, params, cov, v)? * picks_remaining as f64)
}

/// Analytic Jacobian `∂X_δ/∂j` (rows: categories of `X_δ`, columns: `j`).
pub fn x_delta_jacobian(
    j: &CategoryVector,
    params: DeltaParams,
    cov: &CategoryCovariance,
    v: &CategoryVector,
    picks_remaining: usize,
) -> Result<DMatrix<f64>> {
    let n = j.len();
    if picks_remaining == 0 {
        return Ok(DMatrix::zeros(n, n));
    }
    let p = pieces(j, v, cov)?;
    let DeltaParams { omega, gamma } = params;

    let inner = v * (-(gamma * p.alpha + omega * p.beta)) + j * (gamma * p.beta + omega * p.kappa);
    // d(inner)/dj = −v (2γ Σj + ω Σv)ᵀ + (γβ + ωκ) I + γ j (Σv)ᵀ
    let d_inner = -(v * (p.sj.transpose() * (2.0 * gamma) + p.sv.transpose() * omega))
        + DMatrix::identity(n, n) * (gamma * p.beta + omega * p.kappa)
        + j * p.sv.transpose() * gamma;

    let scale = 1.0 / (p.kappa * p.det).sqrt();
    // d(det)/dj = 2κ Σj − 2β Σv; d(scale)/d(det) = −½ scale / det
    let d_det = p.sj.transpose() * (2.0 * p.kappa) - p.sv.transpose() * (2.0 * p.beta);
    let d_scale = d_det * (-0.5 * scale / p.det);

    let jac = &cov.matrix * (d_inner * scale + inner * d_scale);
    Ok(jac * picks_remaining as f64)
}

/// Central finite-difference Jacobian of [`x_delta`] with step `h` on each weight.
pub fn x_delta_jacobian_fd(
    j: &CategoryVector,
    params: DeltaParams,
    cov: &CategoryCovariance,
    v: &CategoryVector,
    picks_remaining: usize,
    h: f64,
) -> Result<DMatrix<f64>> {
    let n = j.len();
    let mut jac = DMatrix::zeros(n, n);
    x_delta(j, params, cov, v, picks_remaining)?;
    for c in 0..n {
        let mut up = j.clone();
        up[c] += h;
        let mut down = j.clone();
        down[c] -= h;
        let col = (x_delta(&up, params, cov, v, picks_remaining)?
            - x_delta(&down, params, cov, v, picks_remaining)?)
            / (2.0 * h);
        jac.set_column(c, &col);
    }
    Ok(jac)
}

/// One `(σ, m, k)` observation: the spread at a decision and the realized
/// gain in the `j` basis / loss in the `v` basis of the later picks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationObservation {
    pub sigma: f64,
    pub m: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub r_squared: f64,
    pub std_error: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    pub omega: SlopeFit,
    pub gamma: SlopeFit,
}

impl CalibrationFit {
    pub fn params(&self) -> DeltaParams {
        DeltaParams {
            omega: self.omega.slope,
            gamma: self.gamma.slope,
        }
    }
}

/// Least squares through the origin of `y` on `x`.
fn slope_through_origin(x: &[f64], y: &[f64]) -> SlopeFit {
    let n = x.len();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a).powi(2)).sum();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|b| (b - y_mean).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let std_error = (ss_res / (n as f64 - 1.0) / sxx).sqrt();
    SlopeFit { slope, r_squared, std_error, n }
}

/// Fits `ω` (slope of `m` on `σ`) and `γ` (slope of `k` on `σ`), both
/// through the origin.
pub fn calibrate(observations: &[CalibrationObservation]) -> Result<CalibrationFit> {
    if observations.len() < 2 {
        return Err(Error::DegenerateRegression(format!(
            "need at least 2 observations, got {}",
            observations.len()
        )));
    }
    let sigma: Vec<f64> = observations.iter().map(|o| o.sigma).collect();
    let mean = sigma.iter().sum::<f64>() / sigma.len() as f64;
    let spread = sigma.iter().map(|s| (s - mean).powi(2)).sum::<f64>();
    if !(spread > 1e-300) {
        return Err(Error::DegenerateRegression("all sigma values are equal".into()));
    }
    let m: Vec<f64> = observations.iter().map(|o| o.m).collect();
    let k: Vec<f64> = observations.iter().map(|o| o.k).collect();
    Ok(CalibrationFit {
        omega: slope_through_origin(&sigma, &m),
        gamma: slope_through_origin(&sigma, &k),
    })
}

/// Reads `sigma,m,k` rows (with header).
pub fn read_observations(reader: impl std::io::Read) -> Result<Vec<CalibrationObservation>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let obs: CalibrationObservation = row.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        out.push(obs);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::Position;
    use crate::ingest::{PlayerRecord, StatLine, WeeklyLine};
    use crate::Category;

    fn spd(n: usize, seed: u64) -> DMatrix<f64> {
        // deterministic pseudo-random SPD matrix
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = DMatrix::from_fn(n, n, |_, _| next());
        &a * a.transpose() + DMatrix::identity(n, n) * 0.1
    }

    #[test]
    fn sigma_vanishes_at_v() {
        let cov = CategoryCovariance::new(spd(9, 1));
        let v = DVector::from_element(9, 1.0 / 9.0);
        assert!(sigma_of_weights(&v, &v, &cov).unwrap() < 1e-12);
    }

    #[test]
    fn sigma_is_norm_for_identity_and_orthogonal_j() {
        let cov = CategoryCovariance::new(DMatrix::identity(3, 3));
        let v = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let j = DVector::from_vec(vec![0.0, 3.0, 4.0]);
        assert!((sigma_of_weights(&j, &v, &cov).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_covariance_is_reported() {
        let cov = CategoryCovariance::new(DMatrix::zeros(3, 3));
        let v = DVector::from_element(3, 1.0 / 3.0);
        assert!(matches!(sigma_of_weights(&v, &v, &cov), Err(Error::DegenerateCovariance)));
    }

    #[test]
    fn zero_picks_give_zero_delta_and_jacobian() {
        let cov = CategoryCovariance::new(spd(4, 2));
        let v = DVector::from_element(4, 0.25);
        let j = DVector::from_vec(vec![0.4, 0.2, 0.2, 0.2]);
        let p = DeltaParams::default();
        assert_eq!(x_delta(&j, p, &cov, &v, 0).unwrap(), DVector::zeros(4));
        assert_eq!(x_delta_jacobian(&j, p, &cov, &v, 0).unwrap(), DMatrix::zeros(4, 4));
    }

    #[test]
    fn collinear_weights_are_singular() {
        let cov = CategoryCovariance::new(spd(4, 3));
        let v = DVector::from_element(4, 0.25);
        let p = DeltaParams::default();
        assert!(matches!(x_delta(&v, p, &cov, &v, 3), Err(Error::Singular)));
        assert!(matches!(x_delta(&(&v * 2.0), p, &cov, &v, 3), Err(Error::Singular)));
        assert!(matches!(x_delta_jacobian(&v, p, &cov, &v, 3), Err(Error::Singular)));
    }

    #[test]
    fn per_pick_delta_meets_both_constraints() {
        let cov = CategoryCovariance::new(spd(9, 4));
        let v = DVector::from_fn(9, |i, _| 0.08 + 0.005 * i as f64);
        let v = &v / v.sum();
        let mut j = v.clone();
        j[2] += 0.05;
        j[7] -= 0.03;
        let j = &j / j.sum();
        let p = DeltaParams::default();
        let x = per_pick_delta(&j, p, &cov, &v).unwrap();
        let sigma = sigma_of_weights(&j, &v, &cov).unwrap();
        assert!((j.dot(&x) - p.omega * sigma).abs() < 1e-10);
        assert!((v.dot(&x) + p.gamma * sigma).abs() < 1e-10);
        let big = x_delta(&j, p, &cov, &v, 5).unwrap();
        assert!((big - x * 5.0).amax() < 1e-12);
    }

    #[test]
    fn calibration_recovers_exact_lines() {
        let obs: Vec<_> = (1..=10)
            .map(|i| {
                let s = i as f64 * 0.1;
                CalibrationObservation { sigma: s, m: 0.7 * s, k: 0.25 * s }
            })
            .collect();
        let fit = calibrate(&obs).unwrap();
        assert!((fit.omega.slope - 0.7).abs() < 1e-12);
        assert!((fit.gamma.slope - 0.25).abs() < 1e-12);
        assert!((fit.omega.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.params(), DeltaParams { omega: fit.omega.slope, gamma: fit.gamma.slope });
    }

    #[test]
    fn calibration_rejects_constant_sigma() {
        let obs = vec![CalibrationObservation { sigma: 1.0, m: 0.5, k: 0.1 }; 4];
        assert!(matches!(calibrate(&obs), Err(Error::DegenerateRegression(_))));
        assert!(calibrate(&obs[..1]).is_err());
    }

    #[test]
    fn observations_parse_from_csv() {
        let obs = read_observations("sigma,m,k\n0.5,0.2,0.1\n1.0,0.4,0.3\n".as_bytes()).unwrap();
        assert_eq!(obs.len(), 2);
        assert_eq!(obs[1].k, 0.3);
    }

    fn flat_player(id: &str, pos: Vec<Position>, pts: f64, reb: f64) -> PlayerRecord {
        let weeks = (1..=2)
            .map(|w| WeeklyLine {
                week: w,
                injured: false,
                stats: StatLine {
                    games: 3.0,
                    pts: pts + w as f64,
                    reb: reb + w as f64,
                    ..Default::default()
                },
            })
            .collect();
        PlayerRecord::new(id, id, pos, weeks)
    }

    #[test]
    fn grouping_requires_two_players_per_position() {
        let q = vec![
            flat_player("a", vec![Position::C], 10.0, 5.0),
            flat_player("b", vec![Position::C], 12.0, 9.0),
        ];
        let cats = [Category::Points, Category::Rebounds];
        let agg = LeagueAggregates::compute(&q, &cats).unwrap();
        assert!(matches!(CategoryCovariance::from_players(&q, &agg), Err(Error::Grouping(_))));
    }

    #[test]
    fn identical_players_give_zero_covariance() {
        let all = vec![Position::C, Position::PG, Position::SG, Position::PF, Position::SF];
        let q: Vec<_> = (0..3)
            .map(|i| flat_player(&format!("p{i}"), all.clone(), 10.0, 5.0))
            .collect();
        let cats = [Category::Points, Category::Rebounds];
        let agg = LeagueAggregates::compute(&q, &cats).unwrap();
        let cov = CategoryCovariance::from_players(&q, &agg).unwrap();
        assert!(cov.matrix.amax() < 1e-12);
    }
}
