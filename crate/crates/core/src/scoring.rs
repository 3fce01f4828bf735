//! League aggregates over the relevant set `Q` and the static scores built
//! on them.
//!
//! Counting categories are standardized by the week-to-week spread `m_tau`;
//! percentage categories first become a volume-weighted impact
//! `(a_q / a_mu) * (r_q - r_mu)` and are then treated the same way. Turnovers
//! are sign-flipped here, and only here, so that larger scores are always
//! better.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::category::{Category, CategoryKind};
use crate::error::{Error, Result};
use crate::ingest::PlayerRecord;
use crate::CategoryVector;

/// Spread statistics for one category over `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryAggregate {
    pub category: Category,
    /// `m_mu` (counting) or the volume-weighted league rate `r_mu`.
    pub mu: f64,
    /// Pooled week-to-week standard deviation, `m_tau` / `r_tau`.
    pub tau: f64,
    /// Player-to-player standard deviation of means, `m_sigma` / `r_sigma`.
    pub sigma: f64,
    /// Mean weekly attempts `a_mu`; zero for counting categories.
    pub volume_mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeagueAggregates {
    pub categories: Vec<Category>,
    pub per_category: Vec<CategoryAggregate>,
    /// Variance of X-scores over `Q`, per category.
    pub x_sigma_sq: CategoryVector,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Volume-weighted weekly impact of a percentage line relative to `rate`.
fn impact(makes: f64, attempts: f64, rate: f64, volume_mu: f64) -> f64 {
    (makes - rate * attempts) / volume_mu
}

impl LeagueAggregates {
    pub fn compute(q: &[PlayerRecord], categories: &[Category]) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::Sizing(format!("aggregates need at least 2 players, got {}", q.len())));
        }
        if let Some(p) = q.iter().find(|p| p.active_week_count() < 2) {
            return Err(Error::Sizing(format!(
                "player `{}` has fewer than 2 healthy weeks",
                p.player_id
            )));
        }

        let mut per_category = Vec::with_capacity(categories.len());
        for &category in categories {
            let agg = match category.kind() {
                CategoryKind::Counting => {
                    let means: Vec<f64> = q.iter().map(|p| p.counting_mean(category)).collect();
                    let tau_sq = mean(
                        &q.iter()
                            .map(|p| {
                                let weeks: Vec<f64> =
                                    p.active_weeks().map(|w| w.stats.counting(category)).collect();
                                sample_variance(&weeks)
                            })
                            .collect::<Vec<_>>(),
                    );
                    CategoryAggregate {
                        category,
                        mu: mean(&means),
                        tau: tau_sq.sqrt(),
                        sigma: population_std(&means),
                        volume_mu: 0.0,
                    }
                }
                CategoryKind::Percentage => {
                    let (makes, attempts): (Vec<f64>, Vec<f64>) =
                        q.iter().map(|p| p.means.makes_attempts(category)).unzip();
                    let total_attempts: f64 = attempts.iter().sum();
                    if total_attempts <= 0.0 {
                        return Err(Error::DegenerateCategory(category.to_string()));
                    }
                    let rate = makes.iter().sum::<f64>() / total_attempts;
                    let volume_mu = mean(&attempts);
                    let impacts: Vec<f64> = makes
                        .iter()
                        .zip(&attempts)
                        .map(|(&m, &a)| impact(m, a, rate, volume_mu))
                        .collect();
                    let tau_sq = mean(
                        &q.iter()
                            .map(|p| {
                                let weeks: Vec<f64> = p
                                    .active_weeks()
                                    .map(|w| {
                                        let (m, a) = w.stats.makes_attempts(category);
                                        impact(m, a, rate, volume_mu)
                                    })
                                    .collect();
                                sample_variance(&weeks)
                            })
                            .collect::<Vec<_>>(),
                    );
                    CategoryAggregate {
                        category,
                        mu: rate,
                        tau: tau_sq.sqrt(),
                        sigma: population_std(&impacts),
                        volume_mu,
                    }
                }
            };
            if !(agg.tau > 0.0) || !agg.tau.is_finite() {
                return Err(Error::DegenerateCategory(category.to_string()));
            }
            per_category.push(agg);
        }

        let mut out = Self {
            categories: categories.to_vec(),
            per_category,
            x_sigma_sq: DVector::zeros(categories.len()),
        };
        let xs: Vec<CategoryVector> = q.iter().map(|p| out.x_score(p)).collect();
        let n = xs.len() as f64;
        let x_mean = xs.iter().fold(DVector::zeros(categories.len()), |acc, x| acc + x) / n;
        out.x_sigma_sq = xs
            .iter()
            .fold(DVector::zeros(categories.len()), |acc: CategoryVector, x| {
                let d = x - &x_mean;
                acc + d.component_mul(&d)
            })
            / n;
        Ok(out)
    }

    pub fn num_categories(&self) -> usize {
        self.categories.len()
    }

    /// X-score of a player: standardized by week-to-week spread only.
    pub fn x_score(&self, player: &PlayerRecord) -> CategoryVector {
        DVector::from_iterator(
            self.per_category.len(),
            self.per_category.iter().map(|a| match a.category.kind() {
                CategoryKind::Counting => {
                    a.category.orientation() * (player.counting_mean(a.category) - a.mu) / a.tau
                }
                CategoryKind::Percentage => {
                    let (m, att) = player.means.makes_attempts(a.category);
                    impact(m, att, a.mu, a.volume_mu) / a.tau
                }
            }),
        )
    }

    /// Un-normalized conversion factors `tau / sqrt(tau^2 + sigma^2)`.
    pub fn v_raw(&self) -> CategoryVector {
        DVector::from_iterator(
            self.per_category.len(),
            self.per_category.iter().map(|a| a.tau / a.tau.hypot(a.sigma)),
        )
    }

    /// `v`, normalized to sum to one.
    pub fn v_vector(&self) -> CategoryVector {
        let raw = self.v_raw();
        let s = raw.sum();
        raw / s
    }

    /// Per-category G-scores and their total.
    pub fn g_score(&self, player: &PlayerRecord) -> (CategoryVector, f64) {
        let g = self.x_score(player).component_mul(&self.v_raw());
        let total = g.sum();
        (g, total)
    }
}

/// Static Z-score totals over a whole pool, used to choose `Q`.
///
/// Counting categories are standardized over the pool's player means;
/// percentage categories use the volume-weighted impact against the pool's
/// league rate. A category with no spread contributes zero.
pub fn z_score_totals(pool: &[PlayerRecord], categories: &[Category]) -> Vec<f64> {
    let mut totals = vec![0.0; pool.len()];
    if pool.is_empty() {
        return totals;
    }
    for &category in categories {
        let values: Vec<f64> = match category.kind() {
            CategoryKind::Counting => pool.iter().map(|p| p.counting_mean(category)).collect(),
            CategoryKind::Percentage => {
                let (makes, attempts): (Vec<f64>, Vec<f64>) =
                    pool.iter().map(|p| p.means.makes_attempts(category)).unzip();
                let total_attempts: f64 = attempts.iter().sum();
                if total_attempts <= 0.0 {
                    continue;
                }
                let rate = makes.iter().sum::<f64>() / total_attempts;
                let volume_mu = mean(&attempts);
                makes
                    .iter()
                    .zip(&attempts)
                    .map(|(&m, &a)| impact(m, a, rate, volume_mu))
                    .collect()
            }
        };
        let m = mean(&values);
        let sd = population_std(&values);
        if sd < 1e-12 {
            continue;
        }
        for (t, v) in totals.iter_mut().zip(&values) {
            *t += category.orientation() * (v - m) / sd;
        }
    }
    totals
}
