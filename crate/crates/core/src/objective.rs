//! Win probabilities and the two format objectives with their gradients.
//!
//! Each category's weekly differential is treated as an independent normal;
//! `w_c = Φ(μ_c / s_c)`. Each Category scores `Σ w_c`. Most Categories
//! scores the probability of a strict majority plus half the probability of
//! an overall tie (even category counts only). Its gradient is the Each
//! Category gradient with every category scaled by the probability that it
//! is the tipping point of the match.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{Error, Result};
use crate::normal;
use crate::CategoryVector;

/// Normal model of one matchup's per-category differential (team minus
/// opponent, X-score basis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialDistribution {
    pub mean: CategoryVector,
    pub variance: CategoryVector,
}

impl DifferentialDistribution {
    pub fn new(mean: CategoryVector, variance: CategoryVector) -> Self {
        Self { mean, variance }
    }

    fn check(&self) -> Result<()> {
        if self.mean.len() != self.variance.len() {
            return Err(Error::Domain("mean and variance lengths differ".into()));
        }
        if let Some(v) = self.variance.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!("variance must be positive, got {v}")));
        }
        Ok(())
    }

    /// Normal density of each category's differential at zero, i.e.
    /// `∂w_c/∂μ_c`.
    pub fn densities(&self) -> Result<CategoryVector> {
        self.check()?;
        Ok(self.mean.zip_map(&self.variance, |m, v| {
            let s = v.sqrt();
            normal::pdf(m / s) / s
        }))
    }
}

/// `w_c = ½[1 + erf(μ_c / (√2 s_c))]` for every category.
pub fn win_probabilities(dist: &DifferentialDistribution) -> Result<CategoryVector> {
    dist.check()?;
    Ok(dist.mean.zip_map(&dist.variance, |m, v| normal::cdf(m / v.sqrt())))
}

pub fn each_category_value(w: &CategoryVector) -> f64 {
    w.sum()
}

/// `∇V = Σ_c PDF_c · ∇μ_c`, where `dx` has one row per category and one
/// column per parameter.
pub fn each_category_gradient(dist: &DifferentialDistribution, dx: &DMatrix<f64>) -> Result<DVector<f64>> {
    Ok(dx.transpose() * dist.densities()?)
}

/// Largest loss count from which a match can still be won (or tied, for an
/// even category count).
fn max_losses(categories: usize) -> usize {
    if categories % 2 == 1 {
        (categories - 1) / 2
    } else {
        categories / 2
    }
}

/// Most Categories value with the number of scenario products it took.
///
/// Walks the win/loss scenario tree one category per layer, dropping any
/// node whose losses already rule out a win or tie. Each surviving child
/// costs one multiplication; the first layer costs none.
pub fn most_categories_value_counted(w: &CategoryVector) -> (f64, usize) {
    let n = w.len();
    if n == 0 {
        return (0.0, 0);
    }
    let limit = max_losses(n);
    let mut products = 0usize;
    // (probability, losses)
    let mut layer: Vec<(f64, usize)> = Vec::with_capacity(1 << n.min(16));
    layer.push((w[0], 0));
    if limit >= 1 {
        layer.push((1.0 - w[0], 1));
    }
    let mut next = Vec::with_capacity(layer.capacity());
    for c in 1..n {
        next.clear();
        for &(p, losses) in &layer {
            next.push((p * w[c], losses));
            products += 1;
            if losses < limit {
                next.push((p * (1.0 - w[c]), losses + 1));
                products += 1;
            }
        }
        std::mem::swap(&mut layer, &mut next);
    }
    let value = layer
        .iter()
        .map(|&(p, losses)| {
            let wins = n - losses;
            if 2 * wins > n {
                p
            } else if 2 * wins == n {
                0.5 * p
            } else {
                0.0
            }
        })
        .sum();
    (value, products)
}

pub fn most_categories_value(w: &CategoryVector) -> f64 {
    most_categories_value_counted(w).0
}

/// Distribution of the number of wins among all categories except `skip`.
fn win_count_distribution(w: &CategoryVector, skip: Option<usize>) -> Vec<f64> {
    let mut dist = vec![1.0];
    for (c, &p) in w.iter().enumerate() {
        if Some(c) == skip {
            continue;
        }
        let mut next = vec![0.0; dist.len() + 1];
        for (k, &d) in dist.iter().enumerate() {
            next[k] += d * (1.0 - p);
            next[k + 1] += d * p;
        }
        dist = next;
    }
    dist
}

/// Probability that category `c1` decides the match.
///
/// Odd counts: the other categories split evenly. Even counts: the others
/// leave `c1` able to move the result by a half step, i.e. they hold
/// `C/2 - 1` or `C/2` wins.
pub fn tipping_point(w: &CategoryVector, c1: usize) -> f64 {
    let n = w.len();
    let others = win_count_distribution(w, Some(c1));
    if n % 2 == 1 {
        others[(n - 1) / 2]
    } else {
        let half = n / 2;
        others[half - 1] + others.get(half).copied().unwrap_or(0.0)
    }
}

pub fn tipping_points(w: &CategoryVector) -> CategoryVector {
    DVector::from_iterator(w.len(), (0..w.len()).map(|c| tipping_point(w, c)))
}

/// `∇V = Σ T_c · PDF_c · ∇μ_c`, halved for an even category count.
pub fn most_categories_gradient(dist: &DifferentialDistribution, dx: &DMatrix<f64>) -> Result<DVector<f64>> {
    Ok(dx.transpose() * most_categories_sensitivity(dist)?)
}

fn most_categories_sensitivity(dist: &DifferentialDistribution) -> Result<CategoryVector> {
    let w = win_probabilities(dist)?;
    let t = tipping_points(&w);
    let half = if w.len() % 2 == 0 { 0.5 } else { 1.0 };
    Ok(dist.densities()?.component_mul(&t) * half)
}

/// Objective value, win probabilities and `∂V/∂μ` for one matchup.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchupEvaluation {
    pub value: f64,
    pub win_probabilities: CategoryVector,
    pub mean_gradient: CategoryVector,
}

pub fn evaluate(format: Format, dist: &DifferentialDistribution) -> Result<MatchupEvaluation> {
    let w = win_probabilities(dist)?;
    let (value, mean_gradient) = match format {
        Format::EachCategory => (each_category_value(&w), dist.densities()?),
        Format::MostCategories => (most_categories_value(&w), most_categories_sensitivity(dist)?),
    };
    Ok(MatchupEvaluation {
        value,
        win_probabilities: w,
        mean_gradient,
    })
}

pub fn format_value(format: Format, w: &CategoryVector) -> f64 {
    match format {
        Format::EachCategory => each_category_value(w),
        Format::MostCategories => most_categories_value(w),
    }
}

/// Arithmetic mean of per-opponent values and gradients.
pub fn average_over_opponents(results: &[(f64, DVector<f64>)]) -> Result<(f64, DVector<f64>)> {
    let (first, rest) = results
        .split_first()
        .ok_or_else(|| Error::Domain("no opponents to average over".into()))?;
    let n = results.len() as f64;
    let (sum_v, sum_g) = rest
        .iter()
        .fold((first.0, first.1.clone()), |(v, g), (rv, rg)| (v + rv, g + rg));
    Ok((sum_v / n, sum_g / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize, p: f64) -> CategoryVector {
        DVector::from_element(n, p)
    }

    #[test]
    fn even_odds_at_zero_mean() {
        let d = DifferentialDistribution::new(DVector::zeros(3), DVector::from_element(3, 4.0));
        assert_eq!(win_probabilities(&d).unwrap(), uniform(3, 0.5));
    }

    #[test]
    fn one_standard_deviation_is_phi_one() {
        let d = DifferentialDistribution::new(DVector::from_element(1, 2.0), DVector::from_element(1, 4.0));
        let w = win_probabilities(&d).unwrap();
        assert!((w[0] - 0.841_344_746_068_543).abs() < 1e-9);
    }

    #[test]
    fn win_probability_is_monotone_in_mean() {
        let mut last = 0.0;
        for k in 0..50 {
            let d = DifferentialDistribution::new(DVector::from_element(1, k as f64), DVector::from_element(1, 9.0));
            let w = win_probabilities(&d).unwrap()[0];
            assert!(w >= last);
            last = w;
        }
        assert!(last > 1.0 - 1e-9);
    }

    #[test]
    fn nonpositive_variance_is_domain_error() {
        let d = DifferentialDistribution::new(DVector::zeros(2), DVector::from_vec(vec![1.0, 0.0]));
        assert!(matches!(win_probabilities(&d), Err(Error::Domain(_))));
    }

    #[test]
    fn each_category_sums() {
        assert_eq!(each_category_value(&uniform(9, 0.5)), 4.5);
        assert_eq!(each_category_value(&uniform(9, 1.0)), 9.0);
        let w = DVector::from_vec(vec![0.1, 0.7, 0.25]);
        assert!((each_category_value(&w) - 1.05).abs() < 1e-15);
    }

    #[test]
    fn zero_jacobian_gives_zero_gradient() {
        let d = DifferentialDistribution::new(DVector::from_element(9, 0.3), DVector::from_element(9, 2.0));
        let dx = DMatrix::zeros(9, 4);
        assert_eq!(each_category_gradient(&d, &dx).unwrap(), DVector::zeros(4));
        assert_eq!(most_categories_gradient(&d, &dx).unwrap(), DVector::zeros(4));
    }

    #[test]
    fn far_categories_contribute_nothing() {
        let d = DifferentialDistribution::new(DVector::from_vec(vec![0.0, 60.0]), DVector::from_element(2, 1.0));
        let g = each_category_gradient(&d, &DMatrix::identity(2, 2)).unwrap();
        assert!(g[1] < 1e-300);
        assert!(g[0] > 0.39);
    }

    #[test]
    fn majority_of_fair_coins_is_half() {
        assert!((most_categories_value(&uniform(9, 0.5)) - 0.5).abs() < 1e-15);
        assert!((most_categories_value(&uniform(8, 0.5)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_category_is_its_probability() {
        assert_eq!(most_categories_value(&DVector::from_element(1, 0.3)), 0.3);
    }

    #[test]
    fn nine_category_tree_uses_634_products() {
        let (_, products) = most_categories_value_counted(&uniform(9, 0.37));
        assert_eq!(products, 634);
    }

    #[test]
    fn fair_tipping_point_is_binomial() {
        let t = tipping_point(&uniform(9, 0.5), 3);
        assert!((t - 70.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn forced_wins_remove_tipping_point() {
        let mut w = uniform(9, 0.5);
        for c in 1..6 {
            w[c] = 1.0;
        }
        assert_eq!(tipping_point(&w, 0), 0.0);
    }

    #[test]
    fn averaging_opponents() {
        let a = (1.0, DVector::from_vec(vec![1.0, 2.0]));
        let b = (3.0, DVector::from_vec(vec![3.0, 0.0]));
        let (v, g) = average_over_opponents(&[a.clone()]).unwrap();
        assert_eq!((v, g), a.clone());
        let (v, g) = average_over_opponents(&[a.clone(), a.clone()]).unwrap();
        assert_eq!((v, g), a.clone());
        let (v, g) = average_over_opponents(&[a, b]).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(g, DVector::from_vec(vec![2.0, 1.0]));
        assert!(average_over_opponents(&[]).is_err());
    }
}
