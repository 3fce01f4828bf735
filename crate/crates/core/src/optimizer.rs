//! Adam ascent over the strategy parameters.
//!
//! Parameters are the category weights `j_C` plus the three flex share
//! vectors. Each block lives on its own "sums to one" hyperplane, so the
//! gradient of every block is first projected onto that hyperplane's
//! tangent space, then one Adam step is taken, then each block is divided
//! by its sum. Share components are clamped to `[0, 1]` before that.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roster::FlexShares;
use crate::CategoryVector;

/// Smallest admissible block sum for renormalization.
pub const MIN_SUM: f64 = 1e-8;
/// Scale of the candidate-direction nudge that keeps `j_C` off `v`.
pub const INIT_NUDGE: f64 = 1.0 / 500.0;
/// Step used to escape a singular point.
pub const ESCAPE_STEP: f64 = 1e-6;
/// Consecutive singular evaluations tolerated before giving up.
pub const MAX_SINGULAR: usize = 5;

const SHARE_LEN: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    #[serde(rename = "j_C")]
    pub weights: CategoryVector,
    pub shares: FlexShares,
}

impl StrategyParams {
    pub fn new(weights: CategoryVector, shares: FlexShares) -> Self {
        Self { weights, shares }
    }

    pub fn num_categories(&self) -> usize {
        self.weights.len()
    }

    /// Flat layout: `[j_C, j_U, j_G, j_F]`.
    pub fn to_vector(&self) -> DVector<f64> {
        let c = self.weights.len();
        let mut out = DVector::zeros(c + SHARE_LEN);
        out.rows_mut(0, c).copy_from(&self.weights);
        let s = &self.shares;
        for (k, x) in s.util.iter().chain(&s.guard).chain(&s.forward).enumerate() {
            out[c + k] = *x;
        }
        out
    }

    pub fn from_vector(flat: &DVector<f64>, categories: usize) -> Self {
        let weights = flat.rows(0, categories).into_owned();
        let s = |k: usize| flat[categories + k];
        let shares = FlexShares {
            util: [s(0), s(1), s(2), s(3), s(4)],
            guard: [s(5), s(6)],
            forward: [s(7), s(8)],
        };
        Self { weights, shares }
    }
}

/// Gradient blocks as `(offset, len)` within the flat layout.
fn blocks(categories: usize) -> [(usize, usize); 4] {
    [(0, categories), (categories, 5), (categories + 5, 2), (categories + 7, 2)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub grad_tolerance: f64,
    /// Weight on `v` when seeding from the previous optimum.
    pub init_mix: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_iters: 100,
            grad_tolerance: 1e-6,
            init_mix: 0.5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.learning_rate, self.beta1, self.beta2, self.epsilon, self.grad_tolerance];
        if positive.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Config("optimizer hyperparameters must be positive".into()));
        }
        if self.beta1 >= 1.0 || self.beta2 >= 1.0 {
            return Err(Error::Config("Adam betas must be below 1".into()));
        }
        if !(0.0..=1.0).contains(&self.init_mix) {
            return Err(Error::Config("init_mix must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

fn normalize_sum(x: &DVector<f64>) -> Result<DVector<f64>> {
    let s = x.sum();
    if !(s.abs() > MIN_SUM) || !s.is_finite() {
        return Err(Error::Renormalization(s));
    }
    Ok(x / s)
}

fn normalize_shares<const K: usize>(x: [f64; K]) -> Result<[f64; K]> {
    let clamped = x.map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) });
    let s: f64 = clamped.iter().sum();
    if !(s > MIN_SUM) {
        return Err(Error::Renormalization(s));
    }
    Ok(clamped.map(|v| v / s))
}

/// Divides `j_C` and every share vector by its own sum.
pub fn renormalize(params: &StrategyParams) -> Result<StrategyParams> {
    Ok(StrategyParams {
        weights: normalize_sum(&params.weights)?,
        shares: FlexShares {
            util: normalize_shares(params.shares.util)?,
            guard: normalize_shares(params.shares.guard)?,
            forward: normalize_shares(params.shares.forward)?,
        },
    })
}

fn l1_direction(d: &CategoryVector) -> CategoryVector {
    let l1 = d.lp_norm(1);
    if l1 > 0.0 && l1.is_finite() {
        d / l1
    } else {
        let mut e = DVector::zeros(d.len());
        if !e.is_empty() {
            e[0] = 1.0;
        }
        e
    }
}

fn nearly_collinear(a: &CategoryVector, b: &CategoryVector) -> bool {
    let (an, bn) = (a.norm(), b.norm());
    if an == 0.0 || bn == 0.0 {
        return true;
    }
    let residual = a - b * (a.dot(b) / (bn * bn));
    residual.norm() / an < 1e-6
}

/// Starting point for a candidate's optimization.
///
/// The first decision starts at `v` nudged toward the candidate's own
/// profile. Later decisions mix `v` with the team's previous optimum; if the
/// mix lands on `v` the same nudge is applied.
pub fn initialize(
    round: usize,
    prev: Option<&StrategyParams>,
    v: &CategoryVector,
    candidate_direction: &CategoryVector,
    init_mix: f64,
) -> StrategyParams {
    let nudge = l1_direction(candidate_direction) * INIT_NUDGE;
    let (base, shares) = match prev {
        Some(p) if round > 1 => (v * init_mix + &p.weights * (1.0 - init_mix), p.shares),
        _ => (v + &nudge, FlexShares::default()),
    };
    let mut weights = normalize_sum(&base).unwrap_or_else(|_| v.clone());
    if nearly_collinear(&weights, v) {
        weights = normalize_sum(&(v + &nudge)).unwrap_or_else(|_| v.clone());
    }
    StrategyParams { weights, shares }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    #[serde(rename = "V")]
    pub value: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub params: StrategyParams,
    pub value: f64,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
}

impl Optimum {
    /// Trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|t| serde_json::to_string(t).expect("trace entries serialize") + "\n")
            .collect()
    }
}

/// Objective value with its gradient in the flat layout of
/// [`StrategyParams::to_vector`].
pub type ValueAndGradient = (f64, DVector<f64>);

fn project_tangent(grad: &mut DVector<f64>, categories: usize) {
    for (offset, len) in blocks(categories) {
        let mut block = grad.rows_mut(offset, len);
        let mean = block.sum() / len as f64;
        block.add_scalar_mut(-mean);
    }
}

fn escape(params: &StrategyParams, attempt: usize) -> Result<StrategyParams> {
    let mut w = params.weights.clone();
    let c = attempt % w.len().max(1);
    w[c] += ESCAPE_STEP;
    renormalize(&StrategyParams { weights: w, shares: params.shares })
}

/// Adam ascent on `f`, returning the best iterate seen.
pub fn optimize<F>(initial: &StrategyParams, mut f: F, config: &OptimizerConfig) -> Result<Optimum>
where
    F: FnMut(&StrategyParams) -> Result<ValueAndGradient>,
{
    let categories = initial.num_categories();
    let mut current = renormalize(initial)?;
    let mut best: Option<(StrategyParams, f64)> = None;
    let mut trace = Vec::new();
    let dim = categories + SHARE_LEN;
    let mut m = DVector::zeros(dim);
    let mut s = DVector::zeros(dim);
    let mut singular = 0usize;
    let mut steps = 0usize;
    let mut iteration = 0usize;

    loop {
        let (value, mut grad) = match f(&current) {
            Ok(vg) => vg,
            Err(Error::Singular) => {
                singular += 1;
                if singular >= MAX_SINGULAR {
                    break;
                }
                current = escape(&current, singular - 1)?;
                continue;
            }
            Err(e) => return Err(e),
        };
        project_tangent(&mut grad, categories);
        let grad_norm = grad.amax();
        trace.push(TraceEntry { iteration, value, grad_norm });
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((current.clone(), value));
        }
        if iteration >= config.max_iters || grad_norm < config.grad_tolerance || !grad_norm.is_finite() {
            break;
        }
        iteration += 1;
        steps += 1;

        m = m * config.beta1 + &grad * (1.0 - config.beta1);
        s = s * config.beta2 + grad.component_mul(&grad) * (1.0 - config.beta2);
        let m_hat = &m / (1.0 - config.beta1.powi(steps as i32));
        let s_hat = &s / (1.0 - config.beta2.powi(steps as i32));
        let step = m_hat.zip_map(&s_hat, |mh, sh| config.learning_rate * mh / (sh.sqrt() + config.epsilon));

        let next = StrategyParams::from_vector(&(current.to_vector() + step), categories);
        match renormalize(&next) {
            Ok(p) => current = p,
            Err(Error::Renormalization(_)) => break,
            Err(e) => return Err(e),
        }
    }

    let (params, value) = best.ok_or(Error::Singular)?;
    Ok(Optimum { params, value, iterations: iteration, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v9() -> CategoryVector {
        DVector::from_vec(vec![0.12, 0.1, 0.11, 0.13, 0.09, 0.1, 0.1, 0.12, 0.13])
    }

    #[test]
    fn renormalize_is_idempotent_on_normalized_input() {
        let p = StrategyParams::new(v9(), FlexShares::default());
        let r = renormalize(&p).unwrap();
        assert!((r.weights - p.weights).amax() < 1e-15);
    }

    #[test]
    fn renormalize_undoes_scaling() {
        let p = StrategyParams::new(v9() * 3.0, FlexShares::default());
        let r = renormalize(&p).unwrap();
        assert!((r.weights.sum() - 1.0).abs() < 1e-15);
        assert!((r.weights - v9()).amax() < 1e-15);
    }

    #[test]
    fn renormalize_rejects_zero_sum() {
        let mut w = DVector::zeros(3);
        w[0] = 1.0;
        w[1] = -1.0;
        let p = StrategyParams::new(w, FlexShares::default());
        assert!(matches!(renormalize(&p), Err(Error::Renormalization(_))));
    }

    #[test]
    fn shares_are_clamped_before_normalizing() {
        let mut shares = FlexShares::default();
        shares.guard = [-0.5, 0.5];
        let r = renormalize(&StrategyParams::new(v9(), shares)).unwrap();
        assert_eq!(r.shares.guard, [0.0, 1.0]);
    }

    #[test]
    fn flat_layout_round_trips() {
        let mut shares = FlexShares::default();
        shares.util = [0.7, 0.0, 0.0, 0.3, 0.0];
        shares.guard = [0.3, 0.7];
        let p = StrategyParams::new(v9(), shares);
        assert_eq!(StrategyParams::from_vector(&p.to_vector(), 9), p);
    }

    #[test]
    fn first_round_moves_off_v() {
        let dir = DVector::from_element(9, 1.0);
        let mut dir2 = dir.clone();
        dir2[3] = 5.0;
        let p = initialize(1, None, &v9(), &dir2, 0.5);
        assert!((p.weights.sum() - 1.0).abs() < 1e-12);
        assert!((&p.weights - v9()).amax() > 1e-5);
    }

    #[test]
    fn zero_direction_falls_back_to_first_category() {
        let p = initialize(1, None, &v9(), &DVector::zeros(9), 0.5);
        assert!(p.weights[0] > v9()[0] / 1.01);
        assert!((&p.weights - v9()).amax() > 1e-5);
    }

    #[test]
    fn full_mix_still_perturbs() {
        let prev = StrategyParams::new(v9(), FlexShares::default());
        let p = initialize(3, Some(&prev), &v9(), &DVector::from_element(9, 1.0), 1.0);
        assert!((&p.weights - v9()).amax() > 1e-5);
    }

    #[test]
    fn later_rounds_mix_previous() {
        let mut w = v9();
        w[0] += 0.2;
        w[1] -= 0.2;
        let prev = StrategyParams::new(w.clone(), FlexShares::default());
        let p = initialize(2, Some(&prev), &v9(), &DVector::from_element(9, 1.0), 0.5);
        let expected = (v9() + w) * 0.5;
        assert!((p.weights - expected).amax() < 1e-12);
    }

    #[test]
    fn zero_gradient_returns_initial() {
        let init = StrategyParams::new(v9(), FlexShares::default());
        let out = optimize(&init, |_| Ok((1.0, DVector::zeros(18))), &OptimizerConfig::default()).unwrap();
        assert_eq!(out.params, init);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn zero_budget_returns_initial() {
        let init = StrategyParams::new(v9(), FlexShares::default());
        let config = OptimizerConfig { max_iters: 0, ..Default::default() };
        let out = optimize(&init, |p| Ok((0.0, p.to_vector())), &config).unwrap();
        assert_eq!(out.params, init);
    }

    #[test]
    fn persistent_singularity_is_reported() {
        let init = StrategyParams::new(v9(), FlexShares::default());
        let err = optimize(&init, |_| Err(Error::Singular), &OptimizerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Singular));
    }

    #[test]
    fn transient_singularity_is_escaped() {
        let init = StrategyParams::new(v9(), FlexShares::default());
        let mut calls = 0;
        let out = optimize(
            &init,
            |_| {
                calls += 1;
                if calls < 3 {
                    Err(Error::Singular)
                } else {
                    Ok((0.0, DVector::zeros(18)))
                }
            },
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!((out.params.weights.sum() - 1.0).abs() < 1e-12);
        assert!((&out.params.weights - v9()).amax() > 0.0);
    }

    #[test]
    fn best_iterate_is_kept() {
        // value falls as we move, so the start must be returned
        let init = StrategyParams::new(v9(), FlexShares::default());
        let start = init.weights.clone();
        let out = optimize(
            &init,
            |p| {
                let d = &p.weights - &start;
                let mut g = DVector::zeros(18);
                g[0] = 1.0;
                Ok((-d.norm(), g))
            },
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(out.params.weights, start);
        assert_eq!(out.value, 0.0);
    }
}
