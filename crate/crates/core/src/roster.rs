//! Positional model.
//!
//! Already-drafted players and placeholder "future" players are assigned to
//! roster slots by maximizing a reward matrix. Drafted players earn nothing
//! wherever they are eligible, so the solver parks them in the least
//! valuable slots and leaves the attractive ones open. Placeholders earn the
//! position reward `μ_C j_C` in fixed slots, and the best covered reward
//! plus a small bonus in flex slots. The open slots, with flex slots split
//! by the share vectors, give the expected future count `P` per position.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::category::{Position, Slot};
use crate::error::{Error, Result};
use crate::future_picks::{position_groups, weighted_mean};
use crate::ingest::PlayerRecord;
use crate::lap::{solve_assignment, Assignment};
use crate::scoring::LeagueAggregates;
use crate::CategoryVector;

/// `μ_C`: average X-score per position (rows C, PG, SG, PF, SF), with
/// multi-position players weighted `1/k` in each of their `k` positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionMeans {
    pub matrix: DMatrix<f64>,
}

impl PositionMeans {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        assert_eq!(matrix.nrows(), 5, "position means need one row per position");
        Self { matrix }
    }

    pub fn from_players(q: &[PlayerRecord], agg: &LeagueAggregates) -> Result<Self> {
        let dim = agg.num_categories();
        let xs: Vec<CategoryVector> = q.iter().map(|p| agg.x_score(p)).collect();
        let groups = position_groups(q, &xs);
        let mut matrix = DMatrix::zeros(5, dim);
        for (pos, group) in Position::ALL.iter().zip(&groups) {
            if group.is_empty() {
                return Err(Error::Grouping(pos.to_string()));
            }
            matrix.set_row(pos.index(), &weighted_mean(group, dim).transpose());
        }
        Ok(Self { matrix })
    }

    pub fn row(&self, position: Position) -> CategoryVector {
        self.matrix.row(position.index()).transpose()
    }
}

/// Expected fraction of each flex slot type devoted to each position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexShares {
    /// UTIL over (C, PG, SG, PF, SF).
    pub util: [f64; 5],
    /// G over (PG, SG).
    pub guard: [f64; 2],
    /// F over (PF, SF).
    pub forward: [f64; 2],
}

impl Default for FlexShares {
    fn default() -> Self {
        Self {
            util: [0.2; 5],
            guard: [0.5; 2],
            forward: [0.5; 2],
        }
    }
}

/// Position rewards `μ_C j_C`, one per position.
pub fn position_rewards(j: &CategoryVector, mu: &PositionMeans) -> DVector<f64> {
    &mu.matrix * j
}

fn slot_reward(slot: Slot, rewards: &DVector<f64>) -> f64 {
    match slot.fixed_position() {
        Some(p) => rewards[p.index()],
        None => {
            slot.covers()
                .iter()
                .map(|p| rewards[p.index()])
                .fold(f64::NEG_INFINITY, f64::max)
                + slot.flex_bonus()
        }
    }
}

/// `N x N` reward matrix: chosen players first (0 where eligible, `-inf`
/// elsewhere), then identical future-player rows.
pub fn build_reward_matrix(
    chosen: &[&[Position]],
    structure: &[Slot],
    rewards: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let n = structure.len();
    if chosen.len() > n {
        return Err(Error::Sizing(format!(
            "roster of {} players exceeds {} slots",
            chosen.len(),
            n
        )));
    }
    let future: Vec<f64> = structure.iter().map(|&s| slot_reward(s, rewards)).collect();
    Ok(DMatrix::from_fn(n, n, |i, j| match chosen.get(i) {
        Some(positions) => {
            if positions.iter().any(|&p| structure[j].accepts(p)) {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        None => future[j],
    }))
}

/// Whether a roster can be placed into the structure at all.
pub fn is_feasible(chosen: &[&[Position]], structure: &[Slot]) -> bool {
    if chosen.len() > structure.len() {
        return false;
    }
    let zeros = DVector::zeros(5);
    build_reward_matrix(chosen, structure, &zeros)
        .and_then(|m| solve_assignment(&m))
        .is_ok()
}

/// Slots left for future players after an assignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OpenSlots {
    /// Open fixed-position slots, indexed like [`Position::ALL`].
    pub fixed: [f64; 5],
    pub util: f64,
    pub guard: f64,
    pub forward: f64,
}

impl OpenSlots {
    pub fn from_assignment(assignment: &Assignment, chosen: usize, structure: &[Slot]) -> Self {
        let mut open = OpenSlots::default();
        for &col in assignment.row_to_col.iter().skip(chosen) {
            match structure[col] {
                Slot::Util => open.util += 1.0,
                Slot::G => open.guard += 1.0,
                Slot::F => open.forward += 1.0,
                fixed => open.fixed[fixed.fixed_position().expect("non-flex slot").index()] += 1.0,
            }
        }
        open
    }

    pub fn total(&self) -> f64 {
        self.fixed.iter().sum::<f64>() + self.util + self.guard + self.forward
    }
}

/// Solves the positional assignment for a roster under the given rewards.
pub fn assign_open_slots(
    chosen: &[&[Position]],
    structure: &[Slot],
    rewards: &DVector<f64>,
) -> Result<(Assignment, OpenSlots)> {
    let matrix = build_reward_matrix(chosen, structure, rewards)?;
    let assignment = solve_assignment(&matrix)?;
    let open = OpenSlots::from_assignment(&assignment, chosen.len(), structure);
    Ok((assignment, open))
}

/// `P`: expected number of future players per position.
pub fn future_position_counts(open: &OpenSlots, shares: &FlexShares) -> DVector<f64> {
    let mut p = DVector::from_row_slice(&open.fixed);
    for (k, s) in shares.util.iter().enumerate() {
        p[k] += open.util * s;
    }
    p[Position::PG.index()] += open.guard * shares.guard[0];
    p[Position::SG.index()] += open.guard * shares.guard[1];
    p[Position::PF.index()] += open.forward * shares.forward[0];
    p[Position::SF.index()] += open.forward * shares.forward[1];
    p
}

/// `μ_Cᵀ P`: the positional term added to the future-pick differential.
pub fn positional_adjustment(p: &DVector<f64>, mu: &PositionMeans) -> CategoryVector {
    mu.matrix.transpose() * p
}
