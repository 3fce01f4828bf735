//! Weekly head-to-head scoring and full seasons.

use std::cmp::Ordering;

use hscore::ingest::{PlayerRecord, StatLine};
use hscore::{Category, CategoryKind, Format};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A player's non-injured weeks, ready for resampling.
#[derive(Debug, Clone)]
pub struct WeekBank {
    weeks: Vec<StatLine>,
}

impl WeekBank {
    pub fn new(player: &PlayerRecord) -> Option<Self> {
        let weeks: Vec<StatLine> = player.active_weeks().map(|w| w.stats).collect();
        (!weeks.is_empty()).then_some(Self { weeks })
    }

    pub fn len(&self) -> usize {
        self.weeks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weeks.is_empty()
    }
}

/// One week drawn uniformly, with replacement, from the player's weeks.
pub fn sample_week<'a>(bank: &'a WeekBank, rng: &mut impl Rng) -> &'a StatLine {
    &bank.weeks[rng.random_range(0..bank.weeks.len())]
}

fn category_value(total: &StatLine, category: Category) -> f64 {
    match category.kind() {
        CategoryKind::Counting => total.counting(category),
        CategoryKind::Percentage => {
            let (m, a) = total.makes_attempts(category);
            if a > 0.0 {
                m / a
            } else {
                0.0
            }
        }
    }
}

/// Result of one weekly matchup from team A's side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchupResult {
    /// Per category: `Greater` is a win for A.
    pub outcomes: Vec<Ordering>,
}

impl MatchupResult {
    pub fn wins(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_gt()).count()
    }

    pub fn losses(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_lt()).count()
    }

    pub fn ties(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_eq()).count()
    }

    /// Standings points for A and B.
    pub fn points(&self, format: Format) -> (f64, f64) {
        let (w, l, t) = (self.wins() as f64, self.losses() as f64, self.ties() as f64);
        match format {
            Format::EachCategory => (w + 0.5 * t, l + 0.5 * t),
            Format::MostCategories => match w.total_cmp(&l) {
                Ordering::Greater => (1.0, 0.0),
                Ordering::Less => (0.0, 1.0),
                Ordering::Equal => (0.5, 0.5),
            },
        }
    }
}

/// Compares two weekly team totals. Percentages come from summed makes and
/// attempts; turnovers favour the lower total.
pub fn score_matchup(a: &StatLine, b: &StatLine, categories: &[Category]) -> MatchupResult {
    let outcomes = categories
        .iter()
        .map(|&c| {
            let ord = category_value(a, c).total_cmp(&category_value(b, c));
            if c.lower_is_better() {
                ord.reverse()
            } else {
                ord
            }
        })
        .collect();
    MatchupResult { outcomes }
}

/// Sums a set of weekly lines.
pub fn team_total<'a>(lines: impl IntoIterator<Item = &'a StatLine>) -> StatLine {
    let mut total = StatLine::default();
    for l in lines {
        total.add_assign(l);
    }
    total
}

/// Pairings for one week of a circle-method round robin. With an odd team
/// count, the team paired with the phantom slot sits out.
pub fn round_robin(num_teams: usize, week: usize) -> Vec<(usize, usize)> {
    let n = num_teams + num_teams % 2;
    if n < 2 {
        return Vec::new();
    }
    let r = week % (n - 1);
    // slot 0 is fixed; the rest rotate
    let at = |slot: usize| -> usize {
        if slot == 0 {
            0
        } else {
            1 + (slot - 1 + r) % (n - 1)
        }
    };
    (0..n / 2)
        .map(|i| (at(i), at(n - 1 - i)))
        .filter(|&(a, b)| a < num_teams && b < num_teams)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonResult {
    /// Standings points per team.
    pub points: Vec<f64>,
    /// Category wins (ties count half) per team, the first tie-break.
    pub category_wins: Vec<f64>,
    pub champion: usize,
    /// Per team, per category: weeks won (ties half).
    pub category_record: Vec<Vec<f64>>,
    pub weeks: usize,
}

impl SeasonResult {
    /// Fraction of weeks a team won each category.
    pub fn category_rates(&self, team: usize) -> Vec<f64> {
        self.category_record[team].iter().map(|w| w / self.weeks as f64).collect()
    }
}

/// Champion by points, then category wins, then lowest index.
pub fn champion(points: &[f64], category_wins: &[f64]) -> usize {
    (0..points.len())
        .max_by(|&a, &b| {
            points[a]
                .total_cmp(&points[b])
                .then(category_wins[a].total_cmp(&category_wins[b]))
                .then(b.cmp(&a))
        })
        .unwrap_or(0)
}

/// Plays a season of `weeks` round-robin weeks between fixed rosters.
pub fn simulate_season(
    rosters: &[Vec<&WeekBank>],
    categories: &[Category],
    format: Format,
    weeks: usize,
    rng: &mut impl Rng,
) -> SeasonResult {
    let n = rosters.len();
    let c = categories.len();
    let mut points = vec![0.0; n];
    let mut category_wins = vec![0.0; n];
    let mut category_record = vec![vec![0.0; c]; n];
    for week in 0..weeks {
        let totals: Vec<StatLine> = rosters
            .iter()
            .map(|roster| team_total(roster.iter().map(|b| sample_week(b, rng))))
            .collect();
        for (a, b) in round_robin(n, week) {
            let result = score_matchup(&totals[a], &totals[b], categories);
            let (pa, pb) = result.points(format);
            points[a] += pa;
            points[b] += pb;
            for (k, o) in result.outcomes.iter().enumerate() {
                let (wa, wb) = match o {
                    Ordering::Greater => (1.0, 0.0),
                    Ordering::Less => (0.0, 1.0),
                    Ordering::Equal => (0.5, 0.5),
                };
                category_record[a][k] += wa;
                category_record[b][k] += wb;
                category_wins[a] += wa;
                category_wins[b] += wb;
            }
        }
    }
    let champion = champion(&points, &category_wins);
    SeasonResult { points, category_wins, champion, category_record, weeks }
}
