use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A scoring category of a head-to-head league.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "pts")]
    Points,
    #[serde(rename = "reb")]
    Rebounds,
    #[serde(rename = "ast")]
    Assists,
    #[serde(rename = "stl")]
    Steals,
    #[serde(rename = "blk")]
    Blocks,
    #[serde(rename = "tpm")]
    Threes,
    #[serde(rename = "tov")]
    Turnovers,
    #[serde(rename = "ft_pct")]
    FreeThrowPct,
    #[serde(rename = "fg_pct")]
    FieldGoalPct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategoryKind {
    Counting,
    Percentage,
}

impl Category {
    /// The standard nine-category league, in display order.
    pub const NINE: [Category; 9] = [
        Category::Points,
        Category::Rebounds,
        Category::Assists,
        Category::Steals,
        Category::Blocks,
        Category::Threes,
        Category::Turnovers,
        Category::FreeThrowPct,
        Category::FieldGoalPct,
    ];

    pub fn kind(self) -> CategoryKind {
        match self {
            Category::FreeThrowPct | Category::FieldGoalPct => CategoryKind::Percentage,
            _ => CategoryKind::Counting,
        }
    }

    pub fn lower_is_better(self) -> bool {
        matches!(self, Category::Turnovers)
    }

    /// +1 for categories where more is better, -1 otherwise.
    pub fn orientation(self) -> f64 {
        if self.lower_is_better() {
            -1.0
        } else {
            1.0
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Category::Points => "pts",
            Category::Rebounds => "reb",
            Category::Assists => "ast",
            Category::Steals => "stl",
            Category::Blocks => "blk",
            Category::Threes => "tpm",
            Category::Turnovers => "tov",
            Category::FreeThrowPct => "ft_pct",
            Category::FieldGoalPct => "fg_pct",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::NINE
            .into_iter()
            .find(|c| c.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown category `{s}`")))
    }
}

/// On-court position. The index order (C, PG, SG, PF, SF) is the row order
/// of every per-position matrix and vector in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    C,
    PG,
    SG,
    PF,
    SF,
}

impl Position {
    pub const ALL: [Position; 5] = [Position::C, Position::PG, Position::SG, Position::PF, Position::SF];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Position::C => "C",
            Position::PG => "PG",
            Position::SG => "SG",
            Position::PF => "PF",
            Position::SF => "SF",
        };
        f.write_str(s)
    }
}

impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C" => Ok(Position::C),
            "PG" => Ok(Position::PG),
            "SG" => Ok(Position::SG),
            "PF" => Ok(Position::PF),
            "SF" => Ok(Position::SF),
            other => Err(Error::Config(format!("unknown position `{other}`"))),
        }
    }
}

/// A roster slot. `Util`, `G` and `F` are flex slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    #[serde(rename = "UTIL")]
    Util,
    C,
    G,
    PG,
    SG,
    F,
    PF,
    SF,
}

impl Slot {
    /// Positions a slot accepts.
    pub fn covers(self) -> &'static [Position] {
        match self {
            Slot::Util => &Position::ALL,
            Slot::C => &[Position::C],
            Slot::G => &[Position::PG, Position::SG],
            Slot::PG => &[Position::PG],
            Slot::SG => &[Position::SG],
            Slot::F => &[Position::PF, Position::SF],
            Slot::PF => &[Position::PF],
            Slot::SF => &[Position::SF],
        }
    }

    pub fn accepts(self, position: Position) -> bool {
        self.covers().contains(&position)
    }

    pub fn is_flex(self) -> bool {
        matches!(self, Slot::Util | Slot::G | Slot::F)
    }

    /// Tie-breaking bonus that steers future players into flex slots.
    pub fn flex_bonus(self) -> f64 {
        match self {
            Slot::Util => 0.0002,
            Slot::G | Slot::F => 0.0001,
            _ => 0.0,
        }
    }

    /// The non-flex position this slot stands for, if any.
    pub fn fixed_position(self) -> Option<Position> {
        match self {
            Slot::C => Some(Position::C),
            Slot::PG => Some(Position::PG),
            Slot::SG => Some(Position::SG),
            Slot::PF => Some(Position::PF),
            Slot::SF => Some(Position::SF),
            _ => None,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Slot::Util => "UTIL",
            Slot::C => "C",
            Slot::G => "G",
            Slot::PG => "PG",
            Slot::SG => "SG",
            Slot::F => "F",
            Slot::PF => "PF",
            Slot::SF => "SF",
        };
        f.write_str(s)
    }
}
