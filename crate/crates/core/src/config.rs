use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::category::{Category, Slot};
use crate::error::{Error, Result};

/// Head-to-head scoring format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// Every category won in a week is one standings point.
    #[serde(alias = "ec")]
    EachCategory,
    /// Winning a majority of categories wins the week.
    #[serde(alias = "mc")]
    MostCategories,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Format::EachCategory => f.write_str("ec"),
            Format::MostCategories => f.write_str("mc"),
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ec" | "each_category" | "each-category" => Ok(Format::EachCategory),
            "mc" | "most_categories" | "most-categories" => Ok(Format::MostCategories),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// League settings. Serialized as the JSON league-config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LeagueConfig {
    pub num_teams: usize,
    pub roster_size: usize,
    pub categories: Vec<Category>,
    pub position_structure: Vec<Slot>,
    pub format: Format,
    pub weeks_per_season: usize,
    pub omega: f64,
    pub gamma: f64,
}

impl Default for LeagueConfig {
    fn default() -> Self {
        Self {
            num_teams: 12,
            roster_size: 13,
            categories: Category::NINE.to_vec(),
            position_structure: default_structure(),
            format: Format::MostCategories,
            weeks_per_season: 20,
            omega: 0.7,
            gamma: 0.25,
        }
    }
}

/// 3 UTIL, 2 C, 2 G, 1 PG, 1 SG, 2 F, 1 PF, 1 SF.
pub fn default_structure() -> Vec<Slot> {
    use Slot::*;
    vec![Util, Util, Util, C, C, G, G, PG, SG, F, F, PF, SF]
}

impl LeagueConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let config: LeagueConfig =
            serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::Config("category list is empty".into()));
        }
        let mut seen = self.categories.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.categories.len() {
            return Err(Error::Config("duplicate category".into()));
        }
        if self.num_teams < 2 {
            return Err(Error::Config("at least two teams are required".into()));
        }
        if self.roster_size == 0 {
            return Err(Error::Config("roster_size must be positive".into()));
        }
        if self.position_structure.len() != self.roster_size {
            return Err(Error::Config(format!(
                "position structure has {} slots but roster_size is {}",
                self.position_structure.len(),
                self.roster_size
            )));
        }
        if self.weeks_per_season == 0 {
            return Err(Error::Config("weeks_per_season must be positive".into()));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::Config("omega must be positive".into()));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::Config("gamma must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn num_categories(&self) -> usize {
        self.categories.len()
    }

    /// Number of players drafted league-wide, N_T x N.
    pub fn drafted_total(&self) -> usize {
        self.num_teams * self.roster_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let c = LeagueConfig::default();
        c.validate().unwrap();
        assert_eq!(c.drafted_total(), 156);
        assert_eq!(c.position_structure.len(), 13);
    }

    #[test]
    fn json_round_trip_and_partial_documents() {
        let c = LeagueConfig::default();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(LeagueConfig::from_json_str(&s).unwrap(), c);

        let partial = LeagueConfig::from_json_str(r#"{"num_teams": 10, "format": "ec"}"#).unwrap();
        assert_eq!(partial.num_teams, 10);
        assert_eq!(partial.format, Format::EachCategory);
    }

    #[test]
    fn roster_size_must_match_structure() {
        let err = LeagueConfig::from_json_str(r#"{"roster_size": 12}"#).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn rejects_empty_categories() {
        assert!(LeagueConfig::from_json_str(r#"{"categories": []}"#).is_err());
    }
}
