//! Cluttered scenario generation: distractor placement under spacing,
//! occlusion and grasp-affordance constraints, DvFC scoring, clutter-level
//! binning with uniform per-bin sampling, and the scenario file format.

mod catalog;
mod generate;
pub mod presets;
mod sampling;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clutter::ClutterConfig;
use crate::error::{Error, Result};
use crate::scene::{SceneSpec, DEFAULT_CLEARANCE};

pub use catalog::{CatalogEntry, DistractorCatalog, CATALOG_SIZE};
pub use generate::{generate, generate_accepted, Batch, Generation, Rejection, RejectionStats};
pub use sampling::{assign_bins, bin_and_sample, BinningMode, SampleOutcome, Shortfall};
pub use store::{load, parse_records, persist, write_records, SCENARIO_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Skill {
    Pick,
    Move,
    Stack,
    Put,
}

impl Skill {
    pub const ALL: [Skill; 4] = [Skill::Pick, Skill::Move, Skill::Stack, Skill::Put];
}

impl fmt::Display for Skill {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Skill::Pick => "PICK",
            Skill::Move => "MOVE",
            Skill::Stack => "STACK",
            Skill::Put => "PUT",
        })
    }
}

impl FromStr for Skill {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PICK" => Ok(Skill::Pick),
            "MOVE" => Ok(Skill::Move),
            "STACK" => Ok(Skill::Stack),
            "PUT" => Ok(Skill::Put),
            other => Err(format!("unknown skill {other:?} (pick|move|stack|put)")),
        }
    }
}

/// A task scene before distractors are added.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseScenario {
    pub name: String,
    pub skill: Skill,
    pub instruction: String,
    pub scene: SceneSpec,
    /// Catalog entries whose name contains any of these tokens would make
    /// the instruction ambiguous and are never used as distractors.
    #[serde(default)]
    pub excluded_classes: Vec<String>,
}

impl BaseScenario {
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base: BaseScenario = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: Some(path.to_path_buf()),
            line: e.line(),
            message: e.to_string(),
        })?;
        base.scene.validate()?;
        Ok(base)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("base scenario serializes")
    }
}

/// Inclusive distractor-count range, written `min-max` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

impl CountRange {
    pub fn exactly(n: usize) -> Self {
        CountRange { min: n, max: n }
    }
}

impl fmt::Display for CountRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.min, self.max)
    }
}

impl FromStr for CountRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad count {t:?} in range {s:?}"))
        };
        match s.split_once('-') {
            Some((a, b)) => Ok(CountRange {
                min: parse(a)?,
                max: parse(b)?,
            }),
            None => Ok(CountRange::exactly(parse(s)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n_distractors_range: CountRange,
    /// Minimum footprint gap between any two objects, meters.
    pub delta_gap: f64,
    pub max_occlusion: f64,
    /// Grasp clearance around the target, meters.
    pub clearance: f64,
    pub max_placement_attempts: usize,
    pub seed: u64,
    pub n_bins: usize,
    pub per_bin: usize,
    pub clutter: ClutterConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_distractors_range: CountRange { min: 1, max: 12 },
            delta_gap: 0.01,
            max_occlusion: 0.5,
            clearance: DEFAULT_CLEARANCE,
            max_placement_attempts: 100,
            seed: 0,
            n_bins: 8,
            per_bin: 10,
            clutter: ClutterConfig::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_distractors_range.min > self.n_distractors_range.max {
            out.push(format!(
                "n_distractors_range: empty range {}",
                self.n_distractors_range
            ));
        }
        if !self.delta_gap.is_finite() || self.delta_gap < 0.0 {
            out.push(format!("delta_gap: must be >= 0, got {}", self.delta_gap));
        }
        if !(0.0..1.0).contains(&self.max_occlusion) {
            out.push(format!(
                "max_occlusion: must lie in [0, 1), got {}",
                self.max_occlusion
            ));
        }
        if !self.clearance.is_finite() || self.clearance < 0.0 {
            out.push(format!("clearance: must be >= 0, got {}", self.clearance));
        }
        if self.max_placement_attempts == 0 {
            out.push("max_placement_attempts: must be >= 1".to_string());
        }
        if self.n_bins == 0 {
            out.push("n_bins: must be >= 1".to_string());
        }
        out.extend(
            self.clutter
                .problems()
                .into_iter()
                .map(|p| format!("clutter.{p}")),
        );
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(problems.join("; ")))
        }
    }
}

/// A generated, scored scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub id: String,
    pub base: String,
    pub skill: Skill,
    pub instruction: String,
    pub seed: u64,
    pub index: u64,
    pub n_distractors: usize,
    pub occlusion: f64,
    pub dvfc: f64,
    pub robot_fcm: f64,
    pub top_fcm: f64,
    pub bin: Option<usize>,
    pub scene: SceneSpec,
}

impl ScenarioRecord {
    pub fn validate(&self) -> Result<()> {
        if !self.dvfc.is_finite() || self.dvfc < 0.0 {
            return Err(Error::invalid(format!("{}: dvfc must be >= 0", self.id)));
        }
        if !(0.0..=1.0).contains(&self.occlusion) {
            return Err(Error::invalid(format!(
                "{}: occlusion outside [0, 1]",
                self.id
            )));
        }
        if self.n_distractors != self.scene.distractor_count() {
            return Err(Error::invalid(format!(
                "{}: n_distractors {} but scene holds {}",
                self.id,
                self.n_distractors,
                self.scene.distractor_count()
            )));
        }
        self.scene.validate()
    }
}
