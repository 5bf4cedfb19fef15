//! Episode evaluation: outcome staging, aggregate metrics, clutter
//! degradation curves, reach-failure distances and policy agreement.

mod agreement;
mod curves;
mod log;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioRecord;
use crate::scene::{ObjectRole, Vec3};

pub use agreement::{agreement, pairwise_agreement, Agreement, PairOverlap, Region};
pub use curves::{per_bin_curves, Curve, CurvePoint, Curves, OCCLUSION_GROUPS};
pub use log::{parse_logs, read_logs, write_logs, EpisodeLog, Step, EPISODE_HEADER};
pub use report::{
    quantile, reach_failure_distribution, table_csv, ReachFailures, TableRow, DISPERSION_RADIUS,
    TABLE_COLUMNS,
};

/// Default distance, meters, at which the gripper counts as having reached
/// the target.
pub const DEFAULT_D_REACH: f64 = 0.05;

/// Contact ids that are not scene objects and never count as collisions.
pub const SUPPORT_IDS: [&str; 1] = ["table"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    Success,
    FailReach,
    FailGrasp,
    FailAfterGrasp,
}

impl Stage {
    pub const ALL: [Stage; 4] = [
        Stage::Success,
        Stage::FailReach,
        Stage::FailGrasp,
        Stage::FailAfterGrasp,
    ];
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Success => "SUCCESS",
            Stage::FailReach => "FAIL_REACH",
            Stage::FailGrasp => "FAIL_GRASP",
            Stage::FailAfterGrasp => "FAIL_AFTER_GRASP",
        })
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.to_string() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub scenario_id: String,
    pub policy_id: String,
    pub success: bool,
    pub collided: bool,
    pub grasped_target: bool,
    pub steps_used: usize,
    pub max_steps: usize,
    /// Closest end-effector approach to the target, meters; `None` for an
    /// episode without steps.
    pub min_target_distance: Option<f64>,
    pub stage: Stage,
    /// Copied from the scenario so aggregates need no second lookup.
    pub occlusion: f64,
    pub n_distractors: usize,
    pub dvfc: f64,
}

/// Stage an episode against its scenario.
///
/// A collision is contact with a distractor. The target's grasp point is
/// its pose center.
pub fn classify_outcome(
    log: &EpisodeLog,
    scenario: &ScenarioRecord,
    d_reach: f64,
) -> Result<EpisodeOutcome> {
    if log.scenario_id != scenario.id {
        return Err(Error::invalid(format!(
            "episode for scenario {:?} checked against {:?}",
            log.scenario_id, scenario.id
        )));
    }
    if d_reach.is_nan() || d_reach < 0.0 {
        return Err(Error::invalid(format!(
            "d_reach must be >= 0, got {d_reach}"
        )));
    }
    let scene = &scenario.scene;
    let target = scene.target()?;
    let role_of = |id: &str| -> Result<Option<ObjectRole>> {
        if SUPPORT_IDS.contains(&id) {
            return Ok(None);
        }
        scene.object(id).map(|o| Some(o.role)).ok_or_else(|| {
            Error::invalid(format!(
                "episode {}/{} names object {id:?} absent from the scene",
                log.policy_id, log.scenario_id
            ))
        })
    };

    let mut collided = false;
    let mut grasped_target = false;
    let mut min_d: Option<f64> = None;
    let goal = target.center();
    for s in &log.steps {
        for c in &s.contacts {
            if role_of(c)? == Some(ObjectRole::Distractor) {
                collided = true;
            }
        }
        if let Some(g) = &s.grasped {
            role_of(g)?;
            grasped_target |= *g == target.id;
        }
        let d = (Vec3::from_array(s.ee) - goal).norm();
        min_d = Some(min_d.map_or(d, |m: f64| m.min(d)));
    }

    let reached = min_d.is_some_and(|d| d <= d_reach);
    let stage = if log.success {
        Stage::Success
    } else if !reached {
        Stage::FailReach
    } else if !grasped_target {
        Stage::FailGrasp
    } else {
        Stage::FailAfterGrasp
    };

    Ok(EpisodeOutcome {
        scenario_id: log.scenario_id.clone(),
        policy_id: log.policy_id.clone(),
        success: log.success,
        collided,
        grasped_target,
        steps_used: log.steps.len(),
        max_steps: log.max_steps,
        min_target_distance: min_d,
        stage,
        occlusion: scenario.occlusion,
        n_distractors: scenario.n_distractors,
        dvfc: scenario.dvfc,
    })
}

/// Classify every log against the scenario it names.
pub fn classify_all(
    logs: &[EpisodeLog],
    scenarios: &[ScenarioRecord],
    d_reach: f64,
) -> Result<Vec<EpisodeOutcome>> {
    let by_id: std::collections::HashMap<&str, &ScenarioRecord> =
        scenarios.iter().map(|s| (s.id.as_str(), s)).collect();
    logs.iter()
        .map(|log| {
            let sc = by_id.get(log.scenario_id.as_str()).ok_or_else(|| {
                Error::invalid(format!("no scenario with id {:?}", log.scenario_id))
            })?;
            classify_outcome(log, sc, d_reach)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageHistogram {
    pub success: usize,
    pub fail_reach: usize,
    pub fail_grasp: usize,
    pub fail_after_grasp: usize,
}

impl StageHistogram {
    pub fn add(&mut self, s: Stage) {
        match s {
            Stage::Success => self.success += 1,
            Stage::FailReach => self.fail_reach += 1,
            Stage::FailGrasp => self.fail_grasp += 1,
            Stage::FailAfterGrasp => self.fail_after_grasp += 1,
        }
    }

    pub fn get(&self, s: Stage) -> usize {
        match s {
            Stage::Success => self.success,
            Stage::FailReach => self.fail_reach,
            Stage::FailGrasp => self.fail_grasp,
            Stage::FailAfterGrasp => self.fail_after_grasp,
        }
    }

    pub fn total(&self) -> usize {
        self.success + self.fail_reach + self.fail_grasp + self.fail_after_grasp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_episodes: usize,
    pub n_successes: usize,
    pub sr: f64,
    pub h_sr: f64,
    pub cr: f64,
    pub gfr: f64,
    /// Mean of steps_used / max_steps over successful episodes only;
    /// `None` when nothing succeeded.
    pub er: Option<f64>,
    /// Share of all episodes that succeeded with the target unoccluded.
    pub sr_noocc: f64,
    /// Share of all episodes that succeeded with the target partly occluded.
    pub sr_occ: f64,
    pub stage_histogram: StageHistogram,
}

fn share(n: usize, of: usize) -> f64 {
    n as f64 / of as f64
}

/// Aggregate outcomes. Every rate is a share of all episodes except `er`.
pub fn compute_metrics(outcomes: &[EpisodeOutcome]) -> Result<MetricsReport> {
    if outcomes.is_empty() {
        return Err(Error::invalid("no episode outcomes to aggregate"));
    }
    let n = outcomes.len();
    let (mut succ, mut hard, mut coll, mut nograsp, mut noocc, mut occ) = (0, 0, 0, 0, 0, 0);
    let mut er_sum = 0.0;
    let mut hist = StageHistogram::default();
    for o in outcomes {
        hist.add(o.stage);
        coll += o.collided as usize;
        nograsp += !o.grasped_target as usize;
        if o.success {
            succ += 1;
            hard += !o.collided as usize;
            if o.occlusion > 0.0 {
                occ += 1;
            } else {
                noocc += 1;
            }
            if o.max_steps == 0 {
                return Err(Error::invalid(format!(
                    "episode {}/{} succeeded with max_steps 0",
                    o.policy_id, o.scenario_id
                )));
            }
            er_sum += o.steps_used as f64 / o.max_steps as f64;
        }
    }
    Ok(MetricsReport {
        n_episodes: n,
        n_successes: succ,
        sr: share(succ, n),
        h_sr: share(hard, n),
        cr: share(coll, n),
        gfr: share(nograsp, n),
        er: (succ > 0).then(|| er_sum / succ as f64),
        sr_noocc: share(noocc, n),
        sr_occ: share(occ, n),
        stage_histogram: hist,
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn hand_count_fixture() {
        let (logs, scenarios) = hand_count();
        let out = classify_all(&logs, &scenarios, DEFAULT_D_REACH).unwrap();
        let m = compute_metrics(&out).unwrap();
        assert_eq!((m.sr, m.h_sr, m.cr, m.gfr), (0.5, 0.25, 0.5, 0.25));
        assert_eq!(m.stage_histogram.total(), 4);
        assert_eq!(m.stage_histogram.success, 2);
        assert_eq!(m.stage_histogram.fail_after_grasp, 1);
        assert_eq!(m.stage_histogram.fail_reach, 1);
        assert_eq!(m.er, Some(0.1));
    }

    #[test]
    fn staging_examples() {
        let sc = scenario("s", 0.0, 1.0);
        let ok = classify_outcome(
            &log("s", true, vec![step(0, [0.5, 0.5, 0.5], None, &[])]),
            &sc,
            0.05,
        )
        .unwrap();
        assert_eq!(ok.stage, Stage::Success);
        assert!(!ok.collided);

        let far = classify_outcome(
            &log("s", false, vec![step(0, [0.0, 0.3, 0.02], None, &[])]),
            &sc,
            0.05,
        )
        .unwrap();
        assert_eq!(far.stage, Stage::FailReach);
        assert!((far.min_target_distance.unwrap() - 0.3).abs() < 1e-12);

        let dropped = classify_outcome(
            &log("s", false, vec![step(0, [0.0, 0.0, 0.05], Some("t"), &[])]),
            &sc,
            0.05,
        )
        .unwrap();
        assert_eq!(dropped.stage, Stage::FailAfterGrasp);

        let missed = classify_outcome(
            &log("s", false, vec![step(0, [0.0, 0.0, 0.05], None, &[])]),
            &sc,
            0.05,
        )
        .unwrap();
        assert_eq!(missed.stage, Stage::FailGrasp);

        let empty = classify_outcome(&log("s", false, vec![]), &sc, 0.05).unwrap();
        assert_eq!(empty.stage, Stage::FailReach);
        assert_eq!(empty.min_target_distance, None);
    }

    #[test]
    fn mismatched_or_unknown_ids_are_rejected() {
        let sc = scenario("s", 0.0, 1.0);
        assert!(classify_outcome(&log("other", true, vec![]), &sc, 0.05).is_err());
        let ghost = log("s", false, vec![step(0, [0.0; 3], None, &["ghost"])]);
        assert!(classify_outcome(&ghost, &sc, 0.05).is_err());
    }

    #[test]
    fn empty_metrics_input_is_an_error() {
        assert!(compute_metrics(&[]).is_err());
    }

    #[test]
    fn occlusion_split_recomposes_sr() {
        let scen = vec![
            scenario("a", 0.0, 1.0),
            scenario("b", 0.3, 1.0),
            scenario("c", 0.1, 1.0),
        ];
        let logs = vec![
            log("a", true, vec![]),
            log("b", true, vec![]),
            log("c", false, vec![]),
        ];
        let m = compute_metrics(&classify_all(&logs, &scen, 0.05).unwrap()).unwrap();
        assert_eq!(m.sr_noocc + m.sr_occ, m.sr);
        assert!((m.sr_occ - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stage_names() {
        for s in Stage::ALL {
            assert_eq!(s.to_string().parse::<Stage>().unwrap(), s);
        }
    }
}
