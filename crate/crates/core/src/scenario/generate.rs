use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BaseScenario, DistractorCatalog, GeneratorConfig, ScenarioRecord};
use crate::clutter::dvfc;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::scene::{
    footprint_gap, has_grasp_affordance, occlusion_ratio, render, ObjectSpec, SceneSpec,
};

/// Why a candidate scene was discarded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    /// A distractor found no spot honoring the minimum gap.
    Placement {
        placed: usize,
        wanted: usize,
    },
    Occluded {
        ratio: f64,
    },
    NoGraspAffordance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generation {
    Accepted(Box<ScenarioRecord>),
    Rejected(Rejection),
}

impl Generation {
    pub fn accepted(self) -> Option<ScenarioRecord> {
        match self {
            Generation::Accepted(r) => Some(*r),
            Generation::Rejected(_) => None,
        }
    }
}

/// Rejection counts for a batch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionStats {
    pub placement: usize,
    pub occluded: usize,
    pub no_grasp_affordance: usize,
}

impl RejectionStats {
    pub fn record(&mut self, r: &Rejection) {
        match r {
            Rejection::Placement { .. } => self.placement += 1,
            Rejection::Occluded { .. } => self.occluded += 1,
            Rejection::NoGraspAffordance => self.no_grasp_affordance += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.placement + self.occluded + self.no_grasp_affordance
    }
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub records: Vec<ScenarioRecord>,
    pub rejections: RejectionStats,
    /// Stream indices consumed, accepted or not.
    pub attempts: u64,
}

fn scenario_id(base: &BaseScenario, seed: u64, index: u64) -> String {
    format!("{}-{seed:016x}-{index:08x}", base.name)
}

fn place_distractors(
    scene: &mut SceneSpec,
    picks: &[&super::CatalogEntry],
    cfg: &GeneratorConfig,
    rng: &mut StreamRng,
) -> Option<usize> {
    let t = scene.table_extent;
    for (k, entry) in picks.iter().enumerate() {
        let r = entry.shape.bounding_radius();
        let (x_lo, x_hi) = (t.x_min + r, t.x_max - r);
        let (y_lo, y_hi) = (t.y_min + r, t.y_max - r);
        if x_lo > x_hi || y_lo > y_hi {
            return Some(k);
        }
        let mut placed = false;
        for _ in 0..cfg.max_placement_attempts {
            let x = rng.uniform(x_lo, x_hi);
            let y = rng.uniform(y_lo, y_hi);
            let yaw = rng.uniform(0.0, TAU);
            let cand = ObjectSpec::resting(
                format!("d{k:02}_{}", entry.name),
                entry.shape,
                entry.color,
                x,
                y,
                yaw,
            )
            .as_distractor();
            if scene
                .objects
                .iter()
                .all(|o| footprint_gap(o, &cand) >= cfg.delta_gap)
            {
                scene.objects.push(cand);
                placed = true;
                break;
            }
        }
        if !placed {
            return Some(k);
        }
    }
    None
}

/// Build and score the candidate for stream `index`.
///
/// The outcome depends only on the base, the catalog, the configuration
/// and `index`, so candidates may be evaluated in any order.
pub fn generate(
    base: &BaseScenario,
    catalog: &DistractorCatalog,
    cfg: &GeneratorConfig,
    index: u64,
) -> Result<Generation> {
    cfg.validate()?;
    base.scene.validate()?;
    let pool = catalog.eligible(&base.excluded_classes);
    if pool.len() < cfg.n_distractors_range.max {
        return Err(Error::invalid(format!(
            "{}: only {} eligible distractors for up to {}",
            base.name,
            pool.len(),
            cfg.n_distractors_range.max
        )));
    }

    let mut rng = StreamRng::new(cfg.seed, index);
    let n = rng.range_inclusive(cfg.n_distractors_range.min, cfg.n_distractors_range.max);
    let picks: Vec<_> = rng
        .choose_indices(pool.len(), n)
        .into_iter()
        .map(|i| pool[i])
        .collect();

    let mut scene = base.scene.clone();
    if let Some(placed) = place_distractors(&mut scene, &picks, cfg, &mut rng) {
        return Ok(Generation::Rejected(Rejection::Placement {
            placed,
            wanted: n,
        }));
    }

    let target = scene.target_id.clone();
    let occlusion = occlusion_ratio(&scene, &scene.robot_cam, &target)?;
    if occlusion > cfg.max_occlusion {
        return Ok(Generation::Rejected(Rejection::Occluded {
            ratio: occlusion,
        }));
    }
    if !has_grasp_affordance(&scene, &target, cfg.clearance)? {
        return Ok(Generation::Rejected(Rejection::NoGraspAffordance));
    }

    let robot = render(&scene, &scene.robot_cam).color;
    let top = render(&scene, &scene.top_cam).color;
    let score = dvfc(&robot, &top, &cfg.clutter)?;

    Ok(Generation::Accepted(Box::new(ScenarioRecord {
        id: scenario_id(base, cfg.seed, index),
        base: base.name.clone(),
        skill: base.skill,
        instruction: base.instruction.clone(),
        seed: cfg.seed,
        index,
        n_distractors: n,
        occlusion,
        dvfc: score.value,
        robot_fcm: score.robot_view.total,
        top_fcm: score.top_view.total,
        bin: None,
        scene,
    })))
}

/// Collect `count` accepted scenarios from consecutive stream indices
/// starting at `first_index`, giving up after `max_attempts` indices.
///
/// Candidates are evaluated in parallel chunks; acceptance is decided in
/// index order, so the result matches a sequential run.
pub fn generate_accepted(
    base: &BaseScenario,
    catalog: &DistractorCatalog,
    cfg: &GeneratorConfig,
    first_index: u64,
    count: usize,
    max_attempts: u64,
) -> Result<Batch> {
    let chunk = (rayon::current_num_threads() as u64 * 4).max(1);
    let mut batch = Batch {
        records: Vec::with_capacity(count),
        rejections: RejectionStats::default(),
        attempts: 0,
    };
    let mut next = first_index;
    while batch.records.len() < count && batch.attempts < max_attempts {
        let n = chunk.min(max_attempts - batch.attempts);
        let results: Vec<Result<Generation>> = (next..next + n)
            .into_par_iter()
            .map(|i| generate(base, catalog, cfg, i))
            .collect();
        for r in results {
            if batch.records.len() == count {
                break;
            }
            batch.attempts += 1;
            match r? {
                Generation::Accepted(rec) => batch.records.push(*rec),
                Generation::Rejected(why) => batch.rejections.record(&why),
            }
        }
        next += n;
    }
    if batch.records.len() < count {
        return Err(Error::DegenerateScene(format!(
            "{}: {} of {count} scenarios accepted after {max_attempts} attempts \
             ({} placement, {} occluded, {} without grasp affordance)",
            base.name,
            batch.records.len(),
            batch.rejections.placement,
            batch.rejections.occluded,
            batch.rejections.no_grasp_affordance
        )));
    }
    Ok(batch)
}
