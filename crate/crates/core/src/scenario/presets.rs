//! Built-in base scenes and the fixed real-world protocol.

use super::{
    generate, BaseScenario, CountRange, DistractorCatalog, Generation, GeneratorConfig,
    ScenarioRecord, Skill,
};
use crate::error::{Error, Result};
use crate::scene::{ObjectSpec, SceneSpec, Shape, TableExtent};

/// Distractor counts of the real-world protocol.
pub const REAL_WORLD_COUNTS: [usize; 6] = [0, 1, 2, 4, 8, 16];
/// Arrangements per (skill, count) cell.
pub const REAL_WORLD_ARRANGEMENTS: usize = 9;
/// Candidate indices tried per arrangement before giving up.
pub const ARRANGEMENT_RETRIES: u64 = 4096;

const BLOCK_TOKENS: [&str; 5] = ["block", "cube", "dice", "duplo", "brick"];

fn cyl(radius: f64, height: f64) -> Shape {
    Shape::Cylinder { radius, height }
}

fn cuboid(width: f64, depth: f64, height: f64) -> Shape {
    Shape::Box {
        width,
        depth,
        height,
    }
}

fn obj(id: &str, shape: Shape, color: [f64; 3], x: f64, y: f64) -> ObjectSpec {
    ObjectSpec::resting(id, shape, color, x, y, 0.0)
}

fn base(
    name: &str,
    skill: Skill,
    instruction: &str,
    table: TableExtent,
    objects: Vec<ObjectSpec>,
    excluded: &[&str],
) -> BaseScenario {
    let target = objects[0].id.clone();
    BaseScenario {
        name: name.to_string(),
        skill,
        instruction: instruction.to_string(),
        scene: SceneSpec::tabletop(table, objects, target),
        excluded_classes: excluded.iter().map(|s| s.to_string()).collect(),
    }
}

/// The simulated task scenes, on a 0.8 m x 0.6 m table.
pub fn sim_bases() -> Vec<BaseScenario> {
    let t = TableExtent::centered(0.8, 0.6);
    let blocks: Vec<&str> = BLOCK_TOKENS.to_vec();
    vec![
        base(
            "pick_coke_can",
            Skill::Pick,
            "pick coke can",
            t,
            vec![obj(
                "coke_can",
                cyl(0.033, 0.122),
                [0.75, 0.05, 0.08],
                0.0,
                -0.05,
            )],
            &["coke"],
        ),
        base(
            "move_near",
            Skill::Move,
            "move redbull can near orange",
            t,
            vec![
                obj(
                    "redbull_can",
                    cyl(0.027, 0.135),
                    [0.2, 0.3, 0.7],
                    -0.12,
                    0.0,
                ),
                obj(
                    "orange",
                    Shape::Sphere { radius: 0.036 },
                    [0.95, 0.55, 0.1],
                    0.15,
                    0.05,
                ),
            ],
            &["redbull", "orange"],
        ),
        base(
            "stack_cube",
            Skill::Stack,
            "stack the green block on the yellow block",
            t,
            vec![
                obj(
                    "green_cube",
                    cuboid(0.04, 0.04, 0.04),
                    [0.1, 0.6, 0.2],
                    -0.08,
                    -0.02,
                ),
                obj(
                    "yellow_cube",
                    cuboid(0.04, 0.04, 0.04),
                    [0.9, 0.8, 0.1],
                    0.1,
                    0.04,
                ),
            ],
            &blocks,
        ),
        base(
            "put_spoon",
            Skill::Put,
            "put the spoon on the towel",
            t,
            vec![
                obj(
                    "spoon",
                    cuboid(0.16, 0.03, 0.015),
                    [0.75, 0.75, 0.78],
                    -0.1,
                    -0.05,
                ),
                obj(
                    "towel",
                    cuboid(0.15, 0.15, 0.008),
                    [0.3, 0.6, 0.8],
                    0.15,
                    0.08,
                ),
            ],
            &["spoon", "towel"],
        ),
        base(
            "put_carrot",
            Skill::Put,
            "put carrot on plate",
            t,
            vec![
                obj(
                    "carrot",
                    cuboid(0.12, 0.03, 0.03),
                    [0.95, 0.45, 0.05],
                    -0.1,
                    -0.05,
                ),
                obj("plate", cyl(0.09, 0.015), [0.9, 0.9, 0.9], 0.15, 0.06),
            ],
            &["carrot", "plate"],
        ),
        base(
            "put_eggplant",
            Skill::Put,
            "put eggplant into yellow basket",
            t,
            vec![
                obj(
                    "eggplant",
                    cuboid(0.13, 0.05, 0.05),
                    [0.35, 0.1, 0.4],
                    -0.12,
                    -0.04,
                ),
                obj(
                    "basket",
                    cuboid(0.2, 0.14, 0.08),
                    [0.7, 0.55, 0.3],
                    0.16,
                    0.06,
                ),
            ],
            &["eggplant", "basket"],
        ),
    ]
}

/// One base per skill on a 1.2 m x 0.8 m table.
pub fn real_world_bases() -> Vec<BaseScenario> {
    let t = TableExtent::centered(1.2, 0.8);
    let blocks: Vec<&str> = BLOCK_TOKENS.to_vec();
    vec![
        base(
            "rw_pick_bottle",
            Skill::Pick,
            "pick up the green bottle",
            t,
            vec![obj(
                "green_bottle",
                cyl(0.035, 0.2),
                [0.15, 0.55, 0.25],
                0.0,
                -0.1,
            )],
            &["bottle"],
        ),
        base(
            "rw_move_mug",
            Skill::Move,
            "move the red mug next to the blue bowl",
            t,
            vec![
                obj("red_mug", cyl(0.04, 0.09), [0.8, 0.1, 0.1], -0.15, -0.05),
                obj("blue_bowl", cyl(0.08, 0.055), [0.15, 0.25, 0.8], 0.2, 0.1),
            ],
            &["mug", "bowl"],
        ),
        base(
            "rw_stack_blocks",
            Skill::Stack,
            "stack the red block on the blue block",
            t,
            vec![
                obj(
                    "red_block",
                    cuboid(0.05, 0.05, 0.05),
                    [0.85, 0.15, 0.1],
                    -0.12,
                    -0.05,
                ),
                obj(
                    "blue_block",
                    cuboid(0.06, 0.06, 0.06),
                    [0.1, 0.2, 0.85],
                    0.15,
                    0.05,
                ),
            ],
            &blocks,
        ),
        base(
            "rw_put_lemon",
            Skill::Put,
            "put the lemon on the plate",
            t,
            vec![
                obj(
                    "lemon",
                    Shape::Sphere { radius: 0.027 },
                    [0.95, 0.85, 0.15],
                    -0.15,
                    -0.08,
                ),
                obj(
                    "white_plate",
                    cyl(0.11, 0.02),
                    [0.92, 0.92, 0.9],
                    0.18,
                    0.08,
                ),
            ],
            &["lemon", "plate"],
        ),
    ]
}

/// Stream index for one arrangement attempt: disjoint per cell.
fn arrangement_index(skill: usize, count: usize, arrangement: usize, retry: u64) -> u64 {
    let cell =
        ((skill * REAL_WORLD_COUNTS.len() + count) * REAL_WORLD_ARRANGEMENTS + arrangement) as u64;
    (cell << 20) | retry
}

/// The 216-scenario real-world protocol: every skill crossed with every
/// distractor count, nine arrangements each.
///
/// An arrangement that violates a constraint is redrawn from the next
/// index of the same cell, so every cell is filled.
pub fn preset_real_world(
    cfg: &GeneratorConfig,
    catalog: &DistractorCatalog,
) -> Result<Vec<ScenarioRecord>> {
    let bases = real_world_bases();
    let mut out =
        Vec::with_capacity(bases.len() * REAL_WORLD_COUNTS.len() * REAL_WORLD_ARRANGEMENTS);
    for (si, b) in bases.iter().enumerate() {
        for (ci, &count) in REAL_WORLD_COUNTS.iter().enumerate() {
            let cell_cfg = GeneratorConfig {
                n_distractors_range: CountRange::exactly(count),
                ..cfg.clone()
            };
            for a in 0..REAL_WORLD_ARRANGEMENTS {
                let rec = (0..ARRANGEMENT_RETRIES)
                    .find_map(|retry| {
                        let idx = arrangement_index(si, ci, a, retry);
                        match generate(b, catalog, &cell_cfg, idx) {
                            Ok(Generation::Accepted(r)) => Some(Ok(*r)),
                            Ok(Generation::Rejected(_)) => None,
                            Err(e) => Some(Err(e)),
                        }
                    })
                    .unwrap_or_else(|| {
                        Err(Error::DegenerateScene(format!(
                            "{}: no valid arrangement with {count} distractors",
                            b.name
                        )))
                    })?;
                out.push(rec);
            }
        }
    }
    Ok(out)
}
