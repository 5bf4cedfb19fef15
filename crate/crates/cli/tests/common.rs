#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use clutterbench::evalcore::{write_logs, EpisodeLog, Step};
use clutterbench::scenario::{persist, ScenarioRecord, Skill};
use clutterbench::scene::{ObjectSpec, SceneSpec, Shape, TableExtent};

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_clutterbench"));
    for (k, _) in std::env::vars() {
        if k.starts_with("CLUTTERBENCH_") {
            c.env_remove(k);
        }
    }
    c
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Target `t` at the origin, distractor `d` beside it.
pub fn record(id: &str, occlusion: f64, dvfc: f64) -> ScenarioRecord {
    let cube = Shape::Box {
        width: 0.04,
        depth: 0.04,
        height: 0.04,
    };
    let objects = vec![
        ObjectSpec::resting("t", cube, [0.8, 0.1, 0.1], 0.0, 0.0, 0.0),
        ObjectSpec::resting("d", cube, [0.1, 0.1, 0.8], 0.2, 0.0, 0.0).as_distractor(),
    ];
    ScenarioRecord {
        id: id.to_string(),
        base: "fixture".into(),
        skill: Skill::Pick,
        instruction: "pick t".into(),
        seed: 0,
        index: 0,
        n_distractors: 1,
        occlusion,
        dvfc,
        robot_fcm: dvfc,
        top_fcm: dvfc,
        bin: None,
        scene: SceneSpec::tabletop(TableExtent::centered(0.8, 0.6), objects, "t"),
    }
}

pub fn step(i: usize, ee: [f64; 3], grasped: Option<&str>, contacts: &[&str]) -> Step {
    Step {
        index: i,
        ee,
        grasped: grasped.map(str::to_string),
        contacts: contacts.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn episode(
    scenario: &str,
    policy: &str,
    max_steps: usize,
    success: bool,
    steps: Vec<Step>,
) -> EpisodeLog {
    EpisodeLog {
        scenario_id: scenario.into(),
        policy_id: policy.into(),
        max_steps,
        success,
        steps,
    }
}

/// Four episodes: successes {1,2}, collisions {2,3}, target grasped in {1,2,3}.
pub fn write_hand_count(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let near = [0.0, 0.0, 0.03];
    let recs: Vec<_> = (1..=4)
        .map(|i| record(&format!("s{i}"), 0.0, i as f64))
        .collect();
    let logs = vec![
        episode("s1", "p", 10, true, vec![step(0, near, Some("t"), &[])]),
        episode("s2", "p", 10, true, vec![step(0, near, Some("t"), &["d"])]),
        episode("s3", "p", 10, false, vec![step(0, near, Some("t"), &["d"])]),
        episode(
            "s4",
            "p",
            10,
            false,
            vec![step(0, [0.3, 0.0, 0.1], None, &[])],
        ),
    ];
    let sp = dir.join("scenarios.jsonl");
    let lp = dir.join("episodes.tsv");
    persist(&recs, &sp).unwrap();
    write_logs(&logs, std::fs::File::create(&lp).unwrap()).unwrap();
    (sp, lp)
}
