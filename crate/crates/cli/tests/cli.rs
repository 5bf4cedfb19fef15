mod common;

use std::fs;

use clutterbench::imgproc::io::write_ppm;
use clutterbench::imgproc::Image;
use clutterbench::scenario::{
    generate, load, persist, presets, CountRange, DistractorCatalog, GeneratorConfig,
};
use common::*;
use serde_json::Value;

#[test]
fn constant_image_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("flat.ppm");
    write_ppm(&Image::solid_srgb(32, 24, [0.4, 0.5, 0.6]).unwrap(), &p).unwrap();
    let o = run(&["score", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "image");
    assert_eq!(v["total"].as_f64().unwrap(), 0.0);
}

#[test]
fn more_distractors_score_higher() {
    let dir = tempfile::tempdir().unwrap();
    let base = &presets::sim_bases()[0];
    let cfg = GeneratorConfig {
        n_distractors_range: CountRange::exactly(8),
        seed: 3,
        ..Default::default()
    };
    let cat = DistractorCatalog::builtin();
    let busy = (0..)
        .find_map(|i| generate(base, &cat, &cfg, i).unwrap().accepted())
        .unwrap();
    let empty_p = dir.path().join("empty.json");
    let busy_p = dir.path().join("busy.json");
    base.scene.save(&empty_p).unwrap();
    busy.scene.save(&busy_p).unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "score",
        empty_p.to_str().unwrap(),
        busy_p.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("scores.jsonl")).unwrap();
    let d: Vec<f64> = text
        .lines()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["dvfc"]
                .as_f64()
                .unwrap()
        })
        .collect();
    assert_eq!(d.len(), 2);
    assert!(d[1] > d[0], "{d:?}");
    assert!(out.join("manifest.json").is_file());
}

#[test]
fn missing_input_exits_2_and_names_path() {
    let o = run(&["score", "/definitely/not/here.ppm"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/definitely/not/here.ppm"));
}

#[test]
fn malformed_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("junk.ppm");
    fs::write(&p, b"P6\n4 4\n255\nxx").unwrap();
    let o = run(&["score", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("junk.ppm"));
}

#[test]
fn invalid_settings_are_all_reported() {
    let o = run(&[
        "--max-occlusion",
        "1.5",
        "--sigma-w",
        "-2",
        "--n-bins",
        "0",
        "bases",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for f in ["max_occlusion", "sigma_w", "n_bins"] {
        assert!(e.contains(f), "{f} not in {e}");
    }
}

#[test]
fn config_file_env_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfgp = dir.path().join("c.toml");
    fs::write(&cfgp, "seed = 11\nper_bin = 3\nn_bins = 2\n").unwrap();
    let recs: Vec<_> = (0..10)
        .map(|i| record(&format!("r{i}"), 0.0, i as f64))
        .collect();
    let sp = dir.path().join("s.jsonl");
    persist(&recs, &sp).unwrap();
    let out = dir.path().join("o");
    let o = bin()
        .args([
            "--config",
            cfgp.to_str().unwrap(),
            "--per-bin",
            "4",
            "sample",
            sp.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .env("CLUTTERBENCH_SEED", "12")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let m: Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 12);
    assert_eq!(m["config"]["generator"]["per_bin"], 4);
    assert_eq!(m["config"]["generator"]["n_bins"], 2);
    assert_eq!(load(out.join("sampled.jsonl")).unwrap().len(), 8);

    fs::write(&cfgp, "seeed = 1\n").unwrap();
    let o = run(&["--config", cfgp.to_str().unwrap(), "bases"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_stepped_fixture_gives_80() {
    let dir = tempfile::tempdir().unwrap();
    let recs: Vec<_> = (0..80)
        .map(|i| record(&format!("r{i:02}"), 0.0, i as f64 * 0.1))
        .collect();
    let sp = dir.path().join("s.jsonl");
    persist(&recs, &sp).unwrap();
    let out = dir.path().join("o");
    let o = run(&[
        "--per-bin",
        "10",
        "--n-bins",
        "8",
        "sample",
        sp.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = load(out.join("sampled.jsonl")).unwrap();
    assert_eq!(got.len(), 80);
    for b in 0..8 {
        assert_eq!(got.iter().filter(|r| r.bin == Some(b)).count(), 10);
    }
}

#[test]
fn report_reproduces_hand_count_row() {
    let dir = tempfile::tempdir().unwrap();
    let (sp, lp) = write_hand_count(dir.path());
    let out = dir.path().join("rep");
    let o = run(&[
        "report",
        "--scenarios",
        sp.to_str().unwrap(),
        lp.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("table.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(
        (col("sr"), col("h_sr"), col("cr"), col("gfr")),
        ("0.500", "0.250", "0.500", "0.250")
    );
    for f in [
        "curves/p_dvfc.csv",
        "curves/p_set_size.csv",
        "curves/p_occlusion.csv",
        "reach_failures.json",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn eval_writes_outcomes_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let (sp, lp) = write_hand_count(dir.path());
    let out = dir.path().join("ev");
    let o = run(&[
        "eval",
        "--scenarios",
        sp.to_str().unwrap(),
        lp.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: Value =
        serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(m["p"]["sr"], 0.5);
    assert_eq!(
        fs::read_to_string(out.join("outcomes.jsonl"))
            .unwrap()
            .lines()
            .count(),
        4
    );
}

#[test]
fn render_manifest_digests_match_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let sp = dir.path().join("scene.json");
    presets::sim_bases()[3].scene.save(&sp).unwrap();
    let out = dir.path().join("r");
    let o = run(&[
        "render",
        sp.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--clutter-maps",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 4);
    for f in outputs {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        use sha2::Digest;
        assert_eq!(
            f["sha256"].as_str().unwrap(),
            hex::encode(sha2::Sha256::digest(&bytes))
        );
    }
    assert_eq!(m["inputs"][0]["path"], sp.to_str().unwrap());
}

#[test]
fn unknown_base_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "generate",
        "--base",
        "no_such_base",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_from_exported_base_file() {
    let dir = tempfile::tempdir().unwrap();
    let ex = dir.path().join("bases");
    assert!(run(&["bases", "--export", ex.to_str().unwrap()])
        .status
        .success());
    let bp = ex.join("stack_cube.json");
    let out = dir.path().join("g");
    let o = run(&[
        "--seed",
        "5",
        "--n-distractors-range",
        "2-3",
        "generate",
        "--base",
        bp.to_str().unwrap(),
        "--count",
        "2",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let recs = load(out.join("scenarios.jsonl")).unwrap();
    assert_eq!(recs.len(), 2);
    assert!(recs
        .iter()
        .all(|r| (2..=3).contains(&r.n_distractors) && r.base == "stack_cube"));
}
