use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use clutterbench::clutter::{dvfc, feature_congestion, ClutterScore};
use clutterbench::evalcore::{
    agreement, classify_all, compute_metrics, pairwise_agreement, per_bin_curves,
    reach_failure_distribution, read_logs, table_csv, EpisodeLog, EpisodeOutcome, TableRow,
};
use clutterbench::imgproc::io::{encode_ppm, read_image};
use clutterbench::imgproc::{ColorSpace, Image};
use clutterbench::scenario::{
    self, bin_and_sample, generate_accepted, presets, write_records, BaseScenario,
    DistractorCatalog, ScenarioRecord,
};
use clutterbench::scene::{render as render_view, SceneSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::manifest::Run;
use crate::settings::Resolved;
use crate::{require_file, CliError, Preset};

fn records_bytes(records: &[ScenarioRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_records(records, &mut buf).expect("writing to memory");
    buf
}

fn jsonl<T: serde::Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for it in items {
        serde_json::to_writer(&mut out, it).expect("serializable");
        out.push(b'\n');
    }
    out
}

fn pretty(v: &impl serde::Serialize) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

fn totals(s: &ClutterScore) -> Value {
    json!({
        "total": s.total,
        "color": s.per_feature.color,
        "contrast": s.per_feature.contrast,
        "orient": s.per_feature.orient,
    })
}

fn is_scene(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn score(cfg: &Resolved, inputs: &[PathBuf], out_dir: Option<&Path>) -> Result<(), CliError> {
    for p in inputs {
        require_file(p)?;
    }
    let ccfg = &cfg.generator.clutter;
    let records: Vec<Value> = inputs
        .par_iter()
        .map(|p| -> Result<Value, CliError> {
            let name = p.display().to_string();
            if is_scene(p) {
                let scene = SceneSpec::load(p)?;
                let robot = render_view(&scene, &scene.robot_cam).color;
                let top = render_view(&scene, &scene.top_cam).color;
                let d = dvfc(&robot, &top, ccfg)?;
                Ok(json!({
                    "input": name,
                    "kind": "scene",
                    "dvfc": d.value,
                    "robot_view": totals(&d.robot_view),
                    "top_view": totals(&d.top_view),
                }))
            } else {
                let img = read_image(p)?;
                let s = feature_congestion(&img, ccfg)?;
                let mut v = totals(&s);
                v["input"] = json!(name);
                v["kind"] = json!("image");
                Ok(v)
            }
        })
        .collect::<Result<_, _>>()?;
    let bytes = jsonl(&records);
    match out_dir {
        Some(dir) => {
            let mut run = Run::start("score", cfg, dir)?;
            for p in inputs {
                run.input(p)?;
            }
            run.output("scores.jsonl", &bytes)?;
            run.finish(json!({ "n_inputs": inputs.len() }))?;
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}

/// Grayscale sRGB rendering of a clutter map scaled by its maximum.
fn clutter_map_image(s: &ClutterScore) -> Result<Image, CliError> {
    let plane = s.clutter_map.plane(0);
    let max = plane.data().iter().copied().fold(0.0, f64::max);
    let scaled = plane.map(|v| if max > 0.0 { v / max } else { 0.0 });
    Ok(Image::new(
        ColorSpace::Srgb,
        vec![scaled.clone(), scaled.clone(), scaled],
    )?)
}

pub fn render(
    cfg: &Resolved,
    scene_path: &Path,
    out_dir: &Path,
    maps: bool,
) -> Result<(), CliError> {
    require_file(scene_path)?;
    let scene = SceneSpec::load(scene_path)?;
    let mut run = Run::start("render", cfg, out_dir)?;
    run.input(scene_path)?;
    let robot = render_view(&scene, &scene.robot_cam).color;
    let top = render_view(&scene, &scene.top_cam).color;
    run.output("robot.ppm", &encode_ppm(&robot)?)?;
    run.output("top.ppm", &encode_ppm(&top)?)?;
    let mut summary = json!({});
    if maps {
        let d = dvfc(&robot, &top, &cfg.generator.clutter)?;
        run.output(
            "robot_clutter.ppm",
            &encode_ppm(&clutter_map_image(&d.robot_view)?)?,
        )?;
        run.output(
            "top_clutter.ppm",
            &encode_ppm(&clutter_map_image(&d.top_view)?)?,
        )?;
        summary = json!({ "dvfc": d.value });
    }
    run.finish(summary)?;
    Ok(())
}

pub struct GenerateOpts {
    pub bases: Vec<String>,
    pub count: usize,
    pub preset: Option<Preset>,
    pub max_attempts: Option<u64>,
    pub catalog: Option<PathBuf>,
}

fn builtin_base(name: &str) -> Option<BaseScenario> {
    presets::sim_bases()
        .into_iter()
        .chain(presets::real_world_bases())
        .find(|b| b.name == name)
}

/// Stream indices are offset per base so bases never share draws.
const BASE_INDEX_STRIDE: u64 = 1 << 40;

pub fn generate(cfg: &Resolved, opts: &GenerateOpts, out_dir: &Path) -> Result<(), CliError> {
    let mut inputs = Vec::new();
    let catalog = match &opts.catalog {
        Some(p) => {
            require_file(p)?;
            inputs.push(p.clone());
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            DistractorCatalog::parse(&text).map_err(|e| CliError::from(e.with_path(p)))?
        }
        None => DistractorCatalog::builtin(),
    };

    let gen = &cfg.generator;
    let (records, summary) = match opts.preset {
        Some(Preset::RealWorld) => {
            let recs = presets::preset_real_world(gen, &catalog)?;
            let n = recs.len();
            (recs, json!({ "preset": "real-world", "scenarios": n }))
        }
        None => {
            let mut bases = Vec::new();
            if opts.bases.is_empty() {
                bases = presets::sim_bases();
            }
            for b in &opts.bases {
                match builtin_base(b) {
                    Some(base) => bases.push(base),
                    None => {
                        let p = Path::new(b);
                        if !p.is_file() {
                            return Err(CliError::Usage(format!(
                                "{b}: neither a built-in base nor a file (see `clutterbench bases`)"
                            )));
                        }
                        inputs.push(p.to_path_buf());
                        bases.push(BaseScenario::load(p)?);
                    }
                }
            }
            let max_attempts = opts
                .max_attempts
                .unwrap_or((opts.count as u64 * 200).max(1000));
            let mut all = Vec::new();
            let mut per_base = BTreeMap::new();
            for (i, base) in bases.iter().enumerate() {
                let batch = generate_accepted(
                    base,
                    &catalog,
                    gen,
                    i as u64 * BASE_INDEX_STRIDE,
                    opts.count,
                    max_attempts,
                )?;
                per_base.insert(
                    base.name.clone(),
                    json!({
                        "accepted": batch.records.len(),
                        "attempts": batch.attempts,
                        "rejections": batch.rejections,
                    }),
                );
                all.extend(batch.records);
            }
            (all, json!({ "bases": per_base }))
        }
    };

    let mut run = Run::start("generate", cfg, out_dir)?;
    for p in &inputs {
        run.input(p)?;
    }
    run.output("scenarios.jsonl", &records_bytes(&records))?;
    run.finish(summary)?;
    eprintln!(
        "{} scenarios written to {}",
        records.len(),
        out_dir.display()
    );
    Ok(())
}

pub fn sample(cfg: &Resolved, scenarios: &Path, out_dir: &Path) -> Result<(), CliError> {
    require_file(scenarios)?;
    let records = scenario::load(scenarios)?;
    let g = &cfg.generator;
    let out = bin_and_sample(&records, g.n_bins, g.per_bin, g.seed, cfg.binning)?;
    for s in &out.shortfalls {
        eprintln!(
            "warning: bin {} holds {} of {} requested scenarios",
            s.bin, s.available, s.requested
        );
    }
    let mut run = Run::start("sample", cfg, out_dir)?;
    run.input(scenarios)?;
    run.output("sampled.jsonl", &records_bytes(&out.records))?;
    run.finish(json!({
        "sampled": out.records.len(),
        "populations": out.populations,
        "shortfalls": out.shortfalls,
    }))?;
    Ok(())
}

struct Evaluated {
    /// Policies in order of first appearance.
    policies: Vec<String>,
    outcomes: Vec<EpisodeOutcome>,
}

fn load_and_classify(
    cfg: &Resolved,
    scenarios: &[ScenarioRecord],
    logs: &[PathBuf],
) -> Result<Evaluated, CliError> {
    let mut all: Vec<EpisodeLog> = Vec::new();
    for p in logs {
        all.extend(read_logs(p)?);
    }
    let outcomes: Vec<EpisodeOutcome> = all
        .par_chunks(64)
        .map(|chunk| classify_all(chunk, scenarios, cfg.d_reach))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut policies: Vec<String> = Vec::new();
    for o in &outcomes {
        if !policies.contains(&o.policy_id) {
            policies.push(o.policy_id.clone());
        }
    }
    Ok(Evaluated { policies, outcomes })
}

fn of_policy(outcomes: &[EpisodeOutcome], policy: &str) -> Vec<EpisodeOutcome> {
    outcomes
        .iter()
        .filter(|o| o.policy_id == policy)
        .cloned()
        .collect()
}

fn check_inputs(scenarios: &Path, logs: &[PathBuf], base_logs: &[PathBuf]) -> Result<(), CliError> {
    require_file(scenarios)?;
    for p in logs.iter().chain(base_logs) {
        require_file(p)?;
    }
    Ok(())
}

pub fn eval(
    cfg: &Resolved,
    scenarios: &Path,
    logs: &[PathBuf],
    out_dir: &Path,
) -> Result<(), CliError> {
    check_inputs(scenarios, logs, &[])?;
    let records = scenario::load(scenarios)?;
    let ev = load_and_classify(cfg, &records, logs)?;
    let mut metrics = BTreeMap::new();
    for p in &ev.policies {
        metrics.insert(p.clone(), compute_metrics(&of_policy(&ev.outcomes, p))?);
    }
    let mut run = Run::start("eval", cfg, out_dir)?;
    run.input(scenarios)?;
    for p in logs {
        run.input(p)?;
    }
    run.output("outcomes.jsonl", &jsonl(&ev.outcomes))?;
    run.output("metrics.json", &pretty(&metrics))?;
    run.finish(json!({ "episodes": ev.outcomes.len(), "policies": ev.policies }))?;
    for (p, m) in &metrics {
        println!(
            "{p}: n={} sr={:.3} h_sr={:.3} cr={:.3} gfr={:.3}",
            m.n_episodes, m.sr, m.h_sr, m.cr, m.gfr
        );
    }
    Ok(())
}

fn file_stem(policy: &str) -> String {
    policy
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn report(
    cfg: &Resolved,
    scenarios: &Path,
    logs: &[PathBuf],
    base_logs: &[PathBuf],
    out_dir: &Path,
) -> Result<(), CliError> {
    check_inputs(scenarios, logs, base_logs)?;
    let records = scenario::load(scenarios)?;
    let ev = load_and_classify(cfg, &records, logs)?;
    let base_ev = if base_logs.is_empty() {
        None
    } else {
        Some(load_and_classify(cfg, &records, base_logs)?)
    };

    let mut run = Run::start("report", cfg, out_dir)?;
    run.input(scenarios)?;
    for p in logs.iter().chain(base_logs) {
        run.input(p)?;
    }

    let mut rows = Vec::new();
    let mut reach = BTreeMap::new();
    let mut successes = Vec::new();
    for p in &ev.policies {
        let outs = of_policy(&ev.outcomes, p);
        let m = compute_metrics(&outs)?;
        let base_m = match &base_ev {
            Some(b) => {
                let bo = of_policy(&b.outcomes, p);
                if bo.is_empty() {
                    None
                } else {
                    Some(compute_metrics(&bo)?)
                }
            }
            None => None,
        };
        rows.push(TableRow::from_metrics(p.clone(), &m, base_m.as_ref()));

        let curves = per_bin_curves(&outs, cfg.generator.n_bins, cfg.binning);
        let stem = file_stem(p);
        run.output(
            &format!("curves/{stem}_dvfc.csv"),
            curves.per_bin.to_csv().as_bytes(),
        )?;
        run.output(
            &format!("curves/{stem}_set_size.csv"),
            curves.per_set_size.to_csv().as_bytes(),
        )?;
        run.output(
            &format!("curves/{stem}_occlusion.csv"),
            curves.per_occlusion.to_csv().as_bytes(),
        )?;
        reach.insert(p.clone(), reach_failure_distribution(&outs));
        let won: HashSet<String> = outs
            .iter()
            .filter(|o| o.success)
            .map(|o| o.scenario_id.clone())
            .collect();
        successes.push((p.clone(), won));
    }

    let table = table_csv(&rows);
    run.output("table.csv", table.as_bytes())?;
    run.output("reach_failures.json", &pretty(&reach))?;

    let universe: HashSet<&str> = ev.outcomes.iter().map(|o| o.scenario_id.as_str()).collect();
    let agree = match successes.len() {
        2 | 3 => Some(
            serde_json::to_value(agreement(&successes, universe.len())?).expect("serializable"),
        ),
        n if n > 3 => Some(json!({ "pairwise": pairwise_agreement(&successes) })),
        _ => None,
    };
    if let Some(a) = &agree {
        run.output("agreement.json", &pretty(a))?;
    }
    run.finish(json!({ "episodes": ev.outcomes.len(), "policies": ev.policies }))?;
    print!("{table}");
    Ok(())
}

pub fn bases(export: Option<&Path>) -> Result<(), CliError> {
    let all: Vec<BaseScenario> = presets::sim_bases()
        .into_iter()
        .chain(presets::real_world_bases())
        .collect();
    for b in &all {
        println!("{}\t{}\t{}", b.name, b.skill, b.instruction);
    }
    if let Some(dir) = export {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for b in &all {
            let p = dir.join(format!("{}.json", b.name));
            std::fs::write(&p, b.to_json() + "\n").map_err(|e| CliError::io(&p, e))?;
        }
    }
    Ok(())
}
