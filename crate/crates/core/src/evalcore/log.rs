//! Episode log text format.
//!
//! ```text
//! # clutterbench episodes v1
//! E <scenario_id> <policy_id> <max_steps> <success 0|1>
//! S <step> <x> <y> <z> <grasped id|-> <contact,contact,...|->
//! ```
//!
//! Fields are tab-separated. Step lines belong to the latest episode line.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EPISODE_HEADER: &str = "# clutterbench episodes v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub index: usize,
    /// End-effector position, meters.
    pub ee: [f64; 3],
    pub grasped: Option<String>,
    pub contacts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub scenario_id: String,
    pub policy_id: String,
    pub max_steps: usize,
    pub success: bool,
    pub steps: Vec<Step>,
}

impl EpisodeLog {
    pub fn validate(&self) -> Result<()> {
        if self.steps.len() > self.max_steps {
            return Err(Error::invalid(format!(
                "{} steps exceed max_steps {}",
                self.steps.len(),
                self.max_steps
            )));
        }
        if let Some(w) = self.steps.windows(2).find(|w| w[1].index <= w[0].index) {
            return Err(Error::invalid(format!(
                "step {} follows step {}; indices must increase",
                w[1].index, w[0].index
            )));
        }
        Ok(())
    }
}

fn check_token(s: &str, what: &str) -> std::io::Result<()> {
    if s.is_empty() || s == "-" || s.contains(['\t', '\n', ',']) {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("{what} {s:?} cannot be written to an episode log"),
        ));
    }
    Ok(())
}

pub fn write_logs(logs: &[EpisodeLog], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{EPISODE_HEADER}")?;
    for log in logs {
        check_token(&log.scenario_id, "scenario id")?;
        check_token(&log.policy_id, "policy id")?;
        writeln!(
            out,
            "E\t{}\t{}\t{}\t{}",
            log.scenario_id, log.policy_id, log.max_steps, log.success as u8
        )?;
        for s in &log.steps {
            let grasp = s.grasped.as_deref().unwrap_or("-");
            for c in &s.contacts {
                check_token(c, "contact id")?;
            }
            let contacts = if s.contacts.is_empty() {
                "-".to_string()
            } else {
                s.contacts.join(",")
            };
            writeln!(
                out,
                "S\t{}\t{:?}\t{:?}\t{:?}\t{grasp}\t{contacts}",
                s.index, s.ee[0], s.ee[1], s.ee[2]
            )?;
        }
    }
    out.flush()
}

fn num<T: std::str::FromStr>(field: &str, what: &str, line: usize) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("{what} {field:?} is not a number")))
}

pub fn parse_logs(text: &str) -> Result<Vec<EpisodeLog>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == EPISODE_HEADER => {}
        _ => {
            return Err(Error::parse(
                1,
                format!("expected header {EPISODE_HEADER:?}"),
            ))
        }
    }
    let mut logs: Vec<EpisodeLog> = Vec::new();
    let mut started_at = 0;
    let finish = |logs: &[EpisodeLog], at: usize| -> Result<()> {
        match logs.last() {
            Some(l) => l.validate().map_err(|e| Error::parse(at, e.to_string())),
            None => Ok(()),
        }
    };
    for (i, raw) in lines {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        match f[0] {
            "E" => {
                if f.len() != 5 {
                    return Err(Error::parse(
                        lineno,
                        format!("episode line has {} fields, expected 5", f.len()),
                    ));
                }
                finish(&logs, started_at)?;
                let success = match f[4] {
                    "1" => true,
                    "0" => false,
                    other => {
                        return Err(Error::parse(
                            lineno,
                            format!("success flag {other:?} is not 0 or 1"),
                        ))
                    }
                };
                logs.push(EpisodeLog {
                    scenario_id: f[1].to_string(),
                    policy_id: f[2].to_string(),
                    max_steps: num(f[3], "max_steps", lineno)?,
                    success,
                    steps: Vec::new(),
                });
                started_at = lineno;
            }
            "S" => {
                if f.len() != 7 {
                    return Err(Error::parse(
                        lineno,
                        format!("step line has {} fields, expected 7", f.len()),
                    ));
                }
                let Some(log) = logs.last_mut() else {
                    return Err(Error::parse(lineno, "step line before any episode line"));
                };
                let mut ee = [0.0f64; 3];
                for (k, v) in ee.iter_mut().enumerate() {
                    *v = num(f[2 + k], "coordinate", lineno)?;
                    if !v.is_finite() {
                        return Err(Error::parse(lineno, "coordinate is not finite"));
                    }
                }
                log.steps.push(Step {
                    index: num(f[1], "step index", lineno)?,
                    ee,
                    grasped: (f[5] != "-").then(|| f[5].to_string()),
                    contacts: if f[6] == "-" {
                        Vec::new()
                    } else {
                        f[6].split(',').map(str::to_string).collect()
                    },
                });
            }
            other => {
                return Err(Error::parse(
                    lineno,
                    format!("unknown record tag {other:?}"),
                ))
            }
        }
    }
    finish(&logs, started_at)?;
    Ok(logs)
}

pub fn read_logs(path: impl AsRef<Path>) -> Result<Vec<EpisodeLog>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_logs(&text).map_err(|e| e.with_path(path))
}
