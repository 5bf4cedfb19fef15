//! Scenario files: a version header line followed by one JSON record per
//! line, fields in declaration order.

use std::io::Write;
use std::path::Path;

use super::ScenarioRecord;
use crate::error::{Error, Result};

pub const SCENARIO_HEADER: &str = "# clutterbench scenarios v1";

pub fn write_records(records: &[ScenarioRecord], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{SCENARIO_HEADER}")?;
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn persist(records: &[ScenarioRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Parse scenario-file text. Blank lines are skipped; every record is
/// checked against the record invariants.
pub fn parse_records(text: &str) -> Result<Vec<ScenarioRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == SCENARIO_HEADER => {}
        Some((_, h)) => {
            return Err(Error::parse(
                1,
                format!("expected header {SCENARIO_HEADER:?}, found {h:?}"),
            ))
        }
        None => return Err(Error::parse(1, "empty file, missing header")),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ScenarioRecord =
            serde_json::from_str(line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        rec.validate()
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load(path: impl AsRef<Path>) -> Result<Vec<ScenarioRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text).map_err(|e| e.with_path(path))
}
