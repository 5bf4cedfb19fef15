//! The distractor set: 61 primitive approximations of YCB objects.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scene::Shape;

const BUILTIN: &str = include_str!("../../data/distractors.csv");

/// Size of the distractor set.
pub const CATALOG_SIZE: usize = 61;

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub shape: Shape,
    pub color: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct DistractorCatalog {
    entries: Vec<CatalogEntry>,
}

fn field(fields: &[&str], i: usize, line: usize) -> Result<f64> {
    fields
        .get(i)
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::parse(line, format!("column {} is not a number", i + 1)))
}

impl DistractorCatalog {
    /// The bundled catalog.
    pub fn builtin() -> Self {
        DistractorCatalog::parse(BUILTIN).expect("bundled catalog is valid")
    }

    /// Parse `name,shape,dim1,dim2,dim3,r,g,b` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = raw.split(',').collect();
            if f.len() != 8 {
                return Err(Error::parse(
                    line,
                    format!("expected 8 columns, got {}", f.len()),
                ));
            }
            let shape = match f[1].trim() {
                "box" => Shape::Box {
                    width: field(&f, 2, line)?,
                    depth: field(&f, 3, line)?,
                    height: field(&f, 4, line)?,
                },
                "cylinder" => Shape::Cylinder {
                    radius: field(&f, 2, line)?,
                    height: field(&f, 3, line)?,
                },
                "sphere" => Shape::Sphere {
                    radius: field(&f, 2, line)?,
                },
                other => return Err(Error::parse(line, format!("unknown shape {other:?}"))),
            };
            let color = [
                field(&f, 5, line)?,
                field(&f, 6, line)?,
                field(&f, 7, line)?,
            ];
            entries.push(CatalogEntry {
                name: f[0].trim().to_string(),
                shape,
                color,
            });
        }
        let catalog = DistractorCatalog { entries };
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for e in &self.entries {
            if !names.insert(e.name.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate catalog name {:?}",
                    e.name
                )));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries whose name contains none of the excluded class tokens.
    pub fn eligible(&self, excluded_classes: &[String]) -> Vec<&CatalogEntry> {
        self.entries
            .iter()
            .filter(|e| !excluded_classes.iter().any(|c| e.name.contains(c.as_str())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_61_unique_entries() {
        let c = DistractorCatalog::builtin();
        assert_eq!(c.len(), CATALOG_SIZE);
        let names: HashSet<_> = c.entries().iter().map(|e| &e.name).collect();
        assert_eq!(names.len(), CATALOG_SIZE);
        assert!(c
            .entries()
            .iter()
            .all(|e| e.color.iter().all(|v| (0.0..=1.0).contains(v))));
    }

    #[test]
    fn exclusion_by_class() {
        let c = DistractorCatalog::builtin();
        let kept = c.eligible(&["spoon".into(), "cups".into()]);
        assert_eq!(kept.len(), CATALOG_SIZE - 6);
        assert!(kept.iter().all(|e| e.name != "spoon"));
    }

    #[test]
    fn bad_rows_name_their_line() {
        let err =
            DistractorCatalog::parse("# header\nmug,cylinder,abc,0.1,,0.5,0.5,0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(DistractorCatalog::parse("a,box,1,1,1,0,0,0\na,box,1,1,1,0,0,0").is_err());
    }
}
