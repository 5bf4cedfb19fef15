use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ScenarioRecord;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinningMode {
    /// Equal-width intervals between the observed minimum and maximum.
    #[default]
    EqualWidth,
    /// Equal counts after sorting by score (ties broken by id).
    EqualPopulation,
}

impl fmt::Display for BinningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinningMode::EqualWidth => "equal-width",
            BinningMode::EqualPopulation => "equal-population",
        })
    }
}

impl FromStr for BinningMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "equal-width" => Ok(BinningMode::EqualWidth),
            "equal-population" => Ok(BinningMode::EqualPopulation),
            other => Err(format!(
                "unknown binning mode {other:?} (equal-width|equal-population)"
            )),
        }
    }
}

/// A bin that held fewer records than requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    pub bin: usize,
    pub available: usize,
    pub requested: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    /// Selected records with `bin` set, ordered by bin then input order.
    pub records: Vec<ScenarioRecord>,
    /// Population of every bin before sampling.
    pub populations: Vec<usize>,
    pub shortfalls: Vec<Shortfall>,
}

/// Bin index for each score.
///
/// When every score is equal all records fall in bin 0.
pub fn assign_bins(scores: &[f64], ids: &[&str], n_bins: usize, mode: BinningMode) -> Vec<usize> {
    let n = scores.len();
    if n == 0 || n_bins == 0 {
        return vec![0; n];
    }
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![0; n];
    }
    match mode {
        BinningMode::EqualWidth => scores
            .iter()
            .map(|&v| {
                let b = ((v - lo) / (hi - lo) * n_bins as f64).floor() as usize;
                b.min(n_bins - 1)
            })
            .collect(),
        BinningMode::EqualPopulation => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(ids[a].cmp(ids[b])));
            let mut bins = vec![0; n];
            for (rank, &i) in order.iter().enumerate() {
                bins[i] = rank * n_bins / n;
            }
            bins
        }
    }
}

/// Group records by DvFC into `n_bins` bins and draw up to `per_bin`
/// records from each, uniformly without replacement.
pub fn bin_and_sample(
    records: &[ScenarioRecord],
    n_bins: usize,
    per_bin: usize,
    seed: u64,
    mode: BinningMode,
) -> Result<SampleOutcome> {
    if records.is_empty() {
        return Err(Error::invalid("no scenario records to sample"));
    }
    if n_bins == 0 {
        return Err(Error::invalid("n_bins must be >= 1"));
    }
    let scores: Vec<f64> = records.iter().map(|r| r.dvfc).collect();
    let ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
    let bins = assign_bins(&scores, &ids, n_bins, mode);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_bins];
    for (i, &b) in bins.iter().enumerate() {
        members[b].push(i);
    }

    let mut out = Vec::new();
    let mut shortfalls = Vec::new();
    for (b, m) in members.iter().enumerate() {
        let mut chosen = if m.len() <= per_bin {
            if m.len() < per_bin {
                shortfalls.push(Shortfall {
                    bin: b,
                    available: m.len(),
                    requested: per_bin,
                });
            }
            m.clone()
        } else {
            let mut rng = StreamRng::new(seed, b as u64);
            rng.choose_indices(m.len(), per_bin)
                .into_iter()
                .map(|k| m[k])
                .collect()
        };
        chosen.sort_unstable();
        out.extend(chosen.into_iter().map(|i| ScenarioRecord {
            bin: Some(b),
            ..records[i].clone()
        }));
    }
    Ok(SampleOutcome {
        records: out,
        populations: members.iter().map(Vec::len).collect(),
        shortfalls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Skill;
    use crate::scene::{SceneSpec, TableExtent};

    pub(crate) fn record(id: usize, dvfc: f64) -> ScenarioRecord {
        ScenarioRecord {
            id: format!("r{id:04}"),
            base: "fixture".into(),
            skill: Skill::Pick,
            instruction: "pick".into(),
            seed: 0,
            index: id as u64,
            n_distractors: 0,
            occlusion: 0.0,
            dvfc,
            robot_fcm: dvfc,
            top_fcm: dvfc,
            bin: None,
            scene: SceneSpec::tabletop(TableExtent::centered(1.0, 1.0), vec![], "none"),
        }
    }

    fn stepped() -> Vec<ScenarioRecord> {
        (0..80).map(|i| record(i, i as f64 * 0.1)).collect()
    }

    #[test]
    fn stepped_scores_fill_each_bin() {
        let s = bin_and_sample(&stepped(), 8, 10, 1, BinningMode::EqualWidth).unwrap();
        assert_eq!(s.records.len(), 80);
        assert_eq!(s.populations, vec![10; 8]);
        assert!(s.shortfalls.is_empty());
        for (i, r) in s.records.iter().enumerate() {
            assert_eq!(r.bin, Some(i / 10));
        }
    }

    #[test]
    fn single_record() {
        let s = bin_and_sample(&[record(0, 3.0)], 8, 10, 1, BinningMode::EqualWidth).unwrap();
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.records[0].bin, Some(0));
    }

    #[test]
    fn identical_scores_share_bin_zero() {
        let recs: Vec<_> = (0..5).map(|i| record(i, 2.5)).collect();
        for mode in [BinningMode::EqualWidth, BinningMode::EqualPopulation] {
            let s = bin_and_sample(&recs, 4, 3, 9, mode).unwrap();
            assert_eq!(s.populations, vec![5, 0, 0, 0]);
            assert_eq!(s.records.len(), 3);
        }
    }

    #[test]
    fn oversized_request_returns_everything() {
        let s = bin_and_sample(&stepped(), 8, 50, 1, BinningMode::EqualWidth).unwrap();
        assert_eq!(s.records.len(), 80);
        assert_eq!(s.shortfalls.len(), 8);
        assert!(s
            .shortfalls
            .iter()
            .all(|f| f.available == 10 && f.requested == 50));
    }

    #[test]
    fn sampling_is_seeded() {
        let a = bin_and_sample(&stepped(), 8, 3, 5, BinningMode::EqualWidth).unwrap();
        let b = bin_and_sample(&stepped(), 8, 3, 5, BinningMode::EqualWidth).unwrap();
        let c = bin_and_sample(&stepped(), 8, 3, 6, BinningMode::EqualWidth).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn equal_population_splits_evenly() {
        let recs: Vec<_> = (0..64)
            .map(|i| record(i, ((i * 37) % 64) as f64 * 0.01))
            .collect();
        let s = bin_and_sample(&recs, 8, 100, 0, BinningMode::EqualPopulation).unwrap();
        assert_eq!(s.populations, vec![8; 8]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(bin_and_sample(&[], 8, 10, 0, BinningMode::EqualWidth).is_err());
    }
}
