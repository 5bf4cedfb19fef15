use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One Venn region: scenarios solved by exactly `members`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub members: Vec<String>,
    pub count: usize,
    /// Share of the union; 0 when the union is empty.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub regions: Vec<Region>,
    pub union_count: usize,
    pub universe: usize,
    /// Share of the universe solved by at least one policy.
    pub union_sr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOverlap {
    pub a: String,
    pub b: String,
    pub both: usize,
    pub only_a: usize,
    pub only_b: usize,
    /// `both` over the pair's union; 0 when the union is empty.
    pub jaccard: f64,
}

fn check_universe(sets: &[(String, HashSet<String>)], universe: usize) -> Result<BTreeSet<&str>> {
    let union: BTreeSet<&str> = sets
        .iter()
        .flat_map(|(_, s)| s.iter().map(String::as_str))
        .collect();
    if universe == 0 || union.len() > universe {
        return Err(Error::invalid(format!(
            "universe of {universe} scenarios cannot hold {} distinct successes",
            union.len()
        )));
    }
    Ok(union)
}

/// Venn regions of two or three policies' success sets.
///
/// Regions are listed by membership bitmask, first policy in the lowest
/// bit. More than three policies is unsupported; use
/// [`pairwise_agreement`] instead.
pub fn agreement(sets: &[(String, HashSet<String>)], universe: usize) -> Result<Agreement> {
    if sets.len() > 3 {
        return Err(Error::Unsupported(format!(
            "Venn regions for {} policies; use pairwise agreement",
            sets.len()
        )));
    }
    if sets.len() < 2 {
        return Err(Error::invalid("agreement needs at least two policies"));
    }
    let union = check_universe(sets, universe)?;
    let k = sets.len();
    let mut counts = vec![0usize; 1 << k];
    for id in &union {
        let mask = sets
            .iter()
            .enumerate()
            .filter(|(_, (_, s))| s.contains(*id))
            .fold(0, |m, (i, _)| m | (1 << i));
        counts[mask] += 1;
    }
    let total = union.len();
    let regions = (1..1usize << k)
        .map(|mask| Region {
            members: (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| sets[i].0.clone())
                .collect(),
            count: counts[mask],
            fraction: if total == 0 {
                0.0
            } else {
                counts[mask] as f64 / total as f64
            },
        })
        .collect();
    Ok(Agreement {
        regions,
        union_count: total,
        universe,
        union_sr: total as f64 / universe as f64,
    })
}

/// Overlap of every policy pair, for any number of policies.
pub fn pairwise_agreement(sets: &[(String, HashSet<String>)]) -> Vec<PairOverlap> {
    let mut out = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let (a, sa) = &sets[i];
            let (b, sb) = &sets[j];
            let both = sa.intersection(sb).count();
            let union = sa.len() + sb.len() - both;
            out.push(PairOverlap {
                a: a.clone(),
                b: b.clone(),
                both,
                only_a: sa.len() - both,
                only_b: sb.len() - both,
                jaccard: if union == 0 {
                    0.0
                } else {
                    both as f64 / union as f64
                },
            });
        }
    }
    out
}
