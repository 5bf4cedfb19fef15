use serde::{Deserialize, Serialize};

use super::EpisodeOutcome;
use crate::scenario::{assign_bins, BinningMode};

/// Occlusion curves group by decile of the occlusion ratio.
pub const OCCLUSION_GROUPS: usize = 10;

/// One group of a curve. Rates are `None` for an empty group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub group: usize,
    /// Lower edge of the group in the grouping variable.
    pub lower: f64,
    pub n: usize,
    pub sr: Option<f64>,
    pub cr: Option<f64>,
    pub gfr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub variable: String,
    pub points: Vec<CurvePoint>,
}

impl Curve {
    /// CSV with one row per group; empty groups print `null` rates.
    pub fn to_csv(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("null".to_string(), |x| format!("{x:.6}"));
        let mut s = format!("group,{}_lower,n,sr,cr,gfr\n", self.variable);
        for p in &self.points {
            s.push_str(&format!(
                "{},{:.6},{},{},{},{}\n",
                p.group,
                p.lower,
                p.n,
                fmt(p.sr),
                fmt(p.cr),
                fmt(p.gfr)
            ));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curves {
    pub per_bin: Curve,
    pub per_set_size: Curve,
    pub per_occlusion: Curve,
}

fn build(variable: &str, groups: &[usize], lowers: Vec<f64>, outcomes: &[EpisodeOutcome]) -> Curve {
    let mut acc = vec![(0usize, 0usize, 0usize, 0usize); lowers.len()];
    for (o, &g) in outcomes.iter().zip(groups) {
        let a = &mut acc[g];
        a.0 += 1;
        a.1 += o.success as usize;
        a.2 += o.collided as usize;
        a.3 += !o.grasped_target as usize;
    }
    let points = acc
        .into_iter()
        .zip(lowers)
        .enumerate()
        .map(|(group, ((n, s, c, g), lower))| {
            let rate = |k: usize| (n > 0).then(|| k as f64 / n as f64);
            CurvePoint {
                group,
                lower,
                n,
                sr: rate(s),
                cr: rate(c),
                gfr: rate(g),
            }
        })
        .collect();
    Curve {
        variable: variable.to_string(),
        points,
    }
}

/// Success, collision and grasp-failure rates grouped three ways: by DvFC
/// bin over the evaluated scenarios, by distractor count from 0 to the
/// largest count seen, and by occlusion decile.
pub fn per_bin_curves(outcomes: &[EpisodeOutcome], n_bins: usize, mode: BinningMode) -> Curves {
    let n_bins = n_bins.max(1);
    let scores: Vec<f64> = outcomes.iter().map(|o| o.dvfc).collect();
    let ids: Vec<&str> = outcomes.iter().map(|o| o.scenario_id.as_str()).collect();
    let bins = assign_bins(&scores, &ids, n_bins, mode);
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bin_lowers = (0..n_bins)
        .map(|b| {
            if outcomes.is_empty() {
                0.0
            } else if mode == BinningMode::EqualWidth {
                lo + (hi - lo) * b as f64 / n_bins as f64
            } else {
                outcomes
                    .iter()
                    .zip(&bins)
                    .filter(|(_, &g)| g == b)
                    .map(|(o, _)| o.dvfc)
                    .fold(f64::NAN, f64::min)
            }
        })
        .collect();

    let max_set = outcomes.iter().map(|o| o.n_distractors).max().unwrap_or(0);
    let sizes: Vec<usize> = outcomes.iter().map(|o| o.n_distractors).collect();
    let set_lowers = (0..=max_set).map(|k| k as f64).collect();

    let deciles: Vec<usize> = outcomes
        .iter()
        .map(|o| {
            ((o.occlusion * OCCLUSION_GROUPS as f64).floor() as usize).min(OCCLUSION_GROUPS - 1)
        })
        .collect();
    let occ_lowers = (0..OCCLUSION_GROUPS)
        .map(|k| k as f64 / OCCLUSION_GROUPS as f64)
        .collect();

    Curves {
        per_bin: build("dvfc", &bins, bin_lowers, outcomes),
        per_set_size: build("n_distractors", &sizes, set_lowers, outcomes),
        per_occlusion: build("occlusion", &deciles, occ_lowers, outcomes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalcore::fixtures::*;
    use crate::evalcore::{classify_all, compute_metrics};
    use proptest::prelude::*;

    fn outcomes(spec: &[(f64, f64, bool, bool)]) -> Vec<EpisodeOutcome> {
        let scen: Vec<_> = spec
            .iter()
            .enumerate()
            .map(|(i, &(occ, dvfc, _, _))| scenario(&format!("s{i}"), occ, dvfc))
            .collect();
        let logs: Vec<_> = spec
            .iter()
            .enumerate()
            .map(|(i, &(_, _, success, hit))| {
                let contacts: &[&str] = if hit { &["d"] } else { &[] };
                log(
                    &format!("s{i}"),
                    success,
                    vec![step(0, [0.0, 0.0, 0.02], Some("t"), contacts)],
                )
            })
            .collect();
        classify_all(&logs, &scen, 0.05).unwrap()
    }

    #[test]
    fn one_populated_bin() {
        let o = outcomes(&[(0.0, 1.0, true, false), (0.0, 1.0, false, false)]);
        let c = per_bin_curves(&o, 8, BinningMode::EqualWidth);
        assert_eq!(c.per_bin.points.len(), 8);
        assert_eq!(c.per_bin.points[0].sr, Some(0.5));
        assert!(c.per_bin.points[1..]
            .iter()
            .all(|p| p.n == 0 && p.sr.is_none()));
        assert!(c.per_bin.to_csv().contains(",null,null,null"));
    }

    #[test]
    fn step_shaped_sr() {
        let spec: Vec<_> = (0..16).map(|i| (0.0, i as f64, i < 8, false)).collect();
        let c = per_bin_curves(&outcomes(&spec), 4, BinningMode::EqualWidth);
        let sr: Vec<_> = c.per_bin.points.iter().map(|p| p.sr.unwrap()).collect();
        assert_eq!(sr, vec![1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn unoccluded_only_fills_first_decile() {
        let o = outcomes(&[(0.0, 1.0, true, false), (0.0, 2.0, false, true)]);
        let c = per_bin_curves(&o, 8, BinningMode::EqualWidth);
        assert_eq!(c.per_occlusion.points[0].n, 2);
        assert!(c.per_occlusion.points[1..].iter().all(|p| p.sr.is_none()));
        assert_eq!(c.per_set_size.points.len(), 2);
        assert!(c.per_set_size.points[0].sr.is_none());
    }

    proptest! {
        #[test]
        fn weighted_groups_recompose_totals(
            spec in proptest::collection::vec((0.0f64..0.5, 0.0f64..3.0, any::<bool>(), any::<bool>()), 1..40),
            n_bins in 1usize..10,
        ) {
            let o = outcomes(&spec);
            let m = compute_metrics(&o).unwrap();
            let c = per_bin_curves(&o, n_bins, BinningMode::EqualWidth);
            for curve in [&c.per_bin, &c.per_set_size, &c.per_occlusion] {
                let n: usize = curve.points.iter().map(|p| p.n).sum();
                prop_assert_eq!(n, o.len());
                let w = |f: fn(&CurvePoint) -> Option<f64>| {
                    curve.points.iter().map(|p| f(p).unwrap_or(0.0) * p.n as f64).sum::<f64>() / n as f64
                };
                prop_assert!((w(|p| p.sr) - m.sr).abs() <= 1e-12);
                prop_assert!((w(|p| p.cr) - m.cr).abs() <= 1e-12);
                prop_assert!((w(|p| p.gfr) - m.gfr).abs() <= 1e-12);
            }
        }
    }
}
