use serde::{Deserialize, Serialize};

use super::{EpisodeOutcome, MetricsReport, Stage};

/// Reach failures farther than this, meters, mark a dispersed policy.
pub const DISPERSION_RADIUS: f64 = 0.5;

pub const TABLE_COLUMNS: [&str; 9] = [
    "policy", "sr_base", "sr", "sr_noocc", "sr_occ", "h_sr", "cr", "gfr", "er",
];

/// One policy row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub policy: String,
    /// Success rate on the scenes without added distractors, when evaluated.
    pub sr_base: Option<f64>,
    pub sr: f64,
    pub sr_noocc: f64,
    pub sr_occ: f64,
    pub h_sr: f64,
    pub cr: f64,
    pub gfr: f64,
    pub er: Option<f64>,
}

impl TableRow {
    pub fn from_metrics(
        policy: impl Into<String>,
        cluttered: &MetricsReport,
        base: Option<&MetricsReport>,
    ) -> Self {
        TableRow {
            policy: policy.into(),
            sr_base: base.map(|b| b.sr),
            sr: cluttered.sr,
            sr_noocc: cluttered.sr_noocc,
            sr_occ: cluttered.sr_occ,
            h_sr: cluttered.h_sr,
            cr: cluttered.cr,
            gfr: cluttered.gfr,
            er: cluttered.er,
        }
    }

    pub fn to_csv_line(&self) -> String {
        let f = |v: f64| format!("{v:.3}");
        let o = |v: Option<f64>| v.map_or("-".to_string(), f);
        [
            self.policy.clone(),
            o(self.sr_base),
            f(self.sr),
            f(self.sr_noocc),
            f(self.sr_occ),
            f(self.h_sr),
            f(self.cr),
            f(self.gfr),
            o(self.er),
        ]
        .join(",")
    }
}

/// Summary table as CSV: a comment stating the ER convention, the column
/// header, then one row per policy with three decimals.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("# er = mean steps_used/max_steps over successful episodes only\n");
    s.push_str(&TABLE_COLUMNS.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

/// Linear-interpolation quantile of sorted data (`q` in [0, 1]).
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachFailures {
    /// `(scenario_id, closest approach)` per FAIL_REACH episode, in input
    /// order; episodes without steps are listed with `None`.
    pub entries: Vec<(String, Option<f64>)>,
    pub median: Option<f64>,
    pub p90: Option<f64>,
    /// Some failure ended farther than [`DISPERSION_RADIUS`] from the target.
    pub dispersed: bool,
}

pub fn reach_failure_distribution(outcomes: &[EpisodeOutcome]) -> ReachFailures {
    let entries: Vec<(String, Option<f64>)> = outcomes
        .iter()
        .filter(|o| o.stage == Stage::FailReach)
        .map(|o| (o.scenario_id.clone(), o.min_target_distance))
        .collect();
    let mut d: Vec<f64> = entries.iter().filter_map(|e| e.1).collect();
    d.sort_by(f64::total_cmp);
    ReachFailures {
        median: quantile(&d, 0.5),
        p90: quantile(&d, 0.9),
        dispersed: d.last().is_some_and(|&m| m > DISPERSION_RADIUS),
        entries,
    }
}
