//! Run settings: built-in defaults, overridden by a TOML config file,
//! overridden by environment variables and flags.

use std::path::Path;

use clap::Args;
use clutterbench::clutter::{ClutterConfig, FeatureWeights, ScalePooling};
use clutterbench::evalcore::DEFAULT_D_REACH;
use clutterbench::scenario::{BinningMode, CountRange, GeneratorConfig};
use serde::{Deserialize, Serialize};

/// Tunables shared by every subcommand. Each field can also be set in the
/// config file under the same name.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Root seed for all randomness.
    #[arg(long, global = true, env = "CLUTTERBENCH_SEED")]
    pub seed: Option<u64>,
    /// Distractor count range, `min-max` or a single count.
    #[arg(long, global = true, env = "CLUTTERBENCH_N_DISTRACTORS_RANGE")]
    pub n_distractors_range: Option<String>,
    /// Minimum footprint gap between objects, meters.
    #[arg(long, global = true, env = "CLUTTERBENCH_DELTA_GAP")]
    pub delta_gap: Option<f64>,
    /// Largest accepted target occlusion ratio.
    #[arg(long, global = true, env = "CLUTTERBENCH_MAX_OCCLUSION")]
    pub max_occlusion: Option<f64>,
    /// Grasp clearance around the target, meters.
    #[arg(long, global = true, env = "CLUTTERBENCH_CLEARANCE")]
    pub clearance: Option<f64>,
    /// Pose draws per distractor before the scene is rejected.
    #[arg(long, global = true, env = "CLUTTERBENCH_MAX_PLACEMENT_ATTEMPTS")]
    pub max_placement_attempts: Option<usize>,
    /// Number of DvFC bins.
    #[arg(long, global = true, env = "CLUTTERBENCH_N_BINS")]
    pub n_bins: Option<usize>,
    /// Scenarios drawn per bin when sampling.
    #[arg(long, global = true, env = "CLUTTERBENCH_PER_BIN")]
    pub per_bin: Option<usize>,
    /// `equal-width` or `equal-population`.
    #[arg(long, global = true, env = "CLUTTERBENCH_BINNING")]
    pub binning: Option<String>,
    /// Pyramid levels scored by the clutter measure.
    #[arg(long, global = true, env = "CLUTTERBENCH_N_SCALES")]
    pub n_scales: Option<usize>,
    /// Local-statistics window sigma, pixels.
    #[arg(long, global = true, env = "CLUTTERBENCH_SIGMA_W")]
    pub sigma_w: Option<f64>,
    /// Feature weights `color,contrast,orient`; rescaled to sum to one.
    #[arg(long, global = true, env = "CLUTTERBENCH_WEIGHTS")]
    pub weights: Option<String>,
    /// Order of the spatial Minkowski mean.
    #[arg(long, global = true, env = "CLUTTERBENCH_POOLING_ORDER")]
    pub pooling_order: Option<f64>,
    /// Cross-scale pooling, `max` or `mean`.
    #[arg(long, global = true, env = "CLUTTERBENCH_SCALE_POOLING")]
    pub scale_pooling: Option<String>,
    #[arg(long, global = true, env = "CLUTTERBENCH_CONTRAST_SIGMA")]
    pub contrast_sigma: Option<f64>,
    #[arg(long, global = true, env = "CLUTTERBENCH_ORIENT_SIGMA")]
    pub orient_sigma: Option<f64>,
    #[arg(long, global = true, env = "CLUTTERBENCH_COLOR_FLOOR")]
    pub color_floor: Option<f64>,
    #[arg(long, global = true, env = "CLUTTERBENCH_ORIENT_FLOOR")]
    pub orient_floor: Option<f64>,
    /// Distance, meters, at which the gripper has reached the target.
    #[arg(long, global = true, env = "CLUTTERBENCH_D_REACH")]
    pub d_reach: Option<f64>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Settings {
    /// Fill unset fields from `lower`.
    pub fn or(mut self, lower: Settings) -> Settings {
        overlay!(
            self,
            lower,
            seed,
            n_distractors_range,
            delta_gap,
            max_occlusion,
            clearance,
            max_placement_attempts,
            n_bins,
            per_bin,
            binning,
            n_scales,
            sigma_w,
            weights,
            pooling_order,
            scale_pooling,
            contrast_sigma,
            orient_sigma,
            color_floor,
            orient_floor,
            d_reach
        );
        self
    }

    pub fn from_file(path: &Path) -> Result<Settings, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Apply to the defaults, collecting every invalid field.
    pub fn resolve(&self) -> Result<Resolved, Vec<String>> {
        let mut problems = Vec::new();
        let mut generator = GeneratorConfig::default();
        let mut clutter = ClutterConfig::default();
        let mut binning = BinningMode::default();

        if let Some(s) = &self.n_distractors_range {
            match s.parse::<CountRange>() {
                Ok(r) => generator.n_distractors_range = r,
                Err(e) => problems.push(format!("n_distractors_range: {e}")),
            }
        }
        if let Some(s) = &self.binning {
            match s.parse::<BinningMode>() {
                Ok(m) => binning = m,
                Err(e) => problems.push(format!("binning: {e}")),
            }
        }
        if let Some(s) = &self.scale_pooling {
            match s.parse::<ScalePooling>() {
                Ok(p) => clutter.scale_pooling = p,
                Err(e) => problems.push(format!("scale_pooling: {e}")),
            }
        }
        if let Some(s) = &self.weights {
            let parts: Vec<Option<f64>> = s.split(',').map(|t| t.trim().parse().ok()).collect();
            match parts.as_slice() {
                [Some(c), Some(k), Some(o)] => match FeatureWeights::normalized(*c, *k, *o) {
                    Ok(w) => clutter.weights = w,
                    Err(e) => problems.push(format!("weights: {e}")),
                },
                _ => problems.push(format!("weights: expected three numbers, got {s:?}")),
            }
        }
        macro_rules! set {
            ($dst:expr, $($f:ident),*) => { $( if let Some(v) = self.$f { $dst.$f = v; } )* };
        }
        set!(
            generator,
            seed,
            delta_gap,
            max_occlusion,
            clearance,
            max_placement_attempts,
            n_bins,
            per_bin
        );
        set!(
            clutter,
            n_scales,
            sigma_w,
            pooling_order,
            contrast_sigma,
            orient_sigma,
            color_floor,
            orient_floor
        );
        generator.clutter = clutter;
        problems.extend(generator.problems());

        let d_reach = self.d_reach.unwrap_or(DEFAULT_D_REACH);
        if !d_reach.is_finite() || d_reach < 0.0 {
            problems.push(format!("d_reach: must be >= 0, got {d_reach}"));
        }
        if problems.is_empty() {
            Ok(Resolved {
                generator,
                binning,
                d_reach,
            })
        } else {
            Err(problems)
        }
    }
}

/// Fully specified settings, as recorded in run manifests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub generator: GeneratorConfig,
    pub binning: BinningMode,
    pub d_reach: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let flags = Settings {
            seed: Some(3),
            ..Default::default()
        };
        let file: Settings = toml::from_str("seed = 9\nsigma_w = 2.5\n").unwrap();
        let r = flags.or(file).resolve().unwrap();
        assert_eq!(r.generator.seed, 3);
        assert_eq!(r.generator.clutter.sigma_w, 2.5);
    }

    #[test]
    fn every_bad_field_is_listed() {
        let s = Settings {
            n_distractors_range: Some("x".into()),
            max_occlusion: Some(2.0),
            sigma_w: Some(-1.0),
            weights: Some("1,2".into()),
            binning: Some("quantile".into()),
            d_reach: Some(-0.1),
            ..Default::default()
        };
        let p = s.resolve().unwrap_err();
        for f in [
            "n_distractors_range",
            "max_occlusion",
            "clutter.sigma_w",
            "weights",
            "binning",
            "d_reach",
        ] {
            assert!(p.iter().any(|m| m.starts_with(f)), "{f} missing from {p:?}");
        }
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(toml::from_str::<Settings>("sede = 1\n").is_err());
    }

    #[test]
    fn weights_are_rescaled() {
        let s = Settings {
            weights: Some("2,1,1".into()),
            ..Default::default()
        };
        assert_eq!(s.resolve().unwrap().generator.clutter.weights.color, 0.5);
    }
}
