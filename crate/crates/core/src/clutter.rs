//! Feature-congestion clutter of a single view and its dual-view combination.
//!
//! Per pyramid level of the CIELAB image, three local-variability maps are
//! computed over a Gaussian window:
//!
//! * color: spread of the `(a*, b*)` covariance ellipse,
//! * contrast: local standard deviation of the center-surround response of `L*`,
//! * orientation: spread of the double-angle orientation covariance.
//!
//! The two ellipse spreads are `((l1 + f)(l2 + f))^(1/4) - sqrt(f)` over the
//! clamped eigenvalues, where `f` is a per-feature noise floor. With `f = 0`
//! this is `det^(1/4)`; a positive floor keeps two-color neighbourhoods (whose
//! covariance is rank one) from scoring zero, while still scoring exactly
//! zero where nothing varies. All three maps are in standard-deviation units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgproc::{
    build_pyramid, dog_contrast_plane, local_covariance, oriented_energy_planes, srgb_to_cielab,
    sym2_eigenvalues, upsample_to_source, ColorSpace, CovarianceMap, Image, Plane,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalePooling {
    Max,
    Mean,
}

impl std::str::FromStr for ScalePooling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(ScalePooling::Max),
            "mean" => Ok(ScalePooling::Mean),
            other => Err(format!("unknown scale pooling {other:?} (max|mean)")),
        }
    }
}

/// Relative weight of each feature in the combined clutter map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights {
    pub color: f64,
    pub contrast: f64,
    pub orient: f64,
}

impl FeatureWeights {
    pub const EQUAL: FeatureWeights = FeatureWeights {
        color: 1.0 / 3.0,
        contrast: 1.0 / 3.0,
        orient: 1.0 / 3.0,
    };

    /// Scale arbitrary nonnegative weights to sum to one.
    pub fn normalized(color: f64, contrast: f64, orient: f64) -> Result<Self> {
        let sum = color + contrast + orient;
        if sum.is_nan() || sum <= 0.0 || color < 0.0 || contrast < 0.0 || orient < 0.0 {
            return Err(Error::invalid(
                "weights must be nonnegative with a positive sum",
            ));
        }
        Ok(FeatureWeights {
            color: color / sum,
            contrast: contrast / sum,
            orient: orient / sum,
        })
    }

    pub fn sum(&self) -> f64 {
        self.color + self.contrast + self.orient
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClutterConfig {
    pub n_scales: usize,
    /// Local-statistics window sigma, in pixels of each level.
    pub sigma_w: f64,
    pub weights: FeatureWeights,
    /// Order of the spatial Minkowski mean (1 = arithmetic mean).
    pub pooling_order: f64,
    pub scale_pooling: ScalePooling,
    /// Center sigma of the contrast difference-of-Gaussians.
    pub contrast_sigma: f64,
    /// Scale of the oriented second-derivative filters.
    pub orient_sigma: f64,
    /// Noise floor added to the `(a*, b*)` covariance eigenvalues.
    pub color_floor: f64,
    /// Noise floor added to the orientation covariance eigenvalues.
    pub orient_floor: f64,
}

impl Default for ClutterConfig {
    fn default() -> Self {
        ClutterConfig {
            n_scales: 3,
            sigma_w: 4.0,
            weights: FeatureWeights::EQUAL,
            pooling_order: 1.0,
            scale_pooling: ScalePooling::Max,
            contrast_sigma: 1.0,
            orient_sigma: 1.0,
            color_floor: 1.0,
            orient_floor: 1.0,
        }
    }
}

impl ClutterConfig {
    /// Every violated constraint, one message per field.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_scales < 1 {
            out.push("n_scales: must be >= 1".to_string());
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.sigma_w) {
            out.push(format!("sigma_w: must be > 0, got {}", self.sigma_w));
        }
        if !positive(self.contrast_sigma) {
            out.push(format!(
                "contrast_sigma: must be > 0, got {}",
                self.contrast_sigma
            ));
        }
        if !positive(self.orient_sigma) {
            out.push(format!(
                "orient_sigma: must be > 0, got {}",
                self.orient_sigma
            ));
        }
        let w = self.weights;
        if w.color < 0.0 || w.contrast < 0.0 || w.orient < 0.0 {
            out.push("weights: must be nonnegative".to_string());
        }
        if (w.sum() - 1.0).abs() > 1e-9 {
            out.push(format!("weights: must sum to 1, got {}", w.sum()));
        }
        if !self.pooling_order.is_finite() || self.pooling_order < 1.0 {
            out.push(format!(
                "pooling_order: must be >= 1, got {}",
                self.pooling_order
            ));
        }
        if !self.color_floor.is_finite() || self.color_floor < 0.0 {
            out.push(format!(
                "color_floor: must be >= 0, got {}",
                self.color_floor
            ));
        }
        if !self.orient_floor.is_finite() || self.orient_floor < 0.0 {
            out.push(format!(
                "orient_floor: must be >= 0, got {}",
                self.orient_floor
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(problems.join("; ")))
        }
    }
}

/// Per-scale feature maps, each upsampled to source resolution.
#[derive(Debug, Clone)]
pub struct FeatureMaps {
    pub color: Vec<Plane>,
    pub contrast: Vec<Plane>,
    pub orient: Vec<Plane>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureTotals {
    pub color: f64,
    pub contrast: f64,
    pub orient: f64,
}

#[derive(Debug, Clone)]
pub struct ClutterScore {
    pub total: f64,
    pub per_feature: FeatureTotals,
    pub clutter_map: Image,
}

#[derive(Debug, Clone)]
pub struct DvfcScore {
    pub value: f64,
    pub robot_view: ClutterScore,
    pub top_view: ClutterScore,
}

/// `((l1 + f)(l2 + f))^(1/4) - sqrt(f)` over clamped eigenvalues.
pub fn ellipse_spread(l1: f64, l2: f64, floor: f64) -> f64 {
    let (l1, l2) = (l1.max(0.0), l2.max(0.0));
    if l1 == 0.0 && l2 == 0.0 {
        return 0.0;
    }
    (((l1 + floor) * (l2 + floor)).sqrt().sqrt() - floor.sqrt()).max(0.0)
}

fn spread_map(cov: &CovarianceMap, floor: f64) -> Plane {
    let (a, b, c) = (cov.entry(0, 0), cov.entry(0, 1), cov.entry(1, 1));
    let data = a
        .data()
        .iter()
        .zip(b.data())
        .zip(c.data())
        .map(|((&a, &b), &c)| {
            let [l1, l2] = sym2_eigenvalues(a, b, c);
            ellipse_spread(l1, l2, floor)
        })
        .collect();
    Plane::new(cov.width(), cov.height(), data).expect("size preserved")
}

fn check_view(img: &Image) -> Result<()> {
    if img.space() != ColorSpace::Srgb {
        return Err(Error::invalid(format!(
            "clutter expects an sRGB view, got {:?}",
            img.space()
        )));
    }
    img.require_clutter_size()
}

/// Color, contrast and orientation maps for every pyramid level.
pub fn feature_clutter_maps(img: &Image, cfg: &ClutterConfig) -> Result<FeatureMaps> {
    cfg.validate()?;
    check_view(img)?;
    let (w, h) = (img.width(), img.height());
    let lab = srgb_to_cielab(img)?;
    let pyramid = build_pyramid(&lab, cfg.n_scales)?;

    let mut maps = FeatureMaps {
        color: Vec::new(),
        contrast: Vec::new(),
        orient: Vec::new(),
    };
    for (k, level) in pyramid.levels.iter().enumerate() {
        let (l, a, b) = (level.plane(0), level.plane(1), level.plane(2));

        let color_cov = local_covariance(&[a, b], cfg.sigma_w)?;
        let color = spread_map(&color_cov, cfg.color_floor);

        let dog = dog_contrast_plane(l, cfg.contrast_sigma);
        let contrast_cov = local_covariance(&[&dog], cfg.sigma_w)?;
        let contrast = contrast_cov.entry(0, 0).map(|v| v.max(0.0).sqrt());

        let [o0, o1] = oriented_energy_planes(l, cfg.orient_sigma);
        let orient_cov = local_covariance(&[&o0, &o1], cfg.sigma_w)?;
        let orient = spread_map(&orient_cov, cfg.orient_floor);

        maps.color.push(upsample_to_source(&color, k, w, h));
        maps.contrast.push(upsample_to_source(&contrast, k, w, h));
        maps.orient.push(upsample_to_source(&orient, k, w, h));
    }
    Ok(maps)
}

fn pool_scales(maps: &[Plane], pooling: ScalePooling) -> Plane {
    let mut out = maps[0].clone();
    for m in &maps[1..] {
        out = match pooling {
            ScalePooling::Max => out.zip_map(m, f64::max),
            ScalePooling::Mean => out.zip_map(m, |a, b| a + b),
        };
    }
    if pooling == ScalePooling::Mean {
        let n = maps.len() as f64;
        out = out.map(|v| v / n);
    }
    out
}

/// `((1/N) sum m^p)^(1/p)` over all samples.
pub fn minkowski_mean(plane: &Plane, p: f64) -> f64 {
    let n = plane.data().len() as f64;
    if p == 1.0 {
        return plane.data().iter().sum::<f64>() / n;
    }
    let s: f64 = plane.data().iter().map(|v| v.max(0.0).powf(p)).sum();
    (s / n).powf(1.0 / p)
}

/// Pool per-scale maps and combine them into a [`ClutterScore`].
pub fn combine_feature_maps(maps: &FeatureMaps, cfg: &ClutterConfig) -> Result<ClutterScore> {
    cfg.validate()?;
    if maps.color.is_empty() || maps.contrast.is_empty() || maps.orient.is_empty() {
        return Err(Error::invalid("feature maps need at least one scale"));
    }
    let color = pool_scales(&maps.color, cfg.scale_pooling);
    let contrast = pool_scales(&maps.contrast, cfg.scale_pooling);
    let orient = pool_scales(&maps.orient, cfg.scale_pooling);
    let wts = cfg.weights;
    let data = color
        .data()
        .iter()
        .zip(contrast.data())
        .zip(orient.data())
        .map(|((c, k), o)| wts.color * c + wts.contrast * k + wts.orient * o)
        .collect();
    let map = Plane::new(color.width(), color.height(), data)?;
    let p = cfg.pooling_order;
    Ok(ClutterScore {
        total: minkowski_mean(&map, p),
        per_feature: FeatureTotals {
            color: minkowski_mean(&color, p),
            contrast: minkowski_mean(&contrast, p),
            orient: minkowski_mean(&orient, p),
        },
        clutter_map: Image::scalar(map),
    })
}

/// Single-view feature congestion.
pub fn feature_congestion(img: &Image, cfg: &ClutterConfig) -> Result<ClutterScore> {
    let maps = feature_clutter_maps(img, cfg)?;
    combine_feature_maps(&maps, cfg)
}

/// Dual-view score: arithmetic mean of the robot-view and top-view totals.
pub fn dvfc(robot_img: &Image, top_img: &Image, cfg: &ClutterConfig) -> Result<DvfcScore> {
    let robot_view = feature_congestion(robot_img, cfg)?;
    let top_view = feature_congestion(top_img, cfg)?;
    Ok(combine_views(robot_view, top_view))
}

pub fn combine_views(robot_view: ClutterScore, top_view: ClutterScore) -> DvfcScore {
    DvfcScore {
        value: 0.5 * (robot_view.total + top_view.total),
        robot_view,
        top_view,
    }
}
