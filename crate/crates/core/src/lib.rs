//! Cluttered tabletop benchmarks for manipulation policies.
//!
//! - [`clutter`] scores images with feature congestion and combines two
//!   camera views into DvFC.
//! - [`scene`] describes tabletop scenes and renders them, and checks
//!   occlusion, spacing and grasp clearance.
//! - [`scenario`] adds random distractors to base scenes, filters and scores
//!   the result, and samples across DvFC bins.
//! - [`evalcore`] stages episode logs and aggregates metrics, curves and
//!   cross-policy agreement.
//!
//! ```
//! use clutterbench::clutter::{feature_congestion, ClutterConfig};
//! use clutterbench::imgproc::Image;
//!
//! let img = Image::solid_srgb(32, 32, [0.2, 0.4, 0.6]).unwrap();
//! let score = feature_congestion(&img, &ClutterConfig::default()).unwrap();
//! assert_eq!(score.total, 0.0);
//! ```

pub mod clutter;
pub mod error;
pub mod evalcore;
pub mod imgproc;
pub mod rng;
pub mod scenario;
pub mod scene;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/clutter.md")]
    mod clutter {}
    #[doc = include_str!("../../../book/src/scenes.md")]
    mod scenes {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
