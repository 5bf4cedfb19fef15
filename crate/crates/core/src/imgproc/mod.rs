//! Deterministic low-level image operations: color conversion, smoothing,
//! pyramids, contrast/orientation features and Gaussian-weighted local
//! statistics. Everything here is a pure function of its inputs.

mod color;
mod covariance;
mod features;
mod filter;
mod image;
pub mod io;
mod pyramid;

pub use color::{srgb_pixel_to_lab, srgb_to_cielab, srgb_to_linear};
pub use covariance::{local_covariance, sym2_eigenvalues, sym3_eigenvalues, CovarianceMap};
pub use features::{
    dog_contrast, dog_contrast_plane, hessian_planes, oriented_energy, oriented_energy_planes,
    DOG_SURROUND_RATIO,
};
pub use filter::{blur_plane, gaussian_blur, reflect101, separable, Kernel};
pub use image::{ColorSpace, Image, Plane, MIN_CLUTTER_SIZE};
pub use pyramid::{
    build_pyramid, decimate, upsample_step, upsample_to_source, Pyramid, PYRAMID_SIGMA,
};
