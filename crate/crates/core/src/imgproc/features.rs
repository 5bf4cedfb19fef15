//! Contrast and orientation feature planes.

use super::filter::{blur_plane, separable, Kernel};
use super::image::{ColorSpace, Image, Plane};
use crate::error::{Error, Result};

/// Surround-to-center sigma ratio of the difference-of-Gaussians.
pub const DOG_SURROUND_RATIO: f64 = 1.6;

fn check_sigma(name: &str, sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be > 0, got {sigma}")))
    }
}

fn scalar_plane(img: &Image) -> Result<&Plane> {
    if img.space() != ColorSpace::Scalar || img.planes().len() != 1 {
        return Err(Error::invalid("expected a single-plane scalar image"));
    }
    Ok(img.plane(0))
}

pub fn dog_contrast_plane(lum: &Plane, sigma_c: f64) -> Plane {
    let center = blur_plane(lum, sigma_c);
    let surround = blur_plane(lum, DOG_SURROUND_RATIO * sigma_c);
    center.zip_map(&surround, |c, s| (c - s).abs())
}

/// Center-surround contrast `|G(sigma_c) * L - G(1.6 sigma_c) * L|`.
pub fn dog_contrast(lum: &Image, sigma_c: f64) -> Result<Image> {
    check_sigma("contrast sigma", sigma_c)?;
    Ok(Image::scalar(dog_contrast_plane(
        scalar_plane(lum)?,
        sigma_c,
    )))
}

/// Second-derivative responses `(Lxx, Lxy, Lyy)` at scale `sigma_o`.
pub fn hessian_planes(lum: &Plane, sigma_o: f64) -> [Plane; 3] {
    let g = Kernel::gaussian(sigma_o);
    let d1 = Kernel::gaussian_d1(sigma_o);
    let d2 = Kernel::gaussian_d2(sigma_o);
    [
        separable(lum, &d2, &g),
        separable(lum, &d1, &d1),
        separable(lum, &g, &d2),
    ]
}

/// Double-angle orientation planes `(E0 - E90, E45 - E135)`.
///
/// `E_theta` is the rectified response of the second derivative of a
/// Gaussian steered to angle `theta` (0 along image rows):
/// `R_theta = cos^2 Lxx + 2 sin cos Lxy + sin^2 Lyy`.
pub fn oriented_energy_planes(lum: &Plane, sigma_o: f64) -> [Plane; 2] {
    let [lxx, lxy, lyy] = hessian_planes(lum, sigma_o);
    let n = lxx.data().len();
    let mut p0 = Vec::with_capacity(n);
    let mut p1 = Vec::with_capacity(n);
    for i in 0..n {
        let (xx, xy, yy) = (lxx.data()[i], lxy.data()[i], lyy.data()[i]);
        let half_trace = 0.5 * (xx + yy);
        p0.push(xx.abs() - yy.abs());
        p1.push((half_trace + xy).abs() - (half_trace - xy).abs());
    }
    let (w, h) = (lum.width(), lum.height());
    [
        Plane::new(w, h, p0).expect("size preserved"),
        Plane::new(w, h, p1).expect("size preserved"),
    ]
}

pub fn oriented_energy(lum: &Image, sigma_o: f64) -> Result<[Image; 2]> {
    check_sigma("orientation sigma", sigma_o)?;
    let [a, b] = oriented_energy_planes(scalar_plane(lum)?, sigma_o);
    Ok([Image::scalar(a), Image::scalar(b)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn center_weight_2d(sigma: f64) -> f64 {
        let r = (3.0 * sigma).ceil() as i64;
        let w: Vec<f64> = (-r..=r)
            .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
            .collect();
        let c = w[r as usize] / w.iter().sum::<f64>();
        c * c
    }

    #[test]
    fn constant_luminance_has_no_contrast() {
        let img = Image::scalar(Plane::filled(20, 20, 42.0));
        let out = dog_contrast(&img, 1.0).unwrap();
        assert!(out.plane(0).data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_edge_peaks_at_the_edge() {
        let img = Image::scalar(Plane::from_fn(
            40,
            10,
            |x, _| if x < 20 { 10.0 } else { 80.0 },
        ));
        let out = dog_contrast(&img, 1.0).unwrap();
        let row: Vec<f64> = (0..40).map(|x| out.plane(0).get(x, 5)).collect();
        let argmax = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        // The edge lies between columns 19 and 20; |DoG| is symmetric about
        // it and peaks within two pixels.
        assert!((18..=21).contains(&argmax), "argmax {argmax}");
        assert!((row[19 - 3] - row[20 + 3]).abs() < 1e-9);
        for x in 12..18 {
            assert!(row[x] <= row[x + 1]);
        }
        for x in 22..28 {
            assert!(row[x] >= row[x + 1]);
        }
    }

    #[test]
    fn bright_pixel_response() {
        let mut p = Plane::filled(41, 41, 0.0);
        p.set(20, 20, 7.0);
        for sigma in [1.0, 1.5, 2.0] {
            let out = dog_contrast_plane(&p, sigma);
            let want = (center_weight_2d(sigma) - center_weight_2d(1.6 * sigma)) * 7.0;
            assert!((out.get(20, 20) - want).abs() < 1e-6, "sigma {sigma}");
        }
    }

    #[test]
    fn constant_image_has_no_orientation() {
        let [a, b] = oriented_energy_planes(&Plane::filled(16, 16, 55.0), 1.0);
        assert!(a.data().iter().chain(b.data()).all(|&v| v == 0.0));
    }

    #[test]
    fn stripe_orientations() {
        let period = 6.0;
        let wave = |t: f64| 50.0 + 30.0 * (2.0 * std::f64::consts::PI * t / period).sin();
        let vertical = Plane::from_fn(32, 32, |x, _| wave(x as f64));
        let horizontal = Plane::from_fn(32, 32, |_, y| wave(y as f64));
        let [v0, v1] = oriented_energy_planes(&vertical, 1.0);
        let [h0, h1] = oriented_energy_planes(&horizontal, 1.0);
        for (x, y) in [(10, 10), (15, 16), (20, 12)] {
            if v0.get(x, y).abs() < 1.0 {
                // zero crossing of the wave
                continue;
            }
            assert!(v0.get(x, y) > 0.0);
            assert!(v0.get(x, y).abs() > 100.0 * v1.get(x, y).abs().max(1e-12));
            assert!((h0.get(y, x) + v0.get(x, y)).abs() < 1e-9);
            assert!(h1.get(y, x).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_sigma() {
        let img = Image::scalar(Plane::filled(8, 8, 1.0));
        assert!(dog_contrast(&img, 0.0).is_err());
        assert!(oriented_energy(&img, -1.0).is_err());
    }
}
