//! Separable correlation with reflect-101 borders and sampled Gaussian kernels.

use super::image::{Image, Plane};
use crate::error::{Error, Result};

/// A 1-D correlation kernel of odd length `2 * radius + 1`.
///
/// `dc_gain` is the kernel's nominal response to a constant signal (1 for
/// smoothing kernels, 0 for derivative kernels). Filtering accumulates
/// `dc_gain * x[i] + sum_k w[k] * (x[i + k] - x[i])`, which equals the plain
/// weighted sum whenever the weights sum to `dc_gain`, but reproduces
/// constant signals bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    weights: Vec<f64>,
    dc_gain: f64,
}

impl Kernel {
    pub fn radius(&self) -> usize {
        self.weights.len() / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight applied to the sample at signed offset `k` from the center.
    pub fn at(&self, k: isize) -> f64 {
        self.weights[(k + self.radius() as isize) as usize]
    }

    pub fn identity() -> Self {
        Kernel {
            weights: vec![1.0],
            dc_gain: 1.0,
        }
    }

    /// Normalized sampled Gaussian truncated at `ceil(3 sigma)`.
    pub fn gaussian(sigma: f64) -> Self {
        if sigma <= 0.0 {
            return Kernel::identity();
        }
        let raw = raw_gaussian(sigma);
        let sum: f64 = raw.iter().sum();
        Kernel {
            weights: raw.iter().map(|w| w / sum).collect(),
            dc_gain: 1.0,
        }
    }

    /// First derivative of the normalized Gaussian, as correlation weights
    /// (a unit ramp yields a unit response).
    pub fn gaussian_d1(sigma: f64) -> Self {
        let raw = raw_gaussian(sigma);
        let sum: f64 = raw.iter().sum();
        let r = (raw.len() / 2) as f64;
        let s2 = sigma * sigma;
        Kernel {
            weights: raw
                .iter()
                .enumerate()
                .map(|(i, g)| (i as f64 - r) / s2 * g / sum)
                .collect(),
            dc_gain: 0.0,
        }
    }

    /// Second derivative of the normalized Gaussian, re-centered to zero sum.
    pub fn gaussian_d2(sigma: f64) -> Self {
        let raw = raw_gaussian(sigma);
        let sum: f64 = raw.iter().sum();
        let r = (raw.len() / 2) as f64;
        let s2 = sigma * sigma;
        let mut w: Vec<f64> = raw
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let k = i as f64 - r;
                (k * k / (s2 * s2) - 1.0 / s2) * g / sum
            })
            .collect();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        w.iter_mut().for_each(|v| *v -= mean);
        Kernel {
            weights: w,
            dc_gain: 0.0,
        }
    }
}

fn raw_gaussian(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    (-radius..=radius)
        .map(|k| (-((k * k) as f64) / denom).exp())
        .collect()
}

/// Reflect-101 index mapping (`-1 -> 1`, `n -> n - 2`), valid for any offset.
#[inline]
pub fn reflect101(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

fn correlate_rows(src: &Plane, k: &Kernel) -> Plane {
    let (w, h) = (src.width(), src.height());
    let r = k.radius();
    if r == 0 && k.dc_gain == 1.0 && k.weights[0] == 1.0 {
        return src.clone();
    }
    let mut out = Vec::with_capacity(w * h);
    let mut padded = vec![0.0; w + 2 * r];
    for y in 0..h {
        let row = &src.data()[y * w..(y + 1) * w];
        for (j, slot) in padded.iter_mut().enumerate() {
            *slot = row[reflect101(j as isize - r as isize, w)];
        }
        for x in 0..w {
            let c = padded[x + r];
            let acc: f64 = k
                .weights
                .iter()
                .zip(&padded[x..x + 2 * r + 1])
                .map(|(wk, v)| wk * (v - c))
                .sum();
            out.push(k.dc_gain * c + acc);
        }
    }
    Plane::new(w, h, out).expect("size preserved")
}

fn correlate_cols(src: &Plane, k: &Kernel) -> Plane {
    let (w, h) = (src.width(), src.height());
    let r = k.radius() as isize;
    if r == 0 && k.dc_gain == 1.0 && k.weights[0] == 1.0 {
        return src.clone();
    }
    let data = src.data();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let center = &data[y * w..(y + 1) * w];
        let dst = &mut out[y * w..(y + 1) * w];
        for (i, wk) in k.weights.iter().enumerate() {
            let yy = reflect101(y as isize + i as isize - r, h);
            let row = &data[yy * w..(yy + 1) * w];
            for ((d, v), c) in dst.iter_mut().zip(row).zip(center) {
                *d += wk * (v - c);
            }
        }
        for (d, c) in dst.iter_mut().zip(center) {
            *d += k.dc_gain * c;
        }
    }
    Plane::new(w, h, out).expect("size preserved")
}

/// Correlate with `kx` along rows, then `ky` along columns.
pub fn separable(src: &Plane, kx: &Kernel, ky: &Kernel) -> Plane {
    correlate_cols(&correlate_rows(src, kx), ky)
}

pub fn blur_plane(src: &Plane, sigma: f64) -> Plane {
    if sigma == 0.0 {
        return src.clone();
    }
    let k = Kernel::gaussian(sigma);
    separable(src, &k, &k)
}

/// Separable Gaussian smoothing of every plane. `sigma == 0` is the identity.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Result<Image> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::invalid(format!(
            "blur sigma must be >= 0, got {sigma}"
        )));
    }
    Ok(img.map_planes(|p| blur_plane(p, sigma)))
}
