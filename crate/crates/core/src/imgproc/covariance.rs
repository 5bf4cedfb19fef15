//! Gaussian-weighted local covariance of 1 to 3 feature planes.

use super::filter::blur_plane;
use super::image::Plane;
use crate::error::{Error, Result};

/// Per-pixel symmetric `dim x dim` covariance, stored as one plane per
/// upper-triangular entry in row-major order: `(0,0), (0,1), .., (d-1,d-1)`.
#[derive(Debug, Clone)]
pub struct CovarianceMap {
    width: usize,
    height: usize,
    dim: usize,
    entries: Vec<Plane>,
}

fn tri_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl CovarianceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Plane holding entry `(i, j)` (symmetric, so `(j, i)` is the same plane).
    pub fn entry(&self, i: usize, j: usize) -> &Plane {
        &self.entries[tri_index(self.dim, i, j)]
    }

    /// Full matrix at one pixel, padded with zeros beyond `dim`.
    pub fn matrix(&self, x: usize, y: usize) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(self.dim) {
            for (j, v) in row.iter_mut().enumerate().take(self.dim) {
                *v = self.entry(i, j).get(x, y);
            }
        }
        m
    }

    pub fn eigenvalues(&self, x: usize, y: usize) -> Vec<f64> {
        let m = self.matrix(x, y);
        match self.dim {
            1 => vec![m[0][0]],
            2 => sym2_eigenvalues(m[0][0], m[0][1], m[1][1]).to_vec(),
            _ => sym3_eigenvalues(&m).to_vec(),
        }
    }

    /// Determinant after clamping negative eigenvalues at zero.
    pub fn psd_determinant(&self, x: usize, y: usize) -> f64 {
        self.eigenvalues(x, y)
            .into_iter()
            .map(|l| l.max(0.0))
            .product()
    }
}

/// Eigenvalues of `[[a, b], [b, c]]`, descending.
pub fn sym2_eigenvalues(a: f64, b: f64, c: f64) -> [f64; 2] {
    let mid = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    [mid + rad, mid - rad]
}

/// Eigenvalues of a symmetric 3x3 matrix, descending (trigonometric method).
pub fn sym3_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    if p1 == 0.0 {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize, j: usize| (m[i][j] - if i == j { q } else { 0.0 }) / p;
    let det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
        - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [e1, 3.0 * q - e1 - e3, e3]
}

/// `Sigma = G * (x x^T) - (G * x)(G * x)^T` with `G` a Gaussian of `sigma_w`.
///
/// Each feature is shifted by its global mean first; the result is
/// mathematically unchanged and large offsets do not cancel catastrophically.
pub fn local_covariance(features: &[&Plane], sigma_w: f64) -> Result<CovarianceMap> {
    let dim = features.len();
    if !(1..=3).contains(&dim) {
        return Err(Error::invalid(format!(
            "local_covariance takes 1 to 3 feature planes, got {dim}"
        )));
    }
    if !sigma_w.is_finite() || sigma_w <= 0.0 {
        return Err(Error::invalid(format!(
            "window sigma must be > 0, got {sigma_w}"
        )));
    }
    let (w, h) = (features[0].width(), features[0].height());
    if features.iter().any(|f| f.width() != w || f.height() != h) {
        return Err(Error::invalid("feature planes differ in size"));
    }

    let centered: Vec<Plane> = features
        .iter()
        .map(|f| {
            let m = f.mean();
            f.map(|v| v - m)
        })
        .collect();
    let means: Vec<Plane> = centered.iter().map(|f| blur_plane(f, sigma_w)).collect();

    let mut entries = Vec::with_capacity(dim * (dim + 1) / 2);
    for i in 0..dim {
        for j in i..dim {
            let prod = centered[i].zip_map(&centered[j], |a, b| a * b);
            let second = blur_plane(&prod, sigma_w);
            let mi = means[i].data();
            let mj = means[j].data();
            let data = second
                .data()
                .iter()
                .zip(mi.iter().zip(mj))
                .map(|(s, (a, b))| {
                    let v = s - a * b;
                    // Diagonal entries are variances; rounding must not push
                    // them below zero.
                    if i == j {
                        v.max(0.0)
                    } else {
                        v
                    }
                })
                .collect();
            entries.push(Plane::new(w, h, data)?);
        }
    }
    Ok(CovarianceMap {
        width: w,
        height: h,
        dim,
        entries,
    })
}
