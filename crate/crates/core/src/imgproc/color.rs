//! sRGB to CIE L*a*b* conversion (D65 reference white).

use super::image::{ColorSpace, Image, Plane};
use crate::error::{Error, Result};

// Linear sRGB -> XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

// The reference white is the image of linear (1, 1, 1) under the matrix, so
// sRGB white lands on L* = 100, a* = b* = 0 without rounding residue.
const WHITE: [f64; 3] = [
    RGB_TO_XYZ[0][0] + RGB_TO_XYZ[0][1] + RGB_TO_XYZ[0][2],
    RGB_TO_XYZ[1][0] + RGB_TO_XYZ[1][1] + RGB_TO_XYZ[1][2],
    RGB_TO_XYZ[2][0] + RGB_TO_XYZ[2][1] + RGB_TO_XYZ[2][2],
];

const EPS: f64 = 216.0 / 24389.0; // (6/29)^3
const KAPPA: f64 = 24389.0 / 27.0;

#[inline]
pub fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > EPS {
        t.cbrt()
    } else {
        // t / (3 (6/29)^2) + 4/29
        t * (841.0 / 108.0) + 4.0 / 29.0
    }
}

/// Convert one sRGB triple (components in `[0, 1]`) to `[L*, a*, b*]`.
pub fn srgb_pixel_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let lin = rgb.map(srgb_to_linear);
    let xyz: [f64; 3] = std::array::from_fn(|i| {
        RGB_TO_XYZ[i][0] * lin[0] + RGB_TO_XYZ[i][1] * lin[1] + RGB_TO_XYZ[i][2] * lin[2]
    });
    let ratio: [f64; 3] = std::array::from_fn(|i| xyz[i] / WHITE[i]);
    let [fx, fy, fz] = ratio.map(lab_f);
    // Linear segment uses L* = kappa * Y directly so black is exactly 0.
    let l = if ratio[1] > EPS {
        116.0 * fy - 16.0
    } else {
        KAPPA * ratio[1]
    }
    .clamp(0.0, 100.0);
    [l, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Per-pixel sRGB to CIELAB conversion.
pub fn srgb_to_cielab(img: &Image) -> Result<Image> {
    if img.space() != ColorSpace::Srgb || img.planes().len() != 3 {
        return Err(Error::invalid(format!(
            "srgb_to_cielab expects a 3-plane sRGB image, got {:?} with {} planes",
            img.space(),
            img.planes().len()
        )));
    }
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let (r, g, b) = (
        img.plane(0).data(),
        img.plane(1).data(),
        img.plane(2).data(),
    );
    let mut l = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut bb = Vec::with_capacity(n);
    for i in 0..n {
        let [pl, pa, pb] = srgb_pixel_to_lab([r[i], g[i], b[i]]);
        l.push(pl);
        a.push(pa);
        bb.push(pb);
    }
    Ok(Image::from_parts_unchecked(
        ColorSpace::Cielab,
        vec![
            Plane::new(w, h, l)?,
            Plane::new(w, h, a)?,
            Plane::new(w, h, bb)?,
        ],
    ))
}
