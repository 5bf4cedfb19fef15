//! Gaussian pyramids and the matching upsampler.
//!
//! Decimation halves each axis to `ceil(n / 2)` samples. Odd-length axes keep
//! the even-indexed samples; even-length axes take the midpoint of each sample
//! pair. Both choices place the retained grid symmetrically about the axis
//! center, so a mirrored input produces a mirrored pyramid.

use super::filter::blur_plane;
use super::image::{Image, Plane, MIN_CLUTTER_SIZE};
use crate::error::{Error, Result};

/// Blur applied before every 2x decimation.
pub const PYRAMID_SIGMA: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct Pyramid {
    pub levels: Vec<Image>,
}

impl Pyramid {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

fn half(n: usize) -> usize {
    n.div_ceil(2)
}

fn decimate_rows(src: &Plane) -> Plane {
    let (w, h) = (src.width(), src.height());
    let nw = half(w);
    Plane::from_fn(nw, h, |x, y| {
        if w % 2 == 1 {
            src.get(2 * x, y)
        } else {
            0.5 * (src.get(2 * x, y) + src.get(2 * x + 1, y))
        }
    })
}

fn decimate_cols(src: &Plane) -> Plane {
    let (w, h) = (src.width(), src.height());
    let nh = half(h);
    Plane::from_fn(w, nh, |x, y| {
        if h % 2 == 1 {
            src.get(x, 2 * y)
        } else {
            0.5 * (src.get(x, 2 * y) + src.get(x, 2 * y + 1))
        }
    })
}

/// 2x decimation without pre-filtering.
pub fn decimate(src: &Plane) -> Plane {
    decimate_cols(&decimate_rows(src))
}

/// Inverse of one decimation step onto a `w x h` grid.
///
/// Even-length targets copy each coarse sample into its pair; odd-length
/// targets copy onto even indices and average the two neighbours at odd ones.
pub fn upsample_step(src: &Plane, w: usize, h: usize) -> Plane {
    debug_assert_eq!(src.width(), half(w));
    debug_assert_eq!(src.height(), half(h));
    let rows = Plane::from_fn(w, src.height(), |x, y| {
        if w.is_multiple_of(2) || x.is_multiple_of(2) {
            src.get(x / 2, y)
        } else {
            0.5 * (src.get(x / 2, y) + src.get(x / 2 + 1, y))
        }
    });
    Plane::from_fn(w, h, |x, y| {
        if h.is_multiple_of(2) || y.is_multiple_of(2) {
            rows.get(x, y / 2)
        } else {
            0.5 * (rows.get(x, y / 2) + rows.get(x, y / 2 + 1))
        }
    })
}

/// Bring a plane from pyramid level `level` back to the `w x h` source grid.
pub fn upsample_to_source(src: &Plane, level: usize, w: usize, h: usize) -> Plane {
    let mut dims = vec![(w, h)];
    for _ in 0..level {
        let (lw, lh) = *dims.last().unwrap();
        dims.push((half(lw), half(lh)));
    }
    debug_assert_eq!((src.width(), src.height()), dims[level]);
    let mut cur = src.clone();
    for k in (0..level).rev() {
        let (lw, lh) = dims[k];
        cur = upsample_step(&cur, lw, lh);
    }
    cur
}

/// Build up to `n_levels` levels; stops early once a level would fall below
/// 8x8. Level 0 is the input itself.
pub fn build_pyramid(img: &Image, n_levels: usize) -> Result<Pyramid> {
    if n_levels == 0 {
        return Err(Error::invalid("pyramid needs at least one level"));
    }
    let mut levels = vec![img.clone()];
    while levels.len() < n_levels {
        let prev = levels.last().unwrap();
        let (nw, nh) = (half(prev.width()), half(prev.height()));
        if nw < MIN_CLUTTER_SIZE || nh < MIN_CLUTTER_SIZE {
            break;
        }
        let next = prev.map_planes(|p| decimate(&blur_plane(p, PYRAMID_SIGMA)));
        levels.push(next);
    }
    Ok(Pyramid { levels })
}
