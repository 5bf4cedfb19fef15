use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum width and height accepted by the clutter pipeline.
pub const MIN_CLUTTER_SIZE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorSpace {
    Srgb,
    LinearRgb,
    Cielab,
    Scalar,
}

/// A single row-major plane of `f64` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "plane of {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Plane {
        debug_assert_eq!((self.width, self.height), (other.width, other.height));
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn flip_horizontal(&self) -> Plane {
        Plane::from_fn(self.width, self.height, |x, y| {
            self.get(self.width - 1 - x, y)
        })
    }

    pub fn flip_vertical(&self) -> Plane {
        Plane::from_fn(self.width, self.height, |x, y| {
            self.get(x, self.height - 1 - y)
        })
    }
}

/// Planar floating-point raster tagged with its color space.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    space: ColorSpace,
    planes: Vec<Plane>,
}

impl Image {
    pub fn new(space: ColorSpace, planes: Vec<Plane>) -> Result<Self> {
        let first = planes
            .first()
            .ok_or_else(|| Error::invalid("image needs at least one plane"))?;
        let (width, height) = (first.width, first.height);
        if planes
            .iter()
            .any(|p| p.width != width || p.height != height)
        {
            return Err(Error::invalid("image planes differ in size"));
        }
        let expected = match space {
            ColorSpace::Srgb | ColorSpace::LinearRgb | ColorSpace::Cielab => Some(3),
            ColorSpace::Scalar => None,
        };
        if let Some(n) = expected {
            if planes.len() != n {
                return Err(Error::invalid(format!(
                    "{space:?} image needs {n} planes, got {}",
                    planes.len()
                )));
            }
        }
        match space {
            ColorSpace::Srgb => {
                if planes
                    .iter()
                    .flat_map(|p| p.data.iter())
                    .any(|v| !(0.0..=1.0).contains(v))
                {
                    return Err(Error::invalid("sRGB samples must lie in [0, 1]"));
                }
            }
            ColorSpace::Cielab if planes[0].data.iter().any(|v| !(0.0..=100.0).contains(v)) => {
                return Err(Error::invalid("L* must lie in [0, 100]"));
            }
            _ => {}
        }
        Ok(Image {
            width,
            height,
            space,
            planes,
        })
    }

    pub fn scalar(plane: Plane) -> Self {
        Image {
            width: plane.width,
            height: plane.height,
            space: ColorSpace::Scalar,
            planes: vec![plane],
        }
    }

    /// sRGB image with every pixel set to `rgb`.
    pub fn solid_srgb(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        Image::new(
            ColorSpace::Srgb,
            rgb.iter()
                .map(|&c| Plane::filled(width, height, c))
                .collect(),
        )
    }

    /// Build an sRGB image from a per-pixel closure.
    pub fn srgb_from_fn(
        width: usize,
        height: usize,
        f: impl Fn(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let planes = (0..3)
            .map(|c| Plane::from_fn(width, height, |x, y| f(x, y)[c]))
            .collect();
        Image::new(ColorSpace::Srgb, planes)
    }

    pub(crate) fn from_parts_unchecked(space: ColorSpace, planes: Vec<Plane>) -> Self {
        let (width, height) = (planes[0].width, planes[0].height);
        Image {
            width,
            height,
            space,
            planes,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn plane(&self, i: usize) -> &Plane {
        &self.planes[i]
    }

    pub fn into_planes(self) -> Vec<Plane> {
        self.planes
    }

    pub fn pixel(&self, x: usize, y: usize) -> Vec<f64> {
        self.planes.iter().map(|p| p.get(x, y)).collect()
    }

    pub fn is_spatially_constant(&self, tol: f64) -> bool {
        self.planes.iter().all(|p| {
            let v0 = p.data[0];
            p.data.iter().all(|v| (v - v0).abs() <= tol)
        })
    }

    /// Apply `f` to every plane. `f` must return equally sized planes.
    pub fn map_planes(&self, f: impl Fn(&Plane) -> Plane) -> Image {
        let planes: Vec<Plane> = self.planes.iter().map(f).collect();
        Image::from_parts_unchecked(self.space, planes)
    }

    pub fn flip_horizontal(&self) -> Image {
        self.map_planes(Plane::flip_horizontal)
    }

    pub fn flip_vertical(&self) -> Image {
        self.map_planes(Plane::flip_vertical)
    }

    /// Rejects images too small for clutter statistics.
    pub fn require_clutter_size(&self) -> Result<()> {
        if self.width < MIN_CLUTTER_SIZE || self.height < MIN_CLUTTER_SIZE {
            return Err(Error::invalid(format!(
                "image is {}x{}, clutter needs at least {MIN_CLUTTER_SIZE}x{MIN_CLUTTER_SIZE}",
                self.width, self.height
            )));
        }
        Ok(())
    }
}
