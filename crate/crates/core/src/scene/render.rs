//! Per-pixel ray casting against analytic primitives.

use super::geom::{Ray, Vec3};
use super::{CameraSpec, ObjectSpec, SceneSpec, Shape};
use crate::imgproc::{ColorSpace, Image, Plane};

/// Lower bound of the Lambert shading factor.
pub const AMBIENT: f64 = 0.3;

const T_MIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub color: Image,
    /// Distance along the pixel ray to the nearest object; `f64::INFINITY`
    /// where no object is hit (table or background).
    pub depth: Vec<f64>,
    /// Index into `object_ids` of the nearest object, per pixel.
    pub object_index: Vec<Option<u32>>,
    pub object_ids: Vec<String>,
}

impl RenderOutput {
    pub fn width(&self) -> usize {
        self.color.width()
    }

    pub fn height(&self) -> usize {
        self.color.height()
    }

    pub fn id_at(&self, x: usize, y: usize) -> Option<&str> {
        self.object_index[y * self.width() + x].map(|i| self.object_ids[i as usize].as_str())
    }

    pub fn depth_at(&self, x: usize, y: usize) -> f64 {
        self.depth[y * self.width() + x]
    }

    pub fn pixel_count(&self, id: &str) -> usize {
        match self.object_ids.iter().position(|o| o == id) {
            Some(i) => self
                .object_index
                .iter()
                .filter(|&&v| v == Some(i as u32))
                .count(),
            None => 0,
        }
    }
}

/// Object-index buffer without shading.
#[derive(Debug, Clone, PartialEq)]
pub struct IdBuffer {
    pub width: usize,
    pub height: usize,
    pub object_index: Vec<Option<u32>>,
}

impl IdBuffer {
    pub fn count(&self, index: u32) -> usize {
        self.object_index
            .iter()
            .filter(|&&v| v == Some(index))
            .count()
    }
}

struct Pinhole {
    origin: Vec3,
    forward: Vec3,
    right: Vec3,
    up: Vec3,
    tan_half: f64,
    width: usize,
    height: usize,
}

impl Pinhole {
    fn new(cam: &CameraSpec) -> Self {
        let origin = Vec3::from_array(cam.position);
        let forward = (Vec3::from_array(cam.look_at) - origin).normalized();
        let world_up = if forward.z.abs() > 0.999 {
            Vec3::new(0.0, 1.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        let right = forward.cross(world_up).normalized();
        let up = right.cross(forward);
        Pinhole {
            origin,
            forward,
            right,
            up,
            tan_half: (0.5 * cam.vertical_fov).tan(),
            width: cam.resolution[0],
            height: cam.resolution[1],
        }
    }

    fn ray(&self, px: usize, py: usize) -> Ray {
        let aspect = self.width as f64 / self.height as f64;
        let sx = (2.0 * (px as f64 + 0.5) / self.width as f64 - 1.0) * self.tan_half * aspect;
        let sy = (1.0 - 2.0 * (py as f64 + 0.5) / self.height as f64) * self.tan_half;
        Ray {
            origin: self.origin,
            dir: (self.forward + self.right * sx + self.up * sy).normalized(),
        }
    }
}

/// Nearest positive hit of `ray` with `obj`: distance and outward normal.
fn intersect(obj: &ObjectSpec, ray: &Ray) -> Option<(f64, Vec3)> {
    let center = obj.center();
    match obj.shape {
        Shape::Sphere { radius } => {
            let oc = ray.origin - center;
            let b = oc.dot(ray.dir);
            let c = oc.dot(oc) - radius * radius;
            let disc = b * b - c;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            let t = if -b - sq > T_MIN { -b - sq } else { -b + sq };
            (t > T_MIN).then(|| (t, ((ray.origin + ray.dir * t) - center) * (1.0 / radius)))
        }
        Shape::Box {
            width,
            depth,
            height,
        } => {
            let o = (ray.origin - center).rotate_z(-obj.pose.yaw);
            let d = ray.dir.rotate_z(-obj.pose.yaw);
            let half = [0.5 * width, 0.5 * depth, 0.5 * height];
            let (o, d) = ([o.x, o.y, o.z], [d.x, d.y, d.z]);
            let (mut t_near, mut t_far) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut axis_near = 0;
            let mut sign_near = 0.0;
            for a in 0..3 {
                if d[a] == 0.0 {
                    if o[a].abs() > half[a] {
                        return None;
                    }
                    continue;
                }
                let t1 = (-half[a] - o[a]) / d[a];
                let t2 = (half[a] - o[a]) / d[a];
                let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
                if lo > t_near {
                    t_near = lo;
                    axis_near = a;
                    sign_near = -d[a].signum();
                }
                t_far = t_far.min(hi);
            }
            if t_near > t_far || t_far <= T_MIN || t_near <= T_MIN {
                // Rays starting inside a box are not rendered.
                return None;
            }
            let mut n = [0.0; 3];
            n[axis_near] = sign_near;
            Some((t_near, Vec3::new(n[0], n[1], n[2]).rotate_z(obj.pose.yaw)))
        }
        Shape::Cylinder { radius, height } => {
            let o = ray.origin - center;
            let d = ray.dir;
            let hh = 0.5 * height;
            let mut best: Option<(f64, Vec3)> = None;
            let mut consider = |t: f64, n: Vec3| {
                if t > T_MIN && best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, n));
                }
            };
            let a = d.x * d.x + d.y * d.y;
            if a > 0.0 {
                let b = o.x * d.x + o.y * d.y;
                let c = o.x * o.x + o.y * o.y - radius * radius;
                let disc = b * b - a * c;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    for t in [(-b - sq) / a, (-b + sq) / a] {
                        let z = o.z + t * d.z;
                        if z.abs() <= hh {
                            let p = o + d * t;
                            consider(t, Vec3::new(p.x, p.y, 0.0) * (1.0 / radius));
                        }
                    }
                }
            }
            if d.z != 0.0 {
                for (zc, nz) in [(hh, 1.0), (-hh, -1.0)] {
                    let t = (zc - o.z) / d.z;
                    let p = o + d * t;
                    if p.x * p.x + p.y * p.y <= radius * radius {
                        consider(t, Vec3::new(0.0, 0.0, nz));
                    }
                }
            }
            best
        }
    }
}

fn nearest(objects: &[(u32, &ObjectSpec)], ray: &Ray) -> Option<(u32, f64, Vec3)> {
    let mut best: Option<(u32, f64, Vec3)> = None;
    for &(idx, obj) in objects {
        if let Some((t, n)) = intersect(obj, ray) {
            if best.is_none_or(|(_, bt, _)| t < bt) {
                best = Some((idx, t, n));
            }
        }
    }
    best
}

fn table_hit(scene: &SceneSpec, ray: &Ray) -> bool {
    if ray.dir.z >= 0.0 || ray.origin.z <= 0.0 {
        return false;
    }
    let t = -ray.origin.z / ray.dir.z;
    let p = ray.origin + ray.dir * t;
    scene.table_extent.contains_point(p.x, p.y)
}

fn shade(base: [f64; 3], normal: Vec3, light: Vec3) -> [f64; 3] {
    let lambert = normal.dot(light).max(0.0);
    let k = AMBIENT + (1.0 - AMBIENT) * lambert;
    base.map(|c| (c * k).clamp(0.0, 1.0))
}

/// Render color, depth and object ids from `cam`. Deterministic.
pub fn render(scene: &SceneSpec, cam: &CameraSpec) -> RenderOutput {
    let pin = Pinhole::new(cam);
    let (w, h) = (pin.width, pin.height);
    let light = Vec3::from_array(cam.light_dir).normalized();
    let objects: Vec<(u32, &ObjectSpec)> = scene
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| (i as u32, o))
        .collect();
    let table_normal = Vec3::new(0.0, 0.0, 1.0);

    let mut planes = [
        Vec::with_capacity(w * h),
        Vec::with_capacity(w * h),
        Vec::with_capacity(w * h),
    ];
    let mut depth = Vec::with_capacity(w * h);
    let mut object_index = Vec::with_capacity(w * h);
    for py in 0..h {
        for px in 0..w {
            let ray = pin.ray(px, py);
            let rgb = match nearest(&objects, &ray) {
                Some((idx, t, n)) => {
                    depth.push(t);
                    object_index.push(Some(idx));
                    shade(scene.objects[idx as usize].color, n, light)
                }
                None => {
                    depth.push(f64::INFINITY);
                    object_index.push(None);
                    if table_hit(scene, &ray) {
                        shade(scene.table_color, table_normal, light)
                    } else {
                        scene.background_color
                    }
                }
            };
            for (p, c) in planes.iter_mut().zip(rgb) {
                p.push(c);
            }
        }
    }
    let [r, g, b] = planes;
    let color = Image::new(
        ColorSpace::Srgb,
        vec![
            Plane::new(w, h, r).expect("sized"),
            Plane::new(w, h, g).expect("sized"),
            Plane::new(w, h, b).expect("sized"),
        ],
    )
    .expect("shaded colors lie in [0, 1]");
    RenderOutput {
        color,
        depth,
        object_index,
        object_ids: scene.objects.iter().map(|o| o.id.clone()).collect(),
    }
}

/// Object-index buffer only, optionally restricted to a subset of objects
/// (indices into `scene.objects`).
pub fn render_ids(scene: &SceneSpec, cam: &CameraSpec, only: Option<&[usize]>) -> IdBuffer {
    let pin = Pinhole::new(cam);
    let objects: Vec<(u32, &ObjectSpec)> = match only {
        Some(sel) => sel.iter().map(|&i| (i as u32, &scene.objects[i])).collect(),
        None => scene
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (i as u32, o))
            .collect(),
    };
    let mut object_index = Vec::with_capacity(pin.width * pin.height);
    for py in 0..pin.height {
        for px in 0..pin.width {
            object_index.push(nearest(&objects, &pin.ray(px, py)).map(|(i, _, _)| i));
        }
    }
    IdBuffer {
        width: pin.width,
        height: pin.height,
        object_index,
    }
}
