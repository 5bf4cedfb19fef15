//! Analytic tabletop scenes: primitive objects on a rectangular table, two
//! pinhole cameras, a ray-casting renderer and the geometric predicates used
//! by scenario generation.
//!
//! World frame: `z` up, table top at `z = 0`, meters and radians.

mod geom;
mod predicates;
mod render;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use geom::{Ray, Vec3};
pub use predicates::{footprint_gap, has_grasp_affordance, occlusion_ratio, DEFAULT_CLEARANCE};
pub use render::{render, render_ids, IdBuffer, RenderOutput, AMBIENT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Box { width: f64, depth: f64, height: f64 },
    Cylinder { radius: f64, height: f64 },
    Sphere { radius: f64 },
}

impl Shape {
    pub fn height(&self) -> f64 {
        match *self {
            Shape::Box { height, .. } | Shape::Cylinder { height, .. } => height,
            Shape::Sphere { radius } => 2.0 * radius,
        }
    }

    /// Radius of the smallest circle around the footprint, centered on the pose.
    pub fn bounding_radius(&self) -> f64 {
        match *self {
            Shape::Box { width, depth, .. } => 0.5 * width.hypot(depth),
            Shape::Cylinder { radius, .. } | Shape::Sphere { radius } => radius,
        }
    }

    fn dims_positive(&self) -> bool {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        match *self {
            Shape::Box {
                width,
                depth,
                height,
            } => ok(width) && ok(depth) && ok(height),
            Shape::Cylinder { radius, height } => ok(radius) && ok(height),
            Shape::Sphere { radius } => ok(radius),
        }
    }
}

/// Whether an object belongs to the task or was added as a distractor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectRole {
    #[default]
    Task,
    Distractor,
}

/// `z` is the height of the object's center above the table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    pub shape: Shape,
    pub color: [f64; 3],
    pub pose: Pose,
    #[serde(default)]
    pub role: ObjectRole,
}

impl ObjectSpec {
    /// An object resting on the table at `(x, y)`.
    pub fn resting(
        id: impl Into<String>,
        shape: Shape,
        color: [f64; 3],
        x: f64,
        y: f64,
        yaw: f64,
    ) -> Self {
        ObjectSpec {
            id: id.into(),
            shape,
            color,
            pose: Pose {
                x,
                y,
                z: 0.5 * shape.height(),
                yaw,
            },
            role: ObjectRole::Task,
        }
    }

    pub fn as_distractor(mut self) -> Self {
        self.role = ObjectRole::Distractor;
        self
    }

    pub fn center(&self) -> Vec3 {
        Vec3::new(self.pose.x, self.pose.y, self.pose.z)
    }

    pub fn bounding_radius(&self) -> f64 {
        self.shape.bounding_radius()
    }

    pub fn top(&self) -> f64 {
        self.pose.z + 0.5 * self.shape.height()
    }

    pub fn bottom(&self) -> f64 {
        self.pose.z - 0.5 * self.shape.height()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.shape.dims_positive() {
            return Err(Error::invalid(format!(
                "object {}: dimensions must be > 0",
                self.id
            )));
        }
        if self.color.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::invalid(format!(
                "object {}: color outside [0, 1]",
                self.id
            )));
        }
        if (self.bottom()).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "object {}: must rest on the table (z = {}, expected {})",
                self.id,
                self.pose.z,
                0.5 * self.shape.height()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub position: [f64; 3],
    pub look_at: [f64; 3],
    pub vertical_fov: f64,
    /// `[width, height]` in pixels.
    pub resolution: [usize; 2],
    /// Unit vector pointing from the scene toward the light.
    pub light_dir: [f64; 3],
}

/// Default light: from the front-left, high above the table.
pub const DEFAULT_LIGHT: [f64; 3] = [
    -0.267_261_241_912_424_4,
    -0.534_522_483_824_848_8,
    0.801_783_725_737_273_2,
];

/// Default render resolution for both views.
pub const DEFAULT_RESOLUTION: [usize; 2] = [256, 256];

impl CameraSpec {
    /// Oblique view from in front of the table (negative `y`), roughly where
    /// a manipulator's head or shoulder camera sits.
    pub fn robot_view(table: &TableExtent) -> CameraSpec {
        let cx = 0.5 * (table.x_min + table.x_max);
        let cy = 0.5 * (table.y_min + table.y_max);
        let depth = table.y_max - table.y_min;
        CameraSpec {
            position: [cx, table.y_min - 0.45 * depth, 0.75 * depth],
            look_at: [cx, cy, 0.0],
            vertical_fov: 55f64.to_radians(),
            resolution: DEFAULT_RESOLUTION,
            light_dir: DEFAULT_LIGHT,
        }
    }

    /// Straight-down view framing the whole table.
    pub fn top_view(table: &TableExtent) -> CameraSpec {
        let cx = 0.5 * (table.x_min + table.x_max);
        let cy = 0.5 * (table.y_min + table.y_max);
        let half = 0.5 * (table.x_max - table.x_min).max(table.y_max - table.y_min);
        let fov = 50f64.to_radians();
        CameraSpec {
            position: [cx, cy, 1.05 * half / (0.5 * fov).tan()],
            look_at: [cx, cy, 0.0],
            vertical_fov: fov,
            resolution: DEFAULT_RESOLUTION,
            light_dir: DEFAULT_LIGHT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = Vec3::from_array(self.position);
        let l = Vec3::from_array(self.look_at);
        if (l - p).norm() == 0.0 {
            return Err(Error::invalid("camera position equals look_at"));
        }
        if !(self.vertical_fov > 0.0 && self.vertical_fov < std::f64::consts::PI) {
            return Err(Error::invalid(format!(
                "camera fov must lie in (0, pi), got {}",
                self.vertical_fov
            )));
        }
        if self.resolution[0] == 0 || self.resolution[1] == 0 {
            return Err(Error::invalid("camera resolution must be nonzero"));
        }
        if (Vec3::from_array(self.light_dir).norm() - 1.0).abs() > 1e-6 {
            return Err(Error::invalid("light_dir must be a unit vector"));
        }
        Ok(())
    }

    /// Mirror across the `x = 0` plane.
    pub fn mirrored_x(&self) -> CameraSpec {
        let mut c = *self;
        c.position[0] = -c.position[0];
        c.look_at[0] = -c.look_at[0];
        c.light_dir[0] = -c.light_dir[0];
        c
    }
}

/// Axis-aligned table top rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableExtent {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl TableExtent {
    pub fn centered(width: f64, depth: f64) -> Self {
        TableExtent {
            x_min: -0.5 * width,
            x_max: 0.5 * width,
            y_min: -0.5 * depth,
            y_max: 0.5 * depth,
        }
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    /// Whether a footprint circle of radius `r` at `(x, y)` lies on the table.
    pub fn contains_circle(&self, x: f64, y: f64, r: f64) -> bool {
        x - r >= self.x_min && x + r <= self.x_max && y - r >= self.y_min && y + r <= self.y_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub table_extent: TableExtent,
    pub table_color: [f64; 3],
    pub objects: Vec<ObjectSpec>,
    pub target_id: String,
    pub robot_cam: CameraSpec,
    pub top_cam: CameraSpec,
    pub background_color: [f64; 3],
}

impl SceneSpec {
    /// Scene with default cameras, a light-gray table and a darker backdrop.
    pub fn tabletop(
        table: TableExtent,
        objects: Vec<ObjectSpec>,
        target_id: impl Into<String>,
    ) -> Self {
        SceneSpec {
            table_extent: table,
            table_color: [0.62, 0.6, 0.56],
            objects,
            target_id: target_id.into(),
            robot_cam: CameraSpec::robot_view(&table),
            top_cam: CameraSpec::top_view(&table),
            background_color: [0.25, 0.26, 0.28],
        }
    }

    pub fn object(&self, id: &str) -> Option<&ObjectSpec> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn target(&self) -> Result<&ObjectSpec> {
        self.object(&self.target_id)
            .ok_or_else(|| Error::invalid(format!("target {:?} not among objects", self.target_id)))
    }

    pub fn distractor_count(&self) -> usize {
        self.objects
            .iter()
            .filter(|o| o.role == ObjectRole::Distractor)
            .count()
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.table_extent;
        if !(t.x_min < t.x_max && t.y_min < t.y_max) {
            return Err(Error::invalid("table extent is empty"));
        }
        let mut seen = std::collections::HashSet::new();
        for o in &self.objects {
            o.validate()?;
            if !seen.insert(o.id.as_str()) {
                return Err(Error::invalid(format!("duplicate object id {:?}", o.id)));
            }
            if !t.contains_circle(o.pose.x, o.pose.y, o.bounding_radius()) {
                return Err(Error::invalid(format!(
                    "object {} extends past the table",
                    o.id
                )));
            }
        }
        self.target()?;
        self.robot_cam.validate()?;
        self.top_cam.validate()?;
        Ok(())
    }

    /// Same scene with every non-target object removed.
    pub fn isolate(&self, keep_id: &str) -> SceneSpec {
        let mut s = self.clone();
        s.objects.retain(|o| o.id == keep_id);
        s
    }

    /// Mirror objects and cameras across the `x = 0` plane.
    pub fn mirrored_x(&self) -> SceneSpec {
        let mut s = self.clone();
        let t = s.table_extent;
        s.table_extent = TableExtent {
            x_min: -t.x_max,
            x_max: -t.x_min,
            ..t
        };
        for o in &mut s.objects {
            o.pose.x = -o.pose.x;
            o.pose.yaw = -o.pose.yaw;
        }
        s.robot_cam = s.robot_cam.mirrored_x();
        s.top_cam = s.top_cam.mirrored_x();
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn from_json(text: &str) -> Result<SceneSpec> {
        let scene: SceneSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: None,
            line: e.line(),
            message: e.to_string(),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SceneSpec> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SceneSpec::from_json(&text).map_err(|e| e.with_path(path))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}
