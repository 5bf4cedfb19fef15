use super::render::render_ids;
use super::{CameraSpec, ObjectSpec, SceneSpec};
use crate::error::{Error, Result};

/// Free space required around the target for a parallel-jaw approach.
pub const DEFAULT_CLEARANCE: f64 = 0.04;

/// Distance between the bounding circles of two footprints. Negative when
/// they overlap.
pub fn footprint_gap(a: &ObjectSpec, b: &ObjectSpec) -> f64 {
    let d = (a.pose.x - b.pose.x).hypot(a.pose.y - b.pose.y);
    d - (a.bounding_radius() + b.bounding_radius())
}

/// Fraction of the target's silhouette hidden by other objects from `cam`.
///
/// Compares the target's pixel count in the full scene against a render of
/// the target alone.
pub fn occlusion_ratio(scene: &SceneSpec, cam: &CameraSpec, target_id: &str) -> Result<f64> {
    let idx = scene
        .objects
        .iter()
        .position(|o| o.id == target_id)
        .ok_or_else(|| Error::invalid(format!("target {target_id:?} not in scene")))?;
    let alone = render_ids(scene, cam, Some(&[idx])).count(idx as u32);
    if alone == 0 {
        return Err(Error::DegenerateScene(format!(
            "target {target_id:?} is not visible from the camera even in isolation"
        )));
    }
    if scene.objects.len() == 1 {
        return Ok(0.0);
    }
    let visible = render_ids(scene, cam, None).count(idx as u32);
    Ok((1.0 - visible as f64 / alone as f64).clamp(0.0, 1.0))
}

/// True when a vertical clearance cylinder around the target intersects no
/// other object's bounding cylinder.
///
/// The clearance cylinder has radius `target bounding radius + clearance`
/// and spans from the table to `clearance` above the target's top. Touching
/// is not an intersection.
pub fn has_grasp_affordance(scene: &SceneSpec, target_id: &str, clearance: f64) -> Result<bool> {
    let target = scene
        .object(target_id)
        .ok_or_else(|| Error::invalid(format!("target {target_id:?} not in scene")))?;
    let z_top = target.top() + clearance;
    let blocked = scene.objects.iter().filter(|o| o.id != target.id).any(|o| {
        let horizontal = footprint_gap(target, o) < clearance;
        let vertical = o.bottom() < z_top && o.top() > 0.0;
        horizontal && vertical
    });
    Ok(!blocked)
}
