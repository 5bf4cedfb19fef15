use clutterbench::scene::{
    footprint_gap, has_grasp_affordance, occlusion_ratio, render, CameraSpec, ObjectSpec,
    SceneSpec, Shape, TableExtent, DEFAULT_LIGHT,
};
use proptest::prelude::*;

const RED: [f64; 3] = [0.8, 0.1, 0.1];
const BLUE: [f64; 3] = [0.1, 0.2, 0.8];

fn cube(id: &str, side: f64, x: f64, y: f64) -> ObjectSpec {
    ObjectSpec::resting(
        id,
        Shape::Box {
            width: side,
            depth: side,
            height: side,
        },
        RED,
        x,
        y,
        0.0,
    )
}

fn level_camera(height: f64, fov_deg: f64, res: usize) -> CameraSpec {
    CameraSpec {
        position: [0.0, -1.0, height],
        look_at: [0.0, 0.0, height],
        vertical_fov: fov_deg.to_radians(),
        resolution: [res, res],
        light_dir: DEFAULT_LIGHT,
    }
}

#[test]
fn empty_table_has_no_object_pixels() {
    let scene = SceneSpec::tabletop(TableExtent::centered(0.8, 0.6), vec![], "none");
    for cam in [scene.robot_cam, scene.top_cam] {
        let out = render(&scene, &cam);
        assert!(out.object_index.iter().all(Option::is_none));
        assert!(out.depth.iter().all(|d| d.is_infinite()));
        // Only two distinct colors can appear: shaded table and background.
        let mut colors: Vec<Vec<u64>> = (0..out.height())
            .flat_map(|y| (0..out.width()).map(move |x| (x, y)))
            .map(|(x, y)| out.color.pixel(x, y).iter().map(|v| v.to_bits()).collect())
            .collect();
        colors.sort();
        colors.dedup();
        assert!(colors.len() <= 2, "{} colors", colors.len());
    }
}

#[test]
fn sphere_silhouette_matches_projected_disc() {
    let r = 0.1;
    let sphere = ObjectSpec::resting("ball", Shape::Sphere { radius: r }, RED, 0.0, 0.0, 0.0);
    let scene = SceneSpec::tabletop(TableExtent::centered(2.0, 2.0), vec![sphere], "ball");
    let fov: f64 = 40.0;
    let res = 256;
    let cam = level_camera(r, fov, res);
    let out = render(&scene, &cam);
    // Oracle: a sphere at distance d on the optical axis projects to a disc
    // of angular radius asin(r/d); focal length in pixels is (H/2)/tan(fov/2).
    let d = 1.0_f64;
    let alpha = (r / d).asin();
    let f = (res as f64 / 2.0) / (fov.to_radians() / 2.0).tan();
    let rho = f * alpha.tan();
    let area = std::f64::consts::PI * rho * rho;
    let count = out.pixel_count("ball") as f64;
    assert!(
        (count / area - 1.0).abs() < 0.05,
        "count {count}, analytic {area}"
    );
    // Depth at the disc center is d - r.
    let c = res / 2;
    assert!((out.depth_at(c, c) - (d - r)).abs() < 2e-3);
}

#[test]
fn nearer_object_wins() {
    let near = cube("near", 0.1, 0.0, -0.3);
    let far = ObjectSpec {
        color: BLUE,
        ..cube("far", 0.1, 0.0, 0.3)
    };
    let scene = SceneSpec::tabletop(TableExtent::centered(2.0, 2.0), vec![far, near], "far");
    let cam = level_camera(0.05, 40.0, 64);
    let out = render(&scene, &cam);
    assert_eq!(out.id_at(32, 32), Some("near"));
    assert!(out.depth_at(32, 32) < 1.0);
    for (i, idx) in out.object_index.iter().enumerate() {
        assert_eq!(idx.is_some(), out.depth[i].is_finite());
    }
}

#[test]
fn render_is_deterministic() {
    let scene = SceneSpec::tabletop(
        TableExtent::centered(0.8, 0.6),
        vec![
            cube("a", 0.06, -0.1, 0.05),
            ObjectSpec::resting(
                "b",
                Shape::Cylinder {
                    radius: 0.03,
                    height: 0.12,
                },
                BLUE,
                0.15,
                -0.1,
                0.0,
            ),
        ],
        "a",
    );
    let a = render(&scene, &scene.robot_cam);
    let b = render(&scene, &scene.robot_cam);
    assert_eq!(a, b);
}

#[test]
fn mirrored_scene_renders_mirrored() {
    let scene = SceneSpec::tabletop(
        TableExtent::centered(0.8, 0.6),
        vec![
            ObjectSpec::resting(
                "a",
                Shape::Box {
                    width: 0.08,
                    depth: 0.05,
                    height: 0.1,
                },
                RED,
                -0.12,
                0.05,
                0.4,
            ),
            ObjectSpec::resting("b", Shape::Sphere { radius: 0.04 }, BLUE, 0.2, -0.1, 0.0),
        ],
        "a",
    );
    let mirrored = scene.mirrored_x();
    for (cam, mcam) in [
        (scene.robot_cam, mirrored.robot_cam),
        (scene.top_cam, mirrored.top_cam),
    ] {
        let a = render(&scene, &cam);
        let b = render(&mirrored, &mcam);
        let fa = a.color.flip_horizontal();
        let w = a.width();
        let mut id_mismatch = 0;
        for y in 0..a.height() {
            for x in 0..w {
                if a.id_at(w - 1 - x, y) != b.id_at(x, y) {
                    id_mismatch += 1;
                }
            }
        }
        // Silhouette edges may round differently; allow a handful of pixels.
        assert!(id_mismatch <= 4, "{id_mismatch} mismatched ids");
        let max_diff = fa
            .planes()
            .iter()
            .zip(b.color.planes())
            .flat_map(|(p, q)| p.data().iter().zip(q.data()).map(|(u, v)| (u - v).abs()))
            .filter(|d| *d > 1e-9)
            .count();
        assert!(max_diff <= 12, "{max_diff} differing samples");
    }
}

#[test]
fn occlusion_without_distractors_is_zero() {
    let scene = SceneSpec::tabletop(
        TableExtent::centered(0.8, 0.6),
        vec![cube("t", 0.06, 0.0, 0.0)],
        "t",
    );
    assert_eq!(occlusion_ratio(&scene, &scene.robot_cam, "t").unwrap(), 0.0);
}

#[test]
fn occluder_behind_target_does_not_count() {
    let target = cube("t", 0.1, 0.0, 0.0);
    let behind = cube("d", 0.1, 0.05, 0.4);
    let scene = SceneSpec::tabletop(TableExtent::centered(2.0, 2.0), vec![target, behind], "t");
    let cam = level_camera(0.05, 40.0, 128);
    assert_eq!(occlusion_ratio(&scene, &cam, "t").unwrap(), 0.0);
}

#[test]
fn fully_interposed_box_hides_target() {
    let target = cube("t", 0.1, 0.0, 0.0);
    let wall = ObjectSpec::resting(
        "wall",
        Shape::Box {
            width: 0.6,
            depth: 0.05,
            height: 0.5,
        },
        BLUE,
        0.0,
        -0.4,
        0.0,
    );
    let scene = SceneSpec::tabletop(TableExtent::centered(2.0, 2.0), vec![target, wall], "t");
    let cam = level_camera(0.05, 40.0, 128);
    let r = occlusion_ratio(&scene, &cam, "t").unwrap();
    assert!(r >= 0.98, "{r}");
}

#[test]
fn half_covering_occluder() {
    // Target front face is centered on the optical axis; the occluder's right
    // edge lies in the plane x = 0, which projects onto the image center
    // column, so exactly the left half of the face is hidden.
    let target = ObjectSpec::resting(
        "t",
        Shape::Box {
            width: 0.2,
            depth: 0.1,
            height: 0.2,
        },
        RED,
        0.0,
        0.0,
        0.0,
    );
    let occluder = ObjectSpec::resting(
        "o",
        Shape::Box {
            width: 0.3,
            depth: 0.05,
            height: 0.4,
        },
        BLUE,
        -0.15,
        -0.3,
        0.0,
    );
    let scene = SceneSpec::tabletop(TableExtent::centered(2.0, 2.0), vec![target, occluder], "t");
    let cam = level_camera(0.1, 40.0, 256);
    let r = occlusion_ratio(&scene, &cam, "t").unwrap();
    assert!((r - 0.5).abs() <= 0.02, "{r}");
}

#[test]
fn invisible_target_is_degenerate() {
    let target = cube("t", 0.1, 0.0, 0.0);
    let scene = SceneSpec::tabletop(TableExtent::centered(2.0, 2.0), vec![target], "t");
    let mut cam = level_camera(0.05, 40.0, 64);
    cam.look_at = [0.0, -2.0, 0.05];
    assert!(matches!(
        occlusion_ratio(&scene, &cam, "t"),
        Err(clutterbench::Error::DegenerateScene(_))
    ));
    assert!(occlusion_ratio(&scene, &scene.robot_cam, "missing").is_err());
}

#[test]
fn footprint_gap_examples() {
    let cyl = |id: &str, x: f64| {
        ObjectSpec::resting(
            id,
            Shape::Cylinder {
                radius: 1.0,
                height: 1.0,
            },
            RED,
            x,
            0.0,
            0.0,
        )
    };
    assert!((footprint_gap(&cyl("a", 0.0), &cyl("b", 3.0)) - 1.0).abs() < 1e-12);
    assert!(footprint_gap(&cyl("a", 0.0), &cyl("b", 0.0)) < 0.0);
    let bx = ObjectSpec::resting(
        "box",
        Shape::Box {
            width: 0.2,
            depth: 0.2,
            height: 0.1,
        },
        RED,
        0.0,
        0.0,
        0.3,
    );
    let ball = ObjectSpec::resting("ball", Shape::Sphere { radius: 0.05 }, RED, 0.3, 0.4, 0.0);
    // Hand arithmetic: bounding radii 0.1*sqrt(2) and 0.05, centers 0.5 apart.
    let want = 0.5 - 0.1 * 2f64.sqrt() - 0.05;
    assert!((footprint_gap(&bx, &ball) - want).abs() < 1e-9);
}

#[test]
fn grasp_affordance_cases() {
    let table = TableExtent::centered(2.0, 2.0);
    let cyl = |id: &str, x: f64| {
        ObjectSpec::resting(
            id,
            Shape::Cylinder {
                radius: 0.0625,
                height: 0.125,
            },
            RED,
            x,
            0.0,
            0.0,
        )
    };
    let clearance = 0.0625;
    let lone = SceneSpec::tabletop(table, vec![cyl("t", 0.0)], "t");
    assert!(has_grasp_affordance(&lone, "t", clearance).unwrap());

    let crowded = SceneSpec::tabletop(table, vec![cyl("t", 0.0), cyl("d", 0.15)], "t");
    assert!(!has_grasp_affordance(&crowded, "t", clearance).unwrap());

    // Oracle: two vertical cylinders intersect iff their axis distance is
    // strictly below the sum of radii: 0.1875 = (0.0625 + 0.0625) + 0.0625,
    // so the clearance cylinder only touches the neighbour.
    let touching = SceneSpec::tabletop(table, vec![cyl("t", 0.0), cyl("d", 0.1875)], "t");
    assert!(has_grasp_affordance(&touching, "t", clearance).unwrap());
    let just_inside = SceneSpec::tabletop(table, vec![cyl("t", 0.0), cyl("d", 0.1874)], "t");
    assert!(!has_grasp_affordance(&just_inside, "t", clearance).unwrap());
}

#[test]
fn scene_json_round_trip() {
    let scene = SceneSpec::tabletop(
        TableExtent::centered(0.8, 0.6),
        vec![
            cube("t", 0.06, 0.1, -0.05),
            cube("d", 0.05, -0.2, 0.1).as_distractor(),
        ],
        "t",
    );
    let back = SceneSpec::from_json(&scene.to_json()).unwrap();
    assert_eq!(back, scene);
    assert_eq!(back.distractor_count(), 1);
}

#[test]
fn validation_rejects_floating_objects() {
    let mut obj = cube("t", 0.06, 0.0, 0.0);
    obj.pose.z += 0.01;
    let scene = SceneSpec::tabletop(TableExtent::centered(0.8, 0.6), vec![obj], "t");
    assert!(scene.validate().is_err());
    let off_table = SceneSpec::tabletop(
        TableExtent::centered(0.8, 0.6),
        vec![cube("t", 0.06, 0.39, 0.0)],
        "t",
    );
    assert!(off_table.validate().is_err());
}

fn random_scene(placements: &[(f64, f64, u8)]) -> SceneSpec {
    let mut objects = vec![cube("t", 0.06, 0.0, 0.0)];
    for (i, &(x, y, kind)) in placements.iter().enumerate() {
        let shape = match kind % 3 {
            0 => Shape::Box {
                width: 0.05,
                depth: 0.08,
                height: 0.12,
            },
            1 => Shape::Cylinder {
                radius: 0.03,
                height: 0.15,
            },
            _ => Shape::Sphere { radius: 0.04 },
        };
        objects.push(
            ObjectSpec::resting(format!("d{i}"), shape, BLUE, x, y, 0.3 * i as f64).as_distractor(),
        );
    }
    let mut scene = SceneSpec::tabletop(TableExtent::centered(0.8, 0.6), objects, "t");
    scene.robot_cam.resolution = [64, 64];
    scene
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn removing_a_distractor_never_raises_occlusion(
        placements in prop::collection::vec((-0.3f64..0.3, -0.25f64..0.25, any::<u8>()), 1..6),
        drop in any::<prop::sample::Index>(),
    ) {
        let scene = random_scene(&placements);
        let full = occlusion_ratio(&scene, &scene.robot_cam, "t").unwrap();
        let mut fewer = scene.clone();
        fewer.objects.remove(1 + drop.index(placements.len()));
        let reduced = occlusion_ratio(&fewer, &fewer.robot_cam, "t").unwrap();
        prop_assert!(reduced <= full);
        prop_assert!((0.0..=1.0).contains(&full));
    }

    #[test]
    fn footprint_gap_is_symmetric(
        placements in prop::collection::vec((-0.3f64..0.3, -0.25f64..0.25, any::<u8>()), 2..3),
    ) {
        let scene = random_scene(&placements);
        let (a, b) = (&scene.objects[1], &scene.objects[2]);
        prop_assert_eq!(footprint_gap(a, b), footprint_gap(b, a));
    }
}
