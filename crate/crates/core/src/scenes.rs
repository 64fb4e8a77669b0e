//! Small posed scenes shared by the validation suite, the acceptance tests,
//! the CLI and the demo.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::Rng;

use crate::error::Result;
use crate::fit::{build_plan, FitFrame, LossWeights};
use crate::fixtures;
use crate::image::Image;
use crate::mesh::{FrameVariant, MeshPair, TriMesh};
use crate::render::{Camera, Rasterizer};
use crate::rig::{LiftVariant, LocalAttributeMaps};
use crate::texel::{rasterize_faces, FaceIdMap};

/// Camera on the `+z` side of `center` at `distance`, looking back at it.
pub fn front_camera(center: Vector3<f64>, distance: f64, fov_y: f64, size: usize) -> Camera {
    Camera::look_at(
        center + Vector3::new(0.0, 0.0, distance),
        center,
        Vector3::new(0.0, 1.0, 0.0),
        fov_y,
        size,
        size,
    )
}

/// Smooth color-logit pattern over the texel grid.
pub fn stripes(width: usize, height: usize) -> impl Fn(usize, usize) -> [f64; 3] {
    move |i, j| {
        let u = (i as f64 + 0.5) / width as f64;
        let v = (j as f64 + 0.5) / height as f64;
        [
            1.5 * (2.0 * PI * u).sin(),
            1.5 * (3.0 * PI * v).cos(),
            1.2 * (2.0 * PI * (u + v)).sin(),
        ]
    }
}

/// Renders `local` through every frame's plan and camera and stores the
/// result as the frame's target.
pub fn render_targets(frames: &mut [FitFrame], local: &LocalAttributeMaps) -> Result<()> {
    for f in frames.iter_mut() {
        let set = f.plan.lift(local)?;
        f.target = Rasterizer::new(&set, &f.camera)?.forward().image;
    }
    Ok(())
}

/// One randomized instance of the end-to-end gradient check: bent two-face
/// strip, 4x4 texel maps, one 32x32 view, targets offset from the current
/// render by at least 0.05 per value so that L1 stays smooth.
pub struct GradientScene {
    pub frames: Vec<FitFrame>,
    pub local: LocalAttributeMaps,
    pub weights: LossWeights,
    pub variant: LiftVariant,
}

pub fn gradient_scene<R: Rng>(rng: &mut R, variant: LiftVariant) -> Result<GradientScene> {
    let angle = rng.gen_range(0.2..1.2);
    let bent = fixtures::bent_strip(angle);
    let rot = fixtures::random_rotation(rng);
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(rot.column(0).into_owned()), rng.gen_range(-0.4..0.4));
    let shift = Vector3::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
    let deformed = bent.deformed.map_vertices(|p| rot * p + shift)?;
    let pair = MeshPair {
        rest: bent.rest,
        deformed,
    };
    let map = rasterize_faces(&pair.rest, 4, 4);
    let plan = build_plan(&pair, &map, FrameVariant::FullJacobian, 1, variant)?;
    let mut local = LocalAttributeMaps::surface_anchored(&pair.rest, &map, 1, 0.12f64.ln(), 0.0, |_, _| [0.0; 3]);
    for k in 0..16 {
        for v in local.position.texel_mut(k) {
            *v += rng.gen_range(-0.05..0.05);
        }
        let q = local.rotation.texel_mut(k);
        for v in q.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        q[0] += 1.5;
        for v in local.log_scale.texel_mut(k) {
            *v += rng.gen_range(-0.3..0.3);
        }
        local.opacity.texel_mut(k)[0] = rng.gen_range(-0.5..2.0);
        for v in local.color.texel_mut(k) {
            *v = rng.gen_range(-1.5..1.5);
        }
    }
    let center = pair.deformed.vertices().iter().sum::<Vector3<f64>>() / 4.0;
    let eye = center
        + Vector3::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), rng.gen_range(2.0..2.6));
    let mut camera = Camera::look_at(eye, center, Vector3::new(0.0, 1.0, 0.0), 0.8, 32, 32);
    camera.background = Vector3::new(rng.gen(), rng.gen(), rng.gen());
    let set = plan.lift(&local)?;
    let image = Rasterizer::new(&set, &camera)?.forward().image;
    let target = Image::from_data(
        32,
        32,
        image
            .data()
            .iter()
            .map(|v| {
                let off = 0.05 + 0.2 * rng.gen::<f64>();
                if rng.gen::<bool>() {
                    v + off
                } else {
                    v - off
                }
            })
            .collect(),
    )?;
    let weights = LossWeights {
        lambda_l1: 0.8,
        lambda_ssim: 0.2,
        lambda_reg_mu: 1.0,
        lambda_reg_s: 1.0,
        eps_mu: 0.35,
        eps_s: 0.12,
    };
    Ok(GradientScene {
        frames: vec![FitFrame {
            plan,
            camera,
            target,
        }],
        local,
        weights,
        variant,
    })
}

/// The self-consistent inverse problem: a UV sphere seen in two poses,
/// ground-truth maps, and targets rendered from them.
pub struct RecoveryScene {
    pub rest: TriMesh,
    pub face_map: FaceIdMap,
    pub frames: Vec<FitFrame>,
    pub truth: LocalAttributeMaps,
    pub weights: LossWeights,
}

pub struct RecoverySpec {
    pub uv_size: usize,
    pub image_size: usize,
    pub rings: usize,
    pub variant: LiftVariant,
}

impl Default for RecoverySpec {
    fn default() -> Self {
        Self {
            uv_size: 24,
            image_size: 64,
            rings: 2,
            variant: LiftVariant::QuasiPhong,
        }
    }
}

/// Sphere poses: a mild squash-and-twist and a bend toward `+x`.
pub fn sphere_poses(rest: &TriMesh) -> Result<Vec<TriMesh>> {
    let twist = rest.map_vertices(|p| {
        let a = 0.35 * p.y;
        let r = Rotation3::from_axis_angle(&Vector3::y_axis(), a);
        r * Vector3::new(1.1 * p.x, 0.9 * p.y, p.z)
    })?;
    let bend = rest.map_vertices(|p| {
        let r = Rotation3::from_axis_angle(&Vector3::z_axis(), -0.3 * p.y);
        r * p + Vector3::new(0.1 * p.y * p.y, 0.0, 0.0)
    })?;
    Ok(vec![twist, bend])
}

pub fn recovery_scene(spec: &RecoverySpec) -> Result<RecoveryScene> {
    let rest = fixtures::uv_sphere(10, 11, 1.0);
    let face_map = rasterize_faces(&rest, spec.uv_size, spec.uv_size);
    let log_scale = LocalAttributeMaps::texel_log_scale(&rest, &face_map, 0.6);
    let truth = LocalAttributeMaps::surface_anchored(
        &rest,
        &face_map,
        spec.rings,
        log_scale,
        2.0,
        stripes(spec.uv_size, spec.uv_size),
    );
    let eyes = [Vector3::new(0.4, 0.3, 3.2), Vector3::new(-0.5, -0.2, 3.0)];
    let mut frames = Vec::new();
    for (deformed, eye) in sphere_poses(&rest)?.into_iter().zip(eyes) {
        let pair = MeshPair {
            rest: rest.clone(),
            deformed,
        };
        let plan = build_plan(&pair, &face_map, FrameVariant::FullJacobian, spec.rings, spec.variant)?;
        let mut camera = Camera::look_at(
            eye,
            Vector3::zeros(),
            Vector3::new(0.0, 1.0, 0.0),
            0.75,
            spec.image_size,
            spec.image_size,
        );
        camera.background = Vector3::new(0.05, 0.05, 0.08);
        frames.push(FitFrame {
            plan,
            camera,
            target: Image::new(spec.image_size, spec.image_size),
        });
    }
    render_targets(&mut frames, &truth)?;
    let weights = LossWeights::for_edge_length(rest.mean_edge_length());
    Ok(RecoveryScene {
        rest,
        face_map,
        frames,
        truth,
        weights,
    })
}

/// Rigid rotation about a fixed axis by `angle` radians.
pub fn axis_rotation(axis: Vector3<f64>, angle: f64) -> Matrix3<f64> {
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle).into_inner()
}
