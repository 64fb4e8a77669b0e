//! Gradient scaling of the local parameterization versus a global-offset
//! baseline.
//!
//! The deformation family is `x -> R_m S x + m t` with a fixed stretch `S`
//! and a rigid part that grows with the magnitude `m`. The camera follows
//! the rigid part, so the rendered image and the world-space gradient norm
//! stay fixed. An offset parameterization `G_d = G_c + m theta` then has a
//! parameter gradient `m * g`, while the local one gets `J^T g`, bounded by
//! `sigma_max(J) |g|` whatever `m` is.

use nalgebra::{Matrix3, Vector3};

use crate::error::Result;
use crate::fit::{build_plan, LossWeights};
use crate::fixtures;
use crate::image::Image;
use crate::loss::{loss_l1_grad, loss_ssim_grad};
use crate::mesh::{FrameVariant, MeshPair};
use crate::render::{Camera, Rasterizer};
use crate::rig::{LiftVariant, LocalAttributeMaps};
use crate::scenes::{axis_rotation, stripes};
use crate::texel::rasterize_faces;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub magnitude: f64,
    /// Mean world displacement of the Gaussians from their rest positions.
    pub mean_displacement: f64,
    /// Norm of the world-space position gradient over all Gaussians.
    pub world_grad: f64,
    pub offset_grad: f64,
    pub local_grad: f64,
    /// `sqrt(sum sigma_max(J_k)^2 |g_k|^2)` over source texels.
    pub local_bound: f64,
    pub max_sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    /// Offset gradient grows at least linearly with the magnitude (1e-6
    /// slack for roundoff).
    pub fn offset_growth_at_least_linear(&self) -> bool {
        let first = &self.rows[0];
        self.rows.iter().all(|r| {
            r.offset_grad / first.offset_grad >= (r.magnitude / first.magnitude) * (1.0 - 1e-6)
        })
    }

    /// The local gradient never exceeds its bound and the bound does not
    /// drift with the magnitude (relative spread within 1e-6).
    pub fn local_bound_fixed(&self) -> bool {
        let lo = self.rows.iter().map(|r| r.local_bound).fold(f64::INFINITY, f64::min);
        let hi = self.rows.iter().map(|r| r.local_bound).fold(0.0, f64::max);
        self.rows
            .iter()
            .all(|r| r.local_grad <= r.local_bound * (1.0 + 1e-12))
            && hi - lo <= 1e-6 * hi
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from(
            "magnitude  mean_disp    world_grad   offset_grad  local_grad   local_bound  max_sigma\n",
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:<10.3} {:<12.5e} {:<12.5e} {:<12.5e} {:<12.5e} {:<12.5e} {:.6}\n",
                r.magnitude,
                r.mean_displacement,
                r.world_grad,
                r.offset_grad,
                r.local_grad,
                r.local_bound,
                r.max_sigma
            ));
        }
        s
    }
}

pub fn gradient_scaling_report(magnitudes: &[f64]) -> Result<ScalingReport> {
    let rest = fixtures::uv_sphere(8, 7, 1.0);
    let map = rasterize_faces(&rest, 16, 16);
    let truth = LocalAttributeMaps::surface_anchored(
        &rest,
        &map,
        2,
        LocalAttributeMaps::texel_log_scale(&rest, &map, 0.6),
        1.5,
        stripes(16, 16),
    );
    let guess = truth.perturbed(0.05, 1);
    let stretch = Matrix3::from_diagonal(&Vector3::new(1.15, 1.0, 0.95));
    let base_camera = Camera::look_at(
        Vector3::new(0.3, 0.2, 3.2),
        Vector3::zeros(),
        Vector3::new(0.0, 1.0, 0.0),
        0.8,
        40,
        40,
    );
    let weights = LossWeights::for_edge_length(rest.mean_edge_length());
    let axis = Vector3::new(0.3, 1.0, 0.2);
    let shift = Vector3::new(1.0, 0.4, -0.3);
    let mut target: Option<Image> = None;
    let mut rows = Vec::new();
    for &m in magnitudes {
        let r = axis_rotation(axis, 0.4 * m);
        let t = shift * m;
        let deformed = rest.map_vertices(|p| r * stretch * p + t)?;
        let pair = MeshPair {
            rest: rest.clone(),
            deformed,
        };
        let plan = build_plan(&pair, &map, FrameVariant::FullJacobian, 2, LiftVariant::QuasiPhong)?;
        let camera = base_camera.moved_with(&r, &t);
        if target.is_none() {
            let set = plan.lift(&truth)?;
            target = Some(Rasterizer::new(&set, &camera)?.forward().image);
        }
        let target = target.as_ref().expect("set above");
        let set = plan.lift(&guess)?;
        let raster = Rasterizer::new(&set, &camera)?;
        let image = raster.forward().image;
        let g1 = loss_l1_grad(&image, target)?;
        let gs = loss_ssim_grad(&image, target)?;
        let d_image = Image::from_data(
            image.width(),
            image.height(),
            g1.data()
                .iter()
                .zip(gs.data())
                .map(|(a, b)| weights.lambda_l1 * a + weights.lambda_ssim * b)
                .collect(),
        )?;
        let grads = raster.backward(&d_image)?;
        let pulled = plan.position_pullback(&grads.position);
        let mut bound2 = 0.0;
        let mut local2 = 0.0;
        let mut max_sigma: f64 = 0.0;
        for (k, g, jt_g) in &pulled {
            let sigma = plan.jacobian(*k).svd(false, false).singular_values.max();
            max_sigma = max_sigma.max(sigma);
            bound2 += sigma * sigma * g.norm_squared();
            local2 += jt_g.norm_squared();
        }
        let world = grads.position.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        let rest_set = {
            let identity = MeshPair {
                rest: rest.clone(),
                deformed: rest.clone(),
            };
            build_plan(&identity, &map, FrameVariant::FullJacobian, 2, LiftVariant::QuasiPhong)?.lift(&guess)?
        };
        let mean_displacement = set
            .positions
            .iter()
            .zip(&rest_set.positions)
            .map(|(a, b)| (a - b).norm())
            .sum::<f64>()
            / set.len().max(1) as f64;
        rows.push(ScalingRow {
            magnitude: m,
            mean_displacement,
            world_grad: world,
            offset_grad: m * world,
            local_grad: local2.sqrt(),
            local_bound: bound2.sqrt(),
            max_sigma,
        });
    }
    Ok(ScalingReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_grows_while_local_stays_bounded() {
        let report = gradient_scaling_report(&[0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(report.offset_growth_at_least_linear(), "{}", report.to_text());
        assert!(report.local_bound_fixed(), "{}", report.to_text());
        let first = report.rows[0].world_grad;
        assert!(report.rows.iter().all(|r| (r.world_grad - first).abs() < 1e-6 * first));
    }
}
