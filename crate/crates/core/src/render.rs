//! CPU Gaussian splatting: pinhole EWA projection, depth-sorted
//! front-to-back compositing and its exact reverse-mode gradient.
//!
//! Camera space is x right, y down, z forward. Pixel `(x, y)` has its
//! center at integer coordinates `(x, y)`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::{Matrix2, Matrix2x3, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::par;
use crate::rig::{GaussianGrads, GlobalGaussianSet};

pub const LOW_PASS: f64 = 0.3;
pub const MAX_ALPHA: f64 = 0.999;
pub const MIN_TRANSMITTANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// World-to-camera rotation.
    pub rotation: Matrix3<f64>,
    /// World-to-camera translation.
    pub translation: Vector3<f64>,
    pub width: usize,
    pub height: usize,
    pub near: f64,
    pub far: f64,
    pub background: Vector3<f64>,
}

impl Camera {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Format(format!("camera: {m}")));
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return bad("focal lengths must be positive");
        }
        if !(self.near > 0.0 && self.near < self.far) {
            return bad("need 0 < near < far");
        }
        if self.width == 0 || self.height == 0 {
            return bad("empty image");
        }
        if (self.rotation.transpose() * self.rotation - Matrix3::identity()).amax() > 1e-8
            || self.rotation.determinant() < 0.0
        {
            return bad("rotation is not orthonormal");
        }
        if ![self.cx, self.cy].iter().all(|v| v.is_finite())
            || !self.translation.iter().chain(self.background.iter()).all(|v| v.is_finite())
        {
            return bad("non-finite parameter");
        }
        Ok(())
    }

    /// Camera at `eye` looking at `target` with vertical field of view
    /// `fov_y` radians and the principal point at the image center.
    pub fn look_at(
        eye: Vector3<f64>,
        target: Vector3<f64>,
        up: Vector3<f64>,
        fov_y: f64,
        width: usize,
        height: usize,
    ) -> Self {
        let forward = (target - eye).normalize();
        let right = forward.cross(&up).normalize();
        let down = forward.cross(&right);
        let rotation = Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
        let f = 0.5 * height as f64 / (0.5 * fov_y).tan();
        Self {
            fx: f,
            fy: f,
            cx: (width as f64 - 1.0) / 2.0,
            cy: (height as f64 - 1.0) / 2.0,
            rotation,
            translation: -(rotation * eye),
            width,
            height,
            near: 0.01,
            far: 100.0,
            background: Vector3::zeros(),
        }
    }

    pub fn to_camera(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Pinhole projection Jacobian at camera-space point `t`.
    pub fn projection_jacobian(&self, t: &Vector3<f64>) -> Matrix2x3<f64> {
        let iz = 1.0 / t.z;
        Matrix2x3::new(
            self.fx * iz,
            0.0,
            -self.fx * t.x * iz * iz,
            0.0,
            self.fy * iz,
            -self.fy * t.y * iz * iz,
        )
    }

    /// Same camera after applying the rigid world transform `x -> r x + t`
    /// to the scene.
    pub fn moved_with(&self, r: &Matrix3<f64>, t: &Vector3<f64>) -> Self {
        let rotation = self.rotation * r.transpose();
        Self {
            rotation,
            translation: self.translation - rotation * t,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splat2D {
    pub index: usize,
    pub mean: Vector2<f64>,
    /// Includes the low-pass term.
    pub cov: Matrix2<f64>,
    pub conic: Matrix2<f64>,
    pub depth: f64,
    /// Camera-space mean and covariance.
    pub cam_mean: Vector3<f64>,
    pub cam_cov: Matrix3<f64>,
    pub color: Vector3<f64>,
    pub opacity: f64,
    /// Inclusive pixel bounds `[x0, x1] x [y0, y1]`.
    pub bounds: [usize; 4],
}

/// Projects one Gaussian; `None` when culled by depth or fully off-screen.
pub fn project(
    index: usize,
    position: &Vector3<f64>,
    covariance: &Matrix3<f64>,
    color: &Vector3<f64>,
    opacity: f64,
    camera: &Camera,
) -> Option<Splat2D> {
    let t = camera.to_camera(position);
    if !(t.z > camera.near && t.z < camera.far) {
        return None;
    }
    let jp = camera.projection_jacobian(&t);
    let w = &camera.rotation;
    let cov3 = w * covariance * w.transpose();
    let cov = jp * cov3 * jp.transpose() + Matrix2::identity() * LOW_PASS;
    let cov = (cov + cov.transpose()) * 0.5;
    let mean = Vector2::new(
        camera.fx * t.x / t.z + camera.cx,
        camera.fy * t.y / t.z + camera.cy,
    );
    let rx = 3.0 * cov[(0, 0)].sqrt();
    let ry = 3.0 * cov[(1, 1)].sqrt();
    let x0 = (mean.x - rx).ceil().max(0.0);
    let x1 = (mean.x + rx).floor().min(camera.width as f64 - 1.0);
    let y0 = (mean.y - ry).ceil().max(0.0);
    let y1 = (mean.y + ry).floor().min(camera.height as f64 - 1.0);
    if !(x0 <= x1 && y0 <= y1) {
        return None;
    }
    let conic = cov.try_inverse()?;
    Some(Splat2D {
        index,
        mean,
        cov,
        conic,
        depth: t.z,
        cam_mean: t,
        cam_cov: cov3,
        color: *color,
        opacity,
        bounds: [x0 as usize, x1 as usize, y0 as usize, y1 as usize],
    })
}

/// One composited layer of a pixel.
#[derive(Debug, Clone, Copy)]
struct Layer {
    slot: usize,
    /// Transmittance before this layer.
    t: f64,
    alpha: f64,
    falloff: f64,
    clamped: bool,
}

#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub image: Image,
    /// Accumulated opacity `1 - T_final` per pixel.
    pub alpha: Vec<f64>,
    /// Hash of which splats touched which pixels, which were clamped and
    /// where compositing terminated. Equal signatures mean the render is
    /// smooth between two parameter settings.
    pub signature: u64,
}

/// Projected, depth-sorted splats bucketed by pixel row.
pub struct Rasterizer<'a> {
    camera: &'a Camera,
    splats: Vec<Splat2D>,
    rows: Vec<Vec<u32>>,
    gaussian_count: usize,
}

impl<'a> Rasterizer<'a> {
    pub fn new(set: &GlobalGaussianSet, camera: &'a Camera) -> Result<Self> {
        camera.validate()?;
        set.validate()?;
        let projected = par::map_range(set.len(), |i| {
            project(
                i,
                &set.positions[i],
                &set.covariances[i],
                &set.colors[i],
                set.opacities[i],
                camera,
            )
        });
        let mut splats: Vec<Splat2D> = projected.into_iter().flatten().collect();
        splats.sort_by(|a, b| a.depth.total_cmp(&b.depth).then(a.index.cmp(&b.index)));
        let mut rows = vec![Vec::new(); camera.height];
        for (slot, s) in splats.iter().enumerate() {
            for row in &mut rows[s.bounds[2]..=s.bounds[3]] {
                row.push(slot as u32);
            }
        }
        Ok(Self {
            camera,
            splats,
            rows,
            gaussian_count: set.len(),
        })
    }

    pub fn splats(&self) -> &[Splat2D] {
        &self.splats
    }

    fn composite(&self, x: usize, y: usize, layers: &mut Vec<Layer>) -> f64 {
        layers.clear();
        let p = Vector2::new(x as f64, y as f64);
        let mut t = 1.0;
        for &slot in &self.rows[y] {
            let s = &self.splats[slot as usize];
            if x < s.bounds[0] || x > s.bounds[1] {
                continue;
            }
            let d = p - s.mean;
            let falloff = (-0.5 * d.dot(&(s.conic * d))).exp();
            let raw = s.opacity * falloff;
            let clamped = raw > MAX_ALPHA;
            let alpha = raw.min(MAX_ALPHA);
            layers.push(Layer {
                slot: slot as usize,
                t,
                alpha,
                falloff,
                clamped,
            });
            t *= 1.0 - alpha;
            if t < MIN_TRANSMITTANCE {
                break;
            }
        }
        t
    }

    /// Compositing weights `(gaussian index, a_i T_i)` of one pixel and the
    /// background weight `T_final`.
    pub fn pixel_weights(&self, x: usize, y: usize) -> (Vec<(usize, f64)>, f64) {
        let mut layers = Vec::new();
        let t = self.composite(x, y, &mut layers);
        (
            layers
                .iter()
                .map(|l| (self.splats[l.slot].index, l.alpha * l.t))
                .collect(),
            t,
        )
    }

    pub fn forward(&self) -> RenderOutput {
        let (w, h) = (self.camera.width, self.camera.height);
        let bg = self.camera.background;
        let rows = par::map_range(h, |y| {
            let mut layers = Vec::new();
            let mut rgb = Vec::with_capacity(w * 3);
            let mut alpha = Vec::with_capacity(w);
            let mut hasher = DefaultHasher::new();
            for x in 0..w {
                let t = self.composite(x, y, &mut layers);
                let mut c = bg * t;
                for l in &layers {
                    c += self.splats[l.slot].color * (l.alpha * l.t);
                    (self.splats[l.slot].index, l.clamped).hash(&mut hasher);
                }
                (layers.len(), t < MIN_TRANSMITTANCE).hash(&mut hasher);
                rgb.extend_from_slice(c.as_slice());
                alpha.push(1.0 - t);
            }
            (rgb, alpha, hasher.finish())
        });
        let mut data = Vec::with_capacity(w * h * 3);
        let mut alpha = Vec::with_capacity(w * h);
        let mut hasher = DefaultHasher::new();
        (self.gaussian_count, self.splats.len()).hash(&mut hasher);
        for (rgb, a, sig) in rows {
            data.extend(rgb);
            alpha.extend(a);
            sig.hash(&mut hasher);
        }
        RenderOutput {
            image: Image::from_data(w, h, data).expect("sized by construction"),
            alpha,
            signature: hasher.finish(),
        }
    }

    /// Gradients of `sum(d_image * image)` with respect to every Gaussian.
    pub fn backward(&self, d_image: &Image) -> Result<GaussianGrads> {
        let (w, h) = (self.camera.width, self.camera.height);
        if d_image.width() != w || d_image.height() != h {
            return Err(Error::ShapeMismatch(format!(
                "gradient image {}x{} for a {w}x{h} camera",
                d_image.width(),
                d_image.height()
            )));
        }
        let bg = self.camera.background;
        // Per row: (slot, [d_mean x, y, d_conic 00, 01, 11, d_opacity, d_color r, g, b]).
        let rows = par::map_range(h, |y| {
            let bucket = &self.rows[y];
            let mut acc = vec![[0.0f64; 9]; bucket.len()];
            if bucket.is_empty() {
                return acc;
            }
            let mut local = vec![usize::MAX; self.splats.len()];
            for (n, &slot) in bucket.iter().enumerate() {
                local[slot as usize] = n;
            }
            let mut layers = Vec::new();
            for x in 0..w {
                let g = d_image.pixel(x, y);
                let g = Vector3::new(g[0], g[1], g[2]);
                if g == Vector3::zeros() {
                    continue;
                }
                let t_final = self.composite(x, y, &mut layers);
                let p = Vector2::new(x as f64, y as f64);
                // Color contributed by everything behind the current layer.
                let mut behind = bg * t_final;
                for l in layers.iter().rev() {
                    let s = &self.splats[l.slot];
                    let a = &mut acc[local[l.slot]];
                    let weight = l.alpha * l.t;
                    let dc = g * weight;
                    a[6] += dc.x;
                    a[7] += dc.y;
                    a[8] += dc.z;
                    if !l.clamped {
                        let d_alpha = g.dot(&(s.color * l.t - behind / (1.0 - l.alpha)));
                        a[5] += d_alpha * l.falloff;
                        let d_power = d_alpha * s.opacity * l.falloff;
                        let d = p - s.mean;
                        let qd = s.conic * d;
                        a[0] += d_power * qd.x;
                        a[1] += d_power * qd.y;
                        a[2] += -0.5 * d_power * d.x * d.x;
                        a[3] += -0.5 * d_power * d.x * d.y;
                        a[4] += -0.5 * d_power * d.y * d.y;
                    }
                    behind += s.color * weight;
                }
            }
            acc
        });
        let mut acc2d = vec![[0.0f64; 9]; self.splats.len()];
        for (y, row) in rows.into_iter().enumerate() {
            for (n, v) in row.into_iter().enumerate() {
                let slot = self.rows[y][n] as usize;
                for c in 0..9 {
                    acc2d[slot][c] += v[c];
                }
            }
        }
        let mut grads = GaussianGrads::zeros(self.gaussian_count);
        let per_splat = par::map_range(self.splats.len(), |slot| {
            splat_backward(&self.splats[slot], &acc2d[slot], self.camera)
        });
        for (slot, (dp, dcov)) in per_splat.into_iter().enumerate() {
            let s = &self.splats[slot];
            let a = &acc2d[slot];
            grads.position[s.index] = dp;
            grads.covariance[s.index] = dcov;
            grads.opacity[s.index] = a[5];
            grads.color[s.index] = Vector3::new(a[6], a[7], a[8]);
        }
        Ok(grads)
    }
}

/// Carries 2D mean and conic gradients back to the world-space position and
/// covariance.
fn splat_backward(s: &Splat2D, a: &[f64; 9], camera: &Camera) -> (Vector3<f64>, Matrix3<f64>) {
    let w = &camera.rotation;
    let t = s.cam_mean;
    let (fx, fy) = (camera.fx, camera.fy);
    let iz = 1.0 / t.z;
    let d_conic = Matrix2::new(a[2], a[3], a[3], a[4]);
    let g2 = -(s.conic * d_conic * s.conic);
    let jp = camera.projection_jacobian(&t);
    let d_cov_cam = jp.transpose() * g2 * jp;
    let d_cov = w.transpose() * d_cov_cam * w;
    let d_jp = (g2 + g2.transpose()) * jp * s.cam_cov;
    let mut d_t = Vector3::new(a[0] * fx * iz, a[1] * fy * iz, -(a[0] * fx * t.x + a[1] * fy * t.y) * iz * iz);
    d_t.x += -d_jp[(0, 2)] * fx * iz * iz;
    d_t.y += -d_jp[(1, 2)] * fy * iz * iz;
    d_t.z += -d_jp[(0, 0)] * fx * iz * iz - d_jp[(1, 1)] * fy * iz * iz
        + 2.0 * d_jp[(0, 2)] * fx * t.x * iz * iz * iz
        + 2.0 * d_jp[(1, 2)] * fy * t.y * iz * iz * iz;
    (w.transpose() * d_t, d_cov)
}

/// Renders `set` through `camera`.
pub fn render(set: &GlobalGaussianSet, camera: &Camera) -> Result<RenderOutput> {
    Ok(Rasterizer::new(set, camera)?.forward())
}

/// Gradients of `sum(d_image * render(set, camera))`.
pub fn render_backward(set: &GlobalGaussianSet, camera: &Camera, d_image: &Image) -> Result<GaussianGrads> {
    Rasterizer::new(set, camera)?.backward(d_image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn axis_camera(size: usize) -> Camera {
        Camera {
            fx: 40.0,
            fy: 40.0,
            cx: (size as f64 - 1.0) / 2.0,
            cy: (size as f64 - 1.0) / 2.0,
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
            width: size,
            height: size,
            near: 0.1,
            far: 50.0,
            background: Vector3::new(0.1, 0.2, 0.3),
        }
    }

    fn single(p: Vector3<f64>, sigma: f64, color: Vector3<f64>, opacity: f64) -> GlobalGaussianSet {
        GlobalGaussianSet {
            positions: vec![p],
            covariances: vec![Matrix3::identity() * sigma * sigma],
            colors: vec![color],
            opacities: vec![opacity],
            source_texel: vec![(0, 0)],
        }
    }

    #[test]
    fn empty_set_renders_background() {
        let cam = axis_camera(8);
        let out = render(&GlobalGaussianSet::default(), &cam).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                assert_eq!(out.image.pixel(x, y), [0.1, 0.2, 0.3]);
            }
        }
        assert!(out.alpha.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn on_axis_projection_is_closed_form() {
        let cam = axis_camera(33);
        let (z, sigma) = (2.0, 0.1);
        let s = project(0, &Vector3::new(0.0, 0.0, z), &(Matrix3::identity() * sigma * sigma), &Vector3::zeros(), 1.0, &cam).unwrap();
        let expect = (cam.fx * sigma / z).powi(2) + LOW_PASS;
        assert!((s.cov - Matrix2::identity() * expect).amax() < 1e-12);
        assert!((s.mean - Vector2::new(cam.cx, cam.cy)).norm() < 1e-12);
    }

    #[test]
    fn behind_camera_is_culled() {
        let cam = axis_camera(16);
        assert!(project(0, &Vector3::new(0.0, 0.0, -1.0), &Matrix3::identity(), &Vector3::zeros(), 1.0, &cam).is_none());
    }

    #[test]
    fn rigid_motion_of_scene_and_camera_is_invisible() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cam = axis_camera(24);
        let set = random_set(&mut rng, 12);
        let r = crate::fixtures::random_rotation(&mut rng);
        let t = Vector3::new(0.3, -2.0, 1.0);
        let moved = GlobalGaussianSet {
            positions: set.positions.iter().map(|p| r * p + t).collect(),
            covariances: set.covariances.iter().map(|c| r * c * r.transpose()).collect(),
            ..set.clone()
        };
        let a = render(&set, &cam).unwrap();
        let b = render(&moved, &cam.moved_with(&r, &t)).unwrap();
        for (x, y) in a.image.data().iter().zip(b.image.data()) {
            assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn two_layers_composite_by_hand() {
        let cam = axis_camera(9);
        let mut set = single(Vector3::new(0.0, 0.0, 1.0), 0.05, Vector3::new(1.0, 0.0, 0.0), 0.6);
        set.positions.push(Vector3::new(0.0, 0.0, 2.0));
        set.covariances.push(Matrix3::identity() * 0.01);
        set.colors.push(Vector3::new(0.0, 0.0, 1.0));
        set.opacities.push(0.5);
        set.source_texel.push((1, 0));
        let out = render(&set, &cam).unwrap();
        // The center pixel sits exactly on both means.
        let px = out.image.pixel(4, 4);
        let (a, b) = (0.6, 0.5);
        assert!((px[0] - (a + (1.0 - a) * (1.0 - b) * 0.1)).abs() < 1e-12);
        assert!((px[2] - ((1.0 - a) * b + (1.0 - a) * (1.0 - b) * 0.3)).abs() < 1e-12);
    }

    #[test]
    fn opaque_center_and_falloff() {
        let cam = axis_camera(41);
        let (z, sigma) = (2.0, 0.15);
        let set = single(Vector3::new(0.0, 0.0, z), sigma, Vector3::new(1.0, 1.0, 1.0), 1.0);
        let out = render(&set, &cam).unwrap();
        let c = out.image.pixel(20, 20);
        assert!((c[0] - (0.999 + 0.001 * 0.1)).abs() < 1e-9);
        let var = (cam.fx * sigma / z).powi(2) + LOW_PASS;
        for dx in 1..8usize {
            let g = (-0.5 * (dx * dx) as f64 / var).exp();
            let a = g.min(MAX_ALPHA);
            let want = a + (1.0 - a) * 0.1;
            assert!((out.image.pixel(20 + dx, 20)[0] - want).abs() < 1e-3);
        }
    }

    fn random_set(rng: &mut ChaCha8Rng, n: usize) -> GlobalGaussianSet {
        let mut set = GlobalGaussianSet::default();
        for i in 0..n {
            set.positions.push(Vector3::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), rng.gen_range(2.0..3.0)));
            let a = Matrix3::from_fn(|_, _| rng.gen_range(-0.1..0.1));
            set.covariances.push(a * a.transpose() + Matrix3::identity() * 0.002);
            set.colors.push(Vector3::new(rng.gen(), rng.gen(), rng.gen()));
            set.opacities.push(rng.gen_range(0.2..0.9));
            set.source_texel.push((i, 0));
        }
        set
    }

    #[test]
    fn weights_and_background_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cam = axis_camera(20);
        let set = random_set(&mut rng, 30);
        let r = Rasterizer::new(&set, &cam).unwrap();
        for y in 0..20 {
            for x in 0..20 {
                let (w, bg) = r.pixel_weights(x, y);
                let total: f64 = w.iter().map(|p| p.1).sum::<f64>() + bg;
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_upstream_gradient_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cam = axis_camera(16);
        let set = random_set(&mut rng, 5);
        let g = render_backward(&set, &cam, &Image::new(16, 16)).unwrap();
        assert!(g.position.iter().all(|v| v.norm() == 0.0));
        assert!(g.covariance.iter().all(|v| v.norm() == 0.0));
        assert!(g.opacity.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn directional_derivative_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cam = axis_camera(24);
        let mut checked = 0;
        for _ in 0..20 {
            let set = random_set(&mut rng, 20);
            let weights = Image::from_data(24, 24, (0..24 * 24 * 3).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let loss = |s: &GlobalGaussianSet| {
                let out = render(s, &cam).unwrap();
                (out.image.data().iter().zip(weights.data()).map(|(a, b)| a * b).sum::<f64>(), out.signature)
            };
            let g = render_backward(&set, &cam, &weights).unwrap();
            let mut dir = set.clone();
            let mut predicted = 0.0;
            let h = 1e-5;
            let mut plus = set.clone();
            let mut minus = set.clone();
            for i in 0..set.len() {
                let dp = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.1;
                let b = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0)) * 1e-3;
                let dc = b + b.transpose();
                let dcol = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let dop = rng.gen_range(-1.0..1.0);
                predicted += g.position[i].dot(&dp) + g.covariance[i].component_mul(&dc).sum() + g.color[i].dot(&dcol) + g.opacity[i] * dop;
                plus.positions[i] += dp * h;
                minus.positions[i] -= dp * h;
                plus.covariances[i] += dc * h;
                minus.covariances[i] -= dc * h;
                plus.colors[i] += dcol * h;
                minus.colors[i] -= dcol * h;
                plus.opacities[i] += dop * h;
                minus.opacities[i] -= dop * h;
                dir.positions[i] = dp;
            }
            let (lp, sp) = loss(&plus);
            let (lm, sm) = loss(&minus);
            let (_, s0) = loss(&set);
            if sp != s0 || sm != s0 {
                continue;
            }
            let fd = (lp - lm) / (2.0 * h);
            assert!((fd - predicted).abs() <= 1e-4 * fd.abs().max(predicted.abs()).max(1e-3), "{fd} vs {predicted}");
            checked += 1;
        }
        assert!(checked >= 10);
    }
}
