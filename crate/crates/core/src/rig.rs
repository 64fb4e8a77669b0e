//! Local texel-space Gaussian attributes and their lift into world space.
//!
//! Two lifts are provided. The naive lift transforms each texel's Gaussian
//! by the frame of the face covering it, which is discontinuous across face
//! boundaries. The Quasi-Phong lift first forms per-texel world candidates
//! `P = J mu + T` and `C = J Sigma J^T` from the texel Jacobian field, then
//! resamples both grids on the corner lattice so that Gaussians near a seam
//! see a blend of the neighboring faces' deformations. Both are linear in
//! the local position and covariance, which makes their pullbacks simple.

use nalgebra::{Matrix3, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::{FaceFrame, TriMesh};
use crate::par;
use crate::texel::{
    build_jacobian_field, corner_lattice_stencils, dilate, FaceIdMap, JacobianField, Stencil,
    TexelGrid, ValidityMask,
};

/// Geometry channels per texel: position 3, rotation 4, log-scale 3, opacity 1.
pub const GEOMETRY_CHANNELS: usize = 11;
pub const COLOR_CHANNELS: usize = 3;
const MIN_QUAT_NORM: f64 = 1e-8;

#[cfg(feature = "fault-injection")]
pub mod fault {
    use std::sync::atomic::{AtomicBool, Ordering};

    static FLIP_COV_PULLBACK: AtomicBool = AtomicBool::new(false);

    /// Negates the covariance pullback in every lift backward pass.
    pub fn set_cov_pullback_sign_flip(on: bool) {
        FLIP_COV_PULLBACK.store(on, Ordering::SeqCst);
    }

    pub(crate) fn cov_pullback_sign() -> f64 {
        if FLIP_COV_PULLBACK.load(Ordering::SeqCst) {
            -1.0
        } else {
            1.0
        }
    }
}

#[cfg(not(feature = "fault-injection"))]
mod fault {
    #[inline(always)]
    pub(crate) fn cov_pullback_sign() -> f64 {
        1.0
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Rotation matrix of the normalized quaternion `(w, x, y, z)`.
pub fn quat_to_matrix(q: &Vector4<f64>) -> Matrix3<f64> {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// Pullback of `dL/dR` onto the unit quaternion that produced `R`.
fn quat_matrix_backward(q: &Vector4<f64>, g: &Matrix3<f64>) -> Vector4<f64> {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    let dw = -z * g[(0, 1)] + y * g[(0, 2)] + z * g[(1, 0)] - x * g[(1, 2)] - y * g[(2, 0)]
        + x * g[(2, 1)];
    let dx = y * g[(0, 1)] + z * g[(0, 2)] + y * g[(1, 0)] - 2.0 * x * g[(1, 1)] - w * g[(1, 2)]
        + z * g[(2, 0)]
        + w * g[(2, 1)]
        - 2.0 * x * g[(2, 2)];
    let dy = -2.0 * y * g[(0, 0)] + x * g[(0, 1)] + w * g[(0, 2)] + x * g[(1, 0)] + z * g[(1, 2)]
        - w * g[(2, 0)]
        + z * g[(2, 1)]
        - 2.0 * y * g[(2, 2)];
    let dz = -2.0 * z * g[(0, 0)] - w * g[(0, 1)] + x * g[(0, 2)] + w * g[(1, 0)]
        - 2.0 * z * g[(1, 1)]
        + y * g[(1, 2)]
        + x * g[(2, 0)]
        + y * g[(2, 1)];
    Vector4::new(dw, dx, dy, dz) * 2.0
}

/// `Sigma = R S S^T R^T` with `R` from the normalized quaternion and
/// `S = diag(exp(log_scale))`.
pub fn assemble_local_covariance(rotation_raw: &[f64], log_scale_raw: &[f64]) -> Result<Matrix3<f64>> {
    let q = Vector4::from_column_slice(rotation_raw);
    let n = q.norm();
    if !(n > MIN_QUAT_NORM) {
        return Err(Error::ZeroQuaternion { texel: None });
    }
    let r = quat_to_matrix(&(q / n));
    let s2 = Vector3::new(
        (2.0 * log_scale_raw[0]).exp(),
        (2.0 * log_scale_raw[1]).exp(),
        (2.0 * log_scale_raw[2]).exp(),
    );
    let sigma = r * Matrix3::from_diagonal(&s2) * r.transpose();
    Ok((sigma + sigma.transpose()) * 0.5)
}

/// Gradients of [`assemble_local_covariance`] with respect to the raw
/// quaternion and log-scales, given `dL/dSigma` (any square matrix; only
/// its symmetric part matters).
pub fn local_covariance_backward(
    rotation_raw: &[f64],
    log_scale_raw: &[f64],
    d_sigma: &Matrix3<f64>,
) -> ([f64; 4], [f64; 3]) {
    let raw = Vector4::from_column_slice(rotation_raw);
    let n = raw.norm();
    let q = raw / n;
    let r = quat_to_matrix(&q);
    let s = Vector3::new(
        log_scale_raw[0].exp(),
        log_scale_raw[1].exp(),
        log_scale_raw[2].exp(),
    );
    // Sigma = M M^T with M = R diag(s).
    let m = Matrix3::from_columns(&[r.column(0) * s[0], r.column(1) * s[1], r.column(2) * s[2]]);
    let d_m = (d_sigma + d_sigma.transpose()) * m;
    let mut d_r = Matrix3::zeros();
    let mut d_log_scale = [0.0; 3];
    for c in 0..3 {
        d_r.set_column(c, &(d_m.column(c) * s[c]));
        d_log_scale[c] = d_m.column(c).dot(&r.column(c)) * s[c];
    }
    let d_q = quat_matrix_backward(&q, &d_r);
    let d_raw = (d_q - q * q.dot(&d_q)) / n;
    ([d_raw[0], d_raw[1], d_raw[2], d_raw[3]], d_log_scale)
}

/// Raw, pre-activation local attributes on the texel grid. All grids share
/// one size; `mask` marks texels that host a Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAttributeMaps {
    /// Local position, mesh units (identity activation).
    pub position: TexelGrid,
    /// Unnormalized quaternion `(w, x, y, z)`.
    pub rotation: TexelGrid,
    pub log_scale: TexelGrid,
    /// Opacity logit.
    pub opacity: TexelGrid,
    /// RGB logits.
    pub color: TexelGrid,
    pub mask: ValidityMask,
}

/// Section names used when storing maps in a texel container.
pub const SECTION_NAMES: [&str; 5] = ["position", "rotation", "log_scale", "opacity", "color"];

impl LocalAttributeMaps {
    pub fn constant(
        mask: ValidityMask,
        position: [f64; 3],
        rotation: [f64; 4],
        log_scale: [f64; 3],
        opacity_logit: f64,
        color_logit: [f64; 3],
    ) -> Self {
        let (w, h) = (mask.width(), mask.height());
        Self {
            position: TexelGrid::filled(w, h, &position),
            rotation: TexelGrid::filled(w, h, &rotation),
            log_scale: TexelGrid::filled(w, h, &log_scale),
            opacity: TexelGrid::filled(w, h, &[opacity_logit]),
            color: TexelGrid::filled(w, h, &color_logit),
            mask,
        }
    }

    /// Maps whose Gaussians sit on the rest surface at their texel centers:
    /// the local position is the rest surface point minus the covering
    /// face's rest centroid. Values are padded `rings` texels past the chart
    /// so that resampling near chart borders sees consistent neighbors.
    pub fn surface_anchored(
        rest: &TriMesh,
        face_map: &FaceIdMap,
        rings: usize,
        log_scale: f64,
        opacity_logit: f64,
        color_logit: impl Fn(usize, usize) -> [f64; 3],
    ) -> Self {
        let mut mask = face_map.validity_mask();
        let (w, h) = (mask.width(), mask.height());
        let mut maps = Self::constant(
            mask.clone(),
            [0.0; 3],
            [1.0, 0.0, 0.0, 0.0],
            [log_scale; 3],
            opacity_logit,
            [0.0; 3],
        );
        for (k, hit) in face_map.hits().iter().enumerate() {
            if let Some(hit) = hit {
                let local = rest.face_point(hit.face, hit.bary) - rest.face_centroid(hit.face);
                maps.position.texel_mut(k).copy_from_slice(local.as_slice());
                maps.color.texel_mut(k).copy_from_slice(&color_logit(k % w, k / w));
            }
        }
        let _ = h;
        dilate(&mut [&mut maps.position, &mut maps.color], &mut mask, rings);
        maps
    }

    /// Isotropic log-scale that roughly tiles the surface with one Gaussian
    /// per texel, scaled by `factor`.
    pub fn texel_log_scale(rest: &TriMesh, face_map: &FaceIdMap, factor: f64) -> f64 {
        let area3d: f64 = (0..rest.face_count()).map(|f| rest.face_area(f)).sum();
        let area_uv: f64 = (0..rest.face_count())
            .map(|f| {
                let [a, b, c] = rest.face_uvs(f);
                0.5 * ((b - a).x * (c - a).y - (b - a).y * (c - a).x).abs()
            })
            .sum();
        let texel_uv = 1.0 / (face_map.width() * face_map.height()) as f64;
        let spacing = (area3d / area_uv.max(1e-12) * texel_uv).sqrt();
        (factor * spacing).ln()
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn height(&self) -> usize {
        self.mask.height()
    }

    pub fn grids(&self) -> [&TexelGrid; 5] {
        [
            &self.position,
            &self.rotation,
            &self.log_scale,
            &self.opacity,
            &self.color,
        ]
    }

    pub fn grids_mut(&mut self) -> [&mut TexelGrid; 5] {
        [
            &mut self.position,
            &mut self.rotation,
            &mut self.log_scale,
            &mut self.opacity,
            &mut self.color,
        ]
    }

    /// Adds uniform noise in `[-amplitude, amplitude]` to every raw value.
    pub fn perturbed(&self, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for grid in out.grids_mut() {
            for v in grid.data_mut() {
                *v += rng.gen_range(-amplitude..=amplitude);
            }
        }
        out
    }

    pub fn check_shapes(&self) -> Result<()> {
        let arities = [3, 4, 3, 1, 3];
        for (grid, arity) in self.grids().iter().zip(arities) {
            if grid.width() != self.width() || grid.height() != self.height() || grid.arity() != arity
            {
                return Err(Error::ShapeMismatch(format!(
                    "attribute grid {}x{}x{} does not match {}x{}x{arity}",
                    grid.width(),
                    grid.height(),
                    grid.arity(),
                    self.width(),
                    self.height()
                )));
            }
        }
        Ok(())
    }

    fn local_covariance(&self, k: usize) -> Result<Matrix3<f64>> {
        assemble_local_covariance(self.rotation.texel(k), self.log_scale.texel(k)).map_err(|_| {
            Error::ZeroQuaternion {
                texel: Some((k % self.width(), k / self.width())),
            }
        })
    }

    fn local_position(&self, k: usize) -> Vector3<f64> {
        Vector3::from_column_slice(self.position.texel(k))
    }

    fn activated_color(&self, k: usize) -> Vector3<f64> {
        Vector3::from_iterator(self.color.texel(k).iter().map(|&c| sigmoid(c)))
    }
}

/// Gradients with the same layout as [`LocalAttributeMaps`]' raw grids.
#[derive(Debug, Clone, PartialEq)]
pub struct MapGradients {
    pub position: Vec<f64>,
    pub rotation: Vec<f64>,
    pub log_scale: Vec<f64>,
    pub opacity: Vec<f64>,
    pub color: Vec<f64>,
}

impl MapGradients {
    pub fn zeros(texels: usize) -> Self {
        Self {
            position: vec![0.0; texels * 3],
            rotation: vec![0.0; texels * 4],
            log_scale: vec![0.0; texels * 3],
            opacity: vec![0.0; texels],
            color: vec![0.0; texels * 3],
        }
    }

    pub fn groups(&self) -> [&[f64]; 5] {
        [
            &self.position,
            &self.rotation,
            &self.log_scale,
            &self.opacity,
            &self.color,
        ]
    }

    pub fn groups_mut(&mut self) -> [&mut Vec<f64>; 5] {
        [
            &mut self.position,
            &mut self.rotation,
            &mut self.log_scale,
            &mut self.opacity,
            &mut self.color,
        ]
    }

    pub fn add_scaled(&mut self, other: &MapGradients, scale: f64) {
        for (a, b) in self.groups_mut().into_iter().zip(other.groups()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.groups()
            .iter()
            .flat_map(|g| g.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// World-space Gaussians in texel order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GlobalGaussianSet {
    pub positions: Vec<Vector3<f64>>,
    pub covariances: Vec<Matrix3<f64>>,
    pub colors: Vec<Vector3<f64>>,
    pub opacities: Vec<f64>,
    pub source_texel: Vec<(usize, usize)>,
}

/// True when `sigma` is symmetric within 1e-7 (relative to its largest
/// entry) and its smallest eigenvalue is at least `-1e-9 * trace`.
pub fn is_psd(sigma: &Matrix3<f64>) -> bool {
    if !sigma.iter().all(|v| v.is_finite()) {
        return false;
    }
    let scale = sigma.amax().max(1e-300);
    if (sigma - sigma.transpose()).amax() > 1e-7 * scale.max(1.0) {
        return false;
    }
    let sym = (sigma + sigma.transpose()) * 0.5;
    let min_eig = sym.symmetric_eigenvalues().min();
    min_eig >= -1e-9 * sym.trace().abs()
}

impl GlobalGaussianSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Checks list lengths and the PSD invariant of every covariance.
    pub fn validate(&self) -> Result<()> {
        let n = self.positions.len();
        if [
            self.covariances.len(),
            self.colors.len(),
            self.opacities.len(),
            self.source_texel.len(),
        ]
        .iter()
        .any(|&m| m != n)
        {
            return Err(Error::ShapeMismatch("gaussian attribute lists differ in length".into()));
        }
        if let Some(index) = self.covariances.iter().position(|c| !is_psd(c)) {
            return Err(Error::NonPsd { index });
        }
        Ok(())
    }
}

/// Per-Gaussian gradients of a scalar loss.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianGrads {
    pub position: Vec<Vector3<f64>>,
    /// Full 3x3 gradient; `dL = sum_ij G_ij dSigma_ij`.
    pub covariance: Vec<Matrix3<f64>>,
    pub color: Vec<Vector3<f64>>,
    pub opacity: Vec<f64>,
}

impl GaussianGrads {
    pub fn zeros(n: usize) -> Self {
        Self {
            position: vec![Vector3::zeros(); n],
            covariance: vec![Matrix3::zeros(); n],
            color: vec![Vector3::zeros(); n],
            opacity: vec![0.0; n],
        }
    }

    pub fn add_assign(&mut self, other: &GaussianGrads) {
        for (a, b) in self.position.iter_mut().zip(&other.position) {
            *a += b;
        }
        for (a, b) in self.covariance.iter_mut().zip(&other.covariance) {
            *a += b;
        }
        for (a, b) in self.color.iter_mut().zip(&other.color) {
            *a += b;
        }
        for (a, b) in self.opacity.iter_mut().zip(&other.opacity) {
            *a += b;
        }
    }
}

/// Which lift to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftVariant {
    Naive,
    #[default]
    QuasiPhong,
}

impl LiftVariant {
    pub fn name(self) -> &'static str {
        match self {
            LiftVariant::Naive => "naive",
            LiftVariant::QuasiPhong => "quasi_phong",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "naive" => Some(LiftVariant::Naive),
            "quasi_phong" => Some(LiftVariant::QuasiPhong),
            _ => None,
        }
    }
}

/// Precomputed lift for a fixed Jacobian field and mask; reusable across
/// optimizer steps.
#[derive(Debug, Clone)]
pub struct LiftPlan {
    variant: LiftVariant,
    width: usize,
    height: usize,
    jacobians: Vec<Matrix3<f64>>,
    translations: Vec<Vector3<f64>>,
    /// Texel index of each output Gaussian.
    outputs: Vec<usize>,
    /// Quasi-Phong only: one stencil per output.
    stencils: Vec<Stencil>,
    /// Texels read by any stencil, sorted.
    sources: Vec<usize>,
}

impl LiftPlan {
    /// Per-face lift: each valid texel uses its covering face's frame.
    pub fn naive(face_map: &FaceIdMap, frames: &[FaceFrame]) -> Result<Self> {
        let field = build_jacobian_field(frames, face_map)?;
        Ok(Self::naive_from_field(&field))
    }

    /// Per-face lift from an undilated field (valid texels carry their
    /// face's frame verbatim).
    pub fn naive_from_field(field: &JacobianField) -> Self {
        let n = field.width() * field.height();
        let outputs = field.mask.valid_indices();
        Self {
            variant: LiftVariant::Naive,
            width: field.width(),
            height: field.height(),
            jacobians: (0..n).map(|k| field.jacobian(k)).collect(),
            translations: (0..n).map(|k| field.translation(k)).collect(),
            sources: outputs.clone(),
            outputs,
            stencils: Vec::new(),
        }
    }

    /// Quasi-Phong lift over a (typically dilated) field.
    pub fn quasi_phong(field: &JacobianField) -> Result<Self> {
        let n = field.width() * field.height();
        let outputs = field.mask.valid_indices();
        let all = corner_lattice_stencils(&field.mask);
        let mut stencils = Vec::with_capacity(outputs.len());
        let mut used = vec![false; n];
        for &k in &outputs {
            let st = all[k].ok_or(Error::AllNeighborsInvalid {
                i: k % field.width(),
                j: k / field.width(),
            })?;
            for &(src, _) in st.taps() {
                used[src] = true;
            }
            stencils.push(st);
        }
        Ok(Self {
            variant: LiftVariant::QuasiPhong,
            width: field.width(),
            height: field.height(),
            jacobians: (0..n).map(|k| field.jacobian(k)).collect(),
            translations: (0..n).map(|k| field.translation(k)).collect(),
            outputs,
            stencils,
            sources: (0..n).filter(|&k| used[k]).collect(),
        })
    }

    pub fn variant(&self) -> LiftVariant {
        self.variant
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn stencils(&self) -> &[Stencil] {
        &self.stencils
    }

    pub fn jacobian(&self, k: usize) -> &Matrix3<f64> {
        &self.jacobians[k]
    }

    fn check(&self, local: &LocalAttributeMaps) -> Result<()> {
        local.check_shapes()?;
        if local.width() != self.width || local.height() != self.height {
            return Err(Error::ShapeMismatch(format!(
                "maps are {}x{}, field is {}x{}",
                local.width(),
                local.height(),
                self.width,
                self.height
            )));
        }
        Ok(())
    }

    /// Per-texel world candidates `J mu + T` and `J Sigma J^T` at `texels`.
    fn candidates(
        &self,
        local: &LocalAttributeMaps,
        texels: &[usize],
    ) -> Result<Vec<(Vector3<f64>, Matrix3<f64>)>> {
        par::map_range(texels.len(), |n| {
            let k = texels[n];
            let j = &self.jacobians[k];
            let sigma = local.local_covariance(k)?;
            Ok((
                j * local.local_position(k) + self.translations[k],
                j * sigma * j.transpose(),
            ))
        })
        .into_iter()
        .collect()
    }

    pub fn lift(&self, local: &LocalAttributeMaps) -> Result<GlobalGaussianSet> {
        self.check(local)?;
        let (positions, covariances) = match self.variant {
            LiftVariant::Naive => self.candidates(local, &self.outputs)?.into_iter().unzip(),
            LiftVariant::QuasiPhong => {
                let cand = self.candidates(local, &self.sources)?;
                let mut slot = vec![usize::MAX; self.width * self.height];
                for (n, &k) in self.sources.iter().enumerate() {
                    slot[k] = n;
                }
                self.stencils
                    .iter()
                    .map(|st| {
                        let mut p = Vector3::zeros();
                        let mut c = Matrix3::zeros();
                        for &(k, w) in st.taps() {
                            let (pk, ck) = &cand[slot[k]];
                            p += pk * w;
                            c += ck * w;
                        }
                        (p, (c + c.transpose()) * 0.5)
                    })
                    .unzip()
            }
        };
        let w = self.width;
        Ok(GlobalGaussianSet {
            positions,
            covariances,
            colors: self.outputs.iter().map(|&k| local.activated_color(k)).collect(),
            opacities: self
                .outputs
                .iter()
                .map(|&k| sigmoid(local.opacity.texel(k)[0]))
                .collect(),
            source_texel: self.outputs.iter().map(|&k| (k % w, k / w)).collect(),
        })
    }

    /// Pulls per-Gaussian gradients back onto the raw local maps.
    pub fn backward(&self, local: &LocalAttributeMaps, grads: &GaussianGrads) -> MapGradients {
        let n = self.width * self.height;
        let mut out = MapGradients::zeros(n);
        let mut d_pos = vec![Vector3::zeros(); n];
        let mut d_cov = vec![Matrix3::zeros(); n];
        match self.variant {
            LiftVariant::Naive => {
                for (o, &k) in self.outputs.iter().enumerate() {
                    d_pos[k] += grads.position[o];
                    d_cov[k] += grads.covariance[o];
                }
            }
            LiftVariant::QuasiPhong => {
                for (o, st) in self.stencils.iter().enumerate() {
                    let g = grads.covariance[o];
                    let sym = (g + g.transpose()) * 0.5;
                    for &(k, w) in st.taps() {
                        d_pos[k] += grads.position[o] * w;
                        d_cov[k] += sym * w;
                    }
                }
            }
        }
        let sign = fault::cov_pullback_sign();
        let pulled = par::map_range(self.sources.len(), |s| {
            let k = self.sources[s];
            let j = &self.jacobians[k];
            let dp = j.transpose() * d_pos[k];
            let dsig = j.transpose() * d_cov[k] * j * sign;
            let (dq, dls) =
                local_covariance_backward(local.rotation.texel(k), local.log_scale.texel(k), &dsig);
            (dp, dq, dls)
        });
        for (&k, (dp, dq, dls)) in self.sources.iter().zip(pulled) {
            out.position[k * 3..k * 3 + 3].copy_from_slice(dp.as_slice());
            out.rotation[k * 4..k * 4 + 4].copy_from_slice(&dq);
            out.log_scale[k * 3..k * 3 + 3].copy_from_slice(&dls);
        }
        for (o, &k) in self.outputs.iter().enumerate() {
            let a = sigmoid(local.opacity.texel(k)[0]);
            out.opacity[k] = grads.opacity[o] * a * (1.0 - a);
            for c in 0..3 {
                let s = sigmoid(local.color.texel(k)[c]);
                out.color[k * 3 + c] = grads.color[o][c] * s * (1.0 - s);
            }
        }
        out
    }

    /// Back-propagated local position gradient per output-source texel:
    /// `J^T g` with `g` the accumulated world-position gradient. Exposed for
    /// the gradient-bound property.
    pub fn position_pullback(&self, grads: &[Vector3<f64>]) -> Vec<(usize, Vector3<f64>, Vector3<f64>)> {
        let n = self.width * self.height;
        let mut d_pos = vec![Vector3::zeros(); n];
        match self.variant {
            LiftVariant::Naive => {
                for (o, &k) in self.outputs.iter().enumerate() {
                    d_pos[k] += grads[o];
                }
            }
            LiftVariant::QuasiPhong => {
                for (o, st) in self.stencils.iter().enumerate() {
                    for &(k, w) in st.taps() {
                        d_pos[k] += grads[o] * w;
                    }
                }
            }
        }
        self.sources
            .iter()
            .map(|&k| (k, d_pos[k], self.jacobians[k].transpose() * d_pos[k]))
            .collect()
    }
}

/// Per-face lift of every valid texel.
pub fn lift_naive(
    local: &LocalAttributeMaps,
    face_map: &FaceIdMap,
    frames: &[FaceFrame],
) -> Result<GlobalGaussianSet> {
    LiftPlan::naive(face_map, frames)?.lift(local)
}

/// Quasi-Phong lift over `field`, which should already be dilated.
pub fn lift_quasi_phong(local: &LocalAttributeMaps, field: &JacobianField) -> Result<GlobalGaussianSet> {
    LiftPlan::quasi_phong(field)?.lift(local)
}
