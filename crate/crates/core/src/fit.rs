//! Total objective over several posed frames and an Adam loop that fits the
//! raw local attribute maps against target images.

use std::io::Write;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::loss::{
    add_reg_position_grad, add_reg_scale_grad, loss_l1, loss_l1_grad, loss_reg_position,
    loss_reg_scale, loss_ssim, loss_ssim_grad,
};
use crate::mesh::{all_face_frames, FrameVariant, MeshPair};
use crate::par;
use crate::render::{Camera, Rasterizer};
use crate::rig::{LiftPlan, LiftVariant, LocalAttributeMaps, MapGradients};
use crate::texel::{build_jacobian_field, dilate_field, FaceIdMap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub lambda_l1: f64,
    pub lambda_ssim: f64,
    pub lambda_reg_mu: f64,
    pub lambda_reg_s: f64,
    /// Local position bound, mesh units.
    pub eps_mu: f64,
    /// Local scale bound, mesh units.
    pub eps_s: f64,
}

impl LossWeights {
    /// L1/SSIM split 0.8/0.2 and bounds of 1.0 and 0.6 mean rest edge lengths.
    pub fn for_edge_length(edge: f64) -> Self {
        Self {
            lambda_l1: 0.8,
            lambda_ssim: 0.2,
            lambda_reg_mu: 1.0,
            lambda_reg_s: 1.0,
            eps_mu: edge,
            eps_s: 0.6 * edge,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.lambda_l1,
            self.lambda_ssim,
            self.lambda_reg_mu,
            self.lambda_reg_s,
            self.eps_mu,
            self.eps_s,
        ];
        if all.iter().all(|v| v.is_finite() && *v >= 0.0) {
            Ok(())
        } else {
            Err(Error::Format("loss weights must be finite and non-negative".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningRates {
    pub position: f64,
    pub rotation: f64,
    pub log_scale: f64,
    pub opacity: f64,
    pub color: f64,
}

impl Default for LearningRates {
    fn default() -> Self {
        Self {
            position: 1.6e-4,
            rotation: 1e-3,
            log_scale: 1e-3,
            opacity: 5e-2,
            color: 2.5e-3,
        }
    }
}

impl LearningRates {
    fn groups(&self) -> [f64; 5] {
        [
            self.position,
            self.rotation,
            self.log_scale,
            self.opacity,
            self.color,
        ]
    }
}

/// One posed observation: the lift for its deformed mesh, a camera and the
/// target image.
#[derive(Debug, Clone)]
pub struct FitFrame {
    pub plan: LiftPlan,
    pub camera: Camera,
    pub target: Image,
}

/// Lift plan for a rest/deformed pair: frames, texel field, dilation, then
/// the chosen lift.
pub fn build_plan(
    pair: &MeshPair,
    face_map: &FaceIdMap,
    frame_variant: FrameVariant,
    rings: usize,
    variant: LiftVariant,
) -> Result<LiftPlan> {
    let frames = all_face_frames(pair, frame_variant)?;
    let field = build_jacobian_field(&frames, face_map)?;
    match variant {
        LiftVariant::Naive => Ok(LiftPlan::naive_from_field(&field)),
        LiftVariant::QuasiPhong => LiftPlan::quasi_phong(&dilate_field(&field, rings)),
    }
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub iterations: usize,
    pub learning_rates: LearningRates,
    pub betas: (f64, f64),
    pub epsilon: f64,
    pub seed: u64,
    pub weights: LossWeights,
    pub frames: Vec<FitFrame>,
}

impl FitConfig {
    pub fn new(frames: Vec<FitFrame>, weights: LossWeights, iterations: usize) -> Self {
        Self {
            iterations,
            learning_rates: LearningRates::default(),
            betas: (0.9, 0.999),
            epsilon: 1e-15,
            seed: 0,
            weights,
            frames,
        }
    }
}

/// Loss terms at one evaluation. `l1` and `ssim` are frame means of the
/// raw terms (`ssim` holds `1 - SSIM`); `total` includes the weights.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossBreakdown {
    pub total: f64,
    pub l1: f64,
    pub ssim: f64,
    pub reg_mu: f64,
    pub reg_s: f64,
}

impl LossBreakdown {
    pub fn is_finite(&self) -> bool {
        [self.total, self.l1, self.ssim, self.reg_mu, self.reg_s]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Renders every frame from the current maps.
pub fn render_frames(frames: &[FitFrame], local: &LocalAttributeMaps) -> Result<Vec<Image>> {
    par::map_range(frames.len(), |f| {
        let set = frames[f].plan.lift(local)?;
        Ok(Rasterizer::new(&set, &frames[f].camera)?.forward().image)
    })
    .into_iter()
    .collect()
}

/// Objective value only.
pub fn total_loss_value(
    frames: &[FitFrame],
    local: &LocalAttributeMaps,
    weights: &LossWeights,
) -> Result<LossBreakdown> {
    let images = render_frames(frames, local)?;
    let mut out = LossBreakdown::default();
    let n = frames.len().max(1) as f64;
    for (img, frame) in images.iter().zip(frames) {
        out.l1 += loss_l1(img, &frame.target)? / n;
        out.ssim += loss_ssim(img, &frame.target)? / n;
    }
    out.reg_mu = loss_reg_position(local, weights.eps_mu);
    out.reg_s = loss_reg_scale(local, weights.eps_s);
    out.total = weights.lambda_l1 * out.l1
        + weights.lambda_ssim * out.ssim
        + weights.lambda_reg_mu * out.reg_mu
        + weights.lambda_reg_s * out.reg_s;
    Ok(out)
}

/// Objective and its gradient with respect to every raw local map value.
pub fn total_loss(
    frames: &[FitFrame],
    local: &LocalAttributeMaps,
    weights: &LossWeights,
) -> Result<(LossBreakdown, MapGradients)> {
    let n = frames.len().max(1) as f64;
    let per_frame = par::map_range(frames.len(), |f| -> Result<(f64, f64, MapGradients)> {
        let frame = &frames[f];
        let set = frame.plan.lift(local)?;
        let raster = Rasterizer::new(&set, &frame.camera)?;
        let image = raster.forward().image;
        let l1 = loss_l1(&image, &frame.target)?;
        let ssim = loss_ssim(&image, &frame.target)?;
        let g1 = loss_l1_grad(&image, &frame.target)?;
        let gs = loss_ssim_grad(&image, &frame.target)?;
        let d_image = Image::from_data(
            image.width(),
            image.height(),
            g1.data()
                .iter()
                .zip(gs.data())
                .map(|(a, b)| (weights.lambda_l1 * a + weights.lambda_ssim * b) / n)
                .collect(),
        )?;
        let grads = raster.backward(&d_image)?;
        Ok((l1, ssim, frame.plan.backward(local, &grads)))
    });
    let texels = local.width() * local.height();
    let mut grads = MapGradients::zeros(texels);
    let mut out = LossBreakdown::default();
    for r in per_frame {
        let (l1, ssim, g) = r?;
        out.l1 += l1 / n;
        out.ssim += ssim / n;
        grads.add_scaled(&g, 1.0);
    }
    out.reg_mu = loss_reg_position(local, weights.eps_mu);
    out.reg_s = loss_reg_scale(local, weights.eps_s);
    add_reg_position_grad(local, weights.eps_mu, weights.lambda_reg_mu, &mut grads);
    add_reg_scale_grad(local, weights.eps_s, weights.lambda_reg_s, &mut grads);
    out.total = weights.lambda_l1 * out.l1
        + weights.lambda_ssim * out.ssim
        + weights.lambda_reg_mu * out.reg_mu
        + weights.lambda_reg_s * out.reg_s;
    Ok((out, grads))
}

/// Adam moments for the five parameter groups.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimState {
    pub m: MapGradients,
    pub v: MapGradients,
    pub step: u64,
}

impl OptimState {
    pub fn new(texels: usize) -> Self {
        Self {
            m: MapGradients::zeros(texels),
            v: MapGradients::zeros(texels),
            step: 0,
        }
    }

    /// One bias-corrected Adam update of `local` in place.
    pub fn step(
        &mut self,
        local: &mut LocalAttributeMaps,
        grads: &MapGradients,
        lr: &LearningRates,
        betas: (f64, f64),
        epsilon: f64,
    ) {
        self.step += 1;
        let (b1, b2) = betas;
        let c1 = 1.0 - b1.powi(self.step as i32);
        let c2 = 1.0 - b2.powi(self.step as i32);
        let rates = lr.groups();
        let params = local.grids_mut();
        let ms = self.m.groups_mut();
        let vs = self.v.groups_mut();
        for ((((p, m), v), g), rate) in params.into_iter().zip(ms).zip(vs).zip(grads.groups()).zip(rates) {
            for (((x, m), v), g) in p.data_mut().iter_mut().zip(m.iter_mut()).zip(v.iter_mut()).zip(g) {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *x -= rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub loss: LossBreakdown,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub maps: LocalAttributeMaps,
    /// Loss before each update.
    pub trace: Vec<TraceRow>,
}

/// Runs `config.iterations` Adam steps from `initial`. `progress` is called
/// after each evaluated iteration.
pub fn fit_with_progress(
    config: &FitConfig,
    initial: &LocalAttributeMaps,
    mut progress: impl FnMut(&TraceRow),
) -> Result<FitResult> {
    config.weights.validate()?;
    initial.check_shapes()?;
    let mut maps = initial.clone();
    let mut state = OptimState::new(maps.width() * maps.height());
    let mut trace = Vec::with_capacity(config.iterations);
    for iteration in 0..config.iterations {
        let (loss, grads) = total_loss(&config.frames, &maps, &config.weights)?;
        if !loss.is_finite() || !grads.groups().iter().all(|g| g.iter().all(|v| v.is_finite())) {
            return Err(Error::NonFiniteLoss { iteration });
        }
        let row = TraceRow { iteration, loss };
        progress(&row);
        trace.push(row);
        state.step(&mut maps, &grads, &config.learning_rates, config.betas, config.epsilon);
    }
    Ok(FitResult { maps, trace })
}

pub fn fit(config: &FitConfig, initial: &LocalAttributeMaps) -> Result<FitResult> {
    fit_with_progress(config, initial, |_| {})
}

/// CSV with header `iteration,total,l1,ssim,reg_mu,reg_s`.
pub fn write_trace_csv(w: &mut impl Write, trace: &[TraceRow]) -> Result<()> {
    writeln!(w, "iteration,total,l1,ssim,reg_mu,reg_s")?;
    for r in trace {
        let l = &r.loss;
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e},{:e}",
            r.iteration, l.total, l.l1, l.ssim, l.reg_mu, l.reg_s
        )?;
    }
    Ok(())
}
