//! Built-in invariant suites run by `texrig validate` and the acceptance
//! tests. Every check builds its own fixtures from a seed and reports a
//! pass flag, a one-line detail and its runtime.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::gradient_scaling_report;
use crate::error::Result;
use crate::export::{read_ply, write_ply};
use crate::fit::{total_loss, FitFrame, LossWeights};
use crate::fixtures;
use crate::loss::{loss_l1, loss_reg_position, loss_reg_scale, loss_ssim};
use crate::mesh::{all_face_frames, FrameVariant, MeshPair};
use crate::render::{Camera, Rasterizer, LOW_PASS, MAX_ALPHA};
use crate::rig::{GlobalGaussianSet, LiftPlan, LiftVariant, LocalAttributeMaps};
use crate::scenes::gradient_scene;
use crate::texel::{
    build_jacobian_field, corner_lattice_resample, dilate_field, rasterize_faces, sample_bilinear,
    JacobianField, TexelGrid, TexelState, ValidityMask,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:<22} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn rel_frobenius(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Affine deformations of a 200-face sphere: face frames against the
/// affine's linear part, then the two lifts against each other.
pub fn check_affine_oracle(trials: usize, seed: u64) -> CheckResult {
    timed("affine_oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rest = fixtures::uv_sphere(10, 11, 1.0);
        let map = rasterize_faces(&rest, 32, 32);
        let local = LocalAttributeMaps::surface_anchored(
            &rest,
            &map,
            2,
            LocalAttributeMaps::texel_log_scale(&rest, &map, 0.6),
            0.0,
            |_, _| [0.0; 3],
        );
        let mut frame_err: f64 = 0.0;
        let mut pos_gap: f64 = 0.0;
        let mut cov_gap: f64 = 0.0;
        for _ in 0..trials {
            let a = fixtures::random_well_conditioned(&mut rng);
            let t = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let pair = MeshPair {
                deformed: rest.map_vertices(|p| a * p + t)?,
                rest: rest.clone(),
            };
            let frames = all_face_frames(&pair, FrameVariant::FullJacobian)?;
            for f in &frames {
                frame_err = frame_err.max(rel_frobenius(&f.jacobian, &a));
            }
            let field = build_jacobian_field(&frames, &map)?;
            let naive = LiftPlan::naive_from_field(&field).lift(&local)?;
            let qp = LiftPlan::quasi_phong(&dilate_field(&field, 2))?.lift(&local)?;
            for i in 0..naive.len() {
                pos_gap = pos_gap.max((naive.positions[i] - qp.positions[i]).norm());
                cov_gap = cov_gap.max((naive.covariances[i] - qp.covariances[i]).norm());
            }
        }
        let passed = frame_err <= 1e-9 && pos_gap <= 1e-6 && cov_gap <= 1e-6;
        Ok((
            passed,
            format!(
                "{trials} deformations, frame rel err {frame_err:.2e}, lift gap position {pos_gap:.2e} covariance {cov_gap:.2e}"
            ),
        ))
    })
}

fn random_mask<R: Rng>(rng: &mut R, w: usize, h: usize, empty: f64) -> ValidityMask {
    let states = (0..w * h)
        .map(|_| {
            let r: f64 = rng.gen();
            if r < empty {
                TexelState::Empty
            } else if r < empty + 0.1 {
                TexelState::Padded
            } else {
                TexelState::Valid
            }
        })
        .collect();
    ValidityMask::new(w, h, states).expect("sizes match")
}

fn random_jacobian<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let mut m = Matrix3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
    match rng.gen_range(0..3) {
        0 => m = fixtures::random_well_conditioned(rng),
        1 => {
            // Rank deficient.
            let c = rng.gen_range(0..3);
            m.column_mut(c).fill(0.0);
        }
        _ => {}
    }
    m
}

fn random_quaternion<R: Rng>(rng: &mut R) -> [f64; 4] {
    loop {
        let q = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if q.iter().map(|v: &f64| v * v).sum::<f64>() > 1e-4 {
            return q;
        }
    }
}

/// Blended covariances stay positive semi-definite for random Jacobian
/// fields (including singular ones), masks and local shapes.
pub fn check_psd_closure(draws: usize, seed: u64) -> CheckResult {
    timed("psd_closure", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::INFINITY;
        let mut checked = 0usize;
        for _ in 0..draws {
            let (w, h) = (rng.gen_range(2..9), rng.gen_range(2..9));
            let mask = random_mask(&mut rng, w, h, 0.3);
            let mut jac = TexelGrid::zeros(w, h, 9);
            let mut tr = TexelGrid::zeros(w, h, 3);
            for k in 0..w * h {
                jac.texel_mut(k).copy_from_slice(random_jacobian(&mut rng).transpose().as_slice());
                for v in tr.texel_mut(k) {
                    *v = rng.gen_range(-1.0..1.0);
                }
            }
            let field = JacobianField {
                jacobians: jac,
                translations: tr,
                mask: mask.clone(),
            };
            let mut local = LocalAttributeMaps::constant(mask, [0.0; 3], [1.0, 0.0, 0.0, 0.0], [0.0; 3], 0.0, [0.0; 3]);
            for k in 0..w * h {
                local.rotation.texel_mut(k).copy_from_slice(&random_quaternion(&mut rng));
                for v in local.log_scale.texel_mut(k) {
                    *v = rng.gen_range(-4.0..1.0);
                }
            }
            let set = LiftPlan::quasi_phong(&field)?.lift(&local)?;
            for c in &set.covariances {
                let eig = SymmetricEigen::new(*c).eigenvalues.min();
                worst = worst.min(eig / c.trace().max(f64::MIN_POSITIVE));
                if eig < -1e-9 * c.trace() {
                    return Ok((false, format!("covariance with min eigenvalue {eig:.3e}, trace {:.3e}", c.trace())));
                }
                checked += 1;
            }
        }
        Ok((
            true,
            format!("{draws} draws, {checked} covariances, worst min-eigenvalue/trace {:.2e}", worst.min(0.0)),
        ))
    })
}

/// Independent scalar reference for the sampler: tent weights over every
/// texel of the grid at the clamped continuous coordinate.
pub fn reference_sample(grid: &TexelGrid, mask: &ValidityMask, u: f64, v: f64) -> Option<Vec<f64>> {
    let (w, h) = (grid.width(), grid.height());
    let x = (u * w as f64 - 0.5).max(0.0).min((w - 1) as f64);
    let y = (v * h as f64 - 0.5).max(0.0).min((h - 1) as f64);
    let mut acc = vec![0.0; grid.arity()];
    let mut total = 0.0;
    for j in 0..h {
        let wy = (1.0 - (y - j as f64).abs()).max(0.0);
        if wy == 0.0 {
            continue;
        }
        for i in 0..w {
            let wx = (1.0 - (x - i as f64).abs()).max(0.0);
            let k = j * w + i;
            if wx == 0.0 || mask.state(k) == TexelState::Empty {
                continue;
            }
            total += wx * wy;
            for (a, g) in acc.iter_mut().zip(grid.texel(k)) {
                *a += wx * wy * g;
            }
        }
    }
    if total <= 0.0 {
        return None;
    }
    Some(acc.into_iter().map(|a| a / total).collect())
}

/// Sampler against the tent reference at random points, and the corner
/// lattice resample against pointwise sampling at `(i/(W-1), j/(H-1))`.
pub fn check_sampler_oracle(points: usize, seed: u64) -> CheckResult {
    timed("sampler_oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut err: f64 = 0.0;
        let mut done = 0;
        let mut grids = 0;
        let mut mismatched_failures = 0;
        while done < points {
            let (w, h) = (rng.gen_range(8..=64), rng.gen_range(8..=64));
            let arity = rng.gen_range(1..=4);
            let empty = rng.gen_range(0.0..0.6);
            let mask = random_mask(&mut rng, w, h, empty);
            let grid = TexelGrid::from_data(w, h, arity, (0..w * h * arity).map(|_| rng.gen_range(-5.0..5.0)).collect())?;
            grids += 1;
            for _ in 0..100 {
                let (u, v) = (rng.gen_range(-0.1..1.1), rng.gen_range(-0.1..1.1));
                let ours = sample_bilinear(&grid, &mask, u, v).ok();
                match (ours, reference_sample(&grid, &mask, u, v)) {
                    (Some(a), Some(b)) => {
                        for (x, y) in a.iter().zip(&b) {
                            err = err.max((x - y).abs());
                        }
                    }
                    (None, None) => {}
                    _ => mismatched_failures += 1,
                }
                done += 1;
            }
            let (resampled, out_mask) = corner_lattice_resample(&grid, &mask);
            for j in 0..h {
                for i in 0..w {
                    let k = j * w + i;
                    let expected = reference_sample(&grid, &mask, i as f64 / (w - 1) as f64, j as f64 / (h - 1) as f64);
                    match expected {
                        Some(e) if mask.state(k) != TexelState::Empty => {
                            for (x, y) in resampled.texel(k).iter().zip(&e) {
                                err = err.max((x - y).abs());
                            }
                        }
                        Some(_) => {}
                        None if out_mask.state(k) == TexelState::Empty => {}
                        None => mismatched_failures += 1,
                    }
                }
            }
        }
        Ok((
            err <= 1e-6 && mismatched_failures == 0,
            format!("{done} points on {grids} grids, max abs err {err:.2e}, failure mismatches {mismatched_failures}"),
        ))
    })
}

fn mix(h: &mut DefaultHasher, v: impl Hash) {
    v.hash(h);
}

/// Objective value plus a hash of every discrete choice it depends on:
/// render signatures, L1 sign pattern and regularizer active sets.
pub fn objective_with_signature(
    frames: &[FitFrame],
    local: &LocalAttributeMaps,
    weights: &LossWeights,
) -> Result<(f64, u64)> {
    let mut h = DefaultHasher::new();
    let n = frames.len().max(1) as f64;
    let mut l1 = 0.0;
    let mut ssim = 0.0;
    for f in frames {
        let set = f.plan.lift(local)?;
        let out = Rasterizer::new(&set, &f.camera)?.forward();
        mix(&mut h, out.signature);
        for (a, b) in out.image.data().iter().zip(f.target.data()) {
            mix(&mut h, (a - b).partial_cmp(&0.0));
        }
        l1 += loss_l1(&out.image, &f.target)? / n;
        ssim += loss_ssim(&out.image, &f.target)? / n;
    }
    for k in local.mask.valid_indices() {
        for v in local.position.texel(k) {
            mix(&mut h, v.abs() > weights.eps_mu);
        }
        for v in local.log_scale.texel(k) {
            mix(&mut h, v.exp() > weights.eps_s);
        }
    }
    let total = weights.lambda_l1 * l1
        + weights.lambda_ssim * ssim
        + weights.lambda_reg_mu * loss_reg_position(local, weights.eps_mu)
        + weights.lambda_reg_s * loss_reg_scale(local, weights.eps_s);
    Ok((total, h.finish()))
}

/// Base step per parameter group (position, rotation, log-scale, opacity,
/// color).
pub const FD_STEPS: [f64; 5] = [1e-4, 1e-5, 1e-5, 1e-4, 1e-4];
pub const FD_TOLERANCE: f64 = 1e-3;
const FD_HALVINGS: usize = 8;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradientCheckStats {
    pub configurations: usize,
    pub compared: usize,
    /// Components whose step could not be made smooth within the halving
    /// budget; their derivative is undefined at that point.
    pub skipped: usize,
    pub failures: usize,
    pub max_rel_err: f64,
    pub worst: Option<(usize, &'static str, usize, f64, f64)>,
}

const GROUP_NAMES: [&str; 5] = ["position", "rotation", "log_scale", "opacity", "color"];

/// Relative error with an absolute floor that sits well above the
/// roundoff level of a central difference with step `h`.
pub fn fd_relative_error(analytic: f64, numeric: f64, h: f64) -> f64 {
    let floor = 1e-12 / h;
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Richardson-extrapolated central differences of the total objective
/// against the analytic gradient, every raw channel of every texel.
pub fn gradient_check_config(
    frames: &[FitFrame],
    local: &LocalAttributeMaps,
    weights: &LossWeights,
    stats: &mut GradientCheckStats,
    config: usize,
) -> Result<()> {
    let (_, grads) = total_loss(frames, local, weights)?;
    let (_, base_sig) = objective_with_signature(frames, local, weights)?;
    let mut probe = local.clone();
    for g in 0..5 {
        let analytic = grads.groups()[g].to_vec();
        for idx in 0..analytic.len() {
            let original = probe.grids()[g].data()[idx];
            let mut h = FD_STEPS[g];
            let mut fd = None;
            'halving: for _ in 0..FD_HALVINGS {
                let mut central = [0.0; 2];
                for (c, step) in central.iter_mut().zip([h, 0.5 * h]) {
                    probe.grids_mut()[g].data_mut()[idx] = original + step;
                    let (plus, sp) = objective_with_signature(frames, &probe, weights)?;
                    probe.grids_mut()[g].data_mut()[idx] = original - step;
                    let (minus, sm) = objective_with_signature(frames, &probe, weights)?;
                    if sp != base_sig || sm != base_sig {
                        h *= 0.5;
                        continue 'halving;
                    }
                    *c = (plus - minus) / (2.0 * step);
                }
                fd = Some(((4.0 * central[1] - central[0]) / 3.0, h));
                break;
            }
            probe.grids_mut()[g].data_mut()[idx] = original;
            let Some((fd, h)) = fd else {
                stats.skipped += 1;
                continue;
            };
            stats.compared += 1;
            let err = fd_relative_error(analytic[idx], fd, h);
            if err > stats.max_rel_err {
                stats.max_rel_err = err;
                stats.worst = Some((config, GROUP_NAMES[g], idx, analytic[idx], fd));
            }
            if err > FD_TOLERANCE {
                stats.failures += 1;
            }
        }
    }
    stats.configurations += 1;
    Ok(())
}

pub fn run_gradient_checks(configs: usize, seed: u64) -> Result<GradientCheckStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = GradientCheckStats::default();
    for c in 0..configs {
        let variant = if c % 2 == 0 {
            LiftVariant::QuasiPhong
        } else {
            LiftVariant::Naive
        };
        let scene = gradient_scene(&mut rng, variant)?;
        gradient_check_config(&scene.frames, &scene.local, &scene.weights, &mut stats, c)?;
    }
    Ok(stats)
}

pub fn check_gradients(configs: usize, seed: u64) -> CheckResult {
    timed("fd_gradients", || {
        let s = run_gradient_checks(configs, seed)?;
        let worst = s
            .worst
            .map(|(c, g, i, a, f)| format!(" (config {c} {g}[{i}] analytic {a:.6e} fd {f:.6e})"))
            .unwrap_or_default();
        let skip_limit = s.compared / 100;
        Ok((
            s.failures == 0 && s.configurations >= configs && s.skipped <= skip_limit,
            format!(
                "{} configs, {} components, {} failures, {} non-smooth skipped, max rel err {:.2e}{worst}",
                s.configurations, s.compared, s.failures, s.skipped, s.max_rel_err
            ),
        ))
    })
}

/// Per-Gaussian gradient bound against an independent SVD, plus the
/// offset-versus-local scaling report.
pub fn check_gradient_bound(draws: usize, seed: u64) -> CheckResult {
    timed("gradient_bound", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = 0;
        let mut worst_ratio: f64 = 0.0;
        let mut violations = 0;
        while done < draws {
            let (w, h) = (rng.gen_range(3..8), rng.gen_range(3..8));
            let mask = random_mask(&mut rng, w, h, 0.2);
            let mut jac = TexelGrid::zeros(w, h, 9);
            for k in 0..w * h {
                jac.texel_mut(k).copy_from_slice(random_jacobian(&mut rng).transpose().as_slice());
            }
            let field = JacobianField {
                jacobians: jac,
                translations: TexelGrid::zeros(w, h, 3),
                mask,
            };
            let plan = if rng.gen::<bool>() {
                LiftPlan::quasi_phong(&field)?
            } else {
                LiftPlan::naive_from_field(&field)
            };
            let g: Vec<Vector3<f64>> = plan
                .outputs()
                .iter()
                .map(|_| Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)))
                .collect();
            for (k, world, local) in plan.position_pullback(&g) {
                let sigma = plan.jacobian(k).svd(false, false).singular_values.max();
                let bound = sigma * world.norm();
                if local.norm() > bound * (1.0 + 1e-12) + 1e-300 {
                    violations += 1;
                }
                if bound > 0.0 {
                    worst_ratio = worst_ratio.max(local.norm() / bound);
                }
                done += 1;
            }
        }
        let report = gradient_scaling_report(&[0.25, 0.5, 1.0, 2.0, 4.0, 8.0])?;
        let linear = report.offset_growth_at_least_linear();
        let fixed = report.local_bound_fixed();
        let first = &report.rows[0];
        let last = report.rows.last().expect("non-empty");
        Ok((
            violations == 0 && linear && fixed,
            format!(
                "{done} draws, {violations} violations, max |J^T g|/(sigma_max |g|) {worst_ratio:.6}; \
                 offset grad x{:.1} over m x{:.1}, local bound {:.4e} -> {:.4e}",
                last.offset_grad / first.offset_grad,
                last.magnitude / first.magnitude,
                first.local_bound,
                last.local_bound
            ),
        ))
    })
}

/// Closed-form footprint of one isotropic Gaussian on the optical axis,
/// and the partition of unity of per-pixel compositing weights.
pub fn check_renderer_oracle(seed: u64) -> CheckResult {
    timed("renderer_oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut footprint_err: f64 = 0.0;
        for _ in 0..8 {
            let size = 33 + 2 * rng.gen_range(0..8);
            let f = rng.gen_range(20.0..60.0);
            let z = rng.gen_range(2.0..6.0);
            let s = rng.gen_range(0.02..0.15);
            let o = rng.gen_range(0.2..1.0);
            let color = Vector3::new(rng.gen(), rng.gen(), rng.gen());
            let bg = Vector3::new(rng.gen(), rng.gen(), rng.gen());
            let c = (size - 1) as f64 / 2.0;
            let camera = Camera {
                fx: f,
                fy: f,
                cx: c,
                cy: c,
                rotation: Matrix3::identity(),
                translation: Vector3::zeros(),
                width: size,
                height: size,
                near: 0.01,
                far: 100.0,
                background: bg,
            };
            let set = GlobalGaussianSet {
                positions: vec![Vector3::new(0.0, 0.0, z)],
                covariances: vec![Matrix3::identity() * (s * s)],
                colors: vec![color],
                opacities: vec![o],
                source_texel: vec![(0, 0)],
            };
            let image = Rasterizer::new(&set, &camera)?.forward().image;
            let var = (f * s / z).powi(2) + LOW_PASS;
            let reach = 3.0 * var.sqrt();
            for y in 0..size {
                for x in 0..size {
                    let (dx, dy) = (x as f64 - c, y as f64 - c);
                    let alpha = if dx.abs() <= reach && dy.abs() <= reach {
                        (o * (-0.5 * (dx * dx + dy * dy) / var).exp()).min(MAX_ALPHA)
                    } else {
                        0.0
                    };
                    let expected = color * alpha + bg * (1.0 - alpha);
                    let got = image.pixel(x, y);
                    for ch in 0..3 {
                        footprint_err = footprint_err.max((got[ch] - expected[ch]).abs());
                    }
                }
            }
        }
        let mut sum_err: f64 = 0.0;
        for _ in 0..4 {
            let mut set = GlobalGaussianSet::default();
            for i in 0..60 {
                set.positions.push(Vector3::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6), rng.gen_range(2.0..4.0)));
                let a = Matrix3::from_fn(|_, _| rng.gen_range(-0.1..0.1));
                set.covariances.push(a * a.transpose() + Matrix3::identity() * 1e-4);
                set.colors.push(Vector3::new(rng.gen(), rng.gen(), rng.gen()));
                set.opacities.push(rng.gen_range(0.05..1.0));
                set.source_texel.push((i, 0));
            }
            let camera = Camera::look_at(Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0), Vector3::new(0.0, -1.0, 0.0), 0.6, 40, 40);
            let raster = Rasterizer::new(&set, &camera)?;
            for y in 0..40 {
                for x in 0..40 {
                    let (w, bg) = raster.pixel_weights(x, y);
                    let total: f64 = w.iter().map(|(_, v)| v).sum::<f64>() + bg;
                    sum_err = sum_err.max((total - 1.0).abs());
                }
            }
        }
        Ok((
            footprint_err <= 1e-3 && sum_err <= 1e-6,
            format!("footprint max err {footprint_err:.2e}, weight-sum max err {sum_err:.2e}"),
        ))
    })
}

/// Point-cloud export followed by reimport.
pub fn check_export_round_trip(count: usize, seed: u64) -> CheckResult {
    timed("export_round_trip", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = GlobalGaussianSet::default();
        for i in 0..count {
            set.positions.push(Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0)));
            let r = fixtures::random_rotation(&mut rng);
            let s = Vector3::from_fn(|_, _| rng.gen_range(-5.0f64..1.0).exp());
            set.covariances.push(r * Matrix3::from_diagonal(&s.component_mul(&s)) * r.transpose());
            set.colors.push(Vector3::new(rng.gen(), rng.gen(), rng.gen()));
            set.opacities.push(rng.gen_range(0.01..0.99));
            set.source_texel.push((i, 0));
        }
        let mut buf = Vec::new();
        write_ply(&mut buf, &set)?;
        let back = read_ply(&mut buf.as_slice())?;
        let mut err: f64 = 0.0;
        for (a, b) in back.covariances.iter().zip(&set.covariances) {
            err = err.max(rel_frobenius(a, b));
        }
        Ok((
            back.len() == count && err <= 1e-5,
            format!("{count} Gaussians, max covariance rel err {err:.2e}"),
        ))
    })
}

/// Sizes of the full suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSize {
    pub affine_trials: usize,
    pub psd_draws: usize,
    pub sampler_points: usize,
    pub gradient_configs: usize,
    pub bound_draws: usize,
    pub export_count: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        Self {
            affine_trials: 50,
            psd_draws: 1000,
            sampler_points: 10_000,
            gradient_configs: 100,
            bound_draws: 10_000,
            export_count: 1000,
        }
    }
}

/// Runs every check in order, calling `report` after each.
pub fn run_suite(size: SuiteSize, seed: u64, mut report: impl FnMut(&CheckResult)) -> Vec<CheckResult> {
    let checks: Vec<Box<dyn FnOnce() -> CheckResult>> = vec![
        Box::new(move || check_affine_oracle(size.affine_trials, seed)),
        Box::new(move || check_psd_closure(size.psd_draws, seed.wrapping_add(1))),
        Box::new(move || check_sampler_oracle(size.sampler_points, seed.wrapping_add(2))),
        Box::new(move || check_gradients(size.gradient_configs, seed.wrapping_add(3))),
        Box::new(move || check_gradient_bound(size.bound_draws, seed.wrapping_add(4))),
        Box::new(move || check_renderer_oracle(seed.wrapping_add(5))),
        Box::new(move || check_export_round_trip(size.export_count, seed.wrapping_add(6))),
    ];
    checks
        .into_iter()
        .map(|c| {
            let r = c();
            report(&r);
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_sampler_hits_texel_centers() {
        let grid = TexelGrid::from_data(3, 2, 1, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let mask = ValidityMask::all_valid(3, 2);
        assert_eq!(reference_sample(&grid, &mask, 0.5 / 3.0, 0.25).unwrap(), vec![1.0]);
        assert_eq!(reference_sample(&grid, &mask, 2.5 / 3.0, 0.75).unwrap(), vec![6.0]);
        assert_eq!(reference_sample(&grid, &mask, -1.0, -1.0).unwrap(), vec![1.0]);
    }

    #[test]
    fn small_suites_pass() {
        for r in [
            check_psd_closure(50, 3),
            check_sampler_oracle(500, 4),
            check_gradient_bound(500, 5),
            check_renderer_oracle(6),
            check_export_round_trip(100, 7),
        ] {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn a_few_gradient_configurations_pass() {
        let r = check_gradients(4, 11);
        assert!(r.passed, "{}", r.line());
    }

    #[test]
    fn frames_match_affine_part() {
        let r = check_affine_oracle(2, 1);
        assert!(r.detail.contains("frame rel err"), "{}", r.line());
    }
}
