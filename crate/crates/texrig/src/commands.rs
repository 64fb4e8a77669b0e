//! The subcommands. Each validates its inputs before computing anything,
//! writes its artifacts under `output_dir` and returns a short summary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use texrig_core::export::export_gaussians;
use texrig_core::fit::{build_plan, fit_with_progress, render_frames, write_trace_csv, FitConfig, FitFrame};
use texrig_core::loss::psnr;
use texrig_core::mesh::{all_face_frames, load_pair, MeshPair, TriMesh};
use texrig_core::obj::parse_obj;
use texrig_core::render::Rasterizer;
use texrig_core::rig::{LiftPlan, LocalAttributeMaps};
use texrig_core::seams::{compare_seams, SeamProbe};
use texrig_core::texel::{build_jacobian_field, dilate_field, rasterize_faces, FaceIdMap};
use texrig_core::validate::{run_suite, SuiteSize};

use crate::cameras::{parse_cameras, PosedCamera};
use crate::config::RunConfig;
use crate::files::{read_maps, read_png, write_field, write_mask_png, write_maps, write_png};
use crate::CliError;

#[derive(Debug, Clone, Copy, Default)]
struct Needs {
    cameras: bool,
    targets: bool,
}

fn existing(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::MissingPath(path.to_path_buf(), "no such file".into()))
    }
}

/// Checks required keys and input files, then creates the output directory.
fn check_paths(cfg: &RunConfig, needs: Needs) -> Result<PathBuf, CliError> {
    let rest = cfg
        .rest_obj
        .as_ref()
        .ok_or_else(|| CliError::Usage("config needs rest_obj".into()))?;
    if cfg.deformed_objs.is_empty() {
        return Err(CliError::Usage("config needs deformed_objs".into()));
    }
    let out = cfg
        .output_dir
        .clone()
        .ok_or_else(|| CliError::Usage("config needs output_dir".into()))?;
    existing(rest)?;
    for p in &cfg.deformed_objs {
        existing(p)?;
    }
    if let Some(m) = &cfg.maps {
        existing(m)?;
    }
    if needs.cameras {
        existing(cfg.cameras.as_ref().ok_or_else(|| CliError::Usage("config needs cameras".into()))?)?;
    }
    if needs.targets {
        if cfg.targets.is_empty() {
            return Err(CliError::Usage("config needs targets".into()));
        }
        for p in &cfg.targets {
            existing(p)?;
        }
    }
    fs::create_dir_all(&out).map_err(|e| CliError::MissingPath(out.clone(), e.to_string()))?;
    Ok(out)
}

struct Scene {
    rest: TriMesh,
    poses: Vec<MeshPair>,
    face_map: FaceIdMap,
}

fn load_scene(cfg: &RunConfig) -> Result<Scene, CliError> {
    let rest = parse_obj(cfg.rest_obj.as_ref().expect("checked"))?;
    let mut poses = Vec::new();
    for p in &cfg.deformed_objs {
        poses.push(load_pair(rest.clone(), parse_obj(p)?)?);
    }
    let face_map = rasterize_faces(&rest, cfg.uv_width, cfg.uv_height);
    Ok(Scene { rest, poses, face_map })
}

fn load_cameras(cfg: &RunConfig, poses: usize) -> Result<Vec<PosedCamera>, CliError> {
    let path = cfg.cameras.as_ref().expect("checked");
    let cams = parse_cameras(&fs::read_to_string(path)?)?;
    if cams.is_empty() {
        return Err(CliError::Usage(format!("{} lists no cameras", path.display())));
    }
    if let Some(c) = cams.iter().find(|c| c.pose >= poses) {
        return Err(CliError::Usage(format!(
            "camera refers to pose {}, but only {poses} deformed meshes are configured",
            c.pose
        )));
    }
    Ok(cams)
}

/// Maps from `maps`, or surface-anchored defaults with an optional
/// seeded perturbation.
fn initial_maps(cfg: &RunConfig, scene: &Scene) -> Result<LocalAttributeMaps, CliError> {
    let maps = match &cfg.maps {
        Some(p) => read_maps(p)?,
        None => {
            let ls = LocalAttributeMaps::texel_log_scale(&scene.rest, &scene.face_map, cfg.init_scale_factor);
            LocalAttributeMaps::surface_anchored(
                &scene.rest,
                &scene.face_map,
                cfg.dilation_rings,
                ls,
                cfg.init_opacity_logit,
                |_, _| [0.0; 3],
            )
        }
    };
    if maps.width() != cfg.uv_width || maps.height() != cfg.uv_height {
        return Err(texrig_core::Error::ShapeMismatch(format!(
            "maps are {}x{}, config asks for {}x{}",
            maps.width(),
            maps.height(),
            cfg.uv_width,
            cfg.uv_height
        ))
        .into());
    }
    Ok(if cfg.init_perturbation > 0.0 {
        maps.perturbed(cfg.init_perturbation, cfg.seed)
    } else {
        maps
    })
}

fn plans(cfg: &RunConfig, scene: &Scene) -> Result<Vec<LiftPlan>, CliError> {
    scene
        .poses
        .iter()
        .map(|pair| {
            Ok(build_plan(
                pair,
                &scene.face_map,
                cfg.frame_variant,
                cfg.dilation_rings,
                cfg.variant,
            )?)
        })
        .collect()
}

pub fn build_field(cfg: &RunConfig) -> Result<String, CliError> {
    let out = check_paths(cfg, Needs::default())?;
    let scene = load_scene(cfg)?;
    write_mask_png(&out.join("mask.png"), &scene.face_map.validity_mask())?;
    for (i, pair) in scene.poses.iter().enumerate() {
        let frames = all_face_frames(pair, cfg.frame_variant)?;
        let field = dilate_field(&build_jacobian_field(&frames, &scene.face_map)?, cfg.dilation_rings);
        write_field(&out.join(format!("field_{i}.txf")), &field)?;
    }
    Ok(format!(
        "{} field(s), {}x{} texels, {} covered",
        scene.poses.len(),
        cfg.uv_width,
        cfg.uv_height,
        scene.face_map.validity_mask().valid_count()
    ))
}

pub fn rig(cfg: &RunConfig) -> Result<String, CliError> {
    let out = check_paths(cfg, Needs::default())?;
    let scene = load_scene(cfg)?;
    let maps = initial_maps(cfg, &scene)?;
    let mut count = 0;
    for (i, plan) in plans(cfg, &scene)?.iter().enumerate() {
        let set = plan.lift(&maps)?;
        count = set.len();
        export_gaussians(&set, &out.join(format!("gaussians_{i}.ply")))?;
    }
    Ok(format!("{} pose(s), {count} Gaussians each, variant {}", scene.poses.len(), cfg.variant.name()))
}

pub fn render(cfg: &RunConfig) -> Result<String, CliError> {
    let out = check_paths(
        cfg,
        Needs {
            cameras: true,
            ..Needs::default()
        },
    )?;
    let scene = load_scene(cfg)?;
    let cams = load_cameras(cfg, scene.poses.len())?;
    let maps = initial_maps(cfg, &scene)?;
    let plans = plans(cfg, &scene)?;
    let mut sets = Vec::new();
    for (i, plan) in plans.iter().enumerate() {
        let set = plan.lift(&maps)?;
        export_gaussians(&set, &out.join(format!("gaussians_{i}.ply")))?;
        sets.push(set);
    }
    for (c, cam) in cams.iter().enumerate() {
        let image = Rasterizer::new(&sets[cam.pose], &cam.camera)?.forward().image;
        write_png(&out.join(format!("render_{c:03}.png")), &image)?;
    }
    Ok(format!("{} image(s), variant {}", cams.len(), cfg.variant.name()))
}

pub fn fit(cfg: &RunConfig, log: &mut dyn Write) -> Result<String, CliError> {
    let out = check_paths(
        cfg,
        Needs {
            cameras: true,
            targets: true,
        },
    )?;
    let scene = load_scene(cfg)?;
    let cams = load_cameras(cfg, scene.poses.len())?;
    if cams.len() != cfg.targets.len() {
        return Err(CliError::Usage(format!(
            "{} cameras but {} targets",
            cams.len(),
            cfg.targets.len()
        )));
    }
    let plans = plans(cfg, &scene)?;
    let mut frames = Vec::new();
    for (cam, target) in cams.iter().zip(&cfg.targets) {
        let image = read_png(target)?;
        if image.width() != cam.camera.width || image.height() != cam.camera.height {
            return Err(CliError::Image(
                target.clone(),
                format!(
                    "is {}x{}, camera renders {}x{}",
                    image.width(),
                    image.height(),
                    cam.camera.width,
                    cam.camera.height
                ),
            ));
        }
        frames.push(FitFrame {
            plan: plans[cam.pose].clone(),
            camera: cam.camera.clone(),
            target: image,
        });
    }
    let initial = initial_maps(cfg, &scene)?;
    let weights = cfg.weights(scene.rest.mean_edge_length());
    weights.validate()?;
    let mut config = FitConfig::new(frames, weights, cfg.iterations);
    config.learning_rates = cfg.learning_rates();
    config.betas = (cfg.beta1, cfg.beta2);
    config.epsilon = cfg.adam_epsilon;
    config.seed = cfg.seed;
    let start = Instant::now();
    let every = cfg.log_every;
    let result = fit_with_progress(&config, &initial, |row| {
        if row.iteration % every == 0 {
            let _ = writeln!(
                log,
                "iter {:>6}  loss {:.6e}  l1 {:.4e}  ssim {:.4e}  {:.1}s",
                row.iteration,
                row.loss.total,
                row.loss.l1,
                row.loss.ssim,
                start.elapsed().as_secs_f64()
            );
        }
    })?;
    write_maps(&out.join("maps.txs"), &result.maps)?;
    let mut trace = BufWriter::new(File::create(out.join("trace.csv"))?);
    write_trace_csv(&mut trace, &result.trace)?;
    trace.flush()?;
    let images = render_frames(&config.frames, &result.maps)?;
    let mut psnrs = Vec::new();
    for (c, (image, frame)) in images.iter().zip(&config.frames).enumerate() {
        write_png(&out.join(format!("fit_{c:03}.png")), image)?;
        psnrs.push(format!("{:.2}", psnr(image, &frame.target)?));
    }
    let last = result.trace.last().map(|r| r.loss.total).unwrap_or(f64::NAN);
    Ok(format!(
        "{} iterations, final loss {last:.6e}, PSNR per frame [{}] dB",
        cfg.iterations,
        psnrs.join(", ")
    ))
}

pub fn compare(cfg: &RunConfig) -> Result<String, CliError> {
    let out = check_paths(cfg, Needs::default())?;
    let scene = load_scene(cfg)?;
    let mut summary = String::new();
    for (i, pair) in scene.poses.iter().enumerate() {
        let report = compare_seams(
            pair,
            &scene.face_map,
            cfg.frame_variant,
            cfg.dilation_rings,
            SeamProbe::default(),
        )?;
        let mut csv = BufWriter::new(File::create(out.join(format!("seams_{i}.csv")))?);
        report.write_csv(&mut csv)?;
        csv.flush()?;
        fs::write(out.join(format!("seams_{i}.txt")), report.summary())?;
        summary.push_str(&format!("pose {i}\n{}", report.summary()));
    }
    Ok(summary.trim_end().to_string())
}

pub fn validate(seed: u64, size: SuiteSize, log: &mut dyn Write) -> Result<String, CliError> {
    let start = Instant::now();
    let results = run_suite(size, seed, |r| {
        let _ = writeln!(log, "{}", r.line());
        let _ = log.flush();
    });
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.name.to_string()).collect();
    let _ = writeln!(log, "total {:.2}s", start.elapsed().as_secs_f64());
    if failed.is_empty() {
        Ok(format!("{} checks passed", results.len()))
    } else {
        Err(CliError::ValidationFailed(failed))
    }
}
