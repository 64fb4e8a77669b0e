mod common;

use std::fs;
use std::path::Path;

use common::*;
use nalgebra::{Matrix3, Vector2};
use texrig::files::{read_field, read_maps, write_maps};
use texrig_core::fixtures;
use texrig_core::mesh::TriMesh;
use texrig_core::rig::LocalAttributeMaps;
use texrig_core::texel::{rasterize_faces, TexelState};

fn strip_config(dir: &Path, deformed: &TriMesh, extra: &str) -> String {
    write_mesh(dir, "rest.obj", &fixtures::flat_strip());
    write_mesh(dir, "deformed.obj", deformed);
    let cfg = format!(
        "uv_width = 16\nuv_height = 16\nrest_obj = rest.obj\ndeformed_objs = deformed.obj\noutput_dir = out\n{extra}"
    );
    write_text(dir, "run.cfg", &cfg).display().to_string()
}

#[test]
fn identity_pair_field_decodes_to_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = strip_config(dir.path(), &fixtures::flat_strip(), "");
    let out = texrig(&["build-field", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let field = read_field(&dir.path().join("out/field_0.txf")).unwrap();
    for k in field.mask.valid_indices() {
        assert!((field.jacobian(k) - Matrix3::identity()).norm() < 1e-6);
    }
    let mask = image::open(dir.path().join("out/mask.png")).unwrap().to_luma8();
    assert!(mask.pixels().all(|p| p.0[0] == 255), "the strip covers the whole chart");
}

#[test]
fn affine_pair_field_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let (a, t) = planar_affine();
    let deformed = fixtures::flat_strip().map_vertices(|p| a * p + t).unwrap();
    let cfg = strip_config(dir.path(), &deformed, "");
    assert_eq!(code(&texrig(&["build-field", "--config", &cfg])), 0);
    let field = read_field(&dir.path().join("out/field_0.txf")).unwrap();
    assert!(field.mask.valid_count() > 0);
    for k in field.mask.valid_indices() {
        assert!((field.jacobian(k) - a).norm() <= 1e-6 * a.norm());
    }
}

#[test]
fn collapsed_uvs_give_an_all_black_mask() {
    let dir = tempfile::tempdir().unwrap();
    let strip = fixtures::flat_strip();
    let collapsed = TriMesh::new(
        strip.vertices().to_vec(),
        strip.faces().to_vec(),
        vec![Vector2::new(0.5, 0.5); 4],
        strip.uv_faces().to_vec(),
    )
    .unwrap();
    write_mesh(dir.path(), "rest.obj", &collapsed);
    write_mesh(dir.path(), "deformed.obj", &collapsed);
    let cfg = write_text(
        dir.path(),
        "run.cfg",
        "uv_width = 8\nuv_height = 8\nrest_obj = rest.obj\ndeformed_objs = deformed.obj\noutput_dir = out\n",
    );
    let out = texrig(&["build-field", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mask = image::open(dir.path().join("out/mask.png")).unwrap().to_luma8();
    assert!(mask.pixels().all(|p| p.0[0] == 0));
}

fn render_setup(dir: &Path, deformed: &TriMesh, extra: &str) -> String {
    write_text(dir, "cams.txt", &(overhead_camera(0, 0.5, 0.4, 2.4, 32) + &overhead_camera(0, 0.3, 0.6, 2.0, 24)));
    strip_config(dir, deformed, &format!("cameras = cams.txt\n{extra}"))
}

#[test]
fn rendering_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = render_setup(dir.path(), &fixtures::bent_strip(0.5).deformed, "");
    let mut seen: Vec<Vec<Vec<u8>>> = Vec::new();
    for threads in [1, 3, 1] {
        let out = texrig_with_threads(&["render", "--config", &cfg], threads);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        seen.push(
            ["render_000.png", "render_001.png", "gaussians_0.ply"]
                .iter()
                .map(|f| fs::read(dir.path().join("out").join(f)).unwrap())
                .collect(),
        );
    }
    assert_eq!(seen[0], seen[1]);
    assert_eq!(seen[0], seen[2]);
}

#[test]
fn zero_maps_under_identity_put_gaussians_at_blended_centroids() {
    let dir = tempfile::tempdir().unwrap();
    let rest = fixtures::flat_strip();
    let map = rasterize_faces(&rest, 16, 16);
    let zero = LocalAttributeMaps::constant(map.validity_mask(), [0.0; 3], [1.0, 0.0, 0.0, 0.0], [-3.0; 3], 1.0, [0.0; 3]);
    write_maps(&dir.path().join("zero.txs"), &zero).unwrap();
    let cfg = strip_config(dir.path(), &rest, "maps = zero.txs\nvariant = naive\n");
    assert_eq!(code(&texrig(&["rig", "--config", &cfg])), 0);
    let set = texrig_core::export::import_gaussians(&dir.path().join("out/gaussians_0.ply")).unwrap();
    let c0 = rest.face_centroid(0);
    let c1 = rest.face_centroid(1);
    assert_eq!(set.len(), 256);
    for p in &set.positions {
        let d = (p - c0).norm().min((p - c1).norm());
        assert!(d < 1e-6, "{p:?}");
    }
    let out = texrig(&["rig", "--config", &cfg, "--variant", "quasi_phong"]);
    assert_eq!(code(&out), 0);
    let set = texrig_core::export::import_gaussians(&dir.path().join("out/gaussians_0.ply")).unwrap();
    // Blends of the two centroids lie on the segment between them.
    for p in &set.positions {
        let s = (p - c0).dot(&(c1 - c0)) / (c1 - c0).norm_squared();
        assert!((-1e-6..=1.0 + 1e-6).contains(&s));
        assert!((p - (c0 + (c1 - c0) * s)).norm() < 1e-6);
    }
}

#[test]
fn fit_writes_checkpoint_trace_and_renders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = render_setup(dir.path(), &fixtures::bent_strip(0.4).deformed, "");
    assert_eq!(code(&texrig(&["render", "--config", &cfg])), 0);
    fs::rename(dir.path().join("out/render_000.png"), dir.path().join("t0.png")).unwrap();
    fs::rename(dir.path().join("out/render_001.png"), dir.path().join("t1.png")).unwrap();
    let text = fs::read_to_string(&cfg).unwrap()
        + "targets = t0.png, t1.png\niterations = 5\ninit_perturbation = 0.05\nseed = 4\nlog_every = 1\n";
    fs::write(&cfg, text).unwrap();
    let out = texrig(&["fit", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("PSNR"));
    let trace = fs::read_to_string(dir.path().join("out/trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,total,l1,ssim,reg_mu,reg_s"));
    assert!(trace.lines().count() >= 6);
    let maps = read_maps(&dir.path().join("out/maps.txs")).unwrap();
    assert_eq!(maps.width(), 16);
    assert!(dir.path().join("out/fit_001.png").is_file());
    let first = fs::read(dir.path().join("out/maps.txs")).unwrap();
    assert_eq!(code(&texrig(&["fit", "--config", &cfg])), 0);
    assert_eq!(first, fs::read(dir.path().join("out/maps.txs")).unwrap());
}

#[test]
fn seam_comparison_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = strip_config(dir.path(), &fixtures::bent_strip(30f64.to_radians()).deformed, "");
    let out = texrig(&["compare-seams", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out/seams_0.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(6).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    let max = |c: usize| rows.iter().map(|r| r[c]).fold(0.0, f64::max);
    assert!(max(2) < max(0));
    assert!(rows.iter().flatten().all(|v| *v >= 0.0));

    let dir = tempfile::tempdir().unwrap();
    let (a, t) = planar_affine();
    let affine = fixtures::flat_strip().map_vertices(|p| a * p + t).unwrap();
    let cfg = strip_config(dir.path(), &affine, "");
    assert_eq!(code(&texrig(&["compare-seams", "--config", &cfg])), 0);
    let csv = fs::read_to_string(dir.path().join("out/seams_0.csv")).unwrap();
    for l in csv.lines().skip(1) {
        for v in l.split(',').skip(6) {
            assert!(v.parse::<f64>().unwrap() <= 1e-6);
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&texrig(&["no-such-command"])), 1);
    assert_eq!(code(&texrig(&["render"])), 1);
    let bad = write_text(dir.path(), "bad.cfg", "uv_widht = 4\n");
    let out = texrig(&["build-field", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("uv_widht"));
    let missing = write_text(
        dir.path(),
        "missing.cfg",
        "rest_obj = nowhere.obj\ndeformed_objs = nowhere.obj\noutput_dir = out\n",
    );
    assert_eq!(code(&texrig(&["build-field", "--config", missing.to_str().unwrap()])), 2);
    assert!(!dir.path().join("out").exists(), "paths are checked before any output");
    write_text(dir.path(), "broken.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    let broken = write_text(
        dir.path(),
        "broken.cfg",
        "rest_obj = broken.obj\ndeformed_objs = broken.obj\noutput_dir = out\n",
    );
    let out = texrig(&["build-field", "--config", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn seam_comparison_without_seams_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let strip = fixtures::flat_strip();
    // Second face squeezed to zero UV area: only face 0 covers texels.
    let mut uvs = strip.uv_coords().to_vec();
    uvs[3] = uvs[1];
    let one_face = TriMesh::new(strip.vertices().to_vec(), strip.faces().to_vec(), uvs, strip.uv_faces().to_vec()).unwrap();
    let cfg = strip_config(dir.path(), &one_face, "");
    write_mesh(dir.path(), "rest.obj", &one_face);
    let out = texrig(&["compare-seams", "--config", &cfg]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn diverging_fit_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = render_setup(dir.path(), &fixtures::flat_strip(), "");
    assert_eq!(code(&texrig(&["render", "--config", &cfg])), 0);
    fs::rename(dir.path().join("out/render_000.png"), dir.path().join("t0.png")).unwrap();
    fs::rename(dir.path().join("out/render_001.png"), dir.path().join("t1.png")).unwrap();
    let text = fs::read_to_string(&cfg).unwrap()
        + "targets = t0.png, t1.png\niterations = 20\ninit_perturbation = 0.3\nlr_log_scale = 1e300\n";
    fs::write(&cfg, text).unwrap();
    let out = texrig(&["fit", "--config", &cfg]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn written_mask_marks_covered_texels_white() {
    let dir = tempfile::tempdir().unwrap();
    let rest = fixtures::flat_strip_in(Vector2::new(0.25, 0.25), Vector2::new(0.75, 0.75));
    write_mesh(dir.path(), "rest.obj", &rest);
    write_mesh(dir.path(), "deformed.obj", &rest);
    let cfg = write_text(
        dir.path(),
        "run.cfg",
        "uv_width = 12\nuv_height = 12\nrest_obj = rest.obj\ndeformed_objs = deformed.obj\noutput_dir = out\n",
    );
    assert_eq!(code(&texrig(&["build-field", "--config", cfg.to_str().unwrap()])), 0);
    let png = image::open(dir.path().join("out/mask.png")).unwrap().to_luma8();
    let mask = rasterize_faces(&rest, 12, 12).validity_mask();
    for (k, p) in png.pixels().enumerate() {
        let expect = if mask.state(k) == TexelState::Valid { 255 } else { 0 };
        assert_eq!(p.0[0], expect);
    }
}
