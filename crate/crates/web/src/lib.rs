//! WebAssembly bindings for the browser demo: fold a two-triangle strip and
//! look at how the two lifts behave across the crease.

use nalgebra::Vector3;
use texrig_core::fit::build_plan;
use texrig_core::fixtures::bent_strip;
use texrig_core::mesh::{all_face_frames, FrameVariant, MeshPair};
use texrig_core::render::{Camera, Rasterizer};
use texrig_core::rig::{LiftVariant, LocalAttributeMaps};
use texrig_core::scenes::stripes;
use texrig_core::seams::{compare_seams, SeamProbe};
use texrig_core::texel::{build_jacobian_field, rasterize_faces, FaceIdMap, TexelState};
use wasm_bindgen::prelude::*;

const RINGS: usize = 2;

fn err(e: texrig_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn strip(angle_deg: f64, res: usize) -> (MeshPair, FaceIdMap) {
    let pair = bent_strip(angle_deg.to_radians());
    let map = rasterize_faces(&pair.rest, res.max(2), res.max(2));
    (pair, map)
}

/// Seam gaps between neighbouring texels of the two faces, as
/// `[quasi_phong_max, naive_max, quasi_phong_mean, naive_mean]`.
#[wasm_bindgen]
pub fn seam_gaps(angle_deg: f64, res: usize) -> Result<Vec<f64>, JsError> {
    let (pair, map) = strip(angle_deg, res);
    let r = compare_seams(&pair, &map, FrameVariant::FullJacobian, RINGS, SeamProbe::default()).map_err(err)?;
    Ok(vec![
        r.quasi_phong_position.max,
        r.naive_position.max,
        r.quasi_phong_position.mean,
        r.naive_position.mean,
    ])
}

/// Renders the folded strip with striped colors as `size` x `size` RGBA.
#[wasm_bindgen]
pub fn render_strip(angle_deg: f64, quasi_phong: bool, res: usize, size: usize) -> Result<Vec<u8>, JsError> {
    let (pair, map) = strip(angle_deg, res);
    let variant = if quasi_phong {
        LiftVariant::QuasiPhong
    } else {
        LiftVariant::Naive
    };
    let plan = build_plan(&pair, &map, FrameVariant::FullJacobian, RINGS, variant).map_err(err)?;
    let log_scale = LocalAttributeMaps::texel_log_scale(&pair.rest, &map, 0.6);
    let local = LocalAttributeMaps::surface_anchored(&pair.rest, &map, RINGS, log_scale, 3.0, stripes(map.width(), map.height()));
    let set = plan.lift(&local).map_err(err)?;
    let center = Vector3::new(0.55, 0.45, 0.2);
    let camera = Camera::look_at(
        center + Vector3::new(1.1, -1.5, 2.2),
        center,
        Vector3::z(),
        0.7,
        size.max(1),
        size.max(1),
    );
    let image = Rasterizer::new(&set, &camera).map_err(err)?.forward().image;
    Ok(rgba(&image.to_rgb8()))
}

/// Texel field preview as `res` x `res` RGBA: the third Jacobian column
/// (where the rest normal goes) as a color, black where no face covers.
#[wasm_bindgen]
pub fn field_preview(angle_deg: f64, res: usize) -> Result<Vec<u8>, JsError> {
    let (pair, map) = strip(angle_deg, res);
    let frames = all_face_frames(&pair, FrameVariant::FullJacobian).map_err(err)?;
    let field = build_jacobian_field(&frames, &map).map_err(err)?;
    let mut out = Vec::with_capacity(4 * map.width() * map.height());
    for (k, state) in field.mask.states().iter().enumerate() {
        if *state != TexelState::Valid {
            out.extend_from_slice(&[0, 0, 0, 255]);
            continue;
        }
        let j = field.jacobians.texel(k);
        for r in 0..3 {
            out.push((255.0 * (0.5 + 0.5 * j[3 * r + 2]).clamp(0.0, 1.0)) as u8);
        }
        out.push(255);
    }
    Ok(out)
}

fn rgba(rgb: &[u8]) -> Vec<u8> {
    rgb.chunks(3).flat_map(|p| [p[0], p[1], p[2], 255]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_strip_has_no_gap_and_folds_favour_quasi_phong() {
        let flat = seam_gaps(0.0, 16).unwrap();
        assert!(flat[0] < 1e-9 && flat[1] < 1e-9);
        let folded = seam_gaps(45.0, 16).unwrap();
        assert!(folded[0] < folded[1], "{folded:?}");
    }

    #[test]
    fn render_is_rgba_and_variants_differ_when_folded() {
        let a = render_strip(60.0, true, 12, 24).unwrap();
        let b = render_strip(60.0, false, 12, 24).unwrap();
        assert_eq!(a.len(), 4 * 24 * 24);
        assert!(a.chunks(4).all(|p| p[3] == 255));
        assert_ne!(a, b);
    }

    #[test]
    fn preview_covers_the_chart() {
        let p = field_preview(30.0, 8).unwrap();
        assert_eq!(p.len(), 4 * 64);
        assert!(p.chunks(4).any(|px| px[..3] != [0, 0, 0]));
    }
}
