//! UV texel grids: face rasterization, the piecewise-constant Jacobian
//! field, seam padding, and the center-convention bilinear sampler whose
//! corner-lattice resampling turns the piecewise-constant field into a
//! continuous one.
//!
//! Texel `(i, j)` lives in column `i` (along u) and row `j` (along v) and has
//! its center at `((i + 0.5) / width, (j + 0.5) / height)`.

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::mesh::{FaceFrame, TriMesh};
use crate::par;

/// Dense row-major grid with `arity` values per texel.
#[derive(Debug, Clone, PartialEq)]
pub struct TexelGrid {
    width: usize,
    height: usize,
    arity: usize,
    data: Vec<f64>,
}

impl TexelGrid {
    pub fn zeros(width: usize, height: usize, arity: usize) -> Self {
        Self {
            width,
            height,
            arity,
            data: vec![0.0; width * height * arity],
        }
    }

    pub fn filled(width: usize, height: usize, value: &[f64]) -> Self {
        let mut data = Vec::with_capacity(width * height * value.len());
        for _ in 0..width * height {
            data.extend_from_slice(value);
        }
        Self {
            width,
            height,
            arity: value.len(),
            data,
        }
    }

    pub fn from_data(width: usize, height: usize, arity: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * arity {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {width}x{height}x{arity} grid",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite texel value".into()));
        }
        Ok(Self {
            width,
            height,
            arity,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn texel(&self, k: usize) -> &[f64] {
        &self.data[k * self.arity..(k + 1) * self.arity]
    }

    pub fn texel_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.arity..(k + 1) * self.arity]
    }

    pub fn at(&self, i: usize, j: usize) -> &[f64] {
        self.texel(self.index(i, j))
    }

    pub fn same_shape(&self, other: &TexelGrid) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// State of one texel: covered by a face, filled by seam padding, or empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TexelState {
    Empty,
    Valid,
    Padded,
}

impl TexelState {
    /// Whether the sampler may draw from this texel.
    pub fn is_usable(self) -> bool {
        !matches!(self, TexelState::Empty)
    }

    pub fn to_byte(self) -> u8 {
        match self {
            TexelState::Empty => 0,
            TexelState::Valid => 1,
            TexelState::Padded => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(TexelState::Empty),
            1 => Some(TexelState::Valid),
            2 => Some(TexelState::Padded),
            _ => None,
        }
    }
}

/// Which texels are covered by the UV layout. Padded texels carry values
/// for sampling but never host a Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityMask {
    width: usize,
    height: usize,
    states: Vec<TexelState>,
}

impl ValidityMask {
    pub fn new(width: usize, height: usize, states: Vec<TexelState>) -> Result<Self> {
        if states.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} mask entries for a {width}x{height} grid",
                states.len()
            )));
        }
        Ok(Self {
            width,
            height,
            states,
        })
    }

    pub fn all_valid(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            states: vec![TexelState::Valid; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn states(&self) -> &[TexelState] {
        &self.states
    }

    pub fn state(&self, k: usize) -> TexelState {
        self.states[k]
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.states[k] == TexelState::Valid
    }

    pub fn valid_count(&self) -> usize {
        self.states.iter().filter(|s| **s == TexelState::Valid).count()
    }

    /// Texel indices of valid texels in row-major order.
    pub fn valid_indices(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&k| self.is_valid(k)).collect()
    }

    /// Drops padding, keeping only coverage.
    pub fn coverage(&self) -> Self {
        let states = self
            .states
            .iter()
            .map(|s| match s {
                TexelState::Padded => TexelState::Empty,
                s => *s,
            })
            .collect();
        Self {
            width: self.width,
            height: self.height,
            states,
        }
    }
}

/// A texel center's covering face and its barycentric coordinates there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceHit {
    pub face: usize,
    pub bary: [f64; 3],
}

/// Per-texel covering face, i.e. the indicator of each face's UV footprint.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceIdMap {
    width: usize,
    height: usize,
    hits: Vec<Option<FaceHit>>,
}

impl FaceIdMap {
    pub fn from_hits(width: usize, height: usize, hits: Vec<Option<FaceHit>>) -> Result<Self> {
        if hits.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} hits for a {width}x{height} grid",
                hits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            hits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn hits(&self) -> &[Option<FaceHit>] {
        &self.hits
    }

    pub fn hit(&self, i: usize, j: usize) -> Option<FaceHit> {
        self.hits[j * self.width + i]
    }

    pub fn validity_mask(&self) -> ValidityMask {
        let states = self
            .hits
            .iter()
            .map(|h| {
                if h.is_some() {
                    TexelState::Valid
                } else {
                    TexelState::Empty
                }
            })
            .collect();
        ValidityMask {
            width: self.width,
            height: self.height,
            states,
        }
    }
}

/// Texel center in UV coordinates.
pub fn texel_center(i: usize, j: usize, width: usize, height: usize) -> Vector2<f64> {
    Vector2::new(
        (i as f64 + 0.5) / width as f64,
        (j as f64 + 0.5) / height as f64,
    )
}

// Texel centers sitting exactly on a shared edge can round slightly
// negative in both neighbors; this keeps edges inclusive.
const EDGE_SLACK: f64 = 1e-12;

fn barycentric(p: Vector2<f64>, tri: &[Vector2<f64>; 3]) -> Option<[f64; 3]> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let det = e1.x * e2.y - e1.y * e2.x;
    if det.abs() < 1e-300 {
        return None;
    }
    let d = p - tri[0];
    let b1 = (d.x * e2.y - d.y * e2.x) / det;
    let b2 = (e1.x * d.y - e1.y * d.x) / det;
    Some([1.0 - b1 - b2, b1, b2])
}

/// Assigns every texel center to the lowest-indexed UV triangle containing
/// it (edges inclusive). Faces with zero UV area cover nothing.
pub fn rasterize_faces(mesh: &TriMesh, width: usize, height: usize) -> FaceIdMap {
    let mut hits: Vec<Option<FaceHit>> = vec![None; width * height];
    for face in 0..mesh.face_count() {
        let tri = mesh.face_uvs(face);
        let (lo, hi) = tri.iter().fold(
            (Vector2::repeat(f64::INFINITY), Vector2::repeat(f64::NEG_INFINITY)),
            |(lo, hi), p| (lo.inf(p), hi.sup(p)),
        );
        // Centers inside the bounding box: (i + 0.5) / width in [lo, hi].
        let i0 = ((lo.x * width as f64 - 0.5).ceil().max(0.0)) as usize;
        let i1 = ((hi.x * width as f64 - 0.5).floor()).min(width as f64 - 1.0);
        let j0 = ((lo.y * height as f64 - 0.5).ceil().max(0.0)) as usize;
        let j1 = ((hi.y * height as f64 - 0.5).floor()).min(height as f64 - 1.0);
        if i1 < 0.0 || j1 < 0.0 {
            continue;
        }
        // Include one extra texel on each side for centers within EDGE_SLACK.
        let (i0, i1) = (i0.saturating_sub(1), (i1 as usize + 1).min(width - 1));
        let (j0, j1) = (j0.saturating_sub(1), (j1 as usize + 1).min(height - 1));
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * width + i;
                if hits[k].is_some() {
                    continue;
                }
                let Some(b) = barycentric(texel_center(i, j, width, height), &tri) else {
                    continue;
                };
                if b.iter().all(|&x| x >= -EDGE_SLACK) {
                    hits[k] = Some(FaceHit { face, bary: b });
                }
            }
        }
    }
    FaceIdMap {
        width,
        height,
        hits,
    }
}

/// Piecewise-constant per-texel deformation: 3x3 Jacobians (row-major, 9
/// channels) and translations (3 channels).
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianField {
    pub jacobians: TexelGrid,
    pub translations: TexelGrid,
    pub mask: ValidityMask,
}

impl JacobianField {
    pub fn width(&self) -> usize {
        self.mask.width
    }

    pub fn height(&self) -> usize {
        self.mask.height
    }

    pub fn jacobian(&self, k: usize) -> Matrix3<f64> {
        Matrix3::from_row_slice(self.jacobians.texel(k))
    }

    pub fn translation(&self, k: usize) -> Vector3<f64> {
        Vector3::from_column_slice(self.translations.texel(k))
    }
}

/// Copies each covering face's frame into its texels.
pub fn build_jacobian_field(frames: &[FaceFrame], face_map: &FaceIdMap) -> Result<JacobianField> {
    let (w, h) = (face_map.width, face_map.height);
    let mut jacobians = TexelGrid::zeros(w, h, 9);
    let mut translations = TexelGrid::zeros(w, h, 3);
    for (k, hit) in face_map.hits.iter().enumerate() {
        let Some(hit) = hit else { continue };
        let frame = frames.get(hit.face).ok_or(Error::IndexOutOfRange {
            face: hit.face,
            count: frames.len(),
        })?;
        let jac = jacobians.texel_mut(k);
        for r in 0..3 {
            for c in 0..3 {
                jac[r * 3 + c] = frame.jacobian[(r, c)];
            }
        }
        translations
            .texel_mut(k)
            .copy_from_slice(frame.translation.as_slice());
    }
    Ok(JacobianField {
        jacobians,
        translations,
        mask: face_map.validity_mask(),
    })
}

/// Grows values into empty texels `rings` times. Each pass fills every empty
/// texel that has a usable 8-neighbor with the mean of those neighbors and
/// marks it padded. All grids share `mask`.
pub fn dilate(grids: &mut [&mut TexelGrid], mask: &mut ValidityMask, rings: usize) {
    let (w, h) = (mask.width, mask.height);
    for _ in 0..rings {
        let mut updates: Vec<(usize, Vec<usize>)> = Vec::new();
        for j in 0..h {
            for i in 0..w {
                let k = j * w + i;
                if mask.states[k].is_usable() {
                    continue;
                }
                let mut neighbors = Vec::with_capacity(8);
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ni, nj) = (i as i64 + di, j as i64 + dj);
                        if ni < 0 || nj < 0 || ni >= w as i64 || nj >= h as i64 {
                            continue;
                        }
                        let nk = nj as usize * w + ni as usize;
                        if mask.states[nk].is_usable() {
                            neighbors.push(nk);
                        }
                    }
                }
                if !neighbors.is_empty() {
                    updates.push((k, neighbors));
                }
            }
        }
        if updates.is_empty() {
            break;
        }
        for grid in grids.iter_mut() {
            let arity = grid.arity;
            let values: Vec<Vec<f64>> = updates
                .iter()
                .map(|(_, nbrs)| {
                    let mut acc = vec![0.0; arity];
                    for &n in nbrs {
                        for (a, v) in acc.iter_mut().zip(grid.texel(n)) {
                            *a += v;
                        }
                    }
                    let inv = 1.0 / nbrs.len() as f64;
                    acc.iter_mut().for_each(|a| *a *= inv);
                    acc
                })
                .collect();
            for ((k, _), v) in updates.iter().zip(values) {
                grid.texel_mut(*k).copy_from_slice(&v);
            }
        }
        for (k, _) in &updates {
            mask.states[*k] = TexelState::Padded;
        }
    }
}

/// Seam padding for a Jacobian field; see [`dilate`].
pub fn dilate_field(field: &JacobianField, rings: usize) -> JacobianField {
    let mut out = field.clone();
    dilate(
        &mut [&mut out.jacobians, &mut out.translations],
        &mut out.mask,
        rings,
    );
    out
}

/// Up to four texels and normalized weights contributing to one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    taps: [(usize, f64); 4],
    len: usize,
}

impl Stencil {
    pub fn taps(&self) -> &[(usize, f64)] {
        &self.taps[..self.len]
    }

    /// Weighted sum of the grid's texels into `out`.
    pub fn apply(&self, grid: &TexelGrid, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(k, w) in self.taps() {
            for (o, v) in out.iter_mut().zip(grid.texel(k)) {
                *o += w * v;
            }
        }
    }
}

fn axis_taps(coord: f64, n: usize) -> (usize, usize, f64) {
    let x = (coord * n as f64 - 0.5).clamp(0.0, (n - 1) as f64);
    let lo = (x.floor() as usize).min(n.saturating_sub(2));
    let hi = (lo + 1).min(n - 1);
    (lo, hi, x - lo as f64)
}

/// Center-convention bilinear stencil at `(u, v)` with clamp-to-edge
/// borders. Weights of empty texels are dropped and the rest renormalized.
/// `None` when no usable texel has positive weight.
pub fn stencil(mask: &ValidityMask, u: f64, v: f64) -> Option<Stencil> {
    let (w, h) = (mask.width, mask.height);
    let (i0, i1, tx) = axis_taps(u, w);
    let (j0, j1, ty) = axis_taps(v, h);
    let raw = [
        (j0 * w + i0, (1.0 - tx) * (1.0 - ty)),
        (j0 * w + i1, tx * (1.0 - ty)),
        (j1 * w + i0, (1.0 - tx) * ty),
        (j1 * w + i1, tx * ty),
    ];
    let mut taps = [(0usize, 0.0f64); 4];
    let mut len = 0;
    let mut total = 0.0;
    for (k, wgt) in raw {
        if wgt > 0.0 && mask.states[k].is_usable() {
            // Degenerate axes (size 1) repeat a texel; merge duplicates.
            if let Some(t) = taps[..len].iter_mut().find(|t| t.0 == k) {
                t.1 += wgt;
            } else {
                taps[len] = (k, wgt);
                len += 1;
            }
            total += wgt;
        }
    }
    if len == 0 || total <= 0.0 {
        return None;
    }
    for t in &mut taps[..len] {
        t.1 /= total;
    }
    Some(Stencil { taps, len })
}

/// Bilinear sample of `grid` at `(u, v)`; see [`stencil`].
pub fn sample_bilinear(grid: &TexelGrid, mask: &ValidityMask, u: f64, v: f64) -> Result<Vec<f64>> {
    let st = stencil(mask, u, v).ok_or_else(|| {
        let (i, _, _) = axis_taps(u, mask.width);
        let (j, _, _) = axis_taps(v, mask.height);
        Error::AllNeighborsInvalid { i, j }
    })?;
    let mut out = vec![0.0; grid.arity];
    st.apply(grid, &mut out);
    Ok(out)
}

/// Sampling point of output texel `(i, j)` in the corner-aligned lattice:
/// `(i / (width - 1), j / (height - 1))`.
pub fn corner_lattice_point(i: usize, j: usize, width: usize, height: usize) -> (f64, f64) {
    let u = if width > 1 { i as f64 / (width - 1) as f64 } else { 0.5 };
    let v = if height > 1 { j as f64 / (height - 1) as f64 } else { 0.5 };
    (u, v)
}

/// Per-output-texel stencils of the corner-lattice resample, `None` where
/// every contributing texel is empty.
pub fn corner_lattice_stencils(mask: &ValidityMask) -> Vec<Option<Stencil>> {
    let (w, h) = (mask.width, mask.height);
    par::map_range(w * h, |k| {
        let (u, v) = corner_lattice_point(k % w, k / w, w, h);
        stencil(mask, u, v)
    })
}

/// Same-resolution resample on the corner-aligned lattice. Because values
/// live at texel centers, each output blends up to four neighbors. Texels
/// whose stencil is empty become empty in the returned mask.
pub fn corner_lattice_resample(grid: &TexelGrid, mask: &ValidityMask) -> (TexelGrid, ValidityMask) {
    let stencils = corner_lattice_stencils(mask);
    let mut out = TexelGrid::zeros(grid.width, grid.height, grid.arity);
    let mut out_mask = mask.clone();
    for (k, st) in stencils.iter().enumerate() {
        match st {
            Some(st) => st.apply(grid, out.texel_mut(k)),
            None => out_mask.states[k] = TexelState::Empty,
        }
    }
    (out, out_mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mesh::{all_face_frames, load_pair, FrameVariant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent point-in-triangle test via signed areas.
    fn inside(p: Vector2<f64>, t: &[Vector2<f64>; 3]) -> bool {
        let s = |a: Vector2<f64>, b: Vector2<f64>| (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        let (d0, d1, d2) = (s(t[0], t[1]), s(t[1], t[2]), s(t[2], t[0]));
        let tol = 1e-12;
        (d0 >= -tol && d1 >= -tol && d2 >= -tol) || (d0 <= tol && d1 <= tol && d2 <= tol)
    }

    fn brute_force_faces(mesh: &TriMesh, w: usize, h: usize) -> Vec<Option<usize>> {
        let mut out = Vec::new();
        for j in 0..h {
            for i in 0..w {
                let p = texel_center(i, j, w, h);
                out.push((0..mesh.face_count()).find(|&f| inside(p, &mesh.face_uvs(f))));
            }
        }
        out
    }

    #[test]
    fn full_square_strip_covers_every_texel() {
        let strip = fixtures::flat_strip();
        let map = rasterize_faces(&strip, 4, 4);
        for hit in map.hits() {
            let hit = hit.expect("covered");
            let sum: f64 = hit.bary.iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
            assert!(hit.bary.iter().all(|b| (-1e-6..=1.0 + 1e-6).contains(b)));
        }
    }

    #[test]
    fn lower_half_triangle_on_4x4() {
        let tri = TriMesh::new(
            vec![Vector3::zeros(), Vector3::x(), Vector3::y()],
            vec![[0, 1, 2]],
            vec![Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let map = rasterize_faces(&tri, 4, 4);
        // Centers at 1/8, 3/8, 5/8, 7/8: u + v <= 1 holds for i + j <= 3.
        for j in 0..4 {
            for i in 0..4 {
                assert_eq!(map.hit(i, j).is_some(), i + j <= 3, "({i},{j})");
            }
        }
    }

    #[test]
    fn diagonal_split_matches_brute_force() {
        let strip = fixtures::flat_strip();
        let map = rasterize_faces(&strip, 8, 8);
        let oracle = brute_force_faces(&strip, 8, 8);
        let got: Vec<_> = map.hits().iter().map(|h| h.map(|h| h.face)).collect();
        assert_eq!(got, oracle);
        assert!(got.iter().all(|f| f.is_some()));
    }

    #[test]
    fn quarter_chart_coverage_matches_brute_force() {
        let strip = fixtures::flat_strip_in(Vector2::new(0.0, 0.0), Vector2::new(0.5, 0.5));
        let map = rasterize_faces(&strip, 16, 16);
        let oracle = brute_force_faces(&strip, 16, 16);
        let got: Vec<_> = map.hits().iter().map(|h| h.map(|h| h.face)).collect();
        assert_eq!(got, oracle);
        let expected = (0..16 * 16)
            .filter(|k| {
                let p = texel_center(k % 16, k / 16, 16, 16);
                p.x <= 0.5 && p.y <= 0.5
            })
            .count();
        assert_eq!(map.validity_mask().valid_count(), expected);
        assert_eq!(expected, 64);
    }

    #[test]
    fn sphere_rasterization_matches_brute_force() {
        let sphere = fixtures::uv_sphere(10, 11, 1.0);
        let map = rasterize_faces(&sphere, 32, 32);
        let oracle = brute_force_faces(&sphere, 32, 32);
        let got: Vec<_> = map.hits().iter().map(|h| h.map(|h| h.face)).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn field_copies_face_frames() {
        let pair = fixtures::bent_strip(0.8);
        let frames = all_face_frames(&pair, FrameVariant::FullJacobian).unwrap();
        let map = rasterize_faces(&pair.rest, 8, 8);
        let field = build_jacobian_field(&frames, &map).unwrap();
        for (k, hit) in map.hits().iter().enumerate() {
            let f = hit.unwrap().face;
            assert_eq!(field.jacobian(k), frames[f].jacobian);
            assert_eq!(field.translation(k), frames[f].translation);
        }
        assert_ne!(frames[0].jacobian, frames[1].jacobian);
    }

    #[test]
    fn identity_field() {
        let cube = fixtures::cube();
        let pair = load_pair(cube.clone(), cube.clone()).unwrap();
        let frames = all_face_frames(&pair, FrameVariant::FullJacobian).unwrap();
        let map = rasterize_faces(&cube, 16, 16);
        let field = build_jacobian_field(&frames, &map).unwrap();
        for k in field.mask.valid_indices() {
            assert!((field.jacobian(k) - Matrix3::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn missing_frame_is_out_of_range() {
        let map = rasterize_faces(&fixtures::flat_strip(), 4, 4);
        let frames = vec![FaceFrame::identity_at(Vector3::zeros())];
        assert!(matches!(
            build_jacobian_field(&frames, &map),
            Err(Error::IndexOutOfRange { face: 1, count: 1 })
        ));
    }

    fn single_texel_field() -> JacobianField {
        let mut states = vec![TexelState::Empty; 25];
        states[12] = TexelState::Valid;
        let mask = ValidityMask::new(5, 5, states).unwrap();
        let mut jacobians = TexelGrid::zeros(5, 5, 9);
        jacobians
            .texel_mut(12)
            .copy_from_slice(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.5]);
        let mut translations = TexelGrid::zeros(5, 5, 3);
        translations.texel_mut(12).copy_from_slice(&[0.1, 0.2, 0.3]);
        JacobianField {
            jacobians,
            translations,
            mask,
        }
    }

    #[test]
    fn zero_rings_is_identity() {
        let field = single_texel_field();
        assert_eq!(dilate_field(&field, 0), field);
    }

    #[test]
    fn one_ring_copies_single_texel() {
        let field = single_texel_field();
        let out = dilate_field(&field, 1);
        for j in 1..4 {
            for i in 1..4 {
                let k = j * 5 + i;
                assert_eq!(out.jacobians.texel(k), field.jacobians.texel(12));
                assert_eq!(out.translations.texel(k), field.translations.texel(12));
                let expected = if k == 12 { TexelState::Valid } else { TexelState::Padded };
                assert_eq!(out.mask.state(k), expected);
            }
        }
        assert_eq!(out.mask.state(0), TexelState::Empty);
        assert_eq!(out.mask.valid_count(), 1);
    }

    #[test]
    fn constant_field_stays_constant_under_dilation() {
        let strip = fixtures::flat_strip_in(Vector2::new(0.3, 0.3), Vector2::new(0.6, 0.6));
        let map = rasterize_faces(&strip, 16, 16);
        let c = [0.5, -1.0, 2.0, 0.25, 1.0, 0.0, 0.0, 3.0, 1.0];
        let frames = vec![
            FaceFrame {
                jacobian: Matrix3::from_row_slice(&c),
                translation: Vector3::new(1.0, 2.0, 3.0),
                variant: FrameVariant::FullJacobian,
            };
            2
        ];
        let field = dilate_field(&build_jacobian_field(&frames, &map).unwrap(), 3);
        let mut padded = 0;
        for k in 0..256 {
            if field.mask.state(k) == TexelState::Padded {
                padded += 1;
                for (a, b) in field.jacobians.texel(k).iter().zip(c) {
                    assert!((a - b).abs() < 1e-15);
                }
            }
        }
        assert!(padded > 0);
    }

    #[test]
    fn constant_grid_samples_constant() {
        let grid = TexelGrid::filled(7, 5, &[0.25, -3.0]);
        let mask = ValidityMask::all_valid(7, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = sample_bilinear(&grid, &mask, rng.gen(), rng.gen()).unwrap();
            assert!((s[0] - 0.25).abs() < 1e-15 && (s[1] + 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn midpoint_of_two_texels() {
        let grid = TexelGrid::from_data(2, 1, 1, vec![3.0, 7.0]).unwrap();
        let mask = ValidityMask::all_valid(2, 1);
        let s = sample_bilinear(&grid, &mask, 0.5, 0.5).unwrap();
        assert!((s[0] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn empty_neighbors_are_renormalized_or_rejected() {
        let grid = TexelGrid::from_data(2, 1, 1, vec![3.0, 7.0]).unwrap();
        let mask = ValidityMask::new(2, 1, vec![TexelState::Valid, TexelState::Empty]).unwrap();
        assert_eq!(sample_bilinear(&grid, &mask, 0.6, 0.5).unwrap(), vec![3.0]);
        let none = ValidityMask::new(2, 1, vec![TexelState::Empty; 2]).unwrap();
        assert!(matches!(
            sample_bilinear(&grid, &none, 0.6, 0.5),
            Err(Error::AllNeighborsInvalid { .. })
        ));
    }

    #[test]
    fn corner_lattice_two_texels_hits_ends() {
        let grid = TexelGrid::from_data(2, 2, 1, vec![3.0, 7.0, 3.0, 7.0]).unwrap();
        let mask = ValidityMask::all_valid(2, 2);
        let (out, _) = corner_lattice_resample(&grid, &mask);
        assert_eq!(out.data(), grid.data());
    }

    #[test]
    fn two_face_seam_is_strictly_blended_near_edges() {
        // Along a row, texel i samples at i + (i / (w - 1) - 1/2): near the
        // borders the shift is large, so outputs next to a vertical seam mix
        // both sides.
        let w = 8;
        let data: Vec<f64> = (0..w).map(|i| if i < 2 { 1.0 } else { 5.0 }).collect();
        let grid = TexelGrid::from_data(w, 1, 1, data).unwrap();
        let (out, _) = corner_lattice_resample(&grid, &ValidityMask::all_valid(w, 1));
        let x = out.data()[2];
        assert!(x > 1.0 && x < 5.0, "{x}");
    }
}
