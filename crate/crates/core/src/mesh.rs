//! Triangle meshes with a separate UV topology, and the per-face deformation
//! frames that carry a rest triangle onto its deformed counterpart.

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::par;

/// Faces whose 3D area falls below this are treated as collapsed.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Indexed triangle mesh. `uv_faces[f]` indexes `uv_coords` for the three
/// corners of `faces[f]`, so UV seams can split vertices without touching
/// the 3D topology.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<[usize; 3]>,
    uv_coords: Vec<Vector2<f64>>,
    uv_faces: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Builds a mesh after checking index ranges, UV bounds and face areas.
    pub fn new(
        vertices: Vec<Vector3<f64>>,
        faces: Vec<[usize; 3]>,
        uv_coords: Vec<Vector2<f64>>,
        uv_faces: Vec<[usize; 3]>,
    ) -> Result<Self> {
        let mesh = Self::new_unchecked_area(vertices, faces, uv_coords, uv_faces)?;
        mesh.check_areas()?;
        Ok(mesh)
    }

    /// Like [`TriMesh::new`] but allows collapsed faces. Used for deformed
    /// poses, where a collapse is reported later by the frame computation.
    pub fn new_unchecked_area(
        vertices: Vec<Vector3<f64>>,
        faces: Vec<[usize; 3]>,
        uv_coords: Vec<Vector2<f64>>,
        uv_faces: Vec<[usize; 3]>,
    ) -> Result<Self> {
        if faces.len() != uv_faces.len() {
            return Err(Error::InvalidMesh(format!(
                "{} faces but {} uv faces",
                faces.len(),
                uv_faces.len()
            )));
        }
        for (f, face) in faces.iter().enumerate() {
            if let Some(&bad) = face.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "face {f} references vertex {bad} of {}",
                    vertices.len()
                )));
            }
        }
        for (f, face) in uv_faces.iter().enumerate() {
            if let Some(&bad) = face.iter().find(|&&v| v >= uv_coords.len()) {
                return Err(Error::InvalidMesh(format!(
                    "uv face {f} references uv {bad} of {}",
                    uv_coords.len()
                )));
            }
        }
        for (k, uv) in uv_coords.iter().enumerate() {
            let inside = uv.iter().all(|c| (0.0..=1.0).contains(c));
            if !inside {
                return Err(Error::InvalidMesh(format!(
                    "uv {k} = ({}, {}) lies outside the unit square",
                    uv.x, uv.y
                )));
            }
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidMesh("non-finite vertex position".into()));
        }
        Ok(Self {
            vertices,
            faces,
            uv_coords,
            uv_faces,
        })
    }

    pub fn check_areas(&self) -> Result<()> {
        for f in 0..self.faces.len() {
            let area = self.face_area(f);
            if !(area >= DEGENERATE_AREA) {
                return Err(Error::DegenerateFace { face: f, area });
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn uv_coords(&self) -> &[Vector2<f64>] {
        &self.uv_coords
    }

    pub fn uv_faces(&self) -> &[[usize; 3]] {
        &self.uv_faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_positions(&self, f: usize) -> [Vector3<f64>; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_uvs(&self, f: usize) -> [Vector2<f64>; 3] {
        let [a, b, c] = self.uv_faces[f];
        [self.uv_coords[a], self.uv_coords[b], self.uv_coords[c]]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [p0, p1, p2] = self.face_positions(f);
        0.5 * (p1 - p0).cross(&(p2 - p0)).norm()
    }

    pub fn face_centroid(&self, f: usize) -> Vector3<f64> {
        let [p0, p1, p2] = self.face_positions(f);
        (p0 + p1 + p2) / 3.0
    }

    /// Point on face `f` at barycentric coordinates `b`.
    pub fn face_point(&self, f: usize, b: [f64; 3]) -> Vector3<f64> {
        let [p0, p1, p2] = self.face_positions(f);
        p0 * b[0] + p1 * b[1] + p2 * b[2]
    }

    /// Mean length over all face edges (shared edges counted once per face).
    pub fn mean_edge_length(&self) -> f64 {
        if self.faces.is_empty() {
            return 0.0;
        }
        let total: f64 = (0..self.faces.len())
            .map(|f| {
                let [p0, p1, p2] = self.face_positions(f);
                (p1 - p0).norm() + (p2 - p1).norm() + (p0 - p2).norm()
            })
            .sum();
        total / (3 * self.faces.len()) as f64
    }

    /// Same topology and UVs, new 3D positions.
    pub fn with_vertices(&self, vertices: Vec<Vector3<f64>>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::TopologyMismatch(format!(
                "{} vertices given for a mesh with {}",
                vertices.len(),
                self.vertices.len()
            )));
        }
        Self::new_unchecked_area(
            vertices,
            self.faces.clone(),
            self.uv_coords.clone(),
            self.uv_faces.clone(),
        )
    }

    /// Applies `map` to every vertex.
    pub fn map_vertices(&self, map: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Result<Self> {
        self.with_vertices(self.vertices.iter().map(map).collect())
    }
}

/// Rest and deformed poses of one mesh. UVs and connectivity are shared.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshPair {
    pub rest: TriMesh,
    pub deformed: TriMesh,
}

/// Validates that two meshes are poses of the same topology.
pub fn load_pair(rest: TriMesh, deformed: TriMesh) -> Result<MeshPair> {
    if rest.faces.len() != deformed.faces.len() {
        return Err(Error::TopologyMismatch(format!(
            "face counts differ: {} vs {}",
            rest.faces.len(),
            deformed.faces.len()
        )));
    }
    if rest.vertices.len() != deformed.vertices.len() {
        return Err(Error::TopologyMismatch(format!(
            "vertex counts differ: {} vs {}",
            rest.vertices.len(),
            deformed.vertices.len()
        )));
    }
    if rest.uv_coords.len() != deformed.uv_coords.len() {
        return Err(Error::TopologyMismatch(format!(
            "uv counts differ: {} vs {}",
            rest.uv_coords.len(),
            deformed.uv_coords.len()
        )));
    }
    if rest.faces != deformed.faces {
        return Err(Error::TopologyMismatch("face connectivity differs".into()));
    }
    if rest.uv_faces != deformed.uv_faces || rest.uv_coords != deformed.uv_coords {
        return Err(Error::TopologyMismatch("uv layout differs".into()));
    }
    rest.check_areas()?;
    deformed.check_areas()?;
    Ok(MeshPair { rest, deformed })
}

/// How a face's deformation is summarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrameVariant {
    /// Full 3x3 deformation gradient: stretch, shear and rotation.
    #[default]
    FullJacobian,
    /// Isotropic scale times rotation.
    ScaledRotation,
}

/// Third column used when building the full Jacobian's edge matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalConvention {
    /// Unit normal in both poses; no stretch along the normal.
    #[default]
    Unit,
    /// Normal scaled by the inverse square root of twice the area, as in
    /// deformation transfer; the normal stretches with the in-plane scale.
    AreaScaled,
}

/// Deformation of one face: `x_deformed = jacobian * x_local + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceFrame {
    pub jacobian: Matrix3<f64>,
    pub translation: Vector3<f64>,
    pub variant: FrameVariant,
}

impl FaceFrame {
    pub fn identity_at(translation: Vector3<f64>) -> Self {
        Self {
            jacobian: Matrix3::identity(),
            translation,
            variant: FrameVariant::FullJacobian,
        }
    }
}

fn edge_matrix(p: &[Vector3<f64>; 3], convention: NormalConvention) -> Matrix3<f64> {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let cross = e1.cross(&e2);
    let normal = match convention {
        NormalConvention::Unit => cross.normalize(),
        NormalConvention::AreaScaled => cross / cross.norm().sqrt(),
    };
    Matrix3::from_columns(&[e1, e2, normal])
}

/// Orthonormal tangent frame: first edge direction, normal x tangent, normal.
fn tangent_frame(p: &[Vector3<f64>; 3]) -> Matrix3<f64> {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let n = e1.cross(&e2).normalize();
    let t = e1.normalize();
    let b = n.cross(&t).normalize();
    Matrix3::from_columns(&[t, b, n])
}

/// Frame of face `face` using the default (unit) normal convention.
pub fn face_frame(pair: &MeshPair, face: usize, variant: FrameVariant) -> Result<FaceFrame> {
    face_frame_with(pair, face, variant, NormalConvention::Unit)
}

pub fn face_frame_with(
    pair: &MeshPair,
    face: usize,
    variant: FrameVariant,
    convention: NormalConvention,
) -> Result<FaceFrame> {
    if face >= pair.rest.face_count() {
        return Err(Error::IndexOutOfRange {
            face,
            count: pair.rest.face_count(),
        });
    }
    let rest_area = pair.rest.face_area(face);
    let deformed_area = pair.deformed.face_area(face);
    if !(rest_area >= DEGENERATE_AREA) {
        return Err(Error::DegenerateFace {
            face,
            area: rest_area,
        });
    }
    if !(deformed_area >= DEGENERATE_AREA) {
        return Err(Error::DegenerateFace {
            face,
            area: deformed_area,
        });
    }
    let rest = pair.rest.face_positions(face);
    let deformed = pair.deformed.face_positions(face);

    let jacobian = match variant {
        FrameVariant::FullJacobian => {
            let r = edge_matrix(&rest, convention);
            let d = edge_matrix(&deformed, convention);
            let r_inv = r.try_inverse().ok_or(Error::DegenerateFace {
                face,
                area: rest_area,
            })?;
            d * r_inv
        }
        FrameVariant::ScaledRotation => {
            let scale = (deformed_area / rest_area).sqrt();
            let rotation = tangent_frame(&deformed) * tangent_frame(&rest).transpose();
            rotation * scale
        }
    };
    Ok(FaceFrame {
        jacobian,
        translation: pair.deformed.face_centroid(face),
        variant,
    })
}

/// One frame per face, in face order.
pub fn all_face_frames(pair: &MeshPair, variant: FrameVariant) -> Result<Vec<FaceFrame>> {
    all_face_frames_with(pair, variant, NormalConvention::Unit)
}

pub fn all_face_frames_with(
    pair: &MeshPair,
    variant: FrameVariant,
    convention: NormalConvention,
) -> Result<Vec<FaceFrame>> {
    par::map_range(pair.rest.face_count(), |f| {
        face_frame_with(pair, f, variant, convention)
    })
    .into_iter()
    .collect()
}
