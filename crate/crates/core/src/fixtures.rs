//! Procedural meshes used by tests, the validation suite, the CLI and the
//! browser demo.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Unit, Vector2, Vector3};
use rand::Rng;

use crate::mesh::{MeshPair, TriMesh};

/// Unit cube centered at the origin; each side gets its own UV chart in a
/// 3x2 atlas.
pub fn cube() -> TriMesh {
    let vertices: Vec<Vector3<f64>> = (0..8)
        .map(|k| {
            Vector3::new(
                if k & 1 == 0 { -0.5 } else { 0.5 },
                if k & 2 == 0 { -0.5 } else { 0.5 },
                if k & 4 == 0 { -0.5 } else { 0.5 },
            )
        })
        .collect();
    // Quads listed counter-clockwise seen from outside.
    let quads = [
        [0, 2, 3, 1], // -z
        [4, 5, 7, 6], // +z
        [0, 1, 5, 4], // -y
        [2, 6, 7, 3], // +y
        [0, 4, 6, 2], // -x
        [1, 3, 7, 5], // +x
    ];
    let mut faces = Vec::new();
    let mut uv_coords = Vec::new();
    let mut uv_faces = Vec::new();
    for (k, q) in quads.iter().enumerate() {
        let (col, row) = ((k % 3) as f64, (k / 3) as f64);
        let (u0, v0) = (col / 3.0 + 0.01, row / 2.0 + 0.01);
        let (du, dv) = (1.0 / 3.0 - 0.02, 0.5 - 0.02);
        let base = uv_coords.len();
        uv_coords.extend([
            Vector2::new(u0, v0),
            Vector2::new(u0 + du, v0),
            Vector2::new(u0 + du, v0 + dv),
            Vector2::new(u0, v0 + dv),
        ]);
        faces.push([q[0], q[1], q[2]]);
        faces.push([q[0], q[2], q[3]]);
        uv_faces.push([base, base + 1, base + 2]);
        uv_faces.push([base, base + 2, base + 3]);
    }
    TriMesh::new(vertices, faces, uv_coords, uv_faces).expect("cube fixture is valid")
}

pub fn tetrahedron() -> TriMesh {
    let vertices = vec![
        Vector3::new(1.0, 1.0, 1.0),
        Vector3::new(1.0, -1.0, -1.0),
        Vector3::new(-1.0, 1.0, -1.0),
        Vector3::new(-1.0, -1.0, 1.0),
    ];
    let faces = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    let uv_coords = vec![
        Vector2::new(0.0, 0.0),
        Vector2::new(0.5, 0.0),
        Vector2::new(1.0, 0.0),
        Vector2::new(0.25, 0.5),
        Vector2::new(0.75, 0.5),
        Vector2::new(0.5, 1.0),
    ];
    let uv_faces = vec![[0, 1, 3], [1, 4, 3], [1, 2, 4], [3, 4, 5]];
    TriMesh::new(vertices, faces, uv_coords, uv_faces).expect("tetrahedron fixture is valid")
}

/// Latitude-longitude sphere with `lon * (lat - 1) * 2` faces and a single
/// UV chart covering the unit square (the longitude seam duplicates UVs).
pub fn uv_sphere(lon: usize, lat: usize, radius: f64) -> TriMesh {
    assert!(lon >= 3 && lat >= 2);
    let mut vertices = vec![Vector3::new(0.0, radius, 0.0)];
    for i in 1..lat {
        let theta = PI * i as f64 / lat as f64;
        for j in 0..lon {
            let phi = 2.0 * PI * j as f64 / lon as f64;
            vertices.push(Vector3::new(
                radius * theta.sin() * phi.cos(),
                radius * theta.cos(),
                radius * theta.sin() * phi.sin(),
            ));
        }
    }
    let south = vertices.len();
    vertices.push(Vector3::new(0.0, -radius, 0.0));
    let ring = |i: usize, j: usize| 1 + (i - 1) * lon + j % lon;

    let mut uv_coords = Vec::new();
    // Grid UVs for rings 1..lat-1, columns 0..=lon.
    for i in 1..lat {
        for j in 0..=lon {
            uv_coords.push(Vector2::new(j as f64 / lon as f64, i as f64 / lat as f64));
        }
    }
    let uv_ring = |i: usize, j: usize| (i - 1) * (lon + 1) + j;
    let north_uv = uv_coords.len();
    for j in 0..lon {
        uv_coords.push(Vector2::new((j as f64 + 0.5) / lon as f64, 0.0));
    }
    let south_uv = uv_coords.len();
    for j in 0..lon {
        uv_coords.push(Vector2::new((j as f64 + 0.5) / lon as f64, 1.0));
    }

    let mut faces = Vec::new();
    let mut uv_faces = Vec::new();
    for j in 0..lon {
        faces.push([0, ring(1, j), ring(1, j + 1)]);
        uv_faces.push([north_uv + j, uv_ring(1, j), uv_ring(1, j + 1)]);
    }
    for i in 1..lat - 1 {
        for j in 0..lon {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j), ring(i + 1, j + 1));
            let (ua, ub, uc, ud) = (
                uv_ring(i, j),
                uv_ring(i, j + 1),
                uv_ring(i + 1, j),
                uv_ring(i + 1, j + 1),
            );
            faces.push([a, c, b]);
            uv_faces.push([ua, uc, ub]);
            faces.push([b, c, d]);
            uv_faces.push([ub, uc, ud]);
        }
    }
    for j in 0..lon {
        faces.push([south, ring(lat - 1, j + 1), ring(lat - 1, j)]);
        uv_faces.push([south_uv + j, uv_ring(lat - 1, j + 1), uv_ring(lat - 1, j)]);
    }
    // Orient every face outward.
    for (face, uv_face) in faces.iter_mut().zip(uv_faces.iter_mut()) {
        let [p0, p1, p2] = face.map(|v| vertices[v]);
        let centroid = (p0 + p1 + p2) / 3.0;
        if (p1 - p0).cross(&(p2 - p0)).dot(&centroid) < 0.0 {
            face.swap(1, 2);
            uv_face.swap(1, 2);
        }
    }
    TriMesh::new(vertices, faces, uv_coords, uv_faces).expect("sphere fixture is valid")
}

/// Unit square in the z = 0 plane split along its diagonal into faces
/// (0, 1, 2) and (1, 3, 2); UVs follow (x, y).
pub fn flat_strip() -> TriMesh {
    flat_strip_in(Vector2::new(0.0, 0.0), Vector2::new(1.0, 1.0))
}

/// [`flat_strip`] with its UV chart mapped onto the box `uv_min..uv_max`.
pub fn flat_strip_in(uv_min: Vector2<f64>, uv_max: Vector2<f64>) -> TriMesh {
    let corners = [
        Vector2::new(0.0, 0.0),
        Vector2::new(1.0, 0.0),
        Vector2::new(0.0, 1.0),
        Vector2::new(1.0, 1.0),
    ];
    let vertices = corners.iter().map(|c| Vector3::new(c.x, c.y, 0.0)).collect();
    let uv_coords = corners
        .iter()
        .map(|c| uv_min + (uv_max - uv_min).component_mul(c))
        .collect();
    let faces = vec![[0, 1, 2], [1, 3, 2]];
    TriMesh::new(vertices, faces, uv_coords, vec![[0, 1, 2], [1, 3, 2]])
        .expect("strip fixture is valid")
}

/// Rest pose: flat strip. Deformed pose: face 1 folded about the shared
/// diagonal by `angle` radians.
pub fn bent_strip(angle: f64) -> MeshPair {
    bent_strip_from(flat_strip(), angle)
}

pub fn bent_strip_from(rest: TriMesh, angle: f64) -> MeshPair {
    let v = rest.vertices();
    let axis = Unit::new_normalize(v[2] - v[1]);
    let rot = Rotation3::from_axis_angle(&axis, angle);
    let mut bent = v.to_vec();
    bent[3] = v[1] + rot * (v[3] - v[1]);
    let deformed = rest.with_vertices(bent).expect("same topology");
    MeshPair { rest, deformed }
}

/// Random linear map with singular values in `[0.5, 2]`.
pub fn random_well_conditioned<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let mut rotation = || {
        let axis = Unit::new_normalize(Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0) + 1e-3,
        ));
        Rotation3::from_axis_angle(&axis, rng.gen_range(-PI..PI)).into_inner()
    };
    let (u, v) = (rotation(), rotation());
    let s = Matrix3::from_diagonal(&Vector3::new(
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
    ));
    u * s * v.transpose()
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let axis = Unit::new_normalize(Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0) + 1e-3,
    ));
    Rotation3::from_axis_angle(&axis, rng.gen_range(-PI..PI)).into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_has_requested_face_count_and_outward_normals() {
        let s = uv_sphere(10, 11, 1.0);
        assert_eq!(s.face_count(), 200);
        for f in 0..s.face_count() {
            let [p0, p1, p2] = s.face_positions(f);
            let n = (p1 - p0).cross(&(p2 - p0));
            assert!(n.dot(&s.face_centroid(f)) > 0.0);
        }
    }

    #[test]
    fn bent_strip_keeps_shared_edge() {
        let pair = bent_strip(0.7);
        for k in 0..3 {
            assert_eq!(pair.rest.vertices()[k], pair.deformed.vertices()[k]);
        }
        let moved = pair.deformed.vertices()[3] - pair.rest.vertices()[3];
        assert!(moved.norm() > 0.1);
    }
}
