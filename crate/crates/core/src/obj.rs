//! Minimal Wavefront OBJ reader and writer for textured triangle meshes.
//!
//! Reads `v`, `vt` and `f` records. Face corners must carry a texture index
//! (`v/vt` or `v/vt/vn`); negative indices count back from the end.
//! Polygons are fan-triangulated around their first corner. Everything else
//! (normals, groups, materials) is ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn floats<const N: usize>(words: &[&str], line: usize, what: &str) -> Result<[f64; N]> {
    if words.len() < N {
        return Err(parse_err(line, format!("{what} needs {N} coordinates")));
    }
    let mut out = [0.0f64; N];
    for (o, w) in out.iter_mut().zip(words) {
        *o = w
            .parse()
            .map_err(|_| parse_err(line, format!("bad number {w:?}")))?;
        if !o.is_finite() {
            return Err(parse_err(line, format!("non-finite number {w:?}")));
        }
    }
    Ok(out)
}

fn resolve(index: &str, count: usize, line: usize) -> Result<usize> {
    let i: i64 = index
        .parse()
        .map_err(|_| parse_err(line, format!("bad index {index:?}")))?;
    let resolved = if i > 0 {
        i - 1
    } else if i < 0 {
        count as i64 + i
    } else {
        -1
    };
    if resolved < 0 || resolved >= count as i64 {
        return Err(parse_err(line, format!("index {i} out of range")));
    }
    Ok(resolved as usize)
}

pub fn read_obj(r: impl Read) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut uvs = Vec::new();
    let mut faces = Vec::new();
    let mut uv_faces = Vec::new();
    for (n, text) in BufReader::new(r).lines().enumerate() {
        let line = n + 1;
        let text = text?;
        let text = text.split('#').next().unwrap_or("");
        let words: Vec<&str> = text.split_whitespace().collect();
        match words.first().copied() {
            Some("v") => {
                let [x, y, z] = floats::<3>(&words[1..], line, "vertex")?;
                vertices.push(Vector3::new(x, y, z));
            }
            Some("vt") => {
                let [u, v] = floats::<2>(&words[1..], line, "texture coordinate")?;
                uvs.push(Vector2::new(u, v));
            }
            Some("f") => {
                if words.len() < 4 {
                    return Err(parse_err(line, "face needs at least 3 corners"));
                }
                let mut corners = Vec::with_capacity(words.len() - 1);
                for corner in &words[1..] {
                    let mut parts = corner.split('/');
                    let v = parts.next().unwrap_or("");
                    let vt = parts.next().unwrap_or("");
                    if vt.is_empty() {
                        return Err(Error::MissingUv { line });
                    }
                    corners.push((
                        resolve(v, vertices.len(), line)?,
                        resolve(vt, uvs.len(), line)?,
                    ));
                }
                for k in 1..corners.len() - 1 {
                    faces.push([corners[0].0, corners[k].0, corners[k + 1].0]);
                    uv_faces.push([corners[0].1, corners[k].1, corners[k + 1].1]);
                }
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces, uvs, uv_faces)
}

pub fn parse_obj(path: &Path) -> Result<TriMesh> {
    read_obj(File::open(path)?)
}

pub fn write_obj(w: &mut impl Write, mesh: &TriMesh) -> Result<()> {
    for v in mesh.vertices() {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for t in mesh.uv_coords() {
        writeln!(w, "vt {} {}", t.x, t.y)?;
    }
    for (f, t) in mesh.faces().iter().zip(mesh.uv_faces()) {
        writeln!(
            w,
            "f {}/{} {}/{} {}/{}",
            f[0] + 1,
            t[0] + 1,
            f[1] + 1,
            t[1] + 1,
            f[2] + 1,
            t[2] + 1
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const QUAD: &str = "\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
vt 0 0
vt 1 0
vt 1 1
vt 0 1
";

    #[test]
    fn two_triangle_quad() {
        let text = format!("{QUAD}f 1/1 2/2 3/3\nf 1/1 3/3 4/4\n");
        let m = read_obj(text.as_bytes()).unwrap();
        assert_eq!(m.face_count(), 2);
        assert_eq!(m.uv_coords().len(), 4);
    }

    #[test]
    fn missing_uv_reports_line() {
        let text = format!("{QUAD}f 1 2 3\n");
        assert!(matches!(read_obj(text.as_bytes()), Err(Error::MissingUv { line: 9 })));
        let text = format!("{QUAD}f 1//1 2//2 3//3\n");
        assert!(matches!(read_obj(text.as_bytes()), Err(Error::MissingUv { line: 9 })));
    }

    #[test]
    fn quad_is_fan_triangulated() {
        let text = format!("{QUAD}f 1/1 2/2 3/3 4/4\n");
        let m = read_obj(text.as_bytes()).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn corners_with_normals_and_negative_indices() {
        let text = format!("{QUAD}vn 0 0 1\nf -4/-4/1 -3/-3/1 -2/-2/1\n");
        let m = read_obj(text.as_bytes()).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "v 0 0\n";
        assert!(matches!(read_obj(text.as_bytes()), Err(Error::Parse { line: 1, .. })));
        let text = format!("{QUAD}f 1/1 2/2 9/3\n");
        assert!(matches!(read_obj(text.as_bytes()), Err(Error::Parse { line: 9, .. })));
    }

    #[test]
    fn writer_round_trips() {
        let cube = fixtures::cube();
        let mut buf = Vec::new();
        write_obj(&mut buf, &cube).unwrap();
        let back = read_obj(buf.as_slice()).unwrap();
        assert_eq!(back.faces(), cube.faces());
        assert_eq!(back.uv_faces(), cube.uv_faces());
        assert_eq!(back.vertices(), cube.vertices());
    }
}
