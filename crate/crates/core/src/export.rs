//! Binary little-endian PLY in the layout common to splatting viewers:
//! `x y z nx ny nz f_dc_0..2 opacity scale_0..2 rot_0..3`, all float32,
//! with log-scales, an opacity logit, a `(w, x, y, z)` quaternion and the
//! zeroth spherical-harmonic color band.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{Matrix3, Rotation3, SymmetricEigen, UnitQuaternion, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::rig::{is_psd, logit, quat_to_matrix, sigmoid, GlobalGaussianSet};

pub const SH_C0: f64 = 0.28209479177387814;

const PROPERTIES: [&str; 17] = [
    "x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2", "opacity", "scale_0", "scale_1",
    "scale_2", "rot_0", "rot_1", "rot_2", "rot_3",
];

/// Log-scales and unit quaternion with `R diag(exp(2 s)) R^T = sigma`.
/// Eigenvalues are sorted descending and the eigenvector basis is made
/// right-handed.
pub fn decompose_covariance(sigma: &Matrix3<f64>) -> ([f64; 3], [f64; 4]) {
    let eig = SymmetricEigen::new((sigma + sigma.transpose()) * 0.5);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut r = Matrix3::from_columns(&[
        eig.eigenvectors.column(order[0]).into_owned(),
        eig.eigenvectors.column(order[1]).into_owned(),
        eig.eigenvectors.column(order[2]).into_owned(),
    ]);
    if r.determinant() < 0.0 {
        r.set_column(2, &(-r.column(2)));
    }
    let scales = order.map(|k| 0.5 * eig.eigenvalues[k].max(1e-300).ln());
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(r));
    let mut q = [q.w, q.i, q.j, q.k];
    if q[0] < 0.0 {
        q = q.map(|v| -v);
    }
    (scales, q)
}

pub fn write_ply(w: &mut impl Write, set: &GlobalGaussianSet) -> Result<()> {
    set.validate()?;
    let mut header = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n",
        set.len()
    );
    for p in PROPERTIES {
        header.push_str(&format!("property float {p}\n"));
    }
    header.push_str("end_header\n");
    w.write_all(header.as_bytes())?;
    let mut buf = Vec::with_capacity(set.len() * PROPERTIES.len() * 4);
    for i in 0..set.len() {
        let (scales, q) = decompose_covariance(&set.covariances[i]);
        let p = set.positions[i];
        let c = set.colors[i];
        let o = set.opacities[i].clamp(1e-12, 1.0 - 1e-12);
        let row = [
            p.x,
            p.y,
            p.z,
            0.0,
            0.0,
            0.0,
            (c.x - 0.5) / SH_C0,
            (c.y - 0.5) / SH_C0,
            (c.z - 0.5) / SH_C0,
            logit(o),
            scales[0],
            scales[1],
            scales[2],
            q[0],
            q[1],
            q[2],
            q[3],
        ];
        for v in row {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn export_gaussians(set: &GlobalGaussianSet, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_ply(&mut w, set)?;
    w.flush()?;
    Ok(())
}

/// Reads a float-only binary little-endian vertex PLY that carries at least
/// the splatting properties; other float properties are skipped.
pub fn read_ply(r: &mut impl Read) -> Result<GlobalGaussianSet> {
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    let mut count = None;
    let mut props: Vec<String> = Vec::new();
    let mut first = true;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Err(Error::Format("PLY header ended early".into()));
        }
        let l = line.trim_end();
        let words: Vec<&str> = l.split_whitespace().collect();
        if first {
            if l != "ply" {
                return Err(Error::Format("missing ply magic".into()));
            }
            first = false;
            continue;
        }
        match words.as_slice() {
            ["format", "binary_little_endian", _] => {}
            ["format", other, ..] => {
                return Err(Error::Format(format!("unsupported PLY format {other}")))
            }
            ["element", "vertex", n] => {
                count = Some(
                    n.parse::<usize>()
                        .map_err(|_| Error::Format(format!("bad vertex count {n}")))?,
                )
            }
            ["element", ..] => return Err(Error::Format("only vertex elements are supported".into())),
            ["property", "float", name] => props.push(name.to_string()),
            ["property", ..] => return Err(Error::Format(format!("unsupported property: {l}"))),
            ["end_header"] => break,
            ["comment", ..] | ["obj_info", ..] | [] => {}
            _ => return Err(Error::Format(format!("unexpected header line: {l}"))),
        }
    }
    let count = count.ok_or_else(|| Error::Format("missing vertex element".into()))?;
    let column = |name: &str| {
        props
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::Format(format!("missing property {name}")))
    };
    let cols: Vec<usize> = PROPERTIES.iter().map(|p| column(p)).collect::<Result<_>>()?;
    let stride = props.len();
    if count.saturating_mul(stride) > 1 << 30 {
        return Err(Error::Format("PLY too large".into()));
    }
    let mut raw = vec![0u8; count * stride * 4];
    reader.read_exact(&mut raw)?;
    let values: Vec<f64> = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let mut set = GlobalGaussianSet::default();
    for i in 0..count {
        let row = &values[i * stride..(i + 1) * stride];
        let v = |k: usize| row[cols[k]];
        set.positions.push(Vector3::new(v(0), v(1), v(2)));
        set.colors.push(Vector3::new(
            0.5 + SH_C0 * v(6),
            0.5 + SH_C0 * v(7),
            0.5 + SH_C0 * v(8),
        ));
        set.opacities.push(sigmoid(v(9)));
        let q = Vector4::new(v(13), v(14), v(15), v(16));
        let n = q.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroQuaternion { texel: None });
        }
        let r = quat_to_matrix(&(q / n));
        let s2 = Vector3::new((2.0 * v(10)).exp(), (2.0 * v(11)).exp(), (2.0 * v(12)).exp());
        let sigma = r * Matrix3::from_diagonal(&s2) * r.transpose();
        let sigma = (sigma + sigma.transpose()) * 0.5;
        if !is_psd(&sigma) {
            return Err(Error::NonPsd { index: i });
        }
        set.covariances.push(sigma);
        set.source_texel.push((0, 0));
    }
    Ok(set)
}

pub fn import_gaussians(path: &Path) -> Result<GlobalGaussianSet> {
    read_ply(&mut File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one(sigma: Matrix3<f64>, color: f64) -> GlobalGaussianSet {
        GlobalGaussianSet {
            positions: vec![Vector3::new(1.0, 2.0, 3.0)],
            covariances: vec![sigma],
            colors: vec![Vector3::new(color, color, color)],
            opacities: vec![0.7],
            source_texel: vec![(0, 0)],
        }
    }

    #[test]
    fn identity_covariance_decomposes_to_unit_scales() {
        let (s, q) = decompose_covariance(&Matrix3::identity());
        for v in s {
            assert!(v.abs() < 1e-12);
        }
        let r = quat_to_matrix(&Vector4::from(q));
        assert!((r * r.transpose() - Matrix3::identity()).amax() < 1e-12);
    }

    #[test]
    fn mid_gray_has_zero_sh_coefficient() {
        let mut buf = Vec::new();
        write_ply(&mut buf, &one(Matrix3::identity(), 0.5)).unwrap();
        let body = buf.len() - 17 * 4;
        let f_dc0 = f32::from_le_bytes(buf[body + 24..body + 28].try_into().unwrap());
        assert_eq!(f_dc0, 0.0);
    }

    #[test]
    fn random_gaussians_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut set = GlobalGaussianSet::default();
        for i in 0..300 {
            let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            set.positions.push(Vector3::new(rng.gen(), rng.gen(), rng.gen()));
            set.covariances.push(a * a.transpose() * 0.01 + Matrix3::identity() * 1e-4);
            set.colors.push(Vector3::new(rng.gen(), rng.gen(), rng.gen()));
            set.opacities.push(rng.gen_range(0.01..0.99));
            set.source_texel.push((i, 0));
        }
        let mut buf = Vec::new();
        write_ply(&mut buf, &set).unwrap();
        let back = read_ply(&mut buf.as_slice()).unwrap();
        assert_eq!(back.len(), set.len());
        for (a, b) in set.covariances.iter().zip(&back.covariances) {
            assert!((a - b).norm() / a.norm() < 1e-5);
        }
        for (a, b) in set.opacities.iter().zip(&back.opacities) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn non_psd_is_rejected() {
        let bad = one(Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0)), 0.5);
        assert!(matches!(write_ply(&mut Vec::new(), &bad), Err(Error::NonPsd { index: 0 })));
    }

    #[test]
    fn header_lists_properties_in_order() {
        let mut buf = Vec::new();
        write_ply(&mut buf, &one(Matrix3::identity(), 0.2)).unwrap();
        let text = String::from_utf8_lossy(&buf);
        let header: Vec<&str> = text.split("end_header").next().unwrap().lines().collect();
        assert_eq!(header[1], "format binary_little_endian 1.0");
        assert_eq!(header[2], "element vertex 1");
        assert_eq!(header[3], "property float x");
        assert_eq!(header[19], "property float rot_3");
    }
}
