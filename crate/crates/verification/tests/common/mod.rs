use std::fs::File;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Rotation3, Vector3};
use texrig_core::mesh::TriMesh;
use texrig_core::obj::write_obj;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI in-process with the given arguments.
pub fn texrig(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = texrig::cli::run(std::iter::once("texrig").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8_lossy(&out).into_owned(),
        stderr: String::from_utf8_lossy(&err).into_owned(),
    }
}

pub fn write_mesh(dir: &Path, name: &str, mesh: &TriMesh) -> PathBuf {
    let p = dir.join(name);
    write_obj(&mut File::create(&p).unwrap(), mesh).unwrap();
    p
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// In-plane stretch and shear with a rotation about z: keeps the unit
/// normal of z = 0 geometry, so face frames reproduce it exactly.
pub fn planar_affine() -> (Matrix3<f64>, Vector3<f64>) {
    let r = Rotation3::from_axis_angle(&Vector3::z_axis(), 0.3).into_inner();
    let s = Matrix3::new(1.3, 0.2, 0.0, -0.1, 0.8, 0.0, 0.0, 0.0, 1.0);
    (r * s, Vector3::new(0.1, -0.2, 0.05))
}

/// Camera line looking down -z at `(x, y, 0)` from height `z`.
pub fn overhead_camera(pose: usize, x: f64, y: f64, z: f64, size: usize) -> String {
    format!("{pose} {x} {y} {z} {x} {y} 0 0 1 0 0.8 {size} {size} bg 0.1 0.1 0.2\n")
}
