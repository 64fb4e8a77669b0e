//! Plain-text camera list.
//!
//! One camera per line:
//!
//! ```text
//! pose  eye_x eye_y eye_z  target_x target_y target_z  up_x up_y up_z  fov_y  width height  [bg r g b]
//! ```
//!
//! `pose` indexes `deformed_objs`, `fov_y` is in radians, and the optional
//! background (keyword `bg` then RGB) defaults to black. `#` starts a comment.

use nalgebra::Vector3;
use texrig_core::render::Camera;
use texrig_core::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct PosedCamera {
    pub pose: usize,
    pub camera: Camera,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_cameras(text: &str) -> Result<Vec<PosedCamera>, Error> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let words: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        if words.len() != 13 && words.len() != 17 {
            return Err(parse_err(line, format!("expected 13 or 17 fields, found {}", words.len())));
        }
        let pose: usize = words[0]
            .parse()
            .map_err(|_| parse_err(line, format!("bad pose index {:?}", words[0])))?;
        let f = |i: usize| -> Result<f64, Error> {
            let v: f64 = words[i]
                .parse()
                .map_err(|_| parse_err(line, format!("bad number {:?}", words[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(line, format!("non-finite number {:?}", words[i])))
            }
        };
        let size = |i: usize| -> Result<usize, Error> {
            words[i]
                .parse()
                .map_err(|_| parse_err(line, format!("bad image size {:?}", words[i])))
        };
        let v3 = |i: usize| -> Result<Vector3<f64>, Error> { Ok(Vector3::new(f(i)?, f(i + 1)?, f(i + 2)?)) };
        let mut camera = Camera::look_at(v3(1)?, v3(4)?, v3(7)?, f(10)?, size(11)?, size(12)?);
        if words.len() == 17 {
            if words[13] != "bg" {
                return Err(parse_err(line, "background must be introduced by `bg`"));
            }
            camera.background = v3(14)?;
        }
        camera
            .validate()
            .map_err(|e| parse_err(line, e.to_string()))?;
        out.push(PosedCamera { pose, camera });
    }
    Ok(out)
}
