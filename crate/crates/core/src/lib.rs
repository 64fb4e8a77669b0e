//! Texture-space Gaussian rigging on deforming triangle meshes.
//!
//! Gaussians live in a UV texel grid, each expressed in the local frame of
//! the face that covers it. Per-face deformation Jacobians carry them into
//! world space, where a differentiable splatting renderer and an image loss
//! drive a gradient-based fit of the local attributes.

pub mod analysis;
pub mod container;
pub mod error;
pub mod export;
pub mod fit;
pub mod fixtures;
pub mod image;
pub mod loss;
pub mod mesh;
pub mod obj;
mod par;
pub mod render;
pub mod rig;
pub mod scenes;
pub mod seams;
pub mod texel;
pub mod validate;

pub use error::{Error, Result};
