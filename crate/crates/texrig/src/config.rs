//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored.
//! Lists (`deformed_objs`, `targets`) are comma separated. Relative paths
//! resolve against the directory holding the config file. Unknown keys and
//! repeated keys are errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use texrig_core::fit::{LearningRates, LossWeights};
use texrig_core::mesh::FrameVariant;
use texrig_core::rig::LiftVariant;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub uv_width: usize,
    pub uv_height: usize,
    pub dilation_rings: usize,
    pub variant: LiftVariant,
    pub frame_variant: FrameVariant,
    pub lambda_l1: f64,
    pub lambda_ssim: f64,
    pub lambda_reg_mu: f64,
    pub lambda_reg_s: f64,
    /// Hinge thresholds; derived from the rest mesh's mean edge length when
    /// absent.
    pub eps_mu: Option<f64>,
    pub eps_s: Option<f64>,
    pub iterations: usize,
    pub lr_position: f64,
    pub lr_rotation: f64,
    pub lr_log_scale: f64,
    pub lr_opacity: f64,
    pub lr_color: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    /// Initial maps when `maps` is absent: texel-footprint scale factor,
    /// opacity logit, and a uniform perturbation drawn from `seed`.
    pub init_scale_factor: f64,
    pub init_opacity_logit: f64,
    pub init_perturbation: f64,
    pub log_every: usize,
    pub rest_obj: Option<PathBuf>,
    pub deformed_objs: Vec<PathBuf>,
    pub cameras: Option<PathBuf>,
    pub targets: Vec<PathBuf>,
    pub maps: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lr = LearningRates::default();
        Self {
            uv_width: 512,
            uv_height: 512,
            dilation_rings: 2,
            variant: LiftVariant::QuasiPhong,
            frame_variant: FrameVariant::FullJacobian,
            lambda_l1: 0.8,
            lambda_ssim: 0.2,
            lambda_reg_mu: 1.0,
            lambda_reg_s: 1.0,
            eps_mu: None,
            eps_s: None,
            iterations: 2000,
            lr_position: lr.position,
            lr_rotation: lr.rotation,
            lr_log_scale: lr.log_scale,
            lr_opacity: lr.opacity,
            lr_color: lr.color,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-15,
            init_scale_factor: 0.6,
            init_opacity_logit: 2.0,
            init_perturbation: 0.0,
            log_every: 100,
            rest_obj: None,
            deformed_objs: Vec::new(),
            cameras: None,
            targets: Vec::new(),
            maps: None,
            output_dir: None,
            seed: 0,
        }
    }
}

pub fn frame_variant_name(v: FrameVariant) -> &'static str {
    match v {
        FrameVariant::FullJacobian => "full_jacobian",
        FrameVariant::ScaledRotation => "scaled_rotation",
    }
}

fn bad(line: usize, message: impl Into<String>) -> CliError {
    CliError::Config {
        line,
        message: message.into(),
    }
}

fn num<T: FromStr>(value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| bad(line, format!("cannot parse {value:?}")))
}

fn path(value: &str, base: &Path) -> PathBuf {
    let p = PathBuf::from(value);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn paths(value: &str, base: &Path) -> Vec<PathBuf> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| path(s, base))
        .collect()
}

impl RunConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut c = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| bad(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(bad(line, format!("{key} given twice")));
            }
            seen.push(key.to_string());
            match key {
                "uv_width" => c.uv_width = num(value, line)?,
                "uv_height" => c.uv_height = num(value, line)?,
                "dilation_rings" => c.dilation_rings = num(value, line)?,
                "variant" => {
                    c.variant = LiftVariant::parse(value)
                        .ok_or_else(|| bad(line, format!("unknown variant {value:?}")))?
                }
                "frame_variant" => {
                    c.frame_variant = match value {
                        "full_jacobian" => FrameVariant::FullJacobian,
                        "scaled_rotation" => FrameVariant::ScaledRotation,
                        _ => return Err(bad(line, format!("unknown frame variant {value:?}"))),
                    }
                }
                "lambda_l1" => c.lambda_l1 = num(value, line)?,
                "lambda_ssim" => c.lambda_ssim = num(value, line)?,
                "lambda_reg_mu" => c.lambda_reg_mu = num(value, line)?,
                "lambda_reg_s" => c.lambda_reg_s = num(value, line)?,
                "eps_mu" => c.eps_mu = Some(num(value, line)?),
                "eps_s" => c.eps_s = Some(num(value, line)?),
                "iterations" => c.iterations = num(value, line)?,
                "lr_position" => c.lr_position = num(value, line)?,
                "lr_rotation" => c.lr_rotation = num(value, line)?,
                "lr_log_scale" => c.lr_log_scale = num(value, line)?,
                "lr_opacity" => c.lr_opacity = num(value, line)?,
                "lr_color" => c.lr_color = num(value, line)?,
                "beta1" => c.beta1 = num(value, line)?,
                "beta2" => c.beta2 = num(value, line)?,
                "adam_epsilon" => c.adam_epsilon = num(value, line)?,
                "init_scale_factor" => c.init_scale_factor = num(value, line)?,
                "init_opacity_logit" => c.init_opacity_logit = num(value, line)?,
                "init_perturbation" => c.init_perturbation = num(value, line)?,
                "log_every" => c.log_every = num(value, line)?,
                "rest_obj" => c.rest_obj = Some(path(value, base)),
                "deformed_objs" => c.deformed_objs = paths(value, base),
                "cameras" => c.cameras = Some(path(value, base)),
                "targets" => c.targets = paths(value, base),
                "maps" => c.maps = Some(path(value, base)),
                "output_dir" => c.output_dir = Some(path(value, base)),
                "seed" => c.seed = num(value, line)?,
                _ => return Err(bad(line, format!("unknown key {key:?}"))),
            }
        }
        c.check()?;
        Ok(c)
    }

    pub fn load(file: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(file)
            .map_err(|e| CliError::MissingPath(file.to_path_buf(), e.to_string()))?;
        Self::parse(&text, file.parent().unwrap_or(Path::new("")))
    }

    fn check(&self) -> Result<(), CliError> {
        if self.uv_width == 0 || self.uv_height == 0 {
            return Err(bad(0, "uv_width and uv_height must be positive"));
        }
        if self.log_every == 0 {
            return Err(bad(0, "log_every must be positive"));
        }
        let non_negative = [
            self.lambda_l1,
            self.lambda_ssim,
            self.lambda_reg_mu,
            self.lambda_reg_s,
            self.lr_position,
            self.lr_rotation,
            self.lr_log_scale,
            self.lr_opacity,
            self.lr_color,
            self.adam_epsilon,
            self.init_scale_factor,
            self.init_perturbation,
        ];
        if non_negative.iter().any(|v| !v.is_finite() || *v < 0.0) || !self.init_opacity_logit.is_finite() {
            return Err(bad(0, "weights, rates and init values must be finite and non-negative"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(bad(0, "betas must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Serializes every field; parsing the result gives back `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("uv_width", self.uv_width.to_string());
        put("uv_height", self.uv_height.to_string());
        put("dilation_rings", self.dilation_rings.to_string());
        put("variant", self.variant.name().into());
        put("frame_variant", frame_variant_name(self.frame_variant).into());
        put("lambda_l1", self.lambda_l1.to_string());
        put("lambda_ssim", self.lambda_ssim.to_string());
        put("lambda_reg_mu", self.lambda_reg_mu.to_string());
        put("lambda_reg_s", self.lambda_reg_s.to_string());
        if let Some(v) = self.eps_mu {
            put("eps_mu", v.to_string());
        }
        if let Some(v) = self.eps_s {
            put("eps_s", v.to_string());
        }
        put("iterations", self.iterations.to_string());
        put("lr_position", self.lr_position.to_string());
        put("lr_rotation", self.lr_rotation.to_string());
        put("lr_log_scale", self.lr_log_scale.to_string());
        put("lr_opacity", self.lr_opacity.to_string());
        put("lr_color", self.lr_color.to_string());
        put("beta1", self.beta1.to_string());
        put("beta2", self.beta2.to_string());
        put("adam_epsilon", self.adam_epsilon.to_string());
        put("init_scale_factor", self.init_scale_factor.to_string());
        put("init_opacity_logit", self.init_opacity_logit.to_string());
        put("init_perturbation", self.init_perturbation.to_string());
        put("log_every", self.log_every.to_string());
        let join = |v: &[PathBuf]| v.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",");
        if let Some(p) = &self.rest_obj {
            put("rest_obj", p.display().to_string());
        }
        if !self.deformed_objs.is_empty() {
            put("deformed_objs", join(&self.deformed_objs));
        }
        if let Some(p) = &self.cameras {
            put("cameras", p.display().to_string());
        }
        if !self.targets.is_empty() {
            put("targets", join(&self.targets));
        }
        if let Some(p) = &self.maps {
            put("maps", p.display().to_string());
        }
        if let Some(p) = &self.output_dir {
            put("output_dir", p.display().to_string());
        }
        put("seed", self.seed.to_string());
        s
    }

    pub fn learning_rates(&self) -> LearningRates {
        LearningRates {
            position: self.lr_position,
            rotation: self.lr_rotation,
            log_scale: self.lr_log_scale,
            opacity: self.lr_opacity,
            color: self.lr_color,
        }
    }

    /// Loss weights, filling unset hinge thresholds from `edge_length`.
    pub fn weights(&self, edge_length: f64) -> LossWeights {
        let auto = LossWeights::for_edge_length(edge_length);
        LossWeights {
            lambda_l1: self.lambda_l1,
            lambda_ssim: self.lambda_ssim,
            lambda_reg_mu: self.lambda_reg_mu,
            lambda_reg_s: self.lambda_reg_s,
            eps_mu: self.eps_mu.unwrap_or(auto.eps_mu),
            eps_s: self.eps_s.unwrap_or(auto.eps_s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::parse("uv_width = 64 # comment\n\nvariant = naive\nseed=9\n", Path::new("")).unwrap();
        assert_eq!(c.uv_width, 64);
        assert_eq!(c.uv_height, 512);
        assert_eq!(c.dilation_rings, 2);
        assert_eq!(c.variant, LiftVariant::Naive);
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn unknown_and_repeated_keys_are_rejected() {
        assert!(matches!(
            RunConfig::parse("uv_widht = 3\n", Path::new("")),
            Err(CliError::Config { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("seed = 1\nseed = 2\n", Path::new("")),
            Err(CliError::Config { line: 2, .. })
        ));
        assert!(RunConfig::parse("lambda_l1 = -1\n", Path::new("")).is_err());
        assert!(RunConfig::parse("just words\n", Path::new("")).is_err());
    }

    #[test]
    fn relative_paths_resolve_against_base() {
        let c = RunConfig::parse("rest_obj = a.obj\ndeformed_objs = b.obj, /abs/c.obj\n", Path::new("/cfg")).unwrap();
        assert_eq!(c.rest_obj, Some(PathBuf::from("/cfg/a.obj")));
        assert_eq!(c.deformed_objs, vec![PathBuf::from("/cfg/b.obj"), PathBuf::from("/abs/c.obj")]);
    }

    #[test]
    fn negative_opacity_logit_is_allowed() {
        let c = RunConfig::parse("init_opacity_logit = -1.5\n", Path::new("")).unwrap();
        assert_eq!(c.init_opacity_logit, -1.5);
    }
}
