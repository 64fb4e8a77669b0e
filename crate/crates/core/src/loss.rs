//! Image losses (L1, SSIM, PSNR) and the per-texel hinge regularizers, each
//! with its gradient.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::rig::{LocalAttributeMaps, MapGradients};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_C1: f64 = 0.01 * 0.01;
pub const SSIM_C2: f64 = 0.03 * 0.03;

/// Mean absolute difference over all pixels and channels.
pub fn loss_l1(image: &Image, target: &Image) -> Result<f64> {
    image.check_shape(target)?;
    let n = image.data().len().max(1) as f64;
    Ok(image
        .data()
        .iter()
        .zip(target.data())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / n)
}

/// Gradient of [`loss_l1`] with respect to `image` (zero where equal).
pub fn loss_l1_grad(image: &Image, target: &Image) -> Result<Image> {
    image.check_shape(target)?;
    let n = image.data().len().max(1) as f64;
    let data = image
        .data()
        .iter()
        .zip(target.data())
        .map(|(a, b)| {
            if a > b {
                1.0 / n
            } else if a < b {
                -1.0 / n
            } else {
                0.0
            }
        })
        .collect();
    Image::from_data(image.width(), image.height(), data)
}

pub fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Valid-mode separable correlation of a `w x h` plane.
fn filter_valid(plane: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (ow, oh) = (w + 1 - SSIM_WINDOW, h + 1 - SSIM_WINDOW);
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            tmp[y * ow + x] = k.iter().zip(&row[x..]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..SSIM_WINDOW).map(|t| k[t] * tmp[(y + t) * ow + x]).sum();
        }
    }
    out
}

/// Adjoint of [`filter_valid`]: scatters a window-grid gradient back onto
/// the `w x h` plane.
fn filter_valid_adjoint(grad: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (ow, oh) = (w + 1 - SSIM_WINDOW, h + 1 - SSIM_WINDOW);
    let mut tmp = vec![0.0; ow * h];
    for y in 0..oh {
        for x in 0..ow {
            let g = grad[y * ow + x];
            for t in 0..SSIM_WINDOW {
                tmp[(y + t) * ow + x] += k[t] * g;
            }
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..ow {
            let g = tmp[y * ow + x];
            for t in 0..SSIM_WINDOW {
                out[y * w + x + t] += k[t] * g;
            }
        }
    }
    out
}

fn check_ssim_shape(image: &Image, target: &Image) -> Result<()> {
    image.check_shape(target)?;
    if image.width() < SSIM_WINDOW || image.height() < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            width: image.width(),
            height: image.height(),
            window: SSIM_WINDOW,
        });
    }
    Ok(())
}

struct SsimMaps {
    mx: Vec<f64>,
    my: Vec<f64>,
    sxx: Vec<f64>,
    syy: Vec<f64>,
    sxy: Vec<f64>,
}

fn ssim_maps(x: &[f64], y: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> SsimMaps {
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let mx = filter_valid(x, w, h, k);
    let my = filter_valid(y, w, h, k);
    let exx = filter_valid(&xx, w, h, k);
    let eyy = filter_valid(&yy, w, h, k);
    let exy = filter_valid(&xy, w, h, k);
    let n = mx.len();
    SsimMaps {
        sxx: (0..n).map(|i| exx[i] - mx[i] * mx[i]).collect(),
        syy: (0..n).map(|i| eyy[i] - my[i] * my[i]).collect(),
        sxy: (0..n).map(|i| exy[i] - mx[i] * my[i]).collect(),
        mx,
        my,
    }
}

/// Mean SSIM over valid 11x11 Gaussian windows, averaged over channels.
pub fn ssim(image: &Image, target: &Image) -> Result<f64> {
    check_ssim_shape(image, target)?;
    let (w, h) = (image.width(), image.height());
    let k = gaussian_window();
    let mut total = 0.0;
    let mut count = 0usize;
    for c in 0..3 {
        let m = ssim_maps(&image.channel(c), &target.channel(c), w, h, &k);
        for i in 0..m.mx.len() {
            let n1 = 2.0 * m.mx[i] * m.my[i] + SSIM_C1;
            let n2 = 2.0 * m.sxy[i] + SSIM_C2;
            let d1 = m.mx[i] * m.mx[i] + m.my[i] * m.my[i] + SSIM_C1;
            let d2 = m.sxx[i] + m.syy[i] + SSIM_C2;
            total += n1 * n2 / (d1 * d2);
        }
        count += m.mx.len();
    }
    Ok(total / count as f64)
}

/// `1 - SSIM`.
pub fn loss_ssim(image: &Image, target: &Image) -> Result<f64> {
    Ok(1.0 - ssim(image, target)?)
}

/// Gradient of [`loss_ssim`] with respect to `image`.
pub fn loss_ssim_grad(image: &Image, target: &Image) -> Result<Image> {
    check_ssim_shape(image, target)?;
    let (w, h) = (image.width(), image.height());
    let k = gaussian_window();
    let windows = (w + 1 - SSIM_WINDOW) * (h + 1 - SSIM_WINDOW);
    let d_s = -1.0 / (3 * windows) as f64;
    let mut out = Image::new(w, h);
    for c in 0..3 {
        let x = image.channel(c);
        let y = target.channel(c);
        let m = ssim_maps(&x, &y, w, h, &k);
        let n = m.mx.len();
        let mut g_mx = vec![0.0; n];
        let mut g_exx = vec![0.0; n];
        let mut g_exy = vec![0.0; n];
        for i in 0..n {
            let (mx, my) = (m.mx[i], m.my[i]);
            let n1 = 2.0 * mx * my + SSIM_C1;
            let n2 = 2.0 * m.sxy[i] + SSIM_C2;
            let d1 = mx * mx + my * my + SSIM_C1;
            let d2 = m.sxx[i] + m.syy[i] + SSIM_C2;
            let s = n1 * n2 / (d1 * d2);
            g_mx[i] = d_s
                * (2.0 * my * (n2 - n1) / (d1 * d2) - 2.0 * mx * s / d1 + 2.0 * mx * s / d2);
            g_exx[i] = d_s * (-s / d2);
            g_exy[i] = d_s * (2.0 * n1 / (d1 * d2));
        }
        let a_mx = filter_valid_adjoint(&g_mx, w, h, &k);
        let a_exx = filter_valid_adjoint(&g_exx, w, h, &k);
        let a_exy = filter_valid_adjoint(&g_exy, w, h, &k);
        let data = out.data_mut();
        for p in 0..w * h {
            data[3 * p + c] = a_mx[p] + 2.0 * x[p] * a_exx[p] + y[p] * a_exy[p];
        }
    }
    Ok(out)
}

/// Peak signal-to-noise ratio in dB for a unit dynamic range.
pub fn psnr(image: &Image, target: &Image) -> Result<f64> {
    image.check_shape(target)?;
    let n = image.data().len().max(1) as f64;
    let mse = image
        .data()
        .iter()
        .zip(target.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    Ok(if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    })
}

fn hinge_mean(values: impl Iterator<Item = f64>, eps: f64, count: usize) -> f64 {
    if count == 0 {
        return 0.0;
    }
    values.map(|v| (v - eps).max(0.0)).sum::<f64>() / count as f64
}

/// Mean over valid texels and components of `max(|mu| - eps_mu, 0)`.
pub fn loss_reg_position(local: &LocalAttributeMaps, eps_mu: f64) -> f64 {
    let valid = local.mask.valid_indices();
    hinge_mean(
        valid
            .iter()
            .flat_map(|&k| local.position.texel(k).iter().map(|v| v.abs())),
        eps_mu,
        3 * valid.len(),
    )
}

/// Mean over valid texels and components of `max(exp(log_scale) - eps_s, 0)`.
pub fn loss_reg_scale(local: &LocalAttributeMaps, eps_s: f64) -> f64 {
    let valid = local.mask.valid_indices();
    hinge_mean(
        valid
            .iter()
            .flat_map(|&k| local.log_scale.texel(k).iter().map(|v| v.exp())),
        eps_s,
        3 * valid.len(),
    )
}

/// Adds `weight` times the gradient of [`loss_reg_position`] into `grads`.
pub fn add_reg_position_grad(local: &LocalAttributeMaps, eps_mu: f64, weight: f64, grads: &mut MapGradients) {
    let valid = local.mask.valid_indices();
    let scale = weight / (3 * valid.len().max(1)) as f64;
    for k in valid {
        for c in 0..3 {
            let v = local.position.texel(k)[c];
            if v.abs() > eps_mu {
                grads.position[3 * k + c] += scale * v.signum();
            }
        }
    }
}

/// Adds `weight` times the gradient of [`loss_reg_scale`] into `grads`.
pub fn add_reg_scale_grad(local: &LocalAttributeMaps, eps_s: f64, weight: f64, grads: &mut MapGradients) {
    let valid = local.mask.valid_indices();
    let scale = weight / (3 * valid.len().max(1)) as f64;
    for k in valid {
        for c in 0..3 {
            let s = local.log_scale.texel(k)[c].exp();
            if s > eps_s {
                grads.log_scale[3 * k + c] += scale * s;
            }
        }
    }
}
