//! PNG, field and map files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use texrig_core::container::{read_grid, read_sections, take_section, write_grid, write_sections};
use texrig_core::image::Image;
use texrig_core::rig::{LocalAttributeMaps, SECTION_NAMES};
use texrig_core::texel::{JacobianField, TexelGrid, TexelState, ValidityMask};

use crate::CliError;

/// Writes an 8-bit RGB PNG, quantized by [`Image::to_rgb8`].
pub fn write_png(path: &Path, image: &Image) -> Result<(), CliError> {
    image::save_buffer(
        path,
        &image.to_rgb8(),
        image.width() as u32,
        image.height() as u32,
        image::ExtendedColorType::Rgb8,
    )
    .map_err(|e| CliError::Image(path.to_path_buf(), e.to_string()))
}

pub fn read_png(path: &Path) -> Result<Image, CliError> {
    let img = image::open(path)
        .map_err(|e| CliError::Image(path.to_path_buf(), e.to_string()))?
        .to_rgb8();
    Ok(Image::from_rgb8(img.width() as usize, img.height() as usize, img.as_raw())?)
}

/// Validity mask as a grayscale PNG: white valid, gray padded, black empty.
/// Row `j` of the texel grid is image row `j`.
pub fn write_mask_png(path: &Path, mask: &ValidityMask) -> Result<(), CliError> {
    let bytes: Vec<u8> = mask
        .states()
        .iter()
        .map(|s| match s {
            TexelState::Valid => 255,
            TexelState::Padded => 128,
            TexelState::Empty => 0,
        })
        .collect();
    image::save_buffer(
        path,
        &bytes,
        mask.width() as u32,
        mask.height() as u32,
        image::ExtendedColorType::L8,
    )
    .map_err(|e| CliError::Image(path.to_path_buf(), e.to_string()))
}

/// Field as one TXF1 grid of 12 channels: the row-major Jacobian followed
/// by the translation.
pub fn write_field(path: &Path, field: &JacobianField) -> Result<(), CliError> {
    let (w, h) = (field.width(), field.height());
    let mut grid = TexelGrid::zeros(w, h, 12);
    for k in 0..w * h {
        let t = grid.texel_mut(k);
        t[..9].copy_from_slice(field.jacobians.texel(k));
        t[9..].copy_from_slice(field.translations.texel(k));
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_grid(&mut out, &grid, &field.mask)?;
    out.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<JacobianField, CliError> {
    let (grid, mask) = read_grid(&mut BufReader::new(File::open(path)?))?;
    if grid.arity() != 12 {
        return Err(texrig_core::Error::Format(format!("field needs 12 channels, found {}", grid.arity())).into());
    }
    let (w, h) = (grid.width(), grid.height());
    let mut jacobians = TexelGrid::zeros(w, h, 9);
    let mut translations = TexelGrid::zeros(w, h, 3);
    for k in 0..w * h {
        jacobians.texel_mut(k).copy_from_slice(&grid.texel(k)[..9]);
        translations.texel_mut(k).copy_from_slice(&grid.texel(k)[9..]);
    }
    Ok(JacobianField {
        jacobians,
        translations,
        mask,
    })
}

/// Local maps as a TXS1 container with one section per attribute.
pub fn write_maps(path: &Path, maps: &LocalAttributeMaps) -> Result<(), CliError> {
    let grids = maps.grids();
    let sections: Vec<(&str, &TexelGrid)> = SECTION_NAMES.iter().copied().zip(grids).collect();
    let mut out = BufWriter::new(File::create(path)?);
    write_sections(&mut out, &sections, &maps.mask)?;
    out.flush()?;
    Ok(())
}

pub fn read_maps(path: &Path) -> Result<LocalAttributeMaps, CliError> {
    let (mut sections, mask) = read_sections(&mut BufReader::new(File::open(path)?))?;
    let maps = LocalAttributeMaps {
        position: take_section(&mut sections, "position")?,
        rotation: take_section(&mut sections, "rotation")?,
        log_scale: take_section(&mut sections, "log_scale")?,
        opacity: take_section(&mut sections, "opacity")?,
        color: take_section(&mut sections, "color")?,
        mask,
    };
    maps.check_shapes()?;
    Ok(maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use texrig_core::fixtures;
    use texrig_core::texel::rasterize_faces;

    #[test]
    fn png_round_trip_is_exact_on_quantized_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.png");
        let img = Image::from_data(2, 1, vec![0.0, 0.5, 1.0, 0.2, 0.7, 0.9]).unwrap();
        write_png(&p, &img).unwrap();
        let back = read_png(&p).unwrap();
        assert_eq!(back.to_rgb8(), img.to_rgb8());
    }

    #[test]
    fn maps_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txs");
        let rest = fixtures::flat_strip();
        let map = rasterize_faces(&rest, 6, 6);
        let m = LocalAttributeMaps::surface_anchored(&rest, &map, 1, -2.0, 0.5, |i, j| [i as f64, j as f64, 0.25]);
        write_maps(&p, &m).unwrap();
        let back = read_maps(&p).unwrap();
        assert_eq!(back.mask, m.mask);
        for (a, b) in back.grids().iter().zip(m.grids()) {
            for (x, y) in a.data().iter().zip(b.data()) {
                assert_eq!(*x, *y as f32 as f64);
            }
        }
    }
}
