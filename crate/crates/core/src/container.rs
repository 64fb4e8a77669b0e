//! Flat little-endian texel container.
//!
//! A single grid block is
//!
//! ```text
//! "TXF1" | width u32 | height u32 | arity u32 | width*height mask bytes | f32 data
//! ```
//!
//! with mask bytes 0 = empty, 1 = valid, 2 = padded and data row-major.
//! Several named grids are stored as `"TXS1" | count u32` followed by
//! `name_len u32 | utf-8 name | block` per section.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::texel::{TexelGrid, TexelState, ValidityMask};

const GRID_MAGIC: &[u8; 4] = b"TXF1";
const SECTIONS_MAGIC: &[u8; 4] = b"TXS1";

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn write_grid(w: &mut impl Write, grid: &TexelGrid, mask: &ValidityMask) -> Result<()> {
    if mask.width() != grid.width() || mask.height() != grid.height() {
        return Err(Error::ShapeMismatch("mask and grid sizes differ".into()));
    }
    w.write_all(GRID_MAGIC)?;
    for v in [grid.width(), grid.height(), grid.arity()] {
        w.write_all(&(v as u32).to_le_bytes())?;
    }
    let mask_bytes: Vec<u8> = mask.states().iter().map(|s| s.to_byte()).collect();
    w.write_all(&mask_bytes)?;
    let mut buf = Vec::with_capacity(grid.data().len() * 4);
    for v in grid.data() {
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_grid(r: &mut impl Read) -> Result<(TexelGrid, ValidityMask)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != GRID_MAGIC {
        return Err(Error::Format("missing TXF1 magic".into()));
    }
    let width = read_u32(r)? as usize;
    let height = read_u32(r)? as usize;
    let arity = read_u32(r)? as usize;
    let n = width
        .checked_mul(height)
        .filter(|n| n.checked_mul(arity.max(1)).is_some_and(|m| m < (1 << 31)))
        .ok_or_else(|| Error::Format("grid dimensions overflow".into()))?;
    let mut mask_bytes = vec![0u8; n];
    r.read_exact(&mut mask_bytes)?;
    let states = mask_bytes
        .iter()
        .map(|&b| TexelState::from_byte(b).ok_or_else(|| Error::Format(format!("mask byte {b}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut raw = vec![0u8; n * arity * 4];
    r.read_exact(&mut raw)?;
    let data = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Ok((
        TexelGrid::from_data(width, height, arity, data)?,
        ValidityMask::new(width, height, states)?,
    ))
}

pub fn write_sections(
    w: &mut impl Write,
    sections: &[(&str, &TexelGrid)],
    mask: &ValidityMask,
) -> Result<()> {
    w.write_all(SECTIONS_MAGIC)?;
    w.write_all(&(sections.len() as u32).to_le_bytes())?;
    for (name, grid) in sections {
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name.as_bytes())?;
        write_grid(w, grid, mask)?;
    }
    Ok(())
}

/// Reads a section container. All sections must share one mask.
pub fn read_sections(r: &mut impl Read) -> Result<(Vec<(String, TexelGrid)>, ValidityMask)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SECTIONS_MAGIC {
        return Err(Error::Format("missing TXS1 magic".into()));
    }
    let count = read_u32(r)? as usize;
    let mut sections = Vec::with_capacity(count.min(64));
    let mut shared: Option<ValidityMask> = None;
    for _ in 0..count {
        let len = read_u32(r)? as usize;
        if len > 4096 {
            return Err(Error::Format("section name too long".into()));
        }
        let mut name = vec![0u8; len];
        r.read_exact(&mut name)?;
        let name = String::from_utf8(name).map_err(|_| Error::Format("section name".into()))?;
        let (grid, mask) = read_grid(r)?;
        match &shared {
            Some(m) if *m != mask => {
                return Err(Error::Format(format!("section {name} has a different mask")))
            }
            Some(_) => {}
            None => shared = Some(mask),
        }
        sections.push((name, grid));
    }
    let mask = shared.ok_or_else(|| Error::Format("empty section container".into()))?;
    Ok((sections, mask))
}

pub fn take_section(sections: &mut Vec<(String, TexelGrid)>, name: &str) -> Result<TexelGrid> {
    let pos = sections
        .iter()
        .position(|(n, _)| n == name)
        .ok_or_else(|| Error::Format(format!("missing section {name}")))?;
    Ok(sections.swap_remove(pos).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn grid_round_trips_through_f32(
            w in 1usize..6, h in 1usize..6, arity in 1usize..5,
            seed in any::<u64>(),
        ) {
            let n = w * h * arity;
            let data: Vec<f64> = (0..n)
                .map(|k| ((seed.wrapping_mul(k as u64 + 1) % 1000) as f64 - 500.0) / 7.0)
                .collect();
            let grid = TexelGrid::from_data(w, h, arity, data).unwrap();
            let states = (0..w * h)
                .map(|k| TexelState::from_byte((k % 3) as u8).unwrap())
                .collect();
            let mask = ValidityMask::new(w, h, states).unwrap();
            let mut buf = Vec::new();
            write_grid(&mut buf, &grid, &mask).unwrap();
            prop_assert_eq!(buf.len(), 16 + w * h + n * 4);
            let (g2, m2) = read_grid(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(&m2, &mask);
            for (a, b) in grid.data().iter().zip(g2.data()) {
                prop_assert_eq!(*a as f32, *b as f32);
            }
        }
    }

    #[test]
    fn header_layout_is_little_endian() {
        let grid = TexelGrid::filled(2, 1, &[1.0]);
        let mut buf = Vec::new();
        write_grid(&mut buf, &grid, &ValidityMask::all_valid(2, 1)).unwrap();
        assert_eq!(&buf[..4], b"TXF1");
        assert_eq!(&buf[4..16], &[2, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&buf[16..18], &[1, 1]);
        assert_eq!(&buf[18..22], &1.0f32.to_le_bytes());
    }

    #[test]
    fn truncated_file_is_an_error() {
        let grid = TexelGrid::filled(3, 3, &[1.0, 2.0]);
        let mut buf = Vec::new();
        write_grid(&mut buf, &grid, &ValidityMask::all_valid(3, 3)).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_grid(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn sections_round_trip() {
        let a = TexelGrid::filled(2, 2, &[1.0, 2.0, 3.0]);
        let b = TexelGrid::filled(2, 2, &[4.0]);
        let mask = ValidityMask::all_valid(2, 2);
        let mut buf = Vec::new();
        write_sections(&mut buf, &[("alpha", &a), ("beta", &b)], &mask).unwrap();
        let (mut sections, m) = read_sections(&mut buf.as_slice()).unwrap();
        assert_eq!(m, mask);
        assert_eq!(take_section(&mut sections, "beta").unwrap(), b);
        assert_eq!(take_section(&mut sections, "alpha").unwrap(), a);
        assert!(take_section(&mut sections, "gamma").is_err());
    }
}
