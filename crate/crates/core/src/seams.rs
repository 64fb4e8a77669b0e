//! Seam continuity of the two lifts.
//!
//! Each texel `k` carries an affine deformation map
//! `D_k(x) = J_k (x - c_k) + T_k`, where `c_k` is the rest centroid of its
//! face (dilated like the field itself). For every pair of 4-adjacent
//! texels covered by different faces, a shared probe point near the seam is
//! pushed through both sides' maps: directly for the naive lift, and
//! through the corner-lattice stencils for Quasi-Phong. A probe covariance
//! is treated the same way. A continuous rig gives equal results.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::mesh::{all_face_frames, FrameVariant, MeshPair};
use crate::texel::{
    build_jacobian_field, corner_lattice_stencils, dilate_field, FaceIdMap, JacobianField, Stencil,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SeamPair {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub face_a: usize,
    pub face_b: usize,
    pub naive_position: f64,
    pub naive_covariance: f64,
    pub quasi_phong_position: f64,
    pub quasi_phong_covariance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GapStats {
    pub max: f64,
    pub mean: f64,
}

impl GapStats {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count().max(1) as f64;
        Self {
            max: values.clone().fold(0.0, f64::max),
            mean: values.sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeamReport {
    pub pairs: Vec<SeamPair>,
    pub naive_position: GapStats,
    pub naive_covariance: GapStats,
    pub quasi_phong_position: GapStats,
    pub quasi_phong_covariance: GapStats,
}

/// Probe placement: distance along the rest normal, and the in-plane
/// standard deviation of the probe covariance, both in mesh units. The
/// probe is a disk a quarter as thick along the rest normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeamProbe {
    pub normal_offset: f64,
    pub sigma: f64,
}

impl Default for SeamProbe {
    fn default() -> Self {
        Self {
            normal_offset: 0.0,
            sigma: 0.05,
        }
    }
}

/// Texel pairs `(k, l)` with `l` right of or below `k`, both covered, by
/// different faces.
pub fn seam_pairs(face_map: &FaceIdMap) -> Vec<(usize, usize)> {
    let (w, h) = (face_map.width(), face_map.height());
    let hits = face_map.hits();
    let mut out = Vec::new();
    for j in 0..h {
        for i in 0..w {
            let k = j * w + i;
            let Some(a) = hits[k] else { continue };
            for l in [(i + 1 < w).then(|| k + 1), (j + 1 < h).then(|| k + w)]
                .into_iter()
                .flatten()
            {
                if let Some(b) = hits[l] {
                    if a.face != b.face {
                        out.push((k, l));
                    }
                }
            }
        }
    }
    out
}

struct TexelMaps {
    deformed: JacobianField,
    rest_centroids: JacobianField,
    stencils: Vec<Option<Stencil>>,
}

impl TexelMaps {
    fn apply(&self, k: usize, x: &Vector3<f64>) -> Vector3<f64> {
        self.deformed.jacobian(k) * (x - self.rest_centroids.translation(k))
            + self.deformed.translation(k)
    }

    fn push(&self, k: usize, sigma: &Matrix3<f64>) -> Matrix3<f64> {
        let j = self.deformed.jacobian(k);
        j * sigma * j.transpose()
    }

    fn blended(&self, k: usize, x: &Vector3<f64>, sigma: &Matrix3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        let w = self.deformed.width();
        let st = self.stencils[k].ok_or(Error::AllNeighborsInvalid { i: k % w, j: k / w })?;
        let mut p = Vector3::zeros();
        let mut c = Matrix3::zeros();
        for &(src, wt) in st.taps() {
            p += self.apply(src, x) * wt;
            c += self.push(src, sigma) * wt;
        }
        Ok((p, c))
    }
}

pub fn compare_seams(
    pair: &MeshPair,
    face_map: &FaceIdMap,
    variant: FrameVariant,
    rings: usize,
    probe: SeamProbe,
) -> Result<SeamReport> {
    let seams = seam_pairs(face_map);
    if seams.is_empty() {
        return Err(Error::NoSeams);
    }
    let frames = all_face_frames(pair, variant)?;
    let rest_pair = MeshPair {
        rest: pair.rest.clone(),
        deformed: pair.rest.clone(),
    };
    let rest_frames = all_face_frames(&rest_pair, variant)?;
    let deformed = dilate_field(&build_jacobian_field(&frames, face_map)?, rings);
    let rest_centroids = dilate_field(&build_jacobian_field(&rest_frames, face_map)?, rings);
    let stencils = corner_lattice_stencils(&deformed.mask);
    let maps = TexelMaps {
        deformed,
        rest_centroids,
        stencils,
    };
    let w = face_map.width();
    let mut pairs = Vec::with_capacity(seams.len());
    for (k, l) in seams {
        let ha = face_map.hits()[k].expect("seam texels are covered");
        let hb = face_map.hits()[l].expect("seam texels are covered");
        let rest = &pair.rest;
        let normal = {
            let [p0, p1, p2] = rest.face_positions(ha.face);
            let n = (p1 - p0).cross(&(p2 - p0));
            let [q0, q1, q2] = rest.face_positions(hb.face);
            (n.normalize() + (q1 - q0).cross(&(q2 - q0)).normalize()).normalize()
        };
        let normal = if normal.iter().all(|v| v.is_finite()) {
            normal
        } else {
            Vector3::zeros()
        };
        let sigma = (Matrix3::identity() - normal * normal.transpose() * (1.0 - 1.0 / 16.0))
            * probe.sigma
            * probe.sigma;
        let x = (rest.face_point(ha.face, ha.bary) + rest.face_point(hb.face, hb.bary)) * 0.5
            + normal * probe.normal_offset;
        let naive_position = (maps.apply(k, &x) - maps.apply(l, &x)).norm();
        let naive_covariance = (maps.push(k, &sigma) - maps.push(l, &sigma)).norm();
        let (pa, ca) = maps.blended(k, &x, &sigma)?;
        let (pb, cb) = maps.blended(l, &x, &sigma)?;
        pairs.push(SeamPair {
            a: (k % w, k / w),
            b: (l % w, l / w),
            face_a: ha.face,
            face_b: hb.face,
            naive_position,
            naive_covariance,
            quasi_phong_position: (pa - pb).norm(),
            quasi_phong_covariance: (ca - cb).norm(),
        });
    }
    Ok(SeamReport {
        naive_position: GapStats::of(pairs.iter().map(|p| p.naive_position)),
        naive_covariance: GapStats::of(pairs.iter().map(|p| p.naive_covariance)),
        quasi_phong_position: GapStats::of(pairs.iter().map(|p| p.quasi_phong_position)),
        quasi_phong_covariance: GapStats::of(pairs.iter().map(|p| p.quasi_phong_covariance)),
        pairs,
    })
}

impl SeamReport {
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "ia,ja,ib,jb,face_a,face_b,naive_position,naive_covariance,quasi_phong_position,quasi_phong_covariance"
        )?;
        for p in &self.pairs {
            writeln!(
                w,
                "{},{},{},{},{},{},{:e},{:e},{:e},{:e}",
                p.a.0,
                p.a.1,
                p.b.0,
                p.b.1,
                p.face_a,
                p.face_b,
                p.naive_position,
                p.naive_covariance,
                p.quasi_phong_position,
                p.quasi_phong_covariance
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "seam pairs: {}\n\
             naive        position max {:.6e} mean {:.6e}  covariance max {:.6e} mean {:.6e}\n\
             quasi_phong  position max {:.6e} mean {:.6e}  covariance max {:.6e} mean {:.6e}\n",
            self.pairs.len(),
            self.naive_position.max,
            self.naive_position.mean,
            self.naive_covariance.max,
            self.naive_covariance.mean,
            self.quasi_phong_position.max,
            self.quasi_phong_position.mean,
            self.quasi_phong_covariance.max,
            self.quasi_phong_covariance.mean,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::texel::rasterize_faces;

    fn report(angle: f64, res: usize) -> SeamReport {
        let pair = fixtures::bent_strip(angle);
        let map = rasterize_faces(&pair.rest, res, res);
        compare_seams(&pair, &map, FrameVariant::FullJacobian, 2, SeamProbe::default()).unwrap()
    }

    #[test]
    fn flat_strip_has_no_gap() {
        let r = report(0.0, 16);
        assert!(!r.pairs.is_empty());
        assert!(r.naive_position.max <= 1e-12);
        assert!(r.quasi_phong_position.max <= 1e-12);
        assert!(r.naive_covariance.max <= 1e-12);
    }

    #[test]
    fn bending_opens_a_smaller_gap_for_quasi_phong() {
        for deg in [10.0f64, 30.0, 60.0, 90.0] {
            let r = report(deg.to_radians(), 16);
            assert!(r.naive_position.max > 0.0);
            assert!(r.quasi_phong_position.max < r.naive_position.max, "{deg}: {}", r.summary());
            // Texels near the grid center sample their own centers on the
            // corner lattice, so the worst covariance pair is unblended.
            assert!(r.quasi_phong_covariance.max <= r.naive_covariance.max + 1e-15);
            assert!(r.quasi_phong_covariance.mean < r.naive_covariance.mean);
        }
    }

    #[test]
    fn affine_map_of_flat_strip_is_seamless() {
        let rest = fixtures::flat_strip();
        let a = Matrix3::new(1.3, 0.2, -0.1, 0.1, 0.8, 0.3, 0.0, 0.2, 1.1);
        let deformed = rest.map_vertices(|p| a * p + Vector3::new(0.2, 0.0, -1.0)).unwrap();
        let pair = MeshPair { rest, deformed };
        let map = rasterize_faces(&pair.rest, 12, 12);
        let r = compare_seams(&pair, &map, FrameVariant::FullJacobian, 2, SeamProbe::default()).unwrap();
        assert!(r.naive_position.max <= 1e-6 && r.quasi_phong_position.max <= 1e-6);
        assert!(r.naive_covariance.max <= 1e-6 && r.quasi_phong_covariance.max <= 1e-6);
    }

    #[test]
    fn single_face_has_no_seams() {
        let pair = fixtures::bent_strip(0.3);
        let map = rasterize_faces(&pair.rest, 8, 8);
        let mut hits = map.hits().to_vec();
        for h in hits.iter_mut().flatten() {
            h.face = 0;
        }
        assert!(seam_pairs(&map).len() > 0);
        let only_first = crate::texel::FaceIdMap::from_hits(8, 8, hits).unwrap();
        assert!(matches!(
            compare_seams(&pair, &only_first, FrameVariant::FullJacobian, 1, SeamProbe::default()),
            Err(Error::NoSeams)
        ));
    }
}
