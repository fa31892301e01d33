//! Compensated integer Haar lifting on frame pairs and volumes.
//!
//! Forward step, with `X_ref = f_{2t-1}` and `X_cur = f_{2t}`:
//!
//! ```text
//! H = X_cur - ⌊J_P · X_ref⌋
//! L = X_ref + ⌊½ · (K_U · H)⌋
//! ```
//!
//! The inverse subtracts the same floored terms in reverse order. Both
//! directions go through [`floor_matvec`], so the reconstruction is bit-exact
//! whenever the decoder sees the encoder's `J_P` and `K_U`.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{build_mc_pair, McPair, NeighborhoodKind, SparseStochastic};
use crate::volume::{Axis, Dims, Frame, Volume};

pub mod side_info;

pub use side_info::{decode_side_info, encode_side_info, load_side_info, save_side_info};

/// Largest source bit depth whose bands fit the signed 16-bit band payload.
pub const MAX_BAND_SOURCE_BITS: u32 = 14;

/// Compensation used for a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Plain integer Haar, no side information.
    Uncompensated,
    /// Graph-based compensation with the given neighbourhood.
    Graph(NeighborhoodKind),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Uncompensated => "none".into(),
            Method::Graph(k) => k.label(),
        }
    }

    pub fn is_compensated(&self) -> bool {
        matches!(self, Method::Graph(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// `none`, or any neighbourhood accepted by [`NeighborhoodKind`].
    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(Method::Uncompensated);
        }
        s.parse().map(Method::Graph)
    }
}

/// Lowpass and highpass frames of one pair plus the operators that made them.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPair {
    pub lp: Frame,
    pub hp: Frame,
    pub method: Method,
    pub side: Option<McPair>,
}

/// Slack added before flooring. Row sums of a stochastic matrix are 1 only to
/// within a few ulps, so a weighted mean of equal integers `c` can land just
/// below `c`; without the slack it would floor to `c - 1`.
pub const FLOOR_GUARD: f64 = 1e-7;

/// `out_i = ⌊scale · Σ_k m_ik x_k + FLOOR_GUARD⌋`, summing each row
/// sequentially in ascending column order in double precision.
pub fn floor_matvec(m: &SparseStochastic, x: &[i32], scale: f64) -> Vec<i32> {
    debug_assert_eq!(m.cols(), x.len());
    (0..m.rows())
        .map(|i| {
            let (cols, vals) = m.row(i);
            let mut acc = 0.0f64;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c as usize] as f64;
            }
            (scale * acc + FLOOR_GUARD).floor() as i32
        })
        .collect()
}

fn check_operators(side: &McPair, n: usize) -> Result<()> {
    for (name, m) in [("prediction", &side.prediction), ("update", &side.update)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::SideInfoMismatch(format!(
                "{name} matrix is {}x{}, frames have {n} pixels",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

fn lift_forward(f_ref: &Frame, f_cur: &Frame, side: &McPair) -> Result<(Frame, Frame)> {
    let (nx, ny) = f_ref.dims();
    let predicted = floor_matvec(&side.prediction, f_ref.samples(), 1.0);
    let hp: Vec<i32> = f_cur.samples().iter().zip(&predicted).map(|(c, p)| c - p).collect();
    let updated = floor_matvec(&side.update, &hp, 0.5);
    let lp: Vec<i32> = f_ref.samples().iter().zip(&updated).map(|(r, u)| r + u).collect();
    Ok((Frame::new(nx, ny, lp)?, Frame::new(nx, ny, hp)?))
}

/// Compensated forward step. `J_P` and `K_U` are built from the pair itself and
/// returned as side information.
pub fn forward_pair(f_ref: &Frame, f_cur: &Frame, kind: NeighborhoodKind, lambda: f64) -> Result<BandPair> {
    f_ref.check_same_dims(f_cur)?;
    let side = build_mc_pair(f_ref, f_cur, kind, lambda)?;
    let (lp, hp) = lift_forward(f_ref, f_cur, &side)?;
    Ok(BandPair {
        lp,
        hp,
        method: Method::Graph(kind),
        side: Some(side),
    })
}

/// `HP = f_cur - f_ref`, `LP = f_ref + ⌊HP / 2⌋`.
pub fn forward_uncompensated(f_ref: &Frame, f_cur: &Frame) -> Result<BandPair> {
    f_ref.check_same_dims(f_cur)?;
    let (nx, ny) = f_ref.dims();
    let hp: Vec<i32> = f_cur.samples().iter().zip(f_ref.samples()).map(|(c, r)| c - r).collect();
    let lp: Vec<i32> = f_ref.samples().iter().zip(&hp).map(|(r, h)| r + h.div_euclid(2)).collect();
    Ok(BandPair {
        lp: Frame::new(nx, ny, lp)?,
        hp: Frame::new(nx, ny, hp)?,
        method: Method::Uncompensated,
        side: None,
    })
}

/// Forward step for either method.
pub fn forward(f_ref: &Frame, f_cur: &Frame, method: Method, lambda: f64) -> Result<BandPair> {
    match method {
        Method::Uncompensated => forward_uncompensated(f_ref, f_cur),
        Method::Graph(kind) => forward_pair(f_ref, f_cur, kind, lambda),
    }
}

/// Inverse step, returning `(f_ref, f_cur)`.
pub fn inverse_pair(bands: &BandPair) -> Result<(Frame, Frame)> {
    bands.lp.check_same_dims(&bands.hp)?;
    let (nx, ny) = bands.lp.dims();
    match (&bands.method, &bands.side) {
        (Method::Graph(_), None) => Err(Error::MissingSideInfo),
        (Method::Uncompensated, Some(_)) => Err(Error::SideInfoMismatch(
            "uncompensated bands carry side information".into(),
        )),
        (Method::Uncompensated, None) => {
            let r: Vec<i32> = bands
                .lp
                .samples()
                .iter()
                .zip(bands.hp.samples())
                .map(|(l, h)| l - h.div_euclid(2))
                .collect();
            let c: Vec<i32> = r.iter().zip(bands.hp.samples()).map(|(r, h)| r + h).collect();
            Ok((Frame::new(nx, ny, r)?, Frame::new(nx, ny, c)?))
        }
        (Method::Graph(_), Some(side)) => {
            check_operators(side, bands.lp.len())?;
            let updated = floor_matvec(&side.update, bands.hp.samples(), 0.5);
            let r: Vec<i32> = bands.lp.samples().iter().zip(&updated).map(|(l, u)| l - u).collect();
            let predicted = floor_matvec(&side.prediction, &r, 1.0);
            let c: Vec<i32> = bands.hp.samples().iter().zip(&predicted).map(|(h, p)| h + p).collect();
            Ok((Frame::new(nx, ny, r)?, Frame::new(nx, ny, c)?))
        }
    }
}

/// One decomposition step along an axis.
///
/// Band frame `(k, p)` holds pair `k` at fixed position `p`, both 1-based.
/// Side information, when present, is ordered by fixed position, then pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedVolume {
    pub axis: Axis,
    /// Report label of the method that produced the bands.
    pub label: String,
    pub lp_band: Volume,
    pub hp_band: Volume,
    pub side_info: Option<Vec<McPair>>,
}

impl DecomposedVolume {
    /// Dims of the volume the bands were computed from.
    pub fn source_dims(&self) -> Dims {
        self.axis.doubled(&self.lp_band.dims())
    }

    pub fn pair_count(&self) -> usize {
        self.axis.extent(&self.lp_band.dims())
    }

    pub fn fixed_count(&self) -> usize {
        self.axis.fixed_extent(&self.lp_band.dims())
    }

    /// Band frames `(LP, HP)` of 1-based pair `k` at fixed position `p`.
    pub fn bands(&self, pair_index: usize, fixed: usize) -> Result<(Frame, Frame)> {
        let (z, t) = self.axis.zt(pair_index, fixed);
        Ok((self.lp_band.frame(z, t)?, self.hp_band.frame(z, t)?))
    }

    fn side_slot(&self, pair_index: usize, fixed: usize) -> usize {
        (fixed - 1) * self.pair_count() + (pair_index - 1)
    }
}

/// Wall time of one pair's forward step.
#[derive(Debug, Clone, Copy)]
pub struct PairTiming {
    pub fixed: usize,
    pub pair_index: usize,
    pub elapsed: Duration,
}

fn pair_jobs(axis: Axis, dims: &Dims) -> Vec<(usize, usize)> {
    let pairs = axis.extent(dims) / 2;
    (1..=axis.fixed_extent(dims))
        .flat_map(|p| (1..=pairs).map(move |k| (p, k)))
        .collect()
}

pub fn decompose_volume(v: &Volume, axis: Axis, method: Method, lambda: f64) -> Result<DecomposedVolume> {
    decompose_volume_timed(v, axis, method, lambda).map(|(d, _)| d)
}

/// Like [`decompose_volume`], also reporting per-pair timings. Pairs run in
/// parallel; the result does not depend on the thread count.
pub fn decompose_volume_timed(
    v: &Volume,
    axis: Axis,
    method: Method,
    lambda: f64,
) -> Result<(DecomposedVolume, Vec<PairTiming>)> {
    if v.is_signed() {
        return Err(Error::InvalidParameter("cannot decompose a signed band volume".into()));
    }
    if v.bit_depth() > MAX_BAND_SOURCE_BITS {
        return Err(Error::InvalidParameter(format!(
            "bands of {}-bit data do not fit 16-bit storage (max {MAX_BAND_SOURCE_BITS} bits)",
            v.bit_depth()
        )));
    }
    let dims = v.dims();
    let extent = axis.extent(&dims);
    if !extent.is_multiple_of(2) {
        return Err(Error::OddExtent { extent });
    }

    let jobs = pair_jobs(axis, &dims);
    let results: Vec<(BandPair, Duration)> = jobs
        .par_iter()
        .map(|&(p, k)| {
            let start = Instant::now();
            let (f_ref, f_cur) = v.extract_pair(axis, k, p)?;
            let bands = forward(&f_ref, &f_cur, method, lambda)?;
            Ok((bands, start.elapsed()))
        })
        .collect::<Result<_>>()?;

    let band_dims = axis.halved(&dims);
    let mut lp_band = Volume::new_signed(band_dims, v.bit_depth(), vec![0; band_dims.len()])?;
    let mut hp_band = Volume::new_signed(band_dims, v.bit_depth(), vec![0; band_dims.len()])?;
    let mut side_info = method.is_compensated().then(|| Vec::with_capacity(jobs.len()));
    let mut timings = Vec::with_capacity(jobs.len());
    for (&(p, k), (bands, elapsed)) in jobs.iter().zip(results) {
        let (z, t) = axis.zt(k, p);
        lp_band.put_frame(z, t, &bands.lp)?;
        hp_band.put_frame(z, t, &bands.hp)?;
        if let (Some(all), Some(side)) = (side_info.as_mut(), bands.side) {
            all.push(side);
        }
        timings.push(PairTiming {
            fixed: p,
            pair_index: k,
            elapsed,
        });
    }
    // re-validate the i16 range now that the bands are filled in
    let lp_band = Volume::new_signed(band_dims, v.bit_depth(), lp_band.into_samples())?;
    let hp_band = Volume::new_signed(band_dims, v.bit_depth(), hp_band.into_samples())?;

    Ok((
        DecomposedVolume {
            axis,
            label: method.label(),
            lp_band,
            hp_band,
            side_info,
        },
        timings,
    ))
}

/// Inverts [`decompose_volume`] bit-exactly.
pub fn reconstruct_volume(d: &DecomposedVolume) -> Result<Volume> {
    let band_dims = d.lp_band.dims();
    if d.hp_band.dims() != band_dims {
        return Err(Error::DimensionMismatch(format!(
            "LP band is {band_dims}, HP band is {}",
            d.hp_band.dims()
        )));
    }
    if d.lp_band.bit_depth() != d.hp_band.bit_depth() {
        return Err(Error::DimensionMismatch("LP and HP bands disagree on bit depth".into()));
    }
    let jobs = pair_jobs(d.axis, &d.source_dims());
    if let Some(side) = &d.side_info {
        if side.len() != jobs.len() {
            return Err(Error::SideInfoMismatch(format!(
                "{} matrix pairs for {} band pairs",
                side.len(),
                jobs.len()
            )));
        }
    }

    let frames: Vec<(Frame, Frame)> = jobs
        .par_iter()
        .map(|&(p, k)| {
            let (lp, hp) = d.bands(k, p)?;
            let bands = match &d.side_info {
                None => BandPair {
                    lp,
                    hp,
                    method: Method::Uncompensated,
                    side: None,
                },
                Some(all) => BandPair {
                    lp,
                    hp,
                    // the neighbourhood is not needed to invert
                    method: Method::Graph(NeighborhoodKind::CenterOnly),
                    side: Some(all[d.side_slot(k, p)].clone()),
                },
            };
            inverse_pair(&bands)
        })
        .collect::<Result<_>>()?;

    let dims = d.source_dims();
    let mut out = Volume::new_signed(dims, d.lp_band.bit_depth(), vec![0; dims.len()])?;
    for (&(p, k), (f_ref, f_cur)) in jobs.iter().zip(&frames) {
        let (zr, tr) = d.axis.zt(2 * k - 1, p);
        let (zc, tc) = d.axis.zt(2 * k, p);
        out.put_frame(zr, tr, f_ref)?;
        out.put_frame(zc, tc, f_cur)?;
    }
    Volume::new(dims, d.lp_band.bit_depth(), out.into_samples())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::Dims;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn random_frame(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> Frame {
        Frame::new(nx, ny, (0..nx * ny).map(|_| (rng.next_u32() % 4096) as i32).collect()).unwrap()
    }

    fn single(v: i32) -> Frame {
        Frame::new(1, 1, vec![v]).unwrap()
    }

    #[test]
    fn haar_single_pixel() {
        let b = forward_uncompensated(&single(3), &single(8)).unwrap();
        assert_eq!((b.hp.samples()[0], b.lp.samples()[0]), (5, 5));
        let b = forward_uncompensated(&single(8), &single(3)).unwrap();
        assert_eq!((b.hp.samples()[0], b.lp.samples()[0]), (-5, 5));
        assert_eq!(inverse_pair(&b).unwrap(), (single(8), single(3)));
    }

    #[test]
    fn constant_pair_has_zero_highpass() {
        let f = Frame::filled(6, 5, 2047);
        for kind in [NeighborhoodKind::FourGrid, NeighborhoodKind::Radius(2)] {
            let b = forward_pair(&f, &f, kind, 0.5).unwrap();
            assert!(b.hp.samples().iter().all(|&h| h == 0));
            assert_eq!(b.lp, f);
        }
    }

    #[test]
    fn center_only_matches_haar() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_frame(&mut rng, 7, 5);
            let b = random_frame(&mut rng, 7, 5);
            let g = forward_pair(&a, &b, NeighborhoodKind::CenterOnly, 0.5).unwrap();
            let h = forward_uncompensated(&a, &b).unwrap();
            assert_eq!((g.lp, g.hp), (h.lp, h.hp));
        }
    }

    #[test]
    fn identical_frames_invert() {
        let f = Frame::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        let b = BandPair {
            lp: f.clone(),
            hp: Frame::filled(2, 2, 0),
            method: Method::Uncompensated,
            side: None,
        };
        assert_eq!(inverse_pair(&b).unwrap(), (f.clone(), f));
    }

    #[test]
    fn round_trip_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in [NeighborhoodKind::FourGrid, NeighborhoodKind::EightGrid, NeighborhoodKind::Radius(3)] {
            for _ in 0..10 {
                let a = random_frame(&mut rng, 16, 16);
                let b = random_frame(&mut rng, 16, 16);
                let bands = forward_pair(&a, &b, kind, 0.5).unwrap();
                assert_eq!(inverse_pair(&bands).unwrap(), (a, b));
            }
        }
    }

    #[test]
    fn missing_side_info() {
        let f = Frame::filled(2, 2, 1);
        let mut b = forward_pair(&f, &f, NeighborhoodKind::FourGrid, 0.5).unwrap();
        b.side = None;
        assert!(matches!(inverse_pair(&b), Err(Error::MissingSideInfo)));
    }

    #[test]
    fn tampered_side_info_changes_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_frame(&mut rng, 8, 8);
        let b = random_frame(&mut rng, 8, 8);
        let mut bands = forward_pair(&a, &b, NeighborhoodKind::FourGrid, 0.02).unwrap();
        let side = bands.side.as_mut().unwrap();
        // halve the dominant entry of an interior row
        let start = side.prediction.pattern().row_offsets()[27];
        let (_, vals) = side.prediction.row(27);
        let top = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        side.prediction.perturb(start + top, 0.5);
        let (r, c) = inverse_pair(&bands).unwrap();
        assert_eq!(r, a);
        assert_ne!(c, b);
    }

    #[test]
    fn forward_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_frame(&mut rng, 12, 9);
        let b = random_frame(&mut rng, 12, 9);
        let x = forward_pair(&a, &b, NeighborhoodKind::Radius(2), 0.5).unwrap();
        let y = forward_pair(&a, &b, NeighborhoodKind::Radius(2), 0.5).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn dims_mismatch() {
        let a = Frame::filled(2, 2, 0);
        let b = Frame::filled(2, 3, 0);
        assert!(forward_pair(&a, &b, NeighborhoodKind::FourGrid, 0.5).is_err());
        assert!(forward_uncompensated(&a, &b).is_err());
    }

    #[test]
    fn floor_rounds_toward_negative_infinity() {
        let m = SparseStochastic::identity(3);
        assert_eq!(floor_matvec(&m, &[-5, -1, 5], 0.5), vec![-3, -1, 2]);
    }

    #[test]
    fn odd_extent_rejected() {
        let v = Volume::zeros(Dims::new(2, 2, 3, 3), 12).unwrap();
        assert!(matches!(
            decompose_volume(&v, Axis::Temporal, Method::Uncompensated, 0.5),
            Err(Error::OddExtent { extent: 3 })
        ));
    }

    #[test]
    fn temporal_band_extents() {
        let v = Volume::zeros(Dims::new(4, 4, 3, 10), 12).unwrap();
        let d = decompose_volume(&v, Axis::Temporal, Method::Graph(NeighborhoodKind::FourGrid), 0.5).unwrap();
        assert_eq!(d.lp_band.dims(), Dims::new(4, 4, 3, 5));
        assert_eq!(d.hp_band.dims(), Dims::new(4, 4, 3, 5));
        assert_eq!(d.side_info.as_ref().unwrap().len(), 15);
    }

    #[test]
    fn minimal_slice_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dims = Dims::new(5, 4, 2, 3);
        let v = Volume::new(dims, 12, (0..dims.len()).map(|_| (rng.next_u32() % 4096) as i32).collect()).unwrap();
        let d = decompose_volume(&v, Axis::Slice, Method::Graph(NeighborhoodKind::EightGrid), 0.5).unwrap();
        assert_eq!(d.pair_count(), 1);
        assert_eq!(d.lp_band.dims().nz, 1);
        assert_eq!(reconstruct_volume(&d).unwrap(), v);
    }

    #[test]
    fn band_frames_match_pairwise_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dims = Dims::new(6, 5, 3, 4);
        let v = Volume::new(dims, 12, (0..dims.len()).map(|_| (rng.next_u32() % 4096) as i32).collect()).unwrap();
        let method = Method::Graph(NeighborhoodKind::FourGrid);
        let d = decompose_volume(&v, Axis::Temporal, method, 0.5).unwrap();
        let (r, c) = v.extract_pair(Axis::Temporal, 2, 3).unwrap();
        let b = forward(&r, &c, method, 0.5).unwrap();
        assert_eq!(d.bands(2, 3).unwrap(), (b.lp, b.hp));
        assert_eq!(d.side_info.as_ref().unwrap()[d.side_slot(2, 3)], b.side.unwrap());
    }

    #[test]
    fn side_count_mismatch() {
        let v = Volume::zeros(Dims::new(2, 2, 1, 4), 12).unwrap();
        let mut d = decompose_volume(&v, Axis::Temporal, Method::Graph(NeighborhoodKind::FourGrid), 0.5).unwrap();
        d.side_info.as_mut().unwrap().pop();
        assert!(matches!(reconstruct_volume(&d), Err(Error::SideInfoMismatch(_))));
    }

    #[test]
    fn method_parsing() {
        assert_eq!("none".parse::<Method>().unwrap(), Method::Uncompensated);
        assert_eq!("radius:2".parse::<Method>().unwrap().label(), "25-nearest");
        assert!("bogus".parse::<Method>().is_err());
    }
}
