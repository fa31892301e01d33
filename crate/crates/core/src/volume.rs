//! 3-D+t sample volumes, 2-D frames, and the GLV1 container.
//!
//! A GLV1 file is a 32-byte little-endian header followed by one 16-bit
//! sample per voxel in x-fastest raster order:
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 4    | magic `GLV1`                           |
//! | 4      | 4    | bit depth (u32)                        |
//! | 8      | 16   | nx, ny, nz, nt (u32 each)              |
//! | 24     | 4    | flags (u32, bit 0 = signed payload)    |
//! | 28     | 4    | reserved, must be zero                 |
//!
//! Unsigned payloads hold `u16` codes; signed payloads (band volumes) hold
//! two's-complement `i16`.
//!
//! Indices that leave the library (pair numbers, slice and time positions,
//! node numbers in messages) are 1-based; storage is 0-based.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const GLV1_MAGIC: [u8; 4] = *b"GLV1";
pub const GLV1_HEADER_LEN: usize = 32;
pub const DEFAULT_BIT_DEPTH: u32 = 12;

const FLAG_SIGNED: u32 = 1;

/// Extents of a volume along x, y, z and t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub nt: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize, nt: usize) -> Self {
        Dims { nx, ny, nz, nt }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn frame_len(&self) -> usize {
        self.nx * self.ny
    }

    fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.nz == 0 || self.nt == 0 {
            return Err(Error::InvalidDims(format!("{self} has a zero extent")));
        }
        for e in [self.nx, self.ny, self.nz, self.nt] {
            if e > u32::MAX as usize {
                return Err(Error::InvalidDims(format!("{self} exceeds u32 extents")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}x{}", self.nx, self.ny, self.nz, self.nt)
    }
}

/// Decomposition direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Pairs `(f_{2t-1}, f_{2t})` along t at a fixed slice.
    Temporal,
    /// Pairs `(f_{2z-1}, f_{2z})` along z at a fixed time step.
    Slice,
}

impl Axis {
    /// Extent of the paired axis.
    pub fn extent(self, dims: &Dims) -> usize {
        match self {
            Axis::Temporal => dims.nt,
            Axis::Slice => dims.nz,
        }
    }

    /// Extent of the remaining (fixed) axis.
    pub fn fixed_extent(self, dims: &Dims) -> usize {
        match self {
            Axis::Temporal => dims.nz,
            Axis::Slice => dims.nt,
        }
    }

    /// Dims with the paired axis halved.
    pub fn halved(self, dims: &Dims) -> Dims {
        let mut d = *dims;
        match self {
            Axis::Temporal => d.nt /= 2,
            Axis::Slice => d.nz /= 2,
        }
        d
    }

    /// Dims with the paired axis doubled.
    pub fn doubled(self, dims: &Dims) -> Dims {
        let mut d = *dims;
        match self {
            Axis::Temporal => d.nt *= 2,
            Axis::Slice => d.nz *= 2,
        }
        d
    }

    /// 1-based (z, t) of the frame at 1-based `along` on this axis and
    /// 1-based `fixed` on the other one.
    pub fn zt(self, along: usize, fixed: usize) -> (usize, usize) {
        match self {
            Axis::Temporal => (fixed, along),
            Axis::Slice => (along, fixed),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Axis::Temporal => "t",
            Axis::Slice => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" | "temporal" => Ok(Axis::Temporal),
            "z" | "slice" | "spatial" => Ok(Axis::Slice),
            _ => Err(Error::InvalidParameter(format!("unknown axis {s:?}"))),
        }
    }
}

/// A 2-D sample plane in raster order (x fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    nx: usize,
    ny: usize,
    samples: Vec<i32>,
}

impl Frame {
    pub fn new(nx: usize, ny: usize, samples: Vec<i32>) -> Result<Self> {
        if samples.len() != nx * ny {
            return Err(Error::DimensionMismatch(format!(
                "{nx}x{ny} frame needs {} samples, got {}",
                nx * ny,
                samples.len()
            )));
        }
        Ok(Frame { nx, ny, samples })
    }

    pub fn filled(nx: usize, ny: usize, value: i32) -> Self {
        Frame {
            nx,
            ny,
            samples: vec![value; nx * ny],
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[i32] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [i32] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<i32> {
        self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> i32 {
        self.samples[y * self.nx + x]
    }

    /// 1-based graph node number of pixel `(x, y)`.
    pub fn node_index(&self, x: usize, y: usize) -> usize {
        y * self.nx + x + 1
    }

    pub(crate) fn check_same_dims(&self, other: &Frame) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "frames are {}x{} and {}x{}",
                self.nx, self.ny, other.nx, other.ny
            )));
        }
        Ok(())
    }
}

/// Header describing a raw sample payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolumeHeader {
    pub dims: Dims,
    pub bit_depth: u32,
    pub signed: bool,
}

impl VolumeHeader {
    pub fn unsigned(dims: Dims, bit_depth: u32) -> Self {
        VolumeHeader {
            dims,
            bit_depth,
            signed: false,
        }
    }

    pub fn payload_len(&self) -> u64 {
        self.dims.len() as u64 * 2
    }

    fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        if !(1..=16).contains(&self.bit_depth) {
            return Err(Error::InvalidParameter(format!(
                "bit depth {} outside 1..=16",
                self.bit_depth
            )));
        }
        Ok(())
    }

    pub fn encode(&self) -> [u8; GLV1_HEADER_LEN] {
        let mut out = [0u8; GLV1_HEADER_LEN];
        out[0..4].copy_from_slice(&GLV1_MAGIC);
        let d = self.dims;
        let fields = [
            self.bit_depth,
            d.nx as u32,
            d.ny as u32,
            d.nz as u32,
            d.nt as u32,
            if self.signed { FLAG_SIGNED } else { 0 },
            0,
        ];
        for (k, v) in fields.iter().enumerate() {
            out[4 + 4 * k..8 + 4 * k].copy_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < GLV1_HEADER_LEN {
            return Err(Error::Truncated(format!(
                "GLV1 header needs {GLV1_HEADER_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != GLV1_MAGIC {
            return Err(Error::BadMagic {
                expected: GLV1_MAGIC,
                found: magic,
            });
        }
        let word = |k: usize| u32::from_le_bytes(bytes[4 + 4 * k..8 + 4 * k].try_into().unwrap());
        let flags = word(5);
        if flags & !FLAG_SIGNED != 0 {
            return Err(Error::Format(format!("unknown GLV1 flags {flags:#x}")));
        }
        if word(6) != 0 {
            return Err(Error::Format("reserved GLV1 word is not zero".into()));
        }
        let header = VolumeHeader {
            bit_depth: word(0),
            dims: Dims::new(
                word(1) as usize,
                word(2) as usize,
                word(3) as usize,
                word(4) as usize,
            ),
            signed: flags & FLAG_SIGNED != 0,
        };
        header.validate()?;
        Ok(header)
    }
}

/// Where `load_volume` finds the sample layout.
#[derive(Debug, Clone, Copy)]
pub enum HeaderSource {
    /// The file starts with a GLV1 header.
    Embedded,
    /// The file is a bare little-endian u16/i16 payload described externally.
    External(VolumeHeader),
}

/// A 4-D array of integer samples indexed (x, y, z, t), x fastest.
///
/// Unsigned volumes hold codes in `0..=2^bit_depth - 1`. Signed volumes hold
/// transform bands; their values only need to fit in `i16`, and `bit_depth`
/// records the depth of the source data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Volume {
    dims: Dims,
    bit_depth: u32,
    signed: bool,
    samples: Vec<i32>,
}

impl Volume {
    /// Builds an unsigned volume, validating every sample against the bit depth.
    pub fn new(dims: Dims, bit_depth: u32, samples: Vec<i32>) -> Result<Self> {
        Self::with_header(VolumeHeader::unsigned(dims, bit_depth), samples)
    }

    /// Builds a signed band volume.
    pub fn new_signed(dims: Dims, bit_depth: u32, samples: Vec<i32>) -> Result<Self> {
        Self::with_header(
            VolumeHeader {
                dims,
                bit_depth,
                signed: true,
            },
            samples,
        )
    }

    pub fn with_header(header: VolumeHeader, samples: Vec<i32>) -> Result<Self> {
        header.validate()?;
        if samples.len() != header.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} volume needs {} samples, got {}",
                header.dims,
                header.dims.len(),
                samples.len()
            )));
        }
        let (lo, hi) = sample_range(&header);
        if let Some((index, &value)) = samples
            .iter()
            .enumerate()
            .find(|(_, &s)| (s as i64) < lo || (s as i64) > hi)
        {
            return Err(Error::SampleOutOfRange {
                index,
                value: value as i64,
                bit_depth: if header.signed { 16 } else { header.bit_depth },
            });
        }
        Ok(Volume {
            dims: header.dims,
            bit_depth: header.bit_depth,
            signed: header.signed,
            samples,
        })
    }

    pub fn zeros(dims: Dims, bit_depth: u32) -> Result<Self> {
        Self::new(dims, bit_depth, vec![0; dims.len()])
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn bit_depth(&self) -> u32 {
        self.bit_depth
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn header(&self) -> VolumeHeader {
        VolumeHeader {
            dims: self.dims,
            bit_depth: self.bit_depth,
            signed: self.signed,
        }
    }

    /// Largest code of the source bit depth, the PSNR peak.
    pub fn max_code(&self) -> i32 {
        (1i32 << self.bit_depth) - 1
    }

    pub fn samples(&self) -> &[i32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<i32> {
        self.samples
    }

    fn offset(&self, x: usize, y: usize, z: usize, t: usize) -> usize {
        let d = &self.dims;
        x + d.nx * (y + d.ny * (z + d.nz * t))
    }

    /// Sample at 0-based `(x, y, z, t)`.
    pub fn get(&self, x: usize, y: usize, z: usize, t: usize) -> i32 {
        self.samples[self.offset(x, y, z, t)]
    }

    /// Copies out the frame at 1-based slice `z` and time step `t`.
    pub fn frame(&self, z: usize, t: usize) -> Result<Frame> {
        self.check_zt(z, t)?;
        let start = self.offset(0, 0, z - 1, t - 1);
        let n = self.dims.frame_len();
        Frame::new(
            self.dims.nx,
            self.dims.ny,
            self.samples[start..start + n].to_vec(),
        )
    }

    /// Overwrites the frame at 1-based `(z, t)`. Samples are not range-checked
    /// here; callers building band volumes check ranges on construction.
    pub(crate) fn put_frame(&mut self, z: usize, t: usize, frame: &Frame) -> Result<()> {
        self.check_zt(z, t)?;
        if frame.dims() != (self.dims.nx, self.dims.ny) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} frame into {} volume",
                frame.nx(),
                frame.ny(),
                self.dims
            )));
        }
        let start = self.offset(0, 0, z - 1, t - 1);
        self.samples[start..start + frame.len()].copy_from_slice(frame.samples());
        Ok(())
    }

    fn check_zt(&self, z: usize, t: usize) -> Result<()> {
        if z == 0 || z > self.dims.nz || t == 0 || t > self.dims.nt {
            return Err(Error::IndexOutOfRange(format!(
                "frame (z={z}, t={t}) outside 1..={} x 1..={}",
                self.dims.nz, self.dims.nt
            )));
        }
        Ok(())
    }

    /// Returns `(f_ref, f_cur)`: the frames at positions `2k-1` and `2k` along
    /// `axis` for 1-based `pair_index = k`, at 1-based position `fixed` on the
    /// other axis.
    pub fn extract_pair(&self, axis: Axis, pair_index: usize, fixed: usize) -> Result<(Frame, Frame)> {
        let extent = axis.extent(&self.dims);
        if pair_index == 0 || 2 * pair_index > extent {
            return Err(Error::IndexOutOfRange(format!(
                "pair {pair_index} needs position {} on axis {axis} of extent {extent}",
                2 * pair_index
            )));
        }
        let fixed_extent = axis.fixed_extent(&self.dims);
        if fixed == 0 || fixed > fixed_extent {
            return Err(Error::IndexOutOfRange(format!(
                "fixed position {fixed} outside 1..={fixed_extent}"
            )));
        }
        let (zr, tr) = axis.zt(2 * pair_index - 1, fixed);
        let (zc, tc) = axis.zt(2 * pair_index, fixed);
        Ok((self.frame(zr, tr)?, self.frame(zc, tc)?))
    }
}

fn sample_range(header: &VolumeHeader) -> (i64, i64) {
    if header.signed {
        (i16::MIN as i64, i16::MAX as i64)
    } else {
        (0, (1i64 << header.bit_depth) - 1)
    }
}

/// Writes a GLV1 stream.
pub fn write_volume<W: Write>(v: &Volume, mut w: W) -> Result<()> {
    w.write_all(&v.header().encode())?;
    write_payload(v, &mut w)?;
    w.flush()?;
    Ok(())
}

fn write_payload<W: Write>(v: &Volume, w: &mut W) -> Result<()> {
    let mut buf = Vec::with_capacity(v.samples.len() * 2);
    if v.signed {
        for &s in &v.samples {
            buf.extend_from_slice(&(s as i16).to_le_bytes());
        }
    } else {
        for &s in &v.samples {
            buf.extend_from_slice(&(s as u16).to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a GLV1 stream, consuming it to the end.
pub fn read_volume<R: Read>(mut r: R) -> Result<Volume> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode_volume(&bytes, HeaderSource::Embedded)
}

/// Decodes a whole file's bytes.
pub fn decode_volume(bytes: &[u8], source: HeaderSource) -> Result<Volume> {
    let (header, payload) = match source {
        HeaderSource::Embedded => (VolumeHeader::decode(bytes)?, &bytes[GLV1_HEADER_LEN..]),
        HeaderSource::External(h) => {
            h.validate()?;
            (h, bytes)
        }
    };
    let expected = header.payload_len();
    if payload.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            expected,
            found: payload.len() as u64,
        });
    }
    let samples: Vec<i32> = if header.signed {
        payload
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as i32)
            .collect()
    } else {
        payload
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as i32)
            .collect()
    };
    Volume::with_header(header, samples)
}

pub fn load_volume(path: impl AsRef<Path>, source: HeaderSource) -> Result<Volume> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_volume(&bytes, source)
}

/// Writes `v` as GLV1. The file appears only once fully written.
pub fn save_volume(v: &Volume, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), |w| write_volume(v, w))
}

/// Writes through a temporary file in the target directory and renames it
/// into place on success.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<&mut File>) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(dims: Dims, bit_depth: u32) -> Volume {
        let m = 1i32 << bit_depth;
        let samples = (0..dims.len() as i32).map(|i| (i * 37) % m).collect();
        Volume::new(dims, bit_depth, samples).unwrap()
    }

    #[test]
    fn raw_zero_payload_with_external_header() {
        let header = VolumeHeader::unsigned(Dims::new(4, 4, 1, 2), 12);
        let v = decode_volume(&[0u8; 64], HeaderSource::External(header)).unwrap();
        assert_eq!(v.samples().len(), 32);
        assert!(v.samples().iter().all(|&s| s == 0));
    }

    #[test]
    fn raw_payload_size_mismatch() {
        let header = VolumeHeader::unsigned(Dims::new(2, 2, 1, 1), 12);
        let err = decode_volume(&[0u8; 10], HeaderSource::External(header)).unwrap_err();
        assert!(matches!(err, Error::SizeMismatch { expected: 8, found: 10 }));
    }

    #[test]
    fn sample_above_bit_depth_is_rejected() {
        let header = VolumeHeader::unsigned(Dims::new(1, 1, 1, 1), 12);
        let err = decode_volume(&4096u16.to_le_bytes(), HeaderSource::External(header)).unwrap_err();
        assert!(matches!(err, Error::SampleOutOfRange { value: 4096, .. }));
    }

    #[test]
    fn max_code_survives_round_trip() {
        let v = Volume::new(Dims::new(1, 1, 1, 1), 12, vec![4095]).unwrap();
        let mut buf = Vec::new();
        write_volume(&v, &mut buf).unwrap();
        assert_eq!(read_volume(buf.as_slice()).unwrap(), v);
    }

    #[test]
    fn zero_extent_rejected() {
        assert!(matches!(
            Volume::new(Dims::new(4, 0, 1, 1), 12, vec![]),
            Err(Error::InvalidDims(_))
        ));
    }

    #[test]
    fn header_layout() {
        let h = VolumeHeader::unsigned(Dims::new(2, 3, 4, 5), 12).encode();
        assert_eq!(&h[0..4], b"GLV1");
        assert_eq!(u32::from_le_bytes(h[4..8].try_into().unwrap()), 12);
        assert_eq!(u32::from_le_bytes(h[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(h[20..24].try_into().unwrap()), 5);
        assert_eq!(&h[24..32], &[0u8; 8]);
    }

    #[test]
    fn truncated_stream_is_rejected() {
        let v = ramp(Dims::new(3, 3, 2, 2), 12);
        let mut buf = Vec::new();
        write_volume(&v, &mut buf).unwrap();
        buf.pop();
        assert!(matches!(read_volume(buf.as_slice()), Err(Error::SizeMismatch { .. })));
        assert!(matches!(read_volume(&buf[..10]), Err(Error::Truncated(_))));
    }

    #[test]
    fn signed_payload_round_trip() {
        let v = Volume::new_signed(Dims::new(2, 1, 1, 2), 12, vec![-4095, 4095, -1, 6000]).unwrap();
        let mut buf = Vec::new();
        write_volume(&v, &mut buf).unwrap();
        assert_eq!(read_volume(buf.as_slice()).unwrap(), v);
    }

    #[test]
    fn temporal_pair_one_is_t1_t2() {
        let v = ramp(Dims::new(4, 4, 3, 10), 12);
        let (r, c) = v.extract_pair(Axis::Temporal, 1, 2).unwrap();
        assert_eq!(r, v.frame(2, 1).unwrap());
        assert_eq!(c, v.frame(2, 2).unwrap());
        assert_eq!(r.get(1, 2), v.get(1, 2, 1, 0));
    }

    #[test]
    fn slice_pair_one_is_z1_z2() {
        let v = ramp(Dims::new(4, 4, 4, 3), 12);
        let (r, c) = v.extract_pair(Axis::Slice, 1, 3).unwrap();
        assert_eq!(r, v.frame(1, 3).unwrap());
        assert_eq!(c, v.frame(2, 3).unwrap());
    }

    #[test]
    fn pair_index_past_extent() {
        let v = ramp(Dims::new(2, 2, 1, 10), 12);
        assert!(v.extract_pair(Axis::Temporal, 5, 1).is_ok());
        assert!(matches!(
            v.extract_pair(Axis::Temporal, 6, 1),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(v.extract_pair(Axis::Temporal, 0, 1).is_err());
    }

    #[test]
    fn extracted_frames_do_not_alias() {
        let v = ramp(Dims::new(4, 4, 1, 2), 12);
        let before = v.clone();
        let (mut r, c) = v.extract_pair(Axis::Temporal, 1, 1).unwrap();
        let c_before = c.clone();
        r.samples_mut().iter_mut().for_each(|s| *s = -7);
        assert_eq!(c, c_before);
        assert_eq!(v, before);
    }

    #[test]
    fn node_numbering_matches_raster_order() {
        let f = Frame::filled(4, 4, 0);
        assert_eq!(f.node_index(1, 1), 6);
        assert_eq!(f.node_index(0, 0), 1);
        assert_eq!(f.node_index(3, 3), 16);
    }

    #[test]
    fn save_and_load_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.glv");
        let v = ramp(Dims::new(8, 8, 3, 4), 12);
        save_volume(&v, &path).unwrap();
        assert_eq!(load_volume(&path, HeaderSource::Embedded).unwrap(), v);
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 32 + 8 * 8 * 3 * 4 * 2);
    }

    proptest! {
        #[test]
        fn glv1_round_trip(
            nx in 1usize..6, ny in 1usize..6, nz in 1usize..4, nt in 1usize..4,
            bit_depth in 1u32..=16, seed in any::<u64>(),
        ) {
            let dims = Dims::new(nx, ny, nz, nt);
            let m = 1u64 << bit_depth;
            let mut state = seed;
            let samples = (0..dims.len()).map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) % m) as i32
            }).collect();
            let v = Volume::new(dims, bit_depth, samples).unwrap();
            let mut buf = Vec::new();
            write_volume(&v, &mut buf).unwrap();
            prop_assert_eq!(read_volume(buf.as_slice()).unwrap(), v);
        }
    }
}
