//! Lowpass quality and highpass energy.

use crate::error::{Error, Result};
use crate::lifting::DecomposedVolume;
use crate::volume::{Axis, Frame, Volume};

/// Mean squared difference in double precision.
pub fn mse(a: &Frame, b: &Frame) -> Result<f64> {
    a.check_same_dims(b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = (x as i64 - y as i64) as f64;
            d * d
        })
        .sum();
    Ok(sum / a.len() as f64)
}

/// `10 log10(peak² / MSE)` in dB; `+inf` for identical frames.
pub fn psnr(a: &Frame, b: &Frame, peak: u32) -> Result<f64> {
    if peak == 0 {
        return Err(Error::InvalidParameter("PSNR peak must be positive".into()));
    }
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let p = peak as f64;
    Ok(10.0 * (p * p / mse).log10())
}

/// `(1/N) Σ hp(i)²`.
pub fn mean_energy(hp: &Frame) -> f64 {
    if hp.is_empty() {
        return 0.0;
    }
    let sum: f64 = hp.samples().iter().map(|&h| (h as f64) * (h as f64)).sum();
    sum / hp.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    /// PSNR(f_ref, LP)
    pub psnr_ref_lp: f64,
    /// PSNR(f_cur, LP)
    pub psnr_cur_lp: f64,
    /// PSNR(f_ref, f_cur), similarity of the source frames
    pub psnr_ref_cur: f64,
    pub hp_mean_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    /// 1-based position on the axis not being paired.
    pub fixed: usize,
    pub pair_index: usize,
    pub metrics: PairMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub axis: Axis,
    pub method: String,
    /// Ordered by fixed position, then pair index.
    pub pairs: Vec<PairRecord>,
    /// Unweighted means over all pairs.
    pub mean: PairMetrics,
}

/// Evaluates every pair of `d` against the source volume `v`, using
/// `2^bit_depth - 1` as the PSNR peak.
pub fn analyze_decomposition(v: &Volume, d: &DecomposedVolume) -> Result<AnalysisReport> {
    if d.source_dims() != v.dims() || d.lp_band.dims() != d.hp_band.dims() {
        return Err(Error::DimensionMismatch(format!(
            "bands of a {} volume analysed against a {} volume",
            d.source_dims(),
            v.dims()
        )));
    }
    if d.lp_band.bit_depth() != v.bit_depth() {
        return Err(Error::DimensionMismatch(format!(
            "bands from {}-bit data analysed against {}-bit data",
            d.lp_band.bit_depth(),
            v.bit_depth()
        )));
    }
    let peak = v.max_code() as u32;
    let mut pairs = Vec::with_capacity(d.fixed_count() * d.pair_count());
    for p in 1..=d.fixed_count() {
        for k in 1..=d.pair_count() {
            let (f_ref, f_cur) = v.extract_pair(d.axis, k, p)?;
            let (lp, hp) = d.bands(k, p)?;
            pairs.push(PairRecord {
                fixed: p,
                pair_index: k,
                metrics: PairMetrics {
                    psnr_ref_lp: psnr(&f_ref, &lp, peak)?,
                    psnr_cur_lp: psnr(&f_cur, &lp, peak)?,
                    psnr_ref_cur: psnr(&f_ref, &f_cur, peak)?,
                    hp_mean_energy: mean_energy(&hp),
                },
            });
        }
    }
    let mean = mean_metrics(&pairs);
    Ok(AnalysisReport {
        axis: d.axis,
        method: d.label.clone(),
        pairs,
        mean,
    })
}

fn mean_metrics(pairs: &[PairRecord]) -> PairMetrics {
    let n = pairs.len() as f64;
    let avg = |f: fn(&PairMetrics) -> f64| pairs.iter().map(|p| f(&p.metrics)).sum::<f64>() / n;
    PairMetrics {
        psnr_ref_lp: avg(|m| m.psnr_ref_lp),
        psnr_cur_lp: avg(|m| m.psnr_cur_lp),
        psnr_ref_cur: avg(|m| m.psnr_ref_cur),
        hp_mean_energy: avg(|m| m.hp_mean_energy),
    }
}
