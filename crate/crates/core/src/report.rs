//! CSV emission for analysis reports.
//!
//! One row per pair, then one `mean` row per method, then one `delta` row
//! per method relative to the first method in the list. Non-finite values
//! print as `inf`, `-inf` or `nan`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::metrics::{AnalysisReport, PairMetrics};

pub const CSV_COLUMNS: [&str; 8] = [
    "axis",
    "method",
    "position",
    "pair_index",
    "psnr_ref_cur",
    "psnr_ref_lp",
    "psnr_cur_lp",
    "hp_mean_energy",
];

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.6}")
    }
}

fn metric_fields(m: &PairMetrics) -> [String; 4] {
    [
        fmt_num(m.psnr_ref_cur),
        fmt_num(m.psnr_ref_lp),
        fmt_num(m.psnr_cur_lp),
        fmt_num(m.hp_mean_energy),
    ]
}

fn delta(a: &PairMetrics, base: &PairMetrics) -> PairMetrics {
    PairMetrics {
        psnr_ref_lp: a.psnr_ref_lp - base.psnr_ref_lp,
        psnr_cur_lp: a.psnr_cur_lp - base.psnr_cur_lp,
        psnr_ref_cur: a.psnr_ref_cur - base.psnr_ref_cur,
        hp_mean_energy: a.hp_mean_energy - base.hp_mean_energy,
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

pub fn write_csv<W: Write>(reports: &[AnalysisReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in reports {
        for p in &r.pairs {
            let [a, b, c, d] = metric_fields(&p.metrics);
            out.write_record([
                r.axis.short_name().to_string(),
                r.method.clone(),
                p.fixed.to_string(),
                p.pair_index.to_string(),
                a,
                b,
                c,
                d,
            ])
            .map_err(csv_err)?;
        }
    }
    for r in reports {
        let [a, b, c, d] = metric_fields(&r.mean);
        out.write_record([r.axis.short_name(), &r.method, "all", "mean", &a, &b, &c, &d])
            .map_err(csv_err)?;
    }
    if let Some((base, rest)) = reports.split_first() {
        for r in rest {
            let [a, b, c, d] = metric_fields(&delta(&r.mean, &base.mean));
            let label = format!("{} - {}", r.method, base.method);
            out.write_record([r.axis.short_name(), &label, "all", "delta", &a, &b, &c, &d])
                .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}
