//! Inter-frame similarity graphs.
//!
//! Every pixel of the reference frame `f_{2t-1}` is an odd node and every
//! pixel of the current frame `f_{2t}` an even node, so links only run
//! between the two frames. `J` holds the current→reference links (rows are
//! current nodes) and `K` the reference→current links. The weighted links
//! are normalized row by row into the random-walk transition matrices used
//! as the prediction operator `J_P` and the update operator `K_U`.
//!
//! Weighted matrices keep the exponent `-λ|Δ|` of each weight rather than
//! `e^{-λ|Δ|}` itself: at 12 bits the weight underflows to zero once
//! `|Δ| > ~1490`, which would leave whole rows without mass.
//! Normalization subtracts the row maximum before exponentiating, which
//! produces `D^{-1} W` without that underflow.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::volume::Frame;

pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Link pattern from one current-frame pixel into the reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborhoodKind {
    /// Co-located pixel only. Reduces the transform to plain integer Haar.
    CenterOnly,
    /// Co-located pixel plus its 4 von Neumann neighbours.
    FourGrid,
    /// 3x3 Moore neighbourhood, identical to `Radius(1)`.
    EightGrid,
    /// Chebyshev ball `max(|dx|, |dy|) <= r`; `Radius(2)` is the 25-nearest graph.
    Radius(u32),
}

impl NeighborhoodKind {
    pub fn radius(r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("neighbourhood radius must be >= 1".into()));
        }
        Ok(NeighborhoodKind::Radius(r))
    }

    /// Label used in reports.
    pub fn label(&self) -> String {
        match *self {
            NeighborhoodKind::CenterOnly => "center".into(),
            NeighborhoodKind::FourGrid => "4-grid".into(),
            NeighborhoodKind::EightGrid | NeighborhoodKind::Radius(1) => "8-grid".into(),
            NeighborhoodKind::Radius(2) => "25-nearest".into(),
            NeighborhoodKind::Radius(r) => format!("radius-{r}"),
        }
    }

    /// Number of links of an interior node.
    pub fn interior_links(&self) -> usize {
        neighborhood_offsets(*self).len()
    }
}

impl fmt::Display for NeighborhoodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for NeighborhoodKind {
    type Err = Error;

    /// Accepts `center`, `4grid`, `8grid` and `radius:r`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center" => Ok(NeighborhoodKind::CenterOnly),
            "4grid" | "4-grid" => Ok(NeighborhoodKind::FourGrid),
            "8grid" | "8-grid" => Ok(NeighborhoodKind::EightGrid),
            "25-nearest" => Ok(NeighborhoodKind::Radius(2)),
            _ => {
                let r = s
                    .strip_prefix("radius:")
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown neighbourhood {s:?}")))?;
                let r: u32 = r
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad radius in {s:?}")))?;
                NeighborhoodKind::radius(r)
            }
        }
    }
}

/// `(dx, dy)` offsets of a neighbourhood, sorted by `dy` then `dx`.
pub fn neighborhood_offsets(kind: NeighborhoodKind) -> Vec<(i32, i32)> {
    let r = match kind {
        NeighborhoodKind::CenterOnly => return vec![(0, 0)],
        NeighborhoodKind::FourGrid => return vec![(0, -1), (-1, 0), (0, 0), (1, 0), (0, 1)],
        NeighborhoodKind::EightGrid => 1,
        NeighborhoodKind::Radius(r) => r as i32,
    };
    let mut out = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for dy in -r..=r {
        for dx in -r..=r {
            out.push((dx, dy));
        }
    }
    out
}

/// CSR pattern with implicit unit entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinary {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
}

impl SparseBinary {
    /// Validates offsets and strictly ascending, in-range column indices.
    pub fn new(rows: usize, cols: usize, row_offsets: Vec<usize>, col_indices: Vec<u32>) -> Result<Self> {
        if row_offsets.len() != rows + 1 || row_offsets[0] != 0 || *row_offsets.last().unwrap() != col_indices.len() {
            return Err(Error::Format("inconsistent CSR row offsets".into()));
        }
        if cols > u32::MAX as usize {
            return Err(Error::Format("column count exceeds u32".into()));
        }
        for (i, w) in row_offsets.windows(2).enumerate() {
            if w[0] > w[1] {
                return Err(Error::Format(format!("row offsets decrease at row {}", i + 1)));
            }
            let row = &col_indices[w[0]..w[1]];
            if row.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::Format(format!("row {} columns not strictly ascending", i + 1)));
            }
            if row.last().is_some_and(|&c| c as usize >= cols) {
                return Err(Error::Format(format!("row {} has a column past {cols}", i + 1)));
            }
        }
        Ok(SparseBinary {
            rows,
            cols,
            row_offsets,
            col_indices,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    /// 0-based column indices of 0-based row `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&(j as u32)).is_ok()
    }

    /// Transposed pattern together with the permutation `perm` such that
    /// entry `k` of the result is entry `perm[k]` of `self`.
    fn transpose_with_perm(&self) -> (SparseBinary, Vec<usize>) {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_indices {
            counts[c as usize + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let row_offsets = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0u32; self.nnz()];
        let mut perm = vec![0usize; self.nnz()];
        // rows visited in ascending order keep each output row sorted
        for i in 0..self.rows {
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                let c = self.col_indices[k] as usize;
                col_indices[next[c]] = i as u32;
                perm[next[c]] = k;
                next[c] += 1;
            }
        }
        (
            SparseBinary {
                rows: self.cols,
                cols: self.rows,
                row_offsets,
                col_indices,
            },
            perm,
        )
    }

    pub fn transpose(&self) -> SparseBinary {
        self.transpose_with_perm().0
    }

    /// Dense 0/1 rendering, row-major. Meant for small matrices.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.cols]; self.rows];
        for (i, row) in out.iter_mut().enumerate() {
            for &c in self.row(i) {
                row[c as usize] = 1;
            }
        }
        out
    }
}

/// Weighted CSR matrix storing the natural log of each positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseWeighted {
    pattern: SparseBinary,
    log_weights: Vec<f64>,
}

impl SparseWeighted {
    pub fn from_log_weights(pattern: SparseBinary, log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.len() != pattern.nnz() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} entries",
                log_weights.len(),
                pattern.nnz()
            )));
        }
        if let Some(w) = log_weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("log weight {w} is not finite")));
        }
        Ok(SparseWeighted { pattern, log_weights })
    }

    /// Builds from plain weights, which must be positive and finite.
    pub fn from_weights(pattern: SparseBinary, weights: &[f64]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!("weight {w} is not positive")));
        }
        Self::from_log_weights(pattern, weights.iter().map(|w| w.ln()).collect())
    }

    pub fn pattern(&self) -> &SparseBinary {
        &self.pattern
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Weight of stored entry `k`. May underflow to 0 for very dissimilar pixels.
    pub fn weight(&self, k: usize) -> f64 {
        self.log_weights[k].exp()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|l| l.exp()).collect()
    }

    /// Exact transpose; weights move with their entries.
    pub fn transpose(&self) -> SparseWeighted {
        let (pattern, perm) = self.pattern.transpose_with_perm();
        let log_weights = perm.iter().map(|&k| self.log_weights[k]).collect();
        SparseWeighted { pattern, log_weights }
    }
}

/// Row-stochastic CSR matrix (`J_P`, `K_U`).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseStochastic {
    pattern: SparseBinary,
    values: Vec<f64>,
}

impl SparseStochastic {
    /// Wraps decoded values. Structure and finiteness are checked; row sums are
    /// taken as transmitted so the decoder reproduces the encoder's matrix.
    pub fn from_raw(pattern: SparseBinary, values: Vec<f64>) -> Result<Self> {
        if values.len() != pattern.nnz() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} entries",
                values.len(),
                pattern.nnz()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Format(format!("non-finite matrix value {v}")));
        }
        Ok(SparseStochastic { pattern, values })
    }

    pub fn identity(n: usize) -> Self {
        SparseStochastic {
            pattern: SparseBinary {
                rows: n,
                cols: n,
                row_offsets: (0..=n).collect(),
                col_indices: (0..n as u32).collect(),
            },
            values: vec![1.0; n],
        }
    }

    pub fn pattern(&self) -> &SparseBinary {
        &self.pattern
    }

    pub fn rows(&self) -> usize {
        self.pattern.rows
    }

    pub fn cols(&self) -> usize {
        self.pattern.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Columns and values of 0-based row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.pattern.row_offsets[i]..self.pattern.row_offsets[i + 1];
        (&self.pattern.col_indices[r.clone()], &self.values[r])
    }

    /// Sequential ascending-column row sums.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows()).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// Test hook: scales one stored value without renormalizing.
    #[doc(hidden)]
    pub fn perturb(&mut self, k: usize, factor: f64) {
        self.values[k] *= factor;
    }
}

/// Prediction and update operators for one frame pair.
#[derive(Debug, Clone, PartialEq)]
pub struct McPair {
    /// `J_P`: current rows, reference columns.
    pub prediction: SparseStochastic,
    /// `K_U`: reference rows, current columns.
    pub update: SparseStochastic,
}

/// Links every node of an `nx` x `ny` frame to the nodes at `offsets` in the
/// partner frame, dropping links that fall outside it.
fn link_pattern(nx: usize, ny: usize, offsets: &[(i32, i32)]) -> SparseBinary {
    let n = nx * ny;
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(n * offsets.len());
    row_offsets.push(0);
    for y in 0..ny as i64 {
        for x in 0..nx as i64 {
            for &(dx, dy) in offsets {
                let (cx, cy) = (x + dx as i64, y + dy as i64);
                if cx >= 0 && cy >= 0 && (cx as usize) < nx && (cy as usize) < ny {
                    col_indices.push((cy as usize * nx + cx as usize) as u32);
                }
            }
            row_offsets.push(col_indices.len());
        }
    }
    SparseBinary {
        rows: n,
        cols: n,
        row_offsets,
        col_indices,
    }
}

/// `J`: row `i` (current pixel) links column `j` (reference pixel) when
/// their coordinates differ by one of the neighbourhood's offsets.
pub fn build_adjacency(nx: usize, ny: usize, kind: NeighborhoodKind) -> SparseBinary {
    link_pattern(nx, ny, &neighborhood_offsets(kind))
}

/// `K`: row `j` (reference pixel) links column `i` (current pixel), built
/// directly from the negated offsets.
pub fn build_reverse_adjacency(nx: usize, ny: usize, kind: NeighborhoodKind) -> SparseBinary {
    let mut offsets: Vec<(i32, i32)> = neighborhood_offsets(kind).into_iter().map(|(dx, dy)| (-dx, -dy)).collect();
    offsets.sort_by_key(|&(dx, dy)| (dy, dx));
    link_pattern(nx, ny, &offsets)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

fn weight_links(adj: &SparseBinary, row_frame: &Frame, col_frame: &Frame, lambda: f64) -> Result<SparseWeighted> {
    check_lambda(lambda)?;
    row_frame.check_same_dims(col_frame)?;
    if adj.rows != row_frame.len() || adj.cols != col_frame.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} adjacency for {}-pixel frames",
            adj.rows,
            adj.cols,
            row_frame.len()
        )));
    }
    let rs = row_frame.samples();
    let cs = col_frame.samples();
    let mut log_weights = Vec::with_capacity(adj.nnz());
    for (i, &r) in rs.iter().enumerate() {
        let a = r as i64;
        for &j in adj.row(i) {
            let diff = (cs[j as usize] as i64 - a).abs();
            log_weights.push(-lambda * diff as f64);
        }
    }
    Ok(SparseWeighted {
        pattern: adj.clone(),
        log_weights,
    })
}

/// Weights `J` with `w_ij = exp(-λ |f_ref(j) - f_cur(i)|)`.
pub fn weight_adjacency(adj: &SparseBinary, f_ref: &Frame, f_cur: &Frame, lambda: f64) -> Result<SparseWeighted> {
    weight_links(adj, f_cur, f_ref, lambda)
}

/// Weights `K` (reference rows) with the same similarity function.
pub fn weight_reverse_adjacency(adj: &SparseBinary, f_ref: &Frame, f_cur: &Frame, lambda: f64) -> Result<SparseWeighted> {
    weight_links(adj, f_ref, f_cur, lambda)
}

/// Random-walk normalization `P = D^{-1} W`, `d_ii = Σ_j w_ij`.
///
/// Each row is evaluated as `exp(l_k - m) / Σ exp(l - m)` with `m` the row's
/// largest log weight, accumulating in ascending column order.
pub fn to_stochastic(w: &SparseWeighted) -> Result<SparseStochastic> {
    let p = &w.pattern;
    let mut values = Vec::with_capacity(p.nnz());
    for i in 0..p.rows {
        let r = p.row_offsets[i]..p.row_offsets[i + 1];
        if r.is_empty() {
            return Err(Error::EmptyRow { row: i + 1 });
        }
        let logs = &w.log_weights[r];
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let start = values.len();
        let mut degree = 0.0;
        for &l in logs {
            let e = (l - m).exp();
            degree += e;
            values.push(e);
        }
        for v in &mut values[start..] {
            *v /= degree;
        }
    }
    Ok(SparseStochastic {
        pattern: p.clone(),
        values,
    })
}

/// Weighted `J` and `K` for a frame pair, each built from its own pattern.
pub fn build_weighted_pair(
    f_ref: &Frame,
    f_cur: &Frame,
    kind: NeighborhoodKind,
    lambda: f64,
) -> Result<(SparseWeighted, SparseWeighted)> {
    f_ref.check_same_dims(f_cur)?;
    let (nx, ny) = f_ref.dims();
    let wj = weight_adjacency(&build_adjacency(nx, ny, kind), f_ref, f_cur, lambda)?;
    let wk = weight_reverse_adjacency(&build_reverse_adjacency(nx, ny, kind), f_ref, f_cur, lambda)?;
    Ok((wj, wk))
}

/// `J_P = P_J`, `K_U = P_K`.
pub fn build_mc_pair(f_ref: &Frame, f_cur: &Frame, kind: NeighborhoodKind, lambda: f64) -> Result<McPair> {
    let (wj, wk) = build_weighted_pair(f_ref, f_cur, kind, lambda)?;
    Ok(McPair {
        prediction: to_stochastic(&wj)?,
        update: to_stochastic(&wk)?,
    })
}

/// Full `2N x 2N` adjacency over `X = (X_even; X_odd)`, with `J` in the top
/// right block and `K` in the bottom left. The diagonal blocks stay empty.
pub fn block_adjacency(j: &SparseBinary, k: &SparseBinary) -> Result<SparseBinary> {
    let m = j.rows;
    let l = j.cols;
    if k.rows != l || k.cols != m {
        return Err(Error::DimensionMismatch(format!(
            "J is {m}x{l} but K is {}x{}",
            k.rows, k.cols
        )));
    }
    let mut row_offsets = vec![0];
    let mut col_indices = Vec::with_capacity(j.nnz() + k.nnz());
    for i in 0..m {
        col_indices.extend(j.row(i).iter().map(|&c| c + m as u32));
        row_offsets.push(col_indices.len());
    }
    for i in 0..l {
        col_indices.extend_from_slice(k.row(i));
        row_offsets.push(col_indices.len());
    }
    SparseBinary::new(m + l, m + l, row_offsets, col_indices)
}
