#![allow(dead_code)]

use graphlift::lifting::FLOOR_GUARD;
use graphlift::phantom::{PhantomKind, PhantomSpec};
use graphlift::{Dims, Frame, Method, NeighborhoodKind};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_frame(rng: &mut ChaCha8Rng, nx: usize, ny: usize, bit_depth: u32) -> Frame {
    let m = 1u32 << bit_depth;
    Frame::new(nx, ny, (0..nx * ny).map(|_| (rng.next_u32() % m) as i32).collect()).unwrap()
}

/// A pair whose current frame is the reference shifted by up to 2 px plus mild
/// noise, so the neighbourhoods see realistic structure.
pub fn moving_pair(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> (Frame, Frame) {
    let base = random_frame(rng, nx, ny, 12);
    let sx = (rng.next_u32() % 5) as i64 - 2;
    let sy = (rng.next_u32() % 5) as i64 - 2;
    let mut cur = Vec::with_capacity(nx * ny);
    for y in 0..ny as i64 {
        for x in 0..nx as i64 {
            let rx = (x + sx).clamp(0, nx as i64 - 1) as usize;
            let ry = (y + sy).clamp(0, ny as i64 - 1) as usize;
            let n = (rng.next_u32() % 7) as i32 - 3;
            cur.push((base.get(rx, ry) + n).clamp(0, 4095));
        }
    }
    (base, Frame::new(nx, ny, cur).unwrap())
}

pub fn acceptance_methods() -> Vec<Method> {
    vec![
        Method::Uncompensated,
        Method::Graph(NeighborhoodKind::FourGrid),
        Method::Graph(NeighborhoodKind::EightGrid),
        Method::Graph(NeighborhoodKind::Radius(2)),
        Method::Graph(NeighborhoodKind::Radius(4)),
    ]
}

pub fn all_kinds() -> Vec<NeighborhoodKind> {
    vec![
        NeighborhoodKind::CenterOnly,
        NeighborhoodKind::FourGrid,
        NeighborhoodKind::EightGrid,
        NeighborhoodKind::Radius(2),
        NeighborhoodKind::Radius(4),
    ]
}

/// The deforming-disk-plus-noise volume the trend checks run on.
pub fn pinned_phantom() -> PhantomSpec {
    PhantomSpec::new(PhantomKind::deforming_disk(64, 64, 16.0, 4.0, 10), Dims::new(64, 64, 4, 10)).with_noise(7, 40)
}

/// Membership test written directly from the neighbourhood definitions.
pub fn linked(kind: NeighborhoodKind, dx: i64, dy: i64) -> bool {
    match kind {
        NeighborhoodKind::CenterOnly => dx == 0 && dy == 0,
        NeighborhoodKind::FourGrid => dx.abs() + dy.abs() <= 1,
        NeighborhoodKind::EightGrid => dx.abs().max(dy.abs()) <= 1,
        NeighborhoodKind::Radius(r) => dx.abs().max(dy.abs()) <= r as i64,
    }
}

/// Brute-force neighbours of `(x, y)` in raster order over the whole frame.
fn neighbours(kind: NeighborhoodKind, nx: usize, ny: usize, x: usize, y: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for cy in 0..ny {
        for cx in 0..nx {
            if linked(kind, cx as i64 - x as i64, cy as i64 - y as i64) {
                out.push(cy * nx + cx);
            }
        }
    }
    out
}

/// Normalized weights of one node against its neighbours' values.
fn transition_row(value: i32, others: &[i32], lambda: f64) -> Vec<f64> {
    let logs: Vec<f64> = others.iter().map(|&o| -lambda * (o as i64 - value as i64).abs() as f64).collect();
    let mut m = f64::NEG_INFINITY;
    for &l in &logs {
        m = m.max(l);
    }
    let e: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let mut s = 0.0;
    for v in &e {
        s += v;
    }
    e.iter().map(|v| v / s).collect()
}

fn weighted_floor(p: &[f64], xs: &[i32], scale: f64) -> i32 {
    let mut acc = 0.0;
    for (w, &x) in p.iter().zip(xs) {
        acc += w * x as f64;
    }
    (scale * acc + FLOOR_GUARD).floor() as i32
}

/// Naive per-pixel forward step: returns `(LP, HP)` sample vectors.
pub fn oracle_forward(f_ref: &Frame, f_cur: &Frame, kind: NeighborhoodKind, lambda: f64) -> (Vec<i32>, Vec<i32>) {
    let (nx, ny) = f_ref.dims();
    let mut hp = vec![0; nx * ny];
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            let nb = neighbours(kind, nx, ny, x, y);
            let vals: Vec<i32> = nb.iter().map(|&j| f_ref.samples()[j]).collect();
            let p = transition_row(f_cur.samples()[i], &vals, lambda);
            hp[i] = f_cur.samples()[i] - weighted_floor(&p, &vals, 1.0);
        }
    }
    let mut lp = vec![0; nx * ny];
    for y in 0..ny {
        for x in 0..nx {
            let j = y * nx + x;
            let nb = neighbours(kind, nx, ny, x, y);
            let cur_vals: Vec<i32> = nb.iter().map(|&i| f_cur.samples()[i]).collect();
            let hs: Vec<i32> = nb.iter().map(|&i| hp[i]).collect();
            let p = transition_row(f_ref.samples()[j], &cur_vals, lambda);
            lp[j] = f_ref.samples()[j] + weighted_floor(&p, &hs, 0.5);
        }
    }
    (lp, hp)
}

/// The 16x16 4-grid adjacency of a 4x4 frame as published, rows = current
/// nodes 1..16. Row 11 is printed without column 10 even though row 10 has
/// column 11; see `FOUR_GRID_4X4_ERRATA`.
pub const FOUR_GRID_4X4: [[u8; 16]; 16] = [
    [1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1],
];

/// Entries of `FOUR_GRID_4X4` (1-based row, column) that contradict the
/// 4-grid definition and the symmetry of the printed matrix itself.
pub const FOUR_GRID_4X4_ERRATA: [(usize, usize); 1] = [(11, 10)];
