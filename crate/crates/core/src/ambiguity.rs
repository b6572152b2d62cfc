//! Aperiodic ambiguity functions of exponent sequences.
//!
//! For sequences `a`, `b` of length `L` over `Z_r` the cross-AF is
//! `sum_t w_r^(a(t) - b(t + tau)) w_L^(nu t)` over all `t` with both indices
//! in range, where `w_k = exp(2 pi i / k)`. Flock AFs sum the per-sequence AFs.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::lcm;
use crate::drcs::{DrcsSet, Zone};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AfError {
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("flock shapes differ: {0}")]
    ShapeMismatch(String),
    #[error("alphabet size must be positive")]
    ZeroAlphabet,
    #[error("zone ({zx}, {zy}) invalid for sequence length {len}")]
    InvalidZone { zx: usize, zy: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AfMethod {
    Naive,
    Fft,
}

impl AfMethod {
    pub fn default_for(len: usize) -> Self {
        if len <= 128 {
            AfMethod::Naive
        } else {
            AfMethod::Fft
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AfKind {
    Auto,
    Cross,
}

/// Table of `exp(2 pi i k / size)`.
struct RootTable {
    size: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    fn new(size: u64) -> Self {
        let roots = (0..size)
            .map(|k| {
                let (s, c) = (std::f64::consts::TAU * k as f64 / size as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        RootTable { size, roots }
    }

    #[inline]
    fn at(&self, k: u64) -> Complex64 {
        self.roots[(k % self.size) as usize]
    }
}

/// Pairwise summation, error growth `O(log n)`.
pub(crate) fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 16 {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Range of `t` for which both `t` and `t + tau` index a length-`len` sequence.
fn overlap(len: usize, tau: i64) -> std::ops::Range<usize> {
    let len_i = len as i64;
    if tau.abs() >= len_i {
        return 0..0;
    }
    let lo = (-tau).max(0) as usize;
    let hi = (len_i - tau.max(0)) as usize;
    lo..hi
}

/// Evaluation context for fixed `(r, L)`: exponent `e` over `Z_r` maps to
/// table index `e * (W / r)` and `nu t` maps to `nu t * (W / L)` with
/// `W = lcm(r, L)`.
struct Ctx {
    r: u64,
    len: usize,
    table: RootTable,
    step_r: u64,
    step_len: u64,
}

impl Ctx {
    fn new(r: u32, len: usize) -> Self {
        let r = r as u64;
        let w = lcm(r, len.max(1) as u64);
        Ctx {
            r,
            len,
            table: RootTable::new(w),
            step_r: w / r,
            step_len: w / len.max(1) as u64,
        }
    }

    #[inline]
    fn doppler(&self, nu: i64) -> u64 {
        nu.rem_euclid(self.len as i64) as u64
    }

    #[inline]
    fn diff(&self, x: u32, y: u32) -> u64 {
        (x as u64 + self.r - y as u64 % self.r) % self.r
    }

    fn pair_terms(&self, a: &[u32], b: &[u32], tau: i64, nu: i64, out: &mut Vec<Complex64>) {
        let dop = self.doppler(nu);
        for t in overlap(self.len, tau) {
            let s = (t as i64 + tau) as usize;
            let k = self.diff(a[t], b[s]) * self.step_r + (dop * t as u64 % self.len as u64) * self.step_len;
            out.push(self.table.at(k));
        }
    }
}

fn check_pair(a: &[u32], b: &[u32], r: u32) -> Result<(), AfError> {
    if a.len() != b.len() {
        return Err(AfError::LengthMismatch(a.len(), b.len()));
    }
    if r == 0 {
        return Err(AfError::ZeroAlphabet);
    }
    Ok(())
}

fn check_flocks(c1: &[Vec<u32>], c2: &[Vec<u32>], r: u32) -> Result<usize, AfError> {
    if r == 0 {
        return Err(AfError::ZeroAlphabet);
    }
    if c1.len() != c2.len() {
        return Err(AfError::ShapeMismatch(format!("{} vs {} sequences", c1.len(), c2.len())));
    }
    let len = c1.first().map_or(0, Vec::len);
    if let Some(bad) = c1.iter().chain(c2).find(|s| s.len() != len) {
        return Err(AfError::ShapeMismatch(format!("sequence of length {} among length {len}", bad.len())));
    }
    Ok(len)
}

/// Cross-AF of two exponent sequences over `Z_r` at `(tau, nu)`.
pub fn af_pair(a: &[u32], b: &[u32], r: u32, tau: i64, nu: i64) -> Result<Complex64, AfError> {
    check_pair(a, b, r)?;
    let ctx = Ctx::new(r, a.len());
    let mut terms = Vec::with_capacity(a.len());
    ctx.pair_terms(a, b, tau, nu, &mut terms);
    Ok(pairwise_sum(&terms))
}

/// Flock AF: sum of the per-sequence cross-AFs.
pub fn af_flock(c1: &[Vec<u32>], c2: &[Vec<u32>], r: u32, tau: i64, nu: i64) -> Result<Complex64, AfError> {
    let len = check_flocks(c1, c2, r)?;
    let ctx = Ctx::new(r, len);
    let mut terms = Vec::with_capacity(c1.len() * len);
    for (a, b) in c1.iter().zip(c2) {
        ctx.pair_terms(a, b, tau, nu, &mut terms);
    }
    Ok(pairwise_sum(&terms))
}

/// Flock AF over the zone lattice, indexed `[tau][nu]` from the most negative
/// corner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfGrid {
    pub zone: Zone,
    pub len: usize,
    pub kind: AfKind,
    pub pair: Option<(usize, usize)>,
    pub method: AfMethod,
    values: Vec<Complex64>,
}

impl AfGrid {
    pub fn dims(&self) -> (usize, usize) {
        self.zone.dims()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, tau: i64, nu: i64) -> Option<Complex64> {
        let (zx, zy) = (self.zone.zx as i64, self.zone.zy as i64);
        if tau.abs() >= zx || nu.abs() >= zy {
            return None;
        }
        let ny = self.dims().1;
        Some(self.values[(tau + zx - 1) as usize * ny + (nu + zy - 1) as usize])
    }

    /// Iterates `(tau, nu, value)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let ny = self.dims().1;
        let (zx, zy) = (self.zone.zx as i64, self.zone.zy as i64);
        self.values.iter().enumerate().map(move |(i, &v)| {
            ((i / ny) as i64 - (zx - 1), (i % ny) as i64 - (zy - 1), v)
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,nu,re,im,abs\n");
        for (tau, nu, v) in self.cells() {
            let _ = writeln!(out, "{tau},{nu},{:.12e},{:.12e},{:.12e}", v.re, v.im, v.norm());
        }
        out
    }

    /// Magnitudes, one line per `tau`, columns ordered by `nu`.
    pub fn magnitude_csv(&self) -> String {
        let ny = self.dims().1;
        let mut out = String::new();
        for row in self.values.chunks(ny) {
            let line: Vec<String> = row.iter().map(|v| format!("{:.12e}", v.norm())).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Binary 16-bit PGM of the magnitudes, scaled to the grid maximum. Rows
    /// are `tau`, columns `nu`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (nx, ny) = self.dims();
        let peak = self.max_abs();
        let mut out = format!("P5\n{ny} {nx}\n65535\n").into_bytes();
        for v in &self.values {
            let level = if peak > 0.0 {
                (v.norm() / peak * 65535.0).round().clamp(0.0, 65535.0) as u16
            } else {
                0
            };
            out.extend_from_slice(&level.to_be_bytes());
        }
        out
    }
}

fn grid_naive(c1: &[Vec<u32>], c2: &[Vec<u32>], ctx: &Ctx, zone: Zone) -> Vec<Complex64> {
    let (nx, ny) = zone.dims();
    let mut values = vec![Complex64::default(); nx * ny];
    values
        .par_chunks_mut(ny)
        .enumerate()
        .for_each_init(Vec::new, |terms, (ti, row)| {
            let tau = ti as i64 - (zone.zx as i64 - 1);
            for (ni, cell) in row.iter_mut().enumerate() {
                let nu = ni as i64 - (zone.zy as i64 - 1);
                terms.clear();
                for (a, b) in c1.iter().zip(c2) {
                    ctx.pair_terms(a, b, tau, nu, terms);
                }
                *cell = pairwise_sum(terms);
            }
        });
    values
}

fn grid_fft(c1: &[Vec<u32>], c2: &[Vec<u32>], ctx: &Ctx, zone: Zone) -> Vec<Complex64> {
    let len = ctx.len;
    let (nx, ny) = zone.dims();
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(len);
    let mut values = vec![Complex64::default(); nx * ny];
    values
        .par_chunks_mut(ny)
        .enumerate()
        .for_each_init(
            || (vec![Complex64::default(); len], Vec::with_capacity(c1.len())),
            |(lag, terms), (ti, row)| {
                let tau = ti as i64 - (zone.zx as i64 - 1);
                lag.iter_mut().for_each(|v| *v = Complex64::default());
                for t in overlap(len, tau) {
                    let s = (t as i64 + tau) as usize;
                    terms.clear();
                    for (a, b) in c1.iter().zip(c2) {
                        terms.push(ctx.table.at(ctx.diff(a[t], b[s]) * ctx.step_r));
                    }
                    lag[t] = pairwise_sum(terms);
                }
                // inverse transform: bin k holds sum_t lag[t] exp(2 pi i k t / L)
                fft.process(lag);
                for (ni, cell) in row.iter_mut().enumerate() {
                    let nu = ni as i64 - (zone.zy as i64 - 1);
                    *cell = lag[ctx.doppler(nu) as usize];
                }
            },
        );
    values
}

/// Flock AF on every lattice point of `zone`.
pub fn af_grid(
    c1: &[Vec<u32>],
    c2: &[Vec<u32>],
    r: u32,
    zone: Zone,
    method: AfMethod,
) -> Result<AfGrid, AfError> {
    let len = check_flocks(c1, c2, r)?;
    if zone.zx == 0 || zone.zy == 0 || zone.zx > len || zone.zy > len {
        return Err(AfError::InvalidZone { zx: zone.zx, zy: zone.zy, len });
    }
    let ctx = Ctx::new(r, len);
    let values = match method {
        AfMethod::Naive => grid_naive(c1, c2, &ctx, zone),
        AfMethod::Fft => grid_fft(c1, c2, &ctx, zone),
    };
    Ok(AfGrid {
        zone,
        len,
        kind: if c1 == c2 { AfKind::Auto } else { AfKind::Cross },
        pair: None,
        method,
        values,
    })
}

/// Grid for flocks `k1`, `k2` of a set over the set's zone.
pub fn pair_grid(set: &DrcsSet, k1: usize, k2: usize, method: AfMethod) -> Result<AfGrid, AfError> {
    if k1 >= set.set_size() || k2 >= set.set_size() {
        return Err(AfError::ShapeMismatch(format!(
            "flock index out of range for {} flocks",
            set.set_size()
        )));
    }
    let mut grid = af_grid(set.flock(k1), set.flock(k2), set.r(), set.zone(), method)?;
    grid.kind = if k1 == k2 { AfKind::Auto } else { AfKind::Cross };
    grid.pair = Some((k1, k2));
    Ok(grid)
}

/// Location and size of an extreme AF magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfWitness {
    pub flocks: (usize, usize),
    pub tau: i64,
    pub nu: i64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    /// Largest auto-AF magnitude off the origin; `None` when the zone has no
    /// such point.
    pub theta_a: Option<f64>,
    /// Largest cross-AF magnitude; `None` for a single flock.
    pub theta_c: Option<f64>,
    pub theta_max: f64,
    pub auto_witness: Option<AfWitness>,
    pub cross_witness: Option<AfWitness>,
    pub zone: Zone,
    pub method: AfMethod,
}

fn better(candidate: AfWitness, current: Option<AfWitness>) -> bool {
    match current {
        None => true,
        Some(cur) => {
            candidate.magnitude > cur.magnitude
                || (candidate.magnitude == cur.magnitude
                    && (candidate.flocks, candidate.tau, candidate.nu) < (cur.flocks, cur.tau, cur.nu))
        }
    }
}

fn grid_peak(grid: &AfGrid, flocks: (usize, usize), skip_origin: bool) -> Option<AfWitness> {
    let mut best = None;
    for (tau, nu, v) in grid.cells() {
        if skip_origin && tau == 0 && nu == 0 {
            continue;
        }
        let w = AfWitness { flocks, tau, nu, magnitude: v.norm() };
        if better(w, best) {
            best = Some(w);
        }
    }
    best
}

/// Exhaustive `theta_max` over all ordered flock pairs and zone points, using
/// the default method for the sequence length.
pub fn theta_max(set: &DrcsSet) -> ThetaReport {
    theta_max_with(set, AfMethod::default_for(set.len()))
}

pub fn theta_max_with(set: &DrcsSet, method: AfMethod) -> ThetaReport {
    let k = set.set_size();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let peaks: Vec<(bool, Option<AfWitness>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let grid = pair_grid(set, i, j, method).expect("set invariants hold");
            (i == j, grid_peak(&grid, (i, j), i == j))
        })
        .collect();
    let mut auto_witness = None;
    let mut cross_witness = None;
    for (is_auto, peak) in peaks {
        let Some(w) = peak else { continue };
        let slot = if is_auto { &mut auto_witness } else { &mut cross_witness };
        if better(w, *slot) {
            *slot = Some(w);
        }
    }
    let theta_a = auto_witness.map(|w| w.magnitude);
    let theta_c = cross_witness.map(|w| w.magnitude);
    ThetaReport {
        theta_a,
        theta_c,
        theta_max: theta_a.unwrap_or(0.0).max(theta_c.unwrap_or(0.0)),
        auto_witness,
        cross_witness,
        zone: set.zone(),
        method,
    }
}
