//! Slow reference implementations, written straight from the definitions.
//!
//! Nothing here shares code with the fast paths: no root tables, no FFT, no
//! hashing. Tests compare the two, and the CLI `--paranoid` flag reruns
//! evaluations through these.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::ambiguity::{AfError, AfWitness};
use crate::bounds::{lemma1_bound, TableRow};
use crate::drcs::DrcsSet;
use crate::field::{FieldElem, GaloisField};
use crate::rectangle::Rectangle;

fn unit(exp: u32, r: u32) -> Complex64 {
    Complex64::from_polar(1.0, TAU * exp as f64 / r as f64)
}

/// Cross-AF term by term: `sum a(t) conj(b(t + tau)) exp(2 pi i nu t / L)`.
pub fn naive_af(a: &[u32], b: &[u32], r: u32, tau: i64, nu: i64) -> Result<Complex64, AfError> {
    if a.len() != b.len() {
        return Err(AfError::LengthMismatch(a.len(), b.len()));
    }
    if r == 0 {
        return Err(AfError::ZeroAlphabet);
    }
    let len = a.len() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for t in 0..len {
        let s = t + tau;
        if s < 0 || s >= len {
            continue;
        }
        let doppler = Complex64::from_polar(1.0, TAU * (nu * t) as f64 / len as f64);
        sum += unit(a[t as usize], r) * unit(b[s as usize], r).conj() * doppler;
    }
    Ok(sum)
}

/// Aperiodic cross-correlation `sum a(t) conj(b(t + tau))`.
pub fn aperiodic_correlation(a: &[u32], b: &[u32], r: u32, tau: i64) -> Result<Complex64, AfError> {
    if a.len() != b.len() {
        return Err(AfError::LengthMismatch(a.len(), b.len()));
    }
    if r == 0 {
        return Err(AfError::ZeroAlphabet);
    }
    let len = a.len() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for t in 0..len {
        let s = t + tau;
        if (0..len).contains(&s) {
            sum += unit(a[t as usize], r) * unit(b[s as usize], r).conj();
        }
    }
    Ok(sum)
}

/// Flock AF as the sum of [`naive_af`] over the sequences.
pub fn naive_flock_af(c1: &[Vec<u32>], c2: &[Vec<u32>], r: u32, tau: i64, nu: i64) -> Result<Complex64, AfError> {
    if c1.len() != c2.len() {
        return Err(AfError::ShapeMismatch(format!("{} vs {} sequences", c1.len(), c2.len())));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (a, b) in c1.iter().zip(c2) {
        sum += naive_af(a, b, r, tau, nu)?;
    }
    Ok(sum)
}

/// Largest auto (off-origin) and cross magnitudes over the set's zone, one
/// cell at a time.
pub fn naive_theta_max(set: &DrcsSet) -> (Option<AfWitness>, Option<AfWitness>) {
    let zone = set.zone();
    let k = set.set_size();
    let mut auto: Option<AfWitness> = None;
    let mut cross: Option<AfWitness> = None;
    for i in 0..k {
        for j in 0..k {
            for tau in zone.taus() {
                for nu in zone.nus() {
                    if i == j && tau == 0 && nu == 0 {
                        continue;
                    }
                    let v = naive_flock_af(set.flock(i), set.flock(j), set.r(), tau, nu).expect("same shape");
                    let w = AfWitness { flocks: (i, j), tau, nu, magnitude: v.norm() };
                    let slot = if i == j { &mut auto } else { &mut cross };
                    if slot.is_none_or(|cur| w.magnitude > cur.magnitude) {
                        *slot = Some(w);
                    }
                }
            }
        }
    }
    (auto, cross)
}

/// Every row uses each symbol at most once.
pub fn definition_literal_c1(rect: &Rectangle) -> bool {
    rect.rows().iter().all(|row| {
        (0..row.len()).all(|i| (i + 1..row.len()).all(|j| row[i] != row[j]))
    })
}

/// For every ordered pair `(a, b)` of distinct symbols and every step `m`,
/// at most one row has `b` exactly `m` positions right of `a` (cyclically if
/// `circular`).
pub fn definition_literal_c2(rect: &Rectangle, circular: bool) -> bool {
    let n = rect.ncols();
    for a in 0..rect.modulus() {
        for b in 0..rect.modulus() {
            if a == b {
                continue;
            }
            for m in 1..n {
                let mut rows_with_pair = 0;
                for row in rect.rows() {
                    let hit = (0..n).any(|j| {
                        let k = j + m;
                        let k = if circular { k % n } else { k };
                        k < n && row[j] == a && row[k] == b
                    });
                    if hit {
                        rows_with_pair += 1;
                    }
                }
                if rows_with_pair > 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Field multiplication through discrete-log tables built from the powers
/// of the primitive element.
pub struct LogTables {
    /// Indexed by the base-p code of an element.
    log: Vec<Option<u64>>,
    antilog: Vec<u64>,
}

impl LogTables {
    pub fn new(gf: &GaloisField) -> Self {
        let q = gf.order();
        let mut log = vec![None; q as usize];
        let mut antilog = Vec::with_capacity(q as usize - 1);
        for (i, e) in gf.powers_of_alpha().iter().enumerate() {
            let code = gf.psi(e);
            log[code as usize] = Some(i as u64);
            antilog.push(code);
        }
        LogTables { log, antilog }
    }

    /// Product of two elements given by their base-p codes.
    pub fn mul_codes(&self, x: u64, y: u64) -> u64 {
        match (self.log[x as usize], self.log[y as usize]) {
            (Some(i), Some(j)) => self.antilog[((i + j) % self.antilog.len() as u64) as usize],
            _ => 0,
        }
    }

    pub fn mul(&self, gf: &GaloisField, x: &FieldElem, y: &FieldElem) -> FieldElem {
        gf.from_psi(self.mul_codes(gf.psi(x), gf.psi(y)))
    }
}

/// A printed table row recomputed from its parameter columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowCheck {
    pub bound: f64,
    pub rho: f64,
    pub prev_bound: f64,
    pub prev_rho: f64,
    pub rho_matches: bool,
    pub prev_rho_matches: bool,
}

pub const TABLE_TOLERANCE: f64 = 5e-5;

/// `theta_max = N` over `(-L, L)^2`; the comparison column uses
/// `(K_prev1, N, N - 1)` with zone `(-(N-1), N-1)^2`.
pub fn recompute_table_row(row: &TableRow) -> RowCheck {
    let n = row.flock_size;
    let theta = n as f64;
    let bound = lemma1_bound(row.set_size, n, row.seq_len, row.seq_len, None)
        .map_or(f64::NAN, |b| b.value);
    let prev_bound = lemma1_bound(row.prev_set_size, n, n - 1, n - 1, None).map_or(f64::NAN, |b| b.value);
    let rho = theta / bound;
    let prev_rho = theta / prev_bound;
    RowCheck {
        bound,
        rho,
        prev_bound,
        prev_rho,
        rho_matches: (rho - row.rho).abs() <= TABLE_TOLERANCE,
        prev_rho_matches: (prev_rho - row.prev_rho).abs() <= TABLE_TOLERANCE,
    }
}
