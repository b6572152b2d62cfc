//! DRCS sets assembled from a rectangle and a Butson-type Hadamard matrix.
//!
//! Flock `k` holds `M = N` sequences of length `L`; position `n` of sequence
//! `m` carries exponent `B[a[k][n]][m]`. Sequences stay in exponent form so
//! the construction is exact; floating point only enters in [`crate::ambiguity`].

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hadamard::{verify_bh, PhaseMatrix};
use crate::provenance::Provenance;
use crate::rectangle::{find_c2_violation, Rectangle};

#[derive(Debug, Error)]
pub enum DrcsError {
    #[error("Hadamard order {hadamard} does not match the rectangle alphabet {alphabet}")]
    OrderMismatch { hadamard: usize, alphabet: usize },
    #[error("rectangle is not a generalized quasi-Florentine rectangle: {0}")]
    RectangleClassInsufficient(String),
    #[error("phase matrix is not Butson-Hadamard")]
    NotButsonHadamard,
    #[error("zone ({zx}, {zy}) invalid for sequence length {len}")]
    InvalidZone { zx: usize, zy: usize, len: usize },
    #[error("zone ({zx}, {zy}) is wider than the current zone ({cur_x}, {cur_y})")]
    ZoneTooWide { zx: usize, zy: usize, cur_x: usize, cur_y: usize },
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Delay-Doppler zone `(-zx, zx) x (-zy, zy)`; lattice points satisfy
/// `|tau| <= zx - 1` and `|nu| <= zy - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    pub zx: usize,
    pub zy: usize,
}

impl Zone {
    pub fn new(zx: usize, zy: usize, len: usize) -> Result<Self, DrcsError> {
        if zx == 0 || zy == 0 || zx > len || zy > len {
            return Err(DrcsError::InvalidZone { zx, zy, len });
        }
        Ok(Zone { zx, zy })
    }

    pub fn taus(&self) -> std::ops::RangeInclusive<i64> {
        -(self.zx as i64 - 1)..=self.zx as i64 - 1
    }

    pub fn nus(&self) -> std::ops::RangeInclusive<i64> {
        -(self.zy as i64 - 1)..=self.zy as i64 - 1
    }

    /// Lattice dimensions `(2 zx - 1, 2 zy - 1)`.
    pub fn dims(&self) -> (usize, usize) {
        (2 * self.zx - 1, 2 * self.zy - 1)
    }
}

/// `K` flocks of `M` exponent sequences of length `L` over `Z_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDrcsSet")]
pub struct DrcsSet {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "L")]
    len: usize,
    r: u32,
    flocks: Vec<Vec<Vec<u32>>>,
    zone: Zone,
    provenance: Provenance,
}

#[derive(Deserialize)]
struct RawDrcsSet {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "L")]
    len: usize,
    r: u32,
    flocks: Vec<Vec<Vec<u32>>>,
    zone: Zone,
    #[serde(default)]
    provenance: Option<Provenance>,
}

impl TryFrom<RawDrcsSet> for DrcsSet {
    type Error = DrcsError;

    fn try_from(raw: RawDrcsSet) -> Result<Self, DrcsError> {
        let set = DrcsSet {
            k: raw.k,
            m: raw.m,
            len: raw.len,
            r: raw.r,
            flocks: raw.flocks,
            zone: raw.zone,
            provenance: raw.provenance.unwrap_or_default(),
        };
        set.validate()?;
        Ok(set)
    }
}

impl DrcsSet {
    fn validate(&self) -> Result<(), DrcsError> {
        let bad = |msg: String| Err(DrcsError::InvariantViolated(msg));
        if self.k == 0 || self.m == 0 || self.len == 0 || self.r == 0 {
            return bad("K, M, L and r must be positive".into());
        }
        if self.flocks.len() != self.k {
            return bad(format!("{} flocks, expected K = {}", self.flocks.len(), self.k));
        }
        for (k, flock) in self.flocks.iter().enumerate() {
            if flock.len() != self.m {
                return bad(format!("flock {k} has {} sequences, expected {}", flock.len(), self.m));
            }
            for (m, seq) in flock.iter().enumerate() {
                if seq.len() != self.len {
                    return bad(format!("sequence {m} of flock {k} has length {}", seq.len()));
                }
                if let Some(v) = seq.iter().find(|&&v| v >= self.r) {
                    return bad(format!("exponent {v} in flock {k} is not below r = {}", self.r));
                }
            }
        }
        Zone::new(self.zone.zx, self.zone.zy, self.len)
            .map_err(|e| DrcsError::InvariantViolated(e.to_string()))?;
        Ok(())
    }

    /// Number of flocks `K`.
    pub fn set_size(&self) -> usize {
        self.k
    }

    /// Sequences per flock `M`.
    pub fn flock_size(&self) -> usize {
        self.m
    }

    /// Sequence length `L`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn flocks(&self) -> &[Vec<Vec<u32>>] {
        &self.flocks
    }

    pub fn flock(&self, k: usize) -> &[Vec<u32>] {
        &self.flocks[k]
    }

    pub fn zone(&self) -> Zone {
        self.zone
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Narrows the evaluation zone. Widening is refused.
    pub fn with_zone(mut self, zx: usize, zy: usize) -> Result<Self, DrcsError> {
        let zone = Zone::new(zx, zy, self.len)?;
        if zx > self.zone.zx || zy > self.zone.zy {
            return Err(DrcsError::ZoneTooWide {
                zx,
                zy,
                cur_x: self.zone.zx,
                cur_y: self.zone.zy,
            });
        }
        self.zone = zone;
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("DRCS set serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, DrcsError> {
        serde_json::from_str(s).map_err(|e| {
            // invariant failures surface through serde as custom errors
            let msg = e.to_string();
            if msg.starts_with("invariant violated") {
                DrcsError::InvariantViolated(msg)
            } else {
                DrcsError::SchemaError(msg)
            }
        })
    }
}

/// Assembles the set from a rectangle with linear spacing and a
/// Butson-Hadamard matrix whose order equals the rectangle alphabet. The zone
/// defaults to `(-L, L) x (-L, L)`.
pub fn build_drcs(rect: &Rectangle, bh: &PhaseMatrix) -> Result<DrcsSet, DrcsError> {
    if bh.order() != rect.modulus() {
        return Err(DrcsError::OrderMismatch {
            hadamard: bh.order(),
            alphabet: rect.modulus(),
        });
    }
    match find_c2_violation(rect, false) {
        Ok(None) => {}
        Ok(Some(w)) => {
            return Err(DrcsError::RectangleClassInsufficient(format!(
                "pair ({}, {}) at step {} in rows {} and {}",
                w.first, w.second, w.step, w.rows.0, w.rows.1
            )))
        }
        Err(e) => return Err(DrcsError::RectangleClassInsufficient(e.to_string())),
    }
    if !verify_bh(bh) {
        return Err(DrcsError::NotButsonHadamard);
    }
    let m = bh.order();
    let len = rect.ncols();
    let flocks = rect
        .rows()
        .iter()
        .map(|row| {
            (0..m)
                .map(|seq| row.iter().map(|&sym| bh.exps()[sym][seq]).collect())
                .collect()
        })
        .collect();
    Ok(DrcsSet {
        k: rect.nrows(),
        m,
        len,
        r: bh.r(),
        flocks,
        zone: Zone { zx: len, zy: len },
        provenance: Provenance::new(
            "drcs",
            serde_json::Value::Null,
            vec![rect.provenance().clone(), bh.provenance().clone()],
        ),
    })
}

pub fn export_drcs(set: &DrcsSet, path: &Path) -> Result<(), DrcsError> {
    std::fs::write(path, set.to_json()).map_err(|source| DrcsError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn import_drcs(path: &Path) -> Result<DrcsSet, DrcsError> {
    let text = std::fs::read_to_string(path).map_err(|source| DrcsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    DrcsSet::from_json(&text)
}
