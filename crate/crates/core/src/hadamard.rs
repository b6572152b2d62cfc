//! Butson-type Hadamard matrices `BH(N, r)` in exponent form.
//!
//! Entry `(i, j)` stands for `exp(2 pi i * exps[i][j] / r)`. The matrix is
//! Butson-Hadamard when its rows are pairwise orthogonal.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::arith::{is_prime, lcm};
use crate::provenance::{sha256_hex, Provenance};

/// Relative tolerance of the floating-point orthogonality check.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HadamardError {
    #[error("cannot parse seed matrix: {0}")]
    ParseError(String),
    #[error("matrix BH({order}, {r}) is not unitary up to scale")]
    UnitarityFailed { order: usize, r: u32 },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Square matrix of root-of-unity exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPhaseMatrix")]
pub struct PhaseMatrix {
    #[serde(rename = "N")]
    order: usize,
    r: u32,
    exps: Vec<Vec<u32>>,
    provenance: Provenance,
}

#[derive(Deserialize)]
struct RawPhaseMatrix {
    #[serde(rename = "N")]
    order: usize,
    r: u32,
    exps: Vec<Vec<u32>>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

impl TryFrom<RawPhaseMatrix> for PhaseMatrix {
    type Error = HadamardError;

    fn try_from(raw: RawPhaseMatrix) -> Result<Self, HadamardError> {
        PhaseMatrix::new(raw.order, raw.r, raw.exps, raw.provenance.unwrap_or_default())
    }
}

impl PhaseMatrix {
    /// Checks that the matrix is `N x N` with exponents in `[0, r)`.
    pub fn new(
        order: usize,
        r: u32,
        exps: Vec<Vec<u32>>,
        provenance: Provenance,
    ) -> Result<Self, HadamardError> {
        if order == 0 || r == 0 {
            return Err(HadamardError::ParseError("order and r must be positive".into()));
        }
        if exps.len() != order || exps.iter().any(|row| row.len() != order) {
            return Err(HadamardError::ParseError(format!("exps is not {order} x {order}")));
        }
        if let Some(v) = exps.iter().flatten().find(|&&v| v >= r) {
            return Err(HadamardError::ParseError(format!("exponent {v} is not below r = {r}")));
        }
        Ok(PhaseMatrix {
            order,
            r,
            exps,
            provenance,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn exps(&self) -> &[Vec<u32>] {
        &self.exps
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.exps[i]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// `BH(N, N)` with `exps[i][j] = i * j mod N`.
pub fn dft_matrix(order: usize) -> PhaseMatrix {
    assert!(order >= 1, "DFT order must be positive");
    let exps = (0..order)
        .map(|i| (0..order).map(|j| (i * j % order) as u32).collect())
        .collect();
    PhaseMatrix {
        order,
        r: order as u32,
        exps,
        provenance: Provenance::new("dft", json!({ "N": order }), vec![]),
    }
}

/// Sylvester `BH(2^m, 2)` with `exps[i][j] = popcount(i & j) mod 2`.
pub fn walsh_hadamard(m: u32) -> PhaseMatrix {
    let order = 1usize << m;
    let exps = (0..order)
        .map(|i| (0..order).map(|j| (i & j).count_ones() % 2).collect())
        .collect();
    PhaseMatrix {
        order,
        r: 2,
        exps,
        provenance: Provenance::new("walsh_hadamard", json!({ "m": m }), vec![]),
    }
}

/// Kronecker product lifted to the common alphabet `lcm(r1, r2)`. Row
/// `(i1, i2)` maps to `i1 * N2 + i2`.
pub fn kronecker(left: &PhaseMatrix, right: &PhaseMatrix) -> PhaseMatrix {
    let r = lcm(left.r as u64, right.r as u64);
    let (s1, s2) = (r / left.r as u64, r / right.r as u64);
    let n2 = right.order;
    let order = left.order * n2;
    let exps = (0..order)
        .map(|i| {
            let (i1, i2) = (i / n2, i % n2);
            (0..order)
                .map(|j| {
                    let (j1, j2) = (j / n2, j % n2);
                    ((s1 * left.exps[i1][j1] as u64 + s2 * right.exps[i2][j2] as u64) % r) as u32
                })
                .collect()
        })
        .collect();
    PhaseMatrix {
        order,
        r: r as u32,
        exps,
        provenance: Provenance::new(
            "kronecker",
            serde_json::Value::Null,
            vec![left.provenance.clone(), right.provenance.clone()],
        ),
    }
}

/// Reads a seed `{N, r, exps}` and accepts it only if it is Butson-Hadamard.
/// The provenance records the SHA-256 of the file contents.
pub fn load_seed(path: &Path) -> Result<PhaseMatrix, HadamardError> {
    let bytes = std::fs::read(path).map_err(|source| HadamardError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_seed(&bytes)
}

/// [`load_seed`] on in-memory bytes.
pub fn parse_seed(bytes: &[u8]) -> Result<PhaseMatrix, HadamardError> {
    let raw: RawPhaseMatrix =
        serde_json::from_slice(bytes).map_err(|e| HadamardError::ParseError(e.to_string()))?;
    let provenance = Provenance::new("seed", json!({ "sha256": sha256_hex(bytes) }), vec![]);
    let matrix = PhaseMatrix::new(raw.order, raw.r, raw.exps, provenance)?;
    if !verify_bh(&matrix) {
        return Err(HadamardError::UnitarityFailed {
            order: matrix.order,
            r: matrix.r,
        });
    }
    Ok(matrix)
}

fn row_pairs(order: usize) -> impl ParallelIterator<Item = (usize, usize)> {
    (0..order)
        .into_par_iter()
        .flat_map_iter(move |i| (i + 1..order).map(move |j| (i, j)))
}

/// Exact check for prime `r`: every row pair's exponent differences must hit
/// each residue of `Z_r` equally often. Returns `None` for composite `r`,
/// where vanishing sums of roots of unity need not be uniform.
pub fn verify_bh_exact(b: &PhaseMatrix) -> Option<bool> {
    let r = b.r as usize;
    if !is_prime(r as u64) {
        return None;
    }
    if b.order == 1 {
        return Some(true);
    }
    if !b.order.is_multiple_of(r) {
        return Some(false);
    }
    let share = b.order / r;
    let ok = row_pairs(b.order).all(|(i, j)| {
        let mut counts = vec![0usize; r];
        for (&x, &y) in b.exps[i].iter().zip(&b.exps[j]) {
            counts[(x as usize + r - y as usize) % r] += 1;
        }
        counts.iter().all(|&c| c == share)
    });
    Some(ok)
}

/// Floating-point check: `|sum_k w^(exps[i][k] - exps[j][k])| <= 1e-9 * N`
/// for every row pair.
pub fn verify_bh_numeric(b: &PhaseMatrix) -> bool {
    let r = b.r as usize;
    let roots: Vec<Complex64> = (0..r)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / r as f64))
        .collect();
    let tol = NUMERIC_TOLERANCE * b.order as f64;
    row_pairs(b.order).all(|(i, j)| {
        let sum: Complex64 = b.exps[i]
            .iter()
            .zip(&b.exps[j])
            .map(|(&x, &y)| roots[(x as usize + r - y as usize) % r])
            .sum();
        sum.norm() <= tol
    })
}

/// Butson-Hadamard predicate: exact for prime `r`, numeric otherwise.
pub fn verify_bh(b: &PhaseMatrix) -> bool {
    verify_bh_exact(b).unwrap_or_else(|| verify_bh_numeric(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(order: usize, r: u32, exps: Vec<Vec<u32>>) -> PhaseMatrix {
        PhaseMatrix::new(order, r, exps, Provenance::external()).unwrap()
    }

    /// A normalized BH(6, 3).
    pub(crate) fn bh6_3() -> PhaseMatrix {
        raw(
            6,
            3,
            vec![
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 1, 1, 2, 2],
                vec![0, 1, 0, 2, 2, 1],
                vec![0, 1, 2, 0, 1, 2],
                vec![0, 2, 2, 1, 0, 1],
                vec![0, 2, 1, 2, 1, 0],
            ],
        )
    }

    #[test]
    fn dft_and_walsh() {
        assert_eq!(dft_matrix(1).exps(), &[vec![0]]);
        assert_eq!(dft_matrix(2).exps(), &[vec![0, 0], vec![0, 1]]);
        assert_eq!(walsh_hadamard(0).exps(), &[vec![0]]);
        assert_eq!(walsh_hadamard(1).exps(), &[vec![0, 0], vec![0, 1]]);
        assert!(verify_bh(&dft_matrix(5)));
        assert!(verify_bh(&dft_matrix(63)));
        assert!(verify_bh(&walsh_hadamard(2)));
        assert!(verify_bh(&walsh_hadamard(3)));
    }

    #[test]
    fn perturbed_dft_fails() {
        let mut exps = dft_matrix(4).exps().to_vec();
        exps[1][2] = (exps[1][2] + 1) % 4;
        assert!(!verify_bh(&raw(4, 4, exps)));
    }

    #[test]
    fn kronecker_lifts_alphabet() {
        let k = kronecker(&dft_matrix(2), &dft_matrix(3));
        assert_eq!((k.order(), k.r()), (6, 6));
        assert!(verify_bh(&k));
        let id = kronecker(&dft_matrix(5), &dft_matrix(1));
        assert_eq!(id.exps(), dft_matrix(5).exps());
        let k = kronecker(&dft_matrix(3), &bh6_3());
        assert_eq!((k.order(), k.r()), (18, 3));
        assert!(verify_bh(&k));
    }

    #[test]
    fn exact_and_numeric_agree_for_prime_r() {
        let mut mats = vec![dft_matrix(2), dft_matrix(3), dft_matrix(7), walsh_hadamard(3), bh6_3()];
        let mut broken = bh6_3().exps().to_vec();
        broken[3][4] = 0;
        mats.push(raw(6, 3, broken));
        mats.push(raw(3, 3, vec![vec![0; 3]; 3]));
        for m in &mats {
            assert_eq!(verify_bh_exact(m), Some(verify_bh_numeric(m)), "{:?}", m.exps());
        }
        assert_eq!(verify_bh_exact(&dft_matrix(4)), None);
    }

    #[test]
    fn seed_ingestion() {
        let json = serde_json::to_vec(&json!({ "N": 6, "r": 3, "exps": bh6_3().exps() })).unwrap();
        let m = parse_seed(&json).unwrap();
        assert_eq!(m.provenance().builder, "seed");
        assert_eq!(m.provenance().params["sha256"], sha256_hex(&json));

        let zeros = serde_json::to_vec(&json!({ "N": 3, "r": 3, "exps": vec![vec![0; 3]; 3] })).unwrap();
        assert!(matches!(parse_seed(&zeros), Err(HadamardError::UnitarityFailed { .. })));

        let out_of_range = br#"{"N": 2, "r": 2, "exps": [[0, 0], [0, 2]]}"#;
        assert!(matches!(parse_seed(out_of_range), Err(HadamardError::ParseError(_))));
        assert!(matches!(parse_seed(b"not json"), Err(HadamardError::ParseError(_))));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seed.json");
        std::fs::write(&path, &json).unwrap();
        assert_eq!(load_seed(&path).unwrap().exps(), bh6_3().exps());
        assert!(matches!(load_seed(&dir.path().join("missing.json")), Err(HadamardError::Io { .. })));
    }
}
