//! Lower bound on the largest AF magnitude of a DRCS set and the optimality
//! factor measured against it.
//!
//! For `K` flocks of `M` sequences of length `N` over a zone with Doppler
//! half-width `Zy`:
//!
//! ```text
//! theta_max >= sqrt(M N (1 - 2 sqrt(M / (3 K Zy))))
//! ```
//!
//! valid when `K > 3M / Zy` and `N sqrt(3M / (K Zy)) <= Zx <= N`. Sets built by
//! [`crate::drcs::build_drcs`] instantiate `M` as the Hadamard order and `N` as
//! the sequence length `L`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ambiguity::ThetaReport;
use crate::drcs::DrcsSet;
use crate::rectangle::{Family, RectangleError};

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("negative radicand 1 - 2 sqrt(M / (3 K Zy)) = {radicand}")]
    NegativeRadicand { radicand: f64 },
    #[error("bound preconditions fail: {0}")]
    Infeasible(String),
    #[error("parameters out of range: {0}")]
    ParamsOutOfRange(String),
}

impl From<RectangleError> for BoundError {
    fn from(e: RectangleError) -> Self {
        BoundError::ParamsOutOfRange(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    /// `K > 3M / Zy`.
    pub k_condition: bool,
    /// `N sqrt(3M / (K Zy)) <= Zx <= N`, when `Zx` was supplied.
    pub zx_condition: Option<bool>,
}

impl LowerBound {
    pub fn feasible(&self) -> bool {
        self.k_condition && self.zx_condition.unwrap_or(true)
    }
}

/// Evaluates the bound. Feasibility is reported through the flags, not
/// enforced.
pub fn lemma1_bound(
    k: usize,
    m: usize,
    seq_len: usize,
    zy: usize,
    zx: Option<usize>,
) -> Result<LowerBound, BoundError> {
    if k == 0 || m == 0 || seq_len == 0 || zy == 0 {
        return Err(BoundError::ParamsOutOfRange("K, M, N and Zy must be positive".into()));
    }
    let (kf, mf, nf, zyf) = (k as f64, m as f64, seq_len as f64, zy as f64);
    let radicand = 1.0 - 2.0 * (mf / (3.0 * kf * zyf)).sqrt();
    if radicand < 0.0 {
        return Err(BoundError::NegativeRadicand { radicand });
    }
    // K > 3M / Zy, in integers
    let k_condition = (k as u128) * (zy as u128) > 3 * m as u128;
    let zx_condition = zx.map(|zx| {
        let lo = nf * (3.0 * mf / (kf * zyf)).sqrt();
        lo <= zx as f64 + 1e-9 && zx <= seq_len
    });
    Ok(LowerBound {
        value: (mf * nf * radicand).sqrt(),
        k_condition,
        zx_condition,
    })
}

/// Achieved `theta_max` against the bound. `M` is the flock size and `N` is
/// the sequence length `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "K")]
    pub set_size: usize,
    #[serde(rename = "M")]
    pub flock_size: usize,
    #[serde(rename = "L")]
    pub seq_len: usize,
    #[serde(rename = "Zx")]
    pub zx: usize,
    #[serde(rename = "Zy")]
    pub zy: usize,
    pub theta_max: f64,
    pub bound: f64,
    pub rho: f64,
    /// `rho` rounded to four decimals.
    pub rho_rounded: f64,
    pub k_condition: bool,
    pub zx_condition: bool,
}

pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

impl BoundReport {
    pub fn table_header() -> String {
        format!(
            "{:>6} {:>7} {:>7} {:>7} {:>7} {:>12} {:>12} {:>8}",
            "K", "M", "L", "Zx", "Zy", "theta_max", "bound", "rho"
        )
    }

    pub fn table_row(&self) -> String {
        format!(
            "{:>6} {:>7} {:>7} {:>7} {:>7} {:>12.6} {:>12.6} {:>8.4}",
            self.set_size, self.flock_size, self.seq_len, self.zx, self.zy, self.theta_max, self.bound, self.rho
        )
    }
}

/// Optimality factor of a set whose `theta_max` has been evaluated.
pub fn optimality_factor(set: &DrcsSet, theta: &ThetaReport) -> Result<BoundReport, BoundError> {
    let zone = theta.zone;
    let lb = lemma1_bound(set.set_size(), set.flock_size(), set.len(), zone.zy, Some(zone.zx))?;
    if !lb.feasible() {
        return Err(BoundError::Infeasible(format!(
            "K > 3M/Zy is {}, Zx window is {} (K = {}, M = {}, L = {}, Zx = {}, Zy = {})",
            lb.k_condition,
            lb.zx_condition.unwrap_or(true),
            set.set_size(),
            set.flock_size(),
            set.len(),
            zone.zx,
            zone.zy
        )));
    }
    let rho = theta.theta_max / lb.value;
    Ok(BoundReport {
        set_size: set.set_size(),
        flock_size: set.flock_size(),
        seq_len: set.len(),
        zx: zone.zx,
        zy: zone.zy,
        theta_max: theta.theta_max,
        bound: lb.value,
        rho,
        rho_rounded: round4(rho),
        k_condition: lb.k_condition,
        zx_condition: lb.zx_condition.unwrap_or(true),
    })
}

/// `(K, N, L)` of a set with `theta_max = N` over the full zone `(-L, L)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrcsParams {
    #[serde(rename = "K")]
    pub set_size: usize,
    #[serde(rename = "N")]
    pub flock_size: usize,
    #[serde(rename = "L")]
    pub seq_len: usize,
}

impl DrcsParams {
    pub fn from_family(family: &Family) -> Result<Self, BoundError> {
        let shape = family.shape()?;
        Ok(DrcsParams {
            set_size: shape.rows,
            flock_size: shape.modulus,
            seq_len: shape.cols,
        })
    }

    /// `K L > 3N`.
    pub fn k_condition(&self) -> bool {
        self.set_size * self.seq_len > 3 * self.flock_size
    }

    /// Optimality factor with `theta_max = N`; `None` when the bound is
    /// undefined.
    pub fn rho(&self) -> Option<f64> {
        lemma1_bound(self.set_size, self.flock_size, self.seq_len, self.seq_len, None)
            .ok()
            .map(|lb| self.flock_size as f64 / lb.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub params: DrcsParams,
    pub k_condition: bool,
    /// `L / N`.
    pub len_ratio: f64,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub rungs: Vec<Rung>,
    /// `K > 3N/L` on every rung.
    pub k_condition_all: bool,
    /// `L/N` nondecreasing and strictly larger at the end.
    pub len_ratio_rising: bool,
    /// `K` nondecreasing and strictly larger at the end, so `1/K` shrinks.
    pub set_size_rising: bool,
    /// `rho` strictly decreasing along the ladder.
    pub rho_decreasing: bool,
    pub asymptotic: bool,
}

fn rising<T: PartialOrd + Copy>(xs: &[T]) -> bool {
    xs.len() >= 2 && xs.windows(2).all(|w| w[0] <= w[1]) && xs[0] < xs[xs.len() - 1]
}

/// Checks the asymptotic-optimality conditions numerically along a ladder of
/// growing parameters.
pub fn asymptotic_check(ladder: &[DrcsParams]) -> Result<AsymptoticReport, BoundError> {
    if ladder.is_empty() {
        return Err(BoundError::ParamsOutOfRange("empty ladder".into()));
    }
    if let Some(p) = ladder.iter().find(|p| p.set_size == 0 || p.flock_size == 0 || p.seq_len == 0) {
        return Err(BoundError::ParamsOutOfRange(format!("zero parameter in {p:?}")));
    }
    if let Some(p) = ladder.iter().find(|p| p.seq_len > p.flock_size) {
        return Err(BoundError::ParamsOutOfRange(format!("L exceeds N in {p:?}")));
    }
    let rungs: Vec<Rung> = ladder
        .iter()
        .map(|&params| Rung {
            params,
            k_condition: params.k_condition(),
            len_ratio: params.seq_len as f64 / params.flock_size as f64,
            rho: params.rho(),
        })
        .collect();
    let k_condition_all = rungs.iter().all(|r| r.k_condition);
    let ratios: Vec<f64> = rungs.iter().map(|r| r.len_ratio).collect();
    let sizes: Vec<usize> = rungs.iter().map(|r| r.params.set_size).collect();
    let rhos: Option<Vec<f64>> = rungs.iter().map(|r| r.rho).collect();
    let rho_decreasing = rhos.is_some_and(|v| v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0]));
    let len_ratio_rising = rising(&ratios);
    let set_size_rising = rising(&sizes);
    Ok(AsymptoticReport {
        asymptotic: k_condition_all && len_ratio_rising && set_size_rising,
        rungs,
        k_condition_all,
        len_ratio_rising,
        set_size_rising,
        rho_decreasing,
    })
}

/// Per-instance conditions for a product family: `K >= 4 + c` with `c` the
/// trim, `K > 3N/L`, and the gap between the two growing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyConditions {
    pub params: DrcsParams,
    pub trim: usize,
    pub k_at_least_four_plus_trim: bool,
    pub k_condition: bool,
    pub twin_gap: u64,
}

pub fn family_conditions(family: &Family) -> Result<FamilyConditions, BoundError> {
    let params = DrcsParams::from_family(family)?;
    let trim = family.trim();
    Ok(FamilyConditions {
        params,
        trim,
        k_at_least_four_plus_trim: params.set_size >= 4 + trim,
        k_condition: params.k_condition(),
        twin_gap: family.twin_gap(),
    })
}

/// Published parameter tables of constructed sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    /// Sets over `Z_3` to `Z_6` through Kronecker-built Hadamard matrices.
    SmallAlphabet,
    /// Multiplicative rectangle families.
    Multiplicative,
    /// Field-by-field rectangle families.
    FieldProduct,
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::SmallAlphabet, TableId::Multiplicative, TableId::FieldProduct];

    pub fn rows(self) -> &'static [TableRow] {
        match self {
            TableId::SmallAlphabet => SMALL_ALPHABET,
            TableId::Multiplicative => MULTIPLICATIVE,
            TableId::FieldProduct => FIELD_PRODUCT,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TableId::SmallAlphabet => "small-alphabet",
            TableId::Multiplicative => "multiplicative",
            TableId::FieldProduct => "field-product",
        }
    }
}

/// One printed row: the set has `K` flocks of `N` sequences of length `L`,
/// zone `(-L, L)^2` and `theta_max = N`. The comparison column evaluates the
/// same bound at `(K_prev1, N, N - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub set_size: usize,
    pub flock_size: usize,
    pub seq_len: usize,
    pub rho: f64,
    pub prev_set_size: usize,
    pub prev_rho: f64,
    /// Hadamard alphabet, when the row names one.
    pub alphabet: Option<u32>,
    pub family: Family,
}

#[allow(clippy::too_many_arguments)]
const fn row(
    set_size: usize,
    flock_size: usize,
    seq_len: usize,
    rho: f64,
    prev_set_size: usize,
    prev_rho: f64,
    alphabet: Option<u32>,
    family: Family,
) -> TableRow {
    TableRow { set_size, flock_size, seq_len, rho, prev_set_size, prev_rho, alphabet, family }
}

const fn c1i(modulus: usize, prime: u32, degree: u32) -> Family {
    Family::C1i { modulus, prime, degree, trim: 1 }
}

const fn c1ii(modulus: usize, prime: u32, degree: u32) -> Family {
    Family::C1ii { modulus, prime, degree, trim: 1 }
}

const fn c2ii(prime: u32, degree: u32, other_prime: u32, other_degree: u32) -> Family {
    Family::C2ii { prime, degree, other_prime, other_degree, trim: 1 }
}

const fn c2iii(prime: u32, degree: u32, other_prime: u32, other_degree: u32) -> Family {
    Family::C2iii { prime, degree, other_prime, other_degree, trim: 1 }
}

// Two rows (N = 144 and N = 1323) print a set size above the row count of
// the listed family; the optimality factor is recomputed from the printed K.
static SMALL_ALPHABET: &[TableRow] = &[
    row(6, 63, 56, 1.5000, 4, 1.5591, Some(3), c1i(7, 3, 2)),
    row(16, 144, 120, 1.3248, 4, 1.5473, Some(3), c2ii(2, 4, 3, 2)),
    row(6, 56, 49, 1.5179, 4, 1.5618, Some(4), c1i(7, 2, 3)),
    row(64, 5184, 5040, 1.0977, 4, 1.5384, Some(4), c2ii(2, 6, 3, 4)),
    row(8, 1000, 868, 1.4320, 4, 1.5395, Some(5), c2ii(2, 3, 5, 3)),
    row(16, 10000, 9360, 1.2340, 4, 1.5383, Some(5), c2ii(2, 4, 5, 4)),
    row(49, 1323, 1248, 1.1300, 6, 1.3762, Some(6), c2ii(3, 3, 7, 2)),
    row(128, 21632, 21336, 1.0630, 4, 1.5382, Some(6), c2ii(2, 7, 13, 2)),
];

static MULTIPLICATIVE: &[TableRow] = &[
    row(6, 63, 56, 1.5000, 4, 1.5591, None, c1i(7, 3, 2)),
    row(9, 99, 88, 1.3788, 4, 1.5514, None, c1i(11, 3, 2)),
    row(12, 208, 195, 1.2754, 4, 1.5444, None, c1i(13, 2, 4)),
    row(16, 304, 285, 1.2328, 4, 1.5425, None, c1i(19, 2, 4)),
    row(22, 759, 736, 1.1726, 4, 1.5399, None, c1ii(23, 2, 5)),
    row(25, 925, 888, 1.1674, 4, 1.5396, None, c1i(37, 5, 2)),
    row(30, 1023, 992, 1.1455, 4, 1.5395, None, c1ii(31, 2, 5)),
    row(46, 2303, 2256, 1.1104, 6, 1.3759, None, c1i(47, 7, 2)),
    row(60, 3965, 3904, 1.0932, 4, 1.5385, None, c1ii(61, 2, 6)),
    row(66, 5494, 5427, 1.0869, 4, 1.5384, None, c1ii(67, 3, 4)),
];

static FIELD_PRODUCT: &[TableRow] = &[
    row(9, 160, 135, 1.4283, 4, 1.5463, None, c2iii(2, 4, 3, 2)),
    row(25, 675, 624, 1.1932, 4, 1.5401, None, c2ii(3, 3, 5, 2)),
    row(25, 832, 775, 1.1880, 4, 1.5397, None, c2iii(2, 5, 5, 2)),
    row(25, 1274, 1200, 1.1803, 4, 1.5392, None, c2iii(7, 2, 5, 2)),
    row(27, 1350, 1274, 1.1722, 4, 1.5391, None, c2iii(3, 3, 7, 2)),
    row(27, 1755, 1664, 1.1690, 4, 1.5389, None, c2iii(3, 3, 2, 6)),
    row(49, 3969, 3840, 1.1144, 4, 1.5385, None, c2ii(7, 2, 3, 4)),
    row(64, 5248, 5103, 1.0976, 4, 1.5384, None, c2iii(2, 6, 3, 4)),
    row(81, 9801, 9600, 1.0831, 4, 1.5383, None, c2ii(3, 4, 11, 2)),
    row(121, 15246, 15000, 1.0662, 4, 1.5383, None, c2iii(11, 2, 5, 3)),
];

impl TableRow {
    pub fn params(&self) -> DrcsParams {
        DrcsParams {
            set_size: self.set_size,
            flock_size: self.flock_size,
            seq_len: self.seq_len,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        let b = lemma1_bound(6, 63, 56, 56, Some(56)).unwrap();
        assert!((b.value - 42.0).abs() < 1e-12);
        assert!(b.feasible());
        let b = lemma1_bound(9, 99, 88, 88, None).unwrap();
        assert!((99.0 / b.value - 1.3788).abs() < 5e-5);
        assert!((b.value - 71.80).abs() < 0.01);
    }

    #[test]
    fn infeasible_flags() {
        // 3M/Zy = 3 * 63 / 63 = 3, so K = 3 sits on the boundary
        let b = lemma1_bound(3, 63, 56, 63, None).unwrap();
        assert!(!b.k_condition);
        assert!(b.value > 0.0);
        assert!(matches!(lemma1_bound(1, 100, 10, 1, None), Err(BoundError::NegativeRadicand { .. })));
        let b = lemma1_bound(6, 63, 56, 56, Some(41)).unwrap();
        assert_eq!(b.zx_condition, Some(false));
        let b = lemma1_bound(6, 63, 56, 56, Some(42)).unwrap();
        assert_eq!(b.zx_condition, Some(true));
    }

    #[test]
    fn monotone_in_k_and_zy() {
        for m in [8usize, 63, 160] {
            for len in [7usize, 56, 135] {
                let mut prev = 0.0;
                for k in 1..60 {
                    if let Ok(b) = lemma1_bound(k, m, len, len, None) {
                        assert!(b.value >= prev);
                        prev = b.value;
                    }
                }
                let mut prev = 0.0;
                for zy in 1..=len {
                    if let Ok(b) = lemma1_bound(6, m, len, zy, None) {
                        assert!(b.value >= prev);
                        prev = b.value;
                    }
                }
            }
        }
    }

    #[test]
    fn family_shapes_match_tables() {
        for table in TableId::ALL {
            for r in table.rows() {
                let p = DrcsParams::from_family(&r.family).unwrap();
                assert_eq!((p.flock_size, p.seq_len), (r.flock_size, r.seq_len), "{r:?}");
                if r.flock_size != 144 && r.flock_size != 1323 {
                    assert_eq!(p.set_size, r.set_size, "{r:?}");
                } else {
                    assert!(p.set_size < r.set_size);
                }
            }
        }
    }

    #[test]
    fn ladders() {
        let ladder: Vec<DrcsParams> = TableId::FieldProduct.rows().iter().map(TableRow::params).collect();
        let report = asymptotic_check(&ladder).unwrap();
        assert!(report.rho_decreasing);
        assert!(report.asymptotic);

        let fixed: Vec<DrcsParams> = [56usize, 120, 500, 2000]
            .iter()
            .map(|&l| DrcsParams { set_size: 6, flock_size: l + 7, seq_len: l })
            .collect();
        let report = asymptotic_check(&fixed).unwrap();
        assert!(report.k_condition_all);
        assert!(!report.set_size_rising);
        assert!(!report.asymptotic);

        // K L = 3N exactly
        let edge = DrcsParams { set_size: 3, flock_size: 10, seq_len: 10 };
        assert!(!edge.k_condition());
        let report = asymptotic_check(&[edge, DrcsParams { set_size: 6, flock_size: 20, seq_len: 19 }]).unwrap();
        assert!(!report.k_condition_all && !report.asymptotic);
        assert!(asymptotic_check(&[]).is_err());
    }

    #[test]
    fn twin_ladder_of_multiplicative_family() {
        // N1 prime, q = N1 +- 2 with c = 1
        let ladder: Vec<DrcsParams> = [(7usize, 3u32, 2u32), (11, 13, 1), (17, 19, 1), (29, 31, 1), (59, 61, 1)]
            .iter()
            .map(|&(modulus, prime, degree)| {
                let f = Family::C1i { modulus, prime, degree, trim: 1 };
                let cond = family_conditions(&f).unwrap();
                assert!(cond.k_at_least_four_plus_trim && cond.k_condition);
                assert!(cond.twin_gap <= 2);
                cond.params
            })
            .collect();
        let report = asymptotic_check(&ladder).unwrap();
        assert!(report.asymptotic && report.rho_decreasing);
    }
}
