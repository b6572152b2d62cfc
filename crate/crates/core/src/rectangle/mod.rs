//! Generalized (circular) quasi-Florentine rectangles.
//!
//! A rectangle is a `rows x n` matrix over `Z_N`. It is *row distinct* (C1)
//! when every row holds `n` distinct symbols, and has *linear spacing* (C2)
//! when, for every ordered pair of distinct symbols `(a, b)` and every step
//! `1 <= m < n`, at most one row places `b` exactly `m` positions to the right
//! of `a`. With *circular spacing* positions are counted modulo `n`.

mod construct;
mod family;
mod search;

pub use construct::{
    build_circular_florentine, build_circular_quasi_florentine, build_quasi_florentine_plus_one,
    coincidence_count, product_construct, truncate_columns, Side,
};
pub use family::{Family, RectShape};
pub use search::{search_max_rows, SearchCertificate, SearchLimits, SEARCH_MODULUS_CAP};

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldError;
use crate::provenance::Provenance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RectangleError {
    #[error("invalid rectangle: {0}")]
    Invalid(String),
    #[error("row {row} repeats symbol {symbol}")]
    C1Violated { row: usize, symbol: usize },
    #[error("cannot remove {removed} of {ncols} columns")]
    TooManyColumnsRemoved { removed: usize, ncols: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("rows {0} and {1} must differ")]
    SameRow(usize, usize),
    #[error("shift {tau} out of range for {ncols} columns")]
    ShiftOutOfRange { tau: usize, ncols: usize },
    #[error("parameters out of range: {0}")]
    ParamsOutOfRange(String),
    #[error("search limited to modulus <= {cap}, got {modulus}")]
    CapExceeded { modulus: usize, cap: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Integer matrix over `Z_N` with equal-length rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRectangle")]
pub struct Rectangle {
    #[serde(rename = "N")]
    modulus: usize,
    n: usize,
    rows: Vec<Vec<usize>>,
    provenance: Provenance,
}

#[derive(Deserialize)]
struct RawRectangle {
    #[serde(rename = "N")]
    modulus: usize,
    n: usize,
    rows: Vec<Vec<usize>>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

impl TryFrom<RawRectangle> for Rectangle {
    type Error = RectangleError;

    fn try_from(raw: RawRectangle) -> Result<Self, RectangleError> {
        let rect = Rectangle::new(raw.modulus, raw.rows, raw.provenance.unwrap_or_default())?;
        if rect.n != raw.n {
            return Err(RectangleError::Invalid(format!(
                "declared {} columns but rows have {}",
                raw.n, rect.n
            )));
        }
        Ok(rect)
    }
}

impl Rectangle {
    /// Checks shape invariants: at least one row, equal row lengths,
    /// `1 <= n <= N`, every entry below `N`.
    pub fn new(
        modulus: usize,
        rows: Vec<Vec<usize>>,
        provenance: Provenance,
    ) -> Result<Self, RectangleError> {
        let n = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || n == 0 {
            return Err(RectangleError::Invalid("empty rectangle".into()));
        }
        if n > modulus {
            return Err(RectangleError::Invalid(format!(
                "{n} columns exceed the alphabet size {modulus}"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(RectangleError::Invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(&s) = row.iter().find(|&&s| s >= modulus) {
                return Err(RectangleError::Invalid(format!(
                    "row {i} contains symbol {s} outside Z_{modulus}"
                )));
            }
        }
        Ok(Rectangle {
            modulus,
            n,
            rows,
            provenance,
        })
    }

    /// Alphabet size `N`.
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.rows[i][j]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub(crate) fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

/// Which of the defining conditions a rectangle satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectangleClass {
    pub row_distinct: bool,
    pub linear_spacing: bool,
    pub circular_spacing: bool,
}

/// Two rows sharing the same ordered pair at the same step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct C2Witness {
    pub first: usize,
    pub second: usize,
    pub step: usize,
    pub rows: (usize, usize),
}

/// First row (in order) that repeats a symbol.
pub fn find_c1_violation(rect: &Rectangle) -> Option<(usize, usize)> {
    let mut seen = vec![usize::MAX; rect.modulus];
    for (i, row) in rect.rows.iter().enumerate() {
        for &s in row {
            if seen[s] == i {
                return Some((i, s));
            }
            seen[s] = i;
        }
    }
    None
}

pub fn verify_c1(rect: &Rectangle) -> bool {
    find_c1_violation(rect).is_none()
}

/// Looks for two rows placing the same ordered pair at the same step.
///
/// Steps are scanned in parallel; each step uses its own hash table of
/// `(a, b) -> row`, so memory stays at `O(rows * n)`. The reported witness is
/// the one at the smallest step, then the earliest offending row.
pub fn find_c2_violation(
    rect: &Rectangle,
    circular: bool,
) -> Result<Option<C2Witness>, RectangleError> {
    if let Some((row, symbol)) = find_c1_violation(rect) {
        return Err(RectangleError::C1Violated { row, symbol });
    }
    let n = rect.n;
    let modulus = rect.modulus as u64;
    Ok((1..n).into_par_iter().find_map_first(|step| {
        let mut owner: HashMap<u64, usize> = HashMap::with_capacity(rect.rows.len() * n);
        for (i, row) in rect.rows.iter().enumerate() {
            let span = if circular { n } else { n - step };
            for j in 0..span {
                let a = row[j];
                let b = row[(j + step) % n];
                let key = a as u64 * modulus + b as u64;
                if let Some(&prev) = owner.get(&key) {
                    // a row never repeats a key on its own (C1 holds)
                    return Some(C2Witness {
                        first: a,
                        second: b,
                        step,
                        rows: (prev, i),
                    });
                }
                owner.insert(key, i);
            }
        }
        None
    }))
}

/// C2 predicate. Requires C1.
pub fn verify_c2(rect: &Rectangle, circular: bool) -> Result<bool, RectangleError> {
    Ok(find_c2_violation(rect, circular)?.is_none())
}

pub fn classify(rect: &Rectangle) -> RectangleClass {
    let row_distinct = verify_c1(rect);
    if !row_distinct {
        return RectangleClass {
            row_distinct,
            linear_spacing: false,
            circular_spacing: false,
        };
    }
    let linear_spacing = verify_c2(rect, false).unwrap_or(false);
    let circular_spacing = linear_spacing && verify_c2(rect, true).unwrap_or(false);
    RectangleClass {
        row_distinct,
        linear_spacing,
        circular_spacing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(modulus: usize, rows: &[&[usize]]) -> Rectangle {
        Rectangle::new(modulus, rows.iter().map(|r| r.to_vec()).collect(), Provenance::external())
            .unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(Rectangle::new(3, vec![], Provenance::external()).is_err());
        assert!(Rectangle::new(3, vec![vec![0, 1], vec![2]], Provenance::external()).is_err());
        assert!(Rectangle::new(3, vec![vec![0, 3]], Provenance::external()).is_err());
        assert!(Rectangle::new(2, vec![vec![0, 1, 0]], Provenance::external()).is_err());
    }

    #[test]
    fn c1_cases() {
        assert!(!verify_c1(&rect(3, &[&[0, 0, 1]])));
        assert!(verify_c1(&rect(5, &[&[3], &[3], &[4]])));
        assert_eq!(find_c1_violation(&rect(3, &[&[0, 1, 2], &[2, 1, 2]])), Some((1, 2)));
    }

    #[test]
    fn c2_cases() {
        let twins = rect(3, &[&[0, 1, 2], &[0, 1, 2]]);
        assert_eq!(verify_c2(&twins, false), Ok(false));
        let w = find_c2_violation(&twins, false).unwrap().unwrap();
        assert_eq!((w.first, w.second, w.step, w.rows), (0, 1, 1, (0, 1)));
        assert!(matches!(
            verify_c2(&rect(3, &[&[0, 0, 1]]), false),
            Err(RectangleError::C1Violated { row: 0, symbol: 0 })
        ));
        // linear but not circular: (1, 0) wraps around in the first row
        let r = rect(2, &[&[0, 1], &[1, 0]]);
        assert_eq!(verify_c2(&r, false), Ok(true));
        assert_eq!(verify_c2(&r, true), Ok(false));
        let class = classify(&r);
        assert!(class.row_distinct && class.linear_spacing && !class.circular_spacing);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let r = rect(4, &[&[0, 1, 2, 3]]);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with(r#"{"N":4,"n":4,"rows":[[0,1,2,3]]"#));
        let back: Rectangle = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let no_prov: Rectangle = serde_json::from_str(r#"{"N":3,"n":2,"rows":[[0,1]]}"#).unwrap();
        assert_eq!(no_prov.provenance().builder, "external");
        assert!(serde_json::from_str::<Rectangle>(r#"{"N":3,"n":3,"rows":[[0,1]]}"#).is_err());
    }
}
