//! Parameterized product families.
//!
//! Each family pairs a circular factor (the multiplicative rectangle over
//! `Z_N1` or the finite-field rectangle over `Z_q`) with a truncated
//! linear-spacing factor, then applies [`product_construct`].

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::construct::{
    build_circular_florentine, build_circular_quasi_florentine, build_quasi_florentine_plus_one,
    product_construct, truncate_columns, Side,
};
use super::{Rectangle, RectangleError};
use crate::arith::{is_prime, smallest_prime_factor};
use crate::field::ORDER_CAP;
use crate::provenance::Provenance;

/// Family selector with its parameters. `modulus` is the order `N1` of the
/// multiplicative rectangle, `prime^degree` (and `other_prime^other_degree`)
/// are finite-field orders, and `trim` is the number of columns dropped from
/// the width-maximal second factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    /// Multiplicative rectangle over `Z_N1` times the field rectangle over
    /// `Z_q` cut to `q - trim` columns, `1 <= trim < q - 1`.
    #[serde(rename = "c1-i")]
    C1i { modulus: usize, prime: u32, degree: u32, trim: usize },
    /// Multiplicative rectangle times the `q x q` rectangle over `Z_(q+1)`
    /// cut to `q + 1 - trim` columns, `1 <= trim < q`.
    #[serde(rename = "c1-ii")]
    C1ii { modulus: usize, prime: u32, degree: u32, trim: usize },
    /// Field rectangle over `Z_q` times the multiplicative rectangle over
    /// `Z_N1` cut to `N1 - trim` columns, `0 <= trim < N1 - 1`.
    #[serde(rename = "c2-i")]
    C2i { prime: u32, degree: u32, modulus: usize, trim: usize },
    /// Field rectangle over `Z_q` times the field rectangle over `Z_q1` cut
    /// to `q1 - trim` columns, `1 <= trim < q1 - 1`.
    #[serde(rename = "c2-ii")]
    C2ii { prime: u32, degree: u32, other_prime: u32, other_degree: u32, trim: usize },
    /// Field rectangle over `Z_q` times the `q1 x q1` rectangle over
    /// `Z_(q1+1)` cut to `q1 + 1 - trim` columns, `1 <= trim < q1`.
    #[serde(rename = "c2-iii")]
    C2iii { prime: u32, degree: u32, other_prime: u32, other_degree: u32, trim: usize },
}

/// Predicted `rows x cols` over `Z_modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectShape {
    pub rows: usize,
    pub cols: usize,
    pub modulus: usize,
}

fn out_of_range(msg: String) -> RectangleError {
    RectangleError::ParamsOutOfRange(msg)
}

fn prime_power(p: u32, n: u32) -> Result<usize, RectangleError> {
    if !is_prime(p as u64) {
        return Err(out_of_range(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(out_of_range("degree must be positive".into()));
    }
    (p as u64)
        .checked_pow(n)
        .filter(|&q| q <= ORDER_CAP)
        .map(|q| q as usize)
        .ok_or_else(|| out_of_range(format!("{p}^{n} exceeds the field cap")))
}

fn check_modulus(n1: usize) -> Result<usize, RectangleError> {
    if n1 < 2 {
        return Err(out_of_range(format!("N1 must be at least 2, got {n1}")));
    }
    Ok(smallest_prime_factor(n1 as u64) as usize)
}

fn check_trim(trim: usize, lo: usize, hi: usize) -> Result<(), RectangleError> {
    if trim < lo || trim >= hi {
        return Err(out_of_range(format!("trim {trim} outside [{lo}, {hi})")));
    }
    Ok(())
}

impl Family {
    /// Validates the parameters and returns the predicted shape.
    pub fn shape(&self) -> Result<RectShape, RectangleError> {
        match *self {
            Family::C1i { modulus, prime, degree, trim } => {
                let p1 = check_modulus(modulus)?;
                let q = prime_power(prime, degree)?;
                check_trim(trim, 1, q.saturating_sub(1))?;
                Ok(RectShape { rows: (p1 - 1).min(q), cols: modulus * (q - trim), modulus: modulus * q })
            }
            Family::C1ii { modulus, prime, degree, trim } => {
                let p1 = check_modulus(modulus)?;
                let q = prime_power(prime, degree)?;
                check_trim(trim, 1, q)?;
                Ok(RectShape {
                    rows: (p1 - 1).min(q),
                    cols: modulus * (q + 1 - trim),
                    modulus: modulus * (q + 1),
                })
            }
            Family::C2i { prime, degree, modulus, trim } => {
                let p1 = check_modulus(modulus)?;
                let q = prime_power(prime, degree)?;
                check_trim(trim, 0, modulus - 1)?;
                Ok(RectShape {
                    rows: (p1 - 1).min(q),
                    cols: (modulus - trim) * (q - 1),
                    modulus: modulus * q,
                })
            }
            Family::C2ii { prime, degree, other_prime, other_degree, trim } => {
                let q = prime_power(prime, degree)?;
                let q1 = prime_power(other_prime, other_degree)?;
                check_trim(trim, 1, q1.saturating_sub(1))?;
                Ok(RectShape { rows: q.min(q1), cols: (q - 1) * (q1 - trim), modulus: q * q1 })
            }
            Family::C2iii { prime, degree, other_prime, other_degree, trim } => {
                let q = prime_power(prime, degree)?;
                let q1 = prime_power(other_prime, other_degree)?;
                check_trim(trim, 1, q1)?;
                Ok(RectShape {
                    rows: q.min(q1),
                    cols: (q - 1) * (q1 + 1 - trim),
                    modulus: q * (q1 + 1),
                })
            }
        }
    }

    pub fn trim(&self) -> usize {
        match *self {
            Family::C1i { trim, .. }
            | Family::C1ii { trim, .. }
            | Family::C2i { trim, .. }
            | Family::C2ii { trim, .. }
            | Family::C2iii { trim, .. } => trim,
        }
    }

    /// Distance between the two growing parameters of the family: `|q - N1|`
    /// for the multiplicative families, `|p1 - p|` for the field-by-field ones.
    pub fn twin_gap(&self) -> u64 {
        match *self {
            Family::C1i { modulus, prime, degree, .. }
            | Family::C1ii { modulus, prime, degree, .. }
            | Family::C2i { prime, degree, modulus, .. } => {
                (prime as u64).pow(degree).abs_diff(modulus as u64)
            }
            Family::C2ii { prime, other_prime, .. } | Family::C2iii { prime, other_prime, .. } => {
                (prime as u64).abs_diff(other_prime as u64)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::C1i { .. } => "c1-i",
            Family::C1ii { .. } => "c1-ii",
            Family::C2i { .. } => "c2-i",
            Family::C2ii { .. } => "c2-ii",
            Family::C2iii { .. } => "c2-iii",
        }
    }

    /// Builds the factors and their product. Truncations drop columns on the
    /// right.
    pub fn instantiate(&self) -> Result<Rectangle, RectangleError> {
        let shape = self.shape()?;
        let (outer, inner) = match *self {
            Family::C1i { modulus, prime, degree, trim } => (
                build_circular_florentine(modulus)?,
                truncate_columns(&build_circular_quasi_florentine(prime, degree)?, trim - 1, Side::Right)?,
            ),
            Family::C1ii { modulus, prime, degree, trim } => (
                build_circular_florentine(modulus)?,
                truncate_columns(&build_quasi_florentine_plus_one(prime, degree)?, trim - 1, Side::Right)?,
            ),
            Family::C2i { prime, degree, modulus, trim } => (
                build_circular_quasi_florentine(prime, degree)?,
                truncate_columns(&build_circular_florentine(modulus)?, trim, Side::Right)?,
            ),
            Family::C2ii { prime, degree, other_prime, other_degree, trim } => (
                build_circular_quasi_florentine(prime, degree)?,
                truncate_columns(
                    &build_circular_quasi_florentine(other_prime, other_degree)?,
                    trim - 1,
                    Side::Right,
                )?,
            ),
            Family::C2iii { prime, degree, other_prime, other_degree, trim } => (
                build_circular_quasi_florentine(prime, degree)?,
                truncate_columns(
                    &build_quasi_florentine_plus_one(other_prime, other_degree)?,
                    trim - 1,
                    Side::Right,
                )?,
            ),
        };
        let product = product_construct(&outer, &inner)?;
        debug_assert_eq!(
            (product.nrows(), product.ncols(), product.modulus()),
            (shape.rows, shape.cols, shape.modulus)
        );
        let provenance = Provenance::new(
            "family",
            json!(self),
            vec![product.provenance().clone()],
        );
        Ok(product.with_provenance(provenance))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_of_printed_rows() {
        let f = Family::C1i { modulus: 7, prime: 3, degree: 2, trim: 1 };
        assert_eq!(f.shape().unwrap(), RectShape { rows: 6, cols: 56, modulus: 63 });
        // 2^4 (3^2 + 1) = 160, L = 15 * 9 = 135, 9 rows
        let f = Family::C2iii { prime: 2, degree: 4, other_prime: 3, other_degree: 2, trim: 1 };
        assert_eq!(f.shape().unwrap(), RectShape { rows: 9, cols: 135, modulus: 160 });
        // 47 * 7^2, L = 47 * 48, 46 rows
        let f = Family::C1i { modulus: 47, prime: 7, degree: 2, trim: 1 };
        assert_eq!(f.shape().unwrap(), RectShape { rows: 46, cols: 2256, modulus: 2303 });
    }

    #[test]
    fn out_of_range() {
        for f in [
            Family::C1i { modulus: 7, prime: 3, degree: 2, trim: 0 },
            Family::C1i { modulus: 7, prime: 3, degree: 2, trim: 8 },
            Family::C1ii { modulus: 7, prime: 2, degree: 3, trim: 8 },
            Family::C2i { prime: 3, degree: 1, modulus: 5, trim: 4 },
            Family::C2ii { prime: 3, degree: 1, other_prime: 4, other_degree: 1, trim: 1 },
            Family::C2iii { prime: 3, degree: 0, other_prime: 5, other_degree: 1, trim: 1 },
            Family::C1i { modulus: 1, prime: 3, degree: 2, trim: 1 },
        ] {
            assert!(matches!(f.shape(), Err(RectangleError::ParamsOutOfRange(_))), "{f:?}");
            assert!(f.instantiate().is_err());
        }
    }

    #[test]
    fn serde_tag() {
        let f = Family::C2i { prime: 2, degree: 3, modulus: 5, trim: 0 };
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"family":"c2-i","prime":2,"degree":3,"modulus":5,"trim":0}"#);
        assert_eq!(serde_json::from_str::<Family>(&json).unwrap(), f);
    }
}
