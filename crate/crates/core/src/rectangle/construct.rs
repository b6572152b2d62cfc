//! Rectangle builders: the multiplicative circular Florentine rectangle, the
//! finite-field circular quasi-Florentine rectangle, column truncation and
//! the product construction.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{find_c2_violation, Rectangle, RectangleError};
use crate::arith::smallest_prime_factor;
use crate::field::GaloisField;
use crate::provenance::Provenance;

/// `(p - 1) x N` rectangle with `a[i][j] = (i + 1) * j mod N`, where `p` is
/// the smallest prime factor of `N`. It is circular Florentine.
pub fn build_circular_florentine(modulus: usize) -> Result<Rectangle, RectangleError> {
    if modulus < 2 {
        return Err(RectangleError::ParamsOutOfRange(format!(
            "circular Florentine rectangle needs N >= 2, got {modulus}"
        )));
    }
    let p = smallest_prime_factor(modulus as u64) as usize;
    let rows = (0..p - 1)
        .map(|i| (0..modulus).map(|j| (i + 1) * j % modulus).collect())
        .collect();
    Rectangle::new(
        modulus,
        rows,
        Provenance::new("circular_florentine", json!({ "N": modulus }), vec![]),
    )
}

/// `q x (q - 1)` circular quasi-Florentine rectangle over `Z_q`, `q = p^n`.
///
/// Row 0 is `psi(alpha^j)`; row `i > 0` is `psi(alpha^j + alpha^(i-1))`, with
/// `alpha` the root of the lexicographically smallest primitive polynomial and
/// `psi` the base-p encoding of the coefficient vector.
pub fn build_circular_quasi_florentine(p: u32, n: u32) -> Result<Rectangle, RectangleError> {
    let gf = GaloisField::with_order(p, n)?;
    let q = gf.order() as usize;
    let powers = gf.powers_of_alpha();
    let mut rows = Vec::with_capacity(q);
    rows.push(powers.iter().map(|e| gf.psi(e) as usize).collect());
    for shift in &powers {
        let row = powers
            .iter()
            .map(|e| gf.psi(&gf.add(e, shift).expect("same field")) as usize)
            .collect();
        rows.push(row);
    }
    let spec = serde_json::to_value(gf.spec()).expect("field spec serializes");
    Rectangle::new(
        q,
        rows,
        Provenance::new(
            "circular_quasi_florentine",
            json!({ "p": p, "n": n, "field": spec, "psi": "base-p" }),
            vec![],
        ),
    )
}

/// `q x q` quasi-Florentine rectangle over `Z_(q+1)`: the circular
/// quasi-Florentine rectangle over `Z_q` with the new symbol `q` appended to
/// every row.
///
/// Each column of the `Z_q` rectangle is `alpha^j + GF(q)`, a permutation of
/// the field, so the appended column only adds pairs `(x, q)` whose left
/// symbols differ between rows at every step. The result has linear spacing
/// (not circular).
pub fn build_quasi_florentine_plus_one(p: u32, n: u32) -> Result<Rectangle, RectangleError> {
    let base = build_circular_quasi_florentine(p, n)?;
    let q = base.modulus();
    let rows = base
        .rows()
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.push(q);
            r
        })
        .collect();
    Rectangle::new(
        q + 1,
        rows,
        Provenance::new(
            "quasi_florentine_plus_one",
            json!({ "p": p, "n": n }),
            vec![base.provenance().clone()],
        ),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    #[default]
    Right,
}

/// Removes `k` columns from the left or right edge. Requires `k = 0` or
/// `k < ncols - 1`, so at least two columns survive any real truncation.
pub fn truncate_columns(rect: &Rectangle, k: usize, side: Side) -> Result<Rectangle, RectangleError> {
    let ncols = rect.ncols();
    if k > 0 && k + 1 >= ncols {
        return Err(RectangleError::TooManyColumnsRemoved { removed: k, ncols });
    }
    let keep = ncols - k;
    let rows = rect
        .rows()
        .iter()
        .map(|row| match side {
            Side::Left => row[k..].to_vec(),
            Side::Right => row[..keep].to_vec(),
        })
        .collect();
    Rectangle::new(
        rect.modulus(),
        rows,
        Provenance::new(
            "truncate_columns",
            json!({ "k": k, "side": side }),
            vec![rect.provenance().clone()],
        ),
    )
}

/// Product construction: `d[i][j] = a[i][j mod n] + N_a * b[i][j div n]`
/// for `i < min(rows_a, rows_b)` and `j < n * m`, over `Z_(N_a * N_b)`.
///
/// `outer` (the `a` factor) must be circular; `inner` must have linear spacing.
pub fn product_construct(outer: &Rectangle, inner: &Rectangle) -> Result<Rectangle, RectangleError> {
    match find_c2_violation(outer, true) {
        Ok(None) => {}
        Ok(Some(w)) => {
            return Err(RectangleError::PreconditionViolated(format!(
                "first factor is not circular: pair ({}, {}) at step {} in rows {} and {}",
                w.first, w.second, w.step, w.rows.0, w.rows.1
            )))
        }
        Err(e) => return Err(RectangleError::PreconditionViolated(format!("first factor: {e}"))),
    }
    match find_c2_violation(inner, false) {
        Ok(None) => {}
        Ok(Some(w)) => {
            return Err(RectangleError::PreconditionViolated(format!(
                "second factor lacks linear spacing: pair ({}, {}) at step {} in rows {} and {}",
                w.first, w.second, w.step, w.rows.0, w.rows.1
            )))
        }
        Err(e) => return Err(RectangleError::PreconditionViolated(format!("second factor: {e}"))),
    }
    let n = outer.ncols();
    let m = inner.ncols();
    let base = outer.modulus();
    let rows = (0..outer.nrows().min(inner.nrows()))
        .map(|i| {
            (0..n * m)
                .map(|j| outer.get(i, j % n) + base * inner.get(i, j / n))
                .collect()
        })
        .collect();
    Rectangle::new(
        base * inner.modulus(),
        rows,
        Provenance::new(
            "product",
            serde_json::Value::Null,
            vec![outer.provenance().clone(), inner.provenance().clone()],
        ),
    )
}

/// Number of `j` in `[0, n - tau)` with `a[i][j] == a[other][j + tau]`.
/// At most one for any rectangle with linear spacing.
pub fn coincidence_count(
    rect: &Rectangle,
    i: usize,
    other: usize,
    tau: usize,
) -> Result<usize, RectangleError> {
    if i == other {
        return Err(RectangleError::SameRow(i, other));
    }
    let n = rect.ncols();
    if tau >= n {
        return Err(RectangleError::ShiftOutOfRange { tau, ncols: n });
    }
    if i >= rect.nrows() || other >= rect.nrows() {
        return Err(RectangleError::ParamsOutOfRange(format!(
            "row index out of range for {} rows",
            rect.nrows()
        )));
    }
    let (a, b) = (rect.row(i), rect.row(other));
    Ok((0..n - tau).filter(|&j| a[j] == b[j + tau]).count())
}
