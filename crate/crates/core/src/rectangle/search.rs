//! Exhaustive row-maximization for tiny alphabets.
//!
//! Symbols can be relabeled freely, so the first row is fixed to
//! `(0, 1, ..., n-1)`, the lexicographically smallest injective row. Further
//! rows are generated in strictly increasing lexicographic order, which
//! removes row-permutation symmetry. Each ordered pair at each step may be
//! used by one row only; the number of still-free triples at each step gives
//! an upper bound used for pruning.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Rectangle, RectangleError};
use crate::provenance::Provenance;

pub const SEARCH_MODULUS_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Stop as soon as this many rows are found.
    pub row_cap: usize,
    /// Maximum number of search nodes before giving up.
    pub node_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            row_cap: usize::MAX,
            node_budget: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub rows_found: usize,
    /// Counting bound on the number of rows.
    pub upper_bound: usize,
    /// The returned row count is the maximum (search finished, or the
    /// counting bound was met).
    pub proven_maximum: bool,
    /// The node budget ran out.
    pub truncated: bool,
    pub nodes: u64,
}

struct Search {
    modulus: usize,
    n: usize,
    circular: bool,
    limits: SearchLimits,
    upper_bound: usize,
    /// used[(a * N + b) * n + step]
    used: Vec<bool>,
    free_per_step: Vec<usize>,
    rows: Vec<Vec<usize>>,
    best: Vec<Vec<usize>>,
    nodes: u64,
    truncated: bool,
    stop: bool,
}

impl Search {
    fn slot(&self, a: usize, b: usize, step: usize) -> usize {
        (a * self.modulus + b) * self.n + step
    }

    fn uses_per_row(&self, step: usize) -> usize {
        if self.circular {
            self.n
        } else {
            self.n - step
        }
    }

    fn capacity_bound(&self) -> usize {
        (1..self.n)
            .map(|m| self.free_per_step[m] / self.uses_per_row(m))
            .min()
            .unwrap_or(usize::MAX)
    }

    fn row_triples(&self, row: &[usize]) -> Vec<usize> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.slot(row[i], row[j], j - i));
                if self.circular {
                    out.push(self.slot(row[j], row[i], n - (j - i)));
                }
            }
        }
        out
    }

    fn set_row(&mut self, row: &[usize], value: bool) {
        for s in self.row_triples(row) {
            self.used[s] = value;
            let step = s % self.n;
            if value {
                self.free_per_step[step] -= 1;
            } else {
                self.free_per_step[step] += 1;
            }
        }
    }

    fn expand(&mut self) {
        self.nodes += 1;
        if self.nodes > self.limits.node_budget {
            self.truncated = true;
            self.stop = true;
            return;
        }
        if self.rows.len() > self.best.len() {
            self.best = self.rows.clone();
            if self.best.len() >= self.limits.row_cap || self.best.len() >= self.upper_bound {
                self.stop = true;
                return;
            }
        }
        if self.rows.len() + self.capacity_bound() <= self.best.len() {
            return;
        }
        let last = self.rows.last().cloned();
        let mut buf = Vec::with_capacity(self.n);
        let mut taken = vec![false; self.modulus];
        self.build(&mut buf, &mut taken, last.as_deref(), true);
    }

    fn build(&mut self, buf: &mut Vec<usize>, taken: &mut [bool], last: Option<&[usize]>, tight: bool) {
        if self.stop {
            return;
        }
        let pos = buf.len();
        if pos == self.n {
            if tight {
                // equal to the previous row
                return;
            }
            let row = buf.clone();
            self.set_row(&row, true);
            self.rows.push(row.clone());
            self.expand();
            self.rows.pop();
            self.set_row(&row, false);
            return;
        }
        let lo = match (tight, last) {
            (true, Some(prev)) => prev[pos],
            _ => 0,
        };
        for s in lo..self.modulus {
            if taken[s] || !self.compatible(buf, s) {
                continue;
            }
            taken[s] = true;
            buf.push(s);
            let still_tight = tight && last.is_some_and(|prev| prev[pos] == s);
            self.build(buf, taken, last, still_tight);
            buf.pop();
            taken[s] = false;
            if self.stop {
                return;
            }
        }
    }

    fn compatible(&self, prefix: &[usize], s: usize) -> bool {
        let j = prefix.len();
        prefix.iter().enumerate().all(|(i, &a)| {
            let step = j - i;
            !self.used[self.slot(a, s, step)]
                && (!self.circular || !self.used[self.slot(s, a, self.n - step)])
        })
    }
}

/// Searches for a rectangle over `Z_N` with `n` columns and as many rows as
/// possible, for `N <= 10`. Deterministic: the same inputs always return the
/// same rectangle.
pub fn search_max_rows(
    modulus: usize,
    n: usize,
    circular: bool,
    limits: SearchLimits,
) -> Result<(Rectangle, SearchCertificate), RectangleError> {
    if modulus > SEARCH_MODULUS_CAP {
        return Err(RectangleError::CapExceeded {
            modulus,
            cap: SEARCH_MODULUS_CAP,
        });
    }
    if n < 2 || n > modulus {
        return Err(RectangleError::ParamsOutOfRange(format!(
            "need 2 <= n <= N, got n = {n}, N = {modulus}"
        )));
    }
    let pairs = modulus * (modulus - 1);
    let mut free_per_step = vec![pairs; n];
    free_per_step[0] = 0;
    let mut search = Search {
        modulus,
        n,
        circular,
        limits,
        upper_bound: 0,
        used: vec![false; modulus * modulus * n],
        free_per_step,
        rows: Vec::new(),
        best: Vec::new(),
        nodes: 0,
        truncated: false,
        stop: false,
    };
    search.upper_bound = search.capacity_bound();
    let first: Vec<usize> = (0..n).collect();
    search.set_row(&first, true);
    search.rows.push(first);
    search.expand();

    let rows_found = search.best.len();
    let certificate = SearchCertificate {
        rows_found,
        upper_bound: search.upper_bound,
        proven_maximum: rows_found >= search.upper_bound
            || (!search.truncated && rows_found < limits.row_cap),
        truncated: search.truncated,
        nodes: search.nodes,
    };
    let rect = Rectangle::new(
        modulus,
        search.best,
        Provenance::new(
            "search_max_rows",
            json!({ "N": modulus, "n": n, "circular": circular, "row_cap": limits.row_cap.min(u32::MAX as usize), "node_budget": limits.node_budget }),
            vec![],
        ),
    )?;
    Ok((rect, certificate))
}
