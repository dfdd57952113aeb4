//! Column representatives, the column W-property, P-matrices, column
//! diagonal dominance, and the Kronecker-lifted GAVME/NGAVME checks built
//! on them.
//!
//! All scans are deterministic: a failing scan reports the first
//! violating selector (or index set) in lexicographic order, even though
//! the scan itself runs in parallel.

mod lifted;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{determinant_sign, Matrix};

pub use lifted::{check_gavme_dd_conditions, check_gavme_w_conditions, check_ngavme_combinatorial};

/// One choice per column: `false` takes the column from the first matrix
/// of the pair, `true` from the second.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepresentativeSelector {
    pub bits: Vec<bool>,
}

impl RepresentativeSelector {
    /// Selector number `index` in lexicographic order; column 0 is the
    /// most significant position.
    pub fn from_index(index: u64, order: usize) -> Self {
        Self {
            bits: (0..order).map(|j| (index >> (order - 1 - j)) & 1 == 1).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.bits.len()
    }

    /// Builds the representative of `(m1, m2)` chosen by this selector.
    pub fn apply(&self, m1: &Matrix, m2: &Matrix) -> Matrix {
        assert_eq!(m1.shape(), m2.shape(), "representative pair shape mismatch");
        assert_eq!(m1.cols(), self.order(), "selector length mismatch");
        Matrix::from_fn(m1.rows(), m1.cols(), |i, j| if self.bits[j] { m2[(i, j)] } else { m1[(i, j)] })
    }
}

impl fmt::Display for RepresentativeSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "2" } else { "1" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PropertyId {
    ColumnWProperty,
    PMatrix,
    SddColumns,
    IrreduciblyDdColumns,
    /// Every column representative has a nonzero determinant of one sign.
    RepresentativeSignConstancy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinatorialReport {
    pub property_id: PropertyId,
    pub holds: bool,
    pub counterexample_selector: Option<RepresentativeSelector>,
    /// Offending principal index set or column, 0-based. Notes count from 1.
    pub counterexample_indices: Option<Vec<usize>>,
    /// On failure the offending value; on success the smallest value seen.
    pub determinant_or_minor: Option<f64>,
    pub scanned: u64,
    pub note: String,
}

impl CombinatorialReport {
    fn passed(property_id: PropertyId, value: Option<f64>, scanned: u64) -> Self {
        Self {
            property_id,
            holds: true,
            counterexample_selector: None,
            counterexample_indices: None,
            determinant_or_minor: value,
            scanned,
            note: String::new(),
        }
    }

    fn failed(property_id: PropertyId, value: f64, scanned: u64, note: impl Into<String>) -> Self {
        Self {
            property_id,
            holds: false,
            counterexample_selector: None,
            counterexample_indices: None,
            determinant_or_minor: Some(value),
            scanned,
            note: note.into(),
        }
    }
}

fn enumeration_count(order: usize, cap: u64, what: &str) -> Result<u64> {
    let count: u128 = if order >= 127 { u128::MAX } else { 1u128 << order };
    if count > cap as u128 {
        return Err(Error::overflow(what, count, cap as u128));
    }
    Ok(count as u64)
}

fn check_pair(m1: &Matrix, m2: &Matrix) -> Result<usize> {
    if !m1.is_square() || m1.shape() != m2.shape() {
        return Err(Error::DimensionMismatch(format!(
            "representative pair must be square of equal order, got {:?} and {:?}",
            m1.shape(),
            m2.shape()
        )));
    }
    Ok(m1.rows())
}

/// Iterator over all `2^n` column representatives in selector order.
pub struct ColumnRepresentatives<'a> {
    m1: &'a Matrix,
    m2: &'a Matrix,
    next: u64,
    count: u64,
}

impl Iterator for ColumnRepresentatives<'_> {
    type Item = (RepresentativeSelector, Matrix);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.count {
            return None;
        }
        let sel = RepresentativeSelector::from_index(self.next, self.m1.cols());
        self.next += 1;
        let rep = sel.apply(self.m1, self.m2);
        Some((sel, rep))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for ColumnRepresentatives<'_> {}

pub fn column_representatives<'a>(m1: &'a Matrix, m2: &'a Matrix, cap: u64) -> Result<ColumnRepresentatives<'a>> {
    let n = check_pair(m1, m2)?;
    let count = enumeration_count(n, cap, "column representatives")?;
    Ok(ColumnRepresentatives { m1, m2, next: 0, count })
}

/// Runs `test` over all representatives in parallel. Returns the first
/// failing selector index with its value, or the minimum value on success.
fn scan_representatives(
    m1: &Matrix,
    m2: &Matrix,
    count: u64,
    test: impl Fn(&Matrix) -> (bool, f64) + Sync,
) -> std::result::Result<f64, (u64, f64)> {
    let n = m1.cols();
    let first_bad = (0..count).into_par_iter().find_first(|&k| {
        let rep = RepresentativeSelector::from_index(k, n).apply(m1, m2);
        !test(&rep).0
    });
    match first_bad {
        Some(k) => {
            let rep = RepresentativeSelector::from_index(k, n).apply(m1, m2);
            Err((k, test(&rep).1))
        }
        None => Ok((0..count)
            .into_par_iter()
            .map(|k| test(&RepresentativeSelector::from_index(k, n).apply(m1, m2)).1)
            .reduce(|| f64::INFINITY, f64::min)),
    }
}

/// Column W-property: every column representative of `{m1, m2}` has a
/// positive determinant. Determinants of numerically singular
/// representatives count as violations.
pub fn has_column_w_property(m1: &Matrix, m2: &Matrix, cap: u64) -> Result<CombinatorialReport> {
    let n = check_pair(m1, m2)?;
    let count = enumeration_count(n, cap, "column representatives")?;
    let outcome = scan_representatives(m1, m2, count, |rep| {
        let (sign, det) = determinant_sign(rep);
        (sign == Some(1.0), det)
    });
    Ok(match outcome {
        Ok(min_det) => CombinatorialReport::passed(PropertyId::ColumnWProperty, Some(min_det), count),
        Err((k, det)) => {
            let sel = RepresentativeSelector::from_index(k, n);
            let rep = sel.apply(m1, m2);
            let note = if determinant_sign(&rep).0.is_none() {
                format!("representative {sel} is near-singular (det {det:e})")
            } else {
                format!("representative {sel} has determinant {det:e} <= 0")
            };
            CombinatorialReport {
                counterexample_selector: Some(sel),
                ..CombinatorialReport::failed(PropertyId::ColumnWProperty, det, k + 1, note)
            }
        }
    })
}

/// Every column representative is nonsingular with one common
/// determinant sign. Equivalent to `m1·F1 + m2·F2` being invertible for
/// all nonnegative diagonal `F1, F2` with `F1 + F2` positive, since that
/// determinant is a nonnegative combination of representative
/// determinants with at least one positive weight.
pub fn representative_sign_constancy(m1: &Matrix, m2: &Matrix, cap: u64) -> Result<CombinatorialReport> {
    let n = check_pair(m1, m2)?;
    let count = enumeration_count(n, cap, "column representatives")?;
    let (sign0, det0) = determinant_sign(m1);
    let Some(sign0) = sign0 else {
        return Ok(CombinatorialReport {
            counterexample_selector: Some(RepresentativeSelector::from_index(0, n)),
            ..CombinatorialReport::failed(
                PropertyId::RepresentativeSignConstancy,
                det0,
                1,
                "first representative is near-singular",
            )
        });
    };
    let outcome = scan_representatives(m1, m2, count, |rep| {
        let (sign, det) = determinant_sign(rep);
        (sign == Some(sign0), det.abs())
    });
    Ok(match outcome {
        Ok(min_abs) => {
            let mut r = CombinatorialReport::passed(PropertyId::RepresentativeSignConstancy, Some(min_abs), count);
            r.note = format!("all determinants have sign {sign0:+}");
            r
        }
        Err((k, _)) => {
            let sel = RepresentativeSelector::from_index(k, n);
            let (_, det) = determinant_sign(&sel.apply(m1, m2));
            let note = format!("representative {sel} has determinant {det:e}, first has {det0:e}");
            CombinatorialReport {
                counterexample_selector: Some(sel),
                ..CombinatorialReport::failed(PropertyId::RepresentativeSignConstancy, det, k + 1, note)
            }
        }
    })
}

fn subset_indices(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| (mask >> i) & 1 == 1).collect()
}

/// All `2^n − 1` principal minors are positive.
pub fn is_p_matrix(m: &Matrix, cap: u64) -> Result<CombinatorialReport> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("P-matrix test needs a square matrix, got {:?}", m.shape())));
    }
    let n = m.rows();
    let count = enumeration_count(n, cap, "principal minors")? - 1;
    let one_based = |idx: &[usize]| idx.iter().map(|i| i + 1).collect::<Vec<_>>();
    let minor = |mask: u64| {
        let idx = subset_indices(mask, n);
        determinant_sign(&m.select(&idx, &idx))
    };
    let first_bad = (1..=count).into_par_iter().find_first(|&mask| minor(mask).0 != Some(1.0));
    Ok(match first_bad {
        Some(mask) => {
            let (sign, value) = minor(mask);
            let idx = subset_indices(mask, n);
            let note = if sign.is_none() {
                format!("principal minor on rows/cols {:?} is near zero ({value:e})", one_based(&idx))
            } else {
                format!("principal minor on rows/cols {:?} is {value:e} <= 0", one_based(&idx))
            };
            CombinatorialReport {
                counterexample_indices: Some(idx),
                ..CombinatorialReport::failed(PropertyId::PMatrix, value, mask, note)
            }
        }
        None => {
            let min = (1..=count).into_par_iter().map(|mask| minor(mask).1).reduce(|| f64::INFINITY, f64::min);
            CombinatorialReport::passed(PropertyId::PMatrix, Some(min), count)
        }
    })
}

/// `|m_jj| − Σ_{i≠j} |m_ij|` for every column.
fn column_slack(m: &Matrix) -> Vec<f64> {
    (0..m.cols())
        .map(|j| {
            let off: f64 = (0..m.rows()).filter(|&i| i != j).map(|i| m[(i, j)].abs()).sum();
            m[(j, j)].abs() - off
        })
        .collect()
}

/// Strict column diagonal dominance.
pub fn is_sdd_columns(m: &Matrix) -> CombinatorialReport {
    assert!(m.is_square(), "diagonal dominance needs a square matrix");
    let slack = column_slack(m);
    match slack.iter().position(|&s| s <= 0.0) {
        Some(j) => CombinatorialReport {
            counterexample_indices: Some(vec![j]),
            ..CombinatorialReport::failed(
                PropertyId::SddColumns,
                slack[j],
                j as u64 + 1,
                format!("column {} is not strictly dominant (slack {:e})", j + 1, slack[j]),
            )
        },
        None => CombinatorialReport::passed(
            PropertyId::SddColumns,
            Some(slack.iter().copied().fold(f64::INFINITY, f64::min)),
            slack.len() as u64,
        ),
    }
}

/// Strong connectivity of the directed graph with an edge `i → j` for
/// every nonzero off-diagonal `m_ij`.
pub fn is_irreducible(m: &Matrix) -> bool {
    let n = m.rows();
    if n == 1 {
        return true;
    }
    let reaches_all = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let w = if forward { m[(u, v)] } else { m[(v, u)] };
                if v != u && w != 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reaches_all(true) && reaches_all(false)
}

/// Irreducible, weakly column diagonally dominant everywhere, and
/// strictly dominant in at least one column.
pub fn is_irreducibly_dd_columns(m: &Matrix) -> CombinatorialReport {
    assert!(m.is_square(), "diagonal dominance needs a square matrix");
    let id = PropertyId::IrreduciblyDdColumns;
    let slack = column_slack(m);
    let n = slack.len() as u64;
    if !is_irreducible(m) {
        return CombinatorialReport::failed(id, f64::NAN, n, "matrix is reducible").with_nan_cleared();
    }
    if let Some(j) = slack.iter().position(|&s| s < 0.0) {
        return CombinatorialReport {
            counterexample_indices: Some(vec![j]),
            ..CombinatorialReport::failed(
                id,
                slack[j],
                j as u64 + 1,
                format!("column {} is not dominant (slack {:e})", j + 1, slack[j]),
            )
        };
    }
    let best = slack.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if best <= 0.0 {
        return CombinatorialReport::failed(id, best, n, "no column is strictly dominant");
    }
    CombinatorialReport::passed(id, Some(slack.iter().copied().fold(f64::INFINITY, f64::min)), n)
}

impl CombinatorialReport {
    fn with_nan_cleared(mut self) -> Self {
        if self.determinant_or_minor.is_some_and(f64::is_nan) {
            self.determinant_or_minor = None;
        }
        self
    }
}
