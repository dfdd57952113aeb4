//! LU factorization with partial pivoting, inversion and determinants.

use crate::error::{Error, Result};

use super::matrix::{Matrix, Vector};

/// Relative pivot threshold: a pivot whose magnitude is below
/// `SINGULAR_RTOL * max|entry|` marks the matrix singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Packed LU factors of a square matrix, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    even: bool,
    min_pivot: f64,
    threshold: f64,
}

impl Lu {
    /// Factors `m`. Never fails on singular input; singularity is recorded
    /// and surfaced by [`Lu::is_singular`], [`Lu::solve`] and [`invert`].
    pub fn new(m: &Matrix) -> Self {
        assert!(m.is_square(), "LU requires a square matrix, got {:?}", m.shape());
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut even = true;
        let threshold = SINGULAR_RTOL * m.max_abs();
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            min_pivot = min_pivot.min(pmax);
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                even = !even;
            }
            let pivot = lu[(k, k)];
            if pivot.abs() <= threshold || pivot == 0.0 {
                // keep eliminating the remaining columns so det stays meaningful (~0)
                continue;
            }
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= factor * lu[(k, j)];
                    }
                }
            }
        }
        Self {
            lu,
            perm,
            even,
            min_pivot,
            threshold,
        }
    }

    pub fn order(&self) -> usize {
        self.lu.rows()
    }

    /// True when some pivot is at or below the relative threshold (or the
    /// matrix is exactly zero).
    pub fn is_singular(&self) -> bool {
        self.min_pivot <= self.threshold || self.min_pivot == 0.0
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn determinant(&self) -> f64 {
        let d: f64 = (0..self.order()).map(|i| self.lu[(i, i)]).product();
        if self.even {
            d
        } else {
            -d
        }
    }

    fn ensure_regular(&self) -> Result<()> {
        if self.is_singular() {
            Err(Error::singular("matrix", self.min_pivot, self.threshold))
        } else {
            Ok(())
        }
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.order();
        let permuted: Vec<f64> = self.perm.iter().map(|&p| x[p]).collect();
        x.copy_from_slice(&permuted);
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
    }

    pub fn solve(&self, b: &Vector) -> Result<Vector> {
        if b.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "rhs length {} for order {}",
                b.len(),
                self.order()
            )));
        }
        self.ensure_regular()?;
        let mut x = b.as_slice().to_vec();
        self.solve_in_place(&mut x);
        Ok(Vector::from_raw(x))
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows for order {}",
                b.rows(),
                self.order()
            )));
        }
        self.ensure_regular()?;
        let mut out = Matrix::zeros(b.rows(), b.cols());
        let mut col = vec![0.0; b.rows()];
        for j in 0..b.cols() {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            self.solve_in_place(&mut col);
            for (i, &c) in col.iter().enumerate() {
                out[(i, j)] = c;
            }
        }
        Ok(out)
    }
}

/// An inverse together with its reciprocal 1-norm condition number.
#[derive(Debug, Clone)]
pub struct Inverse {
    pub matrix: Matrix,
    pub rcond: f64,
}

/// Inverts a square matrix, failing with `SingularMatrix` when a pivot
/// falls below `1e-12 * max|entry|`.
pub fn invert(m: &Matrix) -> Result<Inverse> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cannot invert a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let lu = Lu::new(m);
    let inv = lu.solve_matrix(&Matrix::identity(m.rows()))?;
    let rcond = 1.0 / (m.norm_1() * inv.norm_1());
    Ok(Inverse { matrix: inv, rcond })
}

/// Shorthand for `invert(m)?.matrix` with the failing matrix renamed.
pub fn inverse_of(m: &Matrix, name: &str) -> Result<Matrix> {
    invert(m).map(|inv| inv.matrix).map_err(|e| e.renamed(name))
}

/// Sign of a determinant, with `None` when the matrix is numerically
/// singular and the sign cannot be trusted.
pub fn determinant_sign(m: &Matrix) -> (Option<f64>, f64) {
    let lu = Lu::new(m);
    let det = lu.determinant();
    if lu.is_singular() {
        (None, det)
    } else {
        (Some(det.signum()), det)
    }
}
