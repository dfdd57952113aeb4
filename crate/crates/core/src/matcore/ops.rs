use crate::error::{Error, Result};

use super::matrix::{Matrix, Vector};

/// Default cap on either dimension of a Kronecker product.
pub const DEFAULT_KRON_CAP: usize = 4096;

/// Kronecker product with the default dimension cap.
pub fn kron(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    kron_capped(a, b, DEFAULT_KRON_CAP)
}

pub fn kron_capped(a: &Matrix, b: &Matrix, cap: usize) -> Result<Matrix> {
    let rows = a.rows() as u128 * b.rows() as u128;
    let cols = a.cols() as u128 * b.cols() as u128;
    if rows.max(cols) > cap as u128 {
        return Err(Error::overflow("Kronecker product dimension", rows.max(cols), cap as u128));
    }
    let (br, bc) = b.shape();
    Ok(Matrix::from_fn(rows as usize, cols as usize, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    }))
}

/// Column-stacking vectorization.
pub fn vec(x: &Matrix) -> Vector {
    let mut out = Vec::with_capacity(x.rows() * x.cols());
    for j in 0..x.cols() {
        for i in 0..x.rows() {
            out.push(x[(i, j)]);
        }
    }
    Vector::from_raw(out)
}

/// Inverse of [`vec`].
pub fn unvec(v: &Vector, rows: usize, cols: usize) -> Result<Matrix> {
    if rows == 0 || cols == 0 || v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(Matrix::from_fn(rows, cols, |i, j| v[j * rows + i]))
}

/// Entrywise absolute value.
pub fn abs_elementwise(m: &Matrix) -> Matrix {
    m.map(f64::abs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_with_identity_is_block_diagonal() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let k = kron(&Matrix::identity(2), &m).unwrap();
        let expected = Matrix::from_rows(&[
            [1.0, 2.0, 0.0, 0.0],
            [3.0, 4.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 2.0],
            [0.0, 0.0, 3.0, 4.0],
        ])
        .unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_row_by_column() {
        // [1 2] ⊗ [3; 4] = [[1*3, 2*3], [1*4, 2*4]]
        let a = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let b = Matrix::from_rows(&[[3.0], [4.0]]).unwrap();
        let k = kron(&a, &b).unwrap();
        assert_eq!(k.to_rows(), vec![vec![3.0, 6.0], vec![4.0, 8.0]]);
    }

    #[test]
    fn kron_cap() {
        let a = Matrix::identity(70);
        assert!(matches!(kron(&a, &a), Err(Error::DimensionOverflow { .. })));
        assert!(kron_capped(&a, &Matrix::identity(2), 140).is_ok());
    }

    #[test]
    fn vec_stacks_columns() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(vec(&x).as_slice(), &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(unvec(&vec(&x), 2, 2).unwrap(), x);
        assert!(matches!(unvec(&vec(&x), 3, 1), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn abs_basics() {
        let m = Matrix::from_rows(&[[-1.0, 2.0], [0.0, -3.0]]).unwrap();
        let a = abs_elementwise(&m);
        assert_eq!(a.to_rows(), vec![vec![1.0, 2.0], vec![0.0, 3.0]]);
        assert_eq!(abs_elementwise(&a), a);
        assert_eq!(abs_elementwise(&m.neg()), a);
    }
}
