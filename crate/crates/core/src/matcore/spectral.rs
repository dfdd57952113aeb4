//! Eigenvalue moduli and singular value extremes.

use nalgebra::linalg::{Schur, SVD};

use crate::error::{Error, Result};

use super::matrix::{Matrix, Vector};

const EPS: f64 = f64::EPSILON;

fn iteration_cap(n: usize) -> usize {
    200 * n.max(4)
}

/// Largest eigenvalue modulus of a square matrix.
///
/// Goes through a real Schur form (Hessenberg reduction followed by
/// shifted QR sweeps), so complex conjugate pairs are handled.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    assert!(m.is_square(), "spectral radius needs a square matrix");
    let n = m.rows();
    if n == 1 {
        return Ok(m[(0, 0)].abs());
    }
    if n == 2 {
        return Ok(spectral_radius_2x2(m));
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    // scale to unit max entry so the Schur convergence test is relative
    let scaled = m.scale(1.0 / scale).to_nalgebra();
    let schur = Schur::try_new(scaled, EPS, iteration_cap(n)).ok_or_else(|| Error::NonConvergence {
        what: "Schur eigenvalue iteration".into(),
        iterations: iteration_cap(n),
    })?;
    let rho = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(rho * scale)
}

fn spectral_radius_2x2(m: &Matrix) -> f64 {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let half_tr = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let disc = half_gap * half_gap + b * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (half_tr + s).abs().max((half_tr - s).abs())
    } else {
        // complex pair: modulus^2 = determinant
        (a * d - b * c).abs().sqrt()
    }
}

/// Largest and smallest singular values. For rectangular input the
/// smallest is taken over the `min(rows, cols)` singular values.
pub fn sigma_extremes(m: &Matrix) -> Result<(f64, f64)> {
    let sv = singular_values(m)?;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((max, min))
}

pub fn sigma_max(m: &Matrix) -> Result<f64> {
    sigma_extremes(m).map(|(max, _)| max)
}

pub fn sigma_min(m: &Matrix) -> Result<f64> {
    sigma_extremes(m).map(|(_, min)| min)
}

pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    if m.rows() == 1 || m.cols() == 1 {
        let norm = m.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
        return Ok(vec![norm]);
    }
    let cap = iteration_cap(m.rows().max(m.cols()));
    let svd = SVD::try_new(m.to_nalgebra(), false, false, EPS, cap).ok_or_else(|| {
        Error::NonConvergence {
            what: "singular value iteration".into(),
            iterations: cap,
        }
    })?;
    Ok(svd.singular_values.iter().copied().collect())
}

/// Minimum-norm least squares solution of `m x = b` and its residual
/// `||m x - b||_inf`. Used to decide consistency of singular systems.
pub fn least_squares(m: &Matrix, b: &Vector) -> Result<(Vector, f64)> {
    assert_eq!(m.rows(), b.len(), "least squares shape mismatch");
    let cap = iteration_cap(m.rows().max(m.cols()));
    let svd = SVD::try_new(m.to_nalgebra(), true, true, EPS, cap).ok_or_else(|| {
        Error::NonConvergence {
            what: "singular value iteration".into(),
            iterations: cap,
        }
    })?;
    let smax = svd.singular_values.max();
    let rhs = nalgebra::DVector::from_column_slice(b.as_slice());
    let x = svd
        .solve(&rhs, 1e-12 * smax.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::NonConvergence {
            what: format!("pseudo-inverse solve ({e})"),
            iterations: 0,
        })?;
    let x = Vector::from_raw(x.iter().copied().collect());
    let r = m.mul_vec(&x).sub(b).norm_inf();
    Ok((x, r))
}
