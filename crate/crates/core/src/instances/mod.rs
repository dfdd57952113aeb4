//! Problem instances for the four equation classes, residuals, and the
//! structural reductions between them.
//!
//! Right-hand sides are optional everywhere: every certificate depends on
//! the coefficient matrices only.

mod io;
pub mod mtx;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{abs_elementwise, inverse_of, kron_capped, vec, Matrix, Vector, DEFAULT_KRON_CAP};

pub use io::{parse_instance, read_bundle, write_bundle, Bundle, InstanceFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum InstanceKind {
    Gave,
    Gavme,
    Ngavme,
    Sylvester,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Gave => "GAVE",
            InstanceKind::Gavme => "GAVME",
            InstanceKind::Ngavme => "NGAVME",
            InstanceKind::Sylvester => "SYLVESTER",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GAVE" => Ok(Self::Gave),
            "GAVME" => Ok(Self::Gavme),
            "NGAVME" => Ok(Self::Ngavme),
            "SYLVESTER" => Ok(Self::Sylvester),
            other => Err(Error::Parse(format!("unknown instance type {other:?}"))),
        }
    }
}

fn require_square(m: &Matrix, name: &str, n: usize) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{name} must be {n}x{n}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn require_rhs_rows(f: Option<&Matrix>, name: &str, n: usize) -> Result<()> {
    match f {
        Some(f) if f.rows() != n => Err(Error::DimensionMismatch(format!(
            "{name} must have {n} rows, got {}",
            f.rows()
        ))),
        _ => Ok(()),
    }
}

fn check_solution_shape(x: &Matrix, rows: usize, cols: usize) -> Result<()> {
    if x.shape() != (rows, cols) {
        return Err(Error::DimensionMismatch(format!(
            "solution must be {rows}x{cols}, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// `Ax + B|x| = f`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaveInstance {
    a: Matrix,
    b: Matrix,
    f: Option<Vector>,
}

impl GaveInstance {
    pub fn new(a: Matrix, b: Matrix, f: Option<Vector>) -> Result<Self> {
        let n = a.rows();
        require_square(&a, "A", n)?;
        require_square(&b, "B", n)?;
        if let Some(f) = &f {
            if f.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "f must have length {n}, got {}",
                    f.len()
                )));
            }
        }
        Ok(Self { a, b, f })
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn f(&self) -> Option<&Vector> {
        self.f.as_ref()
    }

    pub fn rhs(&self) -> Result<&Vector> {
        self.f.as_ref().ok_or(Error::MissingRightHandSide)
    }

    /// `||A x + B|x| - f||_inf`.
    pub fn residual(&self, x: &Vector) -> Result<f64> {
        let f = self.rhs()?;
        if x.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "solution must have length {}, got {}",
                self.order(),
                x.len()
            )));
        }
        let lhs = self.a.mul_vec(x).add(&self.b.mul_vec(&x.abs()));
        Ok(lhs.sub(f).norm_inf())
    }
}

/// `AX + B|X| = F` with `F` of shape `n x m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GavmeInstance {
    a: Matrix,
    b: Matrix,
    f: Option<Matrix>,
}

impl GavmeInstance {
    pub fn new(a: Matrix, b: Matrix, f: Option<Matrix>) -> Result<Self> {
        let n = a.rows();
        require_square(&a, "A", n)?;
        require_square(&b, "B", n)?;
        require_rhs_rows(f.as_ref(), "F", n)?;
        Ok(Self { a, b, f })
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    /// Number of right-hand side columns, 1 when `F` is absent.
    pub fn columns(&self) -> usize {
        self.f.as_ref().map_or(1, Matrix::cols)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn f(&self) -> Option<&Matrix> {
        self.f.as_ref()
    }

    pub fn rhs(&self) -> Result<&Matrix> {
        self.f.as_ref().ok_or(Error::MissingRightHandSide)
    }

    pub fn residual(&self, x: &Matrix) -> Result<f64> {
        let f = self.rhs()?;
        check_solution_shape(x, self.order(), f.cols())?;
        let lhs = self.a.matmul(x).add(&self.b.matmul(&abs_elementwise(x)));
        Ok(lhs.sub(f).max_abs())
    }
}

/// `AX + B|CX| = F`.
#[derive(Debug, Clone, PartialEq)]
pub struct NgavmeInstance {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    f: Option<Matrix>,
}

impl NgavmeInstance {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, f: Option<Matrix>) -> Result<Self> {
        let n = a.rows();
        require_square(&a, "A", n)?;
        require_square(&b, "B", n)?;
        require_square(&c, "C", n)?;
        require_rhs_rows(f.as_ref(), "F", n)?;
        Ok(Self { a, b, c, f })
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn columns(&self) -> usize {
        self.f.as_ref().map_or(1, Matrix::cols)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn f(&self) -> Option<&Matrix> {
        self.f.as_ref()
    }

    pub fn rhs(&self) -> Result<&Matrix> {
        self.f.as_ref().ok_or(Error::MissingRightHandSide)
    }

    pub fn residual(&self, x: &Matrix) -> Result<f64> {
        let f = self.rhs()?;
        check_solution_shape(x, self.order(), f.cols())?;
        let cx = self.c.matmul(x);
        let lhs = self.a.matmul(x).add(&self.b.matmul(&abs_elementwise(&cx)));
        Ok(lhs.sub(f).max_abs())
    }
}

/// `AXK + B|X|L = F`, all square of one order.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterInstance {
    a: Matrix,
    b: Matrix,
    k: Matrix,
    l: Matrix,
    f: Option<Matrix>,
}

impl SylvesterInstance {
    pub fn new(a: Matrix, b: Matrix, k: Matrix, l: Matrix, f: Option<Matrix>) -> Result<Self> {
        let n = a.rows();
        require_square(&a, "A", n)?;
        require_square(&b, "B", n)?;
        require_square(&k, "K", n)?;
        require_square(&l, "L", n)?;
        if let Some(f) = &f {
            require_square(f, "F", n)?;
        }
        Ok(Self { a, b, k, l, f })
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn k(&self) -> &Matrix {
        &self.k
    }

    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn f(&self) -> Option<&Matrix> {
        self.f.as_ref()
    }

    pub fn rhs(&self) -> Result<&Matrix> {
        self.f.as_ref().ok_or(Error::MissingRightHandSide)
    }

    pub fn residual(&self, x: &Matrix) -> Result<f64> {
        let f = self.rhs()?;
        check_solution_shape(x, self.order(), self.order())?;
        let lhs = self
            .a
            .matmul(x)
            .matmul(&self.k)
            .add(&self.b.matmul(&abs_elementwise(x)).matmul(&self.l));
        Ok(lhs.sub(f).max_abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Gave(GaveInstance),
    Gavme(GavmeInstance),
    Ngavme(NgavmeInstance),
    Sylvester(SylvesterInstance),
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Gave(_) => InstanceKind::Gave,
            Instance::Gavme(_) => InstanceKind::Gavme,
            Instance::Ngavme(_) => InstanceKind::Ngavme,
            Instance::Sylvester(_) => InstanceKind::Sylvester,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Instance::Gave(i) => i.order(),
            Instance::Gavme(i) => i.order(),
            Instance::Ngavme(i) => i.order(),
            Instance::Sylvester(i) => i.order(),
        }
    }

    pub fn has_rhs(&self) -> bool {
        match self {
            Instance::Gave(i) => i.f.is_some(),
            Instance::Gavme(i) => i.f.is_some(),
            Instance::Ngavme(i) => i.f.is_some(),
            Instance::Sylvester(i) => i.f.is_some(),
        }
    }

    /// Infinity-norm residual of `x`. GAVE solutions are passed as a
    /// single-column matrix.
    pub fn residual(&self, x: &Matrix) -> Result<f64> {
        match self {
            Instance::Gave(i) => {
                if x.cols() != 1 {
                    return Err(Error::DimensionMismatch(format!(
                        "GAVE solution must be a single column, got {} columns",
                        x.cols()
                    )));
                }
                i.residual(&x.col(0))
            }
            Instance::Gavme(i) => i.residual(x),
            Instance::Ngavme(i) => i.residual(x),
            Instance::Sylvester(i) => i.residual(x),
        }
    }
}

/// Recovers `X = C^{-1} Y` from a solution of the reduced GAVME.
#[derive(Debug, Clone)]
pub struct BackMap {
    c_inv: Matrix,
}

impl BackMap {
    pub fn apply(&self, y: &Matrix) -> Matrix {
        self.c_inv.matmul(y)
    }

    pub fn c_inverse(&self) -> &Matrix {
        &self.c_inv
    }
}

/// Rewrites `AX + B|CX| = F` as `(AC^{-1}) Y + B|Y| = F` with `Y = CX`.
pub fn reduce_ngavme(inst: &NgavmeInstance) -> Result<(GavmeInstance, BackMap)> {
    let c_inv = inverse_of(&inst.c, "C")?;
    let reduced = GavmeInstance {
        a: inst.a.matmul(&c_inv),
        b: inst.b.clone(),
        f: inst.f.clone(),
    };
    Ok((reduced, BackMap { c_inv }))
}

/// Splits a GAVME into one GAVE per column of `F`.
pub fn gavme_columns(inst: &GavmeInstance) -> Result<Vec<GaveInstance>> {
    let f = inst.rhs()?;
    Ok((0..f.cols())
        .map(|j| GaveInstance {
            a: inst.a.clone(),
            b: inst.b.clone(),
            f: Some(f.col(j)),
        })
        .collect())
}

/// Kronecker lift of the coefficients: `(I_m ⊗ A, I_m ⊗ B)`.
pub fn lift_coefficients(a: &Matrix, b: &Matrix, m: usize, kron_cap: usize) -> Result<(Matrix, Matrix)> {
    let eye = Matrix::identity(m);
    Ok((kron_capped(&eye, a, kron_cap)?, kron_capped(&eye, b, kron_cap)?))
}

/// GAVE of order `n*m` equivalent to the GAVME under `vec`.
pub fn lift_gavme(inst: &GavmeInstance) -> Result<GaveInstance> {
    lift_gavme_capped(inst, DEFAULT_KRON_CAP)
}

pub fn lift_gavme_capped(inst: &GavmeInstance, kron_cap: usize) -> Result<GaveInstance> {
    let (p, q) = lift_coefficients(&inst.a, &inst.b, inst.columns(), kron_cap)?;
    Ok(GaveInstance {
        a: p,
        b: q,
        f: inst.f.as_ref().map(vec),
    })
}

/// GAVE of order `n^2` equivalent to the Sylvester-like equation:
/// `vec(AXK) = (K^T ⊗ A) vec X` and `vec(B|X|L) = (L^T ⊗ B) |vec X|`.
pub fn lift_sylvester(inst: &SylvesterInstance, kron_cap: usize) -> Result<GaveInstance> {
    Ok(GaveInstance {
        a: kron_capped(&inst.k.transpose(), &inst.a, kron_cap)?,
        b: kron_capped(&inst.l.transpose(), &inst.b, kron_cap)?,
        f: inst.f.as_ref().map(vec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::unvec;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn gavme_3x3() -> GavmeInstance {
        GavmeInstance::new(
            m(&[&[2.0, -4.0, 0.0], &[0.0, 1.2, 1.1], &[-2.0, 0.8, 0.0]]),
            m(&[&[1.0, -1.0, 0.0], &[0.0, 1.0, 1.0], &[-1.0, 0.0, 0.0]]),
            Some(m(&[&[-5.5, 9.0, 1.0], &[0.8, 3.8, 1.8], &[3.4, -4.6, -5.2]])),
        )
        .unwrap()
    }

    fn ngavme_3x3() -> NgavmeInstance {
        NgavmeInstance::new(
            m(&[&[-5.0, 2.0, 8.0], &[1.0, 2.0, 3.0], &[7.0, -5.0, 0.0]]),
            m(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, -1.0], &[-1.0, 2.0, 0.0]]),
            m(&[&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]),
            Some(m(&[&[14.0, -7.0, 19.0], &[12.0, 4.0, 3.0], &[1.0, 39.0, -12.0]])),
        )
        .unwrap()
    }

    #[test]
    fn dimension_checks() {
        let a = Matrix::identity(2);
        assert!(GavmeInstance::new(a.clone(), a.clone(), Some(Matrix::zeros(3, 2))).is_err());
        assert!(GaveInstance::new(a.clone(), Matrix::identity(3), None).is_err());
        assert!(GaveInstance::new(a.clone(), a.clone(), Some(Vector::zeros(3))).is_err());
        assert!(SylvesterInstance::new(a.clone(), a.clone(), a.clone(), a.clone(), Some(Matrix::zeros(2, 1))).is_err());
        let g = GavmeInstance::new(a.clone(), a.clone(), None).unwrap();
        assert!(matches!(g.residual(&a), Err(Error::MissingRightHandSide)));
        let g = gavme_3x3();
        assert!(matches!(g.residual(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn printed_gavme_solution_has_zero_residual() {
        let x = m(&[&[-3.0, 1.0, 2.0], &[0.5, -2.0, 1.0], &[-3.0, 2.0, -4.0]]);
        assert!(gavme_3x3().residual(&x).unwrap() <= 1e-12);
    }

    #[test]
    fn printed_ngavme_solution_has_zero_residual() {
        let x = m(&[&[2.0, 5.0, -1.0], &[3.0, -2.0, 1.0], &[1.0, 1.0, 1.0]]);
        assert!(ngavme_3x3().residual(&x).unwrap() <= 1e-12);
    }

    #[test]
    fn zero_solution_residual_is_rhs_norm() {
        let g = gavme_3x3();
        assert_eq!(g.residual(&Matrix::zeros(3, 3)).unwrap(), 9.0);
        let inst = Instance::Ngavme(ngavme_3x3());
        assert_eq!(inst.residual(&Matrix::zeros(3, 3)).unwrap(), 39.0);
    }

    #[test]
    fn reduce_with_identity_c_is_unchanged() {
        let base = gavme_3x3();
        let ng = NgavmeInstance::new(base.a.clone(), base.b.clone(), Matrix::identity(3), base.f.clone()).unwrap();
        let (reduced, back) = reduce_ngavme(&ng).unwrap();
        assert_eq!(reduced, base);
        assert_eq!(back.c_inverse(), &Matrix::identity(3));
    }

    #[test]
    fn reduced_solution_maps_back() {
        let ng = ngavme_3x3();
        let x = m(&[&[2.0, 5.0, -1.0], &[3.0, -2.0, 1.0], &[1.0, 1.0, 1.0]]);
        let (reduced, back) = reduce_ngavme(&ng).unwrap();
        let y = ng.c.matmul(&x);
        assert!(reduced.residual(&y).unwrap() <= 1e-12);
        let recovered = back.apply(&y);
        assert!(recovered.sub(&x).max_abs() <= 1e-14);
        assert!(ng.residual(&recovered).unwrap() <= 1e-12);
    }

    #[test]
    fn reduce_rejects_singular_c() {
        let ng = NgavmeInstance::new(
            Matrix::identity(3),
            Matrix::identity(3),
            Matrix::from_diagonal(&[1.0, 1.0, 0.0]),
            None,
        )
        .unwrap();
        assert!(matches!(reduce_ngavme(&ng), Err(Error::SingularMatrix { ref which, .. }) if which == "C"));
    }

    #[test]
    fn column_split() {
        let cols = gavme_columns(&gavme_3x3()).unwrap();
        assert_eq!(cols.len(), 3);
        assert_eq!(cols[0].f().unwrap().as_slice(), &[-5.5, 0.8, 3.4]);
        let single = GavmeInstance::new(Matrix::identity(2), Matrix::identity(2), Some(m(&[&[1.0], &[2.0]]))).unwrap();
        let cols = gavme_columns(&single).unwrap();
        assert_eq!(cols.len(), 1);
        assert_eq!(cols[0].f().unwrap().as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn lift_scalar_and_single_column() {
        let s = GavmeInstance::new(m(&[&[1.0]]), m(&[&[2.0]]), Some(m(&[&[1.0]]))).unwrap();
        let lifted = lift_gavme(&s).unwrap();
        assert_eq!(lifted.a(), s.a());
        assert_eq!(lifted.b(), s.b());
        assert_eq!(lifted.f().unwrap().as_slice(), &[1.0]);

        let a = m(&[&[5.0, -1.0], &[-4.0, 4.0]]);
        let b = m(&[&[-0.5, 1.0], &[0.5, -2.0]]);
        let g = GavmeInstance::new(a.clone(), b.clone(), Some(m(&[&[3.0], &[-1.0]]))).unwrap();
        let lifted = lift_gavme(&g).unwrap();
        assert_eq!(lifted.a(), &a);
        assert_eq!(lifted.b(), &b);
    }

    #[test]
    fn lift_preserves_residual() {
        let g = gavme_3x3();
        let x = m(&[&[-3.0, 1.0, 2.0], &[0.5, -2.0, 1.0], &[-3.0, 2.0, -4.0]]);
        let lifted = lift_gavme(&g).unwrap();
        assert_eq!(lifted.order(), 9);
        assert!(lifted.residual(&vec(&x)).unwrap() <= 1e-12);
        assert_eq!(unvec(&vec(&x), 3, 3).unwrap(), x);
    }

    #[test]
    fn sylvester_lift_matches_direct_residual() {
        let a = m(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let b = m(&[&[0.5, 0.0], &[0.1, -0.3]]);
        let k = m(&[&[2.0, 1.0], &[0.0, 1.0]]);
        let l = m(&[&[1.0, 0.0], &[-1.0, 1.0]]);
        let x = m(&[&[1.0, -2.0], &[0.5, 3.0]]);
        let f = a.matmul(&x).matmul(&k).add(&b.matmul(&abs_elementwise(&x)).matmul(&l));
        let inst = SylvesterInstance::new(a, b, k, l, Some(f)).unwrap();
        assert!(inst.residual(&x).unwrap() <= 1e-12);
        let lifted = lift_sylvester(&inst, DEFAULT_KRON_CAP).unwrap();
        assert!(lifted.residual(&vec(&x)).unwrap() <= 1e-12);
    }
}
