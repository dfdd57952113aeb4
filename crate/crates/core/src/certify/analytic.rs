//! Spectral radius and singular value certifiers.

use super::{Certificate, CheckOptions, ConditionId, Verdict};
use crate::error::{Error, Result};
use crate::matcore::{abs_elementwise, inverse_of, sigma_max, sigma_min, spectral_radius, Lu, Matrix};

/// Runs a check, folding a failed invertibility hypothesis into an
/// INAPPLICABLE certificate and numerical failures into NOT_CERTIFIED.
fn guarded(id: ConditionId, check: impl FnOnce() -> Result<Certificate>) -> Certificate {
    match check() {
        Ok(cert) => cert,
        Err(Error::SingularMatrix { which, .. }) => {
            Certificate::inapplicable(id, format!("hypothesis failed: {which} is singular"))
        }
        Err(e) => Certificate {
            condition_id: id,
            verdict: Verdict::NotCertified,
            witnesses: Default::default(),
            margin: None,
            notes: format!("evaluation failed: {e}"),
        },
    }
}

fn require_regular(m: &Matrix, name: &str) -> Result<()> {
    let lu = Lu::new(m);
    if lu.is_singular() {
        Err(Error::SingularMatrix {
            which: name.to_string(),
            pivot: lu.min_pivot(),
            threshold: lu.threshold(),
        })
    } else {
        Ok(())
    }
}

/// ρ(|A⁻¹B|) < 1.
pub fn check_gavme_spectral(a: &Matrix, b: &Matrix, opts: &CheckOptions) -> Certificate {
    guarded(ConditionId::Spectral, || {
        let a_inv = inverse_of(a, "A")?;
        let rho = spectral_radius(&abs_elementwise(&a_inv.matmul(b)))?;
        Ok(Certificate::from_margin(
            ConditionId::Spectral,
            1.0 - rho,
            opts.decision_tol,
            &[("rho_abs_AinvB", rho)],
        ))
    })
}

/// `σmax(lhs) < σmin(coef)` with `coef` required nonsingular.
fn sigma_gap(
    id: ConditionId,
    lhs: &Matrix,
    lhs_name: &str,
    coef: &Matrix,
    coef_name: &str,
    tol: f64,
) -> Result<Certificate> {
    let smax = sigma_max(lhs)?;
    let smin = sigma_min(coef)?;
    let cert = Certificate::from_margin(id, smin - smax, tol, &[(lhs_name, smax), (coef_name, smin)]);
    if Lu::new(coef).is_singular() {
        Ok(Certificate {
            verdict: Verdict::NotCertified,
            ..cert
        }
        .with_note("coefficient matrix is numerically singular"))
    } else {
        Ok(cert)
    }
}

/// The four classical GAVME conditions CLASSIC_I..CLASSIC_IV.
pub fn check_gavme_classic(a: &Matrix, b: &Matrix, opts: &CheckOptions) -> Vec<Certificate> {
    let tol = opts.decision_tol;
    let abs_b = abs_elementwise(b);
    let a_inv = inverse_of(a, "A");
    vec![
        guarded(ConditionId::ClassicI, || {
            sigma_gap(ConditionId::ClassicI, &abs_b, "sigma_max_absB", a, "sigma_min_A", tol)
        }),
        guarded(ConditionId::ClassicII, || {
            sigma_gap(ConditionId::ClassicII, b, "sigma_max_B", a, "sigma_min_A", tol)
        }),
        guarded(ConditionId::ClassicIII, || {
            let a_inv = a_inv.as_ref().map_err(clone_singular)?;
            let rho = spectral_radius(&abs_elementwise(a_inv).matmul(&abs_b))?;
            Ok(Certificate::from_margin(
                ConditionId::ClassicIII,
                1.0 - rho,
                tol,
                &[("rho_absAinv_absB", rho)],
            ))
        }),
        guarded(ConditionId::ClassicIV, || {
            let a_inv = a_inv.as_ref().map_err(clone_singular)?;
            let s = sigma_max(&a_inv.matmul(b))?;
            Ok(Certificate::from_margin(
                ConditionId::ClassicIV,
                1.0 - s,
                tol,
                &[("sigma_max_AinvB", s)],
            ))
        }),
    ]
}

fn clone_singular(e: &Error) -> Error {
    match e {
        Error::SingularMatrix {
            which,
            pivot,
            threshold,
        } => Error::SingularMatrix {
            which: which.clone(),
            pivot: *pivot,
            threshold: *threshold,
        },
        other => Error::DimensionMismatch(other.to_string()),
    }
}

/// NGAVME conditions through the reduction `Y = CX`:
/// NGAVME_I..IV, NGAVME_RHO, NGAVME_SIGMA and NGAVME_CORO.
pub fn check_ngavme(a: &Matrix, b: &Matrix, c: &Matrix, opts: &CheckOptions) -> Vec<Certificate> {
    let tol = opts.decision_tol;
    let abs_b = abs_elementwise(b);
    let a_inv = inverse_of(a, "A");
    let c_inv = inverse_of(c, "C");
    // AC⁻¹ and CA⁻¹B only exist when the respective inverses do
    let a_c_inv = c_inv.as_ref().map(|ci| a.matmul(ci)).map_err(clone_singular);
    let c_a_inv = a_inv.as_ref().map(|ai| c.matmul(ai)).map_err(clone_singular);
    let c_a_inv_b = c_a_inv.as_ref().map(|m| m.matmul(b)).map_err(clone_singular);

    vec![
        guarded(ConditionId::NgavmeI, || {
            let coef = a_c_inv.as_ref().map_err(clone_singular)?;
            sigma_gap(ConditionId::NgavmeI, &abs_b, "sigma_max_absB", coef, "sigma_min_ACinv", tol)
        }),
        guarded(ConditionId::NgavmeII, || {
            let coef = a_c_inv.as_ref().map_err(clone_singular)?;
            sigma_gap(ConditionId::NgavmeII, b, "sigma_max_B", coef, "sigma_min_ACinv", tol)
        }),
        guarded(ConditionId::NgavmeIII, || {
            let m = c_a_inv.as_ref().map_err(clone_singular)?;
            let rho = spectral_radius(&abs_elementwise(m).matmul(&abs_b))?;
            Ok(Certificate::from_margin(
                ConditionId::NgavmeIII,
                1.0 - rho,
                tol,
                &[("rho_absCAinv_absB", rho)],
            ))
        }),
        guarded(ConditionId::NgavmeIV, || {
            let m = c_a_inv_b.as_ref().map_err(clone_singular)?;
            let s = sigma_max(m)?;
            Ok(Certificate::from_margin(
                ConditionId::NgavmeIV,
                1.0 - s,
                tol,
                &[("sigma_max_CAinvB", s)],
            ))
        }),
        guarded(ConditionId::NgavmeRho, || {
            let m = c_a_inv_b.as_ref().map_err(clone_singular)?;
            let rho = spectral_radius(&abs_elementwise(m))?;
            Ok(Certificate::from_margin(
                ConditionId::NgavmeRho,
                1.0 - rho,
                tol,
                &[("rho_abs_CAinvB", rho)],
            ))
        }),
        guarded(ConditionId::NgavmeSigma, || {
            let m = c_a_inv_b.as_ref().map_err(clone_singular)?;
            let s = sigma_max(m)?;
            Ok(Certificate::from_margin(
                ConditionId::NgavmeSigma,
                1.0 - s,
                tol,
                &[("sigma_max_CAinvB", s)],
            )
            .with_note("bounds rho((I ⊗ CA^-1 B)D) for every diagonal D with entries in [-1, 1]"))
        }),
        guarded(ConditionId::NgavmeCoro, || {
            let b_inv = inverse_of(b, "B")?;
            let coef = a_c_inv.as_ref().map_err(clone_singular)?;
            let s = sigma_min(&b_inv.matmul(coef))?;
            Ok(Certificate::from_margin(
                ConditionId::NgavmeCoro,
                s - 1.0,
                tol,
                &[("sigma_min_BinvACinv", s)],
            ))
        }),
    ]
}

/// σmax(LK⁻¹)·σmax(A⁻¹B) < 1, requiring A and K nonsingular.
pub fn check_sylvester_max(a: &Matrix, b: &Matrix, k: &Matrix, l: &Matrix, opts: &CheckOptions) -> Certificate {
    guarded(ConditionId::SylvesterMax, || {
        let a_inv = inverse_of(a, "A")?;
        let k_inv = inverse_of(k, "K")?;
        let s_lk = sigma_max(&l.matmul(&k_inv))?;
        let s_ab = sigma_max(&a_inv.matmul(b))?;
        let product = s_lk * s_ab;
        Ok(Certificate::from_margin(
            ConditionId::SylvesterMax,
            1.0 - product,
            opts.decision_tol,
            &[("sigma_max_LKinv", s_lk), ("sigma_max_AinvB", s_ab), ("product", product)],
        ))
    })
}

/// σmin(KL⁻¹)·σmin(B⁻¹A) > 1, requiring B and L nonsingular.
pub fn check_sylvester_min_corrected(
    a: &Matrix,
    b: &Matrix,
    k: &Matrix,
    l: &Matrix,
    opts: &CheckOptions,
) -> Certificate {
    guarded(ConditionId::SylvesterMinCorrected, || {
        let b_inv = inverse_of(b, "B")?;
        let l_inv = inverse_of(l, "L")?;
        let s_kl = sigma_min(&k.matmul(&l_inv))?;
        let s_ba = sigma_min(&b_inv.matmul(a))?;
        let product = s_kl * s_ba;
        let cert = Certificate::from_margin(
            ConditionId::SylvesterMinCorrected,
            product - 1.0,
            opts.decision_tol,
            &[("sigma_min_KLinv", s_kl), ("sigma_min_BinvA", s_ba), ("product", product)],
        );
        // a positive product already forces A and K regular; guard against noise
        if cert.is_certified() {
            require_regular(a, "A")?;
            require_regular(k, "K")?;
        }
        Ok(cert)
    })
}

/// σmin(LK⁻¹)·σmin(A⁻¹B) > 1. This condition does not imply uniqueness:
/// the scalar equation `x + 2|x| = 1` satisfies it with two solutions.
/// It therefore never certifies; when it holds the verdict is
/// UNSOUND_CONDITION_HOLDS.
pub fn check_sylvester_min_flawed(
    a: &Matrix,
    b: &Matrix,
    k: &Matrix,
    l: &Matrix,
    opts: &CheckOptions,
) -> Certificate {
    guarded(ConditionId::SylvesterMinFlawed, || {
        let a_inv = inverse_of(a, "A")?;
        let k_inv = inverse_of(k, "K")?;
        let s_lk = sigma_min(&l.matmul(&k_inv))?;
        let s_ab = sigma_min(&a_inv.matmul(b))?;
        let product = s_lk * s_ab;
        let cert = Certificate::from_margin(
            ConditionId::SylvesterMinFlawed,
            product - 1.0,
            opts.decision_tol,
            &[("sigma_min_LKinv", s_lk), ("sigma_min_AinvB", s_ab), ("product", product)],
        );
        Ok(if cert.verdict == Verdict::UnsoundConditionHolds {
            cert.with_note(
                "unsound condition: the scalar equation x + 2|x| = 1 satisfies it yet has two solutions \
                 (and x + 2|x| = -1 has none); not a uniqueness certificate",
            )
        } else {
            cert
        })
    })
}
