//! Runs every checker that applies to an instance.

use super::{
    check_gavme_classic, check_gavme_spectral, check_interval_spectral, check_ngavme, check_sylvester_max,
    check_sylvester_min_corrected, check_sylvester_min_flawed, Certificate, CheckOptions, ConditionId, Verdict,
};
use crate::combinat::{check_gavme_dd_conditions, check_gavme_w_conditions, check_ngavme_combinatorial};
use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::matcore::{inverse_of, Matrix};

const GAVME_COMBINATORIAL: [ConditionId; 6] = [
    ConditionId::GavmeWI,
    ConditionId::GavmeWII,
    ConditionId::GavmeWIII,
    ConditionId::GavmeWIV,
    ConditionId::GavmeDdI,
    ConditionId::GavmeDdII,
];

const NGAVME_COMBINATORIAL: [ConditionId; 6] = [
    ConditionId::NgavmeWI,
    ConditionId::NgavmeWII,
    ConditionId::NgavmeWIII,
    ConditionId::NgavmeWIV,
    ConditionId::NgavmeDdI,
    ConditionId::NgavmeDdII,
];

/// NOT_CERTIFIED records for checks that could not run, e.g. past a cap.
fn skipped(ids: &[ConditionId], err: &Error) -> Vec<Certificate> {
    ids.iter()
        .map(|&id| match err {
            Error::SingularMatrix { which, .. } => {
                Certificate::inapplicable(id, format!("hypothesis failed: {which} is singular"))
            }
            _ => Certificate {
                condition_id: id,
                verdict: Verdict::NotCertified,
                witnesses: Default::default(),
                margin: None,
                notes: format!("skipped: {err}"),
            },
        })
        .collect()
}

fn collect(out: &mut Vec<Certificate>, ids: &[ConditionId], r: Result<Vec<Certificate>>) {
    match r {
        Ok(certs) => out.extend(certs),
        Err(e) => out.extend(skipped(ids, &e)),
    }
}

fn gavme_certificates(a: &Matrix, b: &Matrix, m: usize, opts: &CheckOptions) -> Vec<Certificate> {
    let mut out = vec![check_gavme_spectral(a, b, opts)];
    out.extend(check_gavme_classic(a, b, opts));
    collect(&mut out, &[ConditionId::IntervalSpectral], check_interval_spectral(a, b, m, opts).map(|c| vec![c]));
    let combinatorial = check_gavme_w_conditions(a, b, m, opts).and_then(|mut w| {
        w.extend(check_gavme_dd_conditions(a, b, m, opts)?);
        Ok(w)
    });
    collect(&mut out, &GAVME_COMBINATORIAL, combinatorial);
    out
}

/// Every applicable certificate for the instance, in a fixed order.
///
/// Checks that exceed an enumeration or Kronecker cap come back
/// NOT_CERTIFIED with a "skipped" note instead of failing the whole run.
pub fn check_instance(inst: &Instance, opts: &CheckOptions) -> Vec<Certificate> {
    match inst {
        Instance::Gave(g) => gavme_certificates(g.a(), g.b(), 1, opts),
        Instance::Gavme(g) => gavme_certificates(g.a(), g.b(), g.columns(), opts),
        Instance::Ngavme(g) => {
            let (a, b, c, m) = (g.a(), g.b(), g.c(), g.columns());
            let mut out = check_ngavme(a, b, c, opts);
            let interval = inverse_of(c, "C").and_then(|c_inv| {
                let cert = check_interval_spectral(&a.matmul(&c_inv), b, m, opts)?;
                Ok(vec![cert.with_note("evaluated on the reduced GAVME in Y = CX")])
            });
            collect(&mut out, &[ConditionId::IntervalSpectral], interval);
            collect(&mut out, &NGAVME_COMBINATORIAL, check_ngavme_combinatorial(a, b, c, m, opts));
            out
        }
        Instance::Sylvester(s) => {
            let (a, b, k, l) = (s.a(), s.b(), s.k(), s.l());
            vec![
                check_sylvester_max(a, b, k, l, opts),
                check_sylvester_min_corrected(a, b, k, l, opts),
                check_sylvester_min_flawed(a, b, k, l, opts),
            ]
        }
    }
}
