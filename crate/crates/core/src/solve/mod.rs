//! Picard iteration `x ← A⁻¹(f − B|x|)`, the column-wise GAVME driver,
//! the NGAVME driver through `Y = CX`, and the sign-pattern oracle.

mod oracle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{check_gavme_spectral, CheckOptions, ConditionId};
use crate::error::{Error, Result};
use crate::instances::{gavme_columns, reduce_ngavme, GaveInstance, GavmeInstance, NgavmeInstance};
use crate::matcore::{Lu, Matrix, Vector};

pub use oracle::{
    format_short, gavme_solution_count, oracle_gave, oracle_gavme, OracleReport, SolutionCount, DEFAULT_ORACLE_CAP,
};

/// Largest order for which `solve_gavme` retries a failed column with
/// the oracle.
pub const ORACLE_FALLBACK_MAX_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Stop when `||x_{k+1} − x_k||_∞ ≤ step_tolerance · max(1, ||x_{k+1}||_∞)`.
    pub step_tolerance: f64,
    pub residual_tolerance: f64,
    /// Starting point for every column; zero when absent.
    pub initial_point: Option<Vector>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_iterations: 10_000, step_tolerance: 1e-12, residual_tolerance: 1e-10, initial_point: None }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions("max_iterations must be at least 1".into()));
        }
        for (name, v) in [("step_tolerance", self.step_tolerance), ("residual_tolerance", self.residual_tolerance)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidOptions(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// `n × m`; a GAVE solution is a single column.
    pub solution: Matrix,
    /// Largest iteration count over the columns.
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub certificate_used: Option<ConditionId>,
}

/// Iterates `x_{k+1} = A⁻¹(f − B|x_k|)`.
///
/// Hitting the iteration cap is not an error; the result comes back with
/// `converged = false` and the last iterate.
pub fn solve_gave_picard(inst: &GaveInstance, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    let f = inst.rhs()?;
    let (a, b) = (inst.a(), inst.b());
    let n = inst.order();
    let lu = Lu::new(a);
    if lu.is_singular() {
        return Err(Error::singular("A", lu.min_pivot(), lu.threshold()));
    }
    let mut x = match &opts.initial_point {
        Some(x0) if x0.len() != n => {
            return Err(Error::DimensionMismatch(format!("initial point must have length {n}, got {}", x0.len())));
        }
        Some(x0) => x0.clone(),
        None => Vector::zeros(n),
    };

    let finish = |x: Vector, iterations: usize| -> Result<SolveResult> {
        let final_residual = inst.residual(&x)?;
        Ok(SolveResult {
            converged: final_residual <= opts.residual_tolerance,
            solution: Matrix::column(&x),
            iterations,
            final_residual,
            certificate_used: None,
        })
    };

    if b.max_abs() == 0.0 {
        return finish(lu.solve(f)?, 1);
    }
    // residual level reachable in floating point
    let norms = a.norm_inf() + b.norm_inf();
    for k in 1..=opts.max_iterations {
        let next = lu.solve(&f.sub(&b.mul_vec(&x.abs())))?;
        if !next.is_finite() {
            let mut r = finish(x, k)?;
            r.converged = false;
            return Ok(r);
        }
        let step = next.sub(&x).norm_inf();
        x = next;
        let scale = x.norm_inf().max(1.0);
        let floor = 64.0 * f64::EPSILON * (norms * scale + f.norm_inf());
        if step <= opts.step_tolerance * scale || inst.residual(&x)? <= floor {
            return finish(x, k);
        }
    }
    finish(x, opts.max_iterations)
}

fn column_error(index: usize, e: Error) -> Error {
    Error::Column { index, source: Box::new(e) }
}

/// Solves one GAVE column, falling back to the oracle for small orders.
fn solve_column(col: &GaveInstance, opts: &SolveOptions) -> Result<SolveResult> {
    let picard = solve_gave_picard(col, opts)?;
    if picard.converged || col.order() > ORACLE_FALLBACK_MAX_ORDER {
        return Ok(picard);
    }
    let census = oracle_gave(col, 1 << ORACLE_FALLBACK_MAX_ORDER)?;
    match census.unique_solution() {
        Some(x) => {
            let final_residual = col.residual(x)?;
            Ok(SolveResult {
                solution: Matrix::column(x),
                iterations: picard.iterations,
                final_residual,
                converged: final_residual <= opts.residual_tolerance,
                certificate_used: None,
            })
        }
        None => Ok(picard),
    }
}

fn assemble(columns: Vec<SolveResult>, n: usize) -> (Matrix, usize, bool) {
    let m = columns.len();
    let x = Matrix::from_fn(n, m, |i, j| columns[j].solution[(i, 0)]);
    let iterations = columns.iter().map(|c| c.iterations).max().unwrap_or(0);
    let converged = columns.iter().all(|c| c.converged);
    (x, iterations, converged)
}

/// Solves `AX + B|X| = F` one column at a time.
///
/// When `ρ(|A⁻¹B|) < 1` is certified the iteration must converge, so a
/// column that still fails is reported as `NonConvergence`.
pub fn solve_gavme(inst: &GavmeInstance, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    let cols = gavme_columns(inst)?;
    let results: Vec<SolveResult> = cols
        .par_iter()
        .enumerate()
        .map(|(j, col)| solve_column(col, opts).map_err(|e| column_error(j, e)))
        .collect::<Result<_>>()?;
    let certified = check_gavme_spectral(inst.a(), inst.b(), &CheckOptions::default()).is_certified();
    if certified {
        if let Some(j) = results.iter().position(|r| !r.converged) {
            return Err(column_error(
                j,
                Error::NonConvergence { what: "Picard iteration under a spectral certificate".into(), iterations: results[j].iterations },
            ));
        }
    }
    let (solution, iterations, columns_ok) = assemble(results, inst.order());
    let final_residual = inst.residual(&solution)?;
    Ok(SolveResult {
        converged: columns_ok && final_residual <= opts.residual_tolerance,
        solution,
        iterations,
        final_residual,
        certificate_used: certified.then_some(ConditionId::Spectral),
    })
}

/// Single-column convenience wrapper around [`solve_gavme`].
pub fn solve_gave(inst: &GaveInstance, opts: &SolveOptions) -> Result<SolveResult> {
    let f = Matrix::column(inst.rhs()?);
    solve_gavme(&GavmeInstance::new(inst.a().clone(), inst.b().clone(), Some(f))?, opts)
}

/// Solves `AX + B|CX| = F` through the GAVME in `Y = CX`, then maps back.
/// The reduced spectral certificate is `ρ(|CA⁻¹B|) < 1`.
pub fn solve_ngavme(inst: &NgavmeInstance, opts: &SolveOptions) -> Result<SolveResult> {
    let (reduced, back) = reduce_ngavme(inst)?;
    if Lu::new(inst.a()).is_singular() {
        let lu = Lu::new(inst.a());
        return Err(Error::singular("A", lu.min_pivot(), lu.threshold()));
    }
    let y = solve_gavme(&reduced, opts)?;
    let solution = back.apply(&y.solution);
    let final_residual = inst.residual(&solution)?;
    Ok(SolveResult {
        converged: y.converged && final_residual <= opts.residual_tolerance,
        solution,
        iterations: y.iterations,
        final_residual,
        certificate_used: y.certificate_used.map(|_| ConditionId::NgavmeRho),
    })
}
