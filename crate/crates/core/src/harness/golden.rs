//! Regression suite over the published worked instances, embedded as
//! constants so it runs without any files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certify::{
    check_gavme_classic, check_gavme_spectral, check_ngavme, check_sylvester_min_corrected, check_sylvester_min_flawed,
    Certificate, CheckOptions, ConditionId, Verdict,
};
use crate::error::Result;
use crate::instances::{GaveInstance, GavmeInstance, NgavmeInstance};
use crate::matcore::{Matrix, Vector};
use crate::solve::{oracle_gave, oracle_gavme, solve_gavme, solve_ngavme, SolutionCount, SolveOptions, DEFAULT_ORACLE_CAP};

pub(crate) const PAIR_2X2_A: [[f64; 2]; 2] = [[5.0, -1.0], [-4.0, 4.0]];
pub(crate) const PAIR_2X2_B: [[f64; 2]; 2] = [[-0.5, 1.0], [0.5, -2.0]];

pub(crate) const GAVME_3X3_A: [[f64; 3]; 3] = [[2.0, -4.0, 0.0], [0.0, 1.2, 1.1], [-2.0, 0.8, 0.0]];
pub(crate) const GAVME_3X3_B: [[f64; 3]; 3] = [[1.0, -1.0, 0.0], [0.0, 1.0, 1.0], [-1.0, 0.0, 0.0]];
pub(crate) const GAVME_3X3_F: [[f64; 3]; 3] = [[-5.5, 9.0, 1.0], [0.8, 3.8, 1.8], [3.4, -4.6, -5.2]];
pub(crate) const GAVME_3X3_X: [[f64; 3]; 3] = [[-3.0, 1.0, 2.0], [0.5, -2.0, 1.0], [-3.0, 2.0, -4.0]];

pub(crate) const NGAVME_3X3_A: [[f64; 3]; 3] = [[-5.0, 2.0, 8.0], [1.0, 2.0, 3.0], [7.0, -5.0, 0.0]];
pub(crate) const NGAVME_3X3_B: [[f64; 3]; 3] = [[1.0, 2.0, 0.0], [0.0, 1.0, -1.0], [-1.0, 2.0, 0.0]];
pub(crate) const NGAVME_3X3_C: [[f64; 3]; 3] = [[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]];
pub(crate) const NGAVME_3X3_F: [[f64; 3]; 3] = [[14.0, -7.0, 19.0], [12.0, 4.0, 3.0], [1.0, 39.0, -12.0]];
pub(crate) const NGAVME_3X3_X: [[f64; 3]; 3] = [[2.0, 5.0, -1.0], [3.0, -2.0, 1.0], [1.0, 1.0, 1.0]];

pub(crate) fn mat<const N: usize>(rows: &[[f64; N]]) -> Matrix {
    Matrix::from_rows(rows).expect("embedded matrix is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenCheck {
    pub group: String,
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub tolerance: Option<f64>,
    pub passed: bool,
    /// Informational checks are reported but do not affect the outcome.
    pub gating: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExamplesReport {
    pub tolerance_override: Option<f64>,
    pub checks: Vec<GoldenCheck>,
}

impl ExamplesReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GoldenCheck> {
        self.checks.iter().filter(|c| c.gating && !c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let status = match (c.passed, c.gating) {
                (true, _) => "PASS",
                (false, true) => "FAIL",
                (false, false) => "INFO",
            };
            let tol = c.tolerance.map_or(String::new(), |t| format!(" (tol {t:e})"));
            let _ = write!(s, "{status} [{}] {}: computed {}, expected {}{tol}", c.group, c.name, c.computed, c.expected);
            if !c.note.is_empty() {
                let _ = write!(s, " -- {}", c.note);
            }
            s.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.gating && c.passed).count();
        let gating = self.checks.iter().filter(|c| c.gating).count();
        let _ = writeln!(s, "{passed}/{gating} golden checks passed");
        s
    }
}

struct Suite {
    tolerance_override: Option<f64>,
    checks: Vec<GoldenCheck>,
}

impl Suite {
    fn push(&mut self, group: &str, name: &str, expected: String, computed: String, tol: Option<f64>, passed: bool) -> &mut GoldenCheck {
        self.checks.push(GoldenCheck {
            group: group.into(),
            name: name.into(),
            expected,
            computed,
            tolerance: tol,
            passed,
            gating: true,
            note: String::new(),
        });
        self.checks.last_mut().unwrap()
    }

    /// Compares a computed value with a value printed to `decimals`
    /// places. The tolerance override applies here only.
    fn printed(&mut self, group: &str, name: &str, computed: Option<f64>, expected: f64, tol: f64, decimals: i32) {
        let tol = self.tolerance_override.unwrap_or(tol);
        let passed = computed.is_some_and(|c| (c - expected).abs() <= tol);
        let shown = computed.map_or("missing".to_string(), |c| format!("{c:.6}"));
        let half_unit = 0.5 * 10f64.powi(-decimals);
        let check = self.push(group, name, format!("{expected}"), shown, Some(tol), passed);
        if !passed && tol < half_unit {
            check.note = format!(
                "tolerance {tol:e} is finer than the printed precision ({half_unit:e}); tolerance misconfiguration"
            );
        }
    }

    fn exact(&mut self, group: &str, name: &str, computed: f64, expected: f64, tol: f64) {
        let passed = (computed - expected).abs() <= tol;
        self.push(group, name, format!("{expected}"), format!("{computed:.3e}"), Some(tol), passed);
    }

    fn at_most(&mut self, group: &str, name: &str, computed: f64, bound: f64) {
        self.push(group, name, format!("<= {bound:e}"), format!("{computed:.3e}"), Some(bound), computed <= bound);
    }

    fn verdict(&mut self, group: &str, cert: &Certificate, expected: Verdict) -> &mut GoldenCheck {
        let name = format!("{} verdict", cert.condition_id);
        self.push(group, &name, expected.to_string(), cert.verdict.to_string(), None, cert.verdict == expected)
    }

    fn count(&mut self, group: &str, name: &str, computed: SolutionCount, expected: SolutionCount) {
        self.push(group, name, expected.to_string(), computed.to_string(), None, computed == expected);
    }

    fn failed(&mut self, group: &str, name: &str, err: impl std::fmt::Display) {
        self.push(group, name, "no error".into(), format!("error: {err}"), None, false);
    }
}

fn find(certs: &[Certificate], id: ConditionId) -> &Certificate {
    certs.iter().find(|c| c.condition_id == id).expect("checker emits every id")
}

fn pair_2x2(s: &mut Suite, opts: &CheckOptions) {
    let g = "golden 2x2";
    let (a, b) = (mat(&PAIR_2X2_A), mat(&PAIR_2X2_B));
    let spectral = check_gavme_spectral(&a, &b, opts);
    let classic = check_gavme_classic(&a, &b, opts);
    s.printed(g, "rho(|A^-1 B|)", spectral.witness("rho_abs_AinvB"), 0.38826, 1e-4, 5);
    s.printed(g, "rho(|A^-1| |B|)", find(&classic, ConditionId::ClassicIII).witness("rho_absAinv_absB"), 1.0, 1e-4, 4);
    s.printed(g, "sigma_max(B)", find(&classic, ConditionId::ClassicII).witness("sigma_max_B"), 2.3354, 1e-3, 4);
    s.printed(g, "sigma_max(|B|)", find(&classic, ConditionId::ClassicI).witness("sigma_max_absB"), 2.3354, 1e-3, 4);
    s.printed(g, "sigma_min(A)", find(&classic, ConditionId::ClassicI).witness("sigma_min_A"), 2.1939, 1e-3, 4);
    s.verdict(g, &spectral, Verdict::Certified);
    for id in [ConditionId::ClassicI, ConditionId::ClassicII, ConditionId::ClassicIII] {
        s.verdict(g, find(&classic, id), Verdict::NotCertified);
    }
    // only three classic conditions are claimed to fail here; sigma_max(A^-1 B) is about 0.3999
    let iv = s.verdict(g, find(&classic, ConditionId::ClassicIV), Verdict::NotCertified);
    iv.gating = false;
    iv.note = "not claimed for this pair; sigma_max(A^-1 B) < 1 holds".into();
}

fn gavme_3x3(s: &mut Suite, opts: &CheckOptions) {
    let g = "golden 3x3 GAVME";
    let (a, b) = (mat(&GAVME_3X3_A), mat(&GAVME_3X3_B));
    let spectral = check_gavme_spectral(&a, &b, opts);
    let classic = check_gavme_classic(&a, &b, opts);
    s.printed(g, "rho(|A^-1 B|)", spectral.witness("rho_abs_AinvB"), 0.9091, 1e-4, 4);
    s.printed(g, "sigma_max(A^-1 B)", find(&classic, ConditionId::ClassicIV).witness("sigma_max_AinvB"), 1.0885, 1e-3, 4);
    s.printed(g, "sigma_max(|B|)", find(&classic, ConditionId::ClassicI).witness("sigma_max_absB"), 1.8019, 1e-3, 4);
    s.printed(g, "sigma_max(B)", find(&classic, ConditionId::ClassicII).witness("sigma_max_B"), 1.8019, 1e-3, 4);
    s.printed(g, "sigma_min(A)", find(&classic, ConditionId::ClassicI).witness("sigma_min_A"), 0.9038, 1e-3, 4);
    s.verdict(g, &spectral, Verdict::Certified);
    for id in [ConditionId::ClassicI, ConditionId::ClassicII, ConditionId::ClassicIV] {
        s.verdict(g, find(&classic, id), Verdict::NotCertified);
    }

    let inst = GavmeInstance::new(a, b, Some(mat(&GAVME_3X3_F))).expect("embedded instance is valid");
    match solve_gavme(&inst, &SolveOptions::default()) {
        Ok(r) => {
            s.at_most(g, "solve residual", r.final_residual, 1e-8);
            s.at_most(g, "solve error vs printed X", r.solution.sub(&mat(&GAVME_3X3_X)).max_abs(), 1e-8);
        }
        Err(e) => s.failed(g, "solve", e),
    }
    match oracle_gavme(&inst, DEFAULT_ORACLE_CAP) {
        Ok(reports) => {
            for (j, r) in reports.iter().enumerate() {
                s.count(g, &format!("oracle count column {}", j + 1), r.solution_count, SolutionCount::Finite(1));
            }
        }
        Err(e) => s.failed(g, "oracle", e),
    }
}

fn ngavme_3x3(s: &mut Suite, opts: &CheckOptions) {
    let g = "golden 3x3 NGAVME";
    let (a, b, c) = (mat(&NGAVME_3X3_A), mat(&NGAVME_3X3_B), mat(&NGAVME_3X3_C));
    let certs = check_ngavme(&a, &b, &c, opts);
    let sigma = find(&certs, ConditionId::NgavmeSigma);
    let rho = find(&certs, ConditionId::NgavmeRho);
    let coro = find(&certs, ConditionId::NgavmeCoro);
    s.printed(g, "sigma_max(C A^-1 B)", sigma.witness("sigma_max_CAinvB"), 0.90873, 1e-3, 5);
    s.printed(g, "rho(|C A^-1 B|)", rho.witness("rho_abs_CAinvB"), 0.70285, 1e-3, 5);
    s.printed(g, "sigma_min(B^-1 A C^-1)", coro.witness("sigma_min_BinvACinv"), 1.1004, 1e-3, 4);
    for cert in [sigma, rho, coro] {
        s.verdict(g, cert, Verdict::Certified);
    }
    let inst = NgavmeInstance::new(a, b, c, Some(mat(&NGAVME_3X3_F))).expect("embedded instance is valid");
    match solve_ngavme(&inst, &SolveOptions::default()) {
        Ok(r) => {
            s.at_most(g, "solve residual", r.final_residual, 1e-8);
            s.at_most(g, "solve error vs printed X", r.solution.sub(&mat(&NGAVME_3X3_X)).max_abs(), 1e-8);
        }
        Err(e) => s.failed(g, "solve", e),
    }
}

fn scalar_counterexample(s: &mut Suite, opts: &CheckOptions) {
    let g = "scalar counterexample";
    let (a, b, one) = (mat(&[[1.0]]), mat(&[[2.0]]), mat(&[[1.0]]));
    let flawed = check_sylvester_min_flawed(&a, &b, &one, &one, opts);
    let corrected = check_sylvester_min_corrected(&a, &b, &one, &one, opts);
    s.exact(g, "flawed product", flawed.witness("product").unwrap_or(f64::NAN), 2.0, 1e-12);
    s.verdict(g, &flawed, Verdict::UnsoundConditionHolds);
    s.exact(g, "corrected product", corrected.witness("product").unwrap_or(f64::NAN), 0.5, 1e-12);
    s.verdict(g, &corrected, Verdict::NotCertified);

    for (f, expected) in [(1.0, vec![1.0 / 3.0, -1.0]), (-1.0, vec![])] {
        let inst = GaveInstance::new(a.clone(), b.clone(), Some(Vector::new(vec![f]).unwrap())).unwrap();
        match oracle_gave(&inst, DEFAULT_ORACLE_CAP) {
            Ok(r) => {
                s.count(g, &format!("oracle count f = {f}"), r.solution_count, SolutionCount::Finite(expected.len()));
                let got: Vec<f64> = r.solutions.iter().map(|x| x[0]).collect();
                let close = got.len() == expected.len() && got.iter().zip(&expected).all(|(x, y)| (x - y).abs() <= 1e-12);
                let show = |v: &[f64]| format!("{v:?}");
                s.push(g, &format!("oracle solutions f = {f}"), show(&expected), show(&got), Some(1e-12), close);
            }
            Err(e) => s.failed(g, "oracle", e),
        }
    }
}

/// Runs every golden check at the built-in tolerances.
pub fn run_paper_examples() -> ExamplesReport {
    run_paper_examples_with(None)
}

/// As [`run_paper_examples`], with `tolerance` replacing the tolerance of
/// every comparison against a printed value.
pub fn run_paper_examples_with(tolerance: Option<f64>) -> ExamplesReport {
    let opts = CheckOptions::default();
    let mut s = Suite { tolerance_override: tolerance, checks: Vec::new() };
    pair_2x2(&mut s, &opts);
    gavme_3x3(&mut s, &opts);
    ngavme_3x3(&mut s, &opts);
    scalar_counterexample(&mut s, &opts);
    ExamplesReport { tolerance_override: tolerance, checks: s.checks }
}
