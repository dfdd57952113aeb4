//! Exhaustive sign-pattern census: `|x| = diag(d) x` for some
//! `d ∈ {−1, +1}ⁿ`, so every solution solves one of the `2ⁿ` linear
//! systems `(A + B diag(d)) x = f` with matching signs.

use std::fmt;

use rayon::prelude::*;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instances::{gavme_columns, GaveInstance, GavmeInstance};
use crate::matcore::{least_squares, Lu, Matrix, Vector};

/// Hard cap on the number of linear systems per census.
pub const DEFAULT_ORACLE_CAP: u64 = 1 << 20;

const SIGN_SLACK: f64 = 1e-10;
const DEDUP_TOL: f64 = 1e-8;
const CONSISTENCY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionCount {
    Finite(usize),
    Infinite,
}

impl SolutionCount {
    pub fn is_unique(self) -> bool {
        self == SolutionCount::Finite(1)
    }

    /// Number of solutions of a system whose independent parts have these
    /// counts. Zero anywhere wins over infinity.
    pub fn product(counts: impl IntoIterator<Item = SolutionCount>) -> SolutionCount {
        let mut infinite = false;
        let mut total: usize = 1;
        for c in counts {
            match c {
                SolutionCount::Finite(0) => return SolutionCount::Finite(0),
                SolutionCount::Finite(k) => total = total.saturating_mul(k),
                SolutionCount::Infinite => infinite = true,
            }
        }
        if infinite {
            SolutionCount::Infinite
        } else {
            SolutionCount::Finite(total)
        }
    }
}

impl fmt::Display for SolutionCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionCount::Finite(k) => write!(f, "{k}"),
            SolutionCount::Infinite => f.write_str("INFINITE"),
        }
    }
}

impl Serialize for SolutionCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SolutionCount::Finite(k) => s.serialize_u64(*k as u64),
            SolutionCount::Infinite => s.serialize_str("INFINITE"),
        }
    }
}

impl<'de> Deserialize<'de> for SolutionCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct CountVisitor;
        impl Visitor<'_> for CountVisitor {
            type Value = SolutionCount;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer or \"INFINITE\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Ok(SolutionCount::Finite(v as usize))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                if v == "INFINITE" {
                    Ok(SolutionCount::Infinite)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(CountVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub solution_count: SolutionCount,
    /// Ordered by the first sign pattern producing each solution.
    pub solutions: Vec<Vector>,
    /// Patterns `d` (entries ±1) where `A + B diag(d)` was singular.
    pub degenerate_patterns: Vec<Vec<i8>>,
    pub consistent_singular: bool,
}

impl OracleReport {
    pub fn unique_solution(&self) -> Option<&Vector> {
        if self.solution_count.is_unique() {
            self.solutions.first()
        } else {
            None
        }
    }

    /// One-line census, e.g. `2 solutions: 0.333333, -1`.
    pub fn census(&self) -> String {
        let fmt_vec = |v: &Vector| {
            let parts: Vec<String> = v.as_slice().iter().map(|x| format_short(*x)).collect();
            if parts.len() == 1 {
                parts[0].clone()
            } else {
                format!("({})", parts.join(", "))
            }
        };
        match self.solution_count {
            SolutionCount::Infinite => "INFINITE solutions (singular consistent pattern)".to_string(),
            SolutionCount::Finite(0) => "0 solutions".to_string(),
            SolutionCount::Finite(k) => {
                let list: Vec<String> = self.solutions.iter().map(fmt_vec).collect();
                let noun = if k == 1 { "solution" } else { "solutions" };
                format!("{k} {noun}: {}", list.join(", "))
            }
        }
    }
}

/// Six significant digits without trailing zeros.
pub fn format_short(x: f64) -> String {
    let x = if x.abs() < 5e-13 { 0.0 } else { x };
    let s = format!("{:.6}", x);
    let s = if x != 0.0 && x.abs() < 1e-4 { format!("{x:.6e}") } else { s };
    if s.contains('e') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".to_string() } else { t.to_string() }
}

/// Pattern number `k`: entry 0 is the most significant bit, bit 0 means +1.
fn pattern(k: u64, n: usize) -> Vec<i8> {
    (0..n).map(|i| if (k >> (n - 1 - i)) & 1 == 1 { -1 } else { 1 }).collect()
}

enum Outcome {
    Solution(Vector),
    Degenerate { consistent: bool, d: Vec<i8> },
}

fn pattern_outcome(a: &Matrix, b: &Matrix, f: &Vector, d: Vec<i8>) -> Result<Option<Outcome>> {
    let signs: Vec<f64> = d.iter().map(|&s| s as f64).collect();
    let m = a.add(&b.mul_diag(&signs));
    let lu = Lu::new(&m);
    if lu.is_singular() {
        let (x, r) = least_squares(&m, f)?;
        let scale = 1.0 + f.norm_inf() + m.norm_inf() * x.norm_inf();
        return Ok(Some(Outcome::Degenerate { consistent: r <= CONSISTENCY_RTOL * scale, d }));
    }
    let x = lu.solve(f)?;
    let slack = SIGN_SLACK * (1.0 + x.norm_inf());
    if x.as_slice().iter().zip(&signs).all(|(xi, si)| si * xi >= -slack) {
        Ok(Some(Outcome::Solution(x)))
    } else {
        Ok(None)
    }
}

/// Solution census of `Ax + B|x| = f`. A singular pattern whose system is
/// consistent makes the count INFINITE; this is conservative, since the
/// affine solution set need not meet the pattern's orthant.
pub fn oracle_gave(inst: &GaveInstance, cap: u64) -> Result<OracleReport> {
    let f = inst.rhs()?;
    let n = inst.order();
    let count: u128 = if n >= 127 { u128::MAX } else { 1u128 << n };
    if count > cap as u128 {
        return Err(Error::overflow("sign-pattern enumeration (2^n systems)", count, cap as u128));
    }
    let (a, b) = (inst.a(), inst.b());
    let outcomes: Vec<Outcome> = (0..count as u64)
        .into_par_iter()
        .map(|k| pattern_outcome(a, b, f, pattern(k, n)))
        .filter_map(|r| r.transpose())
        .collect::<Result<_>>()?;

    let mut solutions: Vec<Vector> = Vec::new();
    let mut degenerate_patterns = Vec::new();
    let mut consistent_singular = false;
    for o in outcomes {
        match o {
            Outcome::Solution(x) => {
                if !solutions.iter().any(|s| s.sub(&x).norm_inf() < DEDUP_TOL) {
                    solutions.push(x);
                }
            }
            Outcome::Degenerate { consistent, d } => {
                consistent_singular |= consistent;
                degenerate_patterns.push(d);
            }
        }
    }
    let solution_count = if consistent_singular {
        SolutionCount::Infinite
    } else {
        SolutionCount::Finite(solutions.len())
    };
    Ok(OracleReport { solution_count, solutions, degenerate_patterns, consistent_singular })
}

/// One census per column of `F`.
pub fn oracle_gavme(inst: &GavmeInstance, cap: u64) -> Result<Vec<OracleReport>> {
    gavme_columns(inst)?
        .iter()
        .enumerate()
        .map(|(j, col)| oracle_gave(col, cap).map_err(|e| Error::Column { index: j, source: Box::new(e) }))
        .collect()
}

/// Solution count of the whole GAVME from its column censuses.
pub fn gavme_solution_count(reports: &[OracleReport]) -> SolutionCount {
    SolutionCount::product(reports.iter().map(|r| r.solution_count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64, b: f64, f: f64) -> GaveInstance {
        GaveInstance::new(
            Matrix::from_rows(&[[a]]).unwrap(),
            Matrix::from_rows(&[[b]]).unwrap(),
            Some(Vector::new(vec![f]).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn scalar_two_solutions_then_none() {
        let r = oracle_gave(&scalar(1.0, 2.0, 1.0), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.solution_count, SolutionCount::Finite(2));
        assert!((r.solutions[0][0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.solutions[1][0] + 1.0).abs() < 1e-12);
        assert_eq!(r.census(), "2 solutions: 0.333333, -1");

        let r = oracle_gave(&scalar(1.0, 2.0, -1.0), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.solution_count, SolutionCount::Finite(0));
        assert!(r.solutions.is_empty());
    }

    #[test]
    fn decoupled_pair() {
        let inst = GaveInstance::new(
            Matrix::identity(2),
            Matrix::identity(2).scale(0.5),
            Some(Vector::new(vec![1.0, -1.0]).unwrap()),
        )
        .unwrap();
        let r = oracle_gave(&inst, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.solution_count, SolutionCount::Finite(1));
        let x = r.unique_solution().unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-12 && (x[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_component_is_deduplicated() {
        // x = 0 solves both sign patterns of x + 0.5|x| = 0
        let r = oracle_gave(&scalar(1.0, 0.5, 0.0), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.solution_count, SolutionCount::Finite(1));
    }

    #[test]
    fn consistent_singular_is_infinite() {
        // x − |x| = 0 holds for every x ≥ 0
        let r = oracle_gave(&scalar(1.0, -1.0, 0.0), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.solution_count, SolutionCount::Infinite);
        assert!(r.consistent_singular);
        assert_eq!(r.degenerate_patterns, vec![vec![1]]);
        // inconsistent singular pattern: x − |x| = 1 has no solution
        let r = oracle_gave(&scalar(1.0, -1.0, 1.0), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.solution_count, SolutionCount::Finite(0));
        assert_eq!(r.degenerate_patterns.len(), 1);
        assert!(!r.consistent_singular);
    }

    #[test]
    fn overflow() {
        let inst = GaveInstance::new(Matrix::identity(3), Matrix::zeros(3, 3), Some(Vector::zeros(3))).unwrap();
        assert!(matches!(oracle_gave(&inst, 4), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn product_counts() {
        use SolutionCount::*;
        assert_eq!(SolutionCount::product([Finite(2), Finite(0)]), Finite(0));
        assert_eq!(SolutionCount::product([Finite(2), Finite(3)]), Finite(6));
        assert_eq!(SolutionCount::product([Infinite, Finite(1)]), Infinite);
        assert_eq!(SolutionCount::product([Infinite, Finite(0)]), Finite(0));
    }

    #[test]
    fn two_column_scalar_census() {
        let inst = GavmeInstance::new(
            Matrix::identity(1),
            Matrix::identity(1).scale(2.0),
            Some(Matrix::from_rows(&[[1.0, -1.0]]).unwrap()),
        )
        .unwrap();
        let reports = oracle_gavme(&inst, DEFAULT_ORACLE_CAP).unwrap();
        let counts: Vec<_> = reports.iter().map(|r| r.solution_count).collect();
        assert_eq!(counts, vec![SolutionCount::Finite(2), SolutionCount::Finite(0)]);
        assert_eq!(gavme_solution_count(&reports), SolutionCount::Finite(0));
    }

    #[test]
    fn count_json() {
        assert_eq!(serde_json::to_string(&SolutionCount::Infinite).unwrap(), "\"INFINITE\"");
        assert_eq!(serde_json::to_string(&SolutionCount::Finite(2)).unwrap(), "2");
        let back: SolutionCount = serde_json::from_str("\"INFINITE\"").unwrap();
        assert_eq!(back, SolutionCount::Infinite);
        let back: SolutionCount = serde_json::from_str("3").unwrap();
        assert_eq!(back, SolutionCount::Finite(3));
    }

    #[test]
    fn short_format() {
        assert_eq!(format_short(1.0 / 3.0), "0.333333");
        assert_eq!(format_short(-1.0), "-1");
        assert_eq!(format_short(2.5), "2.5");
        assert_eq!(format_short(-1e-15), "0");
    }
}
