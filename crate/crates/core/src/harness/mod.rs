//! Seeded instance generation, condition-strength comparison, and the
//! embedded golden regression suite.

mod compare;
mod golden;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{Bundle, GaveInstance, GavmeInstance, Instance, InstanceKind, NgavmeInstance, SylvesterInstance};
use crate::matcore::{abs_elementwise, invert, spectral_radius, Matrix, Vector};

pub use compare::{compare_conditions, ComparisonTable, ConditionCounts, ImplicationCheck};
pub use golden::{run_paper_examples, run_paper_examples_with, ExamplesReport, GoldenCheck};

/// Resampling budget for invertible coefficients and a nonzero `B`.
pub const MAX_ATTEMPTS: usize = 100;
/// Coefficients with reciprocal condition number below this are redrawn.
pub const RCOND_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Entries uniform in (−1, 1).
    #[default]
    Uniform,
    /// Integers in −5..=5.
    Integer,
}

impl std::str::FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Distribution::Uniform),
            "integer" | "int" => Ok(Distribution::Integer),
            other => Err(Error::Parse(format!("unknown distribution {other:?} (expected uniform or integer)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    /// Right-hand side columns; ignored for GAVE and Sylvester.
    pub m: usize,
    pub class: InstanceKind,
    /// Desired `ρ(|A⁻¹B|)`, or `ρ(|CA⁻¹B|)` for NGAVME. Zero gives `B = 0`.
    pub target_rho: Option<f64>,
    pub distribution: Distribution,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, class: InstanceKind, seed: u64) -> Self {
        Self { n, m: 1, class, target_rho: None, distribution: Distribution::Uniform, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidOptions("n and m must be at least 1".into()));
        }
        if let Some(t) = self.target_rho {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidOptions(format!("target rho must be a nonnegative number, got {t}")));
            }
        }
        Ok(())
    }

    /// Same spec with the seed of trial `index`.
    pub fn for_trial(&self, index: u64) -> Self {
        Self { seed: trial_seed(self.seed, index), ..self.clone() }
    }
}

/// Independent per-trial seed derived from `(seed, index)` (splitmix64 finalizer).
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn entry(rng: &mut ChaCha8Rng, dist: Distribution) -> f64 {
    match dist {
        Distribution::Uniform => rng.random_range(-1.0..1.0),
        Distribution::Integer => rng.random_range(-5i32..=5) as f64,
    }
}

fn draw(rng: &mut ChaCha8Rng, dist: Distribution, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| entry(rng, dist))
}

/// Draws until the matrix is well enough conditioned; returns it with its inverse.
fn draw_invertible(rng: &mut ChaCha8Rng, dist: Distribution, n: usize, name: &str) -> Result<(Matrix, Matrix)> {
    for _ in 0..MAX_ATTEMPTS {
        let m = draw(rng, dist, n, n);
        if let Ok(inv) = invert(&m) {
            if inv.rcond >= RCOND_THRESHOLD {
                return Ok((m, inv.matrix));
            }
        }
    }
    Err(Error::GenerationFailure(format!(
        "no invertible {name} with rcond >= {RCOND_THRESHOLD:e} after {MAX_ATTEMPTS} draws"
    )))
}

/// Draws `B` and rescales it so that `ρ(|M B|)` hits the target, where
/// `M` is `A⁻¹` (or `CA⁻¹`).
fn draw_b(rng: &mut ChaCha8Rng, spec: &GenSpec, m: &Matrix) -> Result<Matrix> {
    let n = spec.n;
    let Some(target) = spec.target_rho else {
        return Ok(draw(rng, spec.distribution, n, n));
    };
    if target == 0.0 {
        return Ok(Matrix::zeros(n, n));
    }
    for _ in 0..MAX_ATTEMPTS {
        let b = draw(rng, spec.distribution, n, n);
        let rho = spectral_radius(&abs_elementwise(&m.matmul(&b)))?;
        if rho > 1e-8 {
            return Ok(b.scale(target / rho));
        }
    }
    Err(Error::GenerationFailure(format!("no B with positive rho after {MAX_ATTEMPTS} draws")))
}

/// Seeded random instance with a planted solution `X₀` and `F` computed
/// from it. The bundle's ground truth is `X₀` (`n × 1` for GAVE).
pub fn gen_instance(spec: &GenSpec) -> Result<Bundle> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, dist) = (spec.n, spec.distribution);
    let (a, a_inv) = draw_invertible(&mut rng, dist, n, "A")?;
    let lhs_b = |x: &Matrix, b: &Matrix| a.matmul(x).add(&b.matmul(&abs_elementwise(x)));

    let (instance, x0) = match spec.class {
        InstanceKind::Gave => {
            let b = draw_b(&mut rng, spec, &a_inv)?;
            let x0 = draw(&mut rng, dist, n, 1);
            let f = Vector::new(lhs_b(&x0, &b).col(0).into_vec())?;
            (Instance::Gave(GaveInstance::new(a.clone(), b, Some(f))?), x0)
        }
        InstanceKind::Gavme => {
            let b = draw_b(&mut rng, spec, &a_inv)?;
            let x0 = draw(&mut rng, dist, n, spec.m);
            let f = lhs_b(&x0, &b);
            (Instance::Gavme(GavmeInstance::new(a.clone(), b, Some(f))?), x0)
        }
        InstanceKind::Ngavme => {
            let (c, _) = draw_invertible(&mut rng, dist, n, "C")?;
            let b = draw_b(&mut rng, spec, &c.matmul(&a_inv))?;
            let x0 = draw(&mut rng, dist, n, spec.m);
            let f = a.matmul(&x0).add(&b.matmul(&abs_elementwise(&c.matmul(&x0))));
            (Instance::Ngavme(NgavmeInstance::new(a.clone(), b, c, Some(f))?), x0)
        }
        InstanceKind::Sylvester => {
            let (k, _) = draw_invertible(&mut rng, dist, n, "K")?;
            let l = draw(&mut rng, dist, n, n);
            let b = draw_b(&mut rng, spec, &a_inv)?;
            let x0 = draw(&mut rng, dist, n, n);
            let f = a.matmul(&x0).matmul(&k).add(&b.matmul(&abs_elementwise(&x0)).matmul(&l));
            (Instance::Sylvester(SylvesterInstance::new(a.clone(), b, k, l, Some(f))?), x0)
        }
    };
    Ok(Bundle { instance, ground_truth: Some(x0) })
}
