//! Dense real linear algebra used by every other module.

mod lu;
mod matrix;
mod ops;
mod spectral;

pub use lu::{determinant_sign, inverse_of, invert, Inverse, Lu, SINGULAR_RTOL};
pub use matrix::{Matrix, Vector};
pub use ops::{abs_elementwise, kron, kron_capped, unvec, vec, DEFAULT_KRON_CAP};
pub use spectral::{least_squares, sigma_extremes, sigma_max, sigma_min, singular_values, spectral_radius};
