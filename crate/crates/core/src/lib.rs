//! Desk-scale numerical laboratory for quantitative unique continuation of
//! parabolic equations u_t - Delta u = w . grad u + v u on the periodic
//! torus: frequency functions under backward-Gaussian weights, similarity
//! variables and the shifted harmonic oscillator, vanishing-order
//! estimators, and pointwise-in-time observability checks.

// negated comparisons like !(t < 0.0) are deliberate: they reject NaN where
// the un-negated form would accept it
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod caloric;
pub mod doubling;
pub mod error;
pub mod field;
pub mod frequency;
pub mod gaussian;
pub mod lab;
pub mod quadrature;
pub mod rng;
pub mod selftest;
pub mod solver;
pub mod vanishing;

pub use caloric::{caloric_polynomial, hermite_data, CaloricPolynomial, HermiteFunction};
pub use doubling::{check_theorem22, choose_delta, gamma, observability_ratio, DoublingVerdict};
pub use error::{LabError, Result};
pub use field::{GridSpec, ScalarField, TrigInterpolant, VectorField};
pub use gaussian::{
    gaussian_quadrature, moment, tail_bound, weighted_integral, weighted_integral_spectral,
    BackwardGaussian, LatticeQuadrature,
};
pub use frequency::{
    exponents, limit_mode, modified_frequency, spectrum_distance, ExponentSet, FrequencyTrace,
    SimilarityState, YGrid,
};
pub use solver::{solve, step, Coefficients, Scheme, SimulationConfig, Trajectory};
pub use vanishing::{
    select_start_point, vanishing_order_cylinder, vanishing_order_gaussian, verify_order_bound,
    PointSelection, VanishingReport,
};
