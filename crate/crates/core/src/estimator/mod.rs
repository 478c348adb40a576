//! Discretized mollified forms on planar grids: circular averages, bilinear
//! Radon transforms, scaling experiments and the Fourier decay of the
//! mollified circle measure.

mod experiments;
mod form;
mod grid;
mod kernel;

pub use experiments::{
    fit_slope, fmt_float, preset, preset_names, ratio_experiment, ratio_experiments, run_experiment,
    scaling_experiment, test_family, ExperimentConfig, ExperimentKind, ExperimentOutput, Family, GridPolicy,
    Parameter, Quadrature, RatioRow, RatioTable, Scale, ScalingResult, ScalingRow, Shape, SlopeFit,
};
pub use form::{bilinear_radon, circular_average, form_evaluate, FormMethod, DEFAULT_MC_SAMPLES};
pub use grid::{lp_norm, GridField, Support};
pub use kernel::{bump, kernel_decay_check, kernel_for_grid, make_kernel, make_kernel_with, DecayRow, MollifiedCircleKernel};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient margin at ({x}, {y}): footprint reaches {need}, grid half-width is {have}")]
    InsufficientMargin { x: f64, y: f64, need: f64, have: f64 },
    #[error("grids differ: {0}")]
    GridMismatch(String),
    #[error("method {method} does not apply: {reason}")]
    InapplicableMethod { method: String, reason: String },
    #[error("geometry exceeds the domain: {0}")]
    Geometry(String),
    #[error("zero norm input at parameter {0}")]
    ZeroNorm(f64),
    #[error("fewer than two rows with positive form value; cannot fit a slope")]
    AllZero,
    #[error("frequency {freq} is beyond the angular quadrature limit {limit}")]
    Aliasing { freq: f64, limit: f64 },
    #[error("leray estimate failed: {0}")]
    Leray(String),
    #[error("config: {0}")]
    Config(String),
}

/// Pairwise summation. The split points depend only on the length, so the
/// result does not depend on how the terms were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
