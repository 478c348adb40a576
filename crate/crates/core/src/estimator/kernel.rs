use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::EstimatorError;

/// `(15/16)(1 − t²)²` on `[−1, 1]`, zero outside. Unit integral, C¹.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        let s = 1.0 - t * t;
        15.0 / 16.0 * s * s
    }
}

/// The unit circle measure smoothed in the radial direction, with density
/// `w_ε(|y|)/(2π)` where `w_ε(r) = ψ((r − 1)/ε)/ε`.
///
/// It is discretized as `M` equally spaced angles times Gauss–Legendre radii
/// on `[1 − ε, 1 + ε]`. Every node at radius `rᵢ` carries the same weight
/// `weights[i]`, and the weights sum to 1 over all nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifiedCircleKernel {
    pub epsilon: f64,
    pub angular_nodes: usize,
    pub radii: Vec<f64>,
    /// Weight of a single node at each radius.
    pub weights: Vec<f64>,
    /// `∫ w_ε(r) r dr` by the radial rule, before normalization.
    pub raw_mass: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

pub const DEFAULT_RADIAL_NODES: usize = 8;

pub fn make_kernel(epsilon: f64, angular_nodes: usize) -> Result<MollifiedCircleKernel, EstimatorError> {
    make_kernel_with(epsilon, angular_nodes, DEFAULT_RADIAL_NODES)
}

pub fn make_kernel_with(epsilon: f64, angular_nodes: usize, radial_nodes: usize) -> Result<MollifiedCircleKernel, EstimatorError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(EstimatorError::InvalidParameter(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    if angular_nodes < 64 {
        return Err(EstimatorError::InvalidParameter(format!(
            "at least 64 angular nodes are required, got {angular_nodes}"
        )));
    }
    let rule = GaussLegendre::new(
        NonZeroUsize::new(radial_nodes)
            .ok_or_else(|| EstimatorError::InvalidParameter("at least one radial node is required".into()))?,
    );
    let mut radii = Vec::with_capacity(radial_nodes);
    let mut radial = Vec::with_capacity(radial_nodes);
    for &(x, w) in rule.as_node_weight_pairs() {
        let r = 1.0 + epsilon * x;
        radii.push(r);
        // w_ε(r)·r·dr with dr = ε dx
        radial.push(bump(x) * r * w);
    }
    let raw_mass: f64 = radial.iter().sum();
    let m = angular_nodes as f64;
    let weights = radial.iter().map(|w| w / (raw_mass * m)).collect();
    let (sin, cos) = (0..angular_nodes).map(|j| (2.0 * PI * j as f64 / m).sin_cos()).unzip();
    Ok(MollifiedCircleKernel {
        epsilon,
        angular_nodes,
        radii,
        weights,
        raw_mass,
        cos,
        sin,
    })
}

/// Kernel sized to a grid: `M = max(512, ⌈16/h⌉)` angles and
/// `clamp(⌈2ε/h⌉, 4, 16)` radii, so that both the angular and the radial
/// node spacing stay below the grid spacing.
pub fn kernel_for_grid(epsilon: f64, h: f64, angular_override: Option<usize>) -> Result<MollifiedCircleKernel, EstimatorError> {
    if !(h > 0.0) {
        return Err(EstimatorError::InvalidParameter(format!("spacing must be positive, got {h}")));
    }
    let m = angular_override.unwrap_or_else(|| 512usize.max((16.0 / h).ceil() as usize));
    let r = ((2.0 * epsilon / h).ceil() as usize).clamp(4, 16);
    make_kernel_with(epsilon, m, r)
}

impl MollifiedCircleKernel {
    pub fn radial_nodes(&self) -> usize {
        self.radii.len()
    }

    /// `w_ε(r)`.
    pub fn profile(&self, r: f64) -> f64 {
        bump((r - 1.0) / self.epsilon) / self.epsilon
    }

    /// Plane density `w_ε(|y|)/(2π)`.
    pub fn density(&self, y: [f64; 2]) -> f64 {
        self.profile(y[0].hypot(y[1])) / (2.0 * PI)
    }

    /// Total discrete mass; 1 up to rounding.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() * self.angular_nodes as f64
    }

    /// Radial density weight `ω` of each radius, normalized so that
    /// `Σ ωᵢ rᵢ = 1`.
    pub fn radial_density_weights(&self) -> Vec<f64> {
        let m = self.angular_nodes as f64;
        self.weights.iter().zip(&self.radii).map(|(w, r)| w * m / r).collect()
    }

    #[inline]
    pub fn direction(&self, j: usize) -> (f64, f64) {
        (self.cos[j], self.sin[j])
    }

    pub fn angle_step(&self) -> f64 {
        2.0 * PI / self.angular_nodes as f64
    }

    /// Largest frequency the angular rule resolves without aliasing.
    pub fn frequency_limit(&self) -> f64 {
        self.angular_nodes as f64 / (4.0 * PI * (1.0 + self.epsilon))
    }

    /// Fourier transform at radial frequency `rho`. The measure is even, so
    /// the transform is real.
    pub fn fourier(&self, rho: f64) -> Result<f64, EstimatorError> {
        let limit = self.frequency_limit();
        if !(rho.abs() < limit) {
            return Err(EstimatorError::Aliasing { freq: rho, limit });
        }
        let mut total = 0.0;
        for (r, w) in self.radii.iter().zip(&self.weights) {
            let a = 2.0 * PI * r * rho;
            let s: f64 = self.cos.iter().map(|c| (a * c).cos()).sum();
            total += w * s;
        }
        Ok(total)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub frequency: f64,
    pub transform: f64,
    /// `|σ̂(ρ)|·(1 + ρ)^{1/2}`.
    pub normalized: f64,
}

pub fn kernel_decay_check(k: &MollifiedCircleKernel, frequencies: &[f64]) -> Result<Vec<DecayRow>, EstimatorError> {
    frequencies
        .iter()
        .map(|&rho| {
            let t = k.fourier(rho)?;
            Ok(DecayRow {
                frequency: rho,
                transform: t,
                normalized: t.abs() * (1.0 + rho.abs()).sqrt(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_rule_integrates_the_profile_exactly() {
        let k = make_kernel(1.0 / 16.0, 256).unwrap();
        assert!((k.raw_mass - 1.0).abs() < 1e-12);
        assert!((k.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_is_even_and_supported_in_the_shell() {
        let k = make_kernel(0.1, 64).unwrap();
        for t in [0.0, 0.03, 0.07, 0.099] {
            assert!((k.profile(1.0 - t) - k.profile(1.0 + t)).abs() < 1e-12);
        }
        assert_eq!(k.profile(1.1 + 1e-12), 0.0);
        assert_eq!(k.profile(0.9 - 1e-12), 0.0);
        assert_eq!(k.profile(1.5), 0.0);
    }

    #[test]
    fn parameter_guards() {
        assert!(make_kernel(0.0, 512).is_err());
        assert!(make_kernel(0.5, 512).is_err());
        assert!(make_kernel(0.1, 32).is_err());
        let k = make_kernel(0.1, 64).unwrap();
        assert!(matches!(k.fourier(1e3), Err(EstimatorError::Aliasing { .. })));
    }

    #[test]
    fn transform_at_zero_is_the_mass() {
        let k = make_kernel(1.0 / 32.0, 512).unwrap();
        assert!((k.fourier(0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_sizing() {
        let k = kernel_for_grid(1.0 / 64.0, 1.0 / 256.0, None).unwrap();
        assert_eq!(k.angular_nodes, 4096);
        assert_eq!(k.radial_nodes(), 8);
        let k = kernel_for_grid(1.0 / 8.0, 1.0 / 32.0, None).unwrap();
        assert_eq!(k.angular_nodes, 512);
        assert_eq!(k.radial_nodes(), 8);
    }
}
