//! Monte-Carlo integration of `∫ Πᵢ fᵢ(xᵢ) φ_ε(F(x)) dx`, where
//! `φ_ε(F(x)) = (2ε)^{−|E|} Π_{ij ∈ E} χ_{[−1,1]}(ε^{−1}(|xᵢ − xⱼ| − 1))`
//! approximates the Leray measure on the unit-distance variety.
//!
//! Sampling follows a breadth-first spanning tree from vertex 1: `x₁` is
//! uniform in a box, and each tree edge places its child at distance
//! `r ~ U[1 − ε, 1 + ε]` in a uniform direction. That step has density
//! `1/(2ε·2π·r)` against area, so a tree edge contributes the factor `2πr`
//! and its window exactly. Edges off the tree keep their window factor
//! `χ/(2ε)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::{pairwise_sum, GridField};
use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum LerayError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no sample out of {samples} landed in the ε-shell of every edge")]
    ZeroAcceptance { samples: usize },
}

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Bounds {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Bounds { min, max }
    }

    pub fn is_empty(&self) -> bool {
        self.min[0] > self.max[0] || self.min[1] > self.max[1]
    }

    pub fn area(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            (self.max[0] - self.min[0]) * (self.max[1] - self.min[1])
        }
    }

    pub fn expanded(&self, by: f64) -> Bounds {
        Bounds::new([self.min[0] - by, self.min[1] - by], [self.max[0] + by, self.max[1] + by])
    }

    pub fn intersect(&self, o: &Bounds) -> Bounds {
        Bounds::new(
            [self.min[0].max(o.min[0]), self.min[1].max(o.min[1])],
            [self.max[0].min(o.max[0]), self.max[1].min(o.max[1])],
        )
    }
}

/// A function on the plane with a declared box outside which it vanishes.
pub trait TestFunction: Sync {
    fn eval(&self, p: [f64; 2]) -> f64;
    /// `None` when the function is identically zero.
    fn support_box(&self) -> Option<Bounds>;
}

impl TestFunction for GridField {
    fn eval(&self, p: [f64; 2]) -> f64 {
        self.interpolate(p[0], p[1])
    }

    fn support_box(&self) -> Option<Bounds> {
        let side = self.side();
        let mut b = Bounds::new([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for idx in self.nonzero_indices() {
            let (x, y) = (self.coord(idx % side), self.coord(idx / side));
            b.min = [b.min[0].min(x), b.min[1].min(y)];
            b.max = [b.max[0].max(x), b.max[1].max(y)];
        }
        // interpolation spreads a node over the neighbouring cells
        (!b.is_empty()).then(|| b.expanded(self.h()))
    }
}

/// A closure together with its support box.
pub struct FnField<F> {
    pub f: F,
    pub bounds: Option<Bounds>,
}

impl<F: Fn([f64; 2]) -> f64 + Sync> TestFunction for FnField<F> {
    fn eval(&self, p: [f64; 2]) -> f64 {
        (self.f)(p)
    }

    fn support_box(&self) -> Option<Bounds> {
        self.bounds
    }
}

/// `x ↦ Rx + shift` with `R` the rotation by `angle`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub angle: f64,
    pub shift: [f64; 2],
}

impl RigidMotion {
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        [c * p[0] - s * p[1] + self.shift[0], s * p[0] + c * p[1] + self.shift[1]]
    }

    pub fn invert(&self, p: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        let q = [p[0] - self.shift[0], p[1] - self.shift[1]];
        [c * q[0] + s * q[1], -s * q[0] + c * q[1]]
    }
}

/// The push-forward `f ∘ ψ^{−1}` of a test function under a rigid motion.
pub struct Moved<'a> {
    pub inner: &'a dyn TestFunction,
    pub motion: RigidMotion,
}

impl TestFunction for Moved<'_> {
    fn eval(&self, p: [f64; 2]) -> f64 {
        self.inner.eval(self.motion.invert(p))
    }

    fn support_box(&self) -> Option<Bounds> {
        let b = self.inner.support_box()?;
        let corners = [b.min, [b.max[0], b.min[1]], [b.min[0], b.max[1]], b.max].map(|c| self.motion.apply(c));
        let mut out = Bounds::new([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for c in corners {
            out.min = [out.min[0].min(c[0]), out.min[1].min(c[1])];
            out.max = [out.max[0].max(c[0]), out.max[1].max(c[1])];
        }
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LerayEstimate {
    pub value: f64,
    pub std_error: f64,
    pub epsilon: f64,
    pub samples: usize,
    /// Samples inside the shell of every edge.
    pub accepted: usize,
}

const CHUNK: usize = 4096;

struct Plan {
    /// Vertices in breadth-first order with their tree parent (0 for the root).
    order: Vec<(usize, usize)>,
    extra: Vec<(usize, usize)>,
    start: Bounds,
}

fn plan(g: &Graph, fns: &[&dyn TestFunction], epsilon: f64) -> Option<Plan> {
    let tree = g.bfs_tree();
    let depth = g.bfs_depths(1);
    let mut order: Vec<(usize, usize)> = vec![(1, 0)];
    order.extend(tree.iter().copied());
    let extra = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| !tree.iter().any(|&(p, c)| (p.min(c), p.max(c)) == (a, b)))
        .collect();
    let mut start = fns[0].support_box()?;
    for v in 2..=g.n() {
        let b = fns[v - 1].support_box()?;
        start = start.intersect(&b.expanded(depth[v] as f64 * (1.0 + epsilon)));
    }
    Some(Plan { order, extra, start })
}

/// Estimates `∫ Πᵢ fᵢ(xᵢ) φ_ε(F(x)) dx`; `fns[i − 1]` belongs to vertex `i`.
///
/// Samples are drawn in chunks of 4096, chunk `c` from the ChaCha8 stream
/// `c` of `master_seed`, and chunk sums are merged pairwise in chunk order,
/// so the result does not depend on the thread count.
pub fn leray_mc_form(
    g: &Graph,
    fns: &[&dyn TestFunction],
    epsilon: f64,
    samples: usize,
    master_seed: u64,
) -> Result<LerayEstimate, LerayError> {
    if fns.len() != g.n() {
        return Err(LerayError::InvalidParameter(format!(
            "{} functions for a graph on {} vertices",
            fns.len(),
            g.n()
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LerayError::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if samples < 2 {
        return Err(LerayError::InvalidParameter("at least two samples are required".into()));
    }
    let zero = LerayEstimate {
        value: 0.0,
        std_error: 0.0,
        epsilon,
        samples,
        accepted: 0,
    };
    let Some(plan) = plan(g, fns, epsilon) else {
        return Ok(zero);
    };
    if plan.start.is_empty() {
        return Ok(zero);
    }
    let area = plan.start.area();
    let n = g.n();
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut vals = Vec::with_capacity(count);
            let mut sq = Vec::with_capacity(count);
            let mut hits = 0;
            let mut x = vec![[0.0f64; 2]; n + 1];
            for _ in 0..count {
                let mut w = area;
                for &(v, p) in &plan.order {
                    if p == 0 {
                        x[v] = [
                            rng.gen_range(plan.start.min[0]..=plan.start.max[0]),
                            rng.gen_range(plan.start.min[1]..=plan.start.max[1]),
                        ];
                    } else {
                        let r: f64 = rng.gen_range(1.0 - epsilon..=1.0 + epsilon);
                        let t: f64 = rng.gen_range(0.0..2.0 * PI);
                        x[v] = [x[p][0] + r * t.cos(), x[p][1] + r * t.sin()];
                        w *= 2.0 * PI * r;
                    }
                }
                let inside = plan.extra.iter().all(|&(a, b)| {
                    let d = (x[a][0] - x[b][0]).hypot(x[a][1] - x[b][1]);
                    (d - 1.0).abs() <= epsilon
                });
                if !inside {
                    vals.push(0.0);
                    sq.push(0.0);
                    continue;
                }
                hits += 1;
                w /= (2.0 * epsilon).powi(plan.extra.len() as i32);
                for v in 1..=n {
                    if w == 0.0 {
                        break;
                    }
                    w *= fns[v - 1].eval(x[v]);
                }
                vals.push(w);
                sq.push(w * w);
            }
            (pairwise_sum(&vals), pairwise_sum(&sq), hits)
        })
        .collect();
    let sums: Vec<f64> = parts.iter().map(|p| p.0).collect();
    let squares: Vec<f64> = parts.iter().map(|p| p.1).collect();
    let accepted: usize = parts.iter().map(|p| p.2).sum();
    if accepted == 0 {
        return Err(LerayError::ZeroAcceptance { samples });
    }
    let m = samples as f64;
    let mean = pairwise_sum(&sums) / m;
    let var = ((pairwise_sum(&squares) / m - mean * mean) * m / (m - 1.0)).max(0.0);
    Ok(LerayEstimate {
        value: mean,
        std_error: (var / m).sqrt(),
        epsilon,
        samples,
        accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicator(r: f64) -> FnField<impl Fn([f64; 2]) -> f64 + Sync> {
        FnField {
            f: move |p: [f64; 2]| if p[0].hypot(p[1]) <= r { 1.0 } else { 0.0 },
            bounds: Some(Bounds::new([-r, -r], [r, r])),
        }
    }

    #[test]
    fn zero_function_gives_zero_with_no_error() {
        let g = Graph::complete(3);
        let z = FnField {
            f: |_: [f64; 2]| 0.0,
            bounds: None,
        };
        let a = indicator(2.0);
        let e = leray_mc_form(&g, &[&a, &z, &a], 0.1, 1000, 1).unwrap();
        assert_eq!((e.value, e.std_error), (0.0, 0.0));
    }

    #[test]
    fn single_edge_with_a_constant_partner_integrates_the_window() {
        // ∫ χ_B(x₁) ∫ φ_ε(|x₁ − x₂|) dx₂ dx₁ = |B|·2π exactly when the
        // partner covers the whole shell
        let g = Graph::path(2);
        let small = indicator(0.5);
        let big = indicator(3.0);
        let e = leray_mc_form(&g, &[&small, &big], 0.1, 1 << 16, 7).unwrap();
        let exact = PI * 0.25 * 2.0 * PI;
        assert!((e.value - exact).abs() < 4.0 * e.std_error + 1e-12, "{e:?} vs {exact}");
    }

    #[test]
    fn deterministic_per_seed() {
        let g = Graph::complete(3);
        let a = indicator(1.5);
        let e1 = leray_mc_form(&g, &[&a, &a, &a], 0.1, 10_000, 3).unwrap();
        let e2 = leray_mc_form(&g, &[&a, &a, &a], 0.1, 10_000, 3).unwrap();
        assert_eq!(e1, e2);
        let e3 = leray_mc_form(&g, &[&a, &a, &a], 0.1, 10_000, 4).unwrap();
        assert_ne!(e1.value, e3.value);
    }

    #[test]
    fn zero_acceptance_is_reported() {
        let g = Graph::complete(3);
        let a = indicator(1.5);
        assert!(matches!(
            leray_mc_form(&g, &[&a, &a, &a], 1e-9, 100, 0),
            Err(LerayError::ZeroAcceptance { samples: 100 })
        ));
    }

    #[test]
    fn motions_invert() {
        let m = RigidMotion {
            angle: 0.7,
            shift: [1.0, -2.0],
        };
        let p = m.invert(m.apply([0.3, 0.4]));
        assert!((p[0] - 0.3).abs() < 1e-15 && (p[1] - 0.4).abs() < 1e-15);
    }
}
