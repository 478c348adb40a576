//! Unit-distance realizations in the plane and rank probes of the rigidity
//! matrix.
//!
//! `F(x) = (|xᵢ − xⱼ|)_{ij ∈ E}` with edges in lexicographic order. A graph is
//! regularly realizable when `1` is a regular value of `F`, i.e. `dF` has rank
//! `|E|` at every unit-distance realization. Sampling realizations can refute
//! that, never prove it.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

pub type Point = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RigidityError {
    #[error("expected {expected} points, found {found}")]
    PointCount { expected: usize, found: usize },
    #[error("edge {{{i},{j}}} has coincident endpoints; the rigidity matrix is undefined there")]
    Coincident { i: usize, j: usize },
    #[error("vertices 1 and 2 coincide; cannot pin")]
    PinDegenerate,
    #[error("no realization found (best residual {best_residual:.3e})")]
    NotFound { best_residual: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub points: Vec<Point>,
    /// `max_e |F_e(x) − 1|`.
    pub residual: f64,
}

impl Realization {
    pub fn new(g: &Graph, points: Vec<Point>) -> Result<Self, RigidityError> {
        let residual = residual(g, &points)?;
        Ok(Realization { points, residual })
    }
}

fn check_len(g: &Graph, x: &[Point]) -> Result<(), RigidityError> {
    if x.len() != g.n() {
        return Err(RigidityError::PointCount {
            expected: g.n(),
            found: x.len(),
        });
    }
    Ok(())
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Edge lengths in lexicographic edge order.
pub fn rigidity_map(g: &Graph, x: &[Point]) -> Result<Vec<f64>, RigidityError> {
    check_len(g, x)?;
    g.edges()
        .iter()
        .map(|&(i, j)| {
            let d = dist(x[i - 1], x[j - 1]);
            if d == 0.0 {
                Err(RigidityError::Coincident { i, j })
            } else {
                Ok(d)
            }
        })
        .collect()
}

pub fn residual(g: &Graph, x: &[Point]) -> Result<f64, RigidityError> {
    check_len(g, x)?;
    Ok(g.edges()
        .iter()
        .map(|&(i, j)| (dist(x[i - 1], x[j - 1]) - 1.0).abs())
        .fold(0.0, f64::max))
}

/// `|E| × 2n` matrix; the row of edge `{i,j}` holds the unit vector
/// `(xᵢ − xⱼ)/|xᵢ − xⱼ|` in vertex `i`'s columns and its negative in `j`'s.
pub fn rigidity_jacobian(g: &Graph, x: &[Point]) -> Result<DMatrix<f64>, RigidityError> {
    check_len(g, x)?;
    let mut m = DMatrix::zeros(g.edge_count(), 2 * g.n());
    for (row, &(i, j)) in g.edges().iter().enumerate() {
        let (a, b) = (x[i - 1], x[j - 1]);
        let d = dist(a, b);
        if d == 0.0 {
            return Err(RigidityError::Coincident { i, j });
        }
        let u = [(a[0] - b[0]) / d, (a[1] - b[1]) / d];
        for k in 0..2 {
            m[(row, 2 * (i - 1) + k)] = u[k];
            m[(row, 2 * (j - 1) + k)] = -u[k];
        }
    }
    Ok(m)
}

/// Singular value `σ` counts toward the rank iff
/// `σ > max(rows, cols) · σ_max · factor`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankPolicy {
    pub factor: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy {
            factor: 2f64.powi(-40),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankInfo {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

pub fn numerical_rank(m: &DMatrix<f64>, policy: RankPolicy) -> RankInfo {
    if m.nrows() == 0 || m.ncols() == 0 {
        return RankInfo {
            rank: 0,
            singular_values: Vec::new(),
        };
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let smax = sv[0];
    let tol = m.nrows().max(m.ncols()) as f64 * smax * policy.factor;
    RankInfo {
        rank: sv.iter().filter(|&&s| s > tol).count(),
        singular_values: sv,
    }
}

/// Sends `x₁` to the origin and `x₂ − x₁` onto the positive horizontal axis.
pub fn pin_to_m0(x: &[Point]) -> Result<Vec<Point>, RigidityError> {
    if x.len() < 2 {
        return Ok(x.iter().map(|p| [p[0] - x[0][0], p[1] - x[0][1]]).collect());
    }
    let (o, a) = (x[0], x[1]);
    let (dx, dy) = (a[0] - o[0], a[1] - o[1]);
    let r = dx.hypot(dy);
    if r == 0.0 {
        return Err(RigidityError::PinDegenerate);
    }
    let (c, s) = (dx / r, dy / r);
    Ok(x.iter()
        .map(|p| {
            let (px, py) = (p[0] - o[0], p[1] - o[1]);
            [c * px + s * py, -s * px + c * py]
        })
        .collect())
}

pub const MAX_ITERATIONS: usize = 200;
pub const RESTARTS: usize = 20;
pub const SUCCESS_RESIDUAL: f64 = 1e-10;

fn residual_vector(g: &Graph, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(
        g.edge_count(),
        g.edges().iter().map(|&(i, j)| {
            let (dx, dy) = (x[2 * i - 2] - x[2 * j - 2], x[2 * i - 1] - x[2 * j - 1]);
            dx.hypot(dy) - 1.0
        }),
    )
}

fn jacobian_flat(g: &Graph, x: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(g.edge_count(), 2 * g.n());
    for (row, &(i, j)) in g.edges().iter().enumerate() {
        let (dx, dy) = (x[2 * i - 2] - x[2 * j - 2], x[2 * i - 1] - x[2 * j - 1]);
        let d = dx.hypot(dy);
        // At coincident endpoints any unit direction is a valid subgradient.
        let u = if d > 1e-300 { [dx / d, dy / d] } else { [1.0, 0.0] };
        for k in 0..2 {
            m[(row, 2 * (i - 1) + k)] = u[k];
            m[(row, 2 * (j - 1) + k)] = -u[k];
        }
    }
    m
}

fn levenberg_marquardt(g: &Graph, start: &[Point]) -> (Vec<Point>, f64) {
    let n2 = 2 * g.n();
    let mut x = DVector::from_iterator(n2, start.iter().flat_map(|p| p.iter().copied()));
    let mut r = residual_vector(g, &x);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..MAX_ITERATIONS {
        if r.amax() < SUCCESS_RESIDUAL * 1e-2 {
            break;
        }
        let j = jacobian_flat(g, &x);
        let jt = j.transpose();
        let jtj = &jt * &j;
        let grad = &jt * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..n2 {
                a[(k, k)] += lambda * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&grad))) else {
                lambda *= 10.0;
                continue;
            };
            let cand = &x + &step;
            let rc = residual_vector(g, &cand);
            let cc = rc.norm_squared();
            if cc < cost {
                x = cand;
                r = rc;
                cost = cc;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 2.0;
        }
        if !improved {
            break;
        }
    }
    let pts = (0..g.n()).map(|k| [x[2 * k], x[2 * k + 1]]).collect();
    (pts, r.amax())
}

/// Runs the solver from a given start and pins the result.
pub fn solve_from(g: &Graph, start: &[Point]) -> Result<Realization, RigidityError> {
    check_len(g, start)?;
    let (pts, res) = levenberg_marquardt(g, start);
    if res >= SUCCESS_RESIDUAL {
        return Err(RigidityError::NotFound { best_residual: res });
    }
    finish(g, pts)
}

fn finish(g: &Graph, pts: Vec<Point>) -> Result<Realization, RigidityError> {
    let pinned = match pin_to_m0(&pts) {
        Ok(p) => p,
        Err(_) => pts,
    };
    Realization::new(g, pinned)
}

/// Seeded random starts in `[−n, n]²`, up to [`RESTARTS`] attempts.
pub fn solve_realization(g: &Graph, seed: u64) -> Result<Realization, RigidityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = g.n() as f64;
    let mut best = f64::INFINITY;
    for _ in 0..RESTARTS {
        let start: Vec<Point> = (0..g.n())
            .map(|_| [rng.gen_range(-span..=span), rng.gen_range(-span..=span)])
            .collect();
        let (pts, res) = levenberg_marquardt(g, &start);
        if res < SUCCESS_RESIDUAL {
            return finish(g, pts);
        }
        best = best.min(res);
    }
    Err(RigidityError::NotFound { best_residual: best })
}

/// Vertex `v` at `(bfs_depth(v), 0)`. For the 4-cycle this is the folded
/// configuration `(0,0), (1,0), (2,0), (1,0)`.
pub fn collinear_start(g: &Graph) -> Vec<Point> {
    let depth = g.bfs_depths(1);
    (1..=g.n()).map(|v| [depth[v] as f64, 0.0]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    RegularAtAllSamples,
    RankDeficientSampleFound,
    NoRealizationFound,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::RegularAtAllSamples => "regular-at-all-samples",
            Verdict::RankDeficientSampleFound => "rank-deficient-sample-found",
            Verdict::NoRealizationFound => "no-realization-found",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Seed, or `null` for a deterministic start.
    pub seed: Option<u64>,
    pub rank: usize,
    pub residual: f64,
    pub singular_values: Vec<f64>,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub graph: Graph,
    pub samples: usize,
    pub found: usize,
    pub ranks: BTreeMap<String, usize>,
    pub expected_rank: usize,
    pub manifold_dim: i64,
    pub verdict: Verdict,
    pub singular_values: Vec<Vec<f64>>,
    pub realizations: Vec<Sample>,
    pub policy: RankPolicy,
    pub note: String,
}

pub const PROBE_NOTE: &str =
    "sampling can refute regularity but never prove it; verdicts describe the sampled realizations only";

/// Solves from `num_seeds` seeds `base_seed, base_seed + 1, …` and, when
/// `collinear` is set, from the collinear layout as well.
pub fn regularity_probe_with(g: &Graph, num_seeds: usize, base_seed: u64, policy: RankPolicy, collinear: bool) -> RigidityReport {
    let mut attempts: Vec<(Option<u64>, Result<Realization, RigidityError>)> = Vec::new();
    if collinear {
        attempts.push((None, solve_from(g, &collinear_start(g))));
    }
    let seeded: Vec<(Option<u64>, Result<Realization, RigidityError>)> = (0..num_seeds as u64)
        .into_par_iter()
        .map(|k| {
            let s = base_seed.wrapping_add(k);
            (Some(s), solve_realization(g, s))
        })
        .collect();
    attempts.extend(seeded);

    let mut ranks = BTreeMap::new();
    let mut realizations = Vec::new();
    for (seed, r) in attempts {
        let Ok(real) = r else { continue };
        let Ok(j) = rigidity_jacobian(g, &real.points) else { continue };
        let info = numerical_rank(&j, policy);
        *ranks.entry(info.rank.to_string()).or_insert(0) += 1;
        realizations.push(Sample {
            seed,
            rank: info.rank,
            residual: real.residual,
            singular_values: info.singular_values,
            points: real.points,
        });
    }
    let expected = g.edge_count();
    let verdict = if realizations.is_empty() {
        Verdict::NoRealizationFound
    } else if realizations.iter().any(|s| s.rank < expected) {
        Verdict::RankDeficientSampleFound
    } else {
        Verdict::RegularAtAllSamples
    };
    RigidityReport {
        graph: g.clone(),
        samples: num_seeds + usize::from(collinear),
        found: realizations.len(),
        ranks,
        expected_rank: expected,
        manifold_dim: 2 * g.n() as i64 - expected as i64,
        verdict,
        singular_values: realizations.iter().map(|s| s.singular_values.clone()).collect(),
        realizations,
        policy,
        note: PROBE_NOTE.to_string(),
    }
}

pub fn regularity_probe(g: &Graph, num_seeds: usize, base_seed: u64, policy: RankPolicy) -> RigidityReport {
    regularity_probe_with(g, num_seeds, base_seed, policy, false)
}

/// Report for a user-supplied configuration.
pub fn evaluate_at(g: &Graph, points: &[Point], policy: RankPolicy) -> Result<RigidityReport, RigidityError> {
    let real = Realization::new(g, points.to_vec())?;
    let info = numerical_rank(&rigidity_jacobian(g, points)?, policy);
    let expected = g.edge_count();
    let on_level_set = real.residual < SUCCESS_RESIDUAL;
    let verdict = if !on_level_set {
        Verdict::NoRealizationFound
    } else if info.rank < expected {
        Verdict::RankDeficientSampleFound
    } else {
        Verdict::RegularAtAllSamples
    };
    Ok(RigidityReport {
        graph: g.clone(),
        samples: 1,
        found: usize::from(on_level_set),
        ranks: BTreeMap::from([(info.rank.to_string(), 1)]),
        expected_rank: expected,
        manifold_dim: 2 * g.n() as i64 - expected as i64,
        verdict,
        singular_values: vec![info.singular_values.clone()],
        realizations: vec![Sample {
            seed: None,
            rank: info.rank,
            residual: real.residual,
            singular_values: info.singular_values,
            points: points.to_vec(),
        }],
        policy,
        note: PROBE_NOTE.to_string(),
    })
}
