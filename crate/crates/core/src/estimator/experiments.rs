use serde::{Deserialize, Serialize};

use super::form::{circular_average, form_evaluate, FormMethod};
use super::grid::{lp_norm, GridField};
use super::kernel::kernel_for_grid;
use super::EstimatorError;
use crate::graph::Graph;

/// Test function shapes, sized by the experiment parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Disk of radius `param` centered at the origin.
    Ball,
    /// Annulus of radius 1 and thickness `param`.
    Annulus,
    Constant,
}

/// A sized member of a test family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Ball { radius: f64 },
    Annulus { thickness: f64 },
    Constant,
}

impl Shape {
    pub fn at(self, param: f64) -> Family {
        match self {
            Shape::Ball => Family::Ball { radius: param },
            Shape::Annulus => Family::Annulus { thickness: param },
            Shape::Constant => Family::Constant,
        }
    }
}

impl Family {
    /// Distance from the origin of the farthest point, if bounded.
    pub fn extent(&self) -> Option<f64> {
        match *self {
            Family::Ball { radius } => Some(radius),
            Family::Annulus { thickness } => Some(1.0 + thickness / 2.0),
            Family::Constant => None,
        }
    }
}

/// Indicator of the family member sampled at the grid nodes.
pub fn test_family(family: Family, h: f64, k: usize) -> Result<GridField, EstimatorError> {
    let half = k as f64 * h;
    let size_ok = |s: f64| s > 0.0 && s.is_finite();
    match family {
        Family::Ball { radius } => {
            if !size_ok(radius) || radius + h > half {
                return Err(EstimatorError::Geometry(format!("ball of radius {radius} in half-width {half}")));
            }
            GridField::from_fn(h, k, |x, y| if x.hypot(y) <= radius { 1.0 } else { 0.0 })
        }
        Family::Annulus { thickness } => {
            let (lo, hi) = (1.0 - thickness / 2.0, 1.0 + thickness / 2.0);
            if !size_ok(thickness) || thickness >= 2.0 || hi + h > half {
                return Err(EstimatorError::Geometry(format!(
                    "annulus of thickness {thickness} in half-width {half}"
                )));
            }
            GridField::from_fn(h, k, |x, y| {
                let r = x.hypot(y);
                if (lo..=hi).contains(&r) {
                    1.0
                } else {
                    0.0
                }
            })
        }
        Family::Constant => GridField::constant(h, k, 1.0),
    }
}

/// A length given either as a multiple of a reference length or outright.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Ratio(f64),
    Fixed(f64),
}

impl Scale {
    pub fn resolve(self, reference: f64) -> f64 {
        match self {
            Scale::Ratio(c) => c * reference,
            Scale::Fixed(v) => v,
        }
    }
}

/// Grid half-width `L` (automatic when absent) and spacing `h` relative to ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    #[serde(rename = "L", default)]
    pub half_width: Option<f64>,
    pub h: Scale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    Delta,
    Radius,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Scaling,
    /// `‖Af‖_q / ‖f‖_p` for each `[p, q]`.
    Ratio { pairs: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    #[serde(rename = "M", default)]
    pub angular_nodes: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub graph: Option<Graph>,
    pub assignment: Vec<Shape>,
    pub parameter: Parameter,
    pub params: Vec<f64>,
    pub epsilon_policy: Scale,
    pub grid: GridPolicy,
    pub quadrature: Quadrature,
    #[serde(default = "default_method")]
    pub method: FormMethod,
    #[serde(default)]
    pub seed: u64,
}

fn default_method() -> FormMethod {
    FormMethod::Auto
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Euclidean norm of the least-squares residual in log space.
    pub residual: f64,
    pub rows_used: usize,
}

/// Least squares for `ln λ = a + b ln param` over rows with `λ > 0`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit, EstimatorError> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0 && p.0 > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(EstimatorError::AllZero);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(EstimatorError::InvalidParameter("all parameters are equal".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
        rows_used: pts.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub param: f64,
    pub epsilon: f64,
    pub h: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub lambda: f64,
    /// `L¹` norms of the inputs, in vertex order.
    pub norms: Vec<f64>,
    /// Slope fitted on this row and all earlier ones.
    pub slope_running: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    pub fit: SlopeFit,
}

fn auto_half_width(families: &[Family], epsilon: f64, h: f64) -> f64 {
    let reach = 1.0 + epsilon;
    let extent = families.iter().filter_map(Family::extent).fold(0.0f64, f64::max);
    let base = if families.iter().any(|f| f.extent().is_none()) {
        extent + reach + 2.0 * h
    } else {
        extent + 2.0 * h
    };
    base.max(1.0 + 2.0 * h)
}

/// Evaluates the form at each parameter with `ε` and `h` coupled as the
/// policy says, then fits the log-log slope of `λ` against the parameter.
pub fn scaling_experiment(
    g: &Graph,
    assignment: &[Shape],
    params: &[f64],
    epsilon_policy: Scale,
    grid: GridPolicy,
    angular_nodes: Option<usize>,
    method: FormMethod,
) -> Result<ScalingResult, EstimatorError> {
    if assignment.len() != g.n() {
        return Err(EstimatorError::InvalidParameter(format!(
            "{} shapes for a graph on {} vertices",
            assignment.len(),
            g.n()
        )));
    }
    let mut rows: Vec<ScalingRow> = Vec::with_capacity(params.len());
    for &param in params {
        if !(param > 0.0) {
            return Err(EstimatorError::InvalidParameter(format!("parameter must be positive, got {param}")));
        }
        let epsilon = epsilon_policy.resolve(param);
        let h = grid.h.resolve(epsilon);
        let families: Vec<Family> = assignment.iter().map(|s| s.at(param)).collect();
        let half = grid.half_width.unwrap_or_else(|| auto_half_width(&families, epsilon, h));
        let k = GridField::cells_for(half, h);
        let kernel = kernel_for_grid(epsilon, h, angular_nodes)?;
        let fields = families
            .iter()
            .map(|&f| test_family(f, h, k))
            .collect::<Result<Vec<_>, _>>()?;
        let lambda = form_evaluate(g, &fields, &kernel, method)?;
        let norms = fields.iter().map(|f| lp_norm(f, 1.0)).collect::<Result<Vec<_>, _>>()?;
        drop(fields);
        let mut row = ScalingRow {
            param,
            epsilon,
            h,
            half_width: k as f64 * h,
            lambda,
            norms,
            slope_running: None,
        };
        let pts: Vec<(f64, f64)> = rows.iter().chain(std::iter::once(&row)).map(|r| (r.param, r.lambda)).collect();
        row.slope_running = fit_slope(&pts).ok().map(|f| f.slope);
        rows.push(row);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.param, r.lambda)).collect();
    let fit = fit_slope(&pts)?;
    Ok(ScalingResult { rows, fit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub param: f64,
    pub epsilon: f64,
    pub h: f64,
    pub norm_in: f64,
    pub norm_out: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub p: f64,
    pub q: f64,
    pub rows: Vec<RatioRow>,
    pub max_over_min: f64,
    /// Ratios strictly increase as the parameter decreases.
    pub grows_as_param_shrinks: bool,
}

pub fn ratio_experiment(
    p: f64,
    q: f64,
    shape: Shape,
    params: &[f64],
    epsilon_policy: Scale,
    grid: GridPolicy,
    angular_nodes: Option<usize>,
) -> Result<RatioTable, EstimatorError> {
    ratio_experiments(&[[p, q]], shape, params, epsilon_policy, grid, angular_nodes).map(|mut t| t.remove(0))
}

/// Shares one average per parameter across all exponent pairs. The output
/// grid is large enough to hold the whole support of `Af`, so the `L¹`
/// ratio is exact up to rounding.
pub fn ratio_experiments(
    pairs: &[[f64; 2]],
    shape: Shape,
    params: &[f64],
    epsilon_policy: Scale,
    grid: GridPolicy,
    angular_nodes: Option<usize>,
) -> Result<Vec<RatioTable>, EstimatorError> {
    for &[p, q] in pairs {
        if p.is_nan() || q.is_nan() || p < 1.0 || q < 1.0 {
            return Err(EstimatorError::InvalidParameter(format!("exponents must be at least 1, got ({p}, {q})")));
        }
    }
    let mut rows: Vec<Vec<RatioRow>> = vec![Vec::new(); pairs.len()];
    for &param in params {
        let epsilon = epsilon_policy.resolve(param);
        let h = grid.h.resolve(epsilon);
        let family = shape.at(param);
        let extent = family.extent().ok_or_else(|| {
            EstimatorError::Geometry("ratio experiments need a compactly supported family".into())
        })?;
        let half = grid.half_width.unwrap_or(extent + 1.0 + epsilon + 2.0 * h);
        let k = GridField::cells_for(half, h);
        let kernel = kernel_for_grid(epsilon, h, angular_nodes)?;
        let f = test_family(family, h, k)?;
        let af = circular_average(&f, &kernel)?;
        for (t, &[p, q]) in pairs.iter().enumerate() {
            let norm_in = lp_norm(&f, p)?;
            if norm_in == 0.0 {
                return Err(EstimatorError::ZeroNorm(param));
            }
            let norm_out = lp_norm(&af, q)?;
            rows[t].push(RatioRow {
                param,
                epsilon,
                h,
                norm_in,
                norm_out,
                ratio: norm_out / norm_in,
            });
        }
    }
    Ok(pairs
        .iter()
        .zip(rows)
        .map(|(&[p, q], rows)| {
            let max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
            let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
            let mut by_param: Vec<&RatioRow> = rows.iter().collect();
            by_param.sort_by(|a, b| b.param.total_cmp(&a.param));
            let grows = by_param.windows(2).all(|w| w[1].ratio > w[0].ratio);
            RatioTable {
                p,
                q,
                max_over_min: max / min,
                grows_as_param_shrinks: grows,
                rows,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub version: String,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scaling: Option<ScalingResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratio: Option<Vec<RatioTable>>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, EstimatorError> {
    let mut out = ExperimentOutput {
        version: crate::VERSION.into(),
        config: config.clone(),
        scaling: None,
        ratio: None,
    };
    match &config.kind {
        ExperimentKind::Scaling => {
            let g = config
                .graph
                .as_ref()
                .ok_or_else(|| EstimatorError::Config("scaling experiments need a graph".into()))?;
            out.scaling = Some(scaling_experiment(
                g,
                &config.assignment,
                &config.params,
                config.epsilon_policy,
                config.grid,
                config.quadrature.angular_nodes,
                config.method,
            )?);
        }
        ExperimentKind::Ratio { pairs } => {
            let [shape] = config.assignment[..] else {
                return Err(EstimatorError::Config("ratio experiments take exactly one shape".into()));
            };
            out.ratio = Some(ratio_experiments(
                pairs,
                shape,
                &config.params,
                config.epsilon_policy,
                config.grid,
                config.quadrature.angular_nodes,
            )?);
        }
    }
    Ok(out)
}

/// Seventeen significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_header(config: &ExperimentConfig) -> String {
    format!(
        "# lpgraph {}\n# config {}\n",
        crate::VERSION,
        serde_json::to_string(config).expect("config serializes")
    )
}

impl ExperimentOutput {
    /// CSV artifacts as `(file stem suffix, contents)`.
    pub fn csv_files(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();
        if let Some(s) = &self.scaling {
            let n = s.rows.first().map_or(0, |r| r.norms.len());
            let mut text = csv_header(&self.config);
            text.push_str("param,lambda");
            for i in 1..=n {
                text.push_str(&format!(",norm_{i}"));
            }
            text.push_str(",slope_running\n");
            for r in &s.rows {
                text.push_str(&fmt_float(r.param));
                text.push(',');
                text.push_str(&fmt_float(r.lambda));
                for v in &r.norms {
                    text.push(',');
                    text.push_str(&fmt_float(*v));
                }
                text.push(',');
                if let Some(sl) = r.slope_running {
                    text.push_str(&fmt_float(sl));
                }
                text.push('\n');
            }
            files.push((String::new(), text));
        }
        if let Some(tables) = &self.ratio {
            for t in tables {
                let mut text = csv_header(&self.config);
                text.push_str("param,norm_in,norm_out,ratio\n");
                for r in &t.rows {
                    text.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt_float(r.param),
                        fmt_float(r.norm_in),
                        fmt_float(r.norm_out),
                        fmt_float(r.ratio)
                    ));
                }
                files.push((format!("-p{}-q{}", t.p, t.q), text));
            }
        }
        files
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("output serializes")
    }
}

fn chain3() -> Graph {
    Graph::new(3, [(1, 3), (2, 3)]).expect("valid chain")
}

const DELTAS: [f64; 4] = [0.125, 0.0625, 0.03125, 0.015625];

pub fn preset_names() -> &'static [&'static str] {
    &[
        "chain-ball-ball-annulus",
        "chain-annulus-annulus-ball",
        "chain-ball-constant-annulus",
        "chain-big-ball",
        "ratio-annulus",
    ]
}

/// Built-in experiment configurations. The chain has vertex 3 in the middle.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let coupled = |assignment: Vec<Shape>| ExperimentConfig {
        name: name.into(),
        kind: ExperimentKind::Scaling,
        graph: Some(chain3()),
        assignment,
        parameter: Parameter::Delta,
        params: DELTAS.to_vec(),
        epsilon_policy: Scale::Ratio(0.25),
        grid: GridPolicy {
            half_width: None,
            h: Scale::Ratio(0.25),
        },
        quadrature: Quadrature { angular_nodes: None },
        method: FormMethod::Auto,
        seed: 0,
    };
    use Shape::*;
    Some(match name {
        "chain-ball-ball-annulus" => coupled(vec![Ball, Ball, Annulus]),
        "chain-annulus-annulus-ball" => coupled(vec![Annulus, Annulus, Ball]),
        "chain-ball-constant-annulus" => coupled(vec![Ball, Constant, Annulus]),
        "chain-big-ball" => ExperimentConfig {
            parameter: Parameter::Radius,
            params: vec![2.0, 3.0, 4.0, 5.0, 6.0],
            epsilon_policy: Scale::Fixed(0.125),
            grid: GridPolicy {
                half_width: Some(6.1),
                h: Scale::Fixed(1.0 / 32.0),
            },
            ..coupled(vec![Ball, Ball, Ball])
        },
        "ratio-annulus" => ExperimentConfig {
            kind: ExperimentKind::Ratio {
                pairs: vec![[1.5, 3.0], [1.5, 6.0], [1.0, 1.0]],
            },
            graph: None,
            assignment: vec![Annulus],
            grid: GridPolicy {
                half_width: None,
                h: Scale::Ratio(0.5),
            },
            ..coupled(vec![])
        },
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn family_areas_match_the_geometry() {
        let h = 1.0 / 256.0;
        let k = GridField::cells_for(1.2, h);
        let ball = test_family(Family::Ball { radius: 0.125 }, h, k).unwrap();
        assert!((ball.integral() / (PI / 64.0) - 1.0).abs() < 0.05);
        let ann = test_family(Family::Annulus { thickness: 0.125 }, h, k).unwrap();
        assert!((ann.integral() / (2.0 * PI * 0.125) - 1.0).abs() < 0.05);
        let one = test_family(Family::Constant, h, k).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        assert!(matches!(
            test_family(Family::Ball { radius: 2.0 }, h, k),
            Err(EstimatorError::Geometry(_))
        ));
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [0.5, 0.25, 0.125].iter().map(|&d| (d, 3.0 * d * d * d)).collect();
        let f = fit_slope(&pts).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert_eq!(fit_slope(&[(0.5, 0.0), (0.25, 0.0)]), Err(EstimatorError::AllZero));
    }

    #[test]
    fn presets_round_trip_through_json() {
        for name in preset_names() {
            let c = preset(name).unwrap();
            let text = serde_json::to_string(&c).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, c);
        }
        assert!(preset("nope").is_none());
    }
}
