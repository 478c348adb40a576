use std::borrow::Cow;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridField, Support};
use super::kernel::MollifiedCircleKernel;
use super::{pairwise_sum, EstimatorError};
use crate::graph::{is_tree, Graph};
use crate::leray::{leray_mc_form, TestFunction};

pub const DEFAULT_MC_SAMPLES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormMethod {
    Auto,
    TreeFactor,
    RadonPair,
    Direct,
    LerayMc { samples: usize, seed: u64 },
}

impl FormMethod {
    fn name(&self) -> &'static str {
        match self {
            FormMethod::Auto => "auto",
            FormMethod::TreeFactor => "tree-factor",
            FormMethod::RadonPair => "radon-pair",
            FormMethod::Direct => "direct",
            FormMethod::LerayMc { .. } => "leray-mc",
        }
    }
}

/// Node index ranges of the angular rule, as unreduced integers.
enum Arcs {
    Empty,
    Full,
    One(i64, i64),
    Two((i64, i64), (i64, i64)),
}

/// Angles `φ` for which `x − r·e^{iφ}` can see a nonzero node of a field
/// supported in `{ρ_in ≤ |z| ≤ ρ_out}`. Bilinear interpolation reaches at
/// most `h√2` beyond a node, which is added as padding, and one extra node
/// on either side absorbs rounding. Skipped nodes contribute exactly zero.
fn arcs(k: &MollifiedCircleKernel, sup: &Support, h: f64, x: f64, y: f64, r: f64) -> Arcs {
    if sup.empty {
        return Arcs::Empty;
    }
    let pad = h * std::f64::consts::SQRT_2;
    let a = (sup.rho_in - pad).max(0.0);
    let b = sup.rho_out + pad;
    let rho = x.hypot(y);
    if rho * r < 1e-12 {
        return if r >= a && r <= b { Arcs::Full } else { Arcs::Empty };
    }
    let denom = 2.0 * rho * r;
    let c_lo = (rho * rho + r * r - b * b) / denom;
    let c_hi = (rho * rho + r * r - a * a) / denom;
    if c_lo > 1.0 || c_hi < -1.0 {
        return Arcs::Empty;
    }
    let a1 = c_hi.min(1.0).acos();
    let a2 = c_lo.max(-1.0).acos();
    let theta = y.atan2(x);
    let d = k.angle_step();
    let m = k.angular_nodes as i64;
    let first = (((theta + a1) / d).floor() as i64 - 1, ((theta + a2) / d).ceil() as i64 + 1);
    let second = (((theta - a2) / d).floor() as i64 - 1, ((theta - a1) / d).ceil() as i64 + 1);
    if first.1 - second.0 + 1 >= m {
        Arcs::Full
    } else if second.1 + 1 >= first.0 {
        Arcs::One(second.0, first.1)
    } else {
        Arcs::Two(second, first)
    }
}

#[inline]
fn ring_sum(k: &MollifiedCircleKernel, f: &GridField, x: f64, y: f64, r: f64, lo: i64, hi: i64) -> f64 {
    let m = k.angular_nodes as i64;
    let mut s = 0.0;
    for j in lo..=hi {
        let (c, sn) = k.direction(j.rem_euclid(m) as usize);
        s += f.interpolate(x - r * c, y - r * sn);
    }
    s
}

/// `Σᵢ Wᵢ Σⱼ f(x − rᵢ e^{iφⱼ})` over the nodes that can be nonzero.
fn average_at(k: &MollifiedCircleKernel, f: &GridField, sup: &Support, x: f64, y: f64) -> f64 {
    let m = k.angular_nodes as i64;
    let mut acc = 0.0;
    for (&r, &w) in k.radii.iter().zip(&k.weights) {
        let s = match arcs(k, sup, f.h(), x, y, r) {
            Arcs::Empty => continue,
            Arcs::Full => ring_sum(k, f, x, y, r, 0, m - 1),
            Arcs::One(lo, hi) => ring_sum(k, f, x, y, r, lo, hi),
            Arcs::Two((a, b), (c, d)) => ring_sum(k, f, x, y, r, a, b) + ring_sum(k, f, x, y, r, c, d),
        };
        acc += w * s;
    }
    acc
}

/// The same sum over every node, with no windowing.
fn average_at_full(k: &MollifiedCircleKernel, f: &GridField, x: f64, y: f64) -> f64 {
    let m = k.angular_nodes as i64;
    k.radii
        .iter()
        .zip(&k.weights)
        .map(|(&r, &w)| w * ring_sum(k, f, x, y, r, 0, m - 1))
        .sum()
}

fn footprint_ok(f: &GridField, k: &MollifiedCircleKernel, x: f64, y: f64) -> Result<(), EstimatorError> {
    let need = x.abs().max(y.abs()) + k.radii.last().copied().unwrap_or(1.0);
    let have = f.half_width();
    if need <= have + 1e-12 {
        Ok(())
    } else {
        Err(EstimatorError::InsufficientMargin { x, y, need, have })
    }
}

/// Averages of `f` at the nodes listed in `mask`. Zero extension is only
/// trusted for compact fields; for any other field every requested point
/// must keep its whole footprint inside the grid. Constant fields then
/// average to themselves without quadrature.
fn masked_average(f: &GridField, k: &MollifiedCircleKernel, mask: &[usize]) -> Result<Vec<f64>, EstimatorError> {
    let sup = f.support();
    if sup.empty {
        return Ok(vec![0.0; mask.len()]);
    }
    if !sup.compact {
        for &idx in mask {
            let (x, y) = f.point(idx);
            footprint_ok(f, k, x, y)?;
        }
    }
    if let Some(c) = sup.constant {
        return Ok(vec![c; mask.len()]);
    }
    Ok(mask
        .par_iter()
        .map(|&idx| {
            let (x, y) = f.point(idx);
            average_at(k, f, &sup, x, y)
        })
        .collect())
}

/// The output grid: the input grid when zero extension is exact, otherwise
/// the centered subgrid whose footprints stay inside.
fn output_grid(inputs: &[&GridField], k: &MollifiedCircleKernel) -> Result<(f64, usize), EstimatorError> {
    let f = inputs[0];
    for g in inputs {
        if !g.same_grid(f) {
            return Err(EstimatorError::GridMismatch("inputs must share one grid".into()));
        }
    }
    if inputs.iter().all(|g| g.support().compact) {
        return Ok((f.h(), f.k()));
    }
    let reach = k.radii.last().copied().unwrap_or(1.0);
    let kk = ((f.half_width() - reach) / f.h() + 1e-9).floor();
    if kk < 1.0 || kk * f.h() < 1.0 + f.h() {
        return Err(EstimatorError::InsufficientMargin {
            x: 0.0,
            y: 0.0,
            need: 1.0 + f.h() + reach,
            have: f.half_width(),
        });
    }
    Ok((f.h(), kk as usize))
}

/// `Af = f * σ^ε` on the grid of `f`. For a field that is not compactly
/// supported inside its grid the output lives on the largest centered
/// subgrid whose points keep their footprint inside.
pub fn circular_average(f: &GridField, k: &MollifiedCircleKernel) -> Result<GridField, EstimatorError> {
    let (h, kk) = output_grid(&[f], k)?;
    let sup = f.support();
    let side = 2 * kk + 1;
    let off = f.k() - kk;
    let values: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % side + off, idx / side + off);
            let (x, y) = (f.coord(ix), f.coord(iy));
            match sup.constant {
                Some(c) => c,
                None => average_at(k, f, &sup, x, y),
            }
        })
        .collect();
    GridField::new(h, kk, values)
}

#[inline]
fn radon_at(k: &MollifiedCircleKernel, g: &GridField, hf: &GridField, sup: &Support, x: f64, y: f64, rot: (f64, f64)) -> f64 {
    let m = k.angular_nodes as i64;
    let (ct, st) = rot;
    let mut acc = 0.0;
    for (&r, &w) in k.radii.iter().zip(&k.weights) {
        let ring = |lo: i64, hi: i64| {
            let mut s = 0.0;
            for j in lo..=hi {
                let (c, sn) = k.direction(j.rem_euclid(m) as usize);
                let gv = g.interpolate(x - r * c, y - r * sn);
                if gv == 0.0 {
                    continue;
                }
                let (c2, s2) = (c * ct - sn * st, sn * ct + c * st);
                s += gv * hf.interpolate(x - r * c2, y - r * s2);
            }
            s
        };
        let s = match arcs(k, sup, g.h(), x, y, r) {
            Arcs::Empty => continue,
            Arcs::Full => ring(0, m - 1),
            Arcs::One(lo, hi) => ring(lo, hi),
            Arcs::Two((a, b), (c, d)) => ring(a, b) + ring(c, d),
        };
        acc += w * s;
    }
    acc
}

/// `B_θ(g, h)(x) = ∫ g(x − y) h(x − Θy) dσ^ε(y)` with `Θ` the rotation by
/// `theta`, on the same output grid rule as [`circular_average`].
pub fn bilinear_radon(g: &GridField, hf: &GridField, theta: f64, k: &MollifiedCircleKernel) -> Result<GridField, EstimatorError> {
    let (h, kk) = output_grid(&[g, hf], k)?;
    let sup = g.support();
    let side = 2 * kk + 1;
    let off = g.k() - kk;
    let rot = (theta.cos(), theta.sin());
    let values: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (g.coord(idx % side + off), g.coord(idx / side + off));
            radon_at(k, g, hf, &sup, x, y, rot)
        })
        .collect();
    GridField::new(h, kk, values)
}

fn check_fields(g: &Graph, fields: &[GridField]) -> Result<(), EstimatorError> {
    if fields.len() != g.n() {
        return Err(EstimatorError::InvalidParameter(format!(
            "{} fields for a graph on {} vertices",
            fields.len(),
            g.n()
        )));
    }
    if fields.iter().any(|f| !f.same_grid(&fields[0])) {
        return Err(EstimatorError::GridMismatch("all fields must share one grid".into()));
    }
    Ok(())
}

fn is_triangle(g: &Graph) -> bool {
    g.n() == 3 && g.edge_count() == 3
}

/// Evaluates `Λ^ε_G(f₁, …, fₙ) = ∫ Πᵢ fᵢ(xᵢ) Π_{ij ∈ E} σ^ε(xᵢ − xⱼ) dx`.
/// Field `i − 1` belongs to vertex `i`.
pub fn form_evaluate(g: &Graph, fields: &[GridField], k: &MollifiedCircleKernel, method: FormMethod) -> Result<f64, EstimatorError> {
    check_fields(g, fields)?;
    let inapplicable = |reason: &str| EstimatorError::InapplicableMethod {
        method: method.name().into(),
        reason: reason.into(),
    };
    match method {
        FormMethod::Auto => {
            if is_tree(g) {
                tree_factor(g, fields, k)
            } else if is_triangle(g) {
                radon_pair(fields, k)
            } else {
                form_evaluate(
                    g,
                    fields,
                    k,
                    FormMethod::LerayMc {
                        samples: DEFAULT_MC_SAMPLES,
                        seed: 0,
                    },
                )
            }
        }
        FormMethod::TreeFactor => {
            if !is_tree(g) {
                return Err(inapplicable("the graph is not a tree"));
            }
            tree_factor(g, fields, k)
        }
        FormMethod::RadonPair => {
            if !is_triangle(g) {
                return Err(inapplicable("the graph is not a triangle"));
            }
            radon_pair(fields, k)
        }
        FormMethod::Direct => {
            if g.n() > 3 {
                return Err(inapplicable("direct quadrature is limited to three vertices"));
            }
            if is_triangle(g) {
                direct_triangle(fields, k)
            } else {
                direct_tree(g, fields, k)
            }
        }
        FormMethod::LerayMc { samples, seed } => {
            let fns: Vec<&dyn TestFunction> = fields.iter().map(|f| f as &dyn TestFunction).collect();
            let est = leray_mc_form(g, &fns, k.epsilon, samples, seed).map_err(|e| EstimatorError::Leray(e.to_string()))?;
            // box kernel of unit height per edge has mass 2π; rescale to the unit-mass kernel
            Ok(est.value / (2.0 * PI).powi(g.edge_count() as i32))
        }
    }
}

fn root_of(g: &Graph) -> usize {
    let mut best = 1;
    for v in g.vertices() {
        if g.degree(v) > g.degree(best) {
            best = v;
        }
    }
    best
}

/// Breadth-first order from `root` with parents.
fn rooted(g: &Graph, root: usize) -> (Vec<usize>, Vec<usize>) {
    let adj = g.adjacency();
    let mut parent = vec![0; g.n() + 1];
    let mut seen = vec![false; g.n() + 1];
    let mut order = vec![root];
    seen[root] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                order.push(w);
            }
        }
    }
    (order, parent)
}

/// Leaf-to-root nested averages. The message of a vertex is only needed
/// where its parent's field is nonzero, so it is computed there alone.
fn tree_factor(g: &Graph, fields: &[GridField], k: &MollifiedCircleKernel) -> Result<f64, EstimatorError> {
    let root = root_of(g);
    let (order, parent) = rooted(g, root);
    let masks: Vec<Vec<usize>> = fields.iter().map(|f| f.nonzero_indices()).collect();
    let mut messages: Vec<Option<Vec<f64>>> = vec![None; g.n() + 1];
    let children = |v: usize| -> Vec<usize> { order.iter().copied().filter(|&w| w != root && parent[w] == v).collect() };

    for &v in order.iter().rev() {
        if v == root {
            continue;
        }
        let kids = children(v);
        let field: Cow<GridField> = if kids.is_empty() {
            Cow::Borrowed(&fields[v - 1])
        } else {
            let mut prod = fields[v - 1].zeros_like();
            let mask = &masks[v - 1];
            let vals = prod.values_mut();
            for (pos, &idx) in mask.iter().enumerate() {
                let mut p = fields[v - 1].values()[idx];
                for &c in &kids {
                    p *= messages[c].as_ref().expect("children first")[pos];
                }
                vals[idx] = p;
            }
            Cow::Owned(prod)
        };
        messages[v] = Some(masked_average(&field, k, &masks[parent[v] - 1])?);
    }

    let kids = children(root);
    let f = &fields[root - 1];
    let terms: Vec<f64> = masks[root - 1]
        .iter()
        .enumerate()
        .map(|(pos, &idx)| {
            let mut p = f.values()[idx];
            for &c in &kids {
                p *= messages[c].as_ref().expect("children first")[pos];
            }
            p
        })
        .collect();
    Ok(f.h() * f.h() * pairwise_sum(&terms))
}

/// Trees on at most three vertices by brute force at every nonzero node of
/// the central field, with every angular node visited.
fn direct_tree(g: &Graph, fields: &[GridField], k: &MollifiedCircleKernel) -> Result<f64, EstimatorError> {
    let root = root_of(g);
    let adj = g.adjacency();
    let f = &fields[root - 1];
    let mask = f.nonzero_indices();
    for &w in &adj[root] {
        let c = &fields[w - 1];
        if !c.support().compact {
            for &idx in &mask {
                let (x, y) = f.point(idx);
                footprint_ok(c, k, x, y)?;
            }
        }
    }
    let terms: Vec<f64> = mask
        .par_iter()
        .map(|&idx| {
            let (x, y) = f.point(idx);
            let mut p = f.values()[idx];
            for &w in &adj[root] {
                p *= average_at_full(k, &fields[w - 1], x, y);
            }
            p
        })
        .collect();
    Ok(f.h() * f.h() * pairwise_sum(&terms))
}

fn require_compact(fields: &[GridField]) -> Result<(), EstimatorError> {
    for f in fields {
        if !f.support().compact {
            return Err(EstimatorError::InsufficientMargin {
                x: f.half_width(),
                y: f.half_width(),
                need: f.half_width() + 1.0,
                have: f.half_width(),
            });
        }
    }
    Ok(())
}

/// `Λ = 2/(√3·4π²) Σ_± ∫ f₁ B_{±π/3}(f₂, f₃)`: for a unit triangle on the
/// circle, fixing `x₁` and the direction to `x₂` leaves two choices for `x₃`.
fn radon_pair(fields: &[GridField], k: &MollifiedCircleKernel) -> Result<f64, EstimatorError> {
    require_compact(fields)?;
    let (f1, f2, f3) = (&fields[0], &fields[1], &fields[2]);
    let sup = f2.support();
    let mask = f1.nonzero_indices();
    let plus = ((PI / 3.0).cos(), (PI / 3.0).sin());
    let minus = (plus.0, -plus.1);
    let terms: Vec<f64> = mask
        .par_iter()
        .map(|&idx| {
            let (x, y) = f1.point(idx);
            f1.values()[idx] * (radon_at(k, f2, f3, &sup, x, y, plus) + radon_at(k, f2, f3, &sup, x, y, minus))
        })
        .collect();
    let c = 2.0 / (3f64.sqrt() * 4.0 * PI * PI);
    Ok(c * f1.h() * f1.h() * pairwise_sum(&terms))
}

/// Full quadrature of the triangle form. With `y₁ = r₁e^{iα}` and
/// `y₂ = r₂e^{i(α±β)}` the third distance `s = |y₁ − y₂|` replaces `β` as
/// a variable, with `r₁r₂ dβ = s ds / sin β`. Every radius and the third
/// distance carry their own mollifier weight.
fn direct_triangle(fields: &[GridField], k: &MollifiedCircleKernel) -> Result<f64, EstimatorError> {
    require_compact(fields)?;
    let (f1, f2, f3) = (&fields[0], &fields[1], &fields[2]);
    let omega = k.radial_density_weights();
    let m = k.angular_nodes;
    let da = 2.0 * PI / m as f64;
    let norm = da / (2.0 * PI).powi(3);
    // (r1, r2, cos β, ±sin β, weight)
    let mut triples = Vec::new();
    for (i1, &r1) in k.radii.iter().enumerate() {
        for (i2, &r2) in k.radii.iter().enumerate() {
            for (i3, &s) in k.radii.iter().enumerate() {
                let cb = (r1 * r1 + r2 * r2 - s * s) / (2.0 * r1 * r2);
                if cb.abs() >= 1.0 {
                    continue;
                }
                let sb = (1.0 - cb * cb).sqrt();
                let w = omega[i1] * omega[i2] * omega[i3] * s / sb * norm;
                triples.push((r1, r2, cb, sb, w));
                triples.push((r1, r2, cb, -sb, w));
            }
        }
    }
    let mask = f1.nonzero_indices();
    let terms: Vec<f64> = mask
        .par_iter()
        .map(|&idx| {
            let (x, y) = f1.point(idx);
            let mut acc = 0.0;
            for &(r1, r2, cb, sb, w) in &triples {
                let mut s = 0.0;
                for j in 0..m {
                    let (c, sn) = k.direction(j);
                    let a = f2.interpolate(x - r1 * c, y - r1 * sn);
                    if a == 0.0 {
                        continue;
                    }
                    let (c2, s2) = (c * cb - sn * sb, sn * cb + c * sb);
                    s += a * f3.interpolate(x - r2 * c2, y - r2 * s2);
                }
                acc += w * s;
            }
            f1.values()[idx] * acc
        })
        .collect();
    Ok(f1.h() * f1.h() * pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::kernel::make_kernel;

    fn disk(h: f64, k: usize, c: (f64, f64), r: f64) -> GridField {
        GridField::from_fn(h, k, |x, y| if (x - c.0).hypot(y - c.1) <= r { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn windowed_average_matches_the_full_sum() {
        let f = GridField::from_fn(1.0 / 16.0, 40, |x, y| {
            let r = x.hypot(y);
            if (0.8..=1.2).contains(&r) {
                1.0 + 0.3 * x
            } else {
                0.0
            }
        })
        .unwrap();
        let k = make_kernel(0.1, 256).unwrap();
        let sup = f.support();
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.2), (1.0, 0.05), (1.9, 0.4), (-2.1, 0.3), (0.02, 0.01)] {
            let a = average_at(&k, &f, &sup, x, y);
            let b = average_at_full(&k, &f, x, y);
            assert!((a - b).abs() < 1e-13, "({x},{y}): {a} vs {b}");
        }
    }

    #[test]
    fn constant_input_averages_to_one_inside() {
        let k = make_kernel(0.1, 128).unwrap();
        let one = GridField::constant(0.125, 24, 1.0).unwrap();
        let a = circular_average(&one, &k).unwrap();
        assert!(a.half_width() + 1.1 <= 3.0 + 1e-12);
        assert!(a.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn radon_with_unit_second_input_is_the_average() {
        let k = make_kernel(0.1, 128).unwrap();
        let g = disk(0.125, 24, (0.2, 0.1), 0.7);
        let one = GridField::constant(0.125, 24, 1.0).unwrap();
        let b = bilinear_radon(&g, &one, 0.7, &k).unwrap();
        let a = circular_average(&g, &k).unwrap();
        // B is on the interior subgrid, A on the full grid
        for idx in 0..b.values().len() {
            let (x, y) = b.point(idx);
            assert!((b.values()[idx] - a.interpolate(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn margin_violations_are_reported() {
        let k = make_kernel(0.1, 128).unwrap();
        let g = Graph::path(2);
        let one = GridField::constant(0.125, 10, 1.0).unwrap();
        let fields = vec![one.clone(), one];
        assert!(matches!(
            form_evaluate(&g, &fields, &k, FormMethod::TreeFactor),
            Err(EstimatorError::InsufficientMargin { .. })
        ));
    }

    #[test]
    fn inapplicable_methods() {
        let k = make_kernel(0.1, 128).unwrap();
        let f = disk(0.125, 16, (0.0, 0.0), 0.5);
        let c4 = Graph::cycle(4);
        let fields = vec![f.clone(), f.clone(), f.clone(), f.clone()];
        assert!(matches!(
            form_evaluate(&c4, &fields, &k, FormMethod::TreeFactor),
            Err(EstimatorError::InapplicableMethod { .. })
        ));
        assert!(matches!(
            form_evaluate(&c4, &fields, &k, FormMethod::Direct),
            Err(EstimatorError::InapplicableMethod { .. })
        ));
        assert!(matches!(
            form_evaluate(&Graph::path(3), &fields[..3], &k, FormMethod::RadonPair),
            Err(EstimatorError::InapplicableMethod { .. })
        ));
    }

    #[test]
    fn single_edge_is_symmetric() {
        let k = make_kernel(0.1, 256).unwrap();
        let a = disk(1.0 / 16.0, 40, (0.3, 0.0), 0.4);
        let b = disk(1.0 / 16.0, 40, (-0.6, 0.2), 0.5);
        let g = Graph::path(2);
        let ab = form_evaluate(&g, &[a.clone(), b.clone()], &k, FormMethod::TreeFactor).unwrap();
        let ba = form_evaluate(&g, &[b, a], &k, FormMethod::TreeFactor).unwrap();
        assert!(ab > 0.0);
        assert!((ab - ba).abs() < 1e-3 * ab);
    }
}
