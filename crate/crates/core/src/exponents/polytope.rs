use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::halfspace::{CaseKind, HalfspaceSystem};
use super::profile::strichartz_triangle;
use super::ExponentError;
use crate::graph::Graph;
use crate::lp::{Lp, Relation};
use crate::rational::{self, q, qi, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPolytope {
    pub label: String,
    #[serde(with = "rational::vec2")]
    pub vertices: Vec<Vec<Q>>,
}

impl VertexPolytope {
    pub fn new(label: impl Into<String>, vertices: Vec<Vec<Q>>) -> Self {
        let mut unique: Vec<Vec<Q>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !unique.contains(&v) {
                unique.push(v);
            }
        }
        VertexPolytope {
            label: label.into(),
            vertices: unique,
        }
    }

    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    pub fn max_coordinate_sum(&self) -> Q {
        self.vertices
            .iter()
            .map(|v| rational::sum(v))
            .max()
            .unwrap_or_else(Q::zero)
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut e = vec![Q::zero(); n];
    e[i] = Q::one();
    e
}

fn point(xs: [Q; 3]) -> Vec<Q> {
    xs.to_vec()
}

/// Sufficient-bound polygon for a case study.
pub fn sufficient_vertices(kind: CaseKind) -> VertexPolytope {
    let (z, o) = (qi(0), qi(1));
    let mut v: Vec<Vec<Q>> = (0..3).map(|i| unit(3, i)).collect();
    match kind {
        CaseKind::Triangle => {
            let t = q(2, 3);
            v.push(point([t.clone(), t.clone(), z.clone()]));
            v.push(point([t.clone(), z.clone(), t.clone()]));
            v.push(point([z, t.clone(), t]));
            v.push(vec![q(1, 2); 3]);
        }
        CaseKind::Chain3 => {
            let t = q(2, 3);
            let h = q(1, 2);
            v.push(point([t.clone(), z.clone(), t.clone()]));
            v.push(point([z.clone(), t.clone(), t]));
            v.push(point([o.clone(), h.clone(), z.clone()]));
            v.push(point([h, o, z]));
        }
    }
    VertexPolytope::new(format!("{kind} sufficient polygon"), v)
}

/// `{eᵢ} ∪ {(2/3)(eᵢ + eⱼ) : ij ∈ E}` for a graph's hull theorem.
pub fn regular_hull_vertices(g: &Graph) -> VertexPolytope {
    let n = g.n();
    let mut v: Vec<Vec<Q>> = (0..n).map(|i| unit(n, i)).collect();
    for &(i, j) in g.edges() {
        let mut p = vec![Q::zero(); n];
        p[i - 1] = q(2, 3);
        p[j - 1] = q(2, 3);
        v.push(p);
    }
    VertexPolytope::new(format!("regular hull of graph on {n} vertices"), v)
}

/// Convex weights expressing `x` in the hull of `poly`, if any.
pub fn hull_membership(poly: &VertexPolytope, x: &[Q]) -> Result<Option<Vec<Q>>, ExponentError> {
    hull_weights(&poly.vertices, x, poly.dim())
}

fn hull_weights(vertices: &[Vec<Q>], x: &[Q], dim: usize) -> Result<Option<Vec<Q>>, ExponentError> {
    if x.len() != dim {
        return Err(ExponentError::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    if vertices.is_empty() {
        return Ok(None);
    }
    let m = vertices.len();
    let mut lp = Lp::new(m);
    for k in 0..dim {
        lp.add(vertices.iter().map(|v| v[k].clone()).collect(), Relation::Eq, x[k].clone());
    }
    lp.add(vec![Q::one(); m], Relation::Eq, Q::one());
    Ok(lp.feasible_point())
}

/// Drops every point that is a convex combination of the others.
pub fn extreme_points(points: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut unique: Vec<Vec<Q>> = Vec::new();
    for p in points {
        if !unique.contains(p) {
            unique.push(p.clone());
        }
    }
    let dim = unique.first().map_or(0, Vec::len);
    (0..unique.len())
        .filter(|&i| {
            let others: Vec<Vec<Q>> = unique
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            hull_weights(&others, &unique[i], dim)
                .expect("dimensions agree")
                .is_none()
        })
        .map(|i| unique[i].clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Offense {
    #[serde(with = "rational::vec")]
    pub vertex: Vec<Q>,
    /// Violated row numbers; empty when the outer region is a polytope.
    pub rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionComparison {
    pub inner: String,
    pub outer: String,
    pub contained: bool,
    pub offending: Vec<Offense>,
}

pub enum Outer<'a> {
    Halfspaces(&'a HalfspaceSystem),
    Polytope(&'a VertexPolytope),
}

pub fn region_compare(inner: &VertexPolytope, outer: Outer<'_>) -> Result<RegionComparison, ExponentError> {
    let mut offending = Vec::new();
    let outer_label = match outer {
        Outer::Halfspaces(sys) => {
            for v in &inner.vertices {
                let r = sys.membership(v)?;
                if !r.satisfied {
                    offending.push(Offense {
                        vertex: v.clone(),
                        rows: r.violated,
                    });
                }
            }
            sys.label.clone()
        }
        Outer::Polytope(poly) => {
            for v in &inner.vertices {
                if hull_membership(poly, v)?.is_none() {
                    offending.push(Offense {
                        vertex: v.clone(),
                        rows: Vec::new(),
                    });
                }
            }
            poly.label.clone()
        }
    };
    Ok(RegionComparison {
        inner: inner.label.clone(),
        outer: outer_label,
        contained: offending.is_empty(),
        offending,
    })
}

/// Vertex form of the chain region built from two bounded averages:
/// `(uᵢ, wᵢ)` in the `(1/p, 1/q)` triangle for `i = 1, 2` and
/// `u₃ = 1 − w₁ − w₂ ≥ 0`.
///
/// The lifted set is the product of two triangles cut by `w₁ + w₂ ≤ 1`; its
/// vertices are product vertices on the feasible side and intersections of
/// product edges with the cutting plane. Their images are filtered down to
/// extreme points.
pub fn chain3_constructed_region(d: u32) -> Result<VertexPolytope, ExponentError> {
    let tri = strichartz_triangle(d)?;
    let edges: Vec<((Q, Q), (Q, Q))> = (0..3)
        .flat_map(|a| (a + 1..3).map(move |b| (a, b)))
        .map(|(a, b)| (tri[a].clone(), tri[b].clone()))
        .collect();
    let one = Q::one();
    let image = |p1: &(Q, Q), p2: &(Q, Q)| vec![p1.0.clone(), p2.0.clone(), &one - &p1.1 - &p2.1];

    let mut candidates = Vec::new();
    for p1 in &tri {
        for p2 in &tri {
            if &p1.1 + &p2.1 <= one {
                candidates.push(image(p1, p2));
            }
        }
    }
    // Edge (vertex × segment) meets w₁ + w₂ = 1.
    let lerp = |a: &(Q, Q), b: &(Q, Q), s: &Q| (&a.0 + (&b.0 - &a.0) * s, &a.1 + (&b.1 - &a.1) * s);
    for fixed in &tri {
        for (a, b) in &edges {
            let dw = &b.1 - &a.1;
            if dw.is_zero() {
                continue;
            }
            let s = (&one - &fixed.1 - &a.1) / &dw;
            if s < Q::zero() || s > one {
                continue;
            }
            let moving = lerp(a, b, &s);
            candidates.push(image(fixed, &moving));
            candidates.push(image(&moving, fixed));
        }
    }
    Ok(VertexPolytope::new(
        format!("chain3 constructed region, d = {d}"),
        extreme_points(&candidates),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::halfspace::necessary_halfspaces;

    fn v3(a: Q, b: Q, c: Q) -> Vec<Q> {
        vec![a, b, c]
    }

    #[test]
    fn triangle_hull_examples() {
        let t = sufficient_vertices(CaseKind::Triangle);
        assert_eq!(t.vertices.len(), 7);
        let w = hull_membership(&t, &vec![q(1, 3); 3]).unwrap();
        assert!(w.is_some());
        assert!(hull_membership(&t, &vec![q(1, 2); 3]).unwrap().is_some());
        let c = sufficient_vertices(CaseKind::Chain3);
        assert!(hull_membership(&c, &v3(q(2, 3), q(2, 3), q(1, 3))).unwrap().is_none());
        assert!(c.max_coordinate_sum() <= q(3, 2));
    }

    #[test]
    fn regular_hull_of_edge_and_triangle() {
        let e = regular_hull_vertices(&Graph::path(2));
        assert_eq!(e.vertices, vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)], vec![q(2, 3), q(2, 3)]]);
        let k = regular_hull_vertices(&Graph::complete(3));
        assert_eq!(k.vertices.len(), 6);
        assert!(k.vertices.contains(&v3(q(2, 3), qi(0), q(2, 3))));
    }

    #[test]
    fn sufficient_inside_necessary() {
        for kind in [CaseKind::Triangle, CaseKind::Chain3] {
            let nec = necessary_halfspaces(kind, 2).unwrap();
            let r = region_compare(&sufficient_vertices(kind), Outer::Halfspaces(&nec)).unwrap();
            assert!(r.contained, "{kind}: {:?}", r.offending);
        }
    }

    #[test]
    fn constructed_chain_region() {
        let r = chain3_constructed_region(2).unwrap();
        assert!(r.vertices.contains(&v3(q(2, 3), q(2, 3), q(1, 3))));
        assert!(r.vertices.contains(&v3(qi(1), qi(0), qi(0))));
        assert_eq!(r.max_coordinate_sum(), q(5, 3));
        // interior product point is filtered
        assert!(!r.vertices.contains(&v3(q(2, 3), q(2, 3), qi(0))));

        let cmp = region_compare(&r, Outer::Polytope(&sufficient_vertices(CaseKind::Chain3))).unwrap();
        assert!(!cmp.contained);
        assert_eq!(cmp.offending.len(), 1);
        assert_eq!(cmp.offending[0].vertex, v3(q(2, 3), q(2, 3), q(1, 3)));

        let nec = necessary_halfspaces(CaseKind::Chain3, 2).unwrap();
        assert!(region_compare(&r, Outer::Halfspaces(&nec)).unwrap().contained);
    }

    #[test]
    fn extreme_point_filter() {
        let sq = vec![
            vec![qi(0), qi(0)],
            vec![qi(1), qi(0)],
            vec![qi(0), qi(1)],
            vec![qi(1), qi(1)],
            vec![q(1, 2), q(1, 2)],
            vec![qi(1), qi(0)],
        ];
        assert_eq!(extreme_points(&sq).len(), 4);
    }
}
