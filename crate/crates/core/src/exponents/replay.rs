//! Independent checker for certificates. It uses only the derivation, the
//! profile and exact arithmetic; none of the solvers that produced it.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};
use thiserror::Error;

use super::certificate::{Certificate, JoinStep, Status, Step, TreeNode};
use super::halfspace::CaseKind;
use super::polytope::{hull_membership, regular_hull_vertices, sufficient_vertices};
use super::profile::{improving_profile_circle, ImprovingProfile};
use crate::graph::Subgraph;
use crate::rational::{self, fmt_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{location}: {message}")]
pub struct ReplayError {
    pub location: String,
    pub message: String,
}

fn fail<T>(location: &str, message: impl Into<String>) -> Result<T, ReplayError> {
    Err(ReplayError {
        location: location.to_string(),
        message: message.into(),
    })
}

#[derive(Default)]
struct Outcome {
    map: BTreeMap<usize, Q>,
    edges: BTreeSet<(usize, usize)>,
    conditional: bool,
}

impl Outcome {
    fn sum(&self) -> Q {
        self.map.values().fold(Q::zero(), |a, b| a + b)
    }
}

struct Ctx<'a> {
    profile: &'a ImprovingProfile,
    dimension: u32,
}

/// Re-verifies every recorded equation and membership claim.
pub fn replay(cert: &Certificate) -> Result<(), ReplayError> {
    let expected = improving_profile_circle(cert.dimension).map_err(|e| ReplayError {
        location: "profile".into(),
        message: e.to_string(),
    })?;
    if cert.profile != expected {
        return fail("profile", "profile differs from the circle profile for the recorded dimension");
    }
    let labels = cert.label_list();
    if labels.len() != cert.graph.n() || labels.windows(2).any(|w| w[0] >= w[1]) {
        return fail("labels", "labels must be strictly increasing, one per vertex");
    }

    if cert.status == Status::Unknown {
        if !cert.derivation.is_empty() || !cert.witness.is_empty() || !cert.sum.is_zero() {
            return fail("status", "unknown certificates carry no witness or derivation");
        }
        if cert.assumptions.is_empty() {
            return fail("status", "unknown certificates must record a reason");
        }
        return Ok(());
    }
    if cert.derivation.len() != 1 {
        return fail("derivation", "expected exactly one root step");
    }
    let ctx = Ctx {
        profile: &cert.profile,
        dimension: cert.dimension,
    };
    let out = step(&ctx, &cert.derivation[0], "derivation[0]")?;

    let label_set: BTreeSet<usize> = labels.iter().copied().collect();
    let derived: BTreeSet<usize> = out.map.keys().copied().collect();
    if derived != label_set {
        return fail("vertices", "derivation does not cover exactly the certificate's vertices");
    }
    let graph_edges: BTreeSet<(usize, usize)> = cert.labelled_edges().into_iter().collect();
    if out.edges != graph_edges {
        return fail("edges", "derivation edges differ from the graph's edges");
    }
    if cert.witness.len() != labels.len() {
        return fail("witness", "witness length differs from the vertex count");
    }
    for (k, v) in labels.iter().enumerate() {
        if cert.witness[k] != out.map[v] {
            return fail(
                "witness",
                format!("vertex {v}: witness {} but derivation gives {}", fmt_q(&cert.witness[k]), fmt_q(&out.map[v])),
            );
        }
        if !rational::in_unit_interval(&cert.witness[k]) {
            return fail("witness", format!("vertex {v}: exponent outside [0, 1]"));
        }
    }
    let total = rational::sum(&cert.witness);
    if total != cert.sum {
        return fail("sum", format!("recorded {} but witness sums to {}", fmt_q(&cert.sum), fmt_q(&total)));
    }
    if total <= Q::one() {
        return fail("sum", format!("sum {} is not greater than 1", fmt_q(&total)));
    }
    match cert.status {
        Status::Proven if out.conditional || !cert.assumptions.is_empty() => {
            fail("status", "proven certificates may not use conditional steps or assumptions")
        }
        Status::Conditional if !out.conditional || cert.assumptions.is_empty() => {
            fail("status", "conditional certificates need a conditional step and a recorded assumption")
        }
        _ => Ok(()),
    }
}

pub fn is_valid(cert: &Certificate) -> bool {
    replay(cert).is_ok()
}

fn step(ctx: &Ctx<'_>, s: &Step, loc: &str) -> Result<Outcome, ReplayError> {
    match s {
        Step::TreeRecursion(node) => {
            if !node.holder.budget.is_one() {
                return fail(loc, "a standalone tree bound starts from budget 1");
            }
            let mut out = Outcome::default();
            tree(ctx, node, &node.holder.budget, &mut out, &format!("{loc}.tree"))?;
            Ok(out)
        }
        Step::CaseStudyVertex { polytope, vertices, point } => {
            if ctx.dimension != 2 {
                return fail(loc, "case-study polygons are stated for d = 2");
            }
            if vertices.len() != 3 || point.len() != 3 {
                return fail(loc, "case studies have three vertices");
            }
            let distinct: BTreeSet<usize> = vertices.iter().copied().collect();
            if distinct.len() != 3 {
                return fail(loc, "case-study vertices must be distinct");
            }
            if hull_membership(&sufficient_vertices(*polytope), point)
                .map_err(|e| ReplayError {
                    location: loc.into(),
                    message: e.to_string(),
                })?
                .is_none()
            {
                return fail(loc, format!("point is outside the {polytope} sufficient polygon"));
            }
            let (a, b, c) = (vertices[0], vertices[1], vertices[2]);
            let pair = |x: usize, y: usize| (x.min(y), x.max(y));
            let edges = match polytope {
                CaseKind::Triangle => vec![pair(a, b), pair(a, c), pair(b, c)],
                CaseKind::Chain3 => vec![pair(a, c), pair(b, c)],
            };
            Ok(Outcome {
                map: vertices.iter().copied().zip(point.iter().cloned()).collect(),
                edges: edges.into_iter().collect(),
                conditional: false,
            })
        }
        Step::RegularHull { vertices, edges, point } => {
            let sub = Subgraph::new(vertices.iter().copied(), edges.iter().copied());
            if sub.vertices != *vertices || sub.edges != *edges {
                return fail(loc, "hull vertices and edges must be sorted and distinct");
            }
            if edges.iter().any(|(a, b)| !sub.contains(*a) || !sub.contains(*b)) {
                return fail(loc, "hull edge leaves the vertex set");
            }
            let g = sub.to_graph().map_err(|e| ReplayError {
                location: loc.into(),
                message: e.to_string(),
            })?;
            if point.len() != vertices.len() {
                return fail(loc, "hull point has the wrong length");
            }
            let inside = hull_membership(&regular_hull_vertices(&g), point).map_err(|e| ReplayError {
                location: loc.into(),
                message: e.to_string(),
            })?;
            if inside.is_none() {
                return fail(loc, "point is outside the regular hull");
            }
            Ok(Outcome {
                map: vertices.iter().copied().zip(point.iter().cloned()).collect(),
                edges: edges.iter().copied().collect(),
                conditional: true,
            })
        }
        Step::Contraction { core, pendants } => {
            let mut out = step(ctx, core, &format!("{loc}.core"))?;
            let core_map = out.map.clone();
            for (k, p) in pendants.iter().enumerate() {
                let ploc = format!("{loc}.pendants[{k}]");
                let Some(u_root) = core_map.get(&p.root) else {
                    return fail(&ploc, format!("root {} is not a core vertex", p.root));
                };
                if p.budget != *u_root {
                    return fail(&ploc, "pendant budget differs from the core exponent at its root");
                }
                if !p.budget.is_positive() {
                    return fail(&ploc, "pendant budget must be positive");
                }
                if p.tree.root != p.root {
                    return fail(&ploc, "pendant tree is not rooted at its core vertex");
                }
                let mut sub = Outcome::default();
                tree(ctx, &p.tree, &p.budget, &mut sub, &ploc)?;
                for (v, u) in sub.map {
                    if v != p.root && out.map.contains_key(&v) {
                        return fail(&ploc, format!("vertex {v} appears twice"));
                    }
                    out.map.insert(v, u);
                }
                for e in sub.edges {
                    if !out.edges.insert(e) {
                        return fail(&ploc, format!("edge {e:?} appears twice"));
                    }
                }
            }
            Ok(out)
        }
        Step::Join(j) => join(ctx, j, loc),
    }
}

fn join(ctx: &Ctx<'_>, j: &JoinStep, loc: &str) -> Result<Outcome, ReplayError> {
    let left = step(ctx, &j.left, &format!("{loc}.left"))?;
    let right = step(ctx, &j.right, &format!("{loc}.right"))?;
    let lv: BTreeSet<usize> = left.map.keys().copied().collect();
    let rv: BTreeSet<usize> = right.map.keys().copied().collect();
    if lv.intersection(&rv).copied().collect::<Vec<_>>() != [j.cut] {
        return fail(loc, "joined pieces must share exactly the cut vertex");
    }
    if left.map[&j.cut] != j.cut_exponent {
        return fail(loc, "cut exponent differs from the left piece");
    }
    if !j.cut_exponent.is_positive() || left.sum() < Q::one() {
        return fail(loc, "left piece lacks a non-trivial estimate at the cut");
    }
    if right.map[&j.cut] != j.right_cut_exponent {
        return fail(loc, "right cut exponent differs from the right piece");
    }
    if j.right_cut_exponent >= Q::one() || right.sum() <= Q::one() {
        return fail(loc, "right piece is not improving with a finite dual exponent at the cut");
    }
    if !j.scale.is_positive() || j.scale > Q::one() {
        return fail(loc, "interpolation weight must lie in (0, 1]");
    }
    if j.part != &j.scale * (Q::one() - &j.right_cut_exponent) {
        return fail(loc, "Hölder part differs from the interpolated dual exponent");
    }
    if &j.own + &j.part != j.cut_exponent || j.own.is_negative() {
        return fail(loc, "Hölder split at the cut does not add up");
    }
    let mut map = left.map;
    map.insert(j.cut, j.own.clone());
    for (v, u) in right.map {
        if v != j.cut {
            map.insert(v, &j.scale * u);
        }
    }
    let mut edges = left.edges;
    for e in right.edges {
        if !edges.insert(e) {
            return fail(loc, format!("edge {e:?} appears twice"));
        }
    }
    Ok(Outcome {
        map,
        edges,
        conditional: left.conditional || right.conditional,
    })
}

fn tree(ctx: &Ctx<'_>, node: &TreeNode, budget: &Q, out: &mut Outcome, loc: &str) -> Result<(), ReplayError> {
    let h = &node.holder;
    if h.budget != *budget {
        return fail(loc, format!("vertex {}: budget {} but {} was passed down", node.root, fmt_q(&h.budget), fmt_q(budget)));
    }
    if h.own.is_negative() {
        return fail(loc, format!("vertex {}: negative own exponent", node.root));
    }
    if h.parts.len() != node.children.len() {
        return fail(loc, format!("vertex {}: one Hölder part per child", node.root));
    }
    if &h.own + rational::sum(&h.parts) != h.budget {
        return fail(loc, format!("vertex {}: Hölder split does not add up to the budget", node.root));
    }
    if out.map.insert(node.root, h.own.clone()).is_some() {
        return fail(loc, format!("vertex {} appears twice", node.root));
    }
    for (k, c) in node.children.iter().enumerate() {
        let imp = &c.improving;
        if imp.output != h.parts[k] {
            return fail(loc, format!("child {}: output exponent differs from its Hölder part", c.vertex));
        }
        if !imp.output.is_positive() || imp.output >= Q::one() {
            return fail(loc, format!("child {}: improving step needs output strictly inside (0, 1)", c.vertex));
        }
        let v = ctx.profile.eval(&imp.output);
        if imp.input != v {
            return fail(
                loc,
                format!("child {}: claims v({}) = {} but the profile gives {}", c.vertex, fmt_q(&imp.output), fmt_q(&imp.input), fmt_q(&v)),
            );
        }
        if imp.input <= imp.output {
            return fail(loc, format!("child {}: no strict improvement", c.vertex));
        }
        if c.subtree.root != c.vertex {
            return fail(loc, format!("child {}: subtree has a different root", c.vertex));
        }
        let e = (node.root.min(c.vertex), node.root.max(c.vertex));
        if !out.edges.insert(e) {
            return fail(loc, format!("edge {e:?} appears twice"));
        }
        tree(ctx, &c.subtree, &imp.input, out, loc)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::profile::improving_profile_circle;
    use crate::exponents::tree::certify_tree;
    use crate::graph::Graph;
    use crate::rational::q;

    fn path3() -> Certificate {
        let g = Graph::new(3, [(1, 3), (2, 3)]).unwrap();
        certify_tree(&g, &improving_profile_circle(2).unwrap()).unwrap()
    }

    fn first_child(c: &mut Certificate) -> &mut crate::exponents::certificate::ChildStep {
        let Step::TreeRecursion(node) = &mut c.derivation[0] else { panic!() };
        &mut node.children[0]
    }

    #[test]
    fn accepts_engine_output() {
        assert_eq!(replay(&path3()), Ok(()));
    }

    #[test]
    fn rejects_perturbed_budget() {
        let mut c = path3();
        let Step::TreeRecursion(node) = &mut c.derivation[0] else { panic!() };
        node.holder.parts[0] += q(1, 1000);
        assert!(replay(&c).is_err());
    }

    #[test]
    fn rejects_false_profile_value() {
        let mut c = path3();
        let child = first_child(&mut c);
        child.improving.output = q(1, 3);
        child.improving.input = q(3, 4);
        let err = replay(&c).unwrap_err();
        assert!(err.message.contains("profile gives 2/3"), "{err}");
    }

    #[test]
    fn rejects_wrong_status_and_sum() {
        let mut c = path3();
        c.sum = q(5, 4);
        assert!(replay(&c).is_err());
        let mut c = path3();
        c.status = Status::Conditional;
        assert!(replay(&c).is_err());
    }
}
