//! Gluing certificates: re-attaching pendant trees to a certified core, and
//! joining two certified pieces at a single shared vertex.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed};

use super::certificate::{Certificate, JoinStep, PendantStep, Status, Step};
use super::tree::solve_tree_at;
use super::ExponentError;
use crate::graph::{contract_pendant_trees, Graph, Subgraph};
use crate::rational::{fmt_q, qi, Q};

/// Extends a core certificate to the whole graph by solving the tree program
/// on every pendant tree with the root's core exponent as budget.
pub fn certify_contraction(g: &Graph, core_cert: &Certificate) -> Result<Certificate, ExponentError> {
    let dec = contract_pendant_trees(g);
    if dec.is_tree {
        return Err(ExponentError::Mismatch(
            "core mismatch: the graph is a tree and has an empty 2-core".into(),
        ));
    }
    if core_cert.label_list() != dec.core.vertices || core_cert.labelled_edges() != dec.core.edges {
        return Err(ExponentError::Mismatch(
            "core mismatch: certificate graph differs from the 2-core".into(),
        ));
    }
    if core_cert.status == Status::Unknown {
        return Err(ExponentError::UnknownInput("core certificate is unknown".into()));
    }
    if dec.pendant_forest.is_empty() {
        return Ok(core_cert.clone());
    }
    let core_map = core_cert.exponent_map();
    let mut map = core_map.clone();
    let mut pendants = Vec::new();
    for pt in &dec.pendant_forest {
        let budget = core_map[&pt.root].clone();
        let sol = solve_tree_at(&pt.tree, pt.root, &budget, &core_cert.profile)?;
        for (v, u) in sol.exponents {
            map.insert(v, u);
        }
        pendants.push(PendantStep {
            root: pt.root,
            budget,
            tree: sol.node,
        });
    }
    let step = Step::Contraction {
        core: Box::new(core_cert.root_step().expect("known certificates have a derivation").clone()),
        pendants,
    };
    Ok(Certificate::assemble(
        &g.to_subgraph(),
        &map,
        core_cert.status,
        step,
        core_cert.assumptions.clone(),
        core_cert.dimension,
        &core_cert.profile,
    ))
}

/// How much of the left exponent at the cut the join may consume.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutReserve {
    /// Use up to the whole exponent.
    None,
    /// Keep at least half, because the cut vertex is used again later.
    Half,
}

/// Joins `left` and `right` at `cut`.
///
/// The right piece's form with the cut function removed defines a function
/// `T(x)`. Its certificate puts `T` in `L^s` with `1/s = b* = 1 − u_c`, and
/// the trivial bound puts `T` in `L^∞` with sup-norm bounds on the other
/// inputs. Interpolating with weight `t` gives `1/s = t·b*` with the other
/// right exponents scaled by `t`. Hölder at the cut then splits the left
/// exponent `u^L_c = a + t·b*`. The sum grows by `t·(S' − b*) > 0`, where `S'`
/// is the right sum without the cut.
pub fn certify_join(cut: usize, left: &Certificate, right: &Certificate) -> Result<Certificate, ExponentError> {
    join_with_reserve(cut, left, right, CutReserve::None)
}

pub fn join_with_reserve(cut: usize, left: &Certificate, right: &Certificate, reserve: CutReserve) -> Result<Certificate, ExponentError> {
    let lv: BTreeSet<usize> = left.label_list().into_iter().collect();
    let rv: BTreeSet<usize> = right.label_list().into_iter().collect();
    let shared: Vec<usize> = lv.intersection(&rv).copied().collect();
    if shared != [cut] {
        return Err(ExponentError::Mismatch(format!(
            "join pieces must share exactly the cut vertex {cut}; shared {shared:?}"
        )));
    }
    if left.status == Status::Unknown || right.status == Status::Unknown {
        return Err(ExponentError::UnknownInput("cannot join an unknown certificate".into()));
    }
    if left.profile != right.profile || left.dimension != right.dimension {
        return Err(ExponentError::Mismatch("join pieces use different profiles".into()));
    }
    let lmap = left.exponent_map();
    let rmap = right.exponent_map();
    let ua = lmap[&cut].clone();
    if !ua.is_positive() || left.sum < Q::one() {
        return Err(ExponentError::MissingNontrivial { cut });
    }
    let ub = rmap[&cut].clone();
    let b_star = Q::one() - &ub;
    let s_rest = &right.sum - &ub;
    if !b_star.is_positive() || s_rest <= b_star {
        return Err(ExponentError::Mismatch(format!(
            "right piece gives no improving bound with a finite dual exponent at {cut}"
        )));
    }
    let cap = match reserve {
        CutReserve::None => ua.clone(),
        CutReserve::Half => &ua / qi(2),
    };
    let t = if cap >= b_star { Q::one() } else { &cap / &b_star };
    let b = &t * &b_star;
    let a = &ua - &b;

    let mut map: BTreeMap<usize, Q> = lmap;
    map.insert(cut, a.clone());
    for (v, u) in rmap {
        if v != cut {
            map.insert(v, &t * u);
        }
    }
    let union = Subgraph::new(
        lv.union(&rv).copied(),
        left.labelled_edges().into_iter().chain(right.labelled_edges()),
    );
    let status = left.status.min(right.status);
    let mut assumptions = left.assumptions.clone();
    for a in &right.assumptions {
        if !assumptions.contains(a) {
            assumptions.push(a.clone());
        }
    }
    let step = Step::Join(JoinStep {
        cut,
        left: Box::new(left.root_step().expect("known certificate").clone()),
        right: Box::new(right.root_step().expect("known certificate").clone()),
        cut_exponent: ua,
        own: a,
        part: b,
        scale: t,
        right_cut_exponent: ub,
    });
    Ok(Certificate::assemble(
        &union,
        &map,
        status,
        step,
        assumptions,
        left.dimension,
        &left.profile,
    ))
}

/// Describes the join arithmetic for diagnostics.
pub fn describe_join(step: &JoinStep) -> String {
    format!(
        "cut {}: {} = {} + {} (scale {})",
        step.cut,
        fmt_q(&step.cut_exponent),
        fmt_q(&step.own),
        fmt_q(&step.part),
        fmt_q(&step.scale)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::profile::improving_profile_circle;
    use crate::exponents::tree::certify_tree_sub;
    use crate::rational::q;
    use num::Zero;

    fn edge(a: usize, b: usize) -> Certificate {
        let p = improving_profile_circle(2).unwrap();
        certify_tree_sub(&Subgraph::new([a, b], [(a, b)]), &p, 2).unwrap()
    }

    #[test]
    fn joining_two_edges_beats_either() {
        let j = certify_join(2, &edge(1, 2), &edge(2, 3)).unwrap();
        assert_eq!(j.status, Status::Proven);
        assert!(j.sum > q(4, 3));
        assert_eq!(j.label_list(), vec![1, 2, 3]);
        assert_eq!(j.graph.edge_count(), 2);
    }

    #[test]
    fn join_guards() {
        assert!(matches!(certify_join(1, &edge(1, 2), &edge(3, 4)), Err(ExponentError::Mismatch(_))));
        let mut starved = edge(1, 2);
        starved.witness[1] = Q::zero();
        assert!(matches!(
            certify_join(2, &starved, &edge(2, 3)),
            Err(ExponentError::MissingNontrivial { cut: 2 })
        ));
    }

    #[test]
    fn contraction_rejects_trees() {
        let p = improving_profile_circle(2).unwrap();
        let core = certify_tree_sub(&Subgraph::new([1, 2], [(1, 2)]), &p, 2).unwrap();
        assert!(matches!(certify_contraction(&Graph::path(4), &core), Err(ExponentError::Mismatch(_))));
    }
}
