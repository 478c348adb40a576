//! Exponent allocation on trees.
//!
//! Rooting the tree at `r`, the form factors as
//! `∫ f_r · Π_c A(F_c)` where `F_c` is the subtree form hanging from child `c`.
//! Hölder at `r` splits the budget as `u_r + Σ w_c = B`; each child then
//! receives input exponent `v(w_c)` from the averaging bound and splits it
//! again among its own children. Maximizing `Σ u` over these constraints is a
//! linear program because `v` is concave piecewise linear: `x ≤ v(w)` is the
//! conjunction of `x ≤ slope·w + intercept` over the pieces.

use std::collections::{BTreeMap, VecDeque};

use num::{One, Signed, Zero};

use super::certificate::{Certificate, ChildStep, Holder, Improving, Status, Step, TreeNode};
use super::profile::ImprovingProfile;
use super::ExponentError;
use crate::graph::{Graph, Subgraph};
use crate::lp::{Lp, Relation};
use crate::rational::{self, q, qi, Q};

/// Root enumeration threshold; larger trees use the centroid.
pub const ALL_ROOTS_MAX_N: usize = 12;

#[derive(Clone, Debug)]
pub struct TreeSolution {
    pub node: TreeNode,
    pub exponents: BTreeMap<usize, Q>,
    pub sum: Q,
}

struct Rooted {
    order: Vec<usize>,
    children: BTreeMap<usize, Vec<usize>>,
    depth: BTreeMap<usize, u32>,
}

fn root_tree(tree: &Subgraph, root: usize) -> Rooted {
    let adj = tree.neighbors();
    let mut order = vec![root];
    let mut parent = BTreeMap::new();
    let mut children: BTreeMap<usize, Vec<usize>> = tree.vertices.iter().map(|&v| (v, Vec::new())).collect();
    let mut depth = BTreeMap::from([(root, 0u32)]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[&v] {
            if Some(&w) == parent.get(&v) || w == root || parent.contains_key(&w) {
                continue;
            }
            parent.insert(w, v);
            children.get_mut(&v).expect("vertex").push(w);
            depth.insert(w, depth[&v] + 1);
            order.push(w);
            queue.push_back(w);
        }
    }
    Rooted {
        order,
        children,
        depth,
    }
}

/// Variables: `u_v` for every vertex (label order), then `w_c` for every
/// non-root vertex (label order).
struct Layout {
    u: BTreeMap<usize, usize>,
    w: BTreeMap<usize, usize>,
    width: usize,
}

fn layout(tree: &Subgraph, root: usize) -> Layout {
    let u: BTreeMap<usize, usize> = tree.vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let n = u.len();
    let w: BTreeMap<usize, usize> = tree
        .vertices
        .iter()
        .filter(|&&v| v != root)
        .enumerate()
        .map(|(k, &v)| (v, n + k))
        .collect();
    let width = n + w.len();
    Layout { u, w, width }
}

fn base_lp(rooted: &Rooted, lay: &Layout, root: usize, budget: &Q, profile: &ImprovingProfile, guard: bool) -> Lp {
    let mut lp = Lp::new(lay.width);
    let zero_row = || vec![Q::zero(); lay.width];

    let mut r = zero_row();
    r[lay.u[&root]] = Q::one();
    for c in &rooted.children[&root] {
        r[lay.w[c]] = Q::one();
    }
    lp.add(r, Relation::Eq, budget.clone());

    let pieces = profile.pieces();
    let n = qi(lay.u.len() as i64);
    for (&c, &wc) in &lay.w {
        for p in &pieces {
            // u_c + Σ w_d − slope·w_c ≤ intercept
            let mut r = zero_row();
            r[lay.u[&c]] = Q::one();
            for d in &rooted.children[&c] {
                r[lay.w[d]] = Q::one();
            }
            r[wc] -= &p.slope;
            lp.add(r, Relation::Le, p.intercept.clone());
        }
        if guard {
            // Geometric lower bounds stay feasible down every path.
            let mut floor = budget / qi(1000);
            for _ in 0..rooted.depth[&c] {
                floor /= qi(2) * &n;
            }
            lp.add_lower(wc, floor);
            lp.add_upper(wc, q(999, 1000));
        }
    }
    lp
}

fn solve_rooted(tree: &Subgraph, root: usize, budget: &Q, profile: &ImprovingProfile) -> Result<TreeSolution, ExponentError> {
    let rooted = root_tree(tree, root);
    let lay = layout(tree, root);
    if tree.vertices.len() > 1 && !budget.is_positive() {
        return Err(ExponentError::ZeroBudget { root });
    }
    for guard in [false, true] {
        let mut lp = base_lp(&rooted, &lay, root, budget, profile, guard);
        let mut sum_obj = vec![Q::zero(); lay.width];
        for &k in lay.u.values() {
            sum_obj[k] = Q::one();
        }
        let (_, best) = lp
            .maximize(&sum_obj)
            .optimal()
            .ok_or_else(|| ExponentError::Lp("tree program has no optimum".into()))?;
        lp.add(sum_obj, Relation::Eq, best);

        // Lexicographic maximum of the exponent vector.
        for &k in lay.u.values() {
            let mut obj = vec![Q::zero(); lay.width];
            obj[k] = Q::one();
            let (_, val) = lp
                .maximize(&obj)
                .optimal()
                .ok_or_else(|| ExponentError::Lp("lexicographic step failed".into()))?;
            let mut row = vec![Q::zero(); lay.width];
            row[k] = Q::one();
            lp.add(row, Relation::Eq, val);
        }

        // Center the budget split: maximize t ≤ w_c, t ≤ 1 − w_c.
        let w = if lay.w.is_empty() {
            Some(BTreeMap::new())
        } else {
            center_split(&lp, &lay)
        };
        if let Some(w) = w {
            let node = build_node(&rooted, root, budget, &w, profile);
            let mut exponents = BTreeMap::new();
            collect(&node, &mut exponents);
            let sum = exponents.values().fold(Q::zero(), |a, b| a + b);
            return Ok(TreeSolution { node, exponents, sum });
        }
    }
    Err(ExponentError::Lp("no strictly interior budget split".into()))
}

fn center_split(lp: &Lp, lay: &Layout) -> Option<BTreeMap<usize, Q>> {
    let t = lay.width;
    let mut ext = Lp::new(t + 1);
    for c in &lp.constraints {
        let mut coeffs = c.coeffs.clone();
        coeffs.push(Q::zero());
        ext.add(coeffs, c.relation, c.rhs.clone());
    }
    for &wc in lay.w.values() {
        let mut r = vec![Q::zero(); t + 1];
        r[t] = Q::one();
        r[wc] = -Q::one();
        ext.add(r.clone(), Relation::Le, Q::zero());
        r[wc] = Q::one();
        ext.add(r, Relation::Le, Q::one());
    }
    let mut obj = vec![Q::zero(); t + 1];
    obj[t] = Q::one();
    let (x, val) = ext.maximize(&obj).optimal()?;
    if !val.is_positive() {
        return None;
    }
    Some(lay.w.iter().map(|(&c, &k)| (c, x[k].clone())).collect())
}

fn build_node(rooted: &Rooted, v: usize, budget: &Q, w: &BTreeMap<usize, Q>, profile: &ImprovingProfile) -> TreeNode {
    let kids = &rooted.children[&v];
    let parts: Vec<Q> = kids.iter().map(|c| w[c].clone()).collect();
    let own = budget - rational::sum(&parts);
    let children = kids
        .iter()
        .map(|&c| {
            let output = w[&c].clone();
            let input = profile.eval(&output);
            ChildStep {
                vertex: c,
                subtree: build_node(rooted, c, &input, w, profile),
                improving: Improving { output, input },
            }
        })
        .collect();
    TreeNode {
        root: v,
        holder: Holder {
            budget: budget.clone(),
            own,
            parts,
        },
        children,
    }
}

fn collect(node: &TreeNode, out: &mut BTreeMap<usize, Q>) {
    out.insert(node.root, node.holder.own.clone());
    for c in &node.children {
        collect(&c.subtree, out);
    }
}

/// Centroid: a vertex whose largest remaining component is smallest
/// (smallest label on ties).
pub fn centroid(tree: &Subgraph) -> usize {
    let n = tree.vertices.len();
    let root = tree.vertices[0];
    let rooted = root_tree(tree, root);
    let mut size: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in rooted.order.iter().rev() {
        let s = 1 + rooted.children[&v].iter().map(|c| size[c]).sum::<usize>();
        size.insert(v, s);
    }
    tree.vertices
        .iter()
        .copied()
        .min_by_key(|&v| {
            let down = rooted.children[&v].iter().map(|c| size[c]).max().unwrap_or(0);
            let up = n - size[&v];
            (down.max(up), v)
        })
        .expect("nonempty tree")
}

/// Best allocation over candidate roots: larger sum, then lexicographically
/// larger exponent vector.
pub fn solve_tree(tree: &Subgraph, budget: &Q, profile: &ImprovingProfile) -> Result<TreeSolution, ExponentError> {
    if !tree.is_tree() {
        return Err(ExponentError::NotATree);
    }
    let roots: Vec<usize> = if tree.vertices.len() <= ALL_ROOTS_MAX_N {
        tree.vertices.clone()
    } else {
        vec![centroid(tree)]
    };
    let mut best: Option<(TreeSolution, Vec<Q>)> = None;
    for r in roots {
        let sol = solve_rooted(tree, r, budget, profile)?;
        let key: Vec<Q> = sol.exponents.values().cloned().collect();
        let better = match &best {
            None => true,
            Some((b, bk)) => sol.sum > b.sum || (sol.sum == b.sum && key > *bk),
        };
        if better {
            best = Some((sol, key));
        }
    }
    Ok(best.expect("at least one root").0)
}

/// Allocation with a fixed root, as needed for pendant trees whose root is a
/// core vertex.
pub fn solve_tree_at(tree: &Subgraph, root: usize, budget: &Q, profile: &ImprovingProfile) -> Result<TreeSolution, ExponentError> {
    if !tree.is_tree() {
        return Err(ExponentError::NotATree);
    }
    if !tree.contains(root) {
        return Err(ExponentError::Mismatch(format!("root {root} is not in the tree")));
    }
    solve_rooted(tree, root, budget, profile)
}

/// Certificate for a whole tree (or a tree-shaped piece with its labels).
pub fn certify_tree_sub(tree: &Subgraph, profile: &ImprovingProfile, dimension: u32) -> Result<Certificate, ExponentError> {
    profile.validate()?;
    if !tree.is_tree() {
        return Err(ExponentError::NotATree);
    }
    if tree.vertices.len() == 1 {
        let g = tree.to_graph().expect("single vertex");
        let mut c = Certificate::unknown(&g, "a single vertex admits no estimate beyond the trivial sum 1", dimension, profile);
        c.labels = (tree.vertices[0] != 1).then(|| tree.vertices.clone());
        return Ok(c);
    }
    let sol = solve_tree(tree, &Q::one(), profile)?;
    let status = if sol.sum > Q::one() { Status::Proven } else { Status::Unknown };
    Ok(Certificate::assemble(
        tree,
        &sol.exponents,
        status,
        Step::TreeRecursion(sol.node),
        Vec::new(),
        dimension,
        profile,
    ))
}

pub fn certify_tree(g: &Graph, profile: &ImprovingProfile) -> Result<Certificate, ExponentError> {
    if !crate::graph::is_tree(g) {
        return Err(ExponentError::NotATree);
    }
    let d = dimension_of(profile);
    certify_tree_sub(&g.to_subgraph(), profile, d)
}

/// Recovers `d` from a circle profile's corner `(1/(d+1), d/(d+1))`; falls
/// back to 2 for other profiles.
pub(crate) fn dimension_of(profile: &ImprovingProfile) -> u32 {
    use num::ToPrimitive;
    if profile.breakpoints.len() == 3 {
        let u = &profile.breakpoints[1].u;
        if u.numer().is_one() {
            if let Some(d) = (u.denom() - 1u32).to_u32() {
                if d >= 2 && profile.breakpoints[1].v == rational::q(i64::from(d), i64::from(d) + 1) {
                    return d;
                }
            }
        }
    }
    2
}
