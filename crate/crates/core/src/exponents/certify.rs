//! End-to-end certification: trees directly, everything else through the
//! 2-core, its blocks, joins along the block tree and re-attached pendant
//! trees.

use std::collections::BTreeMap;

use num::Zero;
use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, Status, Step};
use super::compose::{certify_contraction, join_with_reserve, CutReserve};
use super::halfspace::CaseKind;
use super::profile::{improving_profile_circle, ImprovingProfile};
use super::tree::{certify_tree, certify_tree_sub};
use super::ExponentError;
use crate::graph::{block_decomposition_of, contract_pendant_trees, is_tree, Graph, Subgraph};
use crate::rational::{fmt_q, q, qi, Q};
use crate::rigidity::{self, RankPolicy, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub dimension: u32,
    /// Seeds for the regularity probe of blocks beyond edges and triangles.
    pub probe_seeds: usize,
    pub probe_seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            dimension: 2,
            probe_seeds: 16,
            probe_seed: 0,
        }
    }
}

pub fn certify(g: &Graph) -> Certificate {
    certify_with(g, &CertifyOptions::default()).expect("default options are valid")
}

/// Runs the pipeline. Only invalid options are errors; a graph that cannot be
/// certified yields a certificate with status `unknown`.
pub fn certify_with(g: &Graph, opts: &CertifyOptions) -> Result<Certificate, ExponentError> {
    let profile = improving_profile_circle(opts.dimension)?;
    let d = opts.dimension;
    if g.n() == 1 {
        return Ok(Certificate::unknown(
            g,
            "a single vertex admits no estimate beyond the trivial sum 1",
            d,
            &profile,
        ));
    }
    if is_tree(g) {
        return certify_tree(g, &profile);
    }
    let dec = contract_pendant_trees(g);
    let blocks = block_decomposition_of(&dec.core);
    let pendant_roots: Vec<usize> = dec.pendant_forest.iter().map(|p| p.root).collect();

    let mut certs = Vec::with_capacity(blocks.blocks.len());
    for b in &blocks.blocks {
        match certify_block(b, &profile, opts) {
            Ok(c) => certs.push(c),
            Err(reason) => return Ok(Certificate::unknown(g, reason, d, &profile)),
        }
    }

    let mut acc = certs[0].clone();
    for (k, link) in blocks.block_tree.iter().enumerate() {
        let reused = blocks.block_tree[k + 1..].iter().any(|l| l.cut == link.cut) || pendant_roots.contains(&link.cut);
        let reserve = if reused { CutReserve::Half } else { CutReserve::None };
        acc = match join_with_reserve(link.cut, &acc, &certs[link.child], reserve) {
            Ok(c) => c,
            Err(e) => return Ok(Certificate::unknown(g, format!("join at {} failed: {e}", link.cut), d, &profile)),
        };
    }

    if dec.pendant_forest.is_empty() {
        return Ok(acc);
    }
    match certify_contraction(g, &acc) {
        Ok(c) => Ok(c),
        Err(e) => Ok(Certificate::unknown(g, format!("contraction failed: {e}"), d, &profile)),
    }
}

fn certify_block(b: &Subgraph, profile: &ImprovingProfile, opts: &CertifyOptions) -> Result<Certificate, String> {
    let d = opts.dimension;
    if b.edges.len() == 1 {
        return certify_tree_sub(b, profile, d).map_err(|e| e.to_string());
    }
    if b.is_triangle() && d == 2 {
        let point = vec![q(1, 2); 3];
        let map: BTreeMap<usize, Q> = b.vertices.iter().map(|&v| (v, q(1, 2))).collect();
        let step = Step::CaseStudyVertex {
            polytope: CaseKind::Triangle,
            vertices: b.vertices.clone(),
            point,
        };
        return Ok(Certificate::assemble(b, &map, Status::Proven, step, Vec::new(), d, profile));
    }
    if d != 2 {
        return Err(format!(
            "block {:?}: only edges and triangles are handled for d = {d}",
            b.vertices
        ));
    }
    let g = b.to_graph().map_err(|e| e.to_string())?;
    let report = rigidity::regularity_probe(&g, opts.probe_seeds, opts.probe_seed, RankPolicy::default());
    if report.verdict != Verdict::RegularAtAllSamples {
        return Err(format!(
            "block {:?}: regularity probe verdict {} at {} seeds",
            b.vertices, report.verdict, opts.probe_seeds
        ));
    }
    let mut assumptions = vec![
        format!(
            "block {:?}: the unit distance vector is taken to be a regular value; supported only by {} sampled realizations",
            b.vertices, report.found
        ),
        format!(
            "block {:?}: the hull bound is taken to supply the improving hypotheses used by joins and contractions",
            b.vertices
        ),
    ];
    if let Some(w) = collinear_warning(&g, b) {
        assumptions.push(w);
    }
    // Barycenter of the edge points (2/3)(eᵢ + eⱼ): positive at every vertex.
    let m = qi(b.edges.len() as i64);
    let mut deg: BTreeMap<usize, i64> = b.vertices.iter().map(|&v| (v, 0)).collect();
    for &(i, j) in &b.edges {
        *deg.get_mut(&i).expect("vertex") += 1;
        *deg.get_mut(&j).expect("vertex") += 1;
    }
    let map: BTreeMap<usize, Q> = deg.iter().map(|(&v, &k)| (v, q(2, 3) * qi(k) / &m)).collect();
    let point: Vec<Q> = b.vertices.iter().map(|v| map[v].clone()).collect();
    let step = Step::RegularHull {
        vertices: b.vertices.clone(),
        edges: b.edges.clone(),
        point,
    };
    Ok(Certificate::assemble(b, &map, Status::Conditional, step, assumptions, d, profile))
}

/// A degenerate realization reached from the collinear breadth-first layout
/// refutes regularity at that point; it is recorded as a warning.
fn collinear_warning(g: &Graph, b: &Subgraph) -> Option<String> {
    let start = rigidity::collinear_start(g);
    let real = rigidity::solve_from(g, &start).ok()?;
    let jac = rigidity::rigidity_jacobian(g, &real.points).ok()?;
    let rank = rigidity::numerical_rank(&jac, RankPolicy::default()).rank;
    (rank < g.edge_count()).then(|| {
        format!(
            "block {:?}: warning: a realization with rigidity rank {rank} < {} exists, so the unit distance vector is not a regular value there",
            b.vertices,
            g.edge_count()
        )
    })
}

/// One-line summary used by the CLI.
pub fn summary(cert: &Certificate) -> String {
    if cert.status == Status::Unknown {
        return format!("status unknown: {}", cert.assumptions.join("; "));
    }
    let w: Vec<String> = cert.witness.iter().map(fmt_q).collect();
    let sum = if cert.sum.is_zero() { "0".into() } else { fmt_q(&cert.sum) };
    format!("status {} sum {} witness ({})", cert.status, sum, w.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::replay::replay;

    #[test]
    fn triangle_is_proven_at_one_half() {
        let c = certify(&Graph::complete(3));
        assert_eq!(c.status, Status::Proven);
        assert_eq!(c.witness, vec![q(1, 2); 3]);
        replay(&c).unwrap();
    }

    #[test]
    fn single_vertex_is_unknown() {
        let c = certify(&Graph::path(1));
        assert_eq!(c.status, Status::Unknown);
        replay(&c).unwrap();
    }

    #[test]
    fn two_triangles_share_a_vertex() {
        let g = Graph::new(5, [(1, 2), (2, 3), (1, 3), (3, 4), (3, 5), (4, 5)]).unwrap();
        let c = certify(&g);
        assert_eq!(c.status, Status::Proven);
        assert!(c.sum > qi(1));
        replay(&c).unwrap();
    }
}
