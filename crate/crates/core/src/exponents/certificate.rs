use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::halfspace::CaseKind;
use super::profile::ImprovingProfile;
use super::ExponentError;
use crate::graph::{Graph, Subgraph};
use crate::rational::{self, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Unknown,
    Conditional,
    Proven,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Unknown => "unknown",
            Status::Conditional => "conditional",
            Status::Proven => "proven",
        })
    }
}

/// Hölder split of a budget `1/q` into the holder's own exponent and one part
/// per child: `budget = own + Σ parts`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Holder {
    #[serde(with = "rational")]
    pub budget: Q,
    #[serde(with = "rational")]
    pub own: Q,
    #[serde(with = "rational::vec")]
    pub parts: Vec<Q>,
}

/// Bound of the averaging operator at output exponent `output = 1/q` from
/// input exponent `input = 1/p = v(output)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Improving {
    #[serde(with = "rational")]
    pub output: Q,
    #[serde(with = "rational")]
    pub input: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub root: usize,
    pub holder: Holder,
    pub children: Vec<ChildStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChildStep {
    pub vertex: usize,
    pub improving: Improving,
    pub subtree: TreeNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendantStep {
    pub root: usize,
    #[serde(with = "rational")]
    pub budget: Q,
    pub tree: TreeNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinStep {
    pub cut: usize,
    pub left: Box<Step>,
    pub right: Box<Step>,
    /// Left exponent at the cut, split as `own + part`.
    #[serde(with = "rational")]
    pub cut_exponent: Q,
    #[serde(with = "rational")]
    pub own: Q,
    #[serde(with = "rational")]
    pub part: Q,
    /// Interpolation weight between the right bound and the trivial bound
    /// that is `1` at the cut.
    #[serde(with = "rational")]
    pub scale: Q,
    #[serde(with = "rational")]
    pub right_cut_exponent: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    TreeRecursion(TreeNode),
    CaseStudyVertex {
        polytope: CaseKind,
        vertices: Vec<usize>,
        #[serde(with = "rational::vec")]
        point: Vec<Q>,
    },
    RegularHull {
        vertices: Vec<usize>,
        edges: Vec<(usize, usize)>,
        #[serde(with = "rational::vec")]
        point: Vec<Q>,
    },
    Contraction {
        core: Box<Step>,
        pendants: Vec<PendantStep>,
    },
    Join(JoinStep),
}

impl Step {
    pub fn is_conditional(&self) -> bool {
        match self {
            Step::TreeRecursion(_) | Step::CaseStudyVertex { .. } => false,
            Step::RegularHull { .. } => true,
            Step::Contraction { core, .. } => core.is_conditional(),
            Step::Join(j) => j.left.is_conditional() || j.right.is_conditional(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub graph: Graph,
    /// Original vertex labels of `graph`'s vertices `1..=n`, when the
    /// certificate covers a piece of a larger graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<usize>>,
    pub status: Status,
    /// Exponents `1/pᵢ` in vertex (label) order.
    #[serde(with = "rational::vec")]
    pub witness: Vec<Q>,
    #[serde(with = "rational")]
    pub sum: Q,
    pub derivation: Vec<Step>,
    pub assumptions: Vec<String>,
    pub dimension: u32,
    pub profile: ImprovingProfile,
}

impl Certificate {
    pub fn label_list(&self) -> Vec<usize> {
        match &self.labels {
            Some(l) => l.clone(),
            None => (1..=self.graph.n()).collect(),
        }
    }

    /// Edges in original labels.
    pub fn labelled_edges(&self) -> Vec<(usize, usize)> {
        let labels = self.label_list();
        let mut e: Vec<_> = self
            .graph
            .edges()
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (labels[i - 1], labels[j - 1]);
                (a.min(b), a.max(b))
            })
            .collect();
        e.sort_unstable();
        e
    }

    pub fn exponent_map(&self) -> BTreeMap<usize, Q> {
        self.label_list().into_iter().zip(self.witness.iter().cloned()).collect()
    }

    pub fn exponent_at(&self, label: usize) -> Option<Q> {
        self.exponent_map().remove(&label)
    }

    pub fn root_step(&self) -> Option<&Step> {
        self.derivation.first()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ExponentError> {
        serde_json::from_str(text).map_err(|e| ExponentError::Json(e.to_string()))
    }

    /// Builds a certificate over labelled vertices from an exponent map.
    pub(crate) fn assemble(
        sub: &Subgraph,
        map: &BTreeMap<usize, Q>,
        status: Status,
        step: Step,
        assumptions: Vec<String>,
        dimension: u32,
        profile: &ImprovingProfile,
    ) -> Certificate {
        let graph = sub.to_graph().expect("certified pieces are connected");
        let witness: Vec<Q> = sub.vertices.iter().map(|v| map[v].clone()).collect();
        let sum = rational::sum(&witness);
        let identity = sub.vertices.iter().enumerate().all(|(k, &v)| v == k + 1);
        Certificate {
            graph,
            labels: (!identity).then(|| sub.vertices.clone()),
            status,
            witness,
            sum,
            derivation: vec![step],
            assumptions,
            dimension,
            profile: profile.clone(),
        }
    }

    /// A certificate that records the absence of a derivation.
    pub fn unknown(g: &Graph, reason: impl Into<String>, dimension: u32, profile: &ImprovingProfile) -> Certificate {
        Certificate {
            graph: g.clone(),
            labels: None,
            status: Status::Unknown,
            witness: Vec::new(),
            sum: Q::zero(),
            derivation: Vec::new(),
            assumptions: vec![reason.into()],
            dimension,
            profile: profile.clone(),
        }
    }
}

/// `Σuᵢ > 1`: the bound beats the scaling baseline.
pub fn is_improving(x: &[Q]) -> bool {
    rational::sum(x) > Q::one()
}

/// `Σuᵢ ≥ 1` with a finite exponent at `vertex` (index into `x`).
pub fn is_nontrivial_at(x: &[Q], vertex: usize) -> bool {
    rational::sum(x) >= Q::one() && x.get(vertex).is_some_and(|u| *u > Q::zero())
}
