//! Exact-rational exponent calculus: improving profiles, necessary-condition
//! systems, sufficient polytopes, and certificates for the composition rules.

pub mod certificate;
pub mod certify;
pub mod compose;
pub mod halfspace;
pub mod polytope;
pub mod profile;
pub mod replay;
pub mod tree;

use thiserror::Error;

pub use certificate::{is_improving, is_nontrivial_at, Certificate, Status, Step};
pub use certify::{certify, certify_with, CertifyOptions};
pub use compose::{certify_contraction, certify_join};
pub use halfspace::{necessary_halfspaces, CaseKind, HalfspaceSystem, MembershipReport};
pub use polytope::{
    chain3_constructed_region, hull_membership, region_compare, regular_hull_vertices, sufficient_vertices, Outer,
    RegionComparison, VertexPolytope,
};
pub use profile::{improving_profile_circle, ImprovingProfile};
pub use replay::{is_valid, replay, ReplayError};
pub use tree::{certify_tree, certify_tree_sub};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExponentError {
    #[error("dimension d = {0} is not supported (need d >= 2)")]
    Dimension(u32),
    #[error("unknown kind `{0}` (expected triangle or chain3)")]
    UnknownKind(String),
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("graph is not a tree")]
    NotATree,
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    UnknownInput(String),
    #[error("missing non-trivial estimate at cut vertex {cut}")]
    MissingNontrivial { cut: usize },
    #[error("pendant tree at {root} has a zero budget; no improving step is available")]
    ZeroBudget { root: usize },
    #[error("linear program: {0}")]
    Lp(String),
    #[error("invalid certificate JSON: {0}")]
    Json(String),
}
