use std::fmt;
use std::str::FromStr;

use num::Zero;
use serde::{Deserialize, Serialize};

use super::ExponentError;
use crate::rational::{self, qi, Q};

/// The two trilinear case studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// `K₃`, the three mutually unit-distant points.
    Triangle,
    /// The path `x₁ – x₃ – x₂` with `x₃` in the middle.
    Chain3,
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseKind::Triangle => "triangle",
            CaseKind::Chain3 => "chain3",
        })
    }
}

impl FromStr for CaseKind {
    type Err = ExponentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "triangle" => Ok(CaseKind::Triangle),
            "chain3" => Ok(CaseKind::Chain3),
            other => Err(ExponentError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmp {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfspaceRow {
    /// Condition number within its theorem, starting at 1.
    pub number: usize,
    pub label: String,
    #[serde(with = "rational::vec")]
    pub coeffs: Vec<Q>,
    pub relation: Cmp,
    #[serde(with = "rational")]
    pub rhs: Q,
}

impl HalfspaceRow {
    pub fn value(&self, x: &[Q]) -> Q {
        self.coeffs.iter().zip(x).fold(Q::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        let v = self.value(x);
        match self.relation {
            Cmp::Le => v <= self.rhs,
            Cmp::Ge => v >= self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfspaceSystem {
    pub label: String,
    /// Ambient dimension `d` of the underlying kernel.
    pub d: u32,
    /// Number of exponent coordinates.
    pub dim: usize,
    pub rows: Vec<HalfspaceRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowEvaluation {
    pub number: usize,
    #[serde(with = "rational")]
    pub value: Q,
    #[serde(with = "rational")]
    pub rhs: Q,
    pub relation: Cmp,
    pub holds: bool,
    pub tight: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub satisfied: bool,
    pub violated: Vec<usize>,
    pub tight: Vec<usize>,
    pub rows: Vec<RowEvaluation>,
}

impl HalfspaceSystem {
    pub fn membership(&self, x: &[Q]) -> Result<MembershipReport, ExponentError> {
        if x.len() != self.dim {
            return Err(ExponentError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let rows: Vec<RowEvaluation> = self
            .rows
            .iter()
            .map(|r| {
                let value = r.value(x);
                RowEvaluation {
                    number: r.number,
                    holds: r.holds(x),
                    tight: value == r.rhs,
                    value,
                    rhs: r.rhs.clone(),
                    relation: r.relation,
                }
            })
            .collect();
        let violated: Vec<usize> = rows.iter().filter(|r| !r.holds).map(|r| r.number).collect();
        let tight = rows.iter().filter(|r| r.tight).map(|r| r.number).collect();
        Ok(MembershipReport {
            satisfied: violated.is_empty(),
            violated,
            tight,
            rows,
        })
    }
}

fn row(number: usize, coeffs: [i64; 3], relation: Cmp, rhs: i64) -> HalfspaceRow {
    let rel = match relation {
        Cmp::Le => "<=",
        Cmp::Ge => ">=",
    };
    HalfspaceRow {
        number,
        label: format!(
            "condition {number}: {}*u1 + {}*u2 + {}*u3 {rel} {rhs}",
            coeffs[0], coeffs[1], coeffs[2]
        ),
        coeffs: coeffs.iter().map(|&c| qi(c)).collect(),
        relation,
        rhs: qi(rhs),
    }
}

/// Necessary conditions on `(1/p₁, 1/p₂, 1/p₃)` for boundedness of the
/// trilinear form. For `Chain3` coordinate 3 is the middle vertex.
pub fn necessary_halfspaces(kind: CaseKind, d: u32) -> Result<HalfspaceSystem, ExponentError> {
    if d < 2 {
        return Err(ExponentError::Dimension(d));
    }
    let k = i64::from(d);
    let rows = match kind {
        CaseKind::Triangle => vec![
            row(1, [1, 1, 1], Cmp::Ge, 1),
            row(2, [1, 1, k], Cmp::Le, k),
            row(3, [1, k, 1], Cmp::Le, k),
            row(4, [k, 1, 1], Cmp::Le, k),
            row(5, [k + 1, k + 1, 2 * k], Cmp::Le, 3 * k - 1),
            row(6, [k + 1, 2 * k, k + 1], Cmp::Le, 3 * k - 1),
            row(7, [2 * k, k + 1, k + 1], Cmp::Le, 3 * k - 1),
        ],
        CaseKind::Chain3 => vec![
            row(1, [1, 1, 1], Cmp::Ge, 1),
            row(2, [1, 1, k], Cmp::Le, k),
            row(3, [k, k, 1], Cmp::Le, 2 * k - 1),
            row(4, [k, 0, 1], Cmp::Le, k),
            row(5, [0, k, 1], Cmp::Le, k),
        ],
    };
    Ok(HalfspaceSystem {
        label: format!("{kind} necessary conditions, d = {d}"),
        d,
        dim: 3,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn rows_match_the_stated_conditions() {
        let t = necessary_halfspaces(CaseKind::Triangle, 2).unwrap();
        assert_eq!(t.rows.len(), 7);
        assert_eq!(t.rows[4].coeffs, vec![qi(3), qi(3), qi(4)]);
        assert_eq!(t.rows[4].rhs, qi(5));
        let c = necessary_halfspaces(CaseKind::Chain3, 2).unwrap();
        assert_eq!(c.rows.len(), 5);
        assert_eq!(c.rows[2].coeffs, vec![qi(2), qi(2), qi(1)]);
        assert_eq!(c.rows[2].rhs, qi(3));
        assert_eq!(c.rows[0].relation, Cmp::Ge);
    }

    #[test]
    fn membership_examples() {
        let t = necessary_halfspaces(CaseKind::Triangle, 2).unwrap();
        let half = vec![q(1, 2); 3];
        let r = t.membership(&half).unwrap();
        assert!(r.satisfied);
        for n in [5, 6, 7] {
            assert!(r.tight.contains(&n));
            assert_eq!(r.rows[n - 1].value, qi(5));
        }

        let r = t.membership(&[qi(1), qi(1), qi(1)]).unwrap();
        assert!(!r.satisfied);
        assert!(r.violated.contains(&2));
        assert_eq!(r.rows[1].value, qi(4));

        for kind in [CaseKind::Triangle, CaseKind::Chain3] {
            let r = necessary_halfspaces(kind, 2).unwrap().membership(&[qi(0), qi(0), qi(0)]).unwrap();
            assert!(r.violated.contains(&1));
        }
        assert!(t.membership(&[qi(0)]).is_err());
    }

    #[test]
    fn parses_kinds() {
        assert_eq!("chain3".parse::<CaseKind>().unwrap(), CaseKind::Chain3);
        assert!("square".parse::<CaseKind>().is_err());
    }
}
