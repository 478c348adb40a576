use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ExponentError;
use crate::rational::{self, q, qi, Q};

/// A breakpoint `(u, v)` of a piecewise-linear profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breakpoint {
    #[serde(with = "rational")]
    pub u: Q,
    #[serde(with = "rational")]
    pub v: Q,
}

/// Piecewise-linear concave map `u ↦ v(u)` on `[0, 1]`: an averaging operator
/// bounded `L^p → L^q` with `1/q = u` may take `1/p = v(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprovingProfile {
    pub breakpoints: Vec<Breakpoint>,
}

/// One linear piece `v = slope·u + intercept` of the profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub slope: Q,
    pub intercept: Q,
}

impl ImprovingProfile {
    pub fn from_points(points: &[(Q, Q)]) -> Result<Self, ExponentError> {
        let p = ImprovingProfile {
            breakpoints: points
                .iter()
                .map(|(u, v)| Breakpoint { u: u.clone(), v: v.clone() })
                .collect(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks concavity, monotonicity, the endpoints `v(0) = 0`, `v(1) = 1`
    /// and `v(u) ≥ u`.
    pub fn validate(&self) -> Result<(), ExponentError> {
        let bad = |why: &str| Err(ExponentError::InvalidProfile(why.to_string()));
        let b = &self.breakpoints;
        if b.len() < 2 {
            return bad("need at least two breakpoints");
        }
        if !b[0].u.is_zero() || !b[0].v.is_zero() {
            return bad("profile must start at (0, 0)");
        }
        let last = b.last().expect("nonempty");
        if !last.u.is_one() || !last.v.is_one() {
            return bad("profile must end at (1, 1)");
        }
        for pair in b.windows(2) {
            if pair[1].u <= pair[0].u {
                return bad("breakpoints must have strictly increasing u");
            }
            if pair[1].v < pair[0].v {
                return bad("profile must be nondecreasing");
            }
        }
        let slopes: Vec<Q> = self.pieces().into_iter().map(|p| p.slope).collect();
        if slopes.windows(2).any(|s| s[1] > s[0]) {
            return bad("profile must be concave");
        }
        if b.iter().any(|p| p.v < p.u) {
            return bad("profile must satisfy v(u) >= u");
        }
        Ok(())
    }

    pub fn pieces(&self) -> Vec<Piece> {
        self.breakpoints
            .windows(2)
            .map(|w| {
                let slope = (&w[1].v - &w[0].v) / (&w[1].u - &w[0].u);
                let intercept = &w[0].v - &slope * &w[0].u;
                Piece { slope, intercept }
            })
            .collect()
    }

    /// `v(u)` for `u ∈ [0, 1]`. Concavity makes this the minimum over pieces.
    pub fn eval(&self, u: &Q) -> Q {
        assert!(rational::in_unit_interval(u), "profile argument outside [0, 1]");
        self.pieces()
            .into_iter()
            .map(|p| p.slope * u + p.intercept)
            .min()
            .expect("profile has pieces")
    }

    /// The profile has a strict improvement at `u`: `0 < u < 1` and `v(u) > u`.
    pub fn improves_at(&self, u: &Q) -> bool {
        u.is_positive() && *u < Q::one() && self.eval(u) > *u
    }
}

/// The circle (sphere) averaging profile in dimension `d`, corners
/// `(0,0)`, `(1/(d+1), d/(d+1))`, `(1,1)`.
pub fn improving_profile_circle(d: u32) -> Result<ImprovingProfile, ExponentError> {
    if d < 2 {
        return Err(ExponentError::Dimension(d));
    }
    let d = i64::from(d);
    ImprovingProfile::from_points(&[(qi(0), qi(0)), (q(1, d + 1), q(d, d + 1)), (qi(1), qi(1))])
}

/// Vertices of the `(1/p, 1/q)` boundedness triangle: `(0,0)`, `(1,1)`,
/// `(d/(d+1), 1/(d+1))`.
pub fn strichartz_triangle(d: u32) -> Result<[(Q, Q); 3], ExponentError> {
    if d < 2 {
        return Err(ExponentError::Dimension(d));
    }
    let d = i64::from(d);
    Ok([(qi(0), qi(0)), (qi(1), qi(1)), (q(d, d + 1), q(1, d + 1))])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_profile_values() {
        let p = improving_profile_circle(2).unwrap();
        assert_eq!(p.eval(&qi(0)), qi(0));
        assert_eq!(p.eval(&q(1, 3)), q(2, 3));
        assert_eq!(p.eval(&q(2, 3)), q(5, 6));
        assert_eq!(p.eval(&qi(1)), qi(1));
        assert_eq!(p.eval(&q(1, 6)), q(1, 3));
        let p3 = improving_profile_circle(3).unwrap();
        assert_eq!(p3.eval(&q(1, 4)), q(3, 4));
        assert!(improving_profile_circle(1).is_err());
    }

    #[test]
    fn concavity_on_breakpoints_and_midpoints() {
        for d in 2..6 {
            let p = improving_profile_circle(d).unwrap();
            let mut pts: Vec<Q> = p.breakpoints.iter().map(|b| b.u.clone()).collect();
            let mids: Vec<Q> = pts.windows(2).map(|w| (&w[0] + &w[1]) / qi(2)).collect();
            pts.extend(mids);
            pts.sort();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    for c in b + 1..pts.len() {
                        let (u1, u2, u3) = (&pts[a], &pts[b], &pts[c]);
                        let t = (u2 - u1) / (u3 - u1);
                        let chord = p.eval(u1) * (qi(1) - &t) + p.eval(u3) * t;
                        assert!(p.eval(u2) >= chord);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_profiles() {
        let convex = [(qi(0), qi(0)), (q(1, 2), q(1, 4)), (qi(1), qi(1))];
        assert!(ImprovingProfile::from_points(&convex).is_err());
        let bad_end = [(qi(0), qi(0)), (qi(1), q(1, 2))];
        assert!(ImprovingProfile::from_points(&bad_end).is_err());
    }
}
