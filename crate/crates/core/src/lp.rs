//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `max c·x` subject to rows `a·x (≤ | = | ≥) b` and `x ≥ 0`. Bland's
//! rule guarantees termination, and exact arithmetic rules out the tolerance
//! issues of a floating tableau.

use num::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

impl Constraint {
    pub fn new(coeffs: Vec<Q>, relation: Relation, rhs: Q) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Vec<Q>, Q)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

impl Lp {
    pub fn new(num_vars: usize) -> Self {
        Lp {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<Q>, relation: Relation, rhs: Q) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    /// Adds `x_var ≤ bound`.
    pub fn add_upper(&mut self, var: usize, bound: Q) {
        let mut c = vec![Q::zero(); self.num_vars];
        c[var] = Q::one();
        self.add(c, Relation::Le, bound);
    }

    /// Adds `x_var ≥ bound`.
    pub fn add_lower(&mut self, var: usize, bound: Q) {
        let mut c = vec![Q::zero(); self.num_vars];
        c[var] = Q::one();
        self.add(c, Relation::Ge, bound);
    }

    pub fn maximize(&self, objective: &[Q]) -> LpOutcome {
        assert_eq!(objective.len(), self.num_vars, "objective width");
        let neg: Vec<Q> = objective.iter().map(|c| -c).collect();
        match self.minimize(&neg) {
            LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x, value: -value },
            other => other,
        }
    }

    pub fn feasible_point(&self) -> Option<Vec<Q>> {
        self.minimize(&vec![Q::zero(); self.num_vars]).optimal().map(|(x, _)| x)
    }

    pub fn minimize(&self, objective: &[Q]) -> LpOutcome {
        Tableau::build(self).solve(objective)
    }
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
    num_vars: usize,
    /// Columns `>= first_artificial` are artificial.
    first_artificial: usize,
    width: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Tableau {
        let n = lp.num_vars;
        let m = lp.constraints.len();
        // Normalize to rhs ≥ 0.
        let normalized: Vec<(Vec<Q>, Relation, Q)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    let rel = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|a| -a).collect(), rel, -c.rhs.clone())
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();
        let slacks = normalized.iter().filter(|c| c.1 != Relation::Eq).count();
        let artificials = normalized.iter().filter(|c| c.1 != Relation::Le).count();
        let first_artificial = n + slacks;
        let width = first_artificial + artificials;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (n, first_artificial);
        for (coeffs, rel, b) in normalized {
            let mut row = vec![Q::zero(); width];
            row[..n].clone_from_slice(&coeffs);
            match rel {
                Relation::Le => {
                    row[s] = Q::one();
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -Q::one();
                    s += 1;
                    row[a] = Q::one();
                    basis.push(a);
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = Q::one();
                    basis.push(a);
                    a += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        Tableau {
            rows,
            rhs,
            basis,
            num_vars: n,
            first_artificial,
            width,
        }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Q], obj_value: &mut Q) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            *obj_value += &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Reduced costs `c_j − c_B B⁻¹ A_j` and current value `c_B·b`.
    fn reduced(&self, cost: &[Q]) -> (Vec<Q>, Q) {
        let mut obj = cost.to_vec();
        let mut value = Q::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *o -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        (obj, value)
    }

    /// Minimizes with Bland's rule; `allowed` bounds the entering columns.
    fn run(&mut self, cost: &[Q], allowed: usize) -> Result<Q, ()> {
        let (mut obj, mut value) = self.reduced(cost);
        loop {
            let Some(c) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return Ok(value);
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Err(());
            };
            self.pivot(r, c, &mut obj, &mut value);
        }
    }

    fn solve(mut self, objective: &[Q]) -> LpOutcome {
        if self.first_artificial < self.width {
            let mut phase1 = vec![Q::zero(); self.width];
            for v in phase1.iter_mut().skip(self.first_artificial) {
                *v = Q::one();
            }
            let value = self.run(&phase1, self.width).expect("phase one is bounded below by zero");
            if value.is_positive() {
                return LpOutcome::Infeasible;
            }
            self.expel_artificials();
        }
        let mut cost = vec![Q::zero(); self.width];
        cost[..self.num_vars].clone_from_slice(objective);
        match self.run(&cost, self.first_artificial) {
            Err(()) => LpOutcome::Unbounded,
            Ok(value) => {
                let mut x = vec![Q::zero(); self.num_vars];
                for (i, &b) in self.basis.iter().enumerate() {
                    if b < self.num_vars {
                        x[b] = self.rhs[i].clone();
                    }
                }
                LpOutcome::Optimal { x, value }
            }
        }
    }

    /// Pivots zero-level artificials out of the basis, dropping redundant rows.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                Some(c) => {
                    let mut dummy_obj = vec![Q::zero(); self.width];
                    let mut dummy_val = Q::zero();
                    self.pivot(i, c, &mut dummy_obj, &mut dummy_val);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = Lp::new(2);
        lp.add(v(&[1, 0]), Relation::Le, qi(4));
        lp.add(v(&[0, 2]), Relation::Le, qi(12));
        lp.add(v(&[3, 2]), Relation::Le, qi(18));
        let (x, val) = lp.maximize(&v(&[3, 5])).optimal().unwrap();
        assert_eq!(x, v(&[2, 6]));
        assert_eq!(val, qi(36));
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y, x + 2y = 3, x ≥ 1/2 → x = 1/2... check y = 5/4
        let mut lp = Lp::new(2);
        lp.add(v(&[1, 2]), Relation::Eq, qi(3));
        lp.add_lower(0, q(1, 2));
        let (x, val) = lp.minimize(&v(&[1, 1])).optimal().unwrap();
        assert_eq!(x, vec![q(1, 2), q(5, 4)]);
        assert_eq!(val, q(7, 4));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.add(v(&[1]), Relation::Ge, qi(2));
        lp.add(v(&[1]), Relation::Le, qi(1));
        assert_eq!(lp.maximize(&v(&[1])), LpOutcome::Infeasible);

        let mut lp = Lp::new(2);
        lp.add(v(&[1, -1]), Relation::Le, qi(1));
        assert_eq!(lp.maximize(&v(&[1, 0])), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = Lp::new(2);
        lp.add(v(&[1, 1]), Relation::Eq, qi(1));
        lp.add(v(&[2, 2]), Relation::Eq, qi(2));
        let (x, val) = lp.maximize(&v(&[1, 0])).optimal().unwrap();
        assert_eq!(x, v(&[1, 0]));
        assert_eq!(val, qi(1));
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // -x ≤ -2  ⇔  x ≥ 2
        let mut lp = Lp::new(1);
        lp.add(v(&[-1]), Relation::Le, qi(-2));
        let (x, _) = lp.minimize(&v(&[1])).optimal().unwrap();
        assert_eq!(x, v(&[2]));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let mut lp = Lp::new(4);
        lp.add(vec![q(1, 4), qi(-60), q(-1, 25), qi(9)], Relation::Le, qi(0));
        lp.add(vec![q(1, 2), qi(-90), q(-1, 50), qi(3)], Relation::Le, qi(0));
        lp.add(v(&[0, 0, 1, 0]), Relation::Le, qi(1));
        let (_, val) = lp.maximize(&[q(3, 4), qi(-150), q(1, 50), qi(-6)]).optimal().unwrap();
        assert_eq!(val, q(1, 20));
    }
}
