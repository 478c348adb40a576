use rayon::prelude::*;

use super::{pairwise_sum, EstimatorError};

/// Samples of a function on the square `[-L, L]²` at spacing `h`, with
/// `L = k·h`. Node `(ix, iy)` sits at `((ix − k)h, (iy − k)h)` and the values
/// are stored row by row (`iy` major). Off-grid points are evaluated by
/// bilinear interpolation, and the field is zero outside the square.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    h: f64,
    k: usize,
    values: Vec<f64>,
}

/// Where a field is nonzero, seen from the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Support {
    /// No nonzero node.
    pub empty: bool,
    /// Every node on the outer ring is zero, so zero extension is exact.
    pub compact: bool,
    /// Common value when all nodes are equal.
    pub constant: Option<f64>,
    /// Smallest and largest distance of a nonzero node from the origin.
    pub rho_in: f64,
    pub rho_out: f64,
}

impl GridField {
    pub fn new(h: f64, k: usize, values: Vec<f64>) -> Result<Self, EstimatorError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(EstimatorError::InvalidParameter(format!("spacing must be positive, got {h}")));
        }
        if (k as f64) * h < 1.0 + h - 1e-12 {
            return Err(EstimatorError::InvalidParameter(format!(
                "half-width {} must be at least 1 + h = {}",
                k as f64 * h,
                1.0 + h
            )));
        }
        let side = 2 * k + 1;
        if values.len() != side * side {
            return Err(EstimatorError::InvalidParameter(format!(
                "expected {} values, got {}",
                side * side,
                values.len()
            )));
        }
        Ok(GridField { h, k, values })
    }

    /// Smallest `k` with `k·h ≥ half_width`.
    pub fn cells_for(half_width: f64, h: f64) -> usize {
        (half_width / h - 1e-9).ceil().max(1.0) as usize
    }

    pub fn from_fn(h: f64, k: usize, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self, EstimatorError> {
        let side = 2 * k + 1;
        let values: Vec<f64> = (0..side)
            .into_par_iter()
            .flat_map_iter(|iy| {
                let y = (iy as f64 - k as f64) * h;
                let f = &f;
                (0..side).map(move |ix| f((ix as f64 - k as f64) * h, y))
            })
            .collect();
        GridField::new(h, k, values)
    }

    pub fn constant(h: f64, k: usize, c: f64) -> Result<Self, EstimatorError> {
        let side = 2 * k + 1;
        GridField::new(h, k, vec![c; side * side])
    }

    pub fn zeros_like(&self) -> GridField {
        GridField {
            h: self.h,
            k: self.k,
            values: vec![0.0; self.values.len()],
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn side(&self) -> usize {
        2 * self.k + 1
    }

    pub fn half_width(&self) -> f64 {
        self.k as f64 * self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.k as f64) * self.h
    }

    /// Position of the node with flat index `idx`.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let side = self.side();
        (self.coord(idx % side), self.coord(idx / side))
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        self.k == other.k && self.h == other.h
    }

    /// Node value, zero outside the grid.
    pub fn at(&self, ix: isize, iy: isize) -> f64 {
        let side = self.side() as isize;
        if ix < 0 || iy < 0 || ix >= side || iy >= side {
            return 0.0;
        }
        self.values[(iy * side + ix) as usize]
    }

    #[inline]
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let k = self.k as f64;
        let fx = x / self.h + k;
        let fy = y / self.h + k;
        let x0 = fx.floor();
        let y0 = fy.floor();
        let tx = fx - x0;
        let ty = fy - y0;
        let side = self.side();
        let (ix, iy) = (x0 as isize, y0 as isize);
        let (v00, v10, v01, v11) = if ix >= 0 && iy >= 0 && (ix as usize) + 1 < side && (iy as usize) + 1 < side {
            let base = iy as usize * side + ix as usize;
            (
                self.values[base],
                self.values[base + 1],
                self.values[base + side],
                self.values[base + side + 1],
            )
        } else {
            (
                self.at(ix, iy),
                self.at(ix + 1, iy),
                self.at(ix, iy + 1),
                self.at(ix + 1, iy + 1),
            )
        };
        (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
    }

    pub fn support(&self) -> Support {
        let side = self.side();
        let first = self.values[0];
        let mut constant = true;
        let mut compact = true;
        let mut empty = true;
        let (mut rho_in, mut rho_out) = (f64::INFINITY, 0.0f64);
        for (idx, &v) in self.values.iter().enumerate() {
            if v != first {
                constant = false;
            }
            if v == 0.0 {
                continue;
            }
            empty = false;
            let (ix, iy) = (idx % side, idx / side);
            if ix == 0 || iy == 0 || ix == side - 1 || iy == side - 1 {
                compact = false;
            }
            let (x, y) = (self.coord(ix), self.coord(iy));
            let r = x.hypot(y);
            rho_in = rho_in.min(r);
            rho_out = rho_out.max(r);
        }
        if empty {
            rho_in = 0.0;
        }
        Support {
            empty,
            compact,
            constant: constant.then_some(first),
            rho_in,
            rho_out,
        }
    }

    /// Flat indices of the nonzero nodes, in storage order.
    pub fn nonzero_indices(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `h² Σ v`.
    pub fn integral(&self) -> f64 {
        self.h * self.h * pairwise_sum(&self.values)
    }

    /// Translates by whole cells; values shifted off the grid are dropped
    /// and vacated nodes become zero.
    pub fn shifted(&self, dx: isize, dy: isize) -> GridField {
        let side = self.side() as isize;
        let mut out = self.zeros_like();
        for iy in 0..side {
            for ix in 0..side {
                out.values[(iy * side + ix) as usize] = self.at(ix - dx, iy - dy);
            }
        }
        out
    }

    /// Pointwise product; both fields must share the grid.
    pub fn product(&self, other: &GridField) -> Result<GridField, EstimatorError> {
        if !self.same_grid(other) {
            return Err(EstimatorError::GridMismatch("product of fields on different grids".into()));
        }
        Ok(GridField {
            h: self.h,
            k: self.k,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn scaled(&self, c: f64) -> GridField {
        GridField {
            h: self.h,
            k: self.k,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// Discrete `L^p` norm with cell weight `h²`; `p = ∞` gives the max norm.
pub fn lp_norm(f: &GridField, p: f64) -> Result<f64, EstimatorError> {
    if p.is_nan() || p < 1.0 {
        return Err(EstimatorError::InvalidParameter(format!("norm exponent must be at least 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let terms: Vec<f64> = f.values.par_iter().map(|v| v.abs().powf(p)).collect();
    Ok((f.h * f.h * pairwise_sum(&terms)).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> GridField {
        GridField::from_fn(0.25, 8, |x, y| 2.0 * x - y + 0.5).unwrap()
    }

    #[test]
    fn interpolation_reproduces_nodes_and_affine_functions() {
        let f = ramp();
        assert_eq!(f.interpolate(0.5, -0.25), 2.0 * 0.5 + 0.25 + 0.5);
        let v = f.interpolate(0.3, 0.17);
        assert!((v - (0.6 - 0.17 + 0.5)).abs() < 1e-12);
        assert_eq!(f.interpolate(5.0, 0.0), 0.0);
    }

    #[test]
    fn support_of_a_disk() {
        let f = GridField::from_fn(0.125, 16, |x, y| if x.hypot(y) <= 0.5 { 1.0 } else { 0.0 }).unwrap();
        let s = f.support();
        assert!(s.compact && !s.empty && s.constant.is_none());
        assert_eq!(s.rho_in, 0.0);
        assert_eq!(s.rho_out, 0.5);
        let c = GridField::constant(0.125, 16, 1.0).unwrap();
        assert_eq!(c.support().constant, Some(1.0));
        assert!(!c.support().compact);
    }

    #[test]
    fn invariants_are_checked() {
        assert!(GridField::new(0.0, 10, vec![0.0; 441]).is_err());
        assert!(GridField::new(0.25, 2, vec![0.0; 25]).is_err());
        assert!(GridField::new(0.25, 8, vec![0.0; 3]).is_err());
        assert!(lp_norm(&ramp(), 0.5).is_err());
    }

    #[test]
    fn constant_max_norm_is_one() {
        let c = GridField::constant(0.1, 12, 1.0).unwrap();
        assert_eq!(lp_norm(&c, f64::INFINITY).unwrap(), 1.0);
        let one = lp_norm(&c, 1.0).unwrap();
        assert!((one - (2.5f64 * 2.5)).abs() < 1e-9);
    }

    #[test]
    fn shift_moves_values() {
        let f = ramp();
        let s = f.shifted(1, 0);
        assert_eq!(s.at(5, 5), f.at(4, 5));
        assert_eq!(s.at(0, 3), 0.0);
    }
}
