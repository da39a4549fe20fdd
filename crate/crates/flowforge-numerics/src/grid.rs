use serde::Serialize;

use crate::{Error, Result};

/// Uniform space-time grid on [T0, T1] × [0,1)^n with periodic space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub n: u32,
    pub m: usize,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(n: u32, m: usize, t0: f64, t1: f64, dt: f64) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::Domain(format!("grid dimension n = {n} must be 1 or 2")));
        }
        if m < 16 || !m.is_power_of_two() {
            return Err(Error::Domain(format!("M = {m} must be a power of two, at least 16")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("dt = {dt} must be positive")));
        }
        if !(t1 >= t0 && t0.is_finite() && t1.is_finite()) {
            return Err(Error::Domain(format!("time window [{t0}, {t1}] is empty")));
        }
        let q = (t1 - t0) / dt;
        if (q - q.round()).abs() > 1e-6 * q.max(1.0) {
            return Err(Error::Domain(format!("(T1 - T0)/dt = {q} is not an integer")));
        }
        Ok(GridSpec { n, m, t0, t1, dt })
    }

    /// Grid with the parabolic step dt = (1/M)²/4 on [0, T].
    pub fn parabolic(n: u32, m: usize, t: f64) -> Result<Self> {
        let dt = 0.25 / (m * m) as f64;
        let steps = (t / dt).round();
        GridSpec::new(n, m, 0.0, steps * dt, dt)
    }

    /// Number of time points, both endpoints included.
    pub fn steps(&self) -> usize {
        ((self.t1 - self.t0) / self.dt).round() as usize + 1
    }

    pub fn points(&self) -> usize {
        self.m.pow(self.n)
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Volume of one spatial cell.
    pub fn cell(&self) -> f64 {
        self.dx().powi(self.n as i32)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Coordinates of flattened spatial index j (row-major, last axis fastest).
    pub fn coords(&self, j: usize) -> [f64; 2] {
        let dx = self.dx();
        match self.n {
            1 => [j as f64 * dx, 0.0],
            _ => [(j / self.m) as f64 * dx, (j % self.m) as f64 * dx],
        }
    }

    pub fn with_window(&self, t0: f64, t1: f64) -> Result<Self> {
        GridSpec::new(self.n, self.m, t0, t1, self.dt)
    }

    /// ε ≥ 4/M and ε² ≥ 4·dt.
    pub fn check_resolves(&self, eps: f64) -> Result<()> {
        if eps < 4.0 / self.m as f64 - 1e-12 || eps * eps < 4.0 * self.dt * (1.0 - 1e-9) {
            return Err(Error::Resolution(format!(
                "eps = {eps} is not resolved by M = {}, dt = {:e} (need eps >= 4/M and eps^2 >= 4 dt)",
                self.m, self.dt
            )));
        }
        Ok(())
    }
}

/// Real field sampled on a grid, stored as (time, space) row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpaceTimeField { values: vec![0.0; grid.steps() * grid.points()], grid }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.steps() * grid.points() {
            return Err(Error::Contract(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.steps() * grid.points()
            )));
        }
        Ok(SpaceTimeField { grid, values })
    }

    /// Sample f(t, x) on every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, [f64; 2]) -> f64) -> Self {
        let p = grid.points();
        let mut values = Vec::with_capacity(grid.steps() * p);
        for i in 0..grid.steps() {
            let t = grid.time(i);
            values.extend((0..p).map(|j| f(t, grid.coords(j))));
        }
        SpaceTimeField { grid, values }
    }

    /// Time-constant field with the given spatial profile.
    pub fn constant_in_time(grid: GridSpec, slice: &[f64]) -> Self {
        let mut values = Vec::with_capacity(grid.steps() * slice.len());
        for _ in 0..grid.steps() {
            values.extend_from_slice(slice);
        }
        SpaceTimeField { grid, values }
    }

    pub fn steps(&self) -> usize {
        self.grid.steps()
    }

    pub fn slice(&self, i: usize) -> &[f64] {
        let p = self.grid.points();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn slice_mut(&mut self, i: usize) -> &mut [f64] {
        let p = self.grid.points();
        &mut self.values[i * p..(i + 1) * p]
    }

    pub fn last(&self) -> &[f64] {
        self.slice(self.steps() - 1)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite value at flat index {i}")));
        }
        Ok(())
    }
}

pub fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Median of a copy of `v`; NaN for an empty slice.
pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut w = v.to_vec();
    w.sort_by(|a, b| a.total_cmp(b));
    let k = w.len() / 2;
    if w.len() % 2 == 1 {
        w[k]
    } else {
        0.5 * (w[k - 1] + w[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GridSpec::new(1, 8, 0.0, 1.0, 0.1).is_err());
        assert!(GridSpec::new(1, 24, 0.0, 1.0, 0.1).is_err());
        assert!(GridSpec::new(3, 16, 0.0, 1.0, 0.1).is_err());
        assert!(GridSpec::new(1, 16, 0.0, 1.0, 0.3).is_err());
        let g = GridSpec::new(2, 16, 0.0, 1.0, 0.25).unwrap();
        assert_eq!((g.steps(), g.points()), (5, 256));
        assert_eq!(g.coords(17), [1.0 / 16.0, 1.0 / 16.0]);
    }

    #[test]
    fn parabolic_step() {
        let g = GridSpec::parabolic(1, 256, 0.1).unwrap();
        assert_eq!(g.steps(), 26215);
        assert!(g.check_resolves(1.0 / 32.0).is_ok());
        assert!(g.check_resolves(1.0 / 128.0).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
