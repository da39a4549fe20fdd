//! Mollified Gaussian noise. One base white noise is drawn per seed and every
//! ε of a ladder is obtained from it, so the ladder is coupled.

use flowforge_core::ModelParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use crate::grid::{GridSpec, SpaceTimeField};
use crate::kernels::{causal_convolve, covariance_multiplier, Mollifier};
use crate::spectral::Spectral;
use crate::{Error, Exec, Result};

/// Discrete space-time white noise on the grid window padded by `pad` steps
/// on both sides, each value of variance 1/(dt·dxⁿ).
#[derive(Debug, Clone)]
pub struct BaseNoise {
    pub grid: GridSpec,
    pub pad: usize,
    pub values: Vec<f64>,
}

impl BaseNoise {
    /// Padding is sized for mollifiers up to `max_eps`.
    pub fn generate(grid: &GridSpec, seed: u64, max_eps: f64) -> Self {
        let pad = (max_eps * max_eps / grid.dt).ceil() as usize + 1;
        let rows = grid.steps() + 2 * pad;
        let scale = 1.0 / (grid.dt * grid.cell()).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..rows * grid.points())
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * scale
            })
            .collect();
        BaseNoise { grid: *grid, pad, values }
    }

    pub fn rows(&self) -> usize {
        self.grid.steps() + 2 * self.pad
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let p = self.grid.points();
        &self.values[r * p..(r + 1) * p]
    }

    /// ξ_ε = ρ_ε * ξ with the spatial covariance multiplier of `p` applied.
    pub fn mollify(&self, p: &ModelParams, eps: f64) -> Result<SpaceTimeField> {
        self.mollify_with(p, eps, Exec::default())
    }

    pub fn mollify_with(&self, p: &ModelParams, eps: f64, exec: Exec) -> Result<SpaceTimeField> {
        let grid = self.grid;
        if p.n != grid.n {
            return Err(Error::Domain(format!("params n = {} but grid n = {}", p.n, grid.n)));
        }
        let moll = Mollifier::new(eps, &grid)?;
        let r = moll.radius;
        if r > self.pad {
            return Err(Error::Domain(format!("eps = {eps} exceeds the ladder the base noise was padded for")));
        }
        let spec = Spectral::new(&grid);
        let (steps, pts, rows) = (grid.steps(), grid.points(), self.rows());
        let first = self.pad - r;
        // rows first..first+steps+2r feed the output window
        let used = steps + 2 * r;
        let mut hats = Vec::with_capacity(used * pts);
        for i in first..first + used {
            hats.extend(spec.forward(self.row(i)));
        }
        debug_assert!(first + used <= rows);
        let w: Vec<f64> = moll.time.iter().map(|x| x * grid.dt).collect();
        let mult: Vec<f64> = (0..pts).map(|j| moll.hat[j] * covariance_multiplier(p, spec.lambda[j]).sqrt()).collect();
        let cols = exec.map_range(pts, |j| {
            let col: Vec<Complex64> = (0..used).map(|i| hats[i * pts + j]).collect();
            let y = causal_convolve(&col, &w);
            y[2 * r..].iter().map(|z| z * mult[j]).collect::<Vec<_>>()
        });
        drop(hats);
        let mut values = Vec::with_capacity(steps * pts);
        let mut row = vec![Complex64::new(0.0, 0.0); pts];
        for i in 0..steps {
            for (j, c) in cols.iter().enumerate() {
                row[j] = c[i];
            }
            spec.inverse_in_place(&mut row);
            values.extend(row.iter().map(|z| z.re));
        }
        let f = SpaceTimeField { grid, values };
        f.check_finite()?;
        Ok(f)
    }
}

/// ξ_ε on the grid window for one seed.
pub fn sample_noise(p: &ModelParams, grid: &GridSpec, seed: u64, eps: f64) -> Result<SpaceTimeField> {
    grid.check_resolves(eps)?;
    BaseNoise::generate(grid, seed, eps).mollify(p, eps)
}

/// Seed of replica `r`: seed ⊕ r.
pub fn replica_seed(seed: u64, r: u64) -> u64 {
    seed ^ r
}

#[cfg(test)]
mod tests {
    use super::*;
    use flowforge_core::params::rat;

    #[test]
    fn deterministic_given_seed() {
        let p = ModelParams::new(rat(1, 2), 1).unwrap();
        let g = GridSpec::new(1, 32, 0.0, 0.0625, 1.0 / 1024.0).unwrap();
        let a = sample_noise(&p, &g, 7, 0.125).unwrap();
        let b = sample_noise(&p, &g, 7, 0.125).unwrap();
        let c = sample_noise(&p, &g, 8, 0.125).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
        let seq = BaseNoise::generate(&g, 7, 0.125).mollify_with(&p, 0.125, Exec::Sequential).unwrap();
        assert_eq!(a.values, seq.values);
    }
}
