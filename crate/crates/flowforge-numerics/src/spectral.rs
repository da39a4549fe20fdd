//! Fourier transforms on the periodic grid, normalized so that
//! f(x) = Σ_k f̂_k e^{2πik·x}.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

#[derive(Clone)]
pub struct Spectral {
    pub n: u32,
    pub m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Signed wave numbers per flattened mode.
    pub k: Vec<[i64; 2]>,
    /// |2πk|² per flattened mode.
    pub lambda: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).field("m", &self.m).finish()
    }
}

pub fn wavenumber(i: usize, m: usize) -> i64 {
    if i <= m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

impl Spectral {
    pub fn new(grid: &GridSpec) -> Self {
        let m = grid.m;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let k: Vec<[i64; 2]> = (0..grid.points())
            .map(|j| match grid.n {
                1 => [wavenumber(j, m), 0],
                _ => [wavenumber(j / m, m), wavenumber(j % m, m)],
            })
            .collect();
        let lambda = k.iter().map(|k| 4.0 * PI * PI * (k[0] * k[0] + k[1] * k[1]) as f64).collect();
        Spectral { n: grid.n, m, fwd, inv, k, lambda }
    }

    pub fn modes(&self) -> usize {
        self.k.len()
    }

    /// Integer |k|² per mode, a key for λ-dependent tables.
    pub fn k2(&self, j: usize) -> u64 {
        let k = self.k[j];
        (k[0] * k[0] + k[1] * k[1]) as u64
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        plan.process(buf);
        if self.n == 2 {
            let mut col = vec![Complex64::new(0.0, 0.0); m];
            for c in 0..m {
                for r in 0..m {
                    col[r] = buf[r * m + c];
                }
                plan.process(&mut col);
                for r in 0..m {
                    buf[r * m + c] = col[r];
                }
            }
        }
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.fwd);
        let s = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.inv);
    }

    /// Real part of the inverse transform.
    pub fn inverse(&self, hat: &[Complex64]) -> Vec<f64> {
        let mut buf = hat.to_vec();
        self.inverse_in_place(&mut buf);
        buf.iter().map(|z| z.re).collect()
    }

    /// Multiplier of ∂ along `axis`; zero at the Nyquist frequency so that
    /// derivatives of real fields stay real.
    pub fn deriv_multiplier(&self, j: usize, axis: usize) -> Complex64 {
        let k = self.k[j][axis];
        if self.m & 1 == 0 && k.unsigned_abs() as usize == self.m / 2 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, 2.0 * PI * k as f64)
    }

    /// ∂_axis f, spectrally.
    pub fn derivative(&self, hat: &[Complex64], axis: usize) -> Vec<f64> {
        let mut buf: Vec<Complex64> = hat.iter().enumerate().map(|(j, z)| z * self.deriv_multiplier(j, axis)).collect();
        self.inverse_in_place(&mut buf);
        buf.iter().map(|z| z.re).collect()
    }

    /// Exact heat semigroup e^{tΔ} on one slice.
    pub fn heat(&self, f: &[f64], t: f64) -> Vec<f64> {
        let mut hat = self.forward(f);
        for (z, l) in hat.iter_mut().zip(&self.lambda) {
            *z *= (-t * l).exp();
        }
        self.inverse(&hat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_derivative_2d() {
        let g = GridSpec::new(2, 16, 0.0, 0.0, 1.0).unwrap();
        let s = Spectral::new(&g);
        let f: Vec<f64> = (0..g.points())
            .map(|j| {
                let [x, y] = g.coords(j);
                (2.0 * PI * x).sin() * (4.0 * PI * y).cos()
            })
            .collect();
        let hat = s.forward(&f);
        let back = s.inverse(&hat);
        assert!(f.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-12));
        let dy = s.derivative(&hat, 1);
        for (j, v) in dy.iter().enumerate() {
            let [x, y] = g.coords(j);
            let want = -4.0 * PI * (2.0 * PI * x).sin() * (4.0 * PI * y).sin();
            assert!((v - want).abs() < 1e-10);
        }
    }

    #[test]
    fn heat_of_a_mode() {
        let g = GridSpec::new(1, 32, 0.0, 0.0, 1.0).unwrap();
        let s = Spectral::new(&g);
        let f: Vec<f64> = (0..32).map(|j| (2.0 * PI * 3.0 * g.coords(j)[0]).cos()).collect();
        let h = s.heat(&f, 0.01);
        let d = (-0.01 * 36.0 * PI * PI).exp();
        assert!(f.iter().zip(&h).all(|(a, b)| (a * d - b).abs() < 1e-13));
    }
}
