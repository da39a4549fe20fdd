//! Space-time kernels applied as spectral multipliers in space and product
//! integration in time.

use std::collections::HashMap;

use flowforge_core::{ModelParams, Rational};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::grid::{sup_abs, GridSpec, SpaceTimeField};
use crate::profile::{bump, chi, chi_prime, gauss};
use crate::spectral::Spectral;
use crate::{Error, Exec, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelKind {
    Heat,
    Gmu,
    GmuDot,
    /// (1 − χ_μ)G = G − G_μ, the part of the heat kernel below scale μ.
    GmuComplement,
    Qmu,
    KNmu,
    Pmu,
    PmuDagger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelOp {
    pub kind: KernelKind,
    pub mu: f64,
    /// Convolution power for `KNmu`.
    pub power: u32,
}

/// How an input is continued before the first time slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum History {
    #[default]
    Zero,
    /// Frozen at the first slice; only for kernels of finite time mass.
    Constant,
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

impl KernelOp {
    pub fn heat() -> Self {
        KernelOp { kind: KernelKind::Heat, mu: 0.0, power: 1 }
    }
    pub fn g(mu: f64) -> Self {
        KernelOp { kind: KernelKind::Gmu, mu, power: 1 }
    }
    pub fn g_dot(mu: f64) -> Self {
        KernelOp { kind: KernelKind::GmuDot, mu, power: 1 }
    }
    pub fn g_complement(mu: f64) -> Self {
        KernelOp { kind: KernelKind::GmuComplement, mu, power: 1 }
    }
    pub fn q(mu: f64) -> Self {
        KernelOp { kind: KernelKind::Qmu, mu, power: 1 }
    }
    pub fn k(power: u32, mu: f64) -> Self {
        KernelOp { kind: KernelKind::KNmu, mu, power: power.max(1) }
    }
    pub fn p(mu: f64) -> Self {
        KernelOp { kind: KernelKind::Pmu, mu, power: 1 }
    }
    pub fn p_dagger(mu: f64) -> Self {
        KernelOp { kind: KernelKind::PmuDagger, mu, power: 1 }
    }

    fn power(&self) -> u32 {
        match self.kind {
            KernelKind::KNmu => self.power,
            _ => 1,
        }
    }

    pub fn is_differential(&self) -> bool {
        matches!(self.kind, KernelKind::Pmu | KernelKind::PmuDagger)
    }

    /// Time and space factor separately (Q_μ, K_{N,μ}).
    pub fn is_separable(&self) -> bool {
        matches!(self.kind, KernelKind::Qmu | KernelKind::KNmu)
    }

    fn is_identity(&self) -> bool {
        self.mu == 0.0 && !matches!(self.kind, KernelKind::Heat)
    }

    /// Time profile of a separable kernel: the Gamma(N, μ²) density.
    pub fn time_part(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        let n = self.power();
        let m2 = self.mu * self.mu;
        let log = (n as f64 - 1.0) * tau.max(1e-300).ln() - tau / m2 - ln_factorial(n - 1) - n as f64 * m2.ln();
        if n == 1 {
            (-tau / m2).exp() / m2
        } else {
            log.exp()
        }
    }

    /// Spatial multiplier (1 + μ²λ)^{−N} of a separable kernel.
    pub fn space_part(&self, lambda: f64) -> f64 {
        (1.0 + self.mu * self.mu * lambda).powi(-(self.power() as i32))
    }

    /// Kernel value in time τ and Fourier variable λ = |2πk|².
    pub fn profile(&self, tau: f64, lambda: f64) -> f64 {
        if tau < 0.0 || self.is_differential() {
            return 0.0;
        }
        let m2 = self.mu * self.mu;
        match self.kind {
            KernelKind::Heat => (-tau * lambda).exp(),
            KernelKind::Gmu => chi(tau / m2) * (-tau * lambda).exp(),
            KernelKind::GmuComplement => (1.0 - chi(tau / m2)) * (-tau * lambda).exp(),
            KernelKind::GmuDot => -2.0 * tau / (m2 * self.mu) * chi_prime(tau / m2) * (-tau * lambda).exp(),
            _ => self.time_part(tau) * self.space_part(lambda),
        }
    }

    /// Lags beyond which the time profile vanishes or is below e^{−40}.
    pub fn lag_cutoff(&self, dt: f64, steps: usize) -> usize {
        let m2 = self.mu * self.mu;
        let span = match self.kind {
            KernelKind::GmuDot | KernelKind::GmuComplement => 2.0 * m2,
            KernelKind::Qmu | KernelKind::KNmu => {
                let n = self.power() as f64;
                (n + 12.0 * n.sqrt() + 40.0) * m2
            }
            _ => f64::INFINITY,
        };
        if span.is_finite() {
            ((span / dt).ceil() as usize + 2).min(steps)
        } else {
            steps
        }
    }

    fn check_resolution(&self, dt: f64) -> Result<()> {
        if self.kind != KernelKind::Heat && !self.is_identity() && self.mu * self.mu < 2.0 * dt * (1.0 - 1e-9) {
            return Err(Error::Resolution(format!("mu = {} is under-resolved: mu^2 < 2 dt = {:e}", self.mu, 2.0 * dt)));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::Domain(format!("mu = {} must be a finite nonnegative number", self.mu)));
        }
        Ok(())
    }
}

/// Product-integration weights W_l = ∫ p(τ) φ_l(τ) dτ against the hat
/// functions φ_l centred at l·dt, for l = 0..lags.
pub fn lag_weights(profile: impl Fn(f64) -> f64, dt: f64, lags: usize) -> Vec<f64> {
    (0..lags)
        .map(|l| {
            let c = l as f64 * dt;
            let right = gauss(c, c + dt, 1, |t| profile(t) * (1.0 - (t - c) / dt));
            let left = if l == 0 { 0.0 } else { gauss(c - dt, c, 1, |t| profile(t) * (1.0 - (c - t) / dt)) };
            left + right
        })
        .collect()
}

/// y_i = Σ_{l=0}^{min(i, L−1)} w_l x_{i−l}, directly or by FFT for long inputs.
pub fn causal_convolve(x: &[Complex64], w: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let l = w.len().min(n);
    if n == 0 || l == 0 {
        return vec![Complex64::new(0.0, 0.0); n];
    }
    if (n as u64) * (l as u64) <= 1 << 16 || l <= 32 {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            let top = l.min(i + 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, wk) in w[..top].iter().enumerate() {
                acc += x[i - k] * *wk;
            }
            *o = acc;
        }
        return out;
    }
    let len = (n + l).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    a[..n].copy_from_slice(x);
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    for (bk, wk) in b.iter_mut().zip(&w[..l]) {
        *bk = Complex64::new(*wk, 0.0);
    }
    fwd.process(&mut a);
    fwd.process(&mut b);
    let s = 1.0 / len as f64;
    for (ai, bi) in a.iter_mut().zip(&b) {
        *ai *= bi * s;
    }
    inv.process(&mut a);
    a.truncate(n);
    a
}

/// Spatial Fourier transform of every time slice, as (steps, modes).
pub fn slices_forward(spec: &Spectral, f: &SpaceTimeField) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(f.values.len());
    for i in 0..f.steps() {
        out.extend(spec.forward(f.slice(i)));
    }
    out
}

fn slices_inverse(spec: &Spectral, grid: GridSpec, hats: &mut [Complex64]) -> SpaceTimeField {
    let p = grid.points();
    let mut values = Vec::with_capacity(hats.len());
    for row in hats.chunks_mut(p) {
        spec.inverse_in_place(row);
        values.extend(row.iter().map(|z| z.re));
    }
    SpaceTimeField { grid, values }
}

/// Apply a kernel to a field with zero history before the first slice.
pub fn apply_kernel(op: &KernelOp, f: &SpaceTimeField) -> Result<SpaceTimeField> {
    apply_kernel_with(op, f, History::Zero, Exec::default())
}

pub fn apply_kernel_with(op: &KernelOp, f: &SpaceTimeField, history: History, exec: Exec) -> Result<SpaceTimeField> {
    f.check_finite()?;
    op.check_resolution(f.grid.dt)?;
    if op.is_identity() {
        return Ok(f.clone());
    }
    if history == History::Constant && matches!(op.kind, KernelKind::Heat | KernelKind::Gmu) {
        return Err(Error::Domain("constant history needs a kernel of finite time mass".into()));
    }
    let grid = f.grid;
    let spec = Spectral::new(&grid);
    let (steps, p) = (grid.steps(), grid.points());
    let dt = grid.dt;
    let hats = slices_forward(&spec, f);
    let m2 = op.mu * op.mu;

    let mut out = vec![Complex64::new(0.0, 0.0); steps * p];
    if op.is_differential() {
        for j in 0..p {
            let s = 1.0 + m2 * spec.lambda[j];
            for i in 0..steps {
                let cur = hats[i * p + j];
                let dtf = match op.kind {
                    KernelKind::Pmu => {
                        let prev = if i > 0 {
                            hats[(i - 1) * p + j]
                        } else if history == History::Constant {
                            cur
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        (cur - prev) / dt
                    }
                    _ => {
                        let next = if i + 1 < steps { hats[(i + 1) * p + j] } else { cur };
                        -(next - cur) / dt
                    }
                };
                out[i * p + j] = (cur + dtf * m2) * s;
            }
        }
        return Ok(slices_inverse(&spec, grid, &mut out));
    }

    let lags = op.lag_cutoff(dt, steps);
    let shared = op.is_separable().then(|| lag_weights(|t| op.time_part(t), dt, lags));
    let mut table: HashMap<u64, Vec<f64>> = HashMap::new();
    if shared.is_none() {
        for j in 0..p {
            let key = spec.k2(j);
            let lam = spec.lambda[j];
            table.entry(key).or_insert_with(|| lag_weights(|t| op.profile(t, lam), dt, lags));
        }
    }
    let columns = exec.map_range(p, |j| {
        let (w, scale): (&[f64], f64) = match &shared {
            Some(w) => (w, op.space_part(spec.lambda[j])),
            None => (&table[&spec.k2(j)], 1.0),
        };
        let col: Vec<Complex64> = (0..steps).map(|i| hats[i * p + j]).collect();
        let mut y = causal_convolve(&col, w);
        if history == History::Constant {
            // continuing f by f_0 adds f_0 times the weight of all lags past i
            let mass = match &shared {
                Some(_) => 1.0,
                None => w.iter().sum(),
            };
            let mut acc = 0.0;
            for (i, yi) in y.iter_mut().enumerate() {
                if i < w.len() {
                    acc += w[i];
                }
                *yi += col[0] * (mass - acc);
            }
        }
        y.iter_mut().for_each(|z| *z *= scale);
        y
    });
    for (j, col) in columns.into_iter().enumerate() {
        for (i, z) in col.into_iter().enumerate() {
            out[i * p + j] = z;
        }
    }
    let res = slices_inverse(&spec, grid, &mut out);
    res.check_finite()?;
    Ok(res)
}

/// Sample the kernel itself on lags τ = l·dt, l = 0..lags, as (lags, points)
/// with the spatial variable centred at 0.
pub fn sample_kernel(op: &KernelOp, grid: &GridSpec, lags: usize) -> Result<SpaceTimeField> {
    op.check_resolution(grid.dt)?;
    if op.is_differential() {
        return Err(Error::Domain("differential operators have no kernel samples".into()));
    }
    let spec = Spectral::new(grid);
    let g = grid.with_window(0.0, (lags.max(1) - 1) as f64 * grid.dt)?;
    let p = grid.points();
    let mut values = Vec::with_capacity(lags * p);
    for l in 0..lags {
        let tau = l as f64 * grid.dt;
        let hat: Vec<Complex64> = spec.lambda.iter().map(|&lam| Complex64::new(op.profile(tau, lam), 0.0)).collect();
        values.extend(spec.inverse(&hat));
    }
    Ok(SpaceTimeField { grid: g, values })
}

/// Discretized ρ_ε = ε^{−(n+2)} ρ(t/ε², x/ε), normalized to unit discrete mass.
#[derive(Debug, Clone)]
pub struct Mollifier {
    pub eps: f64,
    /// Time weights at offsets −r..=r steps, Σ w·dt = 1.
    pub time: Vec<f64>,
    pub radius: usize,
    /// Spatial weights per grid point centred at 0, Σ w·dx^n = 1.
    pub space: Vec<f64>,
    /// ρ̂ per Fourier mode (real, the weights being even).
    pub hat: Vec<f64>,
}

impl Mollifier {
    pub fn new(eps: f64, grid: &GridSpec) -> Result<Self> {
        grid.check_resolves(eps)?;
        let e2 = eps * eps;
        let radius = (e2 / grid.dt).ceil() as usize;
        let mut time: Vec<f64> = (0..=2 * radius).map(|m| bump((m as f64 - radius as f64) * grid.dt / e2)).collect();
        let s: f64 = time.iter().sum::<f64>() * grid.dt;
        time.iter_mut().for_each(|w| *w /= s);
        let periodic = |x: f64| if x > 0.5 { x - 1.0 } else { x };
        let mut space: Vec<f64> = (0..grid.points())
            .map(|j| {
                let c = grid.coords(j);
                (0..grid.n as usize).map(|a| bump(periodic(c[a]) / eps)).product()
            })
            .collect();
        let s: f64 = space.iter().sum::<f64>() * grid.cell();
        space.iter_mut().for_each(|w| *w /= s);
        let spec = Spectral::new(grid);
        let hat = spec.forward(&space).iter().map(|z| z.re).collect();
        Ok(Mollifier { eps, time, radius, space, hat })
    }

    /// R[u] = dt·Σ_m w_m w_{m+u}, u = 0..=2r: time autocorrelation.
    pub fn time_autocorrelation(&self, dt: f64) -> Vec<f64> {
        let w = &self.time;
        (0..w.len()).map(|u| dt * w.iter().zip(&w[u..]).map(|(a, b)| a * b).sum::<f64>()).collect()
    }
}

/// ρ_ε sampled on the grid, centred at the middle time slice and x = 0.
pub fn mollifier_field(eps: f64, grid: &GridSpec) -> Result<SpaceTimeField> {
    let m = Mollifier::new(eps, grid)?;
    let steps = grid.steps();
    if steps < 2 * m.radius + 1 {
        return Err(Error::Domain(format!(
            "time window holds {steps} slices, the mollifier needs {}",
            2 * m.radius + 1
        )));
    }
    let mid = steps / 2;
    let mut f = SpaceTimeField::zeros(*grid);
    for (o, w) in m.time.iter().enumerate() {
        let i = mid + o - m.radius;
        for (v, s) in f.slice_mut(i).iter_mut().zip(&m.space) {
            *v = w * s;
        }
    }
    Ok(f)
}

/// Exponent 1 − n/2 − α of the spatial covariance multiplier.
pub fn covariance_exponent(p: &ModelParams) -> f64 {
    let e: Rational = Rational::from_integer(1) - Rational::new(p.n as i64, 2) - p.alpha;
    flowforge_core::params::to_f64(&e)
}

/// (1 + λ)^{1 − n/2 − α}.
pub fn covariance_multiplier(p: &ModelParams, lambda: f64) -> f64 {
    (1.0 + lambda).powf(covariance_exponent(p))
}

/// Cov realized as the spatial kernel of the multiplier at the middle slice
/// times a discrete time delta 1/dt.
pub fn covariance_field(p: &ModelParams, grid: &GridSpec) -> Result<SpaceTimeField> {
    if p.n != grid.n {
        return Err(Error::Domain(format!("params n = {} but grid n = {}", p.n, grid.n)));
    }
    let spec = Spectral::new(grid);
    let hat: Vec<Complex64> = spec.lambda.iter().map(|&l| Complex64::new(covariance_multiplier(p, l), 0.0)).collect();
    let kernel = spec.inverse(&hat);
    let mut f = SpaceTimeField::zeros(*grid);
    let mid = grid.steps() / 2;
    for (v, k) in f.slice_mut(mid).iter_mut().zip(&kernel) {
        *v = k / grid.dt;
    }
    Ok(f)
}

/// Dyadic surrogate of the parabolic Hölder–Besov norm: the max over
/// μ = 2^{−1}..2^{−levels} of μ^{−β}‖(Q_μ − Id)f‖ for β ∈ (0,1), and of
/// μ^{−β}‖K_{⌈−β⌉,μ}f‖ for β < 0, inputs continued as constant in the past.
pub fn besov_norm(f: &SpaceTimeField, beta: Rational, levels: u32) -> Result<f64> {
    let b = flowforge_core::params::to_f64(&beta);
    if beta == Rational::from_integer(0) {
        return Err(Error::Domain("beta = 0 is not admissible".into()));
    }
    if !(b > -2.0 && b < 1.0) {
        return Err(Error::Domain(format!("beta = {b} must lie in (-2, 1)")));
    }
    if levels < 3 {
        return Err(Error::Domain(format!("levels = {levels} must be at least 3")));
    }
    let mut best: f64 = 0.0;
    for j in 1..=levels {
        let mu = 0.5f64.powi(j as i32);
        let val = if b > 0.0 {
            let g = apply_kernel_with(&KernelOp::q(mu), f, History::Constant, Exec::Sequential)?;
            let d: Vec<f64> = g.values.iter().zip(&f.values).map(|(a, b)| a - b).collect();
            sup_abs(&d)
        } else {
            let n = (-b).ceil() as u32;
            apply_kernel_with(&KernelOp::k(n, mu), f, History::Constant, Exec::Sequential)?.sup_norm()
        };
        best = best.max(mu.powf(-b) * val);
    }
    Ok(best)
}
