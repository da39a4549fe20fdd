//! Flow coefficients of order ≤ 1 at desk scale.
//!
//! Integrating the flow from μ = 0 turns the Ġ_ν of the bilinear term into
//! G_μ − G₀ = −(1 − χ_μ)G, so an order-one coefficient is
//! λᵃ_μ(x; y₁, y₂) = Σ prefactor·ξᵇ(y₁)δ(x − y₁)·∂^{dx}[(1−χ_μ)G](y₁ − y₂)·ξᶜ(y₂)
//! up to the overall sign. The norm reported is a surrogate of the triple
//! norm: the kernel is paired with the constant test function in y (a lower
//! bound for its L¹_y norm) and smoothed by K_{1,μ} in x, and the sup over x
//! is replaced by the root mean square over x and samples.

use flowforge_core::flowgen::insertion_index_set;
use flowforge_core::multiindex::{Label, PreMultiIndex};
use flowforge_core::params::{fmt_rational, to_f64};
use flowforge_core::ModelParams;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::grid::{GridSpec, SpaceTimeField};
use crate::kernels::{causal_convolve, covariance_multiplier, lag_weights, slices_forward, KernelOp, Mollifier};
use crate::noise::{replica_seed, BaseNoise};
use crate::spectral::Spectral;
use crate::{fit_loglog, Error, Exec, Result};

#[derive(Debug, Clone, Serialize)]
pub struct MuTrace {
    pub mu: f64,
    pub norm: f64,
    /// Standard error of the mean square across samples, relative.
    pub rel_stderr: f64,
    /// Fraction of |λᵃ(x,·)| mass at argument times outside [x₀ − 2μ²𝔬(a), x₀].
    pub outside_mass: f64,
    pub expectation_subtracted: f64,
    /// Change of the coefficient from μ = 0; identically zero at order 0.
    pub flow_increment_rms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowCoefficientReport {
    pub a: String,
    pub order: u64,
    pub scaling: String,
    pub eps: f64,
    pub samples: usize,
    pub renormalized: bool,
    pub per_mu: Vec<MuTrace>,
    pub fitted_exponent: f64,
    pub relative_error: f64,
    pub note: String,
}

/// Coefficient field of an order-zero multi-index: ξ_ε for 𝟙^h_0, 1 otherwise.
fn unit_is_noise(a: &PreMultiIndex) -> bool {
    a.get(Label::H, 0) == 1
}

struct Term {
    prefactor: f64,
    b_noise: bool,
    c_noise: bool,
    dx: u32,
}

/// Time window long enough for K_{1,μ} (to e^{−24}) after 2μ² of history.
pub fn window_length(mu_max: f64, eps: f64) -> f64 {
    26.0 * mu_max * mu_max + 2.0 * eps * eps
}

#[allow(clippy::too_many_arguments)]
pub fn flow_coefficient(
    a: &PreMultiIndex,
    p: &ModelParams,
    grid: &GridSpec,
    eps: f64,
    mus: &[f64],
    seed: u64,
    samples: usize,
    exec: Exec,
) -> Result<FlowCoefficientReport> {
    let order = a.order();
    if order > 1 {
        return Err(Error::Scope(format!("flow coefficients are computed up to order 1, {a} has order {order}")));
    }
    if !a.is_populated() {
        return Err(Error::Domain(format!("{a} is not populated")));
    }
    if p.n != 1 || grid.n != 1 {
        return Err(Error::Scope("flow coefficients are computed for n = 1".into()));
    }
    if mus.is_empty() || samples == 0 {
        return Err(Error::Domain("need at least one mu and one sample".into()));
    }
    grid.check_resolves(eps)?;
    if let Some(mu) = mus.iter().find(|m| *m * *m < 2.0 * grid.dt) {
        return Err(Error::Resolution(format!("mu = {mu} is under-resolved: mu^2 < 2 dt")));
    }
    let mu_max = mus.iter().cloned().fold(0.0, f64::max);
    let steps = (window_length(mu_max, eps) / grid.dt).ceil();
    let wgrid = GridSpec::new(1, grid.m, 0.0, steps * grid.dt, grid.dt)?;
    let spec = Spectral::new(&wgrid);
    let (rows, pts, dt) = (wgrid.steps(), wgrid.points(), wgrid.dt);
    let scaling = a.scaling(p.alpha);

    let terms: Vec<Term> = if order == 0 {
        vec![]
    } else {
        insertion_index_set(a, p)
            .iter()
            .map(|t| Term {
                prefactor: to_f64(&t.prefactor),
                b_noise: unit_is_noise(&t.b),
                c_noise: unit_is_noise(&t.c),
                dx: t.deriv_count,
            })
            .collect()
    };
    let relevant = scaling <= flowforge_core::Rational::from_integer(0);
    let moll = Mollifier::new(eps, &wgrid)?;
    let rd = moll.time_autocorrelation(dt);
    let dmult = |j: usize, dx: u32| -> Complex64 {
        let d = spec.deriv_multiplier(j, 0);
        (0..dx).fold(Complex64::new(1.0, 0.0), |acc, _| acc * d)
    };

    struct PerMu {
        mu: f64,
        weights: Vec<Vec<f64>>,
        kweights: Vec<f64>,
        expectation: f64,
        outside: f64,
    }
    let per_mu: Vec<PerMu> = mus
        .iter()
        .map(|&mu| {
            let g = KernelOp::g_complement(mu);
            let lags = g.lag_cutoff(dt, rows);
            let weights: Vec<Vec<f64>> =
                (0..pts).map(|j| lag_weights(|t| g.profile(t, spec.lambda[j]), dt, lags)).collect();
            let k = KernelOp::k(1, mu);
            let kweights = lag_weights(|t| k.time_part(t), dt, k.lag_cutoff(dt, rows));
            // exact expectation of ξ(z)·(g ⋆ ξ)(z) under the discrete noise law
            let mut expectation = 0.0;
            if relevant {
                for t in terms.iter().filter(|t| t.b_noise && t.c_noise) {
                    for (j, wj) in weights.iter().enumerate().take(pts) {
                        let ak = moll.hat[j].powi(2) * covariance_multiplier(p, spec.lambda[j]);
                        let s: f64 = wj.iter().zip(&rd).map(|(w, r)| w * r).sum();
                        expectation += t.prefactor * ak * dmult(j, t.dx).re * s;
                    }
                }
            }
            let outside = if order == 0 { 0.0 } else { support_fraction(&terms, mu, &wgrid, &spec, &dmult) };
            PerMu { mu, weights, kweights, expectation, outside }
        })
        .collect();

    // per sample: mean over x of S², and of the raw increment squared
    let results: Vec<Result<Vec<(f64, f64)>>> = exec.map_range(samples, |s| {
        let base = BaseNoise::generate(&wgrid, replica_seed(seed, s as u64), eps);
        let xi = base.mollify_with(p, eps, Exec::Sequential)?;
        let xi_hat = slices_forward(&spec, &xi);
        let col = |j: usize| -> Vec<Complex64> { (0..rows).map(|i| xi_hat[i * pts + j]).collect() };
        let mut out = vec![];
        for pm in &per_mu {
            let klags = pm.kweights.len().min(rows);
            let first = rows - klags;
            let mut field = vec![0.0; klags * pts];
            if order == 0 {
                if unit_is_noise(a) {
                    field.copy_from_slice(&xi.values[first * pts..]);
                } else {
                    field.iter_mut().for_each(|v| *v = 1.0);
                }
            } else {
                for t in &terms {
                    // (∂^{dx} g ⋆ ξᶜ) per mode, then back to space
                    let mut conv = vec![Complex64::new(0.0, 0.0); klags * pts];
                    for j in 0..pts {
                        let c_col: Vec<Complex64> = if t.c_noise {
                            col(j)
                        } else if j == 0 {
                            vec![Complex64::new(1.0, 0.0); rows]
                        } else {
                            continue;
                        };
                        let y = causal_convolve(&c_col, &pm.weights[j]);
                        let m = dmult(j, t.dx);
                        for i in 0..klags {
                            conv[i * pts + j] = y[first + i] * m;
                        }
                    }
                    for (i, row) in conv.chunks_mut(pts).enumerate() {
                        spec.inverse_in_place(row);
                        let xb = xi.slice(first + i);
                        for (v, (z, xbv)) in field[i * pts..(i + 1) * pts].iter_mut().zip(row.iter().zip(xb)) {
                            let bv = if t.b_noise { *xbv } else { 1.0 };
                            *v += t.prefactor * bv * z.re;
                        }
                    }
                }
            }
            let inc = if order == 0 {
                0.0
            } else {
                field[(klags - 1) * pts..].iter().map(|v| v * v).sum::<f64>() / pts as f64
            };
            field.iter_mut().for_each(|v| *v -= pm.expectation);
            // K_{1,μ} at the last slice
            let mut acc = vec![Complex64::new(0.0, 0.0); pts];
            for (l, w) in pm.kweights.iter().enumerate().take(klags) {
                let i = klags - 1 - l;
                let hat = spec.forward(&field[i * pts..(i + 1) * pts]);
                for (a, h) in acc.iter_mut().zip(&hat) {
                    *a += h * *w;
                }
            }
            let k = KernelOp::k(1, pm.mu);
            for (j, a) in acc.iter_mut().enumerate() {
                *a *= k.space_part(spec.lambda[j]);
            }
            let sx = spec.inverse(&acc);
            out.push((sx.iter().map(|v| v * v).sum::<f64>() / pts as f64, inc));
        }
        Ok(out)
    });
    let results: Vec<Vec<(f64, f64)>> = results.into_iter().collect::<Result<_>>()?;

    let mut traces = vec![];
    for (k, &mu) in mus.iter().enumerate() {
        let ms: Vec<f64> = results.iter().map(|r| r[k].0).collect();
        let incs: Vec<f64> = results.iter().map(|r| r[k].1).collect();
        let mean = ms.iter().sum::<f64>() / ms.len() as f64;
        let var = ms.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (ms.len().max(2) - 1) as f64;
        traces.push(MuTrace {
            mu,
            norm: mean.sqrt(),
            rel_stderr: (var / ms.len() as f64).sqrt() / mean,
            outside_mass: per_mu[k].outside,
            expectation_subtracted: per_mu[k].expectation,
            flow_increment_rms: (incs.iter().sum::<f64>() / incs.len() as f64).sqrt(),
        });
    }
    let norms: Vec<f64> = traces.iter().map(|t| t.norm).collect();
    let fitted = if mus.len() >= 2 { fit_loglog(mus, &norms) } else { f64::NAN };
    let sf = to_f64(&scaling);
    Ok(FlowCoefficientReport {
        a: a.to_json(),
        order,
        scaling: fmt_rational(&scaling),
        eps,
        samples,
        renormalized: relevant && per_mu.iter().any(|m| m.expectation != 0.0),
        per_mu: traces,
        fitted_exponent: fitted,
        relative_error: if sf != 0.0 { ((fitted - sf) / sf).abs() } else { f64::NAN },
        note:
            "norm: K_{1,mu}-smoothed pairing with the constant test function in y, root mean square over x and samples"
                .into(),
    })
}

/// Share of Σ|λᵃ(x₀, 0; y)| over y outside the admissible time window, with the
/// noise factors replaced by their absolute bound 1 (the window does not
/// depend on them) and the kernel sampled pointwise.
fn support_fraction(
    terms: &[Term],
    mu: f64,
    grid: &GridSpec,
    spec: &Spectral,
    dmult: &dyn Fn(usize, u32) -> Complex64,
) -> f64 {
    let op = KernelOp::g_complement(mu);
    let (mut inside, mut outside) = (0.0, 0.0);
    let window = 2.0 * mu * mu;
    for l in 0..grid.steps() {
        let tau = l as f64 * grid.dt;
        for t in terms {
            let hat: Vec<Complex64> =
                (0..spec.modes()).map(|j| dmult(j, t.dx) * op.profile(tau, spec.lambda[j])).collect();
            let s: f64 = spec.inverse(&hat).iter().map(|v| v.abs()).sum::<f64>() * t.prefactor.abs();
            if tau <= window {
                inside += s;
            } else {
                outside += s;
            }
        }
    }
    if inside + outside == 0.0 {
        0.0
    } else {
        outside / (inside + outside)
    }
}

/// Field form of an order-zero coefficient on a grid, for inspection.
pub fn order_zero_field(
    a: &PreMultiIndex,
    p: &ModelParams,
    grid: &GridSpec,
    eps: f64,
    seed: u64,
) -> Result<SpaceTimeField> {
    if a.order() != 0 {
        return Err(Error::Scope(format!("{a} is not of order 0")));
    }
    if unit_is_noise(a) {
        crate::noise::sample_noise(p, grid, seed, eps)
    } else {
        Ok(SpaceTimeField::from_fn(*grid, |_, _| 1.0))
    }
}
