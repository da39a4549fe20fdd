//! Counterterm constants.
//!
//! The leading constant is the flow integral ∫₀¹∫ Ġ_ν Cov_ε dz dν. Since
//! χ_1 vanishes where Cov_ε lives it collapses to −∫ G·Cov_ε, which is
//! negative; the equation carries −c_ε h′(ψ)h(ψ) with c_ε = −(flow integral).

use flowforge_core::ModelParams;
use serde::Serialize;

use crate::grid::GridSpec;
use crate::kernels::{covariance_multiplier, Mollifier};
use crate::profile::{bump, gauss};
use crate::spectral::Spectral;
use crate::Result;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LeadingCounterterm {
    pub eps: f64,
    /// Coefficient of −h′(ψ)h(ψ) in the equation, positive.
    pub c: f64,
    /// ∫₀¹∫ Ġ_ν Cov_ε, the same number with the flow's orientation.
    pub flow_integral: f64,
}

/// A_k = ρ̂_ε(k)² (1+λ_k)^{1−n/2−α} on the grid's modes.
fn spectral_weights(p: &ModelParams, eps: f64, grid: &GridSpec) -> Result<(Spectral, Vec<f64>)> {
    let spatial = GridSpec::new(grid.n, grid.m, 0.0, 0.0, (eps * eps / 4.0).min(grid.dt))?;
    let moll = Mollifier::new(eps, &spatial)?;
    let spec = Spectral::new(grid);
    let a = (0..spec.modes()).map(|j| moll.hat[j].powi(2) * covariance_multiplier(p, spec.lambda[j])).collect();
    Ok((spec, a))
}

/// Continuum time autocorrelation of the time bump at scale ε².
fn bump_autocorrelation(eps: f64) -> impl Fn(f64) -> f64 {
    let e2 = eps * eps;
    let z = gauss(-1.0, 1.0, 16, bump);
    move |s: f64| {
        let s = s.abs();
        if s >= 2.0 * e2 {
            return 0.0;
        }
        gauss(-e2, e2 - s, 8, |v| bump(v / e2) * bump((v + s) / e2)) / (z * e2).powi(2)
    }
}

/// c_ε by quadrature: Σ_k A_k ∫₀^∞ R_ε(s) e^{−sλ_k} ds.
pub fn leading_counterterm(p: &ModelParams, eps: f64, grid: &GridSpec) -> Result<LeadingCounterterm> {
    if eps < 4.0 / grid.m as f64 - 1e-12 {
        return Err(crate::Error::Resolution(format!("eps = {eps} is below 4/M for M = {}", grid.m)));
    }
    let (spec, a) = spectral_weights(p, eps, grid)?;
    let r = bump_autocorrelation(eps);
    let e2 = eps * eps;
    let mut cache: std::collections::HashMap<u64, f64> = Default::default();
    let mut c = 0.0;
    for (j, aj) in a.iter().enumerate() {
        let lam = spec.lambda[j];
        let ij = *cache.entry(spec.k2(j)).or_insert_with(|| {
            let top = if lam > 0.0 { (2.0 * e2).min(60.0 / lam) } else { 2.0 * e2 };
            gauss(0.0, top, 48, |s| r(s) * (-s * lam).exp())
        });
        c += aj * ij;
    }
    Ok(LeadingCounterterm { eps, c, flow_integral: -c })
}

/// Constants matched to the exponential Euler scheme on `grid`, so that the
/// subtraction cancels the scheme's own divergence exactly in expectation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SchemeConstants {
    pub eps: f64,
    /// E[Y·ξ_ε] for the scheme's linear response Y: coefficient of h′h.
    pub c: f64,
    /// E|∇Y|²: coefficient of tr(g)·h²/n.
    pub c2: f64,
}

pub fn scheme_constants(p: &ModelParams, eps: f64, grid: &GridSpec) -> Result<SchemeConstants> {
    let moll = Mollifier::new(eps, grid)?;
    let spec = Spectral::new(grid);
    let dt = grid.dt;
    let rd = moll.time_autocorrelation(dt);
    let mut cache: std::collections::HashMap<u64, (f64, f64)> = Default::default();
    let (mut c, mut c2) = (0.0, 0.0);
    for j in 0..spec.modes() {
        let lam = spec.lambda[j];
        let (s1, s2) = *cache.entry(spec.k2(j)).or_insert_with(|| {
            let q = (-lam * dt).exp();
            let phi = if lam > 0.0 { (1.0 - q) / lam } else { dt };
            let mut s1 = 0.0;
            let mut qp = 1.0;
            for rj in &rd[1..] {
                s1 += qp * rj;
                qp *= q;
            }
            let s2 = if lam > 0.0 {
                let mut acc = rd[0];
                let mut qp = q;
                for ru in &rd[1..] {
                    acc += 2.0 * ru * qp;
                    qp *= q;
                }
                lam * phi * phi * acc / (1.0 - q * q)
            } else {
                0.0
            };
            (phi * s1, s2)
        });
        let a = moll.hat[j].powi(2) * covariance_multiplier(p, lam);
        c += a * s1;
        c2 += a * s2;
    }
    Ok(SchemeConstants { eps, c, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use flowforge_core::params::rat;

    #[test]
    fn autocorrelation_has_unit_mass() {
        let eps = 0.1;
        let r = bump_autocorrelation(eps);
        let m = 2.0 * gauss(0.0, 2.0 * eps * eps, 32, &r);
        assert!((m - 1.0).abs() < 1e-8);
    }

    #[test]
    fn leading_constant_is_positive_and_flow_signed() {
        let p = ModelParams::new(rat(1, 2), 1).unwrap();
        let g = GridSpec::parabolic(1, 128, 0.01).unwrap();
        let lc = leading_counterterm(&p, 0.125, &g).unwrap();
        assert!(lc.c > 0.0 && lc.flow_integral == -lc.c);
    }

    #[test]
    fn scheme_constant_tracks_continuum() {
        let p = ModelParams::new(rat(1, 2), 1).unwrap();
        let g = GridSpec::parabolic(1, 256, 0.01).unwrap();
        let lc = leading_counterterm(&p, 0.0625, &g).unwrap();
        let sc = scheme_constants(&p, 0.0625, &g).unwrap();
        assert!((sc.c / lc.c - 1.0).abs() < 0.1, "{} vs {}", sc.c, lc.c);
        assert!(sc.c2 > 0.0);
    }
}
