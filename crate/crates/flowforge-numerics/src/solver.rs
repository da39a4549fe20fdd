//! Exponential Euler for (∂ₜ − Δ)ψ = S_ε[ψ] on the torus: exact integrating
//! factor for the heat part, explicit nonlinearity, noise and counterterm.

use flowforge_core::renorm::enumerate_relevant;
use flowforge_core::ModelParams;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::constants::{leading_counterterm, scheme_constants};
use crate::grid::{GridSpec, SpaceTimeField};
use crate::noise::{replica_seed, BaseNoise};
use crate::nonlinearity::NonlinearitySpec;
use crate::spectral::Spectral;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountertermMode {
    Off,
    /// −c_ε h′(ψ)h(ψ).
    Leading,
    /// Catalog entries up to the given order; unimplemented constants are zero.
    Catalog(u32),
}

impl CountertermMode {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "off" => Ok(CountertermMode::Off),
            "leading" => Ok(CountertermMode::Leading),
            _ => {
                let k = t
                    .strip_prefix("catalog[")
                    .and_then(|r| r.strip_suffix(']'))
                    .and_then(|k| k.trim().parse().ok())
                    .ok_or_else(|| {
                        Error::Parse(format!("counterterm mode {t:?}: expected off, leading or catalog[k]"))
                    })?;
                Ok(CountertermMode::Catalog(k))
            }
        }
    }
}

impl std::fmt::Display for CountertermMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CountertermMode::Off => f.write_str("off"),
            CountertermMode::Leading => f.write_str("leading"),
            CountertermMode::Catalog(k) => write!(f, "catalog[{k}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    Zero,
    /// a·sin(2πk x₁)
    Sine {
        amplitude: f64,
        k: u32,
    },
    /// a·cos(2πk x₁)
    Cosine {
        amplitude: f64,
        k: u32,
    },
    /// a on x₁ < 1/2 and −a elsewhere: bounded, not continuous.
    Step {
        amplitude: f64,
    },
}

impl InitialCondition {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("initial condition {t:?}: expected zero, sin[a,k], cos[a,k] or step[a]"));
        if t == "zero" {
            return Ok(InitialCondition::Zero);
        }
        let (name, rest) = t.split_once('[').ok_or_else(bad)?;
        let args: Vec<f64> = rest
            .strip_suffix(']')
            .ok_or_else(bad)?
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (name, args.as_slice()) {
            ("sin", [a, k]) => Ok(InitialCondition::Sine { amplitude: *a, k: *k as u32 }),
            ("cos", [a, k]) => Ok(InitialCondition::Cosine { amplitude: *a, k: *k as u32 }),
            ("step", [a]) => Ok(InitialCondition::Step { amplitude: *a }),
            _ => Err(bad()),
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, InitialCondition::Step { .. })
    }

    pub fn sample(&self, grid: &GridSpec) -> Vec<f64> {
        let tau = 2.0 * std::f64::consts::PI;
        (0..grid.points())
            .map(|j| {
                let x = grid.coords(j)[0];
                match *self {
                    InitialCondition::Zero => 0.0,
                    InitialCondition::Sine { amplitude, k } => amplitude * (tau * k as f64 * x).sin(),
                    InitialCondition::Cosine { amplitude, k } => amplitude * (tau * k as f64 * x).cos(),
                    InitialCondition::Step { amplitude } => {
                        if x < 0.5 {
                            amplitude
                        } else {
                            -amplitude
                        }
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimConfig {
    #[serde(skip)]
    pub params: ModelParams,
    /// Solve on [0, T] with this grid; t0 = 0 and t1 = T.
    pub grid: GridSpec,
    pub eps_ladder: Vec<f64>,
    pub seed: u64,
    pub initial: InitialCondition,
    pub counterterm: CountertermMode,
    /// +1 gives the subtraction −c h′h; −1 flips it.
    pub counterterm_sign: f64,
    pub mc_samples: usize,
    pub blowup: f64,
    /// Keep every `save_every`-th step of the trajectory.
    pub save_every: usize,
}

impl SimConfig {
    pub fn new(params: ModelParams, grid: GridSpec, eps_ladder: Vec<f64>, seed: u64) -> Self {
        SimConfig {
            params,
            grid,
            eps_ladder,
            seed,
            initial: InitialCondition::Zero,
            counterterm: CountertermMode::Leading,
            counterterm_sign: 1.0,
            mc_samples: 1,
            blowup: 1e6,
            save_every: 0,
        }
    }

    pub fn t_final(&self) -> f64 {
        self.grid.t1
    }

    pub fn validate(&self, nl: &NonlinearitySpec) -> Result<()> {
        nl.validate()?;
        if nl.n != self.params.n || self.grid.n != self.params.n {
            return Err(Error::Domain(format!(
                "dimension mismatch: params n = {}, grid n = {}, nonlinearity n = {}",
                self.params.n, self.grid.n, nl.n
            )));
        }
        if self.grid.t0 != 0.0 || self.t_final() > 1.0 {
            return Err(Error::Domain(format!(
                "time window must be [0, T] with T <= 1, got [{}, {}]",
                self.grid.t0, self.grid.t1
            )));
        }
        if self.eps_ladder.is_empty() {
            return Err(Error::Domain("eps ladder is empty".into()));
        }
        if self.eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Domain("eps ladder must be strictly decreasing".into()));
        }
        for &e in &self.eps_ladder {
            self.grid.check_resolves(e)?;
        }
        if nl.uses_gradient() && !self.initial.is_smooth() {
            return Err(Error::Domain(
                "initial condition has no gradient; KPZ-type terms (d or g nonzero) need a smooth initial condition"
                    .into(),
            ));
        }
        if self.blowup.is_nan() || self.blowup <= 0.0 {
            return Err(Error::Domain("blow-up bound must be positive".into()));
        }
        Ok(())
    }
}

/// Constants used by one solve.
#[derive(Debug, Clone, Serialize)]
pub struct AppliedConstants {
    pub eps: f64,
    /// Coefficient of h′h, matched to the scheme.
    pub c: f64,
    /// Coefficient of tr(g)h²/n, matched to the scheme; zero unless the catalog reaches order 2.
    pub c2: f64,
    /// The continuum quadrature of the leading constant, for reference.
    pub c_continuum: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Saved trajectory; the grid step is dt·save_every.
    pub field: SpaceTimeField,
    pub final_state: Vec<f64>,
    /// Time at which |ψ| first exceeded the bound.
    pub blown_up_at: Option<f64>,
    /// ∫ of the spatial mean of every right-hand-side term except hξ.
    pub drift: f64,
    pub constants: AppliedConstants,
}

/// Counterterm constants for a mode, with warnings for catalog entries that
/// have no implemented quadrature.
pub fn counterterm_constants(cfg: &SimConfig, nl: &NonlinearitySpec, eps: f64) -> Result<AppliedConstants> {
    let mut out = AppliedConstants { eps, c: 0.0, c2: 0.0, c_continuum: 0.0, warnings: vec![] };
    if cfg.counterterm == CountertermMode::Off || nl.h.is_zero() {
        return Ok(out);
    }
    let sc = scheme_constants(&cfg.params, eps, &cfg.grid)?;
    out.c = sc.c;
    out.c_continuum = leading_counterterm(&cfg.params, eps, &cfg.grid)?.c;
    if let CountertermMode::Catalog(k) = cfg.counterterm {
        if k >= 2 {
            out.c2 = sc.c2;
        }
        let implemented = [r#"{"h":[1,1]}"#, r#"{"g":[1],"h":[2]}"#];
        let missing: Vec<String> = enumerate_relevant(&cfg.params)
            .into_iter()
            .filter(|e| e.order <= k as u64)
            .filter(|e| !(implemented.contains(&e.a.to_json().as_str()) && e.decorations.iter().all(|d| d.is_zero())))
            .map(|e| format!("{} {}", e.a, e.decoration_json()))
            .collect();
        if !missing.is_empty() {
            out.warnings.push(format!(
                "{} catalog entries up to order {k} have no implemented constant and are set to zero: {}",
                missing.len(),
                missing.join("; ")
            ));
        }
    }
    Ok(out)
}

/// Solve with a given noise field (or none) sampled on the solver grid.
pub fn solve_with_noise(
    cfg: &SimConfig,
    nl: &NonlinearitySpec,
    noise: Option<&SpaceTimeField>,
    constants: AppliedConstants,
) -> Result<Solution> {
    let grid = cfg.grid;
    if let Some(xi) = noise {
        if xi.grid != grid {
            return Err(Error::Contract("noise grid differs from solver grid".into()));
        }
    }
    let spec = Spectral::new(&grid);
    let (steps, p, n) = (grid.steps(), grid.points(), grid.n as usize);
    let dt = grid.dt;
    let decay: Vec<f64> = spec.lambda.iter().map(|l| (-l * dt).exp()).collect();
    let phi: Vec<f64> =
        spec.lambda.iter().zip(&decay).map(|(l, q)| if *l > 0.0 { (1.0 - q) / l } else { dt }).collect();
    let save_every = if cfg.save_every == 0 { (steps / 100).max(1) } else { cfg.save_every };
    let sign = cfg.counterterm_sign;
    let (c, c2n) = (constants.c, constants.c2 / n as f64);

    let mut psi = cfg.initial.sample(&grid);
    let mut hat = spec.forward(&psi);
    let mut saved = psi.clone();
    let mut nsaved = 1usize;
    let mut blown = None;
    let mut drift = 0.0;
    let mut grad = vec![vec![0.0; p]; n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); p];
    let gradient = nl.uses_gradient();
    let active = !(nl.b.is_zero() && nl.h.is_zero() && !gradient);

    for i in 0..steps - 1 {
        if active {
            if gradient {
                for (a, g) in grad.iter_mut().enumerate() {
                    *g = spec.derivative(&hat, a);
                }
            }
            let eta = noise.map(|f| f.slice(i));
            let mut drift_sum = 0.0;
            for j in 0..p {
                let u = psi[j];
                let mut s = nl.b.eval(u);
                if gradient {
                    for a in 0..n {
                        s += nl.d[a].eval(u) * grad[a][j];
                        for b in 0..n {
                            s += nl.g[a][b].eval(u) * grad[a][j] * grad[b][j];
                        }
                    }
                }
                let hu = nl.h.eval(u);
                if c != 0.0 {
                    s -= sign * c * nl.h.deriv(1, u) * hu;
                }
                if c2n != 0.0 {
                    s -= sign * c2n * nl.trace_g(u) * hu * hu;
                }
                drift_sum += s;
                if let Some(e) = eta {
                    s += hu * e[j];
                }
                rhs[j] = Complex64::new(s, 0.0);
            }
            drift += dt * drift_sum / p as f64;
            spec.forward_in_place(&mut rhs);
            for j in 0..p {
                hat[j] = hat[j] * decay[j] + rhs[j] * phi[j];
            }
        } else {
            for j in 0..p {
                hat[j] *= decay[j];
            }
        }
        psi = spec.inverse(&hat);
        if psi.iter().any(|v| !v.is_finite() || v.abs() > cfg.blowup) {
            blown = Some(grid.time(i + 1));
            break;
        }
        if (i + 1) % save_every == 0 {
            saved.extend_from_slice(&psi);
            nsaved += 1;
        }
    }
    let sgrid =
        GridSpec::new(grid.n, grid.m, 0.0, (nsaved - 1) as f64 * dt * save_every as f64, dt * save_every as f64)?;
    Ok(Solution {
        field: SpaceTimeField { grid: sgrid, values: saved },
        final_state: psi,
        blown_up_at: blown,
        drift,
        constants,
    })
}

/// Solve for the first ε of the ladder with the configured seed.
pub fn solve_regularized(cfg: &SimConfig, nl: &NonlinearitySpec) -> Result<Solution> {
    cfg.validate(nl)?;
    let eps = cfg.eps_ladder[0];
    let constants = counterterm_constants(cfg, nl, eps)?;
    if nl.h.is_zero() {
        return solve_with_noise(cfg, nl, None, constants);
    }
    let base = BaseNoise::generate(&cfg.grid, replica_seed(cfg.seed, 0), eps);
    let xi = base.mollify(&cfg.params, eps)?;
    solve_with_noise(cfg, nl, Some(&xi), constants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Func;
    use flowforge_core::params::rat;

    fn cfg(m: usize, t: f64) -> SimConfig {
        let p = ModelParams::new(rat(1, 2), 1).unwrap();
        let g = GridSpec::parabolic(1, m, t).unwrap();
        SimConfig::new(p, g, vec![0.25], 3)
    }

    #[test]
    fn zero_data_stays_zero() {
        let c = cfg(32, 0.01);
        let s = solve_regularized(&c, &NonlinearitySpec::zero(1)).unwrap();
        assert!(s.field.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn step_data_needs_gpam_mode() {
        let mut c = cfg(32, 0.01);
        c.initial = InitialCondition::Step { amplitude: 1.0 };
        let mut nl = NonlinearitySpec::zero(1);
        nl.h = Func::Cos;
        assert!(c.validate(&nl).is_ok());
        nl = nl.with_isotropic_g(Func::Const(0.25));
        assert!(matches!(c.validate(&nl), Err(Error::Domain(_))));
    }

    #[test]
    fn blow_up_is_reported() {
        let mut c = cfg(16, 0.5);
        c.initial = InitialCondition::Cosine { amplitude: 1.0, k: 0 };
        c.blowup = 10.0;
        let mut nl = NonlinearitySpec::zero(1);
        nl.b = Func::Poly(vec![0.0, 0.0, 1.0]);
        let s = solve_regularized(&c, &nl).unwrap();
        // ψ' = ψ², ψ(0) = 1 exceeds 10 at t = 0.9; check a quicker bound instead
        assert!(s.blown_up_at.is_none());
        c.grid = GridSpec::parabolic(1, 16, 1.0).unwrap();
        let s = solve_regularized(&c, &nl).unwrap();
        let t = s.blown_up_at.unwrap();
        assert!((t - 0.9).abs() < 0.01, "{t}");
    }

    #[test]
    fn parse_modes() {
        for m in [CountertermMode::Off, CountertermMode::Leading, CountertermMode::Catalog(3)] {
            assert_eq!(CountertermMode::parse(&m.to_string()).unwrap(), m);
        }
        assert_eq!(CountertermMode::parse("catalog[2]").unwrap(), CountertermMode::Catalog(2));
        assert!(CountertermMode::parse("all").is_err());
        assert_eq!(InitialCondition::parse("sin[0.5, 1]").unwrap(), InitialCondition::Sine { amplitude: 0.5, k: 1 });
    }
}
