//! Coupled ε-ladder study: the same base noise drives every ε, with and
//! without counterterm, and consecutive ladder members are compared.

use flowforge_core::params::{to_f64, ParamsSummary};
use serde::Serialize;

use crate::grid::{mean, median, sup_abs, GridSpec};
use crate::noise::{replica_seed, BaseNoise};
use crate::nonlinearity::NonlinearitySpec;
use crate::solver::{counterterm_constants, solve_with_noise, AppliedConstants, CountertermMode, SimConfig};
use crate::{Exec, Result};

#[derive(Debug, Clone, Serialize)]
pub struct EpsStats {
    pub eps: f64,
    pub median_sup: f64,
    pub mean_l2: f64,
    /// Mean of mean(ψ(T)) − mean(ψ(0)), noise included.
    pub mean_displacement: f64,
    /// Drift: time integral of the spatial mean of the right-hand side without hξ.
    pub mean_drift: f64,
    pub median_abs_drift: f64,
    pub blown_up: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairStats {
    pub eps: f64,
    pub eps_next: f64,
    pub median_sup_diff: f64,
    pub median_holder_diff: f64,
    /// Replicas excluded because either member blew up.
    pub blown_up: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderRun {
    pub counterterm: CountertermMode,
    pub per_eps: Vec<EpsStats>,
    pub pairs: Vec<PairStats>,
    pub constants: Vec<AppliedConstants>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub params: ParamsSummary,
    pub grid: GridSpec,
    pub eps_ladder: Vec<f64>,
    pub seed: u64,
    pub mc_samples: usize,
    pub steps: usize,
    pub nonlinearity: NonlinearitySpec,
    /// Exponent of the discrete Hölder difference, α − κ₀.
    pub holder_exponent: f64,
    pub renormalized: LadderRun,
    pub unrenormalized: LadderRun,
    pub warnings: Vec<String>,
}

/// sup|u| plus the largest difference quotient |u(x+s·e)−u(x)|/|s·dx|^β
/// over shifts s ≤ M/2 along each axis.
pub fn holder_norm(u: &[f64], grid: &GridSpec, beta: f64) -> f64 {
    let m = grid.m;
    let mut best: f64 = 0.0;
    for axis in 0..grid.n as usize {
        let stride = if grid.n == 2 && axis == 0 { m } else { 1 };
        for s in 1..=m / 2 {
            let w = (s as f64 * grid.dx()).powf(-beta);
            for (j, &uj) in u.iter().enumerate() {
                let along = (j / stride) % m;
                let k = j - along * stride + ((along + s) % m) * stride;
                best = best.max((u[k] - uj).abs() * w);
            }
        }
    }
    sup_abs(u) + best
}

type Run = Option<(Vec<f64>, f64)>;

struct ReplicaOut {
    on: Vec<Run>,
    off: Vec<Run>,
}

pub fn convergence_study(cfg: &SimConfig, nl: &NonlinearitySpec) -> Result<ConvergenceReport> {
    convergence_study_with(cfg, nl, Exec::default())
}

pub fn convergence_study_with(cfg: &SimConfig, nl: &NonlinearitySpec, exec: Exec) -> Result<ConvergenceReport> {
    cfg.validate(nl)?;
    let ladder = &cfg.eps_ladder;
    let mut off_cfg = cfg.clone();
    off_cfg.counterterm = CountertermMode::Off;
    off_cfg.save_every = cfg.grid.steps();
    let mut on_cfg = cfg.clone();
    on_cfg.save_every = cfg.grid.steps();
    let on_consts: Vec<AppliedConstants> =
        ladder.iter().map(|&e| counterterm_constants(&on_cfg, nl, e)).collect::<Result<_>>()?;
    let off_consts: Vec<AppliedConstants> =
        ladder.iter().map(|&e| counterterm_constants(&off_cfg, nl, e)).collect::<Result<_>>()?;
    let initial = cfg.initial.sample(&cfg.grid);
    let eps_max = ladder[0];

    let outs: Vec<Result<ReplicaOut>> = exec.map_range(cfg.mc_samples, |r| {
        let base = BaseNoise::generate(&cfg.grid, replica_seed(cfg.seed, r as u64), eps_max);
        let mut out = ReplicaOut { on: vec![], off: vec![] };
        for (k, &eps) in ladder.iter().enumerate() {
            let xi = base.mollify_with(&cfg.params, eps, Exec::Sequential)?;
            let keep = |s: crate::solver::Solution| s.blown_up_at.is_none().then_some((s.final_state, s.drift));
            out.on.push(keep(solve_with_noise(&on_cfg, nl, Some(&xi), on_consts[k].clone())?));
            out.off.push(keep(solve_with_noise(&off_cfg, nl, Some(&xi), off_consts[k].clone())?));
        }
        Ok(out)
    });
    let outs: Vec<ReplicaOut> = outs.into_iter().collect::<Result<_>>()?;

    let beta = to_f64(&(cfg.params.alpha - cfg.params.kappa0));
    let summarize = |pick: &dyn Fn(&ReplicaOut) -> &Vec<Run>, mode, constants: Vec<AppliedConstants>| {
        let m0 = mean(&initial);
        let per_eps = ladder
            .iter()
            .enumerate()
            .map(|(k, &eps)| {
                let finals: Vec<&(Vec<f64>, f64)> = outs.iter().filter_map(|o| pick(o)[k].as_ref()).collect();
                let sups: Vec<f64> = finals.iter().map(|f| sup_abs(&f.0)).collect();
                let l2: Vec<f64> =
                    finals.iter().map(|f| mean(&f.0.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt()).collect();
                let disp: Vec<f64> = finals.iter().map(|f| mean(&f.0) - m0).collect();
                let drift: Vec<f64> = finals.iter().map(|f| f.1).collect();
                let avg = |v: &[f64]| if v.is_empty() { f64::NAN } else { mean(v) };
                EpsStats {
                    eps,
                    median_sup: median(&sups),
                    mean_l2: avg(&l2),
                    mean_displacement: avg(&disp),
                    mean_drift: avg(&drift),
                    median_abs_drift: median(&drift.iter().map(|d| d.abs()).collect::<Vec<_>>()),
                    blown_up: outs.len() - finals.len(),
                }
            })
            .collect();
        let pairs = (1..ladder.len())
            .map(|k| {
                let mut sup = vec![];
                let mut hol = vec![];
                for o in &outs {
                    if let (Some((a, _)), Some((b, _))) = (&pick(o)[k - 1], &pick(o)[k]) {
                        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                        sup.push(sup_abs(&d));
                        hol.push(holder_norm(&d, &cfg.grid, beta));
                    }
                }
                PairStats {
                    eps: ladder[k - 1],
                    eps_next: ladder[k],
                    median_sup_diff: median(&sup),
                    median_holder_diff: median(&hol),
                    blown_up: outs.len() - sup.len(),
                }
            })
            .collect();
        LadderRun { counterterm: mode, per_eps, pairs, constants }
    };
    let mut warnings: Vec<String> = on_consts.iter().flat_map(|c| c.warnings.clone()).collect();
    warnings.dedup();
    Ok(ConvergenceReport {
        params: cfg.params.summary(),
        grid: cfg.grid,
        eps_ladder: ladder.clone(),
        seed: cfg.seed,
        mc_samples: cfg.mc_samples,
        steps: cfg.grid.steps(),
        nonlinearity: nl.clone(),
        holder_exponent: beta,
        renormalized: summarize(&|o: &ReplicaOut| &o.on, cfg.counterterm, on_consts),
        unrenormalized: summarize(&|o: &ReplicaOut| &o.off, CountertermMode::Off, off_consts),
        warnings,
    })
}
