//! Numerical side of flowforge: space-time grids, the cut-off heat kernels,
//! mollified noise, counterterm constants and the regularized solver.

pub mod constants;
pub mod estimates;
pub mod flowcoef;
pub mod grid;
pub mod kernels;
pub mod noise;
pub mod nonlinearity;
pub mod profile;
pub mod solver;
pub mod spectral;
pub mod study;

pub use flowforge_core::{Error, Exec, Result};
pub use grid::{GridSpec, SpaceTimeField};
pub use kernels::{apply_kernel, apply_kernel_with, History, KernelKind, KernelOp};

/// Least-squares slope of log y against log x.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    #[test]
    fn loglog_slope_of_power_law() {
        let xs = [0.5, 0.25, 0.125];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((super::fit_loglog(&xs, &ys) + 1.5).abs() < 1e-12);
    }
}
