use flowforge_core::params::rat;
use flowforge_core::ModelParams;
use flowforge_numerics::nonlinearity::{Func, NonlinearitySpec};
use flowforge_numerics::solver::{CountertermMode, InitialCondition, SimConfig};
use flowforge_numerics::study::{convergence_study, convergence_study_with};
use flowforge_numerics::{Error, Exec, GridSpec};

fn kpz(ladder: Vec<f64>) -> (SimConfig, NonlinearitySpec) {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    let mut cfg = SimConfig::new(p, GridSpec::parabolic(1, 32, 0.02).unwrap(), ladder, 4);
    cfg.mc_samples = 3;
    cfg.counterterm = CountertermMode::Catalog(2);
    let mut nl = NonlinearitySpec::zero(1).with_isotropic_g(Func::Const(0.25));
    nl.h = Func::Cos;
    (cfg, nl)
}

#[test]
fn single_rung_ladder_has_no_pairs() {
    let (cfg, nl) = kpz(vec![0.25]);
    let r = convergence_study(&cfg, &nl).unwrap();
    assert!(r.renormalized.pairs.is_empty() && r.unrenormalized.pairs.is_empty());
    assert_eq!(r.renormalized.per_eps.len(), 1);
    assert_eq!(r.unrenormalized.counterterm, CountertermMode::Off);
}

#[test]
fn report_is_bit_stable_across_runs_and_modes() {
    let (cfg, nl) = kpz(vec![0.25, 0.125]);
    let a = serde_json::to_string(&convergence_study_with(&cfg, &nl, Exec::Parallel).unwrap()).unwrap();
    let b = serde_json::to_string(&convergence_study_with(&cfg, &nl, Exec::Parallel).unwrap()).unwrap();
    let c = serde_json::to_string(&convergence_study_with(&cfg, &nl, Exec::Sequential).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn off_run_carries_no_constants_and_the_on_run_warns() {
    let (cfg, nl) = kpz(vec![0.25, 0.125]);
    let r = convergence_study(&cfg, &nl).unwrap();
    assert!(r.unrenormalized.constants.iter().all(|c| c.c == 0.0 && c.c2 == 0.0));
    assert!(r.renormalized.constants.iter().all(|c| c.c > 0.0 && c.c2 > 0.0));
    assert_eq!(r.warnings.len(), 1);
    // without the g-counterterm the drift is pushed up
    for (on, off) in r.renormalized.per_eps.iter().zip(&r.unrenormalized.per_eps) {
        assert!(off.mean_drift > on.mean_drift);
    }
}

#[test]
fn ladder_is_validated() {
    let (mut cfg, nl) = kpz(vec![0.125, 0.25]);
    assert!(matches!(convergence_study(&cfg, &nl), Err(Error::Domain(_))));
    cfg.eps_ladder = vec![0.25];
    cfg.initial = InitialCondition::Step { amplitude: 1.0 };
    assert!(matches!(convergence_study(&cfg, &nl), Err(Error::Domain(_))));
}
