use flowforge_core::multiindex::{Label, PreMultiIndex};
use flowforge_core::params::rat;
use flowforge_core::ModelParams;
use flowforge_numerics::flowcoef::{flow_coefficient, order_zero_field};
use flowforge_numerics::{Error, Exec, GridSpec};

const EPS: f64 = 1.0 / 32.0;
const MUS: [f64; 2] = [0.125, 0.0625];

fn setup() -> (ModelParams, GridSpec) {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    (p, GridSpec::new(1, 128, 0.0, 0.0, EPS * EPS / 8.0).unwrap())
}

fn h(entries: &[u32]) -> PreMultiIndex {
    PreMultiIndex::from_entries(&[(Label::H, entries)])
}

#[test]
fn first_order_coefficient_is_supported_in_its_window() {
    let (p, g) = setup();
    let r = flow_coefficient(&h(&[1, 1]), &p, &g, EPS, &MUS, 3, 4, Exec::Parallel).unwrap();
    assert_eq!(r.order, 1);
    assert!(r.renormalized);
    for t in &r.per_mu {
        assert!(t.outside_mass < 1e-8, "{t:?}");
        assert!(t.expectation_subtracted > 0.0);
        assert!(t.norm.is_finite() && t.norm > 0.0);
        assert!(t.flow_increment_rms > 0.0);
    }
    // grows as μ shrinks: the index has negative scaling
    assert!(r.per_mu[1].norm > r.per_mu[0].norm);
    assert!(r.fitted_exponent < 0.0);
}

#[test]
fn parallel_and_sequential_agree() {
    let (p, g) = setup();
    let a = flow_coefficient(&h(&[1, 1]), &p, &g, EPS, &MUS, 9, 3, Exec::Parallel).unwrap();
    let b = flow_coefficient(&h(&[1, 1]), &p, &g, EPS, &MUS, 9, 3, Exec::Sequential).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn deterministic_coefficient_has_unit_norm() {
    let (p, g) = setup();
    let one = PreMultiIndex::unit(Label::B, 0);
    let r = flow_coefficient(&one, &p, &g, EPS, &MUS, 3, 2, Exec::Sequential).unwrap();
    for t in &r.per_mu {
        assert!((t.norm - 1.0).abs() < 1e-9, "{t:?}");
        assert_eq!(t.flow_increment_rms, 0.0);
    }
    assert!(r.fitted_exponent.abs() < 1e-6);
}

#[test]
fn order_zero_noise_does_not_flow() {
    let (p, g) = setup();
    let noise = PreMultiIndex::unit(Label::H, 0);
    let r = flow_coefficient(&noise, &p, &g, EPS, &MUS, 3, 2, Exec::Sequential).unwrap();
    assert!(!r.renormalized);
    assert!(r.per_mu.iter().all(|t| t.flow_increment_rms == 0.0 && t.expectation_subtracted == 0.0));
    let f = order_zero_field(&noise, &p, &g.with_window(0.0, 63.0 * g.dt).unwrap(), EPS, 3).unwrap();
    assert_eq!(f.values.len(), 64 * 128);
}

#[test]
fn out_of_scope_inputs_are_refused() {
    let (p, g) = setup();
    let second = h(&[2, 1, 1]);
    assert!(second.order() > 1);
    assert!(matches!(flow_coefficient(&second, &p, &g, EPS, &MUS, 0, 1, Exec::Sequential), Err(Error::Scope(_))));
    assert!(matches!(
        flow_coefficient(&h(&[2, 1, 0]), &p, &g, EPS, &MUS, 0, 1, Exec::Sequential),
        Err(Error::Domain(_))
    ));
    let p2 = ModelParams::new(rat(1, 2), 2).unwrap();
    let g2 = GridSpec::new(2, 128, 0.0, 0.0, g.dt).unwrap();
    assert!(matches!(flow_coefficient(&h(&[1, 1]), &p2, &g2, EPS, &MUS, 0, 1, Exec::Sequential), Err(Error::Scope(_))));
    assert!(matches!(
        flow_coefficient(&h(&[1, 1]), &p, &g, EPS, &[0.01], 0, 1, Exec::Sequential),
        Err(Error::Resolution(_))
    ));
}
