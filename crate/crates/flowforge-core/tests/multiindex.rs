use flowforge_core::multiindex::{
    count_populated_by_order, enumerate, enumerate_brute_force, for_each_populated, scaling_lower_bound, tree_count,
    Label, PreMultiIndex,
};
use flowforge_core::params::rat;
use flowforge_core::{ModelParams, Rational};
use proptest::prelude::*;

#[test]
fn scaling_identities_hold_on_the_whole_truncation() {
    for (alpha, slack) in [(rat(1, 2), rat(1, 4)), (rat(3, 4), rat(0, 1)), (rat(1, 1), rat(1, 2))] {
        let p = ModelParams::new(alpha, 1).unwrap();
        let mut n = 0u64;
        for_each_populated(0, p.gamma, None, |a| {
            let s = a.scaling(alpha);
            assert_eq!(s, a.scaling_reduced(alpha), "{a}");
            assert!(s >= scaling_lower_bound(&a, alpha), "{a}");
            assert!(2 * a.label_size(Label::G) < a.size());
            assert!(a.length() as u64 <= a.order());
            n += 1;
        });
        let expected: u128 = count_populated_by_order(p.gamma).iter().sum();
        assert_eq!(n as u128, expected);
        // at order Γ+1 the general lower bound reads |a| ≥ δ + (label terms);
        // the bound with δ + α in its place fails, the minimum slack is below α
        let mut min_slack: Option<Rational> = None;
        for_each_populated(p.gamma + 1, p.gamma + 1, None, |a| {
            let base = Rational::from_integer(-2) + alpha + alpha / 2 * Rational::from_integer(a.order() as i64);
            assert_eq!(base, p.delta);
            let slack = a.scaling(alpha) - scaling_lower_bound(&a, alpha);
            min_slack = Some(min_slack.map_or(slack, |m: Rational| m.min(slack)));
        });
        assert_eq!(min_slack, Some(slack));
        assert!(slack < alpha);
    }
}

#[test]
fn enumeration_matches_generate_and_filter_at_alpha_one() {
    let p = ModelParams::new(rat(1, 1), 1).unwrap();
    let fast = enumerate(&p, p.gamma);
    let slow = enumerate_brute_force(p.gamma);
    assert_eq!(fast.len(), 4585);
    assert_eq!(fast, slow);
}

#[test]
fn enumeration_is_byte_stable() {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    let ser = || serde_json::to_vec(&enumerate(&p, 5)).unwrap();
    assert_eq!(ser(), ser());
}

#[test]
fn order_zero_units() {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    let units: Vec<String> = enumerate(&p, 0).iter().map(|a| a.to_json()).collect();
    assert_eq!(units, [r#"{"b":[1]}"#, r#"{"c":[1]}"#, r#"{"e":[1]}"#, r#"{"h":[1]}"#]);
}

fn arb_premulti() -> impl Strategy<Value = PreMultiIndex> {
    prop::collection::vec((0usize..7, 0usize..4, 1u32..3), 0..6).prop_map(|v| {
        let mut a = PreMultiIndex::zero();
        for (l, i, c) in v {
            a = a.add(&PreMultiIndex::from_counts([(Label::from_index(l), i, c)]));
        }
        a
    })
}

fn arb_alpha() -> impl Strategy<Value = Rational> {
    (1i64..=20).prop_map(|k| rat(k, 20))
}

proptest! {
    #[test]
    fn reduced_scaling_agrees_when_populated(a in arb_premulti(), alpha in arb_alpha()) {
        if a.is_populated() {
            prop_assert_eq!(a.scaling(alpha), a.scaling_reduced(alpha));
            prop_assert!(a.scaling(alpha) >= scaling_lower_bound(&a, alpha));
        }
    }

    #[test]
    fn population_iff_tree(a in arb_premulti()) {
        prop_assume!(!a.is_zero() && a.size() <= 8);
        prop_assert_eq!(a.is_populated(), tree_count(&a, 12).unwrap() >= 1);
    }

    #[test]
    fn json_round_trip(a in arb_premulti()) {
        let s = a.to_json();
        prop_assert_eq!(PreMultiIndex::from_json(&s).unwrap(), a);
    }

    #[test]
    fn order_and_size_are_additive(a in arb_premulti(), b in arb_premulti()) {
        let c = a.add(&b);
        prop_assert_eq!(c.order(), a.order() + b.order());
        prop_assert_eq!(c.size(), a.size() + b.size());
        prop_assert_eq!(c.sub(&b).unwrap(), a);
    }
}
