use ivinv_core::properties::{self, Subject};
use ivinv_core::random;
use ivinv_core::rules;
use ivinv_core::{Error, Interval, IntervalInventorySituation, Rule};
use rand::Rng;

fn sit(a: f64, m: &[(f64, f64)]) -> IntervalInventorySituation {
    let m = m.iter().map(|&(lo, hi)| Interval::new(lo, hi).unwrap()).collect();
    IntervalInventorySituation::numbered(a, m).unwrap()
}

/// A SOC-valid situation where agent `k` is inactive.
fn soc_valid_with_inactive<R: Rng>(rng: &mut R, n: usize) -> IntervalInventorySituation {
    loop {
        let s = random::situation(rng, n);
        let k = rng.gen_range(0..n);
        let z = random::with_inactive(&s, k);
        if z.soc_valid() {
            return z;
        }
    }
}

/// Draws a partner for `s` with the same agents and ordering cost such that
/// the combined situation is admissible for `rule`.
fn tba_partner<R: Rng>(rng: &mut R, s: &IntervalInventorySituation, rule: Rule) -> IntervalInventorySituation {
    loop {
        let other = random::situation(rng, s.n());
        let t = s.with_frequencies(other.frequencies().to_vec()).unwrap();
        if rule.allocate(&t).is_ok()
            && properties::combine_situations(s, &t).is_ok_and(|c| rule.allocate(&c).is_ok())
        {
            return t;
        }
    }
}

#[test]
fn soc_rule_axioms_on_random_situations() {
    let mut rng = random::rng(21);
    for trial in 0..200 {
        let n = 2 + trial % 5;
        let s = random::soc_valid(&mut rng, n);
        let alloc = rules::interval_soc(&s).unwrap();
        assert!(properties::check_efficiency(&s, &alloc).unwrap().holds);
        assert!(properties::check_cca(&s, &alloc).unwrap().holds, "trial {trial}");
        let (a, b) = properties::self_split(&s).unwrap();
        assert!(properties::check_tba(Rule::Soc, &a, &b).unwrap().holds, "trial {trial}");
        let t = tba_partner(&mut rng, &s, Rule::Soc);
        assert!(properties::check_tba(Rule::Soc, &s, &t).unwrap().holds, "trial {trial}");
        let z = soc_valid_with_inactive(&mut rng, n);
        assert!(properties::check_iae(Rule::Soc, &z).unwrap().holds, "trial {trial}");
    }
}

#[test]
fn shapley_rule_axioms_on_random_situations() {
    let mut rng = random::rng(22);
    for trial in 0..200 {
        let n = 2 + trial % 5;
        let s = random::monotonic_with_monotonic_restrictions(&mut rng, n);
        let alloc = rules::interval_shapley(&s).unwrap();
        assert!(properties::check_cca(&s, &alloc).unwrap().holds, "trial {trial}");
        let bc = properties::check_bc(Rule::Shapley, &s).unwrap();
        assert!(bc.holds && bc.skipped.is_empty(), "trial {trial}: {bc}");
        let core = properties::interval_core_contains(&s.materialize_game(), &alloc).unwrap();
        assert!(core.holds, "trial {trial}");
    }
}

#[test]
fn shapley_bounds_are_border_shapley_values() {
    let mut rng = random::rng(23);
    for _ in 0..30 {
        let s = random::situation_where(&mut rng, 5, IntervalInventorySituation::shapley_valid);
        let g = s.materialize_game();
        let lo = g.lower.shapley_exact().unwrap();
        let hi = g.upper.shapley_exact().unwrap();
        let sh = rules::interval_shapley(&s).unwrap();
        for i in 0..5 {
            assert_eq!(sh[i].lo(), lo[i]);
            assert_eq!(sh[i].hi(), hi[i]);
        }
    }
}

#[test]
fn soc_fails_balanced_contributions_on_example_2() {
    let s = sit(1.0, &[(1.0, 3.0), (2.0, 4.0), (3.0, 5.0)]);
    let r = properties::check_bc(Rule::Soc, &s).unwrap();
    assert!(!r.holds);
    assert_eq!(r.witnesses[0].subject, Subject::Pair { i: 0, j: 1 });
    assert!(properties::check_bc(Rule::Shapley, &s).unwrap().holds);
}

#[test]
fn equal_split_is_exempt_but_not_additive() {
    let s1 = sit(1.0, &[(1.0, 1.0), (1.0, 1.0)]);
    let s2 = sit(1.0, &[(1.0, 1.0), (0.0, 0.0)]);
    assert!(!properties::check_tba(Rule::EqualSplit, &s1, &s2).unwrap().holds);
    assert!(properties::check_iae(Rule::EqualSplit, &s2).unwrap().holds);
}

#[test]
fn swapped_soc_is_additive_but_not_exempt() {
    let witness = sit(0.5, &[(1.0, 1.0), (0.0, 0.0)]);
    let iae = properties::check_iae(Rule::SwappedSoc, &witness).unwrap();
    assert!(!iae.holds);
    assert_eq!(rules::swapped_soc(&witness).unwrap()[1], Interval::point(1.0));

    let mut rng = random::rng(24);
    for _ in 0..50 {
        let s = random::soc_valid(&mut rng, 2);
        let t = tba_partner(&mut rng, &s, Rule::SwappedSoc);
        assert!(properties::check_tba(Rule::SwappedSoc, &s, &t).unwrap().holds);
    }
}

#[test]
fn soc_rule_reduces_to_the_deterministic_rule() {
    let s = sit(3.0, &[(1.0, 1.0), (2.0, 2.0), (2.0, 2.0)]);
    let soc = rules::interval_soc(&s).unwrap();
    // m_N = 3, σ_i = 2·3·m_i²/3
    for (i, m) in [1.0, 2.0, 2.0].into_iter().enumerate() {
        assert!((soc[i].lo() - 2.0 * m * m).abs() < 1e-12);
        assert!(soc[i].is_degenerate());
    }
}

#[test]
fn rules_reject_situations_outside_their_domain() {
    let s = sit(1.0, &[(1.0, 10.0), (5.0, 5.0)]);
    assert!(matches!(rules::interval_soc(&s), Err(Error::SocConditionViolated(_))));
    assert!(matches!(rules::interval_shapley(&s), Err(Error::NotSizeMonotonic { .. })));
}
