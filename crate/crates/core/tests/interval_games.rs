use ivinv_core::game::Coalition;
use ivinv_core::random;
use ivinv_core::{Interval, IntervalGame, IntervalInventorySituation};

/// Counts admissible triples `(S, T, i)` with `S ⊆ T ⊆ N∖{i}` and returns the
/// violations of `w(S∪i) − w(S) ⪰ w(T∪i) − w(T)`. A triple is admissible
/// when both differences are defined.
fn interval_concavity(g: &IntervalGame) -> (usize, Vec<(Coalition, Coalition, usize)>) {
    let n = g.n();
    let mut admissible = 0;
    let mut bad = Vec::new();
    for i in 0..n {
        for t in Coalition::all(n).filter(|t| !t.contains(i)) {
            let Ok(dt) = g.value(t.with(i)).sub_checked(&g.value(t)) else {
                continue;
            };
            for s in t.subsets() {
                let Ok(ds) = g.value(s.with(i)).sub_checked(&g.value(s)) else {
                    continue;
                };
                admissible += 1;
                let slack = 1e-9 * ds.hi().max(dt.hi()).max(1.0);
                if !ds.weakly_geq_within(&dt, slack, slack) {
                    bad.push((s, t, i));
                }
            }
        }
    }
    (admissible, bad)
}

#[test]
fn random_inventory_games_are_concave() {
    let mut rng = random::rng(11);
    let mut admissible = 0;
    for trial in 0..200 {
        let n = 1 + trial % 6;
        let s = if trial % 2 == 0 {
            random::situation(&mut rng, n)
        } else {
            random::unordered_bounds(&mut rng, n)
        };
        let g = s.materialize_game();
        assert!(g.lower.is_concave().unwrap(), "lower border, trial {trial}");
        assert!(g.upper.is_concave().unwrap(), "upper border, trial {trial}");
        let (count, bad) = interval_concavity(&g);
        assert!(bad.is_empty(), "trial {trial}: {bad:?}");
        admissible += count;
    }
    assert!(admissible > 1000, "{admissible}");
}

#[test]
fn game_values_follow_the_closed_form() {
    let mut rng = random::rng(5);
    for _ in 0..20 {
        let s = random::situation(&mut rng, 5);
        let g = s.materialize_game();
        for c in Coalition::all(5) {
            let direct: f64 = c.members().map(|i| s.frequency(i).lo().powi(2)).sum::<f64>().sqrt();
            let expected = 2.0 * s.ordering_cost() * direct;
            assert!((g.value(c).lo() - expected).abs() <= 1e-9 * expected.max(1.0));
        }
    }
}

#[test]
fn size_monotonic_games_have_growing_intervals() {
    let mut rng = random::rng(8);
    for _ in 0..50 {
        let s = random::situation_where(&mut rng, 4, IntervalInventorySituation::shapley_valid);
        let g = s.materialize_game();
        for c in Coalition::all(4) {
            for i in (0..4).filter(|&i| !c.contains(i)) {
                assert!(g.length(c.with(i)) + 1e-9 >= g.length(c));
            }
        }
    }
}

#[test]
fn degenerate_frequencies_give_degenerate_games() {
    let s = IntervalInventorySituation::numbered(2.0, vec![Interval::point(3.0), Interval::point(4.0)]).unwrap();
    let g = s.materialize_game();
    assert_eq!(g.value(Coalition::grand(2)), Interval::point(20.0));
    assert_eq!(g.lower, g.upper);
}
