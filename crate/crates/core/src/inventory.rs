//! EOQ inventory situations with interval order frequencies and the interval
//! cost games they induce.
//!
//! A coalition `S` that orders jointly pays `2a·sqrt(Σ_{i∈S} m_i²)`; with
//! interval frequencies this is evaluated boundwise, giving a lower and an
//! upper border game.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{AgentSet, Coalition, CostGame, MAX_EXHAUSTIVE_AGENTS};
use crate::interval::Interval;
use crate::tolerance::{self, GUARD_SLACK};

/// An agent with known demand rate and holding cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicAgent {
    pub demand: f64,
    pub holding_cost: f64,
}

impl DeterministicAgent {
    pub fn new(demand: f64, holding_cost: f64) -> Result<Self> {
        if holding_cost <= 0.0 || !holding_cost.is_finite() {
            return Err(Error::NonPositiveHoldingCost(holding_cost));
        }
        if demand < 0.0 || !demand.is_finite() {
            return Err(Error::NegativeOperand(demand));
        }
        Ok(DeterministicAgent {
            demand,
            holding_cost,
        })
    }

    /// `Q* = sqrt(2ad/h)`.
    pub fn eoq_order_size(&self, ordering_cost: f64) -> f64 {
        (2.0 * ordering_cost * self.demand / self.holding_cost).sqrt()
    }

    /// `m = d/Q* = sqrt(dh/(2a))`, zero for zero demand.
    pub fn eoq_frequency(&self, ordering_cost: f64) -> f64 {
        if self.demand == 0.0 {
            return 0.0;
        }
        (self.demand * self.holding_cost / (2.0 * ordering_cost)).sqrt()
    }

    /// `2am`, which equals `sqrt(2adh)`.
    pub fn eoq_optimal_cost(&self, ordering_cost: f64) -> f64 {
        2.0 * ordering_cost * self.eoq_frequency(ordering_cost)
    }
}

/// An agent whose demand is only known to lie in an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalAgent {
    pub demand: Interval,
    pub holding_cost: f64,
}

impl IntervalAgent {
    pub fn new(demand: Interval, holding_cost: f64) -> Result<Self> {
        if demand.lo() < 0.0 {
            return Err(Error::NegativeOperand(demand.lo()));
        }
        if holding_cost <= 0.0 || !holding_cost.is_finite() {
            return Err(Error::NonPositiveHoldingCost(holding_cost));
        }
        Ok(IntervalAgent {
            demand,
            holding_cost,
        })
    }

    fn bound(&self, d: f64) -> DeterministicAgent {
        DeterministicAgent {
            demand: d,
            holding_cost: self.holding_cost,
        }
    }

    /// `[m(d.lo), m(d.hi)]`.
    pub fn frequency(&self, ordering_cost: f64) -> Interval {
        let lo = self.bound(self.demand.lo()).eoq_frequency(ordering_cost);
        let hi = self.bound(self.demand.hi()).eoq_frequency(ordering_cost);
        Interval::from_rounded(lo, hi, GUARD_SLACK).expect("sqrt is monotone")
    }
}

/// `(N, a, {m_i})` together with its two validity flags.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalInventorySituation {
    agents: AgentSet,
    ordering_cost: f64,
    frequencies: Vec<Interval>,
    soc_valid: bool,
    shapley_valid: bool,
}

impl IntervalInventorySituation {
    pub fn new(agents: AgentSet, ordering_cost: f64, frequencies: Vec<Interval>) -> Result<Self> {
        if ordering_cost <= 0.0 || !ordering_cost.is_finite() {
            return Err(Error::NonPositiveOrderingCost(ordering_cost));
        }
        if frequencies.len() != agents.len() {
            return Err(Error::AllocationSize {
                got: frequencies.len(),
                expected: agents.len(),
            });
        }
        if agents.len() > MAX_EXHAUSTIVE_AGENTS {
            return Err(Error::too_many(agents.len(), MAX_EXHAUSTIVE_AGENTS));
        }
        if let Some(m) = frequencies.iter().find(|m| m.lo() < 0.0) {
            return Err(Error::NegativeOperand(m.lo()));
        }
        let mut s = IntervalInventorySituation {
            agents,
            ordering_cost,
            frequencies,
            soc_valid: false,
            shapley_valid: false,
        };
        s.soc_valid = match s.validate_soc_condition() {
            Ok(report) => report.holds,
            Err(Error::AllZeroFrequencies) => true,
            Err(e) => return Err(e),
        };
        s.shapley_valid = s.size_monotonic_violation()?.is_none();
        Ok(s)
    }

    /// Derives `m_i = [sqrt(d.lo·h/(2a)), sqrt(d.hi·h/(2a))]` for each agent.
    pub fn from_demand(agents: AgentSet, ordering_cost: f64, data: &[IntervalAgent]) -> Result<Self> {
        if ordering_cost <= 0.0 || !ordering_cost.is_finite() {
            return Err(Error::NonPositiveOrderingCost(ordering_cost));
        }
        let m = data.iter().map(|d| d.frequency(ordering_cost)).collect();
        Self::new(agents, ordering_cost, m)
    }

    /// Agents labelled `1..=n`.
    pub fn numbered(ordering_cost: f64, frequencies: Vec<Interval>) -> Result<Self> {
        let agents = AgentSet::numbered(frequencies.len())?;
        Self::new(agents, ordering_cost, frequencies)
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn ordering_cost(&self) -> f64 {
        self.ordering_cost
    }

    pub fn frequencies(&self) -> &[Interval] {
        &self.frequencies
    }

    pub fn frequency(&self, i: usize) -> Interval {
        self.frequencies[i]
    }

    /// Whether the interval SOC-rule's division is defined for every agent.
    pub fn soc_valid(&self) -> bool {
        self.soc_valid
    }

    /// Whether the length game is monotone, so the interval Shapley rule applies.
    pub fn shapley_valid(&self) -> bool {
        self.shapley_valid
    }

    pub fn is_inactive(&self, i: usize) -> bool {
        self.frequencies[i].is_zero()
    }

    /// `Σ_{i∈S} m_i²` boundwise.
    pub fn squared_sum(&self, s: Coalition) -> Interval {
        s.members()
            .map(|i| {
                let m = self.frequencies[i];
                Interval::new(m.lo() * m.lo(), m.hi() * m.hi()).expect("nonnegative frequencies")
            })
            .sum()
    }

    /// `m_N = sqrt(Σ_{i∈N} m_i²)`.
    pub fn aggregate_frequency(&self) -> Interval {
        self.squared_sum(self.agents.grand())
            .sqrt()
            .expect("nonnegative frequencies")
    }

    /// `w(S) = 2a·sqrt(Σ_{i∈S} m_i²)`.
    pub fn game_value(&self, s: Coalition) -> Interval {
        let root = self.squared_sum(s).sqrt().expect("nonnegative frequencies");
        root.scale(2.0 * self.ordering_cost).expect("a > 0")
    }

    /// `w(N)`, the joint cost to be shared.
    pub fn total_cost(&self) -> Interval {
        self.game_value(self.agents.grand())
    }

    /// Condition under which the interval SOC-rule's interval division is
    /// defined: `max_i m̲_i²/m̅_i² <= m̲_N/m̅_N`.
    pub fn validate_soc_condition(&self) -> Result<SocConditionReport> {
        if self.frequencies.iter().all(Interval::is_zero) {
            return Err(Error::AllZeroFrequencies);
        }
        let agent_ratios: Vec<f64> = self
            .frequencies
            .iter()
            .map(|m| {
                if m.hi() == 0.0 {
                    0.0
                } else {
                    (m.lo() * m.lo()) / (m.hi() * m.hi())
                }
            })
            .collect();
        let m_n = self.aggregate_frequency();
        let aggregate_ratio = m_n.lo() / m_n.hi();
        let worst = agent_ratios
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &r)| if r > best.1 { (i, r) } else { best });
        Ok(SocConditionReport {
            holds: worst.1 <= aggregate_ratio + GUARD_SLACK,
            agent_ratios,
            aggregate_ratio,
            worst_agent: worst.0,
        })
    }

    /// First `(S, i)` with `|w|(S∪i) < |w|(S)`, scanning coalitions in
    /// ascending order.
    pub fn size_monotonic_violation(&self) -> Result<Option<(Coalition, usize)>> {
        let n = self.n();
        if n > MAX_EXHAUSTIVE_AGENTS {
            return Err(Error::too_many(n, MAX_EXHAUSTIVE_AGENTS));
        }
        let lengths: Vec<(f64, f64)> = Coalition::all(n)
            .map(|s| {
                let w = self.game_value(s);
                (w.length(), w.hi())
            })
            .collect();
        for s in Coalition::all(n) {
            let (len_s, _) = lengths[s.index()];
            for i in (0..n).filter(|&i| !s.contains(i)) {
                let (len_t, scale) = lengths[s.with(i).index()];
                if len_t < len_s - tolerance::for_magnitude(scale) {
                    return Ok(Some((s, i)));
                }
            }
        }
        Ok(None)
    }

    pub fn validate_size_monotonic(&self) -> Result<bool> {
        Ok(self.size_monotonic_violation()?.is_none())
    }

    /// Both border games tabulated over all coalitions.
    pub fn materialize_game(&self) -> IntervalGame {
        let n = self.n();
        let two_a = 2.0 * self.ordering_cost;
        let mut lower = vec![0.0; 1 << n];
        let mut upper = vec![0.0; 1 << n];
        // squared sums built incrementally from the lowest member
        let mut sq_lo = vec![0.0; 1 << n];
        let mut sq_hi = vec![0.0; 1 << n];
        for s in 1usize..(1 << n) {
            let i = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            let m = self.frequencies[i];
            sq_lo[s] = sq_lo[rest] + m.lo() * m.lo();
            sq_hi[s] = sq_hi[rest] + m.hi() * m.hi();
            lower[s] = two_a * sq_lo[s].sqrt();
            upper[s] = two_a * sq_hi[s].sqrt();
        }
        IntervalGame {
            lower: CostGame::new(self.agents.clone(), lower).expect("table shape"),
            upper: CostGame::new(self.agents.clone(), upper).expect("table shape"),
        }
    }

    /// The same situation without agent `j`; `a` and the other frequencies
    /// are unchanged.
    pub fn without_agent(&self, j: usize) -> Result<Self> {
        let mut m = self.frequencies.clone();
        m.remove(j);
        Self::new(self.agents.without(j)?, self.ordering_cost, m)
    }

    /// Same agents and `a`, new frequencies.
    pub fn with_frequencies(&self, frequencies: Vec<Interval>) -> Result<Self> {
        Self::new(self.agents.clone(), self.ordering_cost, frequencies)
    }
}

/// Per-agent ratios for the SOC-rule's definedness condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocConditionReport {
    pub holds: bool,
    /// `m̲_i²/m̅_i²`, or 0 for an inactive agent.
    pub agent_ratios: Vec<f64>,
    /// `m̲_N/m̅_N`.
    pub aggregate_ratio: f64,
    pub worst_agent: usize,
}

impl SocConditionReport {
    pub fn max_agent_ratio(&self) -> f64 {
        self.agent_ratios[self.worst_agent]
    }

    pub fn margin(&self) -> f64 {
        self.aggregate_ratio - self.max_agent_ratio()
    }
}

/// An interval game stored as its two border games.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalGame {
    pub lower: CostGame,
    pub upper: CostGame,
}

impl IntervalGame {
    pub fn new(lower: CostGame, upper: CostGame) -> Result<Self> {
        if lower.agents() != upper.agents() {
            return Err(Error::IncompatibleSituations(
                "border games have different agents".into(),
            ));
        }
        for (lo, hi) in lower.values().iter().zip(upper.values()) {
            if lo > hi {
                return Err(Error::InvalidBounds { lo: *lo, hi: *hi });
            }
        }
        Ok(IntervalGame { lower, upper })
    }

    pub fn n(&self) -> usize {
        self.lower.n()
    }

    pub fn agents(&self) -> &AgentSet {
        self.lower.agents()
    }

    pub fn value(&self, s: Coalition) -> Interval {
        Interval::new(self.lower.value(s), self.upper.value(s)).expect("border order")
    }

    /// `|w|(S) = w̅(S) - w̲(S)`.
    pub fn length(&self, s: Coalition) -> f64 {
        self.upper.value(s) - self.lower.value(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn situation(a: f64, m: &[(f64, f64)]) -> IntervalInventorySituation {
        IntervalInventorySituation::numbered(a, m.iter().map(|&(l, h)| iv(l, h)).collect()).unwrap()
    }

    #[test]
    fn eoq_order_size_examples() {
        let a = DeterministicAgent::new(175_000.0, 10.0).unwrap();
        assert!((a.eoq_order_size(200.0) - 7_000_000f64.sqrt()).abs() < 1e-9);
        assert!((a.eoq_order_size(200.0) - 2645.75).abs() < 0.005);
        assert_eq!(DeterministicAgent::new(0.0, 3.0).unwrap().eoq_order_size(5.0), 0.0);
        let h = 4.0;
        assert!((DeterministicAgent::new(h / 2.0, h).unwrap().eoq_order_size(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eoq_frequency_examples() {
        let lo = DeterministicAgent::new(175_000.0, 10.0).unwrap();
        let hi = DeterministicAgent::new(325_000.0, 10.0).unwrap();
        assert!((lo.eoq_frequency(200.0) - 66.14).abs() < 0.005);
        // printed value is truncated: 90.1388 -> 90.13
        assert!((hi.eoq_frequency(200.0) - 90.13).abs() < 0.01);
        assert_eq!(DeterministicAgent::new(0.0, 1.0).unwrap().eoq_frequency(1.0), 0.0);
        // m = d/Q*
        assert!((lo.eoq_frequency(200.0) - 175_000.0 / lo.eoq_order_size(200.0)).abs() < 1e-9);
    }

    #[test]
    fn eoq_optimal_cost_examples() {
        let a = DeterministicAgent::new(175_000.0, 10.0).unwrap();
        assert!((a.eoq_optimal_cost(200.0) - 26457.51).abs() < 0.005);
        assert!(tolerance::approx_eq(
            a.eoq_optimal_cost(200.0),
            (2.0 * 200.0 * 175_000.0 * 10.0f64).sqrt()
        ));
        assert_eq!(DeterministicAgent::new(0.0, 1.0).unwrap().eoq_optimal_cost(3.0), 0.0);
        assert!((DeterministicAgent::new(1.0, 1.0).unwrap().eoq_optimal_cost(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn agent_validation() {
        assert!(DeterministicAgent::new(1.0, 0.0).is_err());
        assert!(DeterministicAgent::new(-1.0, 1.0).is_err());
        assert!(IntervalAgent::new(iv(-1.0, 1.0), 1.0).is_err());
        assert!(IntervalInventorySituation::numbered(0.0, vec![iv(1.0, 2.0)]).is_err());
        assert!(IntervalInventorySituation::numbered(1.0, vec![iv(-1.0, 2.0)]).is_err());
    }

    #[test]
    fn single_zero_agent_is_valid_for_both_rules() {
        let agents = AgentSet::numbered(1).unwrap();
        let s = IntervalInventorySituation::from_demand(
            agents,
            3.0,
            &[IntervalAgent::new(Interval::ZERO, 2.0).unwrap()],
        )
        .unwrap();
        assert_eq!(s.frequency(0), Interval::ZERO);
        assert!(s.soc_valid() && s.shapley_valid());
        assert_eq!(s.validate_soc_condition(), Err(Error::AllZeroFrequencies));
    }

    #[test]
    fn identical_agents_satisfy_soc_condition() {
        let a = IntervalAgent::new(iv(70.0, 130.0), 3.0).unwrap();
        let s = IntervalInventorySituation::from_demand(AgentSet::numbered(4).unwrap(), 5.0, &[a; 4])
            .unwrap();
        assert!(s.soc_valid());
        let r = s.validate_soc_condition().unwrap();
        // d.lo/d.hi <= sqrt(d.lo/d.hi)
        assert!((r.max_agent_ratio() - 70.0 / 130.0).abs() < 1e-12);
        assert!((r.aggregate_ratio - (70.0f64 / 130.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn soc_condition_examples() {
        let ex1 = situation(1.0, &[(1.0, 2.0), (2.0, 3.0), (3.0, 4.0)]);
        let r = ex1.validate_soc_condition().unwrap();
        assert!(r.holds && ex1.soc_valid());
        assert_eq!(r.worst_agent, 2);
        assert!((r.max_agent_ratio() - 9.0 / 16.0).abs() < 1e-15);
        assert!((r.aggregate_ratio - (14.0f64 / 29.0).sqrt()).abs() < 1e-15);

        let bad = situation(1.0, &[(1.0, 10.0), (5.0, 5.0)]);
        let r = bad.validate_soc_condition().unwrap();
        assert!(!r.holds && !bad.soc_valid());
        assert_eq!(r.worst_agent, 1);
        assert_eq!(r.max_agent_ratio(), 1.0);
    }

    #[test]
    fn size_monotonic_examples() {
        let ex2 = situation(1.0, &[(1.0, 3.0), (2.0, 4.0), (3.0, 5.0)]);
        assert!(ex2.validate_size_monotonic().unwrap());
        let flat = situation(2.0, &[(1.0, 1.0), (2.0, 2.0), (0.5, 0.5)]);
        assert!(flat.validate_size_monotonic().unwrap());
        // a wide agent followed by a narrow heavy one shrinks the width
        let shrink = situation(1.0, &[(0.0, 1.0), (10.0, 10.0)]);
        assert_eq!(
            shrink.size_monotonic_violation().unwrap(),
            Some((Coalition::singleton(0), 1))
        );
        assert!(!shrink.shapley_valid());
    }

    #[test]
    fn game_value_examples() {
        let ex1 = situation(1.0, &[(1.0, 2.0), (2.0, 3.0), (3.0, 4.0)]);
        let w = ex1.total_cost();
        assert!((w.lo() - 2.0 * 14f64.sqrt()).abs() < 1e-12);
        assert!((w.hi() - 2.0 * 29f64.sqrt()).abs() < 1e-12);
        assert!((w.lo() - 7.4833).abs() < 5e-5 && (w.hi() - 10.7703).abs() < 5e-5);
        assert_eq!(ex1.game_value(Coalition::EMPTY), Interval::ZERO);
    }

    #[test]
    fn materialize_examples() {
        let ex2 = situation(1.0, &[(1.0, 3.0), (2.0, 4.0), (3.0, 5.0)]);
        let g = ex2.materialize_game();
        assert!((g.lower.grand_value() - 2.0 * 14f64.sqrt()).abs() < 1e-12);
        assert!((g.upper.grand_value() - 2.0 * 50f64.sqrt()).abs() < 1e-12);
        assert!((g.lower.grand_value() - 7.48).abs() < 0.005);
        assert!((g.upper.grand_value() - 14.14).abs() < 0.005);
        for s in Coalition::all(3) {
            let v = ex2.game_value(s);
            assert!((g.lower.value(s) - v.lo()).abs() < 1e-12);
            assert!((g.upper.value(s) - v.hi()).abs() < 1e-12);
        }

        let zero = situation(1.0, &[(0.0, 0.0)]);
        let g = zero.materialize_game();
        assert!(g.lower.values().iter().chain(g.upper.values()).all(|&v| v == 0.0));
    }

    #[test]
    fn restriction_drops_one_agent() {
        let ex2 = situation(1.0, &[(1.0, 3.0), (2.0, 4.0), (3.0, 5.0)]);
        let sub = ex2.without_agent(1).unwrap();
        assert_eq!(sub.frequencies(), &[iv(1.0, 3.0), iv(3.0, 5.0)]);
        assert_eq!(sub.agents().labels(), ["1", "3"]);
        // w^{-j}(S) = w(S) for S not containing j
        assert_eq!(sub.game_value(Coalition(0b11)), ex2.game_value(Coalition(0b101)));
    }

    fn random_situation(rng: &mut ChaCha8Rng, n: usize) -> IntervalInventorySituation {
        let a = rng.gen_range(0.5..300.0);
        let m = (0..n)
            .map(|_| {
                let lo = rng.gen_range(0.0..100.0);
                let hi = rng.gen_range(0.0..100.0);
                iv(f64::min(lo, hi), f64::max(lo, hi))
            })
            .collect();
        IntervalInventorySituation::numbered(a, m).unwrap()
    }

    #[test]
    fn coalition_growth_and_subadditivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let s = random_situation(&mut rng, n);
            for a in Coalition::all(n) {
                for b in Coalition::all(n) {
                    if a.is_subset_of(b) {
                        assert!(s.game_value(b).weakly_geq(&s.game_value(a)));
                    }
                    if a.0 & b.0 == 0 {
                        let (u, wa, wb) = (s.game_value(Coalition(a.0 | b.0)), s.game_value(a), s.game_value(b));
                        assert!(u.lo() <= wa.lo() + wb.lo() + 1e-9 * u.lo().max(1.0));
                        assert!(u.hi() <= wa.hi() + wb.hi() + 1e-9 * u.hi().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn demand_and_cost_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = rng.gen_range(1.0..500.0);
            let data: Vec<IntervalAgent> = (0..4)
                .map(|_| {
                    let lo = rng.gen_range(0.0..1e5);
                    IntervalAgent::new(iv(lo, lo * rng.gen_range(1.0..3.0)), rng.gen_range(0.5..20.0)).unwrap()
                })
                .collect();
            let s = IntervalInventorySituation::from_demand(AgentSet::numbered(4).unwrap(), a, &data).unwrap();
            for (i, d) in data.iter().enumerate() {
                let lo = DeterministicAgent::new(d.demand.lo(), d.holding_cost).unwrap();
                let hi = DeterministicAgent::new(d.demand.hi(), d.holding_cost).unwrap();
                assert!(tolerance::approx_eq(lo.eoq_optimal_cost(a), 2.0 * a * s.frequency(i).lo()));
                assert!(tolerance::approx_eq(hi.eoq_optimal_cost(a), 2.0 * a * s.frequency(i).hi()));
            }
        }
    }

    #[test]
    fn degenerate_situations_have_coinciding_borders() {
        let s = situation(3.0, &[(1.0, 1.0), (4.0, 4.0), (2.5, 2.5)]);
        let g = s.materialize_game();
        assert_eq!(g.lower, g.upper);
        let det = CostGame::from_fn(s.agents().clone(), |c| {
            let m = [1.0f64, 4.0, 2.5];
            6.0 * c.members().map(|i| m[i] * m[i]).sum::<f64>().sqrt()
        })
        .unwrap();
        for c in Coalition::all(3) {
            assert!((g.lower.value(c) - det.value(c)).abs() < 1e-12);
        }
    }
}
