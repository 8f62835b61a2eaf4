//! Interval allocation rules for interval inventory situations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    covers_all_permutations, exhaustive_marginal_sums, factorial, rescale_to_efficiency,
    sample_marginal_sums, Coalition,
};
use crate::interval::Interval;
use crate::inventory::IntervalInventorySituation;
use crate::tolerance;

/// One interval share per agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalAllocation(pub Vec<Interval>);

impl IntervalAllocation {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shares(&self) -> &[Interval] {
        &self.0
    }

    pub fn total(&self) -> Interval {
        self.0.iter().sum()
    }

    pub fn coalition_sum(&self, s: Coalition) -> Interval {
        s.members().map(|i| self.0[i]).sum()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.0.iter().map(Interval::length).collect()
    }
}

impl std::ops::Index<usize> for IntervalAllocation {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

/// Stand-alone costs `2a·m_i`. Not efficient; reported as the baseline.
pub fn individual_costs(s: &IntervalInventorySituation) -> IntervalAllocation {
    let two_a = 2.0 * s.ordering_cost();
    IntervalAllocation(
        s.frequencies()
            .iter()
            .map(|m| m.scale(two_a).expect("a > 0"))
            .collect(),
    )
}

/// Interval SOC-rule: `Γ_j = 2a·m_j² / sqrt(Σ m_i²)` with interval division.
pub fn interval_soc(s: &IntervalInventorySituation) -> Result<IntervalAllocation> {
    if s.frequencies().iter().all(Interval::is_zero) {
        return Ok(IntervalAllocation(vec![Interval::ZERO; s.n()]));
    }
    if !s.soc_valid() {
        let r = s.validate_soc_condition()?;
        return Err(Error::SocConditionViolated(format!(
            "agent {} has m_lo^2/m_hi^2 = {:.6} > m_N.lo/m_N.hi = {:.6}",
            s.agents().label(r.worst_agent),
            r.max_agent_ratio(),
            r.aggregate_ratio
        )));
    }
    let two_a = 2.0 * s.ordering_cost();
    let m_n = s.aggregate_frequency();
    let shares = s
        .frequencies()
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let numerator = m.square()?.scale(two_a)?;
            if m_n.lo() > 0.0 {
                numerator.div_checked(&m_n).map_err(|e| match e {
                    Error::OrderViolation { .. } => Error::SocConditionViolated(format!(
                        "interval division undefined for agent {}: {e}",
                        s.agents().label(j)
                    )),
                    other => other,
                })
            } else {
                // every lower bound is zero, so every lower numerator is zero too
                Interval::new(0.0, numerator.hi() / m_n.hi())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalAllocation(shares))
}

fn require_size_monotonic(s: &IntervalInventorySituation) -> Result<()> {
    if s.shapley_valid() {
        return Ok(());
    }
    match s.size_monotonic_violation()? {
        Some((coalition, agent)) => Err(Error::NotSizeMonotonic {
            coalition: coalition.0,
            agent,
        }),
        None => Ok(()),
    }
}

/// Interval Shapley rule: the Shapley values of the lower and upper border
/// games, paired per agent.
pub fn interval_shapley(s: &IntervalInventorySituation) -> Result<IntervalAllocation> {
    require_size_monotonic(s)?;
    let game = s.materialize_game();
    let lower = game.lower.shapley_exact()?;
    let upper = game.upper.shapley_exact()?;
    pair_bounds(lower.shares(), upper.shares())
}

/// Sampled interval Shapley rule. Both border games are evaluated on the same
/// permutations; `samples >= n!` enumerates every order instead.
pub fn interval_shapley_sampled(
    s: &IntervalInventorySituation,
    samples: usize,
    seed: u64,
) -> Result<IntervalAllocation> {
    sampled(s, samples, seed, true)
}

/// As [`interval_shapley_sampled`] but always draws random orders, even when
/// `samples` could enumerate them all.
pub fn interval_shapley_monte_carlo(
    s: &IntervalInventorySituation,
    samples: usize,
    seed: u64,
) -> Result<IntervalAllocation> {
    sampled(s, samples, seed, false)
}

fn sampled(s: &IntervalInventorySituation, samples: usize, seed: u64, exhaustive_ok: bool) -> Result<IntervalAllocation> {
    require_size_monotonic(s)?;
    let n = s.n();
    let game = s.materialize_game();
    let borders = [&game.lower, &game.upper];
    let (sums, count) = if exhaustive_ok && covers_all_permutations(n, samples) {
        (exhaustive_marginal_sums(n, &borders), factorial(n) as f64)
    } else {
        let samples = samples.max(1);
        (sample_marginal_sums(n, samples, seed, &borders), samples as f64)
    };
    let mut sums = sums.into_iter();
    let lower = rescale_to_efficiency(
        sums.next().unwrap().into_iter().map(|x| x / count).collect(),
        game.lower.grand_value(),
    );
    let upper = rescale_to_efficiency(
        sums.next().unwrap().into_iter().map(|x| x / count).collect(),
        game.upper.grand_value(),
    );
    pair_bounds(&lower, &upper)
}

fn pair_bounds(lower: &[f64], upper: &[f64]) -> Result<IntervalAllocation> {
    lower
        .iter()
        .zip(upper)
        .map(|(&lo, &hi)| Interval::from_rounded(lo, hi, tolerance::for_magnitude(hi)))
        .collect::<Result<Vec<_>>>()
        .map(IntervalAllocation)
}

/// Equal split of `w(N)` over active agents; inactive agents pay `[0,0]`.
/// Satisfies inactive-agent exemption but not transfer-based additivity.
pub fn equal_split_active(s: &IntervalInventorySituation) -> Result<IntervalAllocation> {
    let active = (0..s.n()).filter(|&i| !s.is_inactive(i)).count();
    if active == 0 {
        return Err(Error::AllAgentsInactive);
    }
    let each = s.total_cost().scale(1.0 / active as f64)?;
    Ok(IntervalAllocation(
        (0..s.n())
            .map(|i| if s.is_inactive(i) { Interval::ZERO } else { each })
            .collect(),
    ))
}

/// The SOC allocation with the two agents' shares swapped when `|N| = 2`,
/// the SOC allocation otherwise. Satisfies transfer-based additivity but not
/// inactive-agent exemption.
pub fn swapped_soc(s: &IntervalInventorySituation) -> Result<IntervalAllocation> {
    let mut a = interval_soc(s)?;
    if s.n() == 2 {
        a.0.swap(0, 1);
    }
    Ok(a)
}

/// Shares proportional to `m_i` rather than `m_i²`:
/// `[w̲(N)·m̲_i/Σm̲_j, w̅(N)·m̅_i/Σm̅_j]`.
pub fn proportional_to_frequency(s: &IntervalInventorySituation) -> IntervalAllocation {
    let total = s.total_cost();
    let sum_lo: f64 = s.frequencies().iter().map(Interval::lo).sum();
    let sum_hi: f64 = s.frequencies().iter().map(Interval::hi).sum();
    let part = |x: f64, sum: f64, w: f64| if sum > 0.0 { w * x / sum } else { 0.0 };
    IntervalAllocation(
        s.frequencies()
            .iter()
            .map(|m| {
                let lo = part(m.lo(), sum_lo, total.lo());
                let hi = part(m.hi(), sum_hi, total.hi());
                Interval::from_rounded(lo, hi, tolerance::for_magnitude(hi))
                    .unwrap_or(Interval::point(lo))
            })
            .collect(),
    )
}

/// The rules the property harness can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Soc,
    Shapley,
    /// [`equal_split_active`].
    EqualSplit,
    /// [`swapped_soc`].
    SwappedSoc,
}

impl Rule {
    pub fn allocate(self, s: &IntervalInventorySituation) -> Result<IntervalAllocation> {
        match self {
            Rule::Soc => interval_soc(s),
            Rule::Shapley => interval_shapley(s),
            Rule::EqualSplit => equal_split_active(s),
            Rule::SwappedSoc => swapped_soc(s),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Soc => "soc",
            Rule::Shapley => "shapley",
            Rule::EqualSplit => "equal-split",
            Rule::SwappedSoc => "swapped-soc",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "soc" => Ok(Rule::Soc),
            "shapley" => Ok(Rule::Shapley),
            "equal-split" => Ok(Rule::EqualSplit),
            "swapped-soc" => Ok(Rule::SwappedSoc),
            other => Err(format!("unknown rule `{other}`")),
        }
    }
}
