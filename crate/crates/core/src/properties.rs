//! Axiom checks for interval allocation rules.
//!
//! Each check returns a [`PropertyReport`] listing every violation it found,
//! in ascending coalition (or agent, or pair) order.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::Coalition;
use crate::interval::Interval;
use crate::inventory::{IntervalGame, IntervalInventorySituation};
use crate::rules::{IntervalAllocation, Rule};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Property {
    /// Cross-coalition acceptability.
    Cca,
    /// Inactive-agent exemption.
    Iae,
    /// Transfer-based additivity.
    Tba,
    /// Balanced contributions.
    Bc,
    Efficiency,
    Core,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Cca => "CCA",
            Property::Iae => "IAE",
            Property::Tba => "TBA",
            Property::Bc => "BC",
            Property::Efficiency => "EFFICIENCY",
            Property::Core => "CORE",
        })
    }
}

/// What a witness refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Subject {
    Coalition { members: Coalition },
    Agent { agent: usize },
    Pair { i: usize, j: usize },
    GrandCoalition,
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Coalition { members } => write!(f, "coalition {members}"),
            Subject::Agent { agent } => write!(f, "agent {}", agent + 1),
            Subject::Pair { i, j } => write!(f, "pair ({}, {})", i + 1, j + 1),
            Subject::GrandCoalition => write!(f, "grand coalition"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub subject: Subject,
    pub lhs: Interval,
    pub rhs: Interval,
}

/// Outcome of one property check. `holds` is true exactly when `witnesses`
/// is empty; `skipped` lists subjects the rule could not be evaluated on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub skipped: Vec<(Subject, String)>,
    pub tolerance: f64,
}

impl PropertyReport {
    fn new(property: Property, witnesses: Vec<Witness>, skipped: Vec<(Subject, String)>) -> Self {
        PropertyReport {
            property,
            holds: witnesses.is_empty(),
            witnesses,
            skipped,
            tolerance: tolerance::REL,
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} {}",
            self.property.to_string(),
            if self.holds { "holds" } else { "FAILS" }
        )?;
        if !self.skipped.is_empty() {
            write!(f, " ({} skipped)", self.skipped.len())?;
        }
        for w in &self.witnesses {
            write!(f, "\n  {}: lhs {:.6} vs rhs {:.6}", w.subject, w.lhs, w.rhs)?;
        }
        for (s, why) in &self.skipped {
            write!(f, "\n  skipped {s}: {why}")?;
        }
        Ok(())
    }
}

/// `Σ_{j∈S} x_j ⪯ w(S)` within tolerance, for every nonempty `S`.
fn acceptable_violations<F>(n: usize, alloc: &IntervalAllocation, value: F) -> Vec<Witness>
where
    F: Fn(Coalition) -> Interval,
{
    Coalition::nonempty(n)
        .filter_map(|s| {
            let paid = alloc.coalition_sum(s);
            let cost = value(s);
            let ok = tolerance::approx_le(paid.lo(), cost.lo()) && tolerance::approx_le(paid.hi(), cost.hi());
            (!ok).then_some(Witness {
                subject: Subject::Coalition { members: s },
                lhs: paid,
                rhs: cost,
            })
        })
        .collect()
}

fn efficiency_violation(alloc: &IntervalAllocation, total: Interval) -> Option<Witness> {
    let paid = alloc.total();
    let ok = tolerance::approx_eq(paid.lo(), total.lo()) && tolerance::approx_eq(paid.hi(), total.hi());
    (!ok).then_some(Witness {
        subject: Subject::GrandCoalition,
        lhs: paid,
        rhs: total,
    })
}

fn check_len(s_n: usize, alloc: &IntervalAllocation) -> Result<()> {
    if alloc.len() != s_n {
        return Err(Error::AllocationSize {
            got: alloc.len(),
            expected: s_n,
        });
    }
    Ok(())
}

/// Boundwise efficiency against `w(N)`.
pub fn check_efficiency(s: &IntervalInventorySituation, alloc: &IntervalAllocation) -> Result<PropertyReport> {
    check_len(s.n(), alloc)?;
    let w = efficiency_violation(alloc, s.total_cost()).into_iter().collect();
    Ok(PropertyReport::new(Property::Efficiency, w, vec![]))
}

/// Cross-coalition acceptability: no coalition pays more than it would alone.
pub fn check_cca(s: &IntervalInventorySituation, alloc: &IntervalAllocation) -> Result<PropertyReport> {
    check_len(s.n(), alloc)?;
    let w = acceptable_violations(s.n(), alloc, |c| s.game_value(c));
    Ok(PropertyReport::new(Property::Cca, w, vec![]))
}

/// Inactive-agent exemption: agents with `m = [0,0]` pay `[0,0]`.
pub fn check_iae(rule: Rule, s: &IntervalInventorySituation) -> Result<PropertyReport> {
    let alloc = rule.allocate(s)?;
    let witnesses = (0..s.n())
        .filter(|&j| s.is_inactive(j))
        .filter(|&j| alloc[j].lo().abs() > tolerance::ABS || alloc[j].hi().abs() > tolerance::ABS)
        .map(|j| Witness {
            subject: Subject::Agent { agent: j },
            lhs: alloc[j],
            rhs: Interval::ZERO,
        })
        .collect();
    Ok(PropertyReport::new(Property::Iae, witnesses, vec![]))
}

/// The situation with frequencies `sqrt(m_i² + m̂_i²)`.
pub fn combine_situations(
    s1: &IntervalInventorySituation,
    s2: &IntervalInventorySituation,
) -> Result<IntervalInventorySituation> {
    if s1.agents() != s2.agents() {
        return Err(Error::IncompatibleSituations("agent sets differ".into()));
    }
    if s1.ordering_cost() != s2.ordering_cost() {
        return Err(Error::IncompatibleSituations("ordering costs differ".into()));
    }
    let m = s1
        .frequencies()
        .iter()
        .zip(s2.frequencies())
        .map(|(a, b)| (a.square()? + b.square()?).sqrt())
        .collect::<Result<Vec<_>>>()?;
    s1.with_frequencies(m)
}

/// Splits each `m_i²` into two equal halves, returning a pair whose
/// combination is `s` itself.
pub fn self_split(s: &IntervalInventorySituation) -> Result<(IntervalInventorySituation, IntervalInventorySituation)> {
    let half = s
        .frequencies()
        .iter()
        .map(|m| m.scale(std::f64::consts::FRAC_1_SQRT_2))
        .collect::<Result<Vec<_>>>()?;
    let a = s.with_frequencies(half)?;
    Ok((a.clone(), a))
}

/// Transfer-based additivity:
/// `m̂_N·Ψ_j(ŝ) = m_N(s1)·Ψ_j(s1) + m_N(s2)·Ψ_j(s2)` boundwise, where
/// `m_N = sqrt(Σ m_i²)` and `ŝ` combines the two situations.
pub fn check_tba(
    rule: Rule,
    s1: &IntervalInventorySituation,
    s2: &IntervalInventorySituation,
) -> Result<PropertyReport> {
    let combined = combine_situations(s1, s2)?;
    let psi_c = rule
        .allocate(&combined)
        .map_err(|e| Error::CombinedSituationInvalid(e.to_string()))?;
    let psi_1 = rule.allocate(s1)?;
    let psi_2 = rule.allocate(s2)?;
    let (w_c, w_1, w_2) = (
        combined.aggregate_frequency(),
        s1.aggregate_frequency(),
        s2.aggregate_frequency(),
    );
    let mut witnesses = Vec::new();
    for j in 0..s1.n() {
        let lhs = w_c.mul_nonneg(&psi_c[j])?;
        let rhs = w_1.mul_nonneg(&psi_1[j])? + w_2.mul_nonneg(&psi_2[j])?;
        if !(tolerance::approx_eq(lhs.lo(), rhs.lo()) && tolerance::approx_eq(lhs.hi(), rhs.hi())) {
            witnesses.push(Witness {
                subject: Subject::Agent { agent: j },
                lhs,
                rhs,
            });
        }
    }
    Ok(PropertyReport::new(Property::Tba, witnesses, vec![]))
}

/// Balanced contributions: for every pair `{i, j}`,
/// `Ψ_i(N) - Ψ_i(N∖j) = Ψ_j(N) - Ψ_j(N∖i)` on each bound separately.
///
/// Pairs whose restricted situations the rule cannot evaluate are recorded as
/// skipped instead of failing the whole check.
pub fn check_bc(rule: Rule, s: &IntervalInventorySituation) -> Result<PropertyReport> {
    let n = s.n();
    if n < 2 {
        return Err(Error::NotEnoughAgents);
    }
    let full = rule.allocate(s)?;
    let restricted: Vec<Result<IntervalAllocation>> = (0..n)
        .map(|j| s.without_agent(j).and_then(|sub| rule.allocate(&sub)))
        .collect();
    // index of agent i in the situation without j
    let pos = |i: usize, j: usize| if i < j { i } else { i - 1 };
    let mut witnesses = Vec::new();
    let mut skipped = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let subject = Subject::Pair { i, j };
            let (without_j, without_i) = match (&restricted[j], &restricted[i]) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    skipped.push((subject, format!("sub-situation invalid: {e}")));
                    continue;
                }
            };
            let xi = without_j[pos(i, j)];
            let xj = without_i[pos(j, i)];
            let d_i = (full[i].lo() - xi.lo(), full[i].hi() - xi.hi());
            let d_j = (full[j].lo() - xj.lo(), full[j].hi() - xj.hi());
            let scale_lo = full[i].lo().abs().max(full[j].lo().abs());
            let scale_hi = full[i].hi().abs().max(full[j].hi().abs());
            let ok = (d_i.0 - d_j.0).abs() <= tolerance::for_magnitude(scale_lo)
                && (d_i.1 - d_j.1).abs() <= tolerance::for_magnitude(scale_hi);
            if !ok {
                // differences need not be ordered intervals, so store them as
                // degenerate pairs (lo-bound difference, hi-bound difference)
                witnesses.push(Witness {
                    subject,
                    lhs: ordered(d_i.0, d_i.1),
                    rhs: ordered(d_j.0, d_j.1),
                });
            }
        }
    }
    Ok(PropertyReport::new(Property::Bc, witnesses, skipped))
}

fn ordered(a: f64, b: f64) -> Interval {
    Interval::new(a.min(b), a.max(b)).expect("finite")
}

/// Interval core membership: boundwise efficiency plus `w(S) ⪰ Σ_{i∈S} I_i`.
pub fn interval_core_contains(g: &IntervalGame, alloc: &IntervalAllocation) -> Result<PropertyReport> {
    check_len(g.n(), alloc)?;
    let mut witnesses: Vec<Witness> = efficiency_violation(alloc, g.value(g.agents().grand()))
        .into_iter()
        .collect();
    witnesses.extend(acceptable_violations(g.n(), alloc, |c| g.value(c)));
    Ok(PropertyReport::new(Property::Core, witnesses, vec![]))
}
