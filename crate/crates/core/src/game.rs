//! Real-valued TU cost games over at most [`MAX_AGENTS`] agents, tabulated
//! over all `2^n` coalitions.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

/// Upper bound on `n` for anything that tabulates `2^n` values.
pub const MAX_AGENTS: usize = 24;
/// Upper bound on `n` for concavity and size-monotonicity sweeps.
pub const MAX_EXHAUSTIVE_AGENTS: usize = 20;

/// Number of permutations drawn per independently seeded block by the sampler.
const SAMPLER_BLOCK: usize = 1024;

/// Agents `0..n` with unique display labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSet {
    labels: Vec<String>,
}

impl AgentSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyAgentSet);
        }
        if labels.len() > MAX_AGENTS {
            return Err(Error::too_many(labels.len(), MAX_AGENTS));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateId(l.clone()));
            }
        }
        Ok(AgentSet { labels })
    }

    /// Agents labelled `1..=n`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.len())
    }

    /// Number of coalitions, `2^n`.
    pub fn coalition_count(&self) -> usize {
        1usize << self.len()
    }

    /// The same agents without agent `i`.
    pub fn without(&self, i: usize) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.remove(i);
        AgentSet::new(labels)
    }
}

/// A subset of `{0, .., n-1}` stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Coalition(pub u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn grand(n: usize) -> Self {
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        Coalition(1 << i)
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        Coalition(members.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    #[inline]
    pub fn with(self, i: usize) -> Self {
        Coalition(self.0 | (1 << i))
    }

    #[inline]
    pub fn without(self, i: usize) -> Self {
        Coalition(self.0 & !(1 << i))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// All coalitions of an `n`-agent set in ascending index order.
    pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
        (0..(1u32 << n)).map(Coalition)
    }

    /// Nonempty coalitions in ascending index order.
    pub fn nonempty(n: usize) -> impl Iterator<Item = Coalition> {
        (1..(1u32 << n)).map(Coalition)
    }

    /// Subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Coalition> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some(((cur | !full).wrapping_add(1)) & full)
            };
            Some(Coalition(cur))
        })
    }

    /// Remaps a coalition of the full set to the set with agent `gone` removed.
    pub fn drop_agent(self, gone: usize) -> Coalition {
        let low = self.0 & ((1 << gone) - 1);
        let high = (self.0 >> (gone + 1)) << gone;
        Coalition(low | high)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// A cost game `c: 2^N -> R` with `c(∅) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostGame {
    agents: AgentSet,
    values: Vec<f64>,
}

impl CostGame {
    pub fn new(agents: AgentSet, values: Vec<f64>) -> Result<Self> {
        let expected = agents.coalition_count();
        if values.len() != expected {
            return Err(Error::TableSize {
                n: agents.len(),
                got: values.len(),
                expected,
            });
        }
        if values[0] != 0.0 {
            return Err(Error::NonzeroEmptyCoalition(values[0]));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CostGame { agents, values })
    }

    /// Tabulates `f` over every coalition; `f(∅)` is forced to zero.
    pub fn from_fn(agents: AgentSet, f: impl Fn(Coalition) -> f64) -> Result<Self> {
        let values = Coalition::all(agents.len())
            .map(|s| if s.is_empty() { 0.0 } else { f(s) })
            .collect();
        Self::new(agents, values)
    }

    /// `κ·u_T`: `κ` on every coalition containing `T`, zero elsewhere.
    pub fn unanimity(agents: AgentSet, carrier: Coalition, kappa: f64) -> Result<Self> {
        Self::from_fn(agents, |s| if carrier.is_subset_of(s) { kappa } else { 0.0 })
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    #[inline]
    pub fn value(&self, s: Coalition) -> f64 {
        self.values[s.index()]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grand_value(&self) -> f64 {
        self.value(self.agents.grand())
    }

    /// Möbius inversion: `c_T = Σ_{S⊆T} (-1)^{|T|-|S|} c(S)` for every `T`,
    /// indexed by coalition (entry 0 is always zero).
    pub fn unanimity_coefficients(&self) -> Vec<f64> {
        let n = self.n();
        let mut a = self.values.clone();
        for i in 0..n {
            let bit = 1 << i;
            for t in 0..a.len() {
                if t & bit != 0 {
                    a[t] -= a[t ^ bit];
                }
            }
        }
        a
    }

    /// Rebuilds `c(S) = Σ_{T⊆S} c_T` from unanimity coefficients.
    pub fn from_unanimity_coefficients(agents: AgentSet, coefficients: &[f64]) -> Result<Self> {
        let mut v = coefficients.to_vec();
        for i in 0..agents.len() {
            let bit = 1 << i;
            for s in 0..v.len() {
                if s & bit != 0 {
                    v[s] += v[s ^ bit];
                }
            }
        }
        Self::new(agents, v)
    }

    /// Exact Shapley value via the subset-weight formula.
    pub fn shapley_exact(&self) -> Result<RealAllocation> {
        let n = self.n();
        if n > MAX_AGENTS {
            return Err(Error::too_many(n, MAX_AGENTS));
        }
        // weight[k] = k!(n-k-1)!/n!
        let mut weight = vec![0.0; n];
        weight[0] = 1.0 / n as f64;
        for k in 1..n {
            weight[k] = weight[k - 1] * k as f64 / (n - k) as f64;
        }
        let shares = (0..n)
            .map(|i| {
                let bit = 1usize << i;
                let mut acc = 0.0;
                for s in 0..self.values.len() {
                    if s & bit == 0 {
                        let k = (s as u32).count_ones() as usize;
                        acc += weight[k] * (self.values[s | bit] - self.values[s]);
                    }
                }
                acc
            })
            .collect();
        Ok(RealAllocation(shares))
    }

    /// Permutation-sampling estimate of the Shapley value.
    ///
    /// Falls back to enumerating all `n!` orders when `samples >= n!`.
    /// The estimate is rescaled so that the shares sum to `c(N)`.
    pub fn shapley_sampled(&self, samples: usize, seed: u64) -> RealAllocation {
        let n = self.n();
        if covers_all_permutations(n, samples) {
            let sums = self.exhaustive_marginal_sums();
            let count = factorial(n) as f64;
            let raw: Vec<f64> = sums.into_iter().map(|s| s / count).collect();
            return RealAllocation(rescale_to_efficiency(raw, self.grand_value()));
        }
        RealAllocation(rescale_to_efficiency(
            self.monte_carlo_shapley(samples, seed),
            self.grand_value(),
        ))
    }

    /// Plain Monte Carlo estimate over `samples` seeded random orders, without
    /// the exhaustive fallback or efficiency rescaling.
    pub fn monte_carlo_shapley(&self, samples: usize, seed: u64) -> Vec<f64> {
        let samples = samples.max(1);
        let sums = sample_marginal_sums(self.n(), samples, seed, &[self]);
        sums.into_iter()
            .next()
            .unwrap()
            .into_iter()
            .map(|s| s / samples as f64)
            .collect()
    }

    fn exhaustive_marginal_sums(&self) -> Vec<f64> {
        exhaustive_marginal_sums(self.n(), &[self]).pop().unwrap()
    }

    /// Checks `c(S∪i) - c(S) >= c(S∪{i,j}) - c(S∪j)` for all `S` and distinct
    /// `i, j ∉ S`. Returns the first violation in ascending `(S, i, j)` order.
    pub fn concavity_violation(&self) -> Result<Option<ConcavityWitness>> {
        let n = self.n();
        if n > MAX_EXHAUSTIVE_AGENTS {
            return Err(Error::too_many(n, MAX_EXHAUSTIVE_AGENTS));
        }
        for s in Coalition::all(n) {
            for i in (0..n).filter(|&i| !s.contains(i)) {
                let small = self.value(s.with(i)) - self.value(s);
                for j in (0..n).filter(|&j| j != i && !s.contains(j)) {
                    let t = s.with(j);
                    let large = self.value(t.with(i)) - self.value(t);
                    let scale = self.value(t.with(i)).abs().max(self.value(s).abs());
                    if large > small + tolerance::for_magnitude(scale) {
                        return Ok(Some(ConcavityWitness {
                            smaller: s,
                            larger: t,
                            agent: i,
                            smaller_marginal: small,
                            larger_marginal: large,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_concave(&self) -> Result<bool> {
        Ok(self.concavity_violation()?.is_none())
    }

    /// Core membership: efficiency and `Σ_{i∈S} x_i <= c(S)` for every `S`.
    pub fn core_contains(&self, x: &RealAllocation) -> bool {
        if x.len() != self.n() {
            return false;
        }
        let total = x.total();
        if !tolerance::approx_eq(total, self.grand_value()) {
            return false;
        }
        Coalition::nonempty(self.n()).all(|s| {
            let paid = x.coalition_sum(s);
            paid <= self.value(s) + tolerance::for_magnitude(self.value(s))
        })
    }

    /// Increase of `c` when `i` joins `s`.
    #[inline]
    pub fn marginal(&self, s: Coalition, i: usize) -> f64 {
        self.value(s.with(i)) - self.value(s)
    }
}

/// A pair `S ⊂ T ⊆ N∖{i}` where agent `i`'s marginal cost grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcavityWitness {
    pub smaller: Coalition,
    pub larger: Coalition,
    pub agent: usize,
    pub smaller_marginal: f64,
    pub larger_marginal: f64,
}

/// One real share per agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealAllocation(pub Vec<f64>);

impl RealAllocation {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shares(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn coalition_sum(&self, s: Coalition) -> f64 {
        s.members().map(|i| self.0[i]).sum()
    }
}

impl std::ops::Index<usize> for RealAllocation {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// True when `samples` is at least `n!`.
pub fn covers_all_permutations(n: usize, samples: usize) -> bool {
    n <= 20 && factorial(n) <= samples as u128
}

/// Multiplicative rescaling to sum `target`, additive when the raw sum is zero.
pub(crate) fn rescale_to_efficiency(mut raw: Vec<f64>, target: f64) -> Vec<f64> {
    let n = raw.len();
    if n == 0 {
        return raw;
    }
    let sum: f64 = raw.iter().sum();
    if sum != 0.0 && target != 0.0 {
        let k = target / sum;
        raw.iter_mut().for_each(|x| *x *= k);
    } else {
        let shift = (target - sum) / n as f64;
        raw.iter_mut().for_each(|x| *x += shift);
    }
    raw
}

/// Marginal-contribution sums over all `n!` orders for each game, in
/// lexicographic permutation order.
pub(crate) fn exhaustive_marginal_sums(n: usize, games: &[&CostGame]) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; n]; games.len()];
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        accumulate_order(&order, games, &mut sums);
        if !next_permutation(&mut order) {
            break;
        }
    }
    sums
}

/// Marginal-contribution sums over `samples` random orders, drawn as
/// antithetic pairs (an order, then its reverse). Every game sees the same
/// orders. Blocks of [`SAMPLER_BLOCK`] orders use their own ChaCha
/// stream and are reduced in block order, so the result does not depend on
/// the thread count.
pub(crate) fn sample_marginal_sums(
    n: usize,
    samples: usize,
    seed: u64,
    games: &[&CostGame],
) -> Vec<Vec<f64>> {
    let blocks = samples.div_ceil(SAMPLER_BLOCK);
    let partials: Vec<Vec<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = SAMPLER_BLOCK.min(samples - b * SAMPLER_BLOCK);
            let mut sums = vec![vec![0.0; n]; games.len()];
            let mut order: Vec<usize> = (0..n).collect();
            // antithetic pairs: each shuffled order is followed by its reverse
            for k in 0..count {
                if k % 2 == 0 {
                    order.shuffle(&mut rng);
                } else {
                    order.reverse();
                }
                accumulate_order(&order, games, &mut sums);
            }
            sums
        })
        .collect();
    let mut total = vec![vec![0.0; n]; games.len()];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            for (a, b) in t.iter_mut().zip(p) {
                *a += b;
            }
        }
    }
    total
}

fn accumulate_order(order: &[usize], games: &[&CostGame], sums: &mut [Vec<f64>]) {
    for (g, acc) in games.iter().zip(sums.iter_mut()) {
        let mut s = Coalition::EMPTY;
        for &i in order {
            acc[i] += g.marginal(s, i);
            s = s.with(i);
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
