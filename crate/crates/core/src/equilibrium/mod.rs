//! Profits, demand, endowed-equilibrium verification and maximality.

mod allocation;
mod instance;


use serde::Serialize;

pub use allocation::{Allocation, PriceVector};
pub use instance::Instance;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuations::Valuation;

/// `v(T) - p(T)`.
pub fn profit(v: &Valuation, t: Bundle, p: &PriceVector) -> Result<Rational> {
    check_prices(p, v.item_count())?;
    Ok(v.eval(t)? - p.total(t))
}

/// Every profit-maximizing bundle, in ascending bitmask order.
pub fn demand_set(v: &Valuation, p: &PriceVector) -> Result<Vec<Bundle>> {
    check_prices(p, v.item_count())?;
    Ok(demand_from_table(&v.table(), &p.totals_table()))
}

fn demand_from_table(values: &[Rational], costs: &[Rational]) -> Vec<Bundle> {
    let mut best: Option<Rational> = None;
    let mut out = Vec::new();
    for (b, (v, c)) in values.iter().zip(costs).enumerate() {
        let profit = v - c;
        match &best {
            Some(top) if profit < *top => {}
            Some(top) if profit == *top => out.push(Bundle::from_bits(b as u32)),
            _ => {
                best = Some(profit);
                out.clear();
                out.push(Bundle::from_bits(b as u32));
            }
        }
    }
    out
}

fn check_prices(p: &PriceVector, m: usize) -> Result<()> {
    if p.item_count() != m {
        return Err(Error::ItemCountMismatch { expected: m, found: p.item_count() });
    }
    Ok(())
}

fn check_alpha(alpha: &Rational) -> Result<()> {
    if alpha.is_negative() {
        return Err(Error::Domain(format!("endowment intensity must be nonnegative, got {alpha}")));
    }
    Ok(())
}

/// `v^{S,alpha}(T) = v(T) + (alpha - 1) v(S ∩ T)` over a dense table.
pub(crate) fn endowed_table(table: &[Rational], s: Bundle, alpha: &Rational) -> Vec<Rational> {
    let shift = alpha - Rational::one();
    if shift.is_zero() {
        return table.to_vec();
    }
    let s = s.bits() as usize;
    table.iter().enumerate().map(|(t, v)| v + &shift * &table[t & s]).collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Invalid,
}

/// Why a certificate is invalid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `bundle` earns `gain` more endowed profit than the player's own bundle.
    Deviation { player: usize, bundle: Bundle, gain: Rational },
    PricedUnallocatedItem { item: usize, price: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquilibriumCertificate {
    pub allocation: Allocation,
    pub prices: PriceVector,
    pub alpha: Rational,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl EquilibriumCertificate {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

/// Checks both equilibrium conditions with weak inequalities: each player's
/// bundle is in the demand of its endowed valuation, and unallocated items
/// are free.
pub fn verify_endowed_equilibrium(
    inst: &Instance,
    a: &Allocation,
    p: &PriceVector,
    alpha: &Rational,
) -> Result<EquilibriumCertificate> {
    inst.check_allocation(a)?;
    check_prices(p, inst.item_count())?;
    check_alpha(alpha)?;
    let witness = find_witness(&inst.value_tables(), a, p, alpha);
    Ok(certificate(a, p, alpha, witness))
}

fn certificate(a: &Allocation, p: &PriceVector, alpha: &Rational, witness: Option<Witness>) -> EquilibriumCertificate {
    EquilibriumCertificate {
        allocation: a.clone(),
        prices: p.clone(),
        alpha: alpha.clone(),
        verdict: if witness.is_some() { Verdict::Invalid } else { Verdict::Valid },
        witness,
    }
}

/// Table-level verifier; inputs are assumed consistent.
pub(crate) fn find_witness(
    tables: &[Vec<Rational>],
    a: &Allocation,
    p: &PriceVector,
    alpha: &Rational,
) -> Option<Witness> {
    let costs = p.totals_table();
    for (i, s) in a.bundles(tables.len()).into_iter().enumerate() {
        if let Some((bundle, gain)) = best_deviation(&tables[i], &costs, s, alpha) {
            return Some(Witness::Deviation { player: i, bundle, gain });
        }
    }
    a.unallocated()
        .items()
        .find(|&j| !p.get(j).is_zero())
        .map(|item| Witness::PricedUnallocatedItem { item, price: p.get(item).clone() })
}

/// Smallest bundle (by bitmask) attaining the maximum endowed profit, when
/// that maximum strictly beats `s`.
pub(crate) fn best_deviation(table: &[Rational], costs: &[Rational], s: Bundle, alpha: &Rational) -> Option<(Bundle, Rational)> {
    let shift = alpha - Rational::one();
    let sb = s.bits() as usize;
    let endowed = |t: usize| {
        if shift.is_zero() || t & sb == 0 {
            table[t].clone()
        } else {
            &table[t] + &shift * &table[t & sb]
        }
    };
    let own = endowed(sb) - &costs[sb];
    let mut best: Option<(usize, Rational)> = None;
    for t in 0..table.len() {
        let gain = endowed(t) - &costs[t] - &own;
        if gain.is_positive() && best.as_ref().is_none_or(|(_, g)| gain > *g) {
            best = Some((t, gain));
        }
    }
    best.map(|(t, g)| (Bundle::from_bits(t as u32), g))
}

/// Per-item marginal contributions `q_j` and their zero set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarginalProfile {
    pub contributions: Vec<Rational>,
    pub zero_set: Bundle,
}

impl MarginalProfile {
    /// Items with positive contribution.
    pub fn positive_set(&self) -> Bundle {
        self.zero_set.complement(self.contributions.len())
    }
}

pub fn marginal_profile(inst: &Instance, a: &Allocation) -> Result<MarginalProfile> {
    inst.check_allocation(a)?;
    let bundles = a.bundles(inst.player_count());
    let contributions: Vec<Rational> = (0..inst.item_count())
        .map(|j| match a.owner(j) {
            Some(i) => {
                let v = inst.player(i);
                v.value(bundles[i]) - v.value(bundles[i].without(j))
            }
            None => Rational::zero(),
        })
        .collect();
    let zero_set = Bundle::from_items(contributions.iter().enumerate().filter(|(_, q)| q.is_zero()).map(|(j, _)| j));
    Ok(MarginalProfile { contributions, zero_set })
}

/// True iff no player strictly gains by absorbing the zero-contribution items.
pub fn is_maximal(inst: &Instance, a: &Allocation) -> Result<bool> {
    let z = marginal_profile(inst, a)?.zero_set;
    Ok(a.bundles(inst.player_count())
        .into_iter()
        .zip(inst.players())
        .all(|(s, v)| v.value(s.union(z)) == v.value(s)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportOutcome {
    Supported(EquilibriumCertificate),
    NotMaximal,
}

/// Prices and intensity that support a maximal allocation.
///
/// With `OPT' = n * max_i v_i(M)`: items of positive contribution cost
/// `2 OPT'`, the rest are free, and `alpha = 20 m OPT' / min q_j`. When every
/// contribution is zero the zero price vector works at any intensity and
/// `alpha = 2` is returned. The result is re-verified; a failure is reported
/// as [`Error::Invariant`].
pub fn support_construct(inst: &Instance, a: &Allocation) -> Result<SupportOutcome> {
    if !is_maximal(inst, a)? {
        return Ok(SupportOutcome::NotMaximal);
    }
    let m = inst.item_count();
    let profile = marginal_profile(inst, a)?;
    let positive = profile.positive_set();
    let (prices, alpha) = match positive.items().map(|j| &profile.contributions[j]).min() {
        None => (PriceVector::zeros(m), Rational::from_integer(2)),
        Some(min_q) => {
            let full = Bundle::full(m);
            let top = inst.players().iter().map(|v| v.value(full)).max().unwrap_or_default();
            let opt_bar = Rational::from(inst.player_count()) * top;
            let high = Rational::from_integer(2) * &opt_bar;
            let prices = (0..m).map(|j| if positive.contains(j) { high.clone() } else { Rational::zero() }).collect();
            let alpha = Rational::from(20 * m) * &opt_bar / min_q;
            (PriceVector::new(prices)?, alpha)
        }
    };
    let cert = verify_endowed_equilibrium(inst, a, &prices, &alpha)?;
    if !cert.is_valid() {
        return Err(Error::Invariant(format!(
            "maximal allocation {a} not supported by constructed prices {prices} at alpha {alpha}: {:?}",
            cert.witness
        )));
    }
    Ok(SupportOutcome::Supported(cert))
}

/// Sequential maximal allocation: each player in turn takes every remaining
/// item, then repeatedly drops the lowest-index item of zero marginal value.
pub fn greedy_maximal(inst: &Instance) -> Allocation {
    let m = inst.item_count();
    let mut remaining = Bundle::full(m);
    let mut a = Allocation::empty(m);
    for (i, v) in inst.players().iter().enumerate() {
        let mut s = remaining;
        while let Some(j) = s.items().find(|&j| v.value(s) == v.value(s.without(j))) {
            s = s.without(j);
        }
        for j in s.items() {
            a.set_owner(j, Some(i));
        }
        remaining = remaining.difference(s);
    }
    a
}

/// `sum_i v_i(S_i)`.
pub fn welfare(inst: &Instance, a: &Allocation) -> Result<Rational> {
    inst.check_allocation(a)?;
    Ok(a.bundles(inst.player_count()).into_iter().zip(inst.players()).map(|(s, v)| v.value(s)).sum())
}
