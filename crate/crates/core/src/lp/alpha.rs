//! Minimal supporting intensity and supporting prices.
//!
//! With `W = sum_i v_i(A_i)`, `f(x)` the LP objective and `psi(x)` as in
//! [`super::psi`], the allocation is supported at `alpha` iff
//! `alpha (W - psi(x)) >= f(x) - psi(x)` on the whole LP polytope. The
//! smallest such `alpha` is the maximum of a linear-fractional program, which
//! the substitution `y = x / (W - psi(x))` turns into the LP
//!
//! ```text
//! max  sum y_{i,S} (v_i(S) - v_i(S ∩ A_i))
//! s.t. W * (row sum of y) - sum y_{i,S} v_i(S ∩ A_i) <= 1   for every item and player row
//!      y >= 0
//! ```
//!
//! An unbounded LP means some `x` has `psi(x) = W` and `f(x) > psi(x)`: no
//! intensity supports the allocation.

use serde::Serialize;

use super::simplex::{Constraint, LinearProgram, LpOutcome, Relation};
use super::{check_lp_size, is_supported_tables, ConfigLp};
use crate::bundle::Bundle;
use crate::equilibrium::{best_deviation, endowed_table, Allocation, Instance, PriceVector};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SupportingAlpha {
    Supported {
        /// `max(1, lfp_value)`.
        alpha: Rational,
        /// Optimum of the linear-fractional program; absent when `W = 0`.
        lfp_value: Option<Rational>,
        /// Whether `alpha` itself supports the allocation, not just every larger value.
        attained: bool,
    },
    Unsupportable,
}

impl SupportingAlpha {
    pub fn alpha(&self) -> Option<&Rational> {
        match self {
            SupportingAlpha::Supported { alpha, .. } => Some(alpha),
            SupportingAlpha::Unsupportable => None,
        }
    }

    pub fn is_supportable(&self) -> bool {
        matches!(self, SupportingAlpha::Supported { .. })
    }
}

/// Smallest intensity `alpha >= 1` supporting `a`, or [`SupportingAlpha::Unsupportable`].
pub fn min_supporting_alpha(inst: &Instance, a: &Allocation) -> Result<SupportingAlpha> {
    check_lp_size(inst.item_count())?;
    inst.check_allocation(a)?;
    min_alpha_tables(&inst.value_tables(), inst.item_count(), a)
}

pub(crate) fn min_alpha_tables(tables: &[Vec<Rational>], m: usize, a: &Allocation) -> Result<SupportingAlpha> {
    let bundles = a.bundles(tables.len());
    let w: Rational = tables.iter().zip(&bundles).map(|(t, s)| &t[s.bits() as usize]).sum();
    let one = Rational::one();
    let (alpha, lfp_value) = if w.is_zero() {
        let lp = ConfigLp::from_tables(m, tables.to_vec()).solve()?;
        if lp.objective().is_positive() {
            return Ok(SupportingAlpha::Unsupportable);
        }
        (one, None)
    } else {
        match fractional_program(tables, m, &bundles, &w).solve() {
            LpOutcome::Optimal { objective, .. } => (objective.clone().max(one), Some(objective)),
            LpOutcome::Unbounded => return Ok(SupportingAlpha::Unsupportable),
            LpOutcome::Infeasible => {
                return Err(Error::Invariant("homogenized program has the feasible point y = 0".into()))
            }
        }
    };
    let attained = is_supported_tables(tables, m, a, &alpha);
    if attained && find_prices_tables(tables, m, a, &alpha)? == PriceSearch::Infeasible {
        return Err(Error::Invariant(format!(
            "allocation {a} is LP-optimal at alpha {alpha} but admits no supporting prices"
        )));
    }
    Ok(SupportingAlpha::Supported { alpha, lfp_value, attained })
}

fn fractional_program(tables: &[Vec<Rational>], m: usize, bundles: &[Bundle], w: &Rational) -> LinearProgram {
    let lp = ConfigLp::from_tables(m, tables.to_vec());
    let cols = lp.column_count();
    let mut objective = Vec::with_capacity(cols);
    let mut overlap = Vec::with_capacity(cols);
    for k in 0..cols {
        let (i, s) = lp.column(k);
        let own = tables[i][s.intersection(bundles[i]).bits() as usize].clone();
        objective.push(lp.value(i, s) - &own);
        overlap.push(own);
    }
    let constraints = lp
        .rows()
        .into_iter()
        .map(|row| {
            let mut coeffs: Vec<Rational> = overlap.iter().map(|o| -o).collect();
            for k in row {
                coeffs[k] += w;
            }
            let sparse = coeffs.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            Constraint::new(sparse, Relation::Le, Rational::one())
        })
        .collect();
    LinearProgram { num_vars: cols, objective, constraints }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PriceSearch {
    Feasible(PriceVector),
    Infeasible,
}

/// Nonnegative prices, zero on unallocated items, under which every player's
/// bundle is in the demand of its endowed valuation.
///
/// Minimizes total price by row generation: each round adds, per player, the
/// smallest most-violated bundle constraint until none is violated.
pub fn find_supporting_prices(inst: &Instance, a: &Allocation, alpha: &Rational) -> Result<PriceSearch> {
    check_lp_size(inst.item_count())?;
    inst.check_allocation(a)?;
    if alpha.is_negative() {
        return Err(Error::Domain(format!("endowment intensity must be nonnegative, got {alpha}")));
    }
    find_prices_tables(&inst.value_tables(), inst.item_count(), a, alpha)
}

pub(crate) fn find_prices_tables(
    tables: &[Vec<Rational>],
    m: usize,
    a: &Allocation,
    alpha: &Rational,
) -> Result<PriceSearch> {
    let bundles = a.bundles(tables.len());
    let endowed: Vec<Vec<Rational>> = tables.iter().zip(&bundles).map(|(t, s)| endowed_table(t, *s, alpha)).collect();
    let allocated: Vec<usize> = a.allocated().items().collect();
    let mut var = vec![usize::MAX; m];
    for (k, &j) in allocated.iter().enumerate() {
        var[j] = k;
    }
    let mut program = LinearProgram::new(allocated.len());
    program.objective = vec![-Rational::one(); allocated.len()];

    // p(S_i) - p(T) <= e_i(S_i) - e_i(T), prices of unallocated items fixed at 0.
    let constraint = |i: usize, t: Bundle| -> Option<Constraint> {
        let s = bundles[i];
        let mut coeffs: Vec<(usize, Rational)> = s.difference(t).items().map(|j| (var[j], Rational::one())).collect();
        coeffs.extend(t.difference(s).items().filter(|&j| var[j] != usize::MAX).map(|j| (var[j], -Rational::one())));
        let rhs = &endowed[i][s.bits() as usize] - &endowed[i][t.bits() as usize];
        if coeffs.is_empty() && rhs.is_negative() {
            return None;
        }
        Some(Constraint::new(coeffs, Relation::Le, rhs))
    };

    for i in 0..tables.len() {
        match constraint(i, Bundle::EMPTY) {
            Some(c) => program.add(c),
            None => return Ok(PriceSearch::Infeasible),
        }
    }
    loop {
        let LpOutcome::Optimal { values, .. } = program.solve() else {
            return Ok(PriceSearch::Infeasible);
        };
        let mut prices = vec![Rational::zero(); m];
        for (k, &j) in allocated.iter().enumerate() {
            prices[j] = values[k].clone();
        }
        let prices = PriceVector::new(prices)?;
        let costs = prices.totals_table();
        let mut added = false;
        for i in 0..tables.len() {
            // The endowed table already includes the shift, so deviate at alpha = 1.
            if let Some((t, _)) = best_deviation(&endowed[i], &costs, bundles[i], &Rational::one()) {
                match constraint(i, t) {
                    Some(c) => program.add(c),
                    None => return Ok(PriceSearch::Infeasible),
                }
                added = true;
            }
        }
        if !added {
            return Ok(PriceSearch::Feasible(prices));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::verify_endowed_equilibrium;
    use crate::rational::q;
    use crate::valuations::Valuation;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    #[test]
    fn walrasian_allocation_needs_only_one() {
        let u = Valuation::unit_demand(ints(&[2, 1])).unwrap();
        let w = Valuation::unit_demand(ints(&[1, 2])).unwrap();
        let inst = Instance::new(2, vec![u, w], None).unwrap();
        let a = Allocation::new(vec![Some(0), Some(1)]).unwrap();
        let got = min_supporting_alpha(&inst, &a).unwrap();
        assert_eq!(got.alpha(), Some(&q(1, 1)));
        let PriceSearch::Feasible(p) = find_supporting_prices(&inst, &a, &q(1, 1)).unwrap() else { panic!() };
        assert!(verify_endowed_equilibrium(&inst, &a, &p, &q(1, 1)).unwrap().is_valid());
    }

    #[test]
    fn leaving_a_wanted_item_unallocated_is_unsupportable() {
        let v = Valuation::additive(ints(&[1, 1])).unwrap();
        let inst = Instance::new(2, vec![v], None).unwrap();
        let a = Allocation::new(vec![Some(0), None]).unwrap();
        assert_eq!(min_supporting_alpha(&inst, &a).unwrap(), SupportingAlpha::Unsupportable);
        assert_eq!(find_supporting_prices(&inst, &a, &q(5, 1)).unwrap(), PriceSearch::Infeasible);
        let none = Allocation::empty(2);
        assert_eq!(min_supporting_alpha(&inst, &none).unwrap(), SupportingAlpha::Unsupportable);
    }

    #[test]
    fn zero_instance_is_supported_at_one() {
        let v = Valuation::additive(ints(&[0, 0])).unwrap();
        let inst = Instance::new(2, vec![v], None).unwrap();
        let got = min_supporting_alpha(&inst, &Allocation::empty(2)).unwrap();
        assert_eq!(got, SupportingAlpha::Supported { alpha: q(1, 1), lfp_value: None, attained: true });
    }

    #[test]
    fn identical_unit_demand_split_needs_more_than_one() {
        // Two identical unit-demand players over two items of value 1: (both, none) is not Walrasian.
        let v = Valuation::unit_demand(ints(&[1, 1])).unwrap();
        let inst = Instance::new(2, vec![v.clone(), v], None).unwrap();
        let hog = Allocation::grand_bundle(2, 0);
        assert_eq!(min_supporting_alpha(&inst, &hog).unwrap(), SupportingAlpha::Unsupportable);
        let split = Allocation::new(vec![Some(0), Some(1)]).unwrap();
        assert_eq!(min_supporting_alpha(&inst, &split).unwrap().alpha(), Some(&q(1, 1)));
    }
}
