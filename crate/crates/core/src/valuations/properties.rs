//! Exhaustive structural checks over value tables.

use std::fmt;

use serde::Serialize;

use super::{Valuation, MAX_CHECK_ITEMS};
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Beyond this many items the non-monotone subadditivity fallback (`4^m` pairs) refuses.
const MAX_PAIRWISE_ITEMS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotNormalized { value: Rational },
    /// `v(subset ∪ {item}) < v(subset)`.
    NotMonotone { subset: Bundle, item: usize },
    /// `v(item | base) < v(item | base ∪ {other})`.
    NotSubmodular { base: Bundle, item: usize, other: usize },
    /// `v(left) + v(right) < v(left ∪ right)`.
    NotSubadditive { left: Bundle, right: Bundle },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotNormalized { value } => write!(f, "v(empty) = {value}"),
            Violation::NotMonotone { subset, item } => write!(f, "adding item {item} to {subset} lowers the value"),
            Violation::NotSubmodular { base, item, other } => {
                write!(f, "marginal of item {item} grows from {base} once item {other} is added")
            }
            Violation::NotSubadditive { left, right } => write!(f, "v({left}) + v({right}) < v(union)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertyCheck {
    Holds,
    Fails(Violation),
}

impl PropertyCheck {
    pub fn holds(&self) -> bool {
        matches!(self, PropertyCheck::Holds)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            PropertyCheck::Holds => None,
            PropertyCheck::Fails(v) => Some(v),
        }
    }
}

pub(super) fn check_size(m: usize) -> Result<()> {
    if m > MAX_CHECK_ITEMS {
        Err(Error::SizeCap { what: "items for property check", actual: m as u128, limit: MAX_CHECK_ITEMS as u128 })
    } else {
        Ok(())
    }
}

pub(super) fn normalized(v: &Valuation) -> PropertyCheck {
    let value = v.value(Bundle::EMPTY);
    if value.is_zero() {
        PropertyCheck::Holds
    } else {
        PropertyCheck::Fails(Violation::NotNormalized { value })
    }
}

/// Single-item steps suffice: `S ⊆ T` is a chain of them.
pub(super) fn monotone_unbounded(v: &Valuation) -> PropertyCheck {
    monotone(&v.table(), v.item_count())
}

pub(crate) fn monotone(table: &[Rational], m: usize) -> PropertyCheck {
    for s in Bundle::all(m) {
        for j in s.complement(m).items() {
            if table[s.with(j).bits() as usize] < table[s.bits() as usize] {
                return PropertyCheck::Fails(Violation::NotMonotone { subset: s, item: j });
            }
        }
    }
    PropertyCheck::Holds
}

pub(crate) fn submodular(table: &[Rational], m: usize) -> PropertyCheck {
    let at = |b: Bundle| &table[b.bits() as usize];
    for s in Bundle::all(m) {
        let outside = s.complement(m);
        for j in outside.items() {
            let here = at(s.with(j)) - at(s);
            for k in outside.without(j).items() {
                let sk = s.with(k);
                if at(sk.with(j)) - at(sk) > here {
                    return PropertyCheck::Fails(Violation::NotSubmodular { base: s, item: j, other: k });
                }
            }
        }
    }
    PropertyCheck::Holds
}

/// Disjoint pairs suffice for monotone functions; otherwise every pair is tried.
pub(crate) fn subadditive(table: &[Rational], m: usize) -> Result<PropertyCheck> {
    let at = |b: Bundle| &table[b.bits() as usize];
    let fails = |l: Bundle, r: Bundle| at(l) + at(r) < *at(l.union(r));
    if monotone(table, m).holds() {
        for s in Bundle::all(m) {
            for t in s.complement(m).subsets() {
                if t.bits() > s.bits() && fails(s, t) {
                    return Ok(PropertyCheck::Fails(Violation::NotSubadditive { left: s, right: t }));
                }
            }
        }
    } else {
        if m > MAX_PAIRWISE_ITEMS {
            return Err(Error::SizeCap {
                what: "items for non-monotone subadditivity check",
                actual: m as u128,
                limit: MAX_PAIRWISE_ITEMS as u128,
            });
        }
        for s in Bundle::all(m) {
            for t in Bundle::all(m) {
                if t.bits() >= s.bits() && fails(s, t) {
                    return Ok(PropertyCheck::Fails(Violation::NotSubadditive { left: s, right: t }));
                }
            }
        }
    }
    Ok(PropertyCheck::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn table(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    #[test]
    fn supermodular_pair_is_caught() {
        // v = [0, 1, 1, 3]: items are complements.
        let t = table(&[0, 1, 1, 3]);
        let check = submodular(&t, 2);
        assert_eq!(
            check,
            PropertyCheck::Fails(Violation::NotSubmodular { base: Bundle::EMPTY, item: 0, other: 1 })
        );
        assert!(!subadditive(&t, 2).unwrap().holds());
    }

    #[test]
    fn unit_demand_is_submodular_and_subadditive() {
        let t = table(&[0, 1, 1, 1]);
        assert!(submodular(&t, 2).holds());
        assert!(subadditive(&t, 2).unwrap().holds());
        assert!(monotone(&t, 2).holds());
    }

    #[test]
    fn non_monotone_falls_back_to_all_pairs() {
        let t = vec![Rational::zero(), q(2, 1), q(2, 1), q(1, 1)];
        assert!(!monotone(&t, 2).holds());
        assert!(subadditive(&t, 2).unwrap().holds());
    }
}
