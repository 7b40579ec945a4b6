use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ReprRef, Valuation, WeightedGraph};
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Wire form of a [`Valuation`]: `{"class": ..., "payload": ...}`.
///
/// Converting into a [`Valuation`] goes through the validating constructors,
/// so a spec that deserializes is not necessarily a valid valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "payload", rename_all = "snake_case")]
pub enum ValuationSpec {
    Explicit { table: BTreeMap<u32, Rational> },
    Additive { values: Vec<Rational> },
    BudgetAdditive { values: Vec<Rational>, budget: Rational },
    UnitDemand { values: Vec<Rational> },
    Xos { items: usize, clauses: Vec<Vec<Rational>> },
    GraphCut(WeightedGraph),
    Endowed { inner: Box<ValuationSpec>, endowment: Bundle, alpha: Rational },
    Perturbed { inner: Box<ValuationSpec>, bonus: Rational },
}

impl From<&Valuation> for ValuationSpec {
    fn from(v: &Valuation) -> Self {
        match v.repr_for_json() {
            ReprRef::Explicit { table } => ValuationSpec::Explicit {
                table: table.iter().enumerate().map(|(b, x)| (b as u32, x.clone())).collect(),
            },
            ReprRef::Additive { values } => ValuationSpec::Additive { values: values.to_vec() },
            ReprRef::BudgetAdditive { values, budget } => {
                ValuationSpec::BudgetAdditive { values: values.to_vec(), budget: budget.clone() }
            }
            ReprRef::UnitDemand { values } => ValuationSpec::UnitDemand { values: values.to_vec() },
            ReprRef::Xos { items, clauses } => ValuationSpec::Xos { items, clauses: clauses.to_vec() },
            ReprRef::GraphCut(g) => ValuationSpec::GraphCut(g.clone()),
            ReprRef::Endowed { inner, endowment, alpha } => ValuationSpec::Endowed {
                inner: Box::new(inner.into()),
                endowment,
                alpha: alpha.clone(),
            },
            ReprRef::Perturbed { inner, bonus } => {
                ValuationSpec::Perturbed { inner: Box::new(inner.into()), bonus: bonus.clone() }
            }
        }
    }
}

impl TryFrom<ValuationSpec> for Valuation {
    type Error = Error;

    fn try_from(spec: ValuationSpec) -> Result<Self> {
        match spec {
            ValuationSpec::Explicit { table } => {
                let len = table.len();
                if !len.is_power_of_two() {
                    return Err(Error::InvalidValuation(format!("explicit table has {len} entries, not a power of two")));
                }
                let m = len.trailing_zeros() as usize;
                if let Some((&k, _)) = table.iter().next_back().filter(|(&k, _)| k as usize >= len) {
                    return Err(Error::InvalidValuation(format!("explicit table key {k} out of range for {m} items")));
                }
                Valuation::explicit(m, table.into_values().collect())
            }
            ValuationSpec::Additive { values } => Valuation::additive(values),
            ValuationSpec::BudgetAdditive { values, budget } => Valuation::budget_additive(values, budget),
            ValuationSpec::UnitDemand { values } => Valuation::unit_demand(values),
            ValuationSpec::Xos { items, clauses } => Valuation::xos(items, clauses),
            ValuationSpec::GraphCut(g) => Valuation::graph_cut(g),
            ValuationSpec::Endowed { inner, endowment, alpha } => {
                Valuation::try_from(*inner)?.endow(endowment, alpha)
            }
            ValuationSpec::Perturbed { inner, bonus } => Valuation::try_from(*inner)?.perturb(bonus),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ValuationSpec::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = ValuationSpec::deserialize(deserializer)?;
        Valuation::try_from(spec).map_err(serde::de::Error::custom)
    }
}
