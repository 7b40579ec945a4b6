//! Combinatorial valuation functions.
//!
//! A [`Valuation`] is an immutable set-function oracle over the items
//! `0..m`. Each structural class keeps its own compact payload; everything
//! else in the crate talks to valuations through [`Valuation::eval`],
//! [`Valuation::marginal`] and dense value tables.
//!
//! The endowed transform [`Valuation::endow`] wraps any valuation `v` around
//! an endowment `S` and intensity `alpha`:
//!
//! ```text
//! v^{S,alpha}(T) = alpha * v(S ∩ T) + v(T - S | S ∩ T) = v(T) + (alpha - 1) * v(S ∩ T)
//! ```

mod graph;
mod json;
mod properties;

use std::fmt;

pub use graph::{Edge, WeightedGraph};
pub use json::ValuationSpec;
pub use properties::{PropertyCheck, Violation};

use crate::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Property checkers enumerate `2^m` (or more) bundles; they refuse beyond this.
pub const MAX_CHECK_ITEMS: usize = 16;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValuationClass {
    Explicit,
    Additive,
    BudgetAdditive,
    UnitDemand,
    Xos,
    GraphCut,
    Endowed,
    Perturbed,
}

impl ValuationClass {
    pub fn name(self) -> &'static str {
        match self {
            ValuationClass::Explicit => "explicit",
            ValuationClass::Additive => "additive",
            ValuationClass::BudgetAdditive => "budget_additive",
            ValuationClass::UnitDemand => "unit_demand",
            ValuationClass::Xos => "xos",
            ValuationClass::GraphCut => "graph_cut",
            ValuationClass::Endowed => "endowed",
            ValuationClass::Perturbed => "perturbed",
        }
    }
}

impl fmt::Display for ValuationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Explicit { items: usize, table: Vec<Rational> },
    Additive { values: Vec<Rational> },
    BudgetAdditive { values: Vec<Rational>, budget: Rational },
    UnitDemand { values: Vec<Rational> },
    Xos { items: usize, clauses: Vec<Vec<Rational>> },
    GraphCut(WeightedGraph),
    Endowed { inner: Box<Valuation>, endowment: Bundle, alpha: Rational },
    Perturbed { inner: Box<Valuation>, bonus: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation(Repr);

fn check_items(m: usize) -> Result<()> {
    if m > MAX_ITEMS {
        Err(Error::SizeCap { what: "item count", actual: m as u128, limit: MAX_ITEMS as u128 })
    } else {
        Ok(())
    }
}

fn check_nonnegative(what: &str, values: &[Rational]) -> Result<()> {
    match values.iter().position(Rational::is_negative) {
        Some(j) => Err(Error::InvalidValuation(format!("{what}: negative value {} for item {j}", values[j]))),
        None => Ok(()),
    }
}

impl Valuation {
    /// Explicit table indexed by bundle bitmask. Rejects tables that are not
    /// normalized and monotone.
    pub fn explicit(m: usize, table: Vec<Rational>) -> Result<Self> {
        let v = Self::explicit_unchecked(m, table)?;
        if let PropertyCheck::Fails(w) = properties::normalized(&v) {
            return Err(Error::InvalidValuation(format!("explicit table is not normalized: {w}")));
        }
        if let PropertyCheck::Fails(w) = properties::monotone_unbounded(&v) {
            return Err(Error::InvalidValuation(format!("explicit table is not monotone: {w}")));
        }
        Ok(v)
    }

    /// Explicit table without the normalization and monotonicity checks, for
    /// deliberately pathological fixtures.
    pub fn explicit_unchecked(m: usize, table: Vec<Rational>) -> Result<Self> {
        check_items(m)?;
        if table.len() != 1 << m {
            return Err(Error::InvalidValuation(format!(
                "explicit table has {} entries, expected 2^{m} = {}",
                table.len(),
                1u64 << m
            )));
        }
        Ok(Valuation(Repr::Explicit { items: m, table }))
    }

    /// Tabulates `f` over every bundle of `0..m`, then validates like [`Valuation::explicit`].
    pub fn explicit_from_fn(m: usize, f: impl Fn(Bundle) -> Rational) -> Result<Self> {
        check_items(m)?;
        Self::explicit(m, Bundle::all(m).map(f).collect())
    }

    pub fn additive(values: Vec<Rational>) -> Result<Self> {
        check_items(values.len())?;
        check_nonnegative("additive", &values)?;
        Ok(Valuation(Repr::Additive { values }))
    }

    pub fn budget_additive(values: Vec<Rational>, budget: Rational) -> Result<Self> {
        check_items(values.len())?;
        check_nonnegative("budget additive", &values)?;
        if budget.is_negative() {
            return Err(Error::InvalidValuation(format!("negative budget {budget}")));
        }
        Ok(Valuation(Repr::BudgetAdditive { values, budget }))
    }

    pub fn unit_demand(values: Vec<Rational>) -> Result<Self> {
        check_items(values.len())?;
        check_nonnegative("unit demand", &values)?;
        Ok(Valuation(Repr::UnitDemand { values }))
    }

    /// Pointwise maximum of additive clauses, each a per-item value vector.
    pub fn xos(m: usize, clauses: Vec<Vec<Rational>>) -> Result<Self> {
        check_items(m)?;
        for (k, c) in clauses.iter().enumerate() {
            if c.len() != m {
                return Err(Error::InvalidValuation(format!("XOS clause {k} has {} entries, expected {m}", c.len())));
            }
            check_nonnegative("XOS clause", c)?;
        }
        Ok(Valuation(Repr::Xos { items: m, clauses }))
    }

    pub fn graph_cut(graph: WeightedGraph) -> Result<Self> {
        check_items(graph.vertices())?;
        Ok(Valuation(Repr::GraphCut(graph)))
    }

    /// The endowed transform around `endowment` at intensity `alpha`.
    ///
    /// Nesting is allowed; the formula is applied with the wrapped valuation
    /// as the inner one. For `alpha < 1` the result need not be monotone.
    pub fn endow(&self, endowment: Bundle, alpha: Rational) -> Result<Self> {
        endowment.validate(self.item_count())?;
        if alpha.is_negative() {
            return Err(Error::Domain(format!("endowment intensity must be nonnegative, got {alpha}")));
        }
        Ok(Valuation(Repr::Endowed { inner: Box::new(self.clone()), endowment, alpha }))
    }

    /// `v(S) + |S| * bonus`.
    pub fn perturb(&self, bonus: Rational) -> Result<Self> {
        if bonus.is_negative() {
            return Err(Error::Domain(format!("per-item bonus must be nonnegative, got {bonus}")));
        }
        Ok(Valuation(Repr::Perturbed { inner: Box::new(self.clone()), bonus }))
    }

    pub fn item_count(&self) -> usize {
        match &self.0 {
            Repr::Explicit { items, .. } | Repr::Xos { items, .. } => *items,
            Repr::Additive { values } | Repr::BudgetAdditive { values, .. } | Repr::UnitDemand { values } => {
                values.len()
            }
            Repr::GraphCut(g) => g.vertices(),
            Repr::Endowed { inner, .. } | Repr::Perturbed { inner, .. } => inner.item_count(),
        }
    }

    pub fn class(&self) -> ValuationClass {
        match &self.0 {
            Repr::Explicit { .. } => ValuationClass::Explicit,
            Repr::Additive { .. } => ValuationClass::Additive,
            Repr::BudgetAdditive { .. } => ValuationClass::BudgetAdditive,
            Repr::UnitDemand { .. } => ValuationClass::UnitDemand,
            Repr::Xos { .. } => ValuationClass::Xos,
            Repr::GraphCut(_) => ValuationClass::GraphCut,
            Repr::Endowed { .. } => ValuationClass::Endowed,
            Repr::Perturbed { .. } => ValuationClass::Perturbed,
        }
    }

    /// `v(T)`.
    pub fn eval(&self, bundle: Bundle) -> Result<Rational> {
        bundle.validate(self.item_count())?;
        Ok(self.value(bundle))
    }

    /// `v(X ∪ Y) - v(Y)`.
    pub fn marginal(&self, x: Bundle, y: Bundle) -> Result<Rational> {
        let m = self.item_count();
        x.validate(m)?;
        y.validate(m)?;
        Ok(self.value(x.union(y)) - self.value(y))
    }

    /// Unchecked evaluation; `bundle` must lie within `0..item_count()`.
    pub fn value(&self, bundle: Bundle) -> Rational {
        debug_assert!(bundle.validate(self.item_count()).is_ok());
        match &self.0 {
            Repr::Explicit { table, .. } => table[bundle.bits() as usize].clone(),
            Repr::Additive { values } => bundle.items().map(|j| &values[j]).sum(),
            Repr::BudgetAdditive { values, budget } => {
                let total: Rational = bundle.items().map(|j| &values[j]).sum();
                total.min(budget.clone())
            }
            Repr::UnitDemand { values } => {
                bundle.items().map(|j| &values[j]).max().cloned().unwrap_or_default()
            }
            Repr::Xos { clauses, .. } => clauses
                .iter()
                .map(|c| bundle.items().map(|j| &c[j]).sum::<Rational>())
                .max()
                .unwrap_or_default(),
            Repr::GraphCut(g) => g.touching_weight(bundle),
            Repr::Endowed { inner, endowment, alpha } => {
                let owned = bundle.intersection(*endowment);
                let base = inner.value(bundle);
                if owned.is_empty() {
                    base
                } else {
                    base + (alpha - Rational::one()) * inner.value(owned)
                }
            }
            Repr::Perturbed { inner, bonus } => inner.value(bundle) + bonus * Rational::from(bundle.len()),
        }
    }

    /// Values of every bundle of `0..m`, indexed by bitmask.
    pub fn table(&self) -> Vec<Rational> {
        match &self.0 {
            Repr::Explicit { table, .. } => table.clone(),
            _ => Bundle::all(self.item_count()).map(|b| self.value(b)).collect(),
        }
    }

    pub fn is_normalized(&self) -> Result<PropertyCheck> {
        properties::check_size(self.item_count())?;
        Ok(properties::normalized(self))
    }

    pub fn is_monotone(&self) -> Result<PropertyCheck> {
        properties::check_size(self.item_count())?;
        Ok(properties::monotone_unbounded(self))
    }

    /// Diminishing returns: `v(j|S) >= v(j|S ∪ {k})` for all `S`, `j`, `k` outside `S`.
    pub fn is_submodular(&self) -> Result<PropertyCheck> {
        properties::check_size(self.item_count())?;
        Ok(properties::submodular(&self.table(), self.item_count()))
    }

    /// `v(S) + v(T) >= v(S ∪ T)` for all `S`, `T`.
    pub fn is_subadditive(&self) -> Result<PropertyCheck> {
        properties::check_size(self.item_count())?;
        properties::subadditive(&self.table(), self.item_count())
    }

    pub(crate) fn repr_for_json(&self) -> ReprRef<'_> {
        match &self.0 {
            Repr::Explicit { table, .. } => ReprRef::Explicit { table },
            Repr::Additive { values } => ReprRef::Additive { values },
            Repr::BudgetAdditive { values, budget } => ReprRef::BudgetAdditive { values, budget },
            Repr::UnitDemand { values } => ReprRef::UnitDemand { values },
            Repr::Xos { items, clauses } => ReprRef::Xos { items: *items, clauses },
            Repr::GraphCut(g) => ReprRef::GraphCut(g),
            Repr::Endowed { inner, endowment, alpha } => ReprRef::Endowed { inner, endowment: *endowment, alpha },
            Repr::Perturbed { inner, bonus } => ReprRef::Perturbed { inner, bonus },
        }
    }
}

/// Borrowed view of a valuation's payload, used by the JSON layer.
pub(crate) enum ReprRef<'a> {
    Explicit { table: &'a [Rational] },
    Additive { values: &'a [Rational] },
    BudgetAdditive { values: &'a [Rational], budget: &'a Rational },
    UnitDemand { values: &'a [Rational] },
    Xos { items: usize, clauses: &'a [Vec<Rational>] },
    GraphCut(&'a WeightedGraph),
    Endowed { inner: &'a Valuation, endowment: Bundle, alpha: &'a Rational },
    Perturbed { inner: &'a Valuation, bonus: &'a Rational },
}
