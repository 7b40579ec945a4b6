//! The configuration LP and everything computed from it.
//!
//! ```text
//! max  sum_{i,S} x_{i,S} v_i(S)
//! s.t. sum_{i, S ∋ j} x_{i,S} <= 1   for every item j
//!      sum_S x_{i,S} <= 1            for every player i
//!      x >= 0
//! ```
//!
//! Columns are enumerated in full (every player, every bundle including the
//! empty one), so `m` is capped at [`MAX_LP_ITEMS`].

mod alpha;
mod gap;
mod rounding;
pub mod simplex;

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub use alpha::{find_supporting_prices, min_supporting_alpha, PriceSearch, SupportingAlpha};
pub use gap::{endowment_gap_instance, perturbation_gap_check, AllocationGap, GapReport, InstanceGap, PerturbationReport};
pub use rounding::{round_two_player_subadditive, RoundingReport};

use crate::bundle::Bundle;
use crate::equilibrium::{endowed_table, Allocation, Instance};
use crate::error::{ensure_size, Error, Result};
use crate::rational::Rational;
use simplex::{Constraint, LinearProgram, LpOutcome, Relation};

pub const MAX_LP_ITEMS: usize = 14;
/// Cap on `(n+1)^m` for exhaustive integral optimization.
pub const MAX_INTEGRAL_ALLOCATIONS: u128 = 10_000_000;

pub(crate) fn check_lp_size(m: usize) -> Result<()> {
    ensure_size("items for configuration LP", m as u128, MAX_LP_ITEMS as u128)
}

pub(crate) fn allocation_count(n: usize, m: usize) -> u128 {
    (n as u128 + 1).checked_pow(m as u32).unwrap_or(u128::MAX)
}

/// One column per `(player, bundle)` with its value.
#[derive(Clone, Debug)]
pub struct ConfigLp {
    items: usize,
    tables: Vec<Vec<Rational>>,
}

impl ConfigLp {
    pub fn new(inst: &Instance) -> Result<Self> {
        check_lp_size(inst.item_count())?;
        Ok(ConfigLp { items: inst.item_count(), tables: inst.value_tables() })
    }

    /// From dense value tables, e.g. of an endowed (possibly non-monotone) instance.
    pub(crate) fn from_tables(items: usize, tables: Vec<Vec<Rational>>) -> Self {
        ConfigLp { items, tables }
    }

    pub fn item_count(&self) -> usize {
        self.items
    }

    pub fn player_count(&self) -> usize {
        self.tables.len()
    }

    pub fn column_count(&self) -> usize {
        self.tables.len() << self.items
    }

    pub(crate) fn column(&self, k: usize) -> (usize, Bundle) {
        (k >> self.items, Bundle::from_bits((k & ((1 << self.items) - 1)) as u32))
    }

    pub fn value(&self, player: usize, bundle: Bundle) -> &Rational {
        &self.tables[player][bundle.bits() as usize]
    }

    /// Item rows, then player rows, as sparse coefficient lists over columns.
    pub(crate) fn rows(&self) -> Vec<Vec<usize>> {
        let m = self.items;
        let mut rows = vec![Vec::new(); m + self.tables.len()];
        for k in 0..self.column_count() {
            let (i, s) = self.column(k);
            for j in s.items() {
                rows[j].push(k);
            }
            rows[m + i].push(k);
        }
        rows
    }

    pub fn program(&self) -> LinearProgram {
        let objective = (0..self.column_count())
            .map(|k| {
                let (i, s) = self.column(k);
                self.value(i, s).clone()
            })
            .collect();
        let constraints = self
            .rows()
            .into_iter()
            .map(|cols| Constraint::new(cols.into_iter().map(|k| (k, Rational::one())).collect(), Relation::Le, Rational::one()))
            .collect();
        LinearProgram { num_vars: self.column_count(), objective, constraints }
    }

    pub fn solve(&self) -> Result<FractionalSolution> {
        match self.program().solve() {
            LpOutcome::Optimal { values, objective } => {
                let weights = values
                    .into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(k, x)| (self.column(k), x))
                    .collect();
                Ok(FractionalSolution { weights, objective })
            }
            other => Err(Error::Invariant(format!("configuration LP is always feasible and bounded, got {other:?}"))),
        }
    }
}

/// Sparse weights `x_{i,S}` with their objective value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalSolution {
    weights: BTreeMap<(usize, Bundle), Rational>,
    objective: Rational,
}

impl FractionalSolution {
    /// Checks feasibility for `inst` and computes the objective.
    pub fn from_weights(inst: &Instance, weights: impl IntoIterator<Item = ((usize, Bundle), Rational)>) -> Result<Self> {
        let m = inst.item_count();
        let n = inst.player_count();
        let mut map: BTreeMap<(usize, Bundle), Rational> = BTreeMap::new();
        for ((i, s), x) in weights {
            if i >= n {
                return Err(Error::Domain(format!("player {i} out of range for {n} players")));
            }
            s.validate(m)?;
            if x.is_negative() {
                return Err(Error::Domain(format!("negative weight {x} on ({i}, {s})")));
            }
            *map.entry((i, s)).or_default() += x;
        }
        map.retain(|_, x| !x.is_zero());
        let mut item_load = vec![Rational::zero(); m];
        let mut player_load = vec![Rational::zero(); n];
        for ((i, s), x) in &map {
            player_load[*i] += x;
            for j in s.items() {
                item_load[j] += x;
            }
        }
        let one = Rational::one();
        if let Some(j) = item_load.iter().position(|l| *l > one) {
            return Err(Error::Domain(format!("item {j} is covered {} times", item_load[j])));
        }
        if let Some(i) = player_load.iter().position(|l| *l > one) {
            return Err(Error::Domain(format!("player {i} receives total weight {}", player_load[i])));
        }
        let objective = map.iter().map(|((i, s), x)| x * inst.player(*i).value(*s)).sum();
        Ok(FractionalSolution { weights: map, objective })
    }

    /// The 0/1 solution of an allocation (empty bundles omitted).
    pub fn integral(inst: &Instance, a: &Allocation) -> Result<Self> {
        inst.check_allocation(a)?;
        let weights = a
            .bundles(inst.player_count())
            .into_iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(i, s)| ((i, s), Rational::one()));
        Self::from_weights(inst, weights)
    }

    pub fn objective(&self) -> &Rational {
        &self.objective
    }

    pub fn weight(&self, player: usize, bundle: Bundle) -> Rational {
        self.weights.get(&(player, bundle)).cloned().unwrap_or_default()
    }

    /// Nonzero weights in `(player, bundle)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Bundle, &Rational)> {
        self.weights.iter().map(|((i, s), x)| (*i, *s, x))
    }

    pub fn is_integral(&self) -> bool {
        self.weights.values().all(Rational::is_integer)
    }
}

#[derive(Serialize)]
struct WeightEntry<'a> {
    player: usize,
    bundle: Bundle,
    weight: &'a Rational,
}

impl Serialize for FractionalSolution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<WeightEntry<'_>> =
            self.iter().map(|(player, bundle, weight)| WeightEntry { player, bundle, weight }).collect();
        let mut s = serializer.serialize_struct("FractionalSolution", 2)?;
        s.serialize_field("objective", &self.objective)?;
        s.serialize_field("weights", &entries)?;
        s.end()
    }
}

/// Optimal fractional welfare.
pub fn solve_config_lp(inst: &Instance) -> Result<FractionalSolution> {
    ConfigLp::new(inst)?.solve()
}

/// Optimal integral welfare over every allocation, partial ones included.
/// Ties go to the smallest owner array (unallocated before player 0).
pub fn integral_opt(inst: &Instance) -> Result<(Rational, Allocation)> {
    let n = inst.player_count();
    let m = inst.item_count();
    ensure_size("allocations for integral optimum", allocation_count(n, m), MAX_INTEGRAL_ALLOCATIONS)?;
    Ok(integral_opt_tables(&inst.value_tables(), m))
}

pub(crate) fn integral_opt_tables(tables: &[Vec<Rational>], m: usize) -> (Rational, Allocation) {
    struct Search<'a> {
        tables: &'a [Vec<Rational>],
        m: usize,
        bundles: Vec<u32>,
        owners: Vec<Option<usize>>,
        best: Option<(Rational, Vec<Option<usize>>)>,
    }
    impl Search<'_> {
        fn go(&mut self, j: usize) {
            if j == self.m {
                let w: Rational = self.bundles.iter().zip(self.tables).map(|(b, t)| &t[*b as usize]).sum();
                if self.best.as_ref().is_none_or(|(top, _)| w > *top) {
                    self.best = Some((w, self.owners.clone()));
                }
                return;
            }
            self.go(j + 1);
            for i in 0..self.tables.len() {
                self.bundles[i] |= 1 << j;
                self.owners[j] = Some(i);
                self.go(j + 1);
                self.bundles[i] &= !(1 << j);
                self.owners[j] = None;
            }
        }
    }
    let mut s = Search { tables, m, bundles: vec![0; tables.len()], owners: vec![None; m], best: None };
    s.go(0);
    let (w, owners) = s.best.expect("the empty allocation is always enumerated");
    (w, Allocation::new(owners).expect("size checked by caller"))
}

/// `psi(A, x) = sum_{i,S} x_{i,S} v_i(S ∩ A_i)`.
pub fn psi(inst: &Instance, a: &Allocation, x: &FractionalSolution) -> Result<Rational> {
    inst.check_allocation(a)?;
    let bundles = a.bundles(inst.player_count());
    x.iter()
        .map(|(i, s, w)| {
            if i >= bundles.len() {
                return Err(Error::Domain(format!("solution references player {i}")));
            }
            Ok(w * inst.player(i).eval(s.intersection(bundles[i]))?)
        })
        .sum::<Result<Rational>>()
}

/// Whether `a` is an optimal solution of the configuration LP of the
/// instance endowed around `a` at `alpha`.
pub fn is_supported_lp(inst: &Instance, a: &Allocation, alpha: &Rational) -> Result<bool> {
    check_lp_size(inst.item_count())?;
    inst.check_allocation(a)?;
    if alpha.is_negative() {
        return Err(Error::Domain(format!("endowment intensity must be nonnegative, got {alpha}")));
    }
    Ok(is_supported_tables(&inst.value_tables(), inst.item_count(), a, alpha))
}

pub(crate) fn is_supported_tables(tables: &[Vec<Rational>], m: usize, a: &Allocation, alpha: &Rational) -> bool {
    let bundles = a.bundles(tables.len());
    let endowed: Vec<Vec<Rational>> =
        tables.iter().zip(&bundles).map(|(t, s)| endowed_table(t, *s, alpha)).collect();
    let own: Rational = endowed.iter().zip(&bundles).map(|(t, s)| &t[s.bits() as usize]).sum();
    let lp = ConfigLp::from_tables(m, endowed).solve().expect("configuration LP is feasible and bounded");
    *lp.objective() == own
}
