//! Single-item-move local search and the marginal-price support of local optima.

use serde::Serialize;

use crate::equilibrium::{verify_endowed_equilibrium, Allocation, EquilibriumCertificate, Instance, PriceVector};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuations::MAX_CHECK_ITEMS;

/// Reassignment of one item between players, with its welfare change.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub item: usize,
    pub from: usize,
    pub to: usize,
    pub delta: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalOptimality {
    LocalOptimum,
    /// Local optima allocate every item.
    Unallocated { item: usize },
    /// First strictly improving move in `(item, destination)` order.
    Improvable(Move),
}

impl LocalOptimality {
    pub fn holds(&self) -> bool {
        matches!(self, LocalOptimality::LocalOptimum)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalSearchTrace {
    /// Starting point after unallocated items were placed.
    pub initial: Allocation,
    pub moves: Vec<Move>,
    #[serde(rename = "final")]
    pub final_allocation: Allocation,
}

impl LocalSearchTrace {
    pub fn move_count(&self) -> usize {
        self.moves.len()
    }

    /// One JSON object per move.
    pub fn to_json_lines(&self) -> String {
        self.moves.iter().map(|m| serde_json::to_string(m).expect("moves serialize") + "\n").collect()
    }
}

struct State<'a> {
    tables: &'a [Vec<Rational>],
    bundles: Vec<usize>,
    owners: Vec<Option<usize>>,
}

impl State<'_> {
    fn new<'a>(tables: &'a [Vec<Rational>], a: &Allocation) -> State<'a> {
        let bundles = a.bundles(tables.len()).into_iter().map(|b| b.bits() as usize).collect();
        State { tables, bundles, owners: a.owners().to_vec() }
    }

    fn gain(&self, item: usize, from: usize, to: usize) -> Rational {
        let (bf, bt) = (self.bundles[from], self.bundles[to]);
        let bit = 1 << item;
        let (tf, tt) = (&self.tables[from], &self.tables[to]);
        &tf[bf & !bit] + &tt[bt | bit] - &tf[bf] - &tt[bt]
    }

    fn first_improvement(&self) -> Option<Move> {
        for (item, owner) in self.owners.iter().enumerate() {
            let from = owner.expect("complete allocation");
            for to in (0..self.tables.len()).filter(|&t| t != from) {
                let delta = self.gain(item, from, to);
                if delta.is_positive() {
                    return Some(Move { item, from, to, delta });
                }
            }
        }
        None
    }

    fn apply(&mut self, mv: &Move) {
        self.bundles[mv.from] &= !(1 << mv.item);
        self.bundles[mv.to] |= 1 << mv.item;
        self.owners[mv.item] = Some(mv.to);
    }

    fn allocation(&self) -> Allocation {
        Allocation::new(self.owners.clone()).expect("item count unchanged")
    }
}

/// A complete allocation where no single-item reallocation strictly raises welfare.
pub fn is_local_optimum(inst: &Instance, o: &Allocation) -> Result<LocalOptimality> {
    inst.check_allocation(o)?;
    if let Some(item) = o.unallocated().items().next() {
        return Ok(LocalOptimality::Unallocated { item });
    }
    let tables = inst.value_tables();
    Ok(match State::new(&tables, o).first_improvement() {
        Some(mv) => LocalOptimality::Improvable(mv),
        None => LocalOptimality::LocalOptimum,
    })
}

/// Applies the first strictly improving move until none remains.
///
/// Unallocated items are first given to the player with the highest
/// singleton value (lowest index on ties).
pub fn local_search(inst: &Instance, initial: &Allocation) -> Result<(Allocation, LocalSearchTrace)> {
    inst.check_allocation(initial)?;
    if inst.player_count() == 0 && inst.item_count() > 0 {
        return Err(Error::Precondition("local search needs at least one player".into()));
    }
    let tables = inst.value_tables();
    let mut start = initial.clone();
    for j in initial.unallocated().items() {
        let best = (0..inst.player_count())
            .fold(None::<usize>, |acc, i| match acc {
                Some(b) if tables[b][1 << j] >= tables[i][1 << j] => Some(b),
                _ => Some(i),
            })
            .expect("at least one player");
        start.set_owner(j, Some(best));
    }
    let mut state = State::new(&tables, &start);
    let mut moves = Vec::new();
    while let Some(mv) = state.first_improvement() {
        state.apply(&mv);
        moves.push(mv);
    }
    let end = state.allocation();
    Ok((end.clone(), LocalSearchTrace { initial: start, moves, final_allocation: end }))
}

fn require_complete(o: &Allocation) -> Result<()> {
    match o.unallocated().items().next() {
        Some(j) => Err(Error::Domain(format!("item {j} is unallocated"))),
        None => Ok(()),
    }
}

/// `p_j = v_i(j | O_i - j)` for the owner `i` of `j`.
pub fn marginal_prices(inst: &Instance, o: &Allocation) -> Result<PriceVector> {
    inst.check_allocation(o)?;
    require_complete(o)?;
    let bundles = o.bundles(inst.player_count());
    let prices = (0..inst.item_count())
        .map(|j| {
            let i = o.owner(j).expect("complete");
            let v = inst.player(i);
            v.value(bundles[i]) - v.value(bundles[i].without(j))
        })
        .collect();
    PriceVector::new(prices)
}

/// `p_j = max_{i' != owner(j)} v_{i'}(j | O_{i'})`, or 0 with a single player.
pub fn second_highest_marginal_prices(inst: &Instance, o: &Allocation) -> Result<PriceVector> {
    inst.check_allocation(o)?;
    require_complete(o)?;
    let bundles = o.bundles(inst.player_count());
    let prices = (0..inst.item_count())
        .map(|j| {
            let owner = o.owner(j).expect("complete");
            (0..inst.player_count())
                .filter(|&i| i != owner)
                .map(|i| {
                    let v = inst.player(i);
                    v.value(bundles[i].with(j)) - v.value(bundles[i])
                })
                .max()
                .unwrap_or_default()
        })
        .collect();
    PriceVector::new(prices)
}

/// Verifies a local optimum of a submodular instance at `alpha >= 2` with
/// marginal prices. Submodularity is checked when `m <= 16`; beyond that the
/// caller vouches for it. An invalid certificate is an [`Error::Invariant`].
pub fn support_local_optimum(inst: &Instance, o: &Allocation, alpha: &Rational) -> Result<EquilibriumCertificate> {
    if *alpha < Rational::from_integer(2) {
        return Err(Error::Precondition(format!("alpha must be at least 2, got {alpha}")));
    }
    match is_local_optimum(inst, o)? {
        LocalOptimality::LocalOptimum => {}
        LocalOptimality::Unallocated { item } => {
            return Err(Error::Precondition(format!("not a local optimum: item {item} is unallocated")))
        }
        LocalOptimality::Improvable(mv) => {
            return Err(Error::Precondition(format!(
                "not a local optimum: moving item {} from player {} to player {} gains {}",
                mv.item, mv.from, mv.to, mv.delta
            )))
        }
    }
    if inst.item_count() <= MAX_CHECK_ITEMS {
        for (i, v) in inst.players().iter().enumerate() {
            if let Some(w) = v.is_submodular()?.violation() {
                return Err(Error::Precondition(format!("player {i} is not submodular: {w}")));
            }
        }
    }
    let prices = marginal_prices(inst, o)?;
    let cert = verify_endowed_equilibrium(inst, o, &prices, alpha)?;
    if !cert.is_valid() {
        return Err(Error::Invariant(format!("local optimum {o} not supported at alpha {alpha}: {:?}", cert.witness)));
    }
    Ok(cert)
}
