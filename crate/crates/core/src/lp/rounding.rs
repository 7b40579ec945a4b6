use serde::Serialize;

use super::FractionalSolution;
use crate::bundle::Bundle;
use crate::equilibrium::{Allocation, Instance};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundingReport {
    /// Player whose bundle is sampled; the other takes the complement.
    pub sampled_player: usize,
    pub expected_welfare: Rational,
    /// `(1/2 + 1/(2m))` times the fractional objective.
    pub guarantee: Rational,
    pub best: Allocation,
    pub best_welfare: Rational,
}

/// Derandomized rounding for two subadditive players.
///
/// The player with the larger fractional share draws `S` with probability
/// `x_{i,S}` (the leftover mass draws the empty bundle) and the other player
/// takes `M - S`. The expectation is computed exactly over the support. A
/// result below the guarantee is an [`Error::Invariant`].
pub fn round_two_player_subadditive(inst: &Instance, x: &FractionalSolution) -> Result<RoundingReport> {
    let m = inst.item_count();
    if inst.player_count() != 2 {
        return Err(Error::Precondition(format!("needs exactly 2 players, got {}", inst.player_count())));
    }
    if m == 0 {
        return Err(Error::Precondition("needs at least one item".into()));
    }
    for (i, v) in inst.players().iter().enumerate() {
        if let Some(w) = v.is_subadditive()?.violation() {
            return Err(Error::Precondition(format!("player {i} is not subadditive: {w}")));
        }
    }
    let share = |i: usize| -> Rational { x.iter().filter(|(p, _, _)| *p == i).map(|(_, s, w)| w * inst.player(i).value(s)).sum() };
    let (p, other) = if share(0) >= share(1) { (0, 1) } else { (1, 0) };
    let (vp, vq) = (inst.player(p), inst.player(other));
    let full = Bundle::full(m);
    let split = |s: Bundle| vp.value(s) + vq.value(full.difference(s));

    let mut support: Vec<(Bundle, Rational)> =
        x.iter().filter(|(i, _, _)| *i == p).map(|(_, s, w)| (s, w.clone())).collect();
    let leftover = Rational::one() - support.iter().map(|(_, w)| w).sum::<Rational>();
    if leftover.is_negative() {
        return Err(Error::Domain(format!("player {p} receives total weight above 1")));
    }
    if !leftover.is_zero() {
        support.push((Bundle::EMPTY, leftover));
    }
    let expected_welfare: Rational = support.iter().map(|(s, w)| w * split(*s)).sum();
    let (best_bundle, best_welfare) = support
        .iter()
        .map(|(s, _)| (*s, split(*s)))
        .fold(None::<(Bundle, Rational)>, |acc, (s, w)| match acc {
            Some((bs, bw)) if bw > w || (bw == w && bs <= s) => Some((bs, bw)),
            _ => Some((s, w)),
        })
        .expect("support holds at least one bundle");
    let mut owners = vec![Some(other); m];
    for j in best_bundle.items() {
        owners[j] = Some(p);
    }
    let half = Rational::new(1, 2);
    let guarantee = (&half + Rational::new(1, 2 * m as i64)) * x.objective();
    if expected_welfare < guarantee {
        return Err(Error::Invariant(format!(
            "rounded welfare {expected_welfare} below guarantee {guarantee} for objective {}",
            x.objective()
        )));
    }
    Ok(RoundingReport { sampled_player: p, expected_welfare, guarantee, best: Allocation::new(owners)?, best_welfare })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_config_lp;
    use crate::rational::q;
    use crate::valuations::Valuation;

    #[test]
    fn integral_solution_rounds_to_itself() {
        let a = Valuation::additive(vec![q(2, 1), q(0, 1)]).unwrap();
        let b = Valuation::additive(vec![q(0, 1), q(3, 1)]).unwrap();
        let inst = Instance::new(2, vec![a, b], None).unwrap();
        let x = solve_config_lp(&inst).unwrap();
        let r = round_two_player_subadditive(&inst, &x).unwrap();
        assert_eq!(r.expected_welfare, q(5, 1));
        assert_eq!(r.best, Allocation::new(vec![Some(0), Some(1)]).unwrap());
        assert_eq!(r.guarantee, q(15, 4));
    }
}
