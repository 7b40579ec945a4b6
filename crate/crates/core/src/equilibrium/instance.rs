use serde::{Deserialize, Deserializer, Serialize};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuations::{PropertyCheck, Valuation, MAX_CHECK_ITEMS};

use super::Allocation;

/// Players' valuations over a shared item set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    m: usize,
    players: Vec<Valuation>,
    label: Option<String>,
}

#[derive(Deserialize)]
struct RawInstance {
    m: usize,
    players: Vec<Valuation>,
    #[serde(default)]
    label: Option<String>,
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawInstance::deserialize(deserializer)?;
        Instance::new(raw.m, raw.players, raw.label).map_err(serde::de::Error::custom)
    }
}

impl Instance {
    /// Validates item counts, normalization and (for `m <= 16`) monotonicity.
    pub fn new(m: usize, players: Vec<Valuation>, label: Option<String>) -> Result<Self> {
        let inst = Self::new_unchecked(m, players, label)?;
        for (i, v) in inst.players.iter().enumerate() {
            if !v.value(Bundle::EMPTY).is_zero() {
                return Err(Error::InvalidValuation(format!("player {i}: valuation is not normalized")));
            }
            if m <= MAX_CHECK_ITEMS {
                if let PropertyCheck::Fails(w) = v.is_monotone()? {
                    return Err(Error::InvalidValuation(format!("player {i}: valuation is not monotone: {w}")));
                }
            }
        }
        Ok(inst)
    }

    /// Only checks that every valuation has `m` items.
    pub fn new_unchecked(m: usize, players: Vec<Valuation>, label: Option<String>) -> Result<Self> {
        if let Some(v) = players.iter().find(|v| v.item_count() != m) {
            return Err(Error::ItemCountMismatch { expected: m, found: v.item_count() });
        }
        Ok(Instance { m, players, label })
    }

    pub fn item_count(&self) -> usize {
        self.m
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[Valuation] {
        &self.players
    }

    pub fn player(&self, i: usize) -> &Valuation {
        &self.players[i]
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Dense `2^m` tables, one per player.
    pub fn value_tables(&self) -> Vec<Vec<Rational>> {
        self.players.iter().map(Valuation::table).collect()
    }

    /// Each player endowed with its own bundle of `a` at `alpha`.
    pub fn endowed(&self, a: &Allocation, alpha: &Rational) -> Result<Instance> {
        self.check_allocation(a)?;
        let players = a
            .bundles(self.players.len())
            .into_iter()
            .zip(&self.players)
            .map(|(s, v)| v.endow(s, alpha.clone()))
            .collect::<Result<Vec<_>>>()?;
        Instance::new_unchecked(self.m, players, self.label.clone())
    }

    pub fn check_allocation(&self, a: &Allocation) -> Result<()> {
        a.validate(self.players.len(), self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn rejects_mismatched_and_non_monotone_players() {
        let a = Valuation::additive(vec![q(1, 1), q(1, 1)]).unwrap();
        let b = Valuation::additive(vec![q(1, 1)]).unwrap();
        assert!(matches!(Instance::new(2, vec![a.clone(), b], None), Err(Error::ItemCountMismatch { .. })));
        let ud = Valuation::unit_demand(vec![q(1, 1), q(1, 1)]).unwrap();
        let dip = ud.endow(Bundle::singleton(0), q(0, 1)).unwrap();
        assert!(Instance::new(2, vec![dip.clone()], None).is_err());
        assert!(Instance::new_unchecked(2, vec![dip], None).is_ok());
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let a = Valuation::unit_demand(vec![q(1, 2), q(1, 3)]).unwrap();
        let inst = Instance::new(2, vec![a], Some("pair".into())).unwrap();
        let text = serde_json::to_string(&inst).unwrap();
        assert_eq!(
            text,
            r#"{"m":2,"players":[{"class":"unit_demand","payload":{"values":["1/2","1/3"]}}],"label":"pair"}"#
        );
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
