use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Per-item owner assignment. `None` marks an unallocated item.
///
/// The player count is not stored; it comes from the instance the
/// allocation is checked against.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    owners: Vec<Option<usize>>,
}

impl Allocation {
    pub fn new(owners: Vec<Option<usize>>) -> Result<Self> {
        if owners.len() > MAX_ITEMS {
            return Err(Error::SizeCap { what: "item count", actual: owners.len() as u128, limit: MAX_ITEMS as u128 });
        }
        Ok(Allocation { owners })
    }

    /// Nothing allocated.
    pub fn empty(m: usize) -> Self {
        Allocation { owners: vec![None; m] }
    }

    /// Builds from one bundle per player. Overlapping bundles are rejected.
    pub fn from_bundles(m: usize, bundles: &[Bundle]) -> Result<Self> {
        let mut owners = vec![None; m];
        for (i, b) in bundles.iter().enumerate() {
            b.validate(m)?;
            for j in b.items() {
                if let Some(prev) = owners[j] {
                    return Err(Error::Domain(format!("item {j} given to both player {prev} and player {i}")));
                }
                owners[j] = Some(i);
            }
        }
        Allocation::new(owners)
    }

    /// Everything to one player.
    pub fn grand_bundle(m: usize, player: usize) -> Self {
        Allocation { owners: vec![Some(player); m] }
    }

    pub fn item_count(&self) -> usize {
        self.owners.len()
    }

    pub fn owners(&self) -> &[Option<usize>] {
        &self.owners
    }

    pub fn owner(&self, item: usize) -> Option<usize> {
        self.owners[item]
    }

    pub fn set_owner(&mut self, item: usize, owner: Option<usize>) {
        self.owners[item] = owner;
    }

    pub fn bundle(&self, player: usize) -> Bundle {
        Bundle::from_items(self.owners.iter().enumerate().filter(|(_, o)| **o == Some(player)).map(|(j, _)| j))
    }

    pub fn bundles(&self, players: usize) -> Vec<Bundle> {
        let mut out = vec![Bundle::EMPTY; players];
        for (j, o) in self.owners.iter().enumerate() {
            if let Some(i) = o {
                out[*i] = out[*i].with(j);
            }
        }
        out
    }

    pub fn allocated(&self) -> Bundle {
        Bundle::from_items(self.owners.iter().enumerate().filter(|(_, o)| o.is_some()).map(|(j, _)| j))
    }

    pub fn unallocated(&self) -> Bundle {
        self.allocated().complement(self.item_count())
    }

    pub fn is_complete(&self) -> bool {
        self.owners.iter().all(Option::is_some)
    }

    /// Checks owners against `players` and the item count against `m`.
    pub fn validate(&self, players: usize, m: usize) -> Result<()> {
        if self.owners.len() != m {
            return Err(Error::ItemCountMismatch { expected: m, found: self.owners.len() });
        }
        match self.owners.iter().flatten().find(|&&i| i >= players) {
            Some(i) => Err(Error::Domain(format!("owner {i} out of range for {players} players"))),
            None => Ok(()),
        }
    }

    /// All `(n+1)^m` allocations, including partial ones, in ascending order of
    /// owner arrays ("unallocated" precedes player 0).
    pub fn enumerate(players: usize, m: usize) -> impl Iterator<Item = Allocation> {
        Self::odometer(players, m, true)
    }

    /// All `n^m` allocations that give away every item.
    pub fn enumerate_complete(players: usize, m: usize) -> impl Iterator<Item = Allocation> {
        Self::odometer(players, m, false)
    }

    fn odometer(players: usize, m: usize, partial: bool) -> impl Iterator<Item = Allocation> {
        let base = players + usize::from(partial);
        let mut digits = if base == 0 && m > 0 { None } else { Some(vec![0usize; m]) };
        std::iter::from_fn(move || {
            let cur = digits.clone()?;
            let mut k = m;
            loop {
                let d = digits.as_mut().expect("checked above");
                if k == 0 {
                    digits = None;
                    break;
                }
                k -= 1;
                d[k] += 1;
                if d[k] < base {
                    break;
                }
                d[k] = 0;
            }
            let owners =
                cur.into_iter().map(|d| if partial { d.checked_sub(1) } else { Some(d) }).collect();
            Some(Allocation { owners })
        })
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.owners.iter().flatten().max().map_or(0, |i| i + 1);
        f.write_str("(")?;
        for (i, b) in self.bundles(n).iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Allocation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.owners.iter().map(|o| o.map_or(-1, |i| i as i64)))
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<i64>::deserialize(deserializer)?;
        let owners = raw
            .into_iter()
            .map(|o| match o {
                -1 => Ok(None),
                i if i >= 0 => Ok(Some(i as usize)),
                i => Err(serde::de::Error::custom(format!("owner index {i} is neither -1 nor a player"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Allocation::new(owners).map_err(serde::de::Error::custom)
    }
}

/// Nonnegative per-item prices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PriceVector(Vec<Rational>);

impl PriceVector {
    pub fn new(prices: Vec<Rational>) -> Result<Self> {
        match prices.iter().position(Rational::is_negative) {
            Some(j) => Err(Error::Domain(format!("price of item {j} is negative ({})", prices[j]))),
            None => Ok(PriceVector(prices)),
        }
    }

    pub fn zeros(m: usize) -> Self {
        PriceVector(vec![Rational::zero(); m])
    }

    pub fn item_count(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, item: usize) -> &Rational {
        &self.0[item]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.0
    }

    /// `p(T)`.
    pub fn total(&self, bundle: Bundle) -> Rational {
        bundle.items().map(|j| &self.0[j]).sum()
    }

    /// `p(T)` for every `T ⊆ 0..m`, indexed by bitmask.
    pub fn totals_table(&self) -> Vec<Rational> {
        let m = self.0.len();
        let mut out = Vec::with_capacity(1 << m);
        out.push(Rational::zero());
        for b in 1u32..1 << m {
            let low = b.trailing_zeros() as usize;
            let rest = out[(b & (b - 1)) as usize].clone();
            out.push(rest + &self.0[low]);
        }
        out
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &PriceVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl<'de> Deserialize<'de> for PriceVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        PriceVector::new(Vec::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PriceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, p) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn enumeration_counts() {
        assert_eq!(Allocation::enumerate(2, 3).count(), 27);
        assert_eq!(Allocation::enumerate_complete(2, 3).count(), 8);
        assert_eq!(Allocation::enumerate(3, 0).count(), 1);
        let all: Vec<_> = Allocation::enumerate(1, 2).collect();
        assert_eq!(all[0], Allocation::empty(2));
        assert_eq!(all[1].owners(), &[None, Some(0)]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let distinct: std::collections::BTreeSet<_> = Allocation::enumerate(2, 4).collect();
        assert_eq!(distinct.len(), 81);
    }

    #[test]
    fn bundles_and_json() {
        let a = Allocation::from_bundles(4, &[Bundle::from_items([0, 1]), Bundle::from_items([3])]).unwrap();
        assert_eq!(a.bundle(0), Bundle::from_items([0, 1]));
        assert_eq!(a.unallocated(), Bundle::singleton(2));
        assert_eq!(serde_json::to_string(&a).unwrap(), "[0,0,-1,1]");
        let back: Allocation = serde_json::from_str("[0,0,-1,1]").unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Allocation>("[0,-2]").is_err());
        assert!(Allocation::from_bundles(2, &[Bundle::singleton(0), Bundle::singleton(0)]).is_err());
        assert!(a.validate(1, 4).is_err());
        assert!(a.validate(2, 3).is_err());
    }

    #[test]
    fn prices_reject_negative_entries() {
        assert!(PriceVector::new(vec![q(1, 1), q(-1, 3)]).is_err());
        assert!(serde_json::from_str::<PriceVector>(r#"["1/2","-1"]"#).is_err());
        let p: PriceVector = serde_json::from_str(r#"["1/2","1"]"#).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"["1/2","1/1"]"#);
        let totals = p.totals_table();
        assert_eq!(totals[3], q(3, 2));
        assert_eq!(p.total(Bundle::singleton(1)), q(1, 1));
    }
}
