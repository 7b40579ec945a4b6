//! Deterministic generators for the named instances, plus seeded random
//! generators used by the property tests and the CLI.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;
use crate::equilibrium::{Allocation, Instance, PriceVector};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuations::{Valuation, WeightedGraph};

/// Item cap for the random generators.
pub const MAX_RANDOM_ITEMS: usize = 8;
/// Odd-graph families are tabulated explicitly.
pub const MAX_ODD_GRAPH_ITEMS: usize = 15;
/// Regeneration attempts before a random generator gives up.
pub const RANDOM_RETRIES: usize = 32;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn invariant(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(format!("generator check failed: {what}")))
    }
}

/// Two submodular players on items a, b, c, d (indices 0..4). Singletons are
/// worth 1, bundles of three or more are worth 2, pairs follow the table.
pub fn gen_feige_vondrak() -> Instance {
    let pair = |alice: bool, s: Bundle| -> Rational {
        let [a, b, c, d] = [0, 1, 2, 3].map(|j| s.contains(j));
        match (a, b, c, d) {
            (true, true, _, _) | (_, _, true, true) => {
                if alice {
                    int(2)
                } else {
                    r(4, 3)
                }
            }
            (true, _, true, _) | (_, true, _, true) => {
                if alice {
                    r(4, 3)
                } else {
                    int(2)
                }
            }
            _ => r(5, 3),
        }
    };
    let table = |alice: bool| {
        move |s: Bundle| match s.len() {
            0 => Rational::zero(),
            1 => Rational::one(),
            2 => pair(alice, s),
            _ => int(2),
        }
    };
    let alice = Valuation::explicit_from_fn(4, table(true)).expect("fixed table is monotone");
    let bob = Valuation::explicit_from_fn(4, table(false)).expect("fixed table is monotone");
    Instance::new(4, vec![alice, bob], Some("feige-vondrak".into())).expect("fixed instance")
}

/// Two identical XOS players on three identical items, built from the clause
/// list: `(x_j = 1)` per item, `(1/2 + 1/(24 a^2))` on each pair, and
/// `(1/2, 1/2, 1/(3a))`.
pub fn gen_xos_three_items(alpha: &Rational) -> Result<Instance> {
    if *alpha <= Rational::one() {
        return Err(Error::Domain(format!("alpha must exceed 1, got {alpha}")));
    }
    let a2 = alpha * alpha;
    let half = r(1, 2);
    let pair_share = &half + (int(24) * &a2).recip().expect("alpha > 1");
    let third = (int(3) * alpha).recip().expect("alpha > 1");
    let mut clauses = Vec::new();
    for j in 0..3 {
        let mut c = vec![Rational::zero(); 3];
        c[j] = Rational::one();
        clauses.push(c);
    }
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        let mut c = vec![Rational::zero(); 3];
        c[j] = pair_share.clone();
        c[k] = pair_share.clone();
        clauses.push(c);
    }
    clauses.push(vec![half.clone(), half, third.clone()]);
    let v = Valuation::xos(3, clauses)?;

    let by_size = [
        Rational::zero(),
        Rational::one(),
        Rational::one() + (int(12) * &a2).recip().expect("alpha > 1"),
        Rational::one() + third,
    ];
    invariant(Bundle::all(3).all(|s| v.value(s) == by_size[s.len()]), "XOS values depend only on size")?;
    Instance::new(3, vec![v.clone(), v], Some(format!("xos-three-items(alpha={alpha})")))
}

/// Players a1, a2, b1, b2 over items x1, x2, y1, y2, c (indices 0..5).
pub fn gen_budget_additive(epsilon: &Rational) -> Result<Instance> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let row = |v: [i64; 5]| v.map(int).to_vec();
    let b = int(2) + epsilon;
    let players = vec![
        Valuation::budget_additive(row([1, 1, 0, 0, 0]), Rational::one())?,
        Valuation::budget_additive(row([0, 0, 1, 1, 0]), Rational::one())?,
        Valuation::budget_additive(row([1, 1, 0, 0, 2]), b.clone())?,
        Valuation::budget_additive(row([0, 0, 1, 1, 2]), b)?,
    ];
    Instance::new(5, players, Some(format!("budget-additive(epsilon={epsilon})")))
}

/// Layout of the tightness instance: `X = 0..k`, `Y = k..2k`, `c = 2k`;
/// players a1, a2, b1, b2 are 0..4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tightness {
    pub k: usize,
}

impl Tightness {
    pub const A1: usize = 0;
    pub const A2: usize = 1;
    pub const B1: usize = 2;
    pub const B2: usize = 3;

    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {k}")));
        }
        if 2 * k + 1 > crate::bundle::MAX_ITEMS {
            return Err(Error::SizeCap {
                what: "tightness items",
                actual: (2 * k + 1) as u128,
                limit: crate::bundle::MAX_ITEMS as u128,
            });
        }
        Ok(Tightness { k })
    }

    pub fn item_count(&self) -> usize {
        2 * self.k + 1
    }

    pub fn x(&self) -> Bundle {
        Bundle::from_items(0..self.k)
    }

    pub fn y(&self) -> Bundle {
        Bundle::from_items(self.k..2 * self.k)
    }

    pub fn c(&self) -> usize {
        2 * self.k
    }

    /// `1/k^2`.
    pub fn epsilon(&self) -> Rational {
        let k = self.k as i64;
        r(1, k * k)
    }

    pub fn instance(&self) -> Result<Instance> {
        let (k, m) = (self.k as i64, self.item_count());
        let eps = self.epsilon();
        invariant(eps < r(1, k), "epsilon below 1/k")?;
        let on = |set: Bundle, val: Rational| -> Vec<Rational> {
            (0..m).map(|j| if set.contains(j) { val.clone() } else { Rational::zero() }).collect()
        };
        let b = |set: Bundle| -> Result<Valuation> {
            let mut values = on(set, r(1, k));
            values[self.c()] = Rational::one();
            Valuation::budget_additive(values, Rational::one())?.perturb(eps.clone())
        };
        let players = vec![
            Valuation::unit_demand(on(self.x(), r(1, k)))?,
            Valuation::unit_demand(on(self.y(), r(1, k)))?,
            b(self.x())?,
            b(self.y())?,
        ];
        Instance::new(m, players, Some(format!("local-opt-tightness(k={k})")))
    }

    /// The local optimum: a1 gets `x_1`, b1 the rest of `X` and `c`, b2 all of `Y`.
    pub fn local_optimum(&self) -> Allocation {
        let mut owners = vec![None; self.item_count()];
        owners[0] = Some(Self::A1);
        for o in &mut owners[1..self.k] {
            *o = Some(Self::B1);
        }
        owners[self.c()] = Some(Self::B1);
        for j in self.y().items() {
            owners[j] = Some(Self::B2);
        }
        Allocation::new(owners).expect("within item cap")
    }

    /// Lower bound on the local optimum's supporting intensity:
    /// `(2 + e) / (1 + k e + 1/k + e)`.
    pub fn bound(&self) -> Rational {
        let eps = self.epsilon();
        let k = int(self.k as i64);
        (int(2) + &eps) / (Rational::one() + &k * &eps + k.recip().expect("k >= 2") + &eps)
    }

    /// Same as the local optimum except that a2 takes `y_1` from b2.
    pub fn alternative(&self) -> Allocation {
        let mut a = self.local_optimum();
        a.set_owner(self.k, Some(Self::A2));
        a
    }

    /// `3/2 + e`.
    pub fn alternative_alpha(&self) -> Rational {
        r(3, 2) + self.epsilon()
    }

    /// `p_c = 1/k + e`, `p_x = e`, `p_y = 1/(2k) + e` off `y_1`, `p_{y_1} = 1/k + e`.
    pub fn alternative_prices(&self) -> PriceVector {
        let (k, eps) = (self.k as i64, self.epsilon());
        let prices = (0..self.item_count())
            .map(|j| {
                if j == self.c() || j == self.k {
                    r(1, k) + &eps
                } else if j < self.k {
                    eps.clone()
                } else {
                    r(1, 2 * k) + &eps
                }
            })
            .collect();
        PriceVector::new(prices).expect("nonnegative")
    }
}

/// Four submodular players on `2k + 1` items, `e = 1/k^2`. See [`Tightness`].
pub fn gen_local_opt_tightness(k: usize) -> Result<Instance> {
    Tightness::new(k)?.instance()
}

/// `n` identical unit-demand players on `n` items, every item worth 1.
pub fn gen_unit_demand_identical(n: usize) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let v = Valuation::unit_demand(vec![Rational::one(); n])?;
    Instance::new(n, vec![v; n], Some(format!("unit-demand-identical(n={n})")))
}

/// Two identical players valuing a vertex set by the weight of the edges it touches.
pub fn gen_maxcut_reduction(graph: &WeightedGraph) -> Result<Instance> {
    let m = graph.vertices();
    if m > crate::valuations::MAX_CHECK_ITEMS {
        return Err(Error::SizeCap {
            what: "max-cut vertices",
            actual: m as u128,
            limit: crate::valuations::MAX_CHECK_ITEMS as u128,
        });
    }
    let v = Valuation::graph_cut(graph.clone())?;
    Instance::new(m, vec![v.clone(), v], Some("maxcut".into()))
}

/// Labels keyed by `(k+1)`-subsets of `0..2k+1`. Missing keys read as 0.
pub type OddGraphLabels = BTreeMap<Bundle, Rational>;

fn odd_graph_items(k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let m = 2 * k + 1;
    if m > MAX_ODD_GRAPH_ITEMS {
        return Err(Error::SizeCap { what: "odd-graph items", actual: m as u128, limit: MAX_ODD_GRAPH_ITEMS as u128 });
    }
    Ok(m)
}

fn check_labels(k: usize, labels: &OddGraphLabels, upper: &Rational, closed: bool) -> Result<()> {
    let m = 2 * k + 1;
    for (s, c) in labels {
        s.validate(m)?;
        if s.len() != k + 1 {
            return Err(Error::Domain(format!("label key {s} is not a {}-subset", k + 1)));
        }
        let above = if closed { c > upper } else { c >= upper };
        if c.is_negative() || above {
            let close = if closed { "]" } else { ")" };
            return Err(Error::Domain(format!("label {c} of {s} outside [0, {upper}{close}")));
        }
    }
    Ok(())
}

fn label(labels: &OddGraphLabels, s: Bundle) -> Rational {
    labels.get(&s).cloned().unwrap_or_default()
}

/// Two identical players sharing one label map:
/// `|S|` up to size `k`, `k + 1/2 + c_S` at size `k+1`, `k+1` above.
pub fn gen_odd_graph_family(k: usize, labels: &OddGraphLabels) -> Result<Instance> {
    let m = odd_graph_items(k)?;
    check_labels(k, labels, &r(1, 2), false)?;
    let ki = k as i64;
    let v = Valuation::explicit_from_fn(m, |s| match s.len() {
        n if n <= k => int(n as i64),
        n if n == k + 1 => int(ki) + r(1, 2) + label(labels, s),
        _ => int(ki + 1),
    })?;
    Instance::new(m, vec![v.clone(), v], Some(format!("odd-graph(k={k})")))
}

/// Two players with their own label maps, each bounded by 1/4:
/// `|S|` below size `k`, `k - 1/2 + c_{M-S}` at size `k`,
/// `k - 1/4 + c_S` at size `k+1`, `k` above.
///
/// Labels in `[0, 1/4]` keep the valuations monotone but not always
/// submodular: they are submodular exactly when `c_{S+j} + c_{S+j'} >= c_{M-S}`
/// for every `k`-set `S` and distinct `j, j'` outside it. Labels in
/// `[1/8, 1/4]` satisfy this.
/// Submodularity is not enforced here.
pub fn gen_odd_graph_communication(k: usize, alice: &OddGraphLabels, bob: &OddGraphLabels) -> Result<Instance> {
    let m = odd_graph_items(k)?;
    let quarter = r(1, 4);
    check_labels(k, alice, &quarter, true)?;
    check_labels(k, bob, &quarter, true)?;
    let ki = k as i64;
    let full = Bundle::full(m);
    let player = |labels: &OddGraphLabels| {
        Valuation::explicit_from_fn(m, |s| match s.len() {
            n if n < k => int(n as i64),
            n if n == k => int(ki - 1) + r(1, 2) + label(labels, full.difference(s)),
            n if n == k + 1 => int(ki - 1) + r(3, 4) + label(labels, s),
            _ => int(ki),
        })
    };
    Instance::new(m, vec![player(alice)?, player(bob)?], Some(format!("odd-graph-communication(k={k})")))
}

/// Vertices of the odd graph (the `(k+1)`-subsets of `0..2k+1`) in ascending bitmask order.
pub fn odd_graph_vertices(k: usize) -> Vec<Bundle> {
    Bundle::all(2 * k + 1).filter(|s| s.len() == k + 1).collect()
}

/// Neighbours of `S`: the sets `(M - S) + j` for `j` in `S`.
pub fn odd_graph_neighbours(k: usize, s: Bundle) -> Vec<Bundle> {
    let rest = s.complement(2 * k + 1);
    s.items().map(|j| rest.with(j)).collect()
}

/// Vertices whose label is at least every neighbour's label.
pub fn odd_graph_local_maxima(k: usize, labels: impl Fn(Bundle) -> Rational) -> Vec<Bundle> {
    odd_graph_vertices(k)
        .into_iter()
        .filter(|&s| {
            let c = labels(s);
            odd_graph_neighbours(k, s).into_iter().all(|t| labels(t) <= c)
        })
        .collect()
}

/// Random labels on a grid of 64 steps in `[lo, hi)`, one per odd-graph vertex.
pub fn random_odd_graph_labels(k: usize, seed: u64, lo: &Rational, hi: &Rational) -> Result<OddGraphLabels> {
    odd_graph_items(k)?;
    if lo.is_negative() || lo >= hi {
        return Err(Error::Domain(format!("label range [{lo}, {hi}) is empty or negative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const STEPS: i64 = 64;
    let width = hi - lo;
    Ok(odd_graph_vertices(k).into_iter().map(|s| (s, lo + &width * r(rng.gen_range(0..STEPS), STEPS))).collect())
}

/// Three items, value depends on size only. Player 1 values every nonempty
/// bundle at 1, player 2 at 1/2. Singletons take the pair value.
pub fn gen_example_opt_not_supported() -> Instance {
    let flat = |x: Rational| Valuation::explicit_from_fn(3, move |s| if s.is_empty() { Rational::zero() } else { x.clone() });
    let eps = r(1, 2);
    let players = vec![flat(Rational::one()).expect("flat"), flat(eps).expect("flat")];
    Instance::new(3, players, Some("opt-not-supported".into())).expect("fixed instance")
}

fn check_random_size(n: usize, m: usize) -> Result<()> {
    if m > MAX_RANDOM_ITEMS {
        return Err(Error::SizeCap { what: "random instance items", actual: m as u128, limit: MAX_RANDOM_ITEMS as u128 });
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(())
}

fn retry(what: &str, mut attempt: impl FnMut() -> Result<Option<Instance>>) -> Result<Instance> {
    for _ in 0..RANDOM_RETRIES {
        if let Some(inst) = attempt()? {
            return Ok(inst);
        }
    }
    Err(Error::InvalidValuation(format!("{what}: no valid instance after {RANDOM_RETRIES} attempts")))
}

/// Coverage functions: each item covers a random subset of a weighted universe.
pub fn gen_random_submodular(seed: u64, n: usize, m: usize) -> Result<Instance> {
    check_random_size(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    retry("random submodular", || {
        let mut players = Vec::with_capacity(n);
        for _ in 0..n {
            let universe = rng.gen_range(2..=m + 2);
            let weights: Vec<i64> = (0..universe).map(|_| rng.gen_range(1..=4)).collect();
            let covers: Vec<u32> = (0..m).map(|_| rng.gen_range(0..1u32 << universe)).collect();
            let v = Valuation::explicit_from_fn(m, |s| {
                let covered = s.items().fold(0u32, |acc, j| acc | covers[j]);
                int((0..universe).filter(|e| covered >> e & 1 == 1).map(|e| weights[e]).sum())
            })?;
            if v.is_submodular()?.violation().is_some() {
                return Ok(None);
            }
            players.push(v);
        }
        Ok(Some(Instance::new(m, players, Some(format!("random-submodular(seed={seed})")))?))
    })
}

/// `min(cap, max of additive clauses)` plus an optional flat bonus on every
/// nonempty bundle.
pub fn gen_random_subadditive(seed: u64, n: usize, m: usize) -> Result<Instance> {
    check_random_size(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    retry("random subadditive", || {
        let mut players = Vec::with_capacity(n);
        for _ in 0..n {
            let clauses: Vec<Vec<i64>> =
                (0..rng.gen_range(1..=3)).map(|_| (0..m).map(|_| rng.gen_range(0..=3)).collect()).collect();
            let top = clauses.iter().map(|c| c.iter().sum::<i64>()).max().unwrap_or(0);
            let cap = rng.gen_range(1..=top.max(1));
            let flat = if rng.gen_bool(0.5) { rng.gen_range(0..=2) } else { 0 };
            let v = Valuation::explicit_from_fn(m, |s| {
                if s.is_empty() {
                    return Rational::zero();
                }
                let best = clauses.iter().map(|c| s.items().map(|j| c[j]).sum::<i64>()).max().unwrap_or(0);
                int(best.min(cap) + flat)
            })?;
            if v.is_subadditive()?.violation().is_some() {
                return Ok(None);
            }
            players.push(v);
        }
        Ok(Some(Instance::new(m, players, Some(format!("random-subadditive(seed={seed})")))?))
    })
}

/// Each edge present with probability 1/2, integer weight in `1..=5`.
pub fn gen_random_graph(seed: u64, vertices: usize) -> Result<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::new();
    for u in 0..vertices {
        for v in u + 1..vertices {
            if rng.gen_bool(0.5) {
                triples.push((u, v, int(rng.gen_range(1..=5))));
            }
        }
    }
    WeightedGraph::from_triples(vertices, &triples)
}

/// Generator name plus `key=value` parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Generator names accepted by [`InstanceSpec::resolve`].
pub const GENERATORS: &[&str] = &[
    "feige-vondrak",
    "xos-three-items",
    "budget-additive",
    "local-opt-tightness",
    "unit-demand-identical",
    "maxcut",
    "odd-graph",
    "odd-graph-communication",
    "opt-not-supported",
    "random-submodular",
    "random-subadditive",
];

impl InstanceSpec {
    pub fn new(name: impl Into<String>) -> Self {
        InstanceSpec { name: name.into(), ..Default::default() }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Parses `key=value`.
    pub fn push_param(&mut self, raw: &str) -> Result<()> {
        let (k, v) = raw.split_once('=').ok_or_else(|| Error::Parse(format!("parameter {raw:?} is not key=value")))?;
        self.params.insert(k.trim().to_string(), v.trim().to_string());
        Ok(())
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.params.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|e| Error::Parse(format!("parameter {key}={raw}: {e}"))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!("generator {} takes no parameter {k:?}", self.name))),
            None => Ok(()),
        }
    }

    /// Builds the instance. Random generators use `seed` (default 0).
    pub fn resolve(&self) -> Result<Instance> {
        let seed = self.seed.unwrap_or(0);
        let name = self.name.replace('_', "-");
        match name.as_str() {
            "feige-vondrak" => {
                self.check_keys(&[])?;
                Ok(gen_feige_vondrak())
            }
            "xos-three-items" => {
                self.check_keys(&["alpha"])?;
                gen_xos_three_items(&self.get("alpha", int(2))?)
            }
            "budget-additive" => {
                self.check_keys(&["epsilon"])?;
                gen_budget_additive(&self.get("epsilon", r(1, 100))?)
            }
            "local-opt-tightness" => {
                self.check_keys(&["k"])?;
                gen_local_opt_tightness(self.get("k", 2)?)
            }
            "unit-demand-identical" => {
                self.check_keys(&["n"])?;
                gen_unit_demand_identical(self.get("n", 3)?)
            }
            "maxcut" => {
                self.check_keys(&["vertices"])?;
                gen_maxcut_reduction(&gen_random_graph(seed, self.get("vertices", 5)?)?)
            }
            "odd-graph" => {
                self.check_keys(&["k"])?;
                let k = self.get("k", 2)?;
                gen_odd_graph_family(k, &random_odd_graph_labels(k, seed, &Rational::zero(), &r(1, 2))?)
            }
            "odd-graph-communication" => {
                self.check_keys(&["k"])?;
                let k = self.get("k", 2)?;
                // Labels below 1/8 can break submodularity; see gen_odd_graph_communication.
                let (lo, hi) = (r(1, 8), r(1, 4));
                let alice = random_odd_graph_labels(k, seed, &lo, &hi)?;
                let bob = random_odd_graph_labels(k, seed.wrapping_add(1), &lo, &hi)?;
                gen_odd_graph_communication(k, &alice, &bob)
            }
            "opt-not-supported" => {
                self.check_keys(&[])?;
                Ok(gen_example_opt_not_supported())
            }
            "random-submodular" => {
                self.check_keys(&["n", "m"])?;
                gen_random_submodular(seed, self.get("n", 2)?, self.get("m", 4)?)
            }
            "random-subadditive" => {
                self.check_keys(&["n", "m"])?;
                gen_random_subadditive(seed, self.get("n", 2)?, self.get("m", 4)?)
            }
            other => Err(Error::Parse(format!("unknown generator {other:?}; known: {}", GENERATORS.join(", ")))),
        }
    }
}
