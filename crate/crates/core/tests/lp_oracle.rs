//! The configuration LP checked against brute-force vertex enumeration.
//!
//! Every basis of `[A | I] z = 1` is tried; the nonsingular, nonnegative
//! ones are the vertices. Only usable for a handful of rows and columns.

use endowed::instances::{gen_random_subadditive, gen_random_submodular, gen_xos_three_items};
use endowed::lp::{min_supporting_alpha, psi, solve_config_lp, FractionalSolution, SupportingAlpha};
use endowed::rational::q;
use endowed::{Allocation, Bundle, Instance, Rational};

struct Columns {
    // (player, bundle) per structural column.
    labels: Vec<(usize, Bundle)>,
    rows: usize,
    dense: Vec<Vec<Rational>>,
}

fn columns(inst: &Instance) -> Columns {
    let m = inst.item_count();
    let n = inst.player_count();
    let rows = m + n;
    let mut labels = Vec::new();
    let mut dense = Vec::new();
    for i in 0..n {
        for s in Bundle::all(m) {
            let mut col = vec![Rational::zero(); rows];
            for j in s.items() {
                col[j] = Rational::one();
            }
            col[m + i] = Rational::one();
            labels.push((i, s));
            dense.push(col);
        }
    }
    for r in 0..rows {
        let mut col = vec![Rational::zero(); rows];
        col[r] = Rational::one();
        dense.push(col);
    }
    Columns { labels, rows, dense }
}

/// Solves `B z = 1` for the chosen columns, or `None` when singular.
fn solve_basis(cols: &Columns, basis: &[usize]) -> Option<Vec<Rational>> {
    let r = cols.rows;
    let mut mat: Vec<Vec<Rational>> =
        (0..r).map(|row| basis.iter().map(|&c| cols.dense[c][row].clone()).chain([Rational::one()]).collect()).collect();
    for k in 0..r {
        let pivot = (k..r).find(|&row| !mat[row][k].is_zero())?;
        mat.swap(k, pivot);
        let inv = mat[k][k].recip().unwrap();
        for x in mat[k].iter_mut() {
            *x = &*x * &inv;
        }
        for row in 0..r {
            if row != k && !mat[row][k].is_zero() {
                let f = mat[row][k].clone();
                for c in 0..=r {
                    let d = &f * &mat[k][c];
                    mat[row][c] -= d;
                }
            }
        }
    }
    Some(mat.into_iter().map(|row| row[r].clone()).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for c in start..=n - (k - cur.len()) {
            cur.push(c);
            go(c + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::new(), f)
}

/// All distinct vertices of the configuration polytope, as fractional solutions.
fn vertices(inst: &Instance) -> Vec<FractionalSolution> {
    let cols = columns(inst);
    let structural = cols.labels.len();
    let mut out: Vec<FractionalSolution> = Vec::new();
    combinations(cols.dense.len(), cols.rows, &mut |basis| {
        let Some(z) = solve_basis(&cols, basis) else { return };
        if z.iter().any(Rational::is_negative) {
            return;
        }
        let weights = basis
            .iter()
            .zip(z)
            .filter(|(&c, _)| c < structural)
            .map(|(&c, x)| (cols.labels[c], x));
        let x = FractionalSolution::from_weights(inst, weights).expect("a basic feasible solution is feasible");
        if !out.contains(&x) {
            out.push(x);
        }
    });
    out
}

fn best_vertex(vs: &[FractionalSolution]) -> Rational {
    vs.iter().map(|x| x.objective().clone()).max().unwrap()
}

fn check_supporting_alpha_inequality(inst: &Instance, vs: &[FractionalSolution]) {
    let n = inst.player_count();
    for a in Allocation::enumerate(n, inst.item_count()) {
        let SupportingAlpha::Supported { alpha, .. } = min_supporting_alpha(inst, &a).unwrap() else { continue };
        let w = endowed::equilibrium::welfare(inst, &a).unwrap();
        for x in vs {
            let rhs = x.objective() + (&alpha - Rational::one()) * psi(inst, &a, x).unwrap();
            assert!(&alpha * &w >= rhs, "{a:?} at {alpha} against {x:?}");
        }
    }
}

#[test]
fn xos_lp_value_is_the_best_vertex() {
    let inst = gen_xos_three_items(&q(2, 1)).unwrap();
    let vs = vertices(&inst);
    assert_eq!(*solve_config_lp(&inst).unwrap().objective(), best_vertex(&vs));
    check_supporting_alpha_inequality(&inst, &vs);
}

#[test]
fn random_lp_values_are_the_best_vertex() {
    for seed in 0..24u64 {
        let (n, m) = (1 + (seed as usize % 2), 1 + (seed as usize / 2) % 3);
        let inst = if seed % 4 < 2 {
            gen_random_submodular(seed, n, m).unwrap()
        } else {
            gen_random_subadditive(seed, n, m).unwrap()
        };
        let vs = vertices(&inst);
        assert_eq!(*solve_config_lp(&inst).unwrap().objective(), best_vertex(&vs), "seed {seed}");
        check_supporting_alpha_inequality(&inst, &vs);
    }
}

#[test]
fn unit_square_has_the_expected_vertices() {
    // One player, one item: x_{∅} and x_{1} with both rows at most 1.
    let inst = gen_random_submodular(0, 1, 1).unwrap();
    let vs = vertices(&inst);
    assert!(vs.iter().any(|x| x.iter().next().is_none()));
    assert!(vs.iter().any(|x| x.weight(0, Bundle::singleton(0)) == Rational::one()));
}
