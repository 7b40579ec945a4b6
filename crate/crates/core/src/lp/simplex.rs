//! Dense-tableau primal simplex over exact rationals.
//!
//! Two phases with artificial variables; Bland's rule throughout (lowest
//! entering index with positive reduced cost, ratio ties broken by the lowest
//! basic variable index), so degenerate problems cannot cycle.

use crate::rational::Rational;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs; repeated variables are summed.
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

/// Maximize `objective · x` subject to `constraints` and `x >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { values: Vec<Rational>, objective: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn objective(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { objective, .. } => Some(objective),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: vec![Rational::zero(); num_vars], constraints: Vec::new() }
    }

    pub fn add(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn solve(&self) -> LpOutcome {
        assert_eq!(self.objective.len(), self.num_vars, "objective length must equal num_vars");
        Tableau::build(self).run(&self.objective)
    }
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Kind {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    /// Each row holds `cols` coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    kinds: Vec<Kind>,
    cols: usize,
    num_vars: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let mut kinds = vec![Kind::Original; n];
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(lp.constraints.len());
        let mut basis = Vec::with_capacity(lp.constraints.len());
        // Columns are appended per row, so rows are padded once all are known.
        let mut extras: Vec<Vec<(usize, Rational)>> = Vec::new();
        for c in &lp.constraints {
            let mut dense = vec![Rational::zero(); n];
            for (j, a) in &c.coeffs {
                assert!(*j < n, "constraint references variable {j} of {n}");
                dense[*j] += a;
            }
            let mut rhs = c.rhs.clone();
            let mut rel = c.relation;
            if rhs.is_negative() {
                dense.iter_mut().for_each(|a| *a = -&*a);
                rhs = -rhs;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            let mut extra = Vec::new();
            match rel {
                Relation::Le => {
                    kinds.push(Kind::Slack);
                    extra.push((kinds.len() - 1, Rational::one()));
                    basis.push(kinds.len() - 1);
                }
                Relation::Ge => {
                    kinds.push(Kind::Slack);
                    extra.push((kinds.len() - 1, -Rational::one()));
                    kinds.push(Kind::Artificial);
                    extra.push((kinds.len() - 1, Rational::one()));
                    basis.push(kinds.len() - 1);
                }
                Relation::Eq => {
                    kinds.push(Kind::Artificial);
                    extra.push((kinds.len() - 1, Rational::one()));
                    basis.push(kinds.len() - 1);
                }
            }
            dense.push(rhs);
            rows.push(dense);
            extras.push(extra);
        }
        let cols = kinds.len();
        for (row, extra) in rows.iter_mut().zip(extras) {
            let rhs = row.pop().expect("rhs pushed above");
            row.resize(cols, Rational::zero());
            for (j, a) in extra {
                row[j] = a;
            }
            row.push(rhs);
        }
        Tableau { rows, basis, kinds, cols, num_vars: n }
    }

    fn run(mut self, objective: &[Rational]) -> LpOutcome {
        if self.kinds.contains(&Kind::Artificial) {
            let phase_one: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| if *k == Kind::Artificial { -Rational::one() } else { Rational::zero() })
                .collect();
            let mut z = self.reduced_costs(&phase_one);
            self.optimize(&mut z, |_| true);
            if !z[self.cols].is_zero() {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials();
        }
        let mut costs = objective.to_vec();
        costs.resize(self.cols, Rational::zero());
        let mut z = self.reduced_costs(&costs);
        let kinds = self.kinds.clone();
        if !self.optimize(&mut z, |j| kinds[j] != Kind::Artificial) {
            return LpOutcome::Unbounded;
        }
        let mut values = vec![Rational::zero(); self.num_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.num_vars {
                values[b] = self.rows[r][self.cols].clone();
            }
        }
        let objective_value = values.iter().zip(objective).map(|(x, c)| x * c).sum();
        LpOutcome::Optimal { values, objective: objective_value }
    }

    /// Reduced-cost row for `costs`; its last entry is minus the objective value.
    fn reduced_costs(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut z = costs.to_vec();
        z.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = costs[b].clone();
            if !cb.is_zero() {
                for (zj, a) in z.iter_mut().zip(&self.rows[r]) {
                    if !a.is_zero() {
                        *zj -= &cb * a;
                    }
                }
            }
        }
        z
    }

    /// Pivots until optimal. Returns false on an unbounded direction.
    fn optimize(&mut self, z: &mut [Rational], allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let Some(enter) = (0..self.cols).find(|&j| allowed(j) && z[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = &row[enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter, Some(z));
        }
    }

    fn pivot(&mut self, r: usize, c: usize, z: Option<&mut [Rational]>) {
        let inv = self.rows[r][c].recip().expect("pivot element is nonzero");
        for a in self.rows[r].iter_mut() {
            if !a.is_zero() {
                *a *= &inv;
            }
        }
        let support: Vec<usize> = (0..=self.cols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut [Rational]| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
        };
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r {
                eliminate(row);
            }
        }
        if let Some(z) = z {
            eliminate(z);
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// After a feasible phase one, every basic artificial sits at zero. Pivot
    /// each onto a non-artificial column, or drop its row as redundant.
    fn drive_out_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.kinds[self.basis[r]] != Kind::Artificial {
                r += 1;
                continue;
            }
            match (0..self.cols).find(|&j| self.kinds[j] != Kind::Artificial && !self.rows[r][j].is_zero()) {
                Some(c) => {
                    self.pivot(r, c, None);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }
}
