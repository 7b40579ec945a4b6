use std::fmt::Write as _;

use serde::Serialize;

use super::alpha::min_alpha_tables;
use super::{allocation_count, check_lp_size, integral_opt_tables, psi, solve_config_lp, FractionalSolution, SupportingAlpha};
use crate::bundle::Bundle;
use crate::equilibrium::{is_maximal, Allocation, Instance};
use crate::error::{ensure_size, Error, Result};
use crate::rational::Rational;

/// Cap on `(n+1)^m` for the per-instance gap sweep.
pub const MAX_GAP_ALLOCATIONS: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AllocationGap {
    pub allocation: Allocation,
    pub welfare: Rational,
    /// `psi` against the reported optimal fractional solution.
    pub psi: Rational,
    pub maximal: bool,
    pub min_alpha: SupportingAlpha,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InstanceGap {
    /// Attained by the first allocation (in enumeration order) with the smallest intensity.
    Finite { alpha: Rational, allocation: Allocation },
    Unbounded,
}

impl InstanceGap {
    pub fn alpha(&self) -> Option<&Rational> {
        match self {
            InstanceGap::Finite { alpha, .. } => Some(alpha),
            InstanceGap::Unbounded => None,
        }
    }

    /// `self > x`, with an unbounded gap exceeding everything.
    pub fn exceeds(&self, x: &Rational) -> bool {
        self.alpha().is_none_or(|a| a > x)
    }

    pub fn at_least(&self, x: &Rational) -> bool {
        self.alpha().is_none_or(|a| a >= x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub lp_value: Rational,
    pub integral_opt: Rational,
    /// `lp_value / integral_opt`, taken as 1 when both are 0.
    pub integrality_gap: Rational,
    pub optimal_allocation: Allocation,
    pub fractional_solution: FractionalSolution,
    pub allocations: Vec<AllocationGap>,
    pub endowment_gap: InstanceGap,
}

impl GapReport {
    pub fn entry(&self, a: &Allocation) -> Option<&AllocationGap> {
        self.allocations.iter().find(|e| &e.allocation == a)
    }

    /// Plain-text summary followed by one row per allocation.
    pub fn to_table(&self, players: usize) -> String {
        let mut out = String::new();
        let gap = match &self.endowment_gap {
            InstanceGap::Finite { alpha, allocation } => format!("{alpha} at {}", show(allocation, players)),
            InstanceGap::Unbounded => "unbounded".to_string(),
        };
        let _ = writeln!(out, "lp value          {}", self.lp_value);
        let _ = writeln!(out, "integral optimum  {}", self.integral_opt);
        let _ = writeln!(out, "integrality gap   {}", self.integrality_gap);
        let _ = writeln!(out, "endowment gap     {gap}");
        let _ = writeln!(out);
        let rows: Vec<[String; 4]> = self
            .allocations
            .iter()
            .map(|e| {
                let alpha = match (&e.min_alpha, e.maximal) {
                    (SupportingAlpha::Supported { alpha, attained: true, .. }, _) => alpha.to_string(),
                    (SupportingAlpha::Supported { alpha, .. }, _) => format!("{alpha} (infimum)"),
                    (SupportingAlpha::Unsupportable, false) => "unsupportable (not maximal)".to_string(),
                    (SupportingAlpha::Unsupportable, true) => "unsupportable".to_string(),
                };
                [show(&e.allocation, players), e.welfare.to_string(), e.psi.to_string(), alpha]
            })
            .collect();
        let header = ["allocation", "welfare", "psi", "min alpha"].map(String::from);
        let widths: Vec<usize> =
            (0..4).map(|c| rows.iter().chain([&header]).map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        for row in [&header].into_iter().chain(&rows) {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

fn show(a: &Allocation, players: usize) -> String {
    let parts: Vec<String> = a.bundles(players).iter().map(Bundle::to_string).collect();
    format!("({})", parts.join(", "))
}

pub(crate) fn ratio_or_one(num: &Rational, den: &Rational) -> Rational {
    if den.is_zero() {
        Rational::one()
    } else {
        num / den
    }
}

/// Minimal supporting intensity of every allocation, and their minimum.
///
/// Non-maximal allocations are reported unsupportable without solving an LP.
pub fn endowment_gap_instance(inst: &Instance) -> Result<GapReport> {
    let n = inst.player_count();
    let m = inst.item_count();
    check_lp_size(m)?;
    ensure_size("allocations for endowment gap", allocation_count(n, m), MAX_GAP_ALLOCATIONS)?;
    let tables = inst.value_tables();
    let x = solve_config_lp(inst)?;
    let (integral_opt, optimal_allocation) = integral_opt_tables(&tables, m);
    let mut allocations = Vec::new();
    let mut best: Option<(Rational, Allocation)> = None;
    for a in Allocation::enumerate(n, m) {
        let maximal = is_maximal(inst, &a)?;
        let min_alpha =
            if maximal { min_alpha_tables(&tables, m, &a)? } else { SupportingAlpha::Unsupportable };
        if let Some(alpha) = min_alpha.alpha() {
            if best.as_ref().is_none_or(|(b, _)| alpha < b) {
                best = Some((alpha.clone(), a.clone()));
            }
        }
        let welfare = a.bundles(n).iter().zip(&tables).map(|(s, t)| t[s.bits() as usize].clone()).sum();
        allocations.push(AllocationGap { psi: psi(inst, &a, &x)?, allocation: a, welfare, maximal, min_alpha });
    }
    let endowment_gap = match best {
        Some((alpha, allocation)) => InstanceGap::Finite { alpha, allocation },
        None => InstanceGap::Unbounded,
    };
    Ok(GapReport {
        lp_value: x.objective().clone(),
        integrality_gap: ratio_or_one(x.objective(), &integral_opt),
        integral_opt,
        optimal_allocation,
        fractional_solution: x,
        allocations,
        endowment_gap,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerturbationReport {
    /// Integrality gap of the input instance.
    pub y: Rational,
    pub delta: Rational,
    /// Per-item bonus `delta * LP / m`.
    pub epsilon: Rational,
    /// `y (1 + delta) / (1 + delta y)`.
    pub x: Rational,
    pub perturbed_integrality_gap: Rational,
    pub perturbed_endowment_gap: InstanceGap,
    /// `1 / (2 - x)`.
    pub lower_bound: Rational,
    pub gap_matches_formula: bool,
    pub endowment_gap_exceeds_x: bool,
    pub endowment_gap_meets_lower_bound: bool,
}

impl PerturbationReport {
    pub fn holds(&self) -> bool {
        self.gap_matches_formula && self.endowment_gap_exceeds_x && self.endowment_gap_meets_lower_bound
    }
}

/// Adds `delta * LP / m` per item to both players of a two-player subadditive
/// instance with integrality gap `y > 1`, then checks the new integrality gap
/// against `y (1 + delta) / (1 + delta y)` and its endowment gap against that
/// value and `1 / (2 - x)`.
pub fn perturbation_gap_check(inst: &Instance, delta: &Rational) -> Result<PerturbationReport> {
    let m = inst.item_count();
    if inst.player_count() != 2 {
        return Err(Error::Precondition(format!("needs exactly 2 players, got {}", inst.player_count())));
    }
    if m == 0 {
        return Err(Error::Precondition("needs at least one item".into()));
    }
    if !delta.is_positive() {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    for (i, v) in inst.players().iter().enumerate() {
        if let Some(w) = v.is_subadditive()?.violation() {
            return Err(Error::Precondition(format!("player {i} is not subadditive: {w}")));
        }
    }
    let lp = solve_config_lp(inst)?;
    let (opt, _) = integral_opt_tables(&inst.value_tables(), m);
    let y = ratio_or_one(lp.objective(), &opt);
    if y <= Rational::one() {
        return Err(Error::Precondition("instance has no integrality gap (y = 1)".into()));
    }
    let one = Rational::one();
    let epsilon = delta * lp.objective() / Rational::from(m);
    let players = inst.players().iter().map(|v| v.perturb(epsilon.clone())).collect::<Result<Vec<_>>>()?;
    let perturbed = Instance::new(m, players, inst.label().map(|l| format!("{l}+perturbed")))?;
    let x = &y * (&one + delta) / (&one + delta * &y);
    let report = endowment_gap_instance(&perturbed)?;
    let lower_bound = (Rational::from_integer(2) - &x)
        .recip()
        .ok_or_else(|| Error::Invariant("perturbed integrality gap reached 2".into()))?;
    Ok(PerturbationReport {
        gap_matches_formula: report.integrality_gap == x,
        endowment_gap_exceeds_x: report.endowment_gap.exceeds(&x),
        endowment_gap_meets_lower_bound: report.endowment_gap.at_least(&lower_bound),
        perturbed_integrality_gap: report.integrality_gap,
        perturbed_endowment_gap: report.endowment_gap,
        y,
        delta: delta.clone(),
        epsilon,
        x,
        lower_bound,
    })
}
