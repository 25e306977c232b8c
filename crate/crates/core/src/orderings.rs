//! Partial (semi-)orderings on workload vectors and the comparison lemmas
//! built on them.
//!
//! * `u ≺ v`: coordinatewise `u(i) <= v(i)`.
//! * `u ≺_* v`: every tail sum `Σ_{i>=k} u(i)` is at most the matching tail of `v`.
//! * `u ≺_P v`: `u ≺_* v` and `u(l) <= v(l)` for every `l >= P`.
//! * `u ≺_c v`: majorization on `R^S` (equal totals, dominated sorted tails).
//!
//! Tolerances are one-sided: a violation is reported only when
//! `lhs > rhs + tol`.

use std::fmt;

use crate::error::{Error, Result};
use crate::profile::{check_rank, kw_step, pth_step, same_length, sort_raw, Mark, SortedProfile};

/// Which defining inequality a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// `u(i) <= v(i)` at coordinate `index`.
    Coordinate,
    /// Tail sum from `index` to `S`.
    TailSum,
    /// Equality of the totals (majorization only).
    TotalSum,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Coordinate => "coordinate",
            Clause::TailSum => "tail-sum",
            Clause::TotalSum => "total-sum",
        })
    }
}

/// First failing inequality, with one-based index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub clause: Clause,
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderVerdict {
    pub holds: bool,
    pub first_violation: Option<Violation>,
}

impl OrderVerdict {
    pub const HOLDS: OrderVerdict = OrderVerdict {
        holds: true,
        first_violation: None,
    };

    fn fails(clause: Clause, index: usize, lhs: f64, rhs: f64) -> Self {
        OrderVerdict {
            holds: false,
            first_violation: Some(Violation {
                clause,
                index,
                lhs,
                rhs,
            }),
        }
    }
}

/// Tail sums `t[k] = Σ_{i>=k} v(i)`, zero-based, via one backward pass.
pub fn tail_sums(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    let mut acc = 0.0;
    for (k, x) in v.iter().enumerate().rev() {
        acc += x;
        out[k] = acc;
    }
    out
}

/// `u ≺ v`.
pub fn prec(u: &SortedProfile, v: &SortedProfile, tol: f64) -> Result<OrderVerdict> {
    same_length(u.len(), v.len())?;
    Ok(coordinate_verdict(u.as_slice(), v.as_slice(), 0, tol))
}

fn coordinate_verdict(u: &[f64], v: &[f64], from: usize, tol: f64) -> OrderVerdict {
    for i in from..u.len() {
        if u[i] > v[i] + tol {
            return OrderVerdict::fails(Clause::Coordinate, i + 1, u[i], v[i]);
        }
    }
    OrderVerdict::HOLDS
}

fn tail_verdict(u: &[f64], v: &[f64], from: usize, tol: f64) -> OrderVerdict {
    let (tu, tv) = (tail_sums(u), tail_sums(v));
    // Report the deepest tail first: it is the most local disagreement.
    for k in (from..u.len()).rev() {
        if tu[k] > tv[k] + tol {
            return OrderVerdict::fails(Clause::TailSum, k + 1, tu[k], tv[k]);
        }
    }
    OrderVerdict::HOLDS
}

/// `u ≺_* v`.
pub fn prec_star(u: &SortedProfile, v: &SortedProfile, tol: f64) -> Result<OrderVerdict> {
    same_length(u.len(), v.len())?;
    Ok(tail_verdict(u.as_slice(), v.as_slice(), 0, tol))
}

/// `u ≺_P v` with one-based `rank = P`.
pub fn prec_p(u: &SortedProfile, v: &SortedProfile, rank: usize, tol: f64) -> Result<OrderVerdict> {
    prec_p_split(u, v, rank, tol, tol)
}

/// `u ≺_P v` with separate tolerances for the coordinate clause and the
/// tail-sum clause. Coupled trajectories compare coordinates exactly but
/// need a small slack on accumulated sums.
pub fn prec_p_split(
    u: &SortedProfile,
    v: &SortedProfile,
    rank: usize,
    coord_tol: f64,
    sum_tol: f64,
) -> Result<OrderVerdict> {
    same_length(u.len(), v.len())?;
    check_rank(rank, u.len())?;
    let verdict = coordinate_verdict(u.as_slice(), v.as_slice(), rank - 1, coord_tol);
    if !verdict.holds {
        return Ok(verdict);
    }
    Ok(tail_verdict(u.as_slice(), v.as_slice(), 0, sum_tol))
}

/// Majorization `u ≺_c v` on `R^S`; entries may be negative and unsorted.
pub fn schur_convex_leq(u: &[f64], v: &[f64], tol: f64) -> Result<OrderVerdict> {
    same_length(u.len(), v.len())?;
    let (su, sv) = (sort_raw(u)?, sort_raw(v)?);
    let (tu, tv) = (tail_sums(&su), tail_sums(&sv));
    if (tu[0] - tv[0]).abs() > tol {
        return Ok(OrderVerdict::fails(Clause::TotalSum, 1, tu[0], tv[0]));
    }
    Ok(tail_verdict(&su, &sv, 1, tol))
}

fn negated(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

/// Whether `u ≺_c v` and `-u ≺_c -v` agree.
pub fn check_lemma_negation(u: &[f64], v: &[f64], tol: f64) -> Result<bool> {
    let direct = schur_convex_leq(u, v, tol)?.holds;
    let mirrored = schur_convex_leq(&negated(u), &negated(v), tol)?.holds;
    Ok(direct == mirrored)
}

fn add_at(v: &[f64], index: usize, amount: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    out[index] += amount;
    out
}

/// Shift lemma: for `x <= y`, `u ≺ v` implies
/// `sorted(u + x e_1) ≺ sorted(v + y e_1)`.
///
/// Only the forward implication is checked; the converse fails in general
/// (`u = (0, 3)`, `v = (1, 2)`, `x = y = 2` gives `(2, 3)` on both sides).
pub fn check_lemma_shift(u: &SortedProfile, v: &SortedProfile, x: f64, y: f64) -> Result<bool> {
    same_length(u.len(), v.len())?;
    if x > y {
        return Err(Error::precondition(format!("shift requires x <= y, got {x} > {y}")));
    }
    if u[0] + x < 0.0 || v[0] + y < 0.0 {
        return Err(Error::precondition("shifted first coordinate would be negative"));
    }
    if !prec(u, v, 0.0)?.holds {
        return Ok(true);
    }
    let su = crate::profile::sort_ascending(&add_at(u.as_slice(), 0, x))?;
    let sv = crate::profile::sort_ascending(&add_at(v.as_slice(), 0, y))?;
    Ok(prec(&su, &sv, 0.0)?.holds)
}

pub type Functional = fn(&[f64]) -> f64;

/// A fixed family of convex symmetric functionals on `R^S`.
pub const CONVEX_SYMMETRIC_BATTERY: &[(&str, Functional)] = &[
    ("max", |v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    ("sum-of-squares", |v| v.iter().map(|x| x * x).sum()),
    ("sum-of-positive-parts", |v| positive_part_sum(v, 0.0)),
    ("sum-of-(x+1)^+", |v| positive_part_sum(v, -1.0)),
    ("sum-of-(x-0.5)^+", |v| positive_part_sum(v, 0.5)),
    ("sum-of-(x-1)^+", |v| positive_part_sum(v, 1.0)),
    ("sum-of-(x-2)^+", |v| positive_part_sum(v, 2.0)),
    ("sum-of-abs", |v| v.iter().map(|x| x.abs()).sum()),
    ("log-sum-exp", log_sum_exp),
];

fn positive_part_sum(v: &[f64], c: f64) -> f64 {
    v.iter().map(|x| (x - c).max(0.0)).sum()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Given `u ≺_c v`, checks `F(u) <= F(v) + tol` for every functional of
/// [`CONVEX_SYMMETRIC_BATTERY`]. The tolerance is relative to `max(1, |F(v)|)`.
pub fn convex_symmetric_battery(u: &[f64], v: &[f64], tol: f64) -> Result<bool> {
    let premise = schur_convex_leq(u, v, tol)?;
    if !premise.holds {
        return Err(Error::precondition(format!(
            "battery requires u ≺_c v: {:?}",
            premise.first_violation
        )));
    }
    Ok(CONVEX_SYMMETRIC_BATTERY.iter().all(|(_, f)| {
        let (fu, fv) = (f(u), f(v));
        fu <= fv + tol * fv.abs().max(1.0)
    }))
}

/// `sorted(u) - sorted(v) ≺_c u - sorted(v)`.
pub fn check_lemma_sorted_diff(u: &[f64], v: &[f64], tol: f64) -> Result<bool> {
    same_length(u.len(), v.len())?;
    let (su, sv) = (sort_raw(u)?, sort_raw(v)?);
    let lhs: Vec<f64> = su.iter().zip(&sv).map(|(a, b)| a - b).collect();
    let rhs: Vec<f64> = u.iter().zip(&sv).map(|(a, b)| a - b).collect();
    Ok(schur_convex_leq(&lhs, &rhs, tol)?.holds)
}

/// Stability of `≺_*` under (i) `[· - x 1]^+` and (ii) adding `y >= 0` at a
/// coordinate `j` (one-based) where `u(j) <= v(j)`, followed by sorting.
pub fn check_lemma_star_stability(
    u: &SortedProfile,
    v: &SortedProfile,
    x: f64,
    j: usize,
    y: f64,
    tol: f64,
) -> Result<bool> {
    same_length(u.len(), v.len())?;
    check_rank(j, u.len())?;
    if !prec_star(u, v, 0.0)?.holds {
        return Err(Error::precondition("star stability requires u ≺_* v"));
    }
    if u[j - 1] > v[j - 1] {
        return Err(Error::precondition(format!("star stability requires u({j}) <= v({j})")));
    }
    if !x.is_finite() || !y.is_finite() || y < 0.0 {
        return Err(Error::precondition("star stability requires finite x and y >= 0"));
    }
    let drain = |p: &SortedProfile| -> Result<SortedProfile> {
        crate::profile::sort_ascending(&p.as_slice().iter().map(|w| (w - x).max(0.0)).collect::<Vec<_>>())
    };
    let first = prec_star(&drain(u)?, &drain(v)?, tol)?.holds;
    let bump = |p: &SortedProfile| crate::profile::sort_ascending(&add_at(p.as_slice(), j - 1, y));
    let second = prec_star(&bump(u)?, &bump(v)?, tol)?.holds;
    Ok(first && second)
}

/// Given `u ≺_P v`, returns the verdicts of `G(u) ≺_P G^P(v)` and
/// `G^P(u) ≺_P G^P(v)`.
pub fn check_lemma_map_comparison(
    u: &SortedProfile,
    v: &SortedProfile,
    m: &Mark,
    rank: usize,
    tol: f64,
) -> Result<(bool, bool)> {
    let premise = prec_p(u, v, rank, 0.0)?;
    if !premise.holds {
        return Err(Error::precondition(format!(
            "map comparison requires u ≺_P v: {:?}",
            premise.first_violation
        )));
    }
    let target = pth_step(v, m, rank)?;
    let jsw = prec_p(&kw_step(u, m), &target, rank, tol)?.holds;
    let same = prec_p(&pth_step(u, m, rank)?, &target, rank, tol)?.holds;
    Ok((jsw, same))
}
