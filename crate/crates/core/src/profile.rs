//! Service profiles and the one-step workload recursions.
//!
//! A [`SortedProfile`] holds the residual workloads of the `S` servers seen
//! by an arriving customer, sorted increasingly. The Kiefer-Wolfowitz map
//! ([`kw_step`]) sends the arrival to the least loaded server; [`pth_step`]
//! sends it to the server holding the `P`-th least workload.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// One customer's marks: service requirement and gap to the next arrival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mark {
    sigma: f64,
    xi: f64,
}

impl Mark {
    pub fn new(sigma: f64, xi: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::domain(format!(
                "service requirement must be finite and >= 0, got {sigma}"
            )));
        }
        if !xi.is_finite() || xi <= 0.0 {
            return Err(Error::domain(format!(
                "inter-arrival gap must be finite and > 0, got {xi}"
            )));
        }
        Ok(Mark { sigma, xi })
    }

    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn xi(&self) -> f64 {
        self.xi
    }
}

/// Nondecreasing, nonnegative workload vector of length `S >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedProfile(Vec<f64>);

impl SortedProfile {
    /// Validates an already sorted vector without reordering it.
    pub fn new(workloads: Vec<f64>) -> Result<Self> {
        check_entries(&workloads)?;
        if let Some(i) = workloads.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::domain(format!(
                "profile is not sorted at coordinate {}: {} > {}",
                i + 1,
                workloads[i],
                workloads[i + 1]
            )));
        }
        Ok(SortedProfile(workloads))
    }

    /// The empty system with `servers` idle servers.
    pub fn zeros(servers: usize) -> Result<Self> {
        if servers == 0 {
            return Err(Error::domain("a profile needs at least one server"));
        }
        Ok(SortedProfile(vec![0.0; servers]))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Sum of all residual workloads.
    pub fn total_workload(&self) -> f64 {
        self.0.iter().sum()
    }

    /// The smallest residual workload: the wait the next arrival incurs under JSW.
    pub fn offered_wait(&self) -> f64 {
        self.0[0]
    }

    /// Largest coordinatewise distance between two profiles of equal length.
    pub fn sup_distance(&self, other: &SortedProfile) -> Result<f64> {
        same_length(self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl Index<usize> for SortedProfile {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for SortedProfile {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for SortedProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")
    }
}

fn check_entries(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::domain("a profile needs at least one server"));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::domain(format!("entry {} is not finite: {x}", i + 1)));
        }
        if x < 0.0 {
            return Err(Error::domain(format!("entry {} is negative: {x}", i + 1)));
        }
    }
    Ok(())
}

pub(crate) fn same_length(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::domain(format!("length mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// Sorts a finite real vector increasingly. Negative entries are allowed;
/// this is the ordering machinery's view of `R^S`.
pub fn sort_raw(v: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::domain(format!("entry {} is not finite: {}", i + 1, v[i])));
    }
    let mut out = v.to_vec();
    out.sort_unstable_by(f64::total_cmp);
    Ok(out)
}

/// Sorts a nonnegative workload vector into a profile.
pub fn sort_ascending(v: &[f64]) -> Result<SortedProfile> {
    check_entries(v)?;
    let mut out = v.to_vec();
    out.sort_unstable_by(f64::total_cmp);
    Ok(SortedProfile(out))
}

/// `u -> sorted([u + sigma e_rank - xi 1]^+)` with a zero-based rank.
/// Both recursions go through here so that rank 0 is bit-identical to JSW.
fn step_at(u: &SortedProfile, m: &Mark, rank: usize) -> SortedProfile {
    let mut next = u.0.clone();
    next[rank] += m.sigma;
    for w in next.iter_mut() {
        *w = (*w - m.xi).max(0.0);
    }
    next.sort_unstable_by(f64::total_cmp);
    SortedProfile(next)
}

/// One Kiefer-Wolfowitz step: the arrival joins the least loaded server,
/// then every server works for `xi` time units.
pub fn kw_step(u: &SortedProfile, m: &Mark) -> SortedProfile {
    step_at(u, m, 0)
}

/// One step of the allocation to the queue holding the `rank`-th least
/// workload (`rank` is one-based, `1..=S`).
pub fn pth_step(u: &SortedProfile, m: &Mark, rank: usize) -> Result<SortedProfile> {
    check_rank(rank, u.len())?;
    Ok(step_at(u, m, rank - 1))
}

pub(crate) fn check_rank(rank: usize, servers: usize) -> Result<()> {
    if rank == 0 || rank > servers {
        return Err(Error::domain(format!("rank {rank} out of range 1..={servers}")));
    }
    Ok(())
}

/// Embeds a profile of `N` servers into `servers >= N` by prepending idle servers.
pub fn pad(p: &SortedProfile, servers: usize) -> Result<SortedProfile> {
    if servers < p.len() {
        return Err(Error::domain(format!(
            "cannot pad a profile of length {} down to {servers}",
            p.len()
        )));
    }
    let mut out = vec![0.0; servers - p.len()];
    out.extend_from_slice(&p.0);
    Ok(SortedProfile(out))
}

pub fn total_workload(u: &SortedProfile) -> f64 {
    u.total_workload()
}

pub fn offered_wait(u: &SortedProfile) -> f64 {
    u.offered_wait()
}
