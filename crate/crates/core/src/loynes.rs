//! Loynes's backward scheme for the minimal stationary service profile.
//!
//! `M_n` is the profile seen by `C_0` when `C_{-n}` found the system empty.
//! The backward marks are the prefix-stable stream of a seed read as
//! `C_{-1}, C_{-2}, ...`: element `k - 1` carries the marks of `C_{-k}`.
//! Lengthening the horizon therefore only reaches further into the past and
//! `M_n` is nondecreasing in `n` for every seed.

use crate::error::{Error, Result};
use crate::processes::{stability_check, InputModel, Stability};
use crate::profile::{check_rank, pth_step, Mark, SortedProfile};

/// Folds the recursion over `marks` given in forward time order
/// (`C_{-n}, ..., C_{-1}`), starting from the empty system.
pub fn loynes_iterate(marks: &[Mark], servers: usize, rank: usize) -> Result<SortedProfile> {
    let start = SortedProfile::zeros(servers)?;
    check_rank(rank, servers)?;
    marks.iter().try_fold(start, |profile, m| pth_step(&profile, m, rank))
}

/// `M_n` from a backward stream (`backward[k - 1]` = marks of `C_{-k}`).
pub fn loynes_from_backward(backward: &[Mark], n: usize, servers: usize, rank: usize) -> Result<SortedProfile> {
    if n > backward.len() {
        return Err(Error::domain(format!(
            "need {n} backward marks, only {} available",
            backward.len()
        )));
    }
    let start = SortedProfile::zeros(servers)?;
    check_rank(rank, servers)?;
    backward[..n]
        .iter()
        .rev()
        .try_fold(start, |profile, m| pth_step(&profile, m, rank))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoynesSettings {
    pub tolerance: f64,
    pub window: usize,
    pub max_n: usize,
}

impl Default for LoynesSettings {
    fn default() -> Self {
        LoynesSettings {
            tolerance: 1e-6,
            window: 64,
            max_n: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoynesResult {
    pub profile: SortedProfile,
    pub steps_used: usize,
    pub converged: bool,
    /// Sup-norm distance between the last two doublings.
    pub last_increment: f64,
}

pub fn estimate_stationary(
    model: &InputModel,
    seed: u64,
    servers: usize,
    rank: usize,
    settings: &LoynesSettings,
) -> Result<LoynesResult> {
    estimate_stationary_traced(model, seed, servers, rank, settings, |_, _| {})
}

/// Like [`estimate_stationary`], reporting `(n, M_n)` at every doubling.
pub fn estimate_stationary_traced(
    model: &InputModel,
    seed: u64,
    servers: usize,
    rank: usize,
    settings: &LoynesSettings,
    mut snapshot: impl FnMut(usize, &SortedProfile),
) -> Result<LoynesResult> {
    check_rank(rank, servers)?;
    let effective = servers - rank + 1;
    let verdict = stability_check(model, effective);
    if verdict != Stability::Stable {
        return Err(Error::Unstable {
            mean_sigma: model.mean_sigma().value,
            servers: effective,
            capacity: effective as f64 * model.mean_xi().value,
            verdict: verdict.as_str(),
        });
    }
    let LoynesSettings {
        tolerance,
        window,
        max_n,
    } = *settings;
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::config(format!("tolerance must be > 0, got {tolerance}")));
    }
    if window == 0 || max_n < window {
        return Err(Error::config(format!(
            "need max_n >= window >= 1, got window={window} max_n={max_n}"
        )));
    }

    let mut stream = model.stream(seed);
    let mut backward: Vec<Mark> = Vec::with_capacity(window);
    let mut extend_to = |backward: &mut Vec<Mark>, n: usize| -> Result<()> {
        while backward.len() < n {
            let m = stream.next().ok_or_else(|| Error::Input {
                path: match model {
                    InputModel::Trace(t) => t.path().to_path_buf(),
                    _ => "<model>".into(),
                },
                message: format!("trace exhausted after {} marks", backward.len()),
            })?;
            backward.push(m);
        }
        Ok(())
    };

    let mut n = window;
    extend_to(&mut backward, n)?;
    let mut current = loynes_from_backward(&backward, n, servers, rank)?;
    snapshot(n, &current);
    let mut last_increment = f64::INFINITY;
    while n <= max_n / 2 {
        let next_n = 2 * n;
        extend_to(&mut backward, next_n)?;
        let next = loynes_from_backward(&backward, next_n, servers, rank)?;
        snapshot(next_n, &next);
        last_increment = next.sup_distance(&current)?;
        n = next_n;
        current = next;
        if last_increment <= tolerance {
            return Ok(LoynesResult {
                profile: current,
                steps_used: n,
                converged: true,
                last_increment,
            });
        }
    }
    Ok(LoynesResult {
        profile: current,
        steps_used: n,
        converged: false,
        last_increment,
    })
}
