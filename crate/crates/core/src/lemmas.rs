//! Randomized suites for the ordering lemmas.
//!
//! Premise-satisfying instances are built constructively rather than found
//! by rejection, which becomes hopeless beyond a handful of dimensions:
//!
//! * `u ≺_c v`: `u` is `v` after random T-transforms (pairwise averaging)
//!   and a shuffle.
//! * `u ≺_* v`: `u` is a T-transformed copy of `v` with some coordinates
//!   lowered, then sorted.
//! * `u ≺_P v`: a `≺_*` pair where `v(l)` is raised to `max(u(l), v(l))`
//!   for `l >= P`.
//!
//! A candidate whose premise fails after rounding is discarded and redrawn.
//! Entries are drawn half the time from a small integer grid so that ties
//! and equalities are exercised.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::orderings::{
    check_lemma_map_comparison, check_lemma_negation, check_lemma_shift, check_lemma_sorted_diff,
    check_lemma_star_stability, convex_symmetric_battery, prec, prec_p, prec_star, schur_convex_leq,
};
use crate::processes::uniform;
use crate::profile::{sort_ascending, Mark, SortedProfile};

/// Tolerance used for conclusions involving floating-point sums.
pub const LEMMA_TOL: f64 = 1e-9;

/// Random instance generator for the ordering lemmas and coupled starts.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: Xoshiro256PlusPlus,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn unit(&mut self) -> f64 {
        uniform(&mut self.rng)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        ((self.unit() * n as f64) as usize).min(n - 1)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.next_u64() >> 63 == 1
    }

    fn entry(&mut self, lo: f64, hi: f64, grid: bool) -> f64 {
        if grid {
            lo + self.index((hi - lo) as usize + 1) as f64
        } else {
            lo + (hi - lo) * self.unit()
        }
    }

    /// Vector in `[-5, 5]^len`.
    pub fn raw(&mut self, len: usize) -> Vec<f64> {
        let grid = self.coin();
        (0..len).map(|_| self.entry(-5.0, 5.0, grid)).collect()
    }

    /// Sorted profile with entries in `[0, 5]`.
    pub fn profile(&mut self, len: usize) -> SortedProfile {
        let grid = self.coin();
        let v: Vec<f64> = (0..len).map(|_| self.entry(0.0, 5.0, grid)).collect();
        sort_ascending(&v).expect("entries are finite and nonnegative")
    }

    /// Random T-transforms and a shuffle: the result is majorized by `v`.
    pub fn majorized_by(&mut self, v: &[f64]) -> Vec<f64> {
        let mut u = v.to_vec();
        let n = u.len();
        if n > 1 {
            for _ in 0..self.index(2 * n + 1) {
                let i = self.index(n);
                let j = self.index(n);
                let lambda = if self.coin() { 0.5 } else { self.unit() };
                let (a, b) = (u[i], u[j]);
                u[i] = lambda * a + (1.0 - lambda) * b;
                u[j] = lambda * b + (1.0 - lambda) * a;
            }
            for i in (1..n).rev() {
                let j = self.index(i + 1);
                u.swap(i, j);
            }
        }
        u
    }

    /// A pair with `u ≺_* v`.
    pub fn star_pair(&mut self, len: usize) -> (SortedProfile, SortedProfile) {
        loop {
            let v = self.profile(len);
            let mut u = match self.index(4) {
                0 => v.as_slice().to_vec(),
                1 => self.profile(len).into_vec(),
                _ => self.majorized_by(v.as_slice()),
            };
            for x in u.iter_mut() {
                if self.index(3) == 0 {
                    *x = (*x - self.entry(0.0, 3.0, false)).max(0.0);
                }
            }
            let u = sort_ascending(&u).expect("nonnegative entries");
            if prec_star(&u, &v, 0.0).expect("equal lengths").holds {
                return (u, v);
            }
        }
    }

    /// A pair with `u ≺_P v` for the one-based `rank`.
    pub fn rank_pair(&mut self, len: usize, rank: usize) -> (SortedProfile, SortedProfile) {
        loop {
            let (u, v) = self.star_pair(len);
            let mut raised = v.into_vec();
            for l in rank - 1..len {
                raised[l] = raised[l].max(u[l]);
            }
            let v = SortedProfile::new(raised).expect("pointwise max of sorted vectors is sorted");
            if prec_p(&u, &v, rank, 0.0).expect("valid rank").holds {
                return (u, v);
            }
        }
    }

    pub fn mark(&mut self) -> Mark {
        let grid = self.coin();
        let sigma = self.entry(0.0, 4.0, grid);
        let xi = if grid {
            self.entry(1.0, 3.0, true)
        } else {
            0.01 + 3.0 * self.unit()
        };
        Mark::new(sigma, xi).expect("sampled marks are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSettings {
    pub instances: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    pub seed: u64,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings {
            instances: 10_000,
            min_dim: 1,
            max_dim: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaOutcome {
    pub name: &'static str,
    pub instances: usize,
    pub counterexamples: usize,
    /// Reproducible descriptions of the first few counterexamples.
    pub transcripts: Vec<String>,
}

impl LemmaOutcome {
    fn new(name: &'static str) -> Self {
        LemmaOutcome {
            name,
            instances: 0,
            counterexamples: 0,
            transcripts: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.counterexamples += 1;
            if self.transcripts.len() < 5 {
                self.transcripts.push(describe());
            }
        }
    }
}

pub const LEMMA_NAMES: [&str; 7] = [
    "negation",
    "shift",
    "convex-battery",
    "sorted-difference",
    "star-stability",
    "map-comparison-jsw",
    "map-comparison-rank",
];

/// Runs every lemma over `settings.instances` premise-satisfying instances,
/// cycling the dimension through `min_dim..=max_dim`. Deterministic in the
/// settings.
pub fn run_lemma_suites(settings: &SuiteSettings) -> Vec<LemmaOutcome> {
    let mut outcomes: Vec<LemmaOutcome> = LEMMA_NAMES.iter().map(|n| LemmaOutcome::new(n)).collect();
    let span = settings.max_dim.saturating_sub(settings.min_dim) + 1;
    let min_dim = settings.min_dim.max(1);
    let tol = LEMMA_TOL;

    for (lemma, outcome) in outcomes.iter_mut().enumerate().take(5) {
        let mut s = Sampler::new(settings.seed ^ ((lemma as u64 + 1) << 56));
        for i in 0..settings.instances {
            let dim = min_dim + i % span;
            match lemma {
                0 => {
                    let v = s.raw(dim);
                    let u = if s.coin() { s.majorized_by(&v) } else { s.raw(dim) };
                    let ok = check_lemma_negation(&u, &v, tol).unwrap_or(false);
                    outcome.record(ok, || format!("u={u:?} v={v:?}"));
                }
                1 => {
                    let u = s.profile(dim);
                    let bumped: Vec<f64> = u
                        .as_slice()
                        .iter()
                        .map(|w| w + s.entry(0.0, 2.0, false) * s.index(2) as f64)
                        .collect();
                    let v = sort_ascending(&bumped).expect("nonnegative");
                    debug_assert!(prec(&u, &v, 0.0).unwrap().holds);
                    let x = s.entry(-u[0], 3.0, false).max(-u[0]);
                    let y = x + if s.coin() { 0.0 } else { s.entry(0.0, 2.0, false) };
                    let ok = check_lemma_shift(&u, &v, x, y).unwrap_or(false);
                    outcome.record(ok, || {
                        format!("u={:?} v={:?} x={x:?} y={y:?}", u.as_slice(), v.as_slice())
                    });
                }
                2 => {
                    let v = s.raw(dim);
                    let u = s.majorized_by(&v);
                    if !schur_convex_leq(&u, &v, tol).map(|r| r.holds).unwrap_or(false) {
                        outcome.record(false, || format!("constructed pair not majorized: u={u:?} v={v:?}"));
                        continue;
                    }
                    let ok = convex_symmetric_battery(&u, &v, tol).unwrap_or(false);
                    outcome.record(ok, || format!("u={u:?} v={v:?}"));
                }
                3 => {
                    let (u, v) = (s.raw(dim), s.raw(dim));
                    let ok = check_lemma_sorted_diff(&u, &v, tol).unwrap_or(false);
                    outcome.record(ok, || format!("u={u:?} v={v:?}"));
                }
                _ => {
                    let (u, v) = s.star_pair(dim);
                    let candidates: Vec<usize> = (1..=dim).filter(|&j| u[j - 1] <= v[j - 1]).collect();
                    let j = candidates[s.index(candidates.len())];
                    let grid = s.coin();
                    let x = s.entry(-2.0, 6.0, grid);
                    let y = if s.index(4) == 0 { 0.0 } else { s.entry(0.0, 4.0, false) };
                    let ok = check_lemma_star_stability(&u, &v, x, j, y, tol).unwrap_or(false);
                    outcome.record(ok, || {
                        format!("u={:?} v={:?} x={x:?} j={j} y={y:?}", u.as_slice(), v.as_slice())
                    });
                }
            }
        }
    }

    let mut s = Sampler::new(settings.seed ^ (6u64 << 56));
    for i in 0..settings.instances {
        let dim = min_dim + i % span;
        let rank = 1 + s.index(dim);
        let (u, v) = s.rank_pair(dim, rank);
        let m = s.mark();
        let (jsw, same) = check_lemma_map_comparison(&u, &v, &m, rank, tol).unwrap_or((false, false));
        let describe = || {
            format!(
                "u={:?} v={:?} P={rank} sigma={:?} xi={:?}",
                u.as_slice(),
                v.as_slice(),
                m.sigma(),
                m.xi()
            )
        };
        outcomes[5].record(jsw, describe);
        outcomes[6].record(same, describe);
    }
    outcomes
}
