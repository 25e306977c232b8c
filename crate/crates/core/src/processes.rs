//! Seeded, reproducible mark sequences and load diagnostics.
//!
//! Every sequence is drawn from a single xoshiro256++ stream seeded through
//! SplitMix64 (see [`RNG_ALGORITHM`]). Uniforms are built from the top 53 bits
//! of each output and all laws are sampled by inversion, so a stream can be
//! reproduced bit for bit by any implementation of the same algorithm.
//!
//! Draw order per customer: the service requirement first, then the gap to
//! the next arrival, then (Markov-modulated input only) the next
//! environment state. Categorical choices over a single outcome consume no
//! randomness, so a one-state modulated model replays the i.i.d. stream.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::profile::Mark;

/// Identifier stored alongside every generated result.
pub const RNG_ALGORITHM: &str = "xoshiro256++/splitmix64-seed/u53-midpoint-inversion";

/// A distribution on the nonnegative reals.
#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    Exponential { rate: f64 },
    Deterministic { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Hyperexponential { probabilities: Vec<f64>, rates: Vec<f64> },
}

impl Law {
    pub fn mean(&self) -> f64 {
        match self {
            Law::Exponential { rate } => 1.0 / rate,
            Law::Deterministic { value } => *value,
            Law::Uniform { lo, hi } => 0.5 * (lo + hi),
            Law::Hyperexponential { probabilities, rates } => probabilities.iter().zip(rates).map(|(p, r)| p / r).sum(),
        }
    }

    /// Whether every sample is strictly positive.
    fn strictly_positive(&self) -> bool {
        match self {
            Law::Exponential { .. } | Law::Hyperexponential { .. } => true,
            Law::Deterministic { value } => *value > 0.0,
            Law::Uniform { lo, .. } => *lo > 0.0,
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        let bad = |msg: String| Err(Error::config(format!("{what}: {msg}")));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        match self {
            Law::Exponential { rate } if !positive(*rate) => bad(format!("rate must be > 0, got {rate}")),
            Law::Deterministic { value } if !(value.is_finite() && *value >= 0.0) => {
                bad(format!("value must be finite and >= 0, got {value}"))
            }
            Law::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && 0.0 <= *lo && lo <= hi) => {
                bad(format!("need 0 <= lo <= hi, got lo={lo} hi={hi}"))
            }
            Law::Hyperexponential { probabilities, rates } => {
                if probabilities.is_empty() || probabilities.len() != rates.len() {
                    return bad("need as many probabilities as rates, at least one".into());
                }
                if let Some(r) = rates.iter().find(|r| !positive(**r)) {
                    return bad(format!("rates must be > 0, got {r}"));
                }
                check_probabilities(probabilities).or_else(bad)
            }
            _ => Ok(()),
        }
    }

    fn sample(&self, rng: &mut Xoshiro256PlusPlus) -> f64 {
        match self {
            Law::Exponential { rate } => exponential(rng, *rate),
            Law::Deterministic { value } => *value,
            Law::Uniform { lo, hi } => lo + (hi - lo) * uniform(rng),
            Law::Hyperexponential { probabilities, rates } => {
                let phase = categorical(rng, probabilities);
                exponential(rng, rates[phase])
            }
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Law::Exponential { rate } => write!(f, "exponential({rate})"),
            Law::Deterministic { value } => write!(f, "deterministic({value})"),
            Law::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            Law::Hyperexponential { probabilities, rates } => {
                write!(f, "hyperexponential({};{})", join(probabilities), join(rates))
            }
        }
    }
}

impl std::str::FromStr for Law {
    type Err = Error;

    /// Parses `exponential(rate)`, `deterministic(v)`, `uniform(lo,hi)` and
    /// `hyperexponential(p1,..,pk;r1,..,rk)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let malformed = || Error::config(format!("malformed law `{s}`"));
        let (name, rest) = s.split_once('(').ok_or_else(malformed)?;
        let args = rest.strip_suffix(')').ok_or_else(malformed)?;
        let numbers = |part: &str| -> Result<Vec<f64>> {
            part.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| malformed()))
                .collect()
        };
        let law = match name.trim() {
            "exponential" | "exp" => match numbers(args)?[..] {
                [rate] => Law::Exponential { rate },
                _ => return Err(malformed()),
            },
            "deterministic" | "det" => match numbers(args)?[..] {
                [value] => Law::Deterministic { value },
                _ => return Err(malformed()),
            },
            "uniform" => match numbers(args)?[..] {
                [lo, hi] => Law::Uniform { lo, hi },
                _ => return Err(malformed()),
            },
            "hyperexponential" | "hyperexp" => {
                let (p, r) = args.split_once(';').ok_or_else(malformed)?;
                Law::Hyperexponential {
                    probabilities: numbers(p)?,
                    rates: numbers(r)?,
                }
            }
            _ => return Err(Error::config(format!("unknown law `{}`", name.trim()))),
        };
        law.validate(s)?;
        Ok(law)
    }
}

fn check_probabilities(p: &[f64]) -> std::result::Result<(), String> {
    if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(format!("probabilities must lie in [0,1]: {p:?}"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(format!("probabilities must sum to 1, got {total}"));
    }
    Ok(())
}

/// Midpoint of one of the 2^53 equal cells of (0,1); never 0 or 1.
pub(crate) fn uniform(rng: &mut Xoshiro256PlusPlus) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn exponential(rng: &mut Xoshiro256PlusPlus, rate: f64) -> f64 {
    -uniform(rng).ln() / rate
}

fn categorical(rng: &mut Xoshiro256PlusPlus, weights: &[f64]) -> usize {
    if weights.len() == 1 {
        return 0;
    }
    let u = uniform(rng);
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the accumulated mass: last state with weight
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
}

/// Finite Markov environment modulating the laws of `(sigma, xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModulation {
    transition: Vec<Vec<f64>>,
    states: Vec<(Law, Law)>,
    stationary: Vec<f64>,
}

impl MarkovModulation {
    pub fn new(transition: Vec<Vec<f64>>, states: Vec<(Law, Law)>) -> Result<Self> {
        let k = transition.len();
        if k == 0 || states.len() != k {
            return Err(Error::config(format!(
                "markov model: {k} transition rows but {} state law pairs",
                states.len()
            )));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != k {
                return Err(Error::config(format!(
                    "markov model: transition row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            check_probabilities(row).map_err(|m| Error::config(format!("markov model: transition row {i}: {m}")))?;
        }
        for (i, (s, x)) in states.iter().enumerate() {
            s.validate(&format!("sigma.{i}"))?;
            x.validate(&format!("xi.{i}"))?;
            if !x.strictly_positive() {
                return Err(Error::config(format!(
                    "xi.{i}: gap law must have strictly positive support"
                )));
            }
        }
        if !irreducible(&transition) {
            return Err(Error::config("markov model: transition matrix is not irreducible"));
        }
        let stationary = stationary_distribution(&transition);
        Ok(MarkovModulation {
            transition,
            states,
            stationary,
        })
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn states(&self) -> &[(Law, Law)] {
        &self.states
    }
}

fn irreducible(t: &[Vec<f64>]) -> bool {
    let k = t.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..k {
                let w = if forward { t[i][j] } else { t[j][i] };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Power iteration on the lazy chain `(I + T) / 2`, which shares the
/// stationary law of `T` and is aperiodic.
fn stationary_distribution(t: &[Vec<f64>]) -> Vec<f64> {
    let k = t.len();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..1_000_000 {
        let mut next = vec![0.0; k];
        for i in 0..k {
            next[i] += 0.5 * pi[i];
            for j in 0..k {
                next[j] += 0.5 * pi[i] * t[i][j];
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if change < 1e-15 {
            break;
        }
    }
    pi
}

/// Specification of a stationary ergodic input.
#[derive(Debug, Clone, PartialEq)]
pub enum InputModel {
    Iid { sigma: Law, xi: Law },
    MarkovModulated(MarkovModulation),
    Trace(Trace),
}

/// Marks replayed from a file, one `sigma xi` pair per line.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    path: PathBuf,
    marks: Arc<Vec<Mark>>,
}

impl Trace {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let text = fs::read_to_string(&path).map_err(|e| Error::Input {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let marks = parse_trace(&text).map_err(|message| Error::Input {
            path: path.clone(),
            message,
        })?;
        Ok(Trace {
            path,
            marks: Arc::new(marks),
        })
    }

    pub fn from_marks(path: impl Into<PathBuf>, marks: Vec<Mark>) -> Self {
        Trace {
            path: path.into(),
            marks: Arc::new(marks),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }
}

/// Parses the trace format: `sigma xi` per line, `#` starts a comment.
pub fn parse_trace(text: &str) -> std::result::Result<Vec<Mark>, String> {
    let mut marks = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [s, x] = fields[..] else {
            return Err(format!("line {}: expected two fields `sigma xi`", lineno + 1));
        };
        let parse = |f: &str| {
            f.parse::<f64>()
                .map_err(|_| format!("line {}: `{f}` is not a number", lineno + 1))
        };
        let mark = Mark::new(parse(s)?, parse(x)?).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        marks.push(mark);
    }
    Ok(marks)
}

impl InputModel {
    pub fn iid(sigma: Law, xi: Law) -> Result<Self> {
        sigma.validate("sigma")?;
        xi.validate("xi")?;
        if !xi.strictly_positive() {
            return Err(Error::config("xi: gap law must have strictly positive support"));
        }
        Ok(InputModel::Iid { sigma, xi })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InputModel::Iid { .. } => "iid",
            InputModel::MarkovModulated(_) => "markov",
            InputModel::Trace(_) => "trace",
        }
    }

    /// Mean service requirement; `estimated` is true for traces.
    pub fn mean_sigma(&self) -> Moment {
        self.moment(|(s, _)| s.mean(), |m| m.sigma())
    }

    /// Mean inter-arrival gap; `estimated` is true for traces.
    pub fn mean_xi(&self) -> Moment {
        self.moment(|(_, x)| x.mean(), |m| m.xi())
    }

    fn moment(&self, law: impl Fn((&Law, &Law)) -> f64, field: impl Fn(&Mark) -> f64) -> Moment {
        match self {
            InputModel::Iid { sigma, xi } => Moment::exact(law((sigma, xi))),
            InputModel::MarkovModulated(mm) => Moment::exact(
                mm.stationary
                    .iter()
                    .zip(&mm.states)
                    .map(|(p, (s, x))| p * law((s, x)))
                    .sum(),
            ),
            InputModel::Trace(t) => {
                let n = t.marks.len().max(1) as f64;
                Moment {
                    value: t.marks.iter().map(field).sum::<f64>() / n,
                    estimated: true,
                }
            }
        }
    }

    pub fn stream(&self, seed: u64) -> MarkStream {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let state = match self {
            InputModel::MarkovModulated(mm) => categorical(&mut rng, &mm.stationary),
            _ => 0,
        };
        MarkStream {
            model: self.clone(),
            rng,
            state,
            position: 0,
        }
    }
}

impl fmt::Display for InputModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputModel::Iid { sigma, xi } => write!(f, "iid(sigma={sigma}, xi={xi})"),
            InputModel::MarkovModulated(mm) => write!(f, "markov({} states)", mm.states.len()),
            InputModel::Trace(t) => write!(f, "trace({})", t.path.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    pub estimated: bool,
}

impl Moment {
    fn exact(value: f64) -> Self {
        Moment {
            value,
            estimated: false,
        }
    }
}

/// Endless (or trace-bounded) iterator over the marks of `C_0, C_1, ...`.
#[derive(Debug, Clone)]
pub struct MarkStream {
    model: InputModel,
    rng: Xoshiro256PlusPlus,
    state: usize,
    position: usize,
}

impl Iterator for MarkStream {
    type Item = Mark;

    fn next(&mut self) -> Option<Mark> {
        let mark = match &self.model {
            InputModel::Iid { sigma, xi } => {
                let s = sigma.sample(&mut self.rng);
                draw_mark(s, xi, &mut self.rng)
            }
            InputModel::MarkovModulated(mm) => {
                let (sigma, xi) = &mm.states[self.state];
                let s = sigma.sample(&mut self.rng);
                let mark = draw_mark(s, xi, &mut self.rng);
                self.state = categorical(&mut self.rng, &mm.transition[self.state]);
                mark
            }
            InputModel::Trace(t) => *t.marks.get(self.position)?,
        };
        self.position += 1;
        Some(mark)
    }
}

fn draw_mark(sigma: f64, xi: &Law, rng: &mut Xoshiro256PlusPlus) -> Mark {
    let x = xi.sample(rng);
    // Validated laws produce finite sigma >= 0 and xi > 0.
    Mark::new(sigma, x).expect("validated law produced an invalid mark")
}

/// Finite prefix of a mark stream with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkSequence {
    marks: Vec<Mark>,
    seed: u64,
    model: InputModel,
}

impl MarkSequence {
    /// Wraps explicit marks (worked examples, external traces).
    pub fn from_marks(marks: Vec<Mark>) -> Self {
        MarkSequence {
            model: InputModel::Trace(Trace::from_marks("<inline>", marks.clone())),
            marks,
            seed: 0,
        }
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn model(&self) -> &InputModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }
}

/// Marks of customers `C_0 .. C_{length-1}`; a pure function of its arguments.
pub fn generate(model: &InputModel, seed: u64, length: usize) -> Result<MarkSequence> {
    if length == 0 {
        return Err(Error::config("sequence length must be >= 1"));
    }
    if let InputModel::Trace(t) = model {
        if t.marks.len() < length {
            return Err(Error::Input {
                path: t.path.clone(),
                message: format!("trace holds {} marks, {length} requested", t.marks.len()),
            });
        }
    }
    let marks: Vec<Mark> = model.stream(seed).take(length).collect();
    Ok(MarkSequence {
        marks,
        seed,
        model: model.clone(),
    })
}

pub fn mean_sigma(model: &InputModel) -> Moment {
    model.mean_sigma()
}

pub fn mean_xi(model: &InputModel) -> Moment {
    model.mean_xi()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Critical,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Critical => "critical",
        }
    }
}

/// Compares `E[sigma]` with `servers * E[xi]`; ties within 1e-12 relative are critical.
pub fn stability_check(model: &InputModel, servers: usize) -> Stability {
    let load = model.mean_sigma().value;
    let capacity = servers as f64 * model.mean_xi().value;
    if (load - capacity).abs() <= 1e-12 * load.abs().max(capacity.abs()) {
        Stability::Critical
    } else if load < capacity {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}
