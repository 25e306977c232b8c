//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Reference values come from the oracles in this file, not from
//! the library under test.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use jsw_core::comparison::{ecdf_dominance, fcfs_oracle, ks_band, verify_theorem1, verify_theorem2};
use jsw_core::lemmas::{run_lemma_suites, Sampler, SuiteSettings, LEMMA_NAMES};
use jsw_core::loynes::{estimate_stationary, estimate_stationary_traced, loynes_from_backward, LoynesSettings};
use jsw_core::processes::{generate, InputModel, Law, MarkovModulation};
use jsw_core::{kw_step, pad, pth_step, sort_ascending, Error, Mark, SortedProfile};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type StepCase<'a> = (&'a [f64], f64, f64, usize, &'a [f64]);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exp(rate: f64) -> Law {
    Law::Exponential { rate }
}

fn iid(sigma: Law, xi: Law) -> InputModel {
    InputModel::iid(sigma, xi).unwrap()
}

/// Input models of every supported family, all with load below one server.
fn model_zoo() -> Vec<(&'static str, InputModel)> {
    let markov = MarkovModulation::new(
        vec![vec![0.9, 0.1], vec![0.2, 0.8]],
        vec![(exp(2.0), exp(0.8)), (exp(0.5), exp(0.8))],
    )
    .unwrap();
    vec![
        ("exponential", iid(exp(1.25), exp(1.0))),
        (
            "uniform",
            iid(Law::Uniform { lo: 0.0, hi: 1.6 }, Law::Uniform { lo: 0.5, hi: 1.5 }),
        ),
        (
            "hyperexponential",
            iid(
                Law::Hyperexponential {
                    probabilities: vec![0.4, 0.6],
                    rates: vec![0.8, 2.4],
                },
                Law::Hyperexponential {
                    probabilities: vec![0.5, 0.5],
                    rates: vec![0.5, 2.0],
                },
            ),
        ),
        ("markov", InputModel::MarkovModulated(markov)),
    ]
}

// ---- oracles ----------------------------------------------------------

/// Unsorted server workloads; the arrival joins the `rank`-th least loaded
/// server (ties to the lowest index), then time advances by `xi`.
fn naive_step(w: &mut [f64], m: &Mark, rank: usize) {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    w[order[rank - 1]] += m.sigma();
    for x in w.iter_mut() {
        *x = (*x - m.xi()).max(0.0);
    }
}

fn sorted(w: &[f64]) -> Vec<f64> {
    let mut v = w.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn naive_path(start: &[f64], marks: &[Mark], rank: usize) -> Vec<Vec<f64>> {
    let mut w = start.to_vec();
    let mut out = vec![sorted(&w)];
    for m in marks {
        naive_step(&mut w, m, rank);
        out.push(sorted(&w));
    }
    out
}

/// Sums from the largest coordinate down: `out[k] = v[k] + .. + v[S-1]`.
fn suffix_sums(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    let mut acc = 0.0;
    for k in (0..v.len()).rev() {
        acc += v[k];
        out[k] = acc;
    }
    out
}

/// `u ≺_P v` with exact coordinates and slack on the tail sums.
fn rank_order(u: &[f64], v: &[f64], rank: usize, slack: f64) -> bool {
    let coords = (rank - 1..u.len()).all(|l| u[l] <= v[l]);
    let (su, sv) = (suffix_sums(u), suffix_sums(v));
    coords && su.iter().zip(&sv).all(|(a, b)| *a <= *b + slack)
}

struct Time(f64);
impl PartialEq for Time {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}
impl Eq for Time {}
impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Time {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Multi-server FCFS queue driven by a min-heap of server release times.
fn heap_fcfs(marks: &[Mark], servers: usize) -> Vec<f64> {
    let mut free: BinaryHeap<Reverse<Time>> = (0..servers).map(|_| Reverse(Time(0.0))).collect();
    let mut t = 0.0;
    let mut waits = Vec::with_capacity(marks.len());
    for m in marks {
        let Reverse(Time(f)) = free.pop().unwrap();
        let start = f.max(t);
        waits.push(start - t);
        free.push(Reverse(Time(start + m.sigma())));
        t += m.xi();
    }
    waits
}

/// Erlang-C mean wait in M/M/c with arrival rate `lambda`, service rate `mu`.
fn erlang_c_wait(c: usize, lambda: f64, mu: f64) -> f64 {
    let a = lambda / mu;
    let mut term = 1.0;
    let mut below = 0.0;
    for k in 0..c {
        below += term;
        term *= a / (k + 1) as f64;
    }
    let top = term * c as f64 / (c as f64 - a);
    let delay = top / (below + top);
    delay / (c as f64 * mu - lambda)
}

// ---- criteria ---------------------------------------------------------

fn c1_step_correctness() -> Outcome {
    let p = |v: &[f64]| sort_ascending(v).unwrap();
    let m = |s, x| Mark::new(s, x).unwrap();
    let cases: [StepCase; 6] = [
        (&[0.0, 0.0], 1.0, 0.4, 1, &[0.0, 0.6]),
        (&[1.0, 2.0, 3.0], 2.0, 1.0, 1, &[1.0, 2.0, 2.0]),
        (&[5.0], 0.0, 10.0, 1, &[0.0]),
        (&[1.0, 2.0, 3.0], 2.0, 1.0, 2, &[0.0, 2.0, 3.0]),
        (&[1.0, 2.0, 3.0], 2.0, 1.0, 1, &[1.0, 2.0, 2.0]),
        (&[0.0, 0.0, 0.0], 0.0, 1.0, 3, &[0.0, 0.0, 0.0]),
    ];
    for (u, s, x, rank, want) in cases {
        let got = pth_step(&p(u), &m(s, x), rank).unwrap();
        ensure(got.as_slice() == want, || {
            format!("pth_step({u:?}, {s}, {x}, {rank}) = {got}")
        })?;
        ensure(sorted(&naive_path(u, &[m(s, x)], rank)[1]) == want, || {
            format!("oracle disagrees on {u:?}")
        })?;
        if rank == 1 {
            ensure(kw_step(&p(u), &m(s, x)).as_slice() == want, || {
                format!("kw_step({u:?}, {s}, {x})")
            })?;
        }
    }
    ensure(
        pad(&p(&[1.0, 3.0]), 4).unwrap().as_slice() == [0.0, 0.0, 1.0, 3.0],
        || "pad".into(),
    )?;

    let mut rng = Sampler::new(0xC1);
    let n = 100_000;
    for i in 0..n {
        let servers = 1 + rng.index(10);
        let u = rng.profile(servers);
        let mark = rng.mark();
        let (a, b) = (pth_step(&u, &mark, 1).unwrap(), kw_step(&u, &mark));
        ensure(a == b, || format!("instance {i}: u={u} {mark:?}: {a} vs {b}"))?;
        let rank = 1 + rng.index(servers);
        let oracle = naive_path(u.as_slice(), &[mark], rank).pop().unwrap();
        let got = pth_step(&u, &mark, rank).unwrap();
        ensure(got.as_slice() == oracle, || {
            format!("instance {i}: rank {rank} u={u}: {got} vs {oracle:?}")
        })?;
    }
    Ok(format!("6 worked step examples and pad exact; {n} random inputs, S <= 10, rank 1 identical to JSW and every rank matches the oracle"))
}

fn c2_oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut runs = 0;
    for (name, model) in model_zoo() {
        for servers in [1, 2, 3, 5, 8] {
            for seed in 0..50 {
                let marks = generate(&model, seed, 1000).unwrap();
                let path = naive_path(&vec![0.0; servers], marks.marks(), 1);
                let mut profile = SortedProfile::zeros(servers).unwrap();
                let heap = heap_fcfs(marks.marks(), servers);
                let lib = fcfs_oracle(&marks, servers).unwrap();
                for (k, m) in marks.marks().iter().enumerate() {
                    ensure(profile.as_slice() == path[k], || {
                        format!("{name} S={servers} seed {seed} step {k}")
                    })?;
                    let w = profile.offered_wait();
                    let d = (w - heap[k]).abs().max((w - lib[k]).abs());
                    worst = worst.max(d);
                    ensure(d <= 1e-9, || {
                        format!("{name} S={servers} seed {seed} customer {k}: {w} vs {}", heap[k])
                    })?;
                    profile = kw_step(&profile, m);
                }
                runs += 1;
            }
        }
    }
    Ok(format!(
        "{runs} runs of 1000 customers, 4 model families; max |W_k - V_k(1)| = {worst:e}"
    ))
}

fn c3_lemma_suites() -> Outcome {
    let settings = SuiteSettings {
        instances: 10_000,
        min_dim: 1,
        max_dim: 8,
        seed: 2024,
    };
    let outcomes = run_lemma_suites(&settings);
    ensure(outcomes.len() == LEMMA_NAMES.len(), || "missing suites".into())?;
    let mut parts = Vec::new();
    for o in &outcomes {
        ensure(o.instances >= 10_000, || {
            format!("{} ran {} instances", o.name, o.instances)
        })?;
        ensure(o.counterexamples == 0, || {
            format!(
                "{}: {} counterexamples, first {:?}",
                o.name,
                o.counterexamples,
                o.transcripts.first()
            )
        })?;
        parts.push(format!("{} 0/{}", o.name, o.instances));
    }
    Ok(format!("dimensions 1..=8: {}", parts.join(", ")))
}

fn theorem1_oracle(marks: &[Mark], servers: usize, fewer: usize) -> Result<(), String> {
    let large = naive_path(&vec![0.0; servers], marks, 1);
    let small = naive_path(&vec![0.0; fewer], marks, 1);
    let rank = servers - fewer + 1;
    for (step, (v, w)) in large.iter().zip(&small).enumerate() {
        let top = (1..=fewer).all(|l| v[servers - fewer + l - 1] <= w[l - 1]);
        let total = v.iter().sum::<f64>() <= w.iter().sum::<f64>() + 1e-12;
        let mut padded = vec![0.0; servers - fewer];
        padded.extend_from_slice(w);
        ensure(top && total && rank_order(v, &padded, rank, 1e-12), || {
            format!("oracle violation at step {step}: {v:?} vs {w:?}")
        })?;
    }
    Ok(())
}

fn c4_theorem1() -> Outcome {
    let zoo = model_zoo();
    let pairs = [(2, 1), (3, 2), (5, 2), (8, 3)];
    let results: Vec<Result<usize, String>> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let (name, model) = &zoo[seed as usize % zoo.len()];
            let horizon = 500 + 500 * (seed as usize % 10);
            let marks = generate(model, seed, horizon).unwrap();
            let mut steps = 0;
            for (s, n) in pairs {
                let report = verify_theorem1(s, n, &marks).unwrap();
                ensure(report.pass, || {
                    format!("({s},{n}) {name} seed {seed}: {:?}", report.violations.first())
                })?;
                theorem1_oracle(marks.marks(), s, n).map_err(|e| format!("({s},{n}) {name} seed {seed}: {e}"))?;
                steps += report.steps_checked;
            }
            Ok(steps)
        })
        .collect();
    let mut steps = 0;
    for r in results {
        steps += r?;
    }
    Ok(format!(
        "(S,N) in {pairs:?}, 1000 seeds, horizons 500..=5000, 4 model families: {steps} steps, 0 violations (library and oracle)"
    ))
}

fn c5_theorem2() -> Outcome {
    let zoo = model_zoo();
    let mut rng = Sampler::new(0xC5);
    let mut steps = 0;
    for i in 0..1000u64 {
        let servers = 1 + (i as usize % 8);
        let rank = 1 + rng.index(servers);
        let (v0, vt) = rng.rank_pair(servers, rank);
        ensure(rank_order(v0.as_slice(), vt.as_slice(), rank, 0.0), || {
            format!("instance {i}: sampler premise")
        })?;
        let (name, model) = &zoo[i as usize % zoo.len()];
        let marks = generate(model, i, 500).unwrap();
        let report = verify_theorem2(rank, &v0, &vt, &marks).unwrap();
        ensure(report.pass, || {
            format!(
                "instance {i} {name} P={rank} {v0} {vt}: {:?}",
                report.violations.first()
            )
        })?;
        let jsw = naive_path(v0.as_slice(), marks.marks(), 1);
        let ranked = naive_path(vt.as_slice(), marks.marks(), rank);
        for (step, (a, b)) in jsw.iter().zip(&ranked).enumerate() {
            ensure(rank_order(a, b, rank, 1e-12), || {
                format!("instance {i} step {step}: oracle {a:?} vs {b:?}")
            })?;
        }
        steps += report.steps_checked;
    }
    Ok(format!(
        "1000 premise-satisfying (V0, V~0, P) instances, S <= 8, horizon 500: {steps} steps, 0 violations"
    ))
}

fn monotone_grid(max: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = (0..=256).collect();
    for j in 1..=40 {
        let n = (256.0 * (max as f64 / 256.0).powf(j as f64 / 40.0)).round() as usize;
        grid.extend([n - 1, n]);
    }
    grid.sort_unstable();
    grid.dedup();
    grid
}

fn c6_loynes_monotone() -> Outcome {
    let model = iid(exp(1.25), exp(1.0));
    let grid = monotone_grid(10_000);
    let results: Vec<Result<usize, String>> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let backward = generate(&model, seed, 10_000).unwrap();
            let mut pairs = 0;
            for servers in [1, 2, 4] {
                let at = |n| loynes_from_backward(backward.marks(), n, servers, 1).unwrap();
                for w in grid.windows(2).filter(|w| w[1] == w[0] + 1) {
                    let (a, b) = (at(w[0]), at(w[1]));
                    ensure(a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| x <= y), || {
                        format!("seed {seed} S={servers}: M_{} = {a} not below M_{} = {b}", w[0], w[1])
                    })?;
                    pairs += 1;
                }
                let mut last: Option<SortedProfile> = None;
                let mut ok = true;
                let settings = LoynesSettings {
                    max_n: 10_000,
                    ..Default::default()
                };
                estimate_stationary_traced(&model, seed, servers, 1, &settings, |_, p| {
                    if let Some(prev) = &last {
                        ok &= prev.as_slice().iter().zip(p.as_slice()).all(|(x, y)| x <= y);
                    }
                    last = Some(p.clone());
                })
                .unwrap();
                ensure(ok, || {
                    format!("seed {seed} S={servers}: doubling snapshots not monotone")
                })?;
            }
            Ok(pairs)
        })
        .collect();
    let mut pairs = 0;
    for r in results {
        pairs += r?;
    }
    Ok(format!(
        "100 seeds, S in {{1,2,4}}, n up to 10^4: {pairs} consecutive pairs M_n <= M_(n+1) exact, doubling snapshots monotone"
    ))
}

/// Offered waits of converged Loynes estimates, one per seed.
fn stationary_waits(model: &InputModel, servers: usize, reps: u64) -> Result<Vec<f64>, String> {
    let settings = LoynesSettings::default();
    (0..reps)
        .into_par_iter()
        .map(|seed| {
            let r = estimate_stationary(model, seed, servers, 1, &settings).map_err(|e| e.to_string())?;
            ensure(r.converged, || format!("seed {seed} did not converge"))?;
            Ok(r.profile.offered_wait())
        })
        .collect()
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

const REPLICATIONS: u64 = 40_000;

fn c7_closed_form() -> Outcome {
    let cases = [
        ("M/M/1", 1, iid(exp(1.0), exp(0.5)), erlang_c_wait(1, 0.5, 1.0)),
        ("M/M/2", 2, iid(exp(1.0), exp(1.0)), erlang_c_wait(2, 1.0, 1.0)),
    ];
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for (name, servers, model, exact) in cases {
        let waits = stationary_waits(&model, servers, REPLICATIONS)?;
        let (mean, se) = mean_se(&waits);
        let rel = (mean - exact).abs() / exact;
        let line = format!(
            "{name} mean {mean:.4} vs {exact:.4} (rel err {:.2}%, 95% MC band ±{:.2}%, {REPLICATIONS} converged reps)",
            100.0 * rel,
            100.0 * 1.96 * se / exact
        );
        if rel > 0.06 {
            failures.push(line.clone());
        }
        parts.push(line);
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(parts.join("; "))
}

fn c8_padding() -> Outcome {
    let model = iid(exp(1.0), exp(1.0));
    let servers = 4;
    let mut steps = 0;
    for rank in [2, 3] {
        let reduced = servers - rank + 1;
        for seed in 0..50 {
            let marks = generate(&model, seed, 2000).unwrap();
            let mut big = SortedProfile::zeros(servers).unwrap();
            let mut small = SortedProfile::zeros(reduced).unwrap();
            for (k, m) in marks.marks().iter().enumerate() {
                let mut padded = vec![0.0; rank - 1];
                padded.extend_from_slice(small.as_slice());
                ensure(big.as_slice() == padded, || {
                    format!("P={rank} seed {seed} step {k}: {big} vs {small}")
                })?;
                big = pth_step(&big, m, rank).unwrap();
                small = kw_step(&small, m);
                steps += 1;
            }
            for n in [1, 10, 100, 1000, 2000] {
                let a = loynes_from_backward(marks.marks(), n, servers, rank).unwrap();
                let b = loynes_from_backward(marks.marks(), n, reduced, 1).unwrap();
                ensure(a == pad(&b, servers).unwrap(), || {
                    format!("P={rank} seed {seed}: M_{n} {a} vs {b}")
                })?;
            }
            let a = estimate_stationary(&model, seed, servers, rank, &LoynesSettings::default()).unwrap();
            let b = estimate_stationary(&model, seed, reduced, 1, &LoynesSettings::default()).unwrap();
            ensure(
                a.profile == pad(&b.profile, servers).unwrap() && a.steps_used == b.steps_used,
                || format!("P={rank} seed {seed}: estimates {} vs {}", a.profile, b.profile),
            )?;
        }
    }
    Ok(format!("S=4, P in {{2,3}}, 50 seeds: {steps} forward steps and all Loynes estimates bit-identical to the padded reduced system"))
}

fn c9_stability() -> Outcome {
    let stable = iid(exp(1.0), exp(1.0));
    let mut used = Vec::new();
    for seed in 0..50 {
        let r = estimate_stationary(&stable, seed, 2, 1, &LoynesSettings::default()).map_err(|e| e.to_string())?;
        ensure(r.converged, || format!("stable seed {seed} did not converge"))?;
        used.push(r.steps_used);
    }
    let unstable = iid(exp(1.0 / 3.0), exp(1.0));
    let refused = matches!(
        estimate_stationary(&unstable, 0, 2, 1, &LoynesSettings::default()),
        Err(Error::Unstable { .. })
    );
    ensure(refused, || "unstable model was not refused".into())?;
    let n = 100_000;
    let threshold = (3.0 - 2.0 * 1.0) / 2.0;
    let rates: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let backward = generate(&unstable, seed, n).unwrap();
            loynes_from_backward(backward.marks(), n, 2, 1)
                .unwrap()
                .total_workload()
                / n as f64
        })
        .collect();
    let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(min > threshold, || format!("min total/n = {min} <= {threshold}"))?;
    Ok(format!(
        "stable M/M/2: 50/50 converged (max steps {}); unstable E[sigma]=3 > 2 E[xi]=2: refused, min total/n at n=10^5 = {min:.3} > {threshold}",
        used.iter().max().unwrap()
    ))
}

fn run_cli(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_jswq"))
        .current_dir(dir)
        .env_remove("JSWQ_CONFIG")
        .args(["--config", "acc.conf"])
        .args(args)
        .output()
        .expect("run jswq");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let config =
        "[model]\nkind = markov\ntransition = 0.9, 0.1; 0.3, 0.7\nsigma.0 = exponential(2)\nxi.0 = exponential(1)\n\
                  sigma.1 = hyperexponential(0.5, 0.5; 0.5, 2)\nxi.1 = uniform(0.5, 1.5)\n\
                  [experiment]\nseeds = 0..12\nhorizon = 400\n\
                  [system.a]\nservers = 3\n[system.b]\nservers = 3\nrank = 2\n\
                  [loynes]\nservers = 2\nsnapshots_out = snaps.csv\n\
                  [compare]\nservers = 5\nfewer = 2\ntrajectory_out = traj.csv\n\
                  [lemmas]\ninstances = 500\n";
    fs::write(dir.path().join("acc.conf"), config).map_err(|e| e.to_string())?;
    let commands: [(&str, &[&str]); 4] = [
        ("simulate", &[]),
        ("loynes", &["snaps.csv"]),
        ("compare", &["traj.csv"]),
        ("verify-lemmas", &[]),
    ];
    let mut files = 0;
    for (cmd, extra) in commands {
        let mut runs = Vec::new();
        for jobs in ["1", "1", "4"] {
            let (code, stdout) = run_cli(dir.path(), &[cmd, "--jobs", jobs, "--out", "main.csv"]);
            ensure(code == 0, || format!("{cmd} exited {code}"))?;
            let mut bytes = vec![
                stdout,
                fs::read(dir.path().join("main.csv")).map_err(|e| e.to_string())?,
            ];
            for f in extra {
                bytes.push(fs::read(dir.path().join(f)).map_err(|e| e.to_string())?);
            }
            runs.push(bytes);
        }
        ensure(runs[0] == runs[1], || format!("{cmd}: rerun differs"))?;
        ensure(runs[0] == runs[2], || format!("{cmd}: --jobs 4 differs from --jobs 1"))?;
        files += runs[0].len();
    }
    Ok(format!(
        "simulate, loynes, compare, verify-lemmas: {files} outputs byte-identical across reruns and --jobs 1/4"
    ))
}

fn ecdf_diagnostic() -> Outcome {
    let reps = 4000;
    let two = stationary_waits(&iid(exp(1.0), exp(0.5)), 2, reps)?;
    let one = stationary_waits(&iid(exp(1.0), exp(0.5)), 1, reps)?;
    let d = ecdf_dominance(&two, &one).map_err(|e| e.to_string())?;
    Ok(format!(
        "stationary wait M/M/2 <=st M/M/1 (E[xi]=2, {reps} reps each): dominates {}, max violation {:.4}, KS band {:.4}",
        d.dominates,
        d.max_violation,
        ks_band(two.len(), one.len())
    ))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 10] = [
        ("step correctness", c1_step_correctness),
        ("JSW equals FCFS oracle", c2_oracle_equivalence),
        ("ordering lemma suites", c3_lemma_suites),
        ("fewer-servers pathwise comparison", c4_theorem1),
        ("rank-P pathwise comparison", c5_theorem2),
        ("Loynes monotonicity", c6_loynes_monotone),
        ("stationary closed forms", c7_closed_form),
        ("P-padding identity", c8_padding),
        ("stability dichotomy", c9_stability),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("acceptance {:>2} PASS {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {:>2} FAIL {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    match ecdf_diagnostic() {
        Ok(d) | Err(d) => println!("diagnostic    ecdf {d}"),
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
