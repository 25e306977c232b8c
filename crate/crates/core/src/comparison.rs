//! Coupled simulation of several systems on one mark sequence, pathwise
//! checks of the comparison theorems, an event-driven FCFS oracle and an
//! empirical stochastic-ordering diagnostic.
//!
//! Every system of an experiment consumes the same [`MarkSequence`]; the
//! marks are never redrawn per system.

use std::fmt;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::orderings::{prec_p, prec_p_split, Clause};
use crate::processes::MarkSequence;
use crate::profile::{check_rank, pad, pth_step, SortedProfile};

/// Absolute slack granted to accumulated sums in pathwise checks.
pub const SUM_SLACK: f64 = 1e-12;

/// Horizon beyond which callers should stream instead of storing profiles.
pub const DEFAULT_HISTORY_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    servers: usize,
    rank: usize,
    initial: SortedProfile,
}

impl SystemConfig {
    pub fn new(servers: usize, rank: usize, initial: SortedProfile) -> Result<Self> {
        if servers == 0 {
            return Err(Error::domain("a system needs at least one server"));
        }
        check_rank(rank, servers)?;
        if initial.len() != servers {
            return Err(Error::domain(format!(
                "initial profile has {} coordinates for {servers} servers",
                initial.len()
            )));
        }
        Ok(SystemConfig { servers, rank, initial })
    }

    /// JSW system started empty.
    pub fn jsw(servers: usize) -> Result<Self> {
        SystemConfig::new(servers, 1, SortedProfile::zeros(servers)?)
    }

    pub fn servers(&self) -> usize {
        self.servers
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn initial(&self) -> &SortedProfile {
        &self.initial
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarksId {
    pub seed: u64,
    pub model: String,
    pub length: usize,
}

impl MarksId {
    pub fn of(marks: &MarkSequence) -> Self {
        MarksId {
            seed: marks.seed(),
            model: marks.model().to_string(),
            length: marks.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub profiles: Vec<SortedProfile>,
    pub config: SystemConfig,
    pub marks_id: MarksId,
}

/// Streams `V_0, ..., V_n` to `visit` without storing them.
pub fn for_each_profile<E>(
    config: &SystemConfig,
    marks: &MarkSequence,
    mut visit: impl FnMut(usize, &SortedProfile) -> std::result::Result<(), E>,
) -> std::result::Result<(), E>
where
    E: From<Error>,
{
    let mut current = config.initial.clone();
    visit(0, &current)?;
    for (k, m) in marks.marks().iter().enumerate() {
        current = pth_step(&current, m, config.rank)?;
        visit(k + 1, &current)?;
    }
    Ok(())
}

/// Full history `V_0 .. V_n` with `n = marks.len()`.
pub fn run_trajectory(config: &SystemConfig, marks: &MarkSequence) -> Result<Trajectory> {
    if marks.is_empty() {
        return Err(Error::domain("a trajectory needs at least one mark"));
    }
    let mut profiles = Vec::with_capacity(marks.len() + 1);
    for_each_profile::<Error>(config, marks, |_, p| {
        profiles.push(p.clone());
        Ok(())
    })?;
    Ok(Trajectory {
        profiles,
        config: config.clone(),
        marks_id: MarksId::of(marks),
    })
}

/// Identifies one checked inequality family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Inequality {
    /// `M^S(S - N + l) <= M^N(l)`, `index = l`.
    TopCoordinates,
    /// Total workload of the larger system is not larger.
    TotalWorkload,
    /// Coordinate clause of a `≺_P` relation, `index = l >= P`.
    RankCoordinate,
    /// Tail-sum clause of a `≺_P` relation, `index = k`.
    RankTailSum,
}

impl Inequality {
    pub fn id(&self) -> &'static str {
        match self {
            Inequality::TopCoordinates => "top-coordinates",
            Inequality::TotalWorkload => "total-workload",
            Inequality::RankCoordinate => "rank-coordinate",
            Inequality::RankTailSum => "rank-tail-sum",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationRecord {
    pub seed: u64,
    pub step: usize,
    pub inequality: Inequality,
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Running means of the derived scalars of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSummary {
    pub label: String,
    pub steps: usize,
    pub sum_total_workload: f64,
    pub sum_offered_wait: f64,
}

impl SystemSummary {
    fn new(label: impl Into<String>) -> Self {
        SystemSummary {
            label: label.into(),
            steps: 0,
            sum_total_workload: 0.0,
            sum_offered_wait: 0.0,
        }
    }

    fn record(&mut self, p: &SortedProfile) {
        self.steps += 1;
        self.sum_total_workload += p.total_workload();
        self.sum_offered_wait += p.offered_wait();
    }

    pub fn mean_total_workload(&self) -> f64 {
        self.sum_total_workload / self.steps.max(1) as f64
    }

    pub fn mean_offered_wait(&self) -> f64 {
        self.sum_offered_wait / self.steps.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub steps_checked: usize,
    pub violations: Vec<ViolationRecord>,
    pub pass: bool,
    pub systems: Vec<SystemSummary>,
}

impl ComparisonReport {
    fn new(labels: &[String]) -> Self {
        ComparisonReport {
            steps_checked: 0,
            violations: Vec::new(),
            pass: true,
            systems: labels.iter().map(SystemSummary::new).collect(),
        }
    }

    fn violate(&mut self, v: ViolationRecord) {
        self.pass = false;
        self.violations.push(v);
    }

    /// Combines reports of independent experiments on the same systems.
    /// Feed reports in seed order for a deterministic violation list.
    pub fn merge(mut self, other: ComparisonReport) -> ComparisonReport {
        self.steps_checked += other.steps_checked;
        self.pass &= other.pass;
        self.violations.extend(other.violations);
        if self.systems.is_empty() {
            self.systems = other.systems;
        } else {
            for (a, b) in self.systems.iter_mut().zip(other.systems) {
                a.steps += b.steps;
                a.sum_total_workload += b.sum_total_workload;
                a.sum_offered_wait += b.sum_offered_wait;
            }
        }
        self
    }

    pub fn empty() -> Self {
        ComparisonReport::new(&[])
    }
}

/// Knobs of the pathwise checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub sum_slack: f64,
    /// Harness self-test: inflates the left side of the total-workload
    /// comparison by one unit at this step, producing exactly one violation.
    pub fault_step: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            sum_slack: SUM_SLACK,
            fault_step: None,
        }
    }
}

/// Runs JSW systems with `servers` and `fewer` servers on the same marks
/// from empty and checks, at every step, that the larger system's top
/// coordinates and total workload are dominated, and that it stays below
/// the padded smaller system in the `≺_P` sense with `P = S - N + 1`.
pub fn verify_theorem1(servers: usize, fewer: usize, marks: &MarkSequence) -> Result<ComparisonReport> {
    verify_theorem1_with(servers, fewer, marks, &CheckOptions::default())
}

pub fn verify_theorem1_with(
    servers: usize,
    fewer: usize,
    marks: &MarkSequence,
    options: &CheckOptions,
) -> Result<ComparisonReport> {
    if fewer == 0 || fewer > servers {
        return Err(Error::domain(format!("need 1 <= N <= S, got S={servers} N={fewer}")));
    }
    let rank = servers - fewer + 1;
    let seed = marks.seed();
    let mut report = ComparisonReport::new(&[format!("jsw-{servers}"), format!("jsw-{fewer}")]);
    let mut large = SortedProfile::zeros(servers)?;
    let mut small = SortedProfile::zeros(fewer)?;

    for step in 0..=marks.len() {
        if step > 0 {
            let m = &marks.marks()[step - 1];
            large = pth_step(&large, m, 1)?;
            small = pth_step(&small, m, 1)?;
        }
        report.steps_checked += 1;
        report.systems[0].record(&large);
        report.systems[1].record(&small);

        for l in 1..=fewer {
            let (lhs, rhs) = (large[servers - fewer + l - 1], small[l - 1]);
            if lhs > rhs {
                report.violate(ViolationRecord {
                    seed,
                    step,
                    inequality: Inequality::TopCoordinates,
                    index: l,
                    lhs,
                    rhs,
                });
            }
        }

        let mut lhs = large.total_workload();
        if options.fault_step == Some(step) {
            lhs += 1.0;
        }
        let rhs = small.total_workload();
        if lhs > rhs + options.sum_slack {
            report.violate(ViolationRecord {
                seed,
                step,
                inequality: Inequality::TotalWorkload,
                index: 0,
                lhs,
                rhs,
            });
        }

        let padded = pad(&small, servers)?;
        check_rank_relation(&mut report, seed, step, &large, &padded, rank, options)?;
    }
    Ok(report)
}

fn check_rank_relation(
    report: &mut ComparisonReport,
    seed: u64,
    step: usize,
    lower: &SortedProfile,
    upper: &SortedProfile,
    rank: usize,
    options: &CheckOptions,
) -> Result<()> {
    let verdict = prec_p_split(lower, upper, rank, 0.0, options.sum_slack)?;
    if let Some(v) = verdict.first_violation {
        report.violate(ViolationRecord {
            seed,
            step,
            inequality: match v.clause {
                Clause::Coordinate => Inequality::RankCoordinate,
                _ => Inequality::RankTailSum,
            },
            index: v.index,
            lhs: v.lhs,
            rhs: v.rhs,
        });
    }
    Ok(())
}

/// Runs JSW from `start` and the rank-`P` allocation from `start_tilde` on
/// the same marks and checks `V_n ≺_P Ṽ_n` at every step.
pub fn verify_theorem2(
    rank: usize,
    start: &SortedProfile,
    start_tilde: &SortedProfile,
    marks: &MarkSequence,
) -> Result<ComparisonReport> {
    verify_theorem2_with(rank, start, start_tilde, marks, &CheckOptions::default())
}

pub fn verify_theorem2_with(
    rank: usize,
    start: &SortedProfile,
    start_tilde: &SortedProfile,
    marks: &MarkSequence,
    options: &CheckOptions,
) -> Result<ComparisonReport> {
    let premise = prec_p(start, start_tilde, rank, 0.0)?;
    if let Some(v) = premise.first_violation {
        return Err(Error::precondition(format!(
            "initial profiles violate the rank-{rank} order: {} clause at index {} ({} > {})",
            v.clause, v.index, v.lhs, v.rhs
        )));
    }
    let servers = start.len();
    let seed = marks.seed();
    let mut report = ComparisonReport::new(&[format!("jsw-{servers}"), format!("rank{rank}-{servers}")]);
    let mut jsw = start.clone();
    let mut ranked = start_tilde.clone();
    for step in 0..=marks.len() {
        if step > 0 {
            let m = &marks.marks()[step - 1];
            jsw = pth_step(&jsw, m, 1)?;
            ranked = pth_step(&ranked, m, rank)?;
        }
        report.steps_checked += 1;
        report.systems[0].record(&jsw);
        report.systems[1].record(&ranked);
        let mut lower = jsw.clone();
        if options.fault_step == Some(step) {
            let mut v = lower.into_vec();
            let last = v.len() - 1;
            v[last] += 1.0 + ranked[last];
            lower = SortedProfile::new(v)?;
        }
        check_rank_relation(&mut report, seed, step, &lower, &ranked, rank, options)?;
    }
    Ok(report)
}

/// Event-driven multi-server FCFS queue in absolute time: waiting times
/// `W_0 .. W_{n-1}` of the customers whose marks are given. Ties between
/// free servers go to the lowest index.
pub fn fcfs_oracle(marks: &MarkSequence, servers: usize) -> Result<Vec<f64>> {
    if servers == 0 {
        return Err(Error::domain("the oracle needs at least one server"));
    }
    let mut free_at = vec![0.0f64; servers];
    let mut arrival = 0.0f64;
    let mut waits = Vec::with_capacity(marks.len());
    for m in marks.marks() {
        let mut server = 0;
        for (i, &t) in free_at.iter().enumerate().skip(1) {
            if t < free_at[server] {
                server = i;
            }
        }
        let start = arrival.max(free_at[server]);
        waits.push(start - arrival);
        free_at[server] = start + m.sigma();
        arrival += m.xi();
    }
    Ok(waits)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcdfDiagnostic {
    /// `F_a >= F_b - slack` everywhere on the merged grid.
    pub dominates: bool,
    /// Fraction of grid points where `F_b - F_a > slack`.
    pub violating_fraction: f64,
    /// `max(F_b - F_a, 0)` over the grid.
    pub max_violation: f64,
    pub slack: f64,
}

/// 95% two-sample Kolmogorov-Smirnov band for sample sizes `m`, `n`.
pub fn ks_band(m: usize, n: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    1.36 * ((m + n) / (m * n)).sqrt()
}

/// Diagnoses whether samples `a` are stochastically smaller than samples
/// `b` (empirical CDF of `a` above that of `b`), within the KS band.
pub fn ecdf_dominance(a: &[f64], b: &[f64]) -> Result<EcdfDiagnostic> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("ecdf comparison needs two nonempty samples"));
    }
    ecdf_dominance_with_slack(a, b, ks_band(a.len(), b.len()))
}

pub fn ecdf_dominance_with_slack(a: &[f64], b: &[f64], slack: f64) -> Result<EcdfDiagnostic> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("ecdf comparison needs two nonempty samples"));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::domain("ecdf samples contain NaN"));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(f64::total_cmp);
    sb.sort_unstable_by(f64::total_cmp);
    let mut grid: Vec<f64> = sa.iter().chain(&sb).copied().collect();
    grid.sort_unstable_by(f64::total_cmp);
    grid.dedup();

    let (mut ia, mut ib) = (0, 0);
    let (mut worst, mut bad) = (0.0f64, 0usize);
    for x in &grid {
        while ia < sa.len() && sa[ia] <= *x {
            ia += 1;
        }
        while ib < sb.len() && sb[ib] <= *x {
            ib += 1;
        }
        let gap = ib as f64 / sb.len() as f64 - ia as f64 / sa.len() as f64;
        worst = worst.max(gap);
        if gap > slack {
            bad += 1;
        }
    }
    Ok(EcdfDiagnostic {
        dominates: worst <= slack,
        violating_fraction: bad as f64 / grid.len() as f64,
        max_violation: worst,
        slack,
    })
}

/// Long-format trajectory CSV header: `seed,step,system,coordinate,value`.
pub const TRAJECTORY_HEADER: &str = "seed,step,system,coordinate,value";

pub fn write_profile_rows(
    out: &mut (impl Write + ?Sized),
    seed: u64,
    step: usize,
    system: &str,
    profile: &SortedProfile,
) -> io::Result<()> {
    for (i, w) in profile.as_slice().iter().enumerate() {
        writeln!(out, "{seed},{step},{system},{},{w}", i + 1)?;
    }
    Ok(())
}

pub fn write_trajectory_csv(out: &mut impl Write, system: &str, trajectory: &Trajectory) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (step, p) in trajectory.profiles.iter().enumerate() {
        write_profile_rows(out, trajectory.marks_id.seed, step, system, p)?;
    }
    Ok(())
}

/// Violations CSV header: `seed,inequality,step,index,lhs,rhs`.
pub const VIOLATIONS_HEADER: &str = "seed,inequality,step,index,lhs,rhs";

pub fn write_violations_csv(out: &mut impl Write, report: &ComparisonReport) -> io::Result<()> {
    writeln!(out, "{VIOLATIONS_HEADER}")?;
    for v in &report.violations {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            v.seed, v.inequality, v.step, v.index, v.lhs, v.rhs
        )?;
    }
    Ok(())
}
