//! Experiment configuration: a line-oriented `key = value` file with
//! `[section]` headers and `#` comments.
//!
//! ```text
//! [model]
//! kind = iid
//! sigma = exponential(1)
//! xi = exponential(1)
//!
//! [experiment]
//! seeds = 0..200
//! horizon = 1000
//!
//! [system.jsw]
//! servers = 2
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::comparison::{SystemConfig, DEFAULT_HISTORY_CAP};
use crate::error::{Error, Result};
use crate::lemmas::SuiteSettings;
use crate::loynes::LoynesSettings;
use crate::processes::{InputModel, Law, MarkovModulation, Trace};
use crate::profile::SortedProfile;

/// `(section, key, default, description)` for every recognised key.
/// `<i>` and `<name>` stand for a state index and a system label.
pub const CONFIG_KEYS: &[(&str, &str, &str, &str)] = &[
    ("model", "kind", "iid", "iid | markov | trace"),
    (
        "model",
        "sigma",
        "(required for iid)",
        "service law: exponential(rate), deterministic(v), uniform(lo,hi), hyperexponential(p1,..;r1,..)",
    ),
    (
        "model",
        "xi",
        "(required for iid)",
        "inter-arrival law, strictly positive support",
    ),
    (
        "model",
        "transition",
        "(required for markov)",
        "rows separated by ';', entries by ','",
    ),
    (
        "model",
        "sigma.<i>",
        "(required for markov)",
        "service law in environment state i",
    ),
    (
        "model",
        "xi.<i>",
        "(required for markov)",
        "inter-arrival law in environment state i",
    ),
    (
        "model",
        "path",
        "(required for trace)",
        "trace file, one `sigma xi` per line, relative to the config file",
    ),
    ("experiment", "seeds", "1", "comma list and/or half-open ranges a..b"),
    ("experiment", "horizon", "1000", "customers per run"),
    ("experiment", "jobs", "1", "worker threads across seeds"),
    ("experiment", "out", "(stdout)", "main CSV output path"),
    ("system.<name>", "servers", "(required)", "number of servers S"),
    ("system.<name>", "rank", "1", "allocation rank P (1 = JSW)"),
    (
        "system.<name>",
        "initial",
        "zeros",
        "initial workloads, comma separated",
    ),
    (
        "simulate",
        "format",
        "wide",
        "wide: one row per profile | long: one row per coordinate",
    ),
    ("loynes", "servers", "1", "number of servers S"),
    ("loynes", "rank", "1", "allocation rank P"),
    (
        "loynes",
        "tolerance",
        "1e-6",
        "sup-norm increment declaring convergence",
    ),
    ("loynes", "window", "64", "first horizon of the doubling schedule"),
    ("loynes", "max_n", "4194304", "largest horizon tried"),
    ("loynes", "snapshots_out", "(none)", "CSV of M_n at every doubling"),
    (
        "compare",
        "mode",
        "theorem1",
        "theorem1 (S vs N servers) | theorem2 (JSW vs rank P)",
    ),
    ("compare", "servers", "2", "servers S of the larger system"),
    ("compare", "fewer", "1", "servers N of the smaller system (theorem1)"),
    ("compare", "rank", "1", "allocation rank P (theorem2)"),
    ("compare", "initial", "zeros", "JSW start profile (theorem2)"),
    ("compare", "initial_tilde", "zeros", "rank-P start profile (theorem2)"),
    (
        "compare",
        "fault_step",
        "(none)",
        "self-test hook: corrupt one check at this step",
    ),
    (
        "compare",
        "trajectory_out",
        "(none)",
        "long-format CSV of both coupled trajectories",
    ),
    (
        "compare",
        "history_cap",
        "100000",
        "largest horizon for which trajectories are written",
    ),
    ("lemmas", "instances", "10000", "instances per lemma"),
    ("lemmas", "min_dim", "1", "smallest dimension"),
    ("lemmas", "max_dim", "8", "largest dimension"),
    ("lemmas", "seed", "0", "suite seed"),
];

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "JSWQ_CONFIG";

/// Human-readable table of [`CONFIG_KEYS`].
pub fn config_help() -> String {
    let mut out = String::from("CONFIG KEYS ([section] key = default  description):\n");
    let mut last = "";
    for (section, key, default, doc) in CONFIG_KEYS {
        if *section != last {
            out.push_str(&format!("  [{section}]\n"));
            last = section;
        }
        out.push_str(&format!("    {key} = {default}\n        {doc}\n"));
    }
    out
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed but uninterpreted sections.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
    base_dir: PathBuf,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(format!("line {lineno}: unterminated section header")))?
                    .trim();
                if !known_section(name) {
                    return Err(Error::config(format!("line {lineno}: unknown section [{name}]")));
                }
                current = name.to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {lineno}: expected `key = value`")))?;
            let key = key.trim();
            if current.is_empty() {
                return Err(Error::config(format!("line {lineno}: key `{key}` outside any section")));
            }
            if !known_key(&current, key) {
                return Err(Error::config(format!("line {lineno}: unknown key [{current}] {key}")));
            }
            let previous = sections.entry(current.clone()).or_default().insert(
                key.to_string(),
                Entry {
                    value: value.trim().to_string(),
                    line: lineno,
                },
            );
            if let Some(p) = previous {
                return Err(Error::config(format!(
                    "line {lineno}: [{current}] {key} already set on line {}",
                    p.line
                )));
            }
        }
        Ok(RawConfig {
            sections,
            base_dir: PathBuf::from("."),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut raw = RawConfig::parse(&text)?;
        raw.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(raw)
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|e| e.value.as_str())
    }

    fn parse_or<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::config(format!("[{section}] {key}: cannot parse `{v}`"))),
        }
    }

    fn required(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| Error::config(format!("[{section}] {key}: required key is missing")))
    }
}

fn known_section(name: &str) -> bool {
    matches!(
        name,
        "model" | "experiment" | "simulate" | "loynes" | "compare" | "lemmas"
    ) || name
        .strip_prefix("system.")
        .is_some_and(|n| !n.is_empty() && !n.contains(','))
}

fn known_key(section: &str, key: &str) -> bool {
    let section = if section.starts_with("system.") {
        "system.<name>"
    } else {
        section
    };
    let pattern = match key.split_once('.') {
        Some((stem, idx)) if idx.parse::<usize>().is_ok() => format!("{stem}.<i>"),
        _ => key.to_string(),
    };
    CONFIG_KEYS.iter().any(|(s, k, _, _)| *s == section && *k == pattern)
}

/// Parses `1,2,5..8` into `[1, 2, 5, 6, 7]`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::config(format!("[experiment] seeds: cannot parse `{text}`"));
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            seeds.extend(a..b);
        } else {
            seeds.push(part.parse().map_err(|_| bad())?);
        }
    }
    if seeds.is_empty() {
        return Err(Error::config("[experiment] seeds: at least one seed is required"));
    }
    Ok(seeds)
}

fn parse_vector(section: &str, key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("[{section}] {key}: cannot parse `{text}`")))
        })
        .collect()
}

fn parse_profile(section: &str, key: &str, text: Option<&str>, servers: usize) -> Result<SortedProfile> {
    let named = |e: Error| Error::config(format!("[{section}] {key}: {e}"));
    match text {
        None => SortedProfile::zeros(servers).map_err(named),
        Some(t) => {
            let v = parse_vector(section, key, t)?;
            if v.len() != servers {
                return Err(Error::config(format!(
                    "[{section}] {key}: {} workloads given for {servers} servers",
                    v.len()
                )));
            }
            SortedProfile::new(v).map_err(named)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvFormat {
    Wide,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMode {
    Theorem1,
    Theorem2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoynesParams {
    pub servers: usize,
    pub rank: usize,
    pub settings: LoynesSettings,
    pub snapshots_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareParams {
    pub mode: CompareMode,
    pub servers: usize,
    pub fewer: usize,
    pub rank: usize,
    pub initial: SortedProfile,
    pub initial_tilde: SortedProfile,
    pub fault_step: Option<usize>,
    pub trajectory_out: Option<PathBuf>,
    pub history_cap: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    raw: RawConfig,
    pub seeds: Vec<u64>,
    pub horizon: usize,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub format: CsvFormat,
    pub lemmas: SuiteSettings,
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_raw(raw: RawConfig, overrides: &Overrides) -> Result<Self> {
        let seeds = match (overrides.seed, raw.get("experiment", "seeds")) {
            (Some(s), _) => vec![s],
            (None, Some(text)) => parse_seeds(text)?,
            (None, None) => vec![1],
        };
        let horizon = match overrides.horizon {
            Some(h) => h,
            None => raw.parse_or("experiment", "horizon", 1000usize)?,
        };
        if horizon == 0 {
            return Err(Error::config("[experiment] horizon: must be >= 1"));
        }
        let jobs = match overrides.jobs {
            Some(j) => j,
            None => raw.parse_or("experiment", "jobs", 1usize)?,
        };
        if jobs == 0 {
            return Err(Error::config("[experiment] jobs: must be >= 1"));
        }
        let out = overrides
            .out
            .clone()
            .or_else(|| raw.get("experiment", "out").map(PathBuf::from));
        let format = match raw.get("simulate", "format").unwrap_or("wide") {
            "wide" => CsvFormat::Wide,
            "long" => CsvFormat::Long,
            other => return Err(Error::config(format!("[simulate] format: unknown format `{other}`"))),
        };
        let lemmas = SuiteSettings {
            instances: raw.parse_or("lemmas", "instances", 10_000)?,
            min_dim: raw.parse_or("lemmas", "min_dim", 1)?,
            max_dim: raw.parse_or("lemmas", "max_dim", 8)?,
            seed: raw.parse_or("lemmas", "seed", 0)?,
        };
        if lemmas.min_dim == 0 || lemmas.min_dim > lemmas.max_dim {
            return Err(Error::config("[lemmas] min_dim: need 1 <= min_dim <= max_dim"));
        }
        Ok(ExperimentConfig {
            raw,
            seeds,
            horizon,
            jobs,
            out,
            format,
            lemmas,
        })
    }

    pub fn parse(text: &str, overrides: &Overrides) -> Result<Self> {
        ExperimentConfig::from_raw(RawConfig::parse(text)?, overrides)
    }

    /// The `[model]` section as an input model. Trace files are read here,
    /// so this can fail with an input error.
    pub fn model(&self) -> Result<InputModel> {
        let raw = &self.raw;
        let law = |key: &str| -> Result<Law> {
            raw.required("model", key)?
                .parse::<Law>()
                .map_err(|e| Error::config(format!("[model] {key}: {e}")))
        };
        match raw.get("model", "kind").unwrap_or("iid") {
            "iid" => InputModel::iid(law("sigma")?, law("xi")?).map_err(|e| Error::config(format!("[model] {e}"))),
            "markov" => {
                let rows: Vec<Vec<f64>> = raw
                    .required("model", "transition")?
                    .split(';')
                    .map(|row| parse_vector("model", "transition", row))
                    .collect::<Result<_>>()?;
                let states = (0..rows.len())
                    .map(|i| Ok((law(&format!("sigma.{i}"))?, law(&format!("xi.{i}"))?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(InputModel::MarkovModulated(
                    MarkovModulation::new(rows, states).map_err(|e| Error::config(format!("[model] {e}")))?,
                ))
            }
            "trace" => {
                let path = raw.base_dir.join(raw.required("model", "path")?);
                Ok(InputModel::Trace(Trace::load(path)?))
            }
            other => Err(Error::config(format!("[model] kind: unknown kind `{other}`"))),
        }
    }

    /// All `[system.<name>]` sections in name order.
    pub fn systems(&self) -> Result<Vec<(String, SystemConfig)>> {
        let mut out = Vec::new();
        for (section, _) in self.raw.sections.iter().filter(|(s, _)| s.starts_with("system.")) {
            let name = &section["system.".len()..];
            let servers: usize = self
                .raw
                .required(section, "servers")?
                .parse()
                .map_err(|_| Error::config(format!("[{section}] servers: not a positive integer")))?;
            let rank = self.raw.parse_or(section, "rank", 1usize)?;
            if servers == 0 {
                return Err(Error::config(format!("[{section}] servers: must be >= 1")));
            }
            let initial = parse_profile(section, "initial", self.raw.get(section, "initial"), servers)?;
            let config = SystemConfig::new(servers, rank, initial)
                .map_err(|e| Error::config(format!("[{section}] rank: {e}")))?;
            out.push((name.to_string(), config));
        }
        Ok(out)
    }

    pub fn loynes(&self) -> Result<LoynesParams> {
        let r = &self.raw;
        let d = LoynesSettings::default();
        let params = LoynesParams {
            servers: r.parse_or("loynes", "servers", 1)?,
            rank: r.parse_or("loynes", "rank", 1)?,
            settings: LoynesSettings {
                tolerance: r.parse_or("loynes", "tolerance", d.tolerance)?,
                window: r.parse_or("loynes", "window", d.window)?,
                max_n: r.parse_or("loynes", "max_n", d.max_n)?,
            },
            snapshots_out: r.get("loynes", "snapshots_out").map(PathBuf::from),
        };
        if params.servers == 0 {
            return Err(Error::config("[loynes] servers: must be >= 1"));
        }
        if params.rank == 0 || params.rank > params.servers {
            return Err(Error::config("[loynes] rank: must lie in 1..=servers"));
        }
        Ok(params)
    }

    pub fn compare(&self) -> Result<CompareParams> {
        let r = &self.raw;
        let mode = match r.get("compare", "mode").unwrap_or("theorem1") {
            "theorem1" => CompareMode::Theorem1,
            "theorem2" => CompareMode::Theorem2,
            other => return Err(Error::config(format!("[compare] mode: unknown mode `{other}`"))),
        };
        let servers: usize = r.parse_or("compare", "servers", 2)?;
        if servers == 0 {
            return Err(Error::config("[compare] servers: must be >= 1"));
        }
        let fewer: usize = r.parse_or("compare", "fewer", 1)?;
        if mode == CompareMode::Theorem1 && (fewer == 0 || fewer > servers) {
            return Err(Error::config("[compare] fewer: must lie in 1..=servers"));
        }
        let rank: usize = r.parse_or("compare", "rank", 1)?;
        if rank == 0 || rank > servers {
            return Err(Error::config("[compare] rank: must lie in 1..=servers"));
        }
        let fault_step = match r.get("compare", "fault_step") {
            None => None,
            Some(_) => Some(r.parse_or("compare", "fault_step", 0usize)?),
        };
        Ok(CompareParams {
            mode,
            servers,
            fewer,
            rank,
            initial: parse_profile("compare", "initial", r.get("compare", "initial"), servers)?,
            initial_tilde: parse_profile("compare", "initial_tilde", r.get("compare", "initial_tilde"), servers)?,
            fault_step,
            trajectory_out: r.get("compare", "trajectory_out").map(PathBuf::from),
            history_cap: r.parse_or("compare", "history_cap", DEFAULT_HISTORY_CAP)?,
        })
    }
}
