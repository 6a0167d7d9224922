//! Experiment harness: run solver configurations over generated instance
//! suites, record operation counts, and summarize the distributions.
//!
//! A suite file is a sequence of `[suite]`, `[instances]` and `[config]`
//! sections holding `key = value` lines:
//!
//! ```text
//! [suite]
//! timeout = 60
//!
//! [instances]
//! model = s
//! n = 30
//! p = 1/4
//! seed = 1
//! count = 10
//!
//! [config]
//! name = sa-heur
//! solver = search
//! decomp = sa
//! var_order = weight,constr,card
//! val_order = freq
//!
//! [config]
//! name = pc-fast
//! solver = pc
//! comp = split
//! skip = a,b,c
//! queue = weight
//! ```

use std::fmt::Write as _;
use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algebra::{Basic, Composition};
use crate::generate::{generate, GenerateError, GeneratorConfig, Model, Probability};
use crate::network::Network;
use crate::pathcon::{path_consistency, PcConfig, PcStats, QueuePolicy, SkipSet};
use crate::search::{
    backtrack_solve, extract_scenario, FrequencyTable, SearchConfig, SearchOutcome, ValueOrder,
};
use crate::tractable::Method;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("suite line {line}: {message}")]
    Suite { line: usize, message: String },
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("no records to summarize")]
    Empty,
    #[error("calibration needs at least one instance")]
    NoInstances,
    #[error("every calibration instance timed out or failed")]
    NothingSolved,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solver {
    PathConsistency(PcConfig),
    Search(SearchConfig),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedConfig {
    pub name: String,
    pub solver: Solver,
}

impl NamedConfig {
    pub fn pc(name: impl Into<String>, cfg: PcConfig) -> NamedConfig {
        NamedConfig { name: name.into(), solver: Solver::PathConsistency(cfg) }
    }

    pub fn search(name: impl Into<String>, cfg: SearchConfig) -> NamedConfig {
        NamedConfig { name: name.into(), solver: Solver::Search(cfg) }
    }
}

/// `count` instances generated with seeds `base.seed`, `base.seed + 1`, ...
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSet {
    pub base: GeneratorConfig,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSpec {
    pub timeout: Duration,
    pub instances: Vec<InstanceSet>,
    pub configs: Vec<NamedConfig>,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            timeout: Duration::from_secs(1800),
            instances: Vec::new(),
            configs: Vec::new(),
        }
    }
}

#[derive(PartialEq)]
enum Section {
    None,
    Suite,
    Instances,
    Config,
}

#[derive(Default)]
struct Pending {
    line: usize,
    pairs: Vec<(usize, String, String)>,
}

impl Pending {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let pos = self.pairs.iter().position(|(_, k, _)| k == key)?;
        let (line, _, v) = self.pairs.remove(pos);
        Some((line, v))
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, BenchError>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| suite_err(line, format!("`{key}`: {e}"))),
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, BenchError>
    where
        T::Err: std::fmt::Display,
    {
        let line = self.line;
        self.parse(key)?
            .ok_or_else(|| suite_err(line, format!("missing `{key}`")))
    }

    fn finish(self) -> Result<(), BenchError> {
        match self.pairs.first() {
            Some((line, k, _)) => Err(suite_err(*line, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn suite_err(line: usize, message: impl Into<String>) -> BenchError {
    BenchError::Suite { line, message: message.into() }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '/' | '+'))
}

impl SuiteSpec {
    pub fn parse(text: &str) -> Result<SuiteSpec, BenchError> {
        let mut spec = SuiteSpec::default();
        let mut section = Section::None;
        let mut pending = Pending::default();

        let flush = |section: &Section, pending: Pending, spec: &mut SuiteSpec| -> Result<(), BenchError> {
            let mut p = pending;
            match section {
                Section::None => {}
                Section::Suite => {
                    if let Some(secs) = p.parse::<f64>("timeout")? {
                        if !(secs > 0.0 && secs.is_finite()) {
                            return Err(suite_err(p.line, "timeout must be positive"));
                        }
                        spec.timeout = Duration::from_secs_f64(secs);
                    }
                }
                Section::Instances => spec.instances.push(parse_instances(&mut p)?),
                Section::Config => {
                    let c = parse_config(&mut p)?;
                    if spec.configs.iter().any(|o| o.name == c.name) {
                        return Err(suite_err(p.line, format!("config `{}` defined twice", c.name)));
                    }
                    spec.configs.push(c);
                }
            }
            p.finish()
        };

        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                flush(&section, std::mem::take(&mut pending), &mut spec)?;
                section = match name.trim() {
                    "suite" => Section::Suite,
                    "instances" => Section::Instances,
                    "config" => Section::Config,
                    other => return Err(suite_err(line, format!("unknown section `[{other}]`"))),
                };
                pending.line = line;
                continue;
            }
            if section == Section::None {
                return Err(suite_err(line, "key outside of a section"));
            }
            let (key, value) = l
                .split_once('=')
                .ok_or_else(|| suite_err(line, "expected `key = value`"))?;
            let key = key.trim();
            if pending.pairs.iter().any(|(_, k, _)| k == key) {
                return Err(suite_err(line, format!("`{key}` repeated")));
            }
            pending.pairs.push((line, key.to_string(), value.trim().to_string()));
        }
        flush(&section, pending, &mut spec)?;

        if spec.instances.is_empty() {
            return Err(suite_err(0, "no [instances] section"));
        }
        if spec.configs.is_empty() {
            return Err(suite_err(0, "no [config] section"));
        }
        Ok(spec)
    }
}

fn parse_instances(p: &mut Pending) -> Result<InstanceSet, BenchError> {
    let model: String = p.require("model")?;
    let n: usize = p.require("n")?;
    let seed: u64 = p.require("seed")?;
    let count: usize = p.parse("count")?.unwrap_or(1);
    if count == 0 {
        return Err(suite_err(p.line, "count must be at least 1"));
    }
    if !(2..=crate::network::MAX_VERTICES).contains(&n) {
        return Err(suite_err(p.line, format!("n = {n} out of range")));
    }
    let model = match model.as_str() {
        "b" => {
            let intersects = p.parse("intersects")?.unwrap_or(0.06);
            let disjoint = p.parse("disjoint")?.unwrap_or(0.17);
            Model::B { intersects, disjoint }
        }
        "s" => {
            let prob: Probability = p.require("p")?;
            let embed = p.parse("embed")?.unwrap_or(true);
            Model::S { p: prob, embed }
        }
        other => return Err(suite_err(p.line, format!("unknown model `{other}`"))),
    };
    Ok(InstanceSet { base: GeneratorConfig { model, n, seed }, count })
}

fn parse_config(p: &mut Pending) -> Result<NamedConfig, BenchError> {
    let name: String = p.require("name")?;
    if !valid_name(&name) {
        return Err(suite_err(p.line, format!("bad config name `{name}`")));
    }
    let solver: String = p.require("solver")?;
    let mut pc = PcConfig::default();
    let skip_default = match solver.as_str() {
        "pc" => SkipSet::NONE,
        _ => SkipSet::ALL,
    };
    pc.composition = p.parse::<Composition>("comp")?.unwrap_or_default();
    pc.skip = p.parse::<SkipSet>("skip")?.unwrap_or(skip_default);
    pc.queue = p.parse::<QueuePolicy>("queue")?.unwrap_or_default();
    let solver = match solver.as_str() {
        "pc" => Solver::PathConsistency(pc),
        "search" => {
            let mut cfg = SearchConfig { pc, ..SearchConfig::default() };
            if let Some(m) = p.parse::<Method>("decomp")? {
                cfg.method = m;
            }
            if let Some(v) = p.parse("var_order")? {
                cfg.var_order = v;
            }
            if let Some(v) = p.parse::<ValueOrder>("val_order")? {
                cfg.value_order = v;
            }
            if let Some(n) = p.parse::<u64>("node_limit")? {
                cfg.node_limit = Some(n);
            }
            Solver::Search(cfg)
        }
        other => return Err(suite_err(p.line, format!("unknown solver `{other}`"))),
    };
    Ok(NamedConfig { name, solver })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RunVerdict {
    Consistent,
    Inconsistent,
    Timeout,
}

impl RunVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            RunVerdict::Consistent => "consistent",
            RunVerdict::Inconsistent => "inconsistent",
            RunVerdict::Timeout => "timeout",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance_id: String,
    pub model: char,
    pub n: usize,
    pub p_num: u64,
    pub p_den: u64,
    pub seed: u64,
    pub config: String,
    pub verdict: RunVerdict,
    pub time_ms: f64,
    pub compositions: u64,
    pub skip_a: u64,
    pub skip_b: u64,
    pub skip_c: u64,
    pub enqueues: u64,
    pub backtracks: u64,
    pub nodes: u64,
    pub trail_peak: u64,
    /// Worker that produced the record; not written to CSV.
    pub slot: usize,
}

impl RunRecord {
    /// Everything except wall time and worker slot.
    pub fn counts_key(&self) -> impl PartialEq + std::fmt::Debug {
        (
            self.instance_id.clone(),
            self.config.clone(),
            self.verdict,
            [
                self.compositions,
                self.skip_a,
                self.skip_b,
                self.skip_c,
                self.enqueues,
                self.backtracks,
                self.nodes,
                self.trail_peak,
            ],
        )
    }
}

pub const CSV_HEADER: &str = "instance_id,model,n,p_num,p_den,seed,config,verdict,time_ms,compositions,skip_a,skip_b,skip_c,enqueues,backtracks,nodes,trail_peak";

pub fn csv_row(r: &RunRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{:.3},{},{},{},{},{},{},{},{}",
        r.instance_id,
        r.model,
        r.n,
        r.p_num,
        r.p_den,
        r.seed,
        r.config,
        r.verdict.as_str(),
        r.time_ms,
        r.compositions,
        r.skip_a,
        r.skip_b,
        r.skip_c,
        r.enqueues,
        r.backtracks,
        r.nodes,
        r.trail_peak
    )
}

/// Appends records as CSV rows after a header.
pub struct CsvSink<W: Write> {
    out: W,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut out: W) -> io::Result<CsvSink<W>> {
        writeln!(out, "{CSV_HEADER}")?;
        Ok(CsvSink { out })
    }

    pub fn append(&mut self, r: &RunRecord) -> io::Result<()> {
        writeln!(self.out, "{}", csv_row(r))?;
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

struct Job {
    set: usize,
    rep: usize,
    cfg: GeneratorConfig,
}

fn fill_counts(r: &mut RunRecord, pc: &PcStats) {
    r.compositions = pc.compositions;
    r.skip_a = pc.skipped_a;
    r.skip_b = pc.skipped_b;
    r.skip_c = pc.skipped_c;
    r.enqueues = pc.enqueues;
}

/// Runs one configuration on one instance.
pub fn run_one(net: &Network, cfg: &NamedConfig, timeout: Duration, template: &RunRecord) -> RunRecord {
    let mut r = RunRecord { config: cfg.name.clone(), ..template.clone() };
    match &cfg.solver {
        Solver::PathConsistency(pc) => {
            let mut work = net.clone();
            let start = Instant::now();
            let out = path_consistency(&mut work, pc);
            r.time_ms = start.elapsed().as_secs_f64() * 1e3;
            r.verdict = if out.verdict.is_consistent() {
                RunVerdict::Consistent
            } else {
                RunVerdict::Inconsistent
            };
            fill_counts(&mut r, &out.stats);
        }
        Solver::Search(search) => {
            let search = SearchConfig { timeout, ..search.clone() };
            let res = backtrack_solve(net, &search);
            r.time_ms = res.stats.elapsed.as_secs_f64() * 1e3;
            r.verdict = match res.outcome {
                SearchOutcome::Solved(_) => RunVerdict::Consistent,
                SearchOutcome::Inconsistent { .. } => RunVerdict::Inconsistent,
                SearchOutcome::Timeout | SearchOutcome::NodeLimit => RunVerdict::Timeout,
            };
            fill_counts(&mut r, &res.stats.pc_total());
            r.backtracks = res.stats.backtracks;
            r.nodes = res.stats.nodes;
            r.trail_peak = res.stats.trail_peak;
        }
    }
    r
}

/// Runs every configuration on every instance. Instances are regenerated
/// from their seeds, so all configurations see identical inputs. `sink` sees
/// records as they complete; the returned list is in suite order.
pub fn run_suite<F>(spec: &SuiteSpec, jobs: usize, sink: F) -> Result<Vec<RunRecord>, BenchError>
where
    F: FnMut(&RunRecord) -> io::Result<()> + Send,
{
    let work: Vec<Job> = spec
        .instances
        .iter()
        .enumerate()
        .flat_map(|(set, is)| {
            (0..is.count).map(move |rep| Job {
                set,
                rep,
                cfg: is.base.with_seed(is.base.seed.wrapping_add(rep as u64)),
            })
        })
        .collect();
    // fail fast on unsatisfiable generator settings
    for is in &spec.instances {
        generate(&is.base)?;
    }

    let next = AtomicUsize::new(0);
    let sink = Mutex::new(sink);
    let results: Mutex<Vec<(usize, usize, RunRecord)>> = Mutex::new(Vec::new());
    let failure: Mutex<Option<BenchError>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for slot in 0..jobs.max(1) {
            let (work, next, sink, results, failure) = (&work, &next, &sink, &results, &failure);
            scope.spawn(move || loop {
                if failure.lock().unwrap().is_some() {
                    return;
                }
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = work.get(k) else { return };
                let net = match generate(&job.cfg) {
                    Ok(g) => g.network,
                    Err(e) => {
                        failure.lock().unwrap().get_or_insert(e.into());
                        return;
                    }
                };
                let (p_num, p_den) = job.cfg.model.p_fraction();
                let template = RunRecord {
                    instance_id: format!("i{}.{}", job.set, job.rep),
                    model: job.cfg.model.letter(),
                    n: job.cfg.n,
                    p_num,
                    p_den,
                    seed: job.cfg.seed,
                    config: String::new(),
                    verdict: RunVerdict::Consistent,
                    time_ms: 0.0,
                    compositions: 0,
                    skip_a: 0,
                    skip_b: 0,
                    skip_c: 0,
                    enqueues: 0,
                    backtracks: 0,
                    nodes: 0,
                    trail_peak: 0,
                    slot,
                };
                for (c, cfg) in spec.configs.iter().enumerate() {
                    let r = run_one(&net, cfg, spec.timeout, &template);
                    if let Err(e) = (sink.lock().unwrap())(&r) {
                        failure.lock().unwrap().get_or_insert(e.into());
                        return;
                    }
                    results.lock().unwrap().push((k, c, r));
                }
            });
        }
    });

    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(k, c, _)| (*k, *c));
    Ok(results.into_iter().map(|(_, _, r)| r).collect())
}

/// Mean, spread, and deciles of one measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    /// `std_dev / mean`, 0 when the mean is 0.
    pub cv: f64,
    /// The 0th, 10th, ..., 100th percentiles, linearly interpolated.
    pub percentiles: [f64; 11],
}

impl Distribution {
    pub fn of(values: &[f64]) -> Distribution {
        assert!(!values.is_empty());
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std_dev = var.sqrt();
        let cv = if mean == 0.0 { 0.0 } else { std_dev / mean };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut percentiles = [0.0; 11];
        for (k, p) in percentiles.iter_mut().enumerate() {
            *p = percentile(&sorted, k as f64 * 10.0);
        }
        Distribution { mean, std_dev, cv, percentiles }
    }

    pub fn median(&self) -> f64 {
        self.percentiles[5]
    }
}

/// Linear interpolation between closest ranks; `sorted` must be ascending.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigSummary {
    pub config: String,
    pub runs: usize,
    /// Runs that hit the timeout; their time enters as the timeout itself.
    pub censored: usize,
    pub time_ms: Distribution,
    pub nodes: Distribution,
    pub compositions: Distribution,
}

/// Per-configuration statistics, in order of first appearance.
pub fn summarize(records: &[RunRecord], timeout: Duration) -> Result<Vec<ConfigSummary>, BenchError> {
    if records.is_empty() {
        return Err(BenchError::Empty);
    }
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        if !names.contains(&r.config.as_str()) {
            names.push(&r.config);
        }
    }
    let timeout_ms = timeout.as_secs_f64() * 1e3;
    Ok(names
        .into_iter()
        .map(|name| {
            let rs: Vec<&RunRecord> = records.iter().filter(|r| r.config == name).collect();
            let censored = rs.iter().filter(|r| r.verdict == RunVerdict::Timeout).count();
            let times: Vec<f64> = rs
                .iter()
                .map(|r| if r.verdict == RunVerdict::Timeout { timeout_ms } else { r.time_ms })
                .collect();
            let nodes: Vec<f64> = rs.iter().map(|r| r.nodes as f64).collect();
            let comps: Vec<f64> = rs.iter().map(|r| r.compositions as f64).collect();
            ConfigSummary {
                config: name.to_string(),
                runs: rs.len(),
                censored,
                time_ms: Distribution::of(&times),
                nodes: Distribution::of(&nodes),
                compositions: Distribution::of(&comps),
            }
        })
        .collect())
}

pub fn render_summary(summaries: &[ConfigSummary]) -> String {
    let mut out = String::new();
    for s in summaries {
        writeln!(out, "config {}: {} runs, {} censored", s.config, s.runs, s.censored).unwrap();
        for (label, d) in [("time_ms", &s.time_ms), ("nodes", &s.nodes), ("compositions", &s.compositions)] {
            let deciles: Vec<String> = d.percentiles.iter().map(|p| format!("{p:.1}")).collect();
            writeln!(
                out,
                "  {label:<13} mean {:.3} sd {:.3} cv {:.3} | p0..p100: {}",
                d.mean,
                d.std_dev,
                d.cv,
                deciles.join(" ")
            )
            .unwrap();
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Calibration {
    pub table: FrequencyTable,
    pub solved: usize,
    /// Seeds left out, with the reason.
    pub excluded: Vec<(u64, String)>,
}

fn round_two_significant(x: u64) -> u64 {
    if x < 100 {
        return x;
    }
    let digits = x.ilog10();
    let unit = 10u64.pow(digits - 1);
    (x + unit / 2) / unit * unit
}

/// Solves `k` instances (seeds `model.seed ..`) without value ordering and
/// tallies the basic relation on each edge `i < j` of the found scenarios.
/// Scores are the tallies rounded to two significant digits.
pub fn calibrate_frequencies(
    model: &GeneratorConfig,
    solver: &SearchConfig,
    k: usize,
) -> Result<Calibration, BenchError> {
    if k == 0 {
        return Err(BenchError::NoInstances);
    }
    let cfg = SearchConfig { value_order: ValueOrder::None, ..solver.clone() };
    let mut counts = [0u64; 13];
    let mut solved = 0;
    let mut excluded = Vec::new();
    for t in 0..k as u64 {
        let seed = model.seed.wrapping_add(t);
        let net = generate(&model.with_seed(seed))?.network;
        let res = backtrack_solve(&net, &cfg);
        let SearchOutcome::Solved(sub) = res.outcome else {
            excluded.push((seed, format!("{:?}", res.outcome)));
            continue;
        };
        match extract_scenario(&sub) {
            Ok((scenario, _)) => {
                for e in sub.edges() {
                    counts[scenario.relation(e.i, e.j).index()] += 1;
                }
                solved += 1;
            }
            Err(e) => excluded.push((seed, e.to_string())),
        }
    }
    if solved == 0 {
        return Err(BenchError::NothingSolved);
    }
    let mut table = [0; 13];
    for r in Basic::ALL {
        table[r.index()] = round_two_significant(counts[r.index()]);
    }
    Ok(Calibration { table: FrequencyTable(table), solved, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(config: &str, time_ms: f64, nodes: u64) -> RunRecord {
        RunRecord {
            instance_id: "i0.0".into(),
            model: 's',
            n: 10,
            p_num: 1,
            p_den: 4,
            seed: 0,
            config: config.into(),
            verdict: RunVerdict::Consistent,
            time_ms,
            compositions: 0,
            skip_a: 0,
            skip_b: 0,
            skip_c: 0,
            enqueues: 0,
            backtracks: 0,
            nodes,
            trail_peak: 0,
            slot: 0,
        }
    }

    #[test]
    fn identical_records_have_zero_cv() {
        let rs: Vec<RunRecord> = (0..100).map(|_| record("x", 7.0, 3)).collect();
        let s = &summarize(&rs, Duration::from_secs(1)).unwrap()[0];
        assert_eq!(s.time_ms.cv, 0.0);
        assert_eq!(s.nodes.cv, 0.0);
    }

    #[test]
    fn percentiles_of_one_to_hundred() {
        let rs: Vec<RunRecord> = (1..=100).map(|t| record("x", t as f64, 0)).collect();
        let s = &summarize(&rs, Duration::from_secs(1)).unwrap()[0];
        assert_eq!(s.time_ms.median(), 50.5);
        assert_eq!(s.time_ms.percentiles[10], 100.0);
        assert_eq!(s.time_ms.percentiles[0], 1.0);
    }

    #[test]
    fn single_record_everywhere() {
        let s = &summarize(&[record("x", 4.0, 9)], Duration::from_secs(1)).unwrap()[0];
        assert!(s.time_ms.percentiles.iter().all(|&p| p == 4.0));
        assert!(s.nodes.percentiles.iter().all(|&p| p == 9.0));
    }

    #[test]
    fn timeouts_are_pinned_and_counted() {
        let mut r = record("x", 1234.0, 5);
        r.verdict = RunVerdict::Timeout;
        let s = &summarize(&[r, record("x", 10.0, 1)], Duration::from_secs(1)).unwrap()[0];
        assert_eq!(s.censored, 1);
        assert_eq!(s.time_ms.percentiles[10], 1000.0);
    }

    #[test]
    fn empty_summary_is_an_error() {
        assert!(matches!(summarize(&[], Duration::from_secs(1)), Err(BenchError::Empty)));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_two_significant(7), 7);
        assert_eq!(round_two_significant(1234), 1200);
        assert_eq!(round_two_significant(18_960), 19_000);
        assert_eq!(round_two_significant(155), 160);
    }

    #[test]
    fn suite_parse_and_errors() {
        let text = "[suite]\ntimeout = 5\n[instances]\nmodel = s\nn = 10\np = 1/4\nseed = 3\ncount = 2\n\
                    [config]\nname = a\nsolver = pc\nskip = a,b\n[config]\nname = b\nsolver = search\ndecomp = nb\n";
        let spec = SuiteSpec::parse(text).unwrap();
        assert_eq!(spec.timeout, Duration::from_secs(5));
        assert_eq!(spec.instances[0].count, 2);
        assert_eq!(spec.configs.len(), 2);
        let Solver::Search(s) = &spec.configs[1].solver else { panic!() };
        assert_eq!(s.method, Method::Nb);

        for bad in [
            "[instances]\nmodel = s\nn = 10\nseed = 1\n[config]\nname = a\nsolver = pc\n",
            "[instances]\nmodel = q\nn = 10\nseed = 1\n[config]\nname = a\nsolver = pc\n",
            "[bogus]\n",
            "key = 1\n",
            "[instances]\nmodel = b\nn = 10\nseed = 1\ncolour = red\n[config]\nname = a\nsolver = pc\n",
            "[instances]\nmodel = b\nn = 10\nseed = 1\ncount = 0\n[config]\nname = a\nsolver = pc\n",
            "[instances]\nmodel = b\nn = 10\nseed = 1\n",
            "[instances]\nmodel = b\nn = 10\nseed = 1\n[config]\nname = a,b\nsolver = pc\n",
        ] {
            assert!(SuiteSpec::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn one_instance_one_config() {
        let spec = SuiteSpec::parse(
            "[instances]\nmodel = s\nn = 8\np = 1/2\nseed = 1\n[config]\nname = x\nsolver = search\n",
        )
        .unwrap();
        let mut csv = CsvSink::new(Vec::new()).unwrap();
        let recs = run_suite(&spec, 1, |r| csv.append(r)).unwrap();
        assert_eq!(recs.len(), 1);
        let text = String::from_utf8(csv.into_inner()).unwrap();
        assert_eq!(text.lines().next(), Some(CSV_HEADER));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn calibrate_single_edge() {
        let model = GeneratorConfig::s(2, Probability::new(0, 1).unwrap(), 1);
        let cal = calibrate_frequencies(&model, &SearchConfig::plain(Method::Si), 1).unwrap();
        assert_eq!(cal.table.0.iter().filter(|&&s| s > 0).count(), 1);
        assert!(matches!(
            calibrate_frequencies(&model, &SearchConfig::default(), 0),
            Err(BenchError::NoInstances)
        ));
    }
}
