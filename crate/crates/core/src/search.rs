//! Backtracking search for consistent scenarios.
//!
//! The input is first closed under path consistency. Every edge is then a
//! variable, visited in a static order; its values are the blocks of its
//! current label under the chosen decomposition. After each assignment an
//! incremental propagation from the assigned edge acts as forward checking,
//! and all label writes go to a trail so a failed value is undone in place.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::Rational64;
use thiserror::Error;

use crate::algebra::{Basic, Label};
use crate::network::{EdgeRef, Network};
use crate::pathcon::{edge_heuristic, path_consistency, propagate, Heuristic, PcConfig, PcStats};
use crate::tractable::{Catalog, Method};

/// One key of the static variable ordering.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarKey {
    /// Number of blocks in the edge's decomposition.
    Cardinality,
    Constrainedness,
    Weight,
}

impl VarKey {
    pub fn name(self) -> &'static str {
        match self {
            VarKey::Cardinality => "card",
            VarKey::Constrainedness => "constr",
            VarKey::Weight => "weight",
        }
    }
}

/// Sorting keys for edges, primary first. Empty means plain `(i, j)` order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VarOrder(pub Vec<VarKey>);

impl VarOrder {
    pub fn none() -> VarOrder {
        VarOrder(Vec::new())
    }

    pub fn all_permutations() -> Vec<VarOrder> {
        use VarKey::*;
        [
            [Cardinality, Constrainedness, Weight],
            [Cardinality, Weight, Constrainedness],
            [Constrainedness, Cardinality, Weight],
            [Constrainedness, Weight, Cardinality],
            [Weight, Cardinality, Constrainedness],
            [Weight, Constrainedness, Cardinality],
        ]
        .into_iter()
        .map(|p| VarOrder(p.to_vec()))
        .collect()
    }
}

impl FromStr for VarOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(VarOrder::none());
        }
        let mut keys = Vec::new();
        for tok in s.split(',') {
            let key = match tok.trim() {
                "card" => VarKey::Cardinality,
                "constr" => VarKey::Constrainedness,
                "weight" => VarKey::Weight,
                other => return Err(format!("unknown ordering key `{other}`")),
            };
            if keys.contains(&key) {
                return Err(format!("ordering key `{}` repeated", key.name()));
            }
            keys.push(key);
        }
        Ok(VarOrder(keys))
    }
}

impl fmt::Display for VarOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("none");
        }
        let names: Vec<&str> = self.0.iter().map(|k| k.name()).collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum ValueOrder {
    /// Descending frequency score.
    #[default]
    Frequency,
    /// Catalog order.
    None,
}

impl FromStr for ValueOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "freq" => Ok(ValueOrder::Frequency),
            "none" => Ok(ValueOrder::None),
            other => Err(format!("unknown value ordering `{other}`")),
        }
    }
}

impl fmt::Display for ValueOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueOrder::Frequency => "freq",
            ValueOrder::None => "none",
        })
    }
}

/// How often each basic relation shows up in solutions of some problem class.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrequencyTable(pub [u64; 13]);

impl Default for FrequencyTable {
    /// Scores (in units of 10) tallied from solved `S(100, 1/4)` instances.
    fn default() -> Self {
        use Basic::*;
        let mut t = [0; 13];
        for (r, s) in [
            (Before, 1900),
            (After, 1900),
            (During, 240),
            (Contains, 240),
            (Overlaps, 220),
            (OverlappedBy, 220),
            (Equal, 53),
            (Meets, 20),
            (MetBy, 20),
            (Finishes, 15),
            (FinishedBy, 15),
            (Starts, 14),
            (StartedBy, 14),
        ] {
            t[r.index()] = s;
        }
        FrequencyTable(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

impl FrequencyTable {
    pub fn score(&self, r: Basic) -> u64 {
        self.0[r.index()]
    }

    /// Sum of the member scores.
    pub fn label_score(&self, x: Label) -> u64 {
        x.iter().map(|r| self.score(r)).sum()
    }

    /// Lines of `<relation> <score>`; unlisted relations score 0.
    pub fn parse(text: &str) -> Result<FrequencyTable, TableError> {
        let mut t = [0u64; 13];
        let mut seen = [false; 13];
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |message: String| TableError { line: k + 1, message };
            let mut toks = line.split_whitespace();
            let (Some(rel), Some(score), None) = (toks.next(), toks.next(), toks.next()) else {
                return Err(fail("expected `<relation> <score>`".into()));
            };
            let r: Basic = rel.parse().map_err(|e| fail(format!("{e}")))?;
            if std::mem::replace(&mut seen[r.index()], true) {
                return Err(fail(format!("relation `{r}` listed twice")));
            }
            t[r.index()] = score.parse().map_err(|_| fail(format!("bad score `{score}`")))?;
        }
        Ok(FrequencyTable(t))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in Basic::ALL {
            writeln!(out, "{} {}", r, self.score(r)).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub method: Method,
    pub var_order: VarOrder,
    pub value_order: ValueOrder,
    pub frequencies: FrequencyTable,
    pub timeout: Duration,
    /// Deterministic budget on search nodes, checked alongside the timeout.
    pub node_limit: Option<u64>,
    /// Propagation settings for preprocessing and forward checking.
    pub pc: PcConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            method: Method::Sa,
            var_order: "weight,constr,card".parse().unwrap(),
            value_order: ValueOrder::Frequency,
            frequencies: FrequencyTable::default(),
            timeout: Duration::from_secs(1800),
            node_limit: None,
            pc: PcConfig {
                skip: crate::pathcon::SkipSet::ALL,
                ..PcConfig::default()
            },
        }
    }
}

impl SearchConfig {
    /// No variable or value ordering heuristics.
    pub fn plain(method: Method) -> SearchConfig {
        SearchConfig {
            method,
            var_order: VarOrder::none(),
            value_order: ValueOrder::None,
            ..SearchConfig::default()
        }
    }

    /// Short identifier such as `sa/weight,constr,card/freq`.
    pub fn fingerprint(&self) -> String {
        format!("{}/{}/{}", self.method, self.var_order, self.value_order)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    /// Every edge carries a label from the method's class and the network is
    /// path consistent.
    Solved(Network),
    Inconsistent { in_preprocessing: bool },
    Timeout,
    NodeLimit,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub preprocessing: PcStats,
    /// Summed over every forward-checking propagation.
    pub propagation: PcStats,
    /// Values tried.
    pub nodes: u64,
    /// Variables whose values ran out.
    pub backtracks: u64,
    pub trail_peak: u64,
    pub elapsed: Duration,
}

impl SearchStats {
    pub fn pc_total(&self) -> PcStats {
        let mut t = self.preprocessing;
        t.absorb(&self.propagation);
        t
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

/// Undo log of label writes grouped by decision level.
#[derive(Default, Debug)]
pub struct Trail {
    entries: Vec<(usize, usize, Label)>,
    marks: Vec<usize>,
    peak: usize,
}

impl Trail {
    pub fn open_level(&mut self) {
        self.marks.push(self.entries.len());
    }

    pub fn record(&mut self, i: usize, j: usize, old: Label) {
        self.entries.push((i, j, old));
        self.peak = self.peak.max(self.entries.len());
    }

    /// Restores every label written since the matching `open_level`.
    pub fn undo_level(&mut self, net: &mut Network) {
        let mark = self.marks.pop().expect("no open level");
        while self.entries.len() > mark {
            let (i, j, old) = self.entries.pop().unwrap();
            net.set(i, j, old);
        }
    }

    pub fn levels(&self) -> usize {
        self.marks.len()
    }

    pub fn peak(&self) -> usize {
        self.peak
    }
}

fn heuristic_of(key: VarKey) -> Option<Heuristic> {
    match key {
        VarKey::Cardinality => None,
        VarKey::Constrainedness => Some(Heuristic::Constrainedness),
        VarKey::Weight => Some(Heuristic::Weight),
    }
}

/// Static instantiation order: edges whose label is already a single block
/// come first, the rest ascend by the configured keys, then by `(i, j)`.
pub fn order_variables(net: &Network, cfg: &SearchConfig) -> Vec<EdgeRef> {
    let catalog = Catalog::global();
    let mut keyed: Vec<(bool, Vec<u64>, EdgeRef)> = net
        .edges()
        .map(|e| {
            let label = net.get(e.i, e.j);
            let blocks = catalog.block_count(label, cfg.method) as u64;
            let keys = cfg
                .var_order
                .0
                .iter()
                .map(|&k| match heuristic_of(k) {
                    None => blocks,
                    Some(h) => edge_heuristic(net, e, h),
                })
                .collect();
            (blocks > 1, keys, e)
        })
        .collect();
    keyed.sort();
    keyed.into_iter().map(|(_, _, e)| e).collect()
}

/// Orders decomposition blocks by descending frequency score; ties keep
/// their incoming order.
pub fn order_values(blocks: &[Label], cfg: &SearchConfig) -> Vec<Label> {
    let mut out = blocks.to_vec();
    if cfg.value_order == ValueOrder::Frequency {
        out.sort_by_key(|&b| std::cmp::Reverse(cfg.frequencies.label_score(b)));
    }
    out
}

/// Product over all edges of the number of blocks in each label.
pub fn search_space_size(net: &Network, method: Method) -> BigUint {
    let catalog = Catalog::global();
    net.edges()
        .map(|e| BigUint::from(catalog.block_count(net.get(e.i, e.j), method)))
        .product()
}

struct Frame {
    edge: EdgeRef,
    values: Vec<Label>,
    next: usize,
}

/// Searches for a path-consistent subnetwork of `input` whose labels all
/// belong to the class of `cfg.method`.
pub fn backtrack_solve(input: &Network, cfg: &SearchConfig) -> SearchResult {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let mut net = input.clone();

    let pre = path_consistency(&mut net, &cfg.pc);
    stats.preprocessing = pre.stats;
    if !pre.verdict.is_consistent() {
        stats.elapsed = start.elapsed();
        return SearchResult {
            outcome: SearchOutcome::Inconsistent { in_preprocessing: true },
            stats,
        };
    }

    let order = order_variables(&net, cfg);
    let catalog = Catalog::global();
    let mut trail = Trail::default();
    let mut stack: Vec<Frame> = Vec::with_capacity(order.len());

    let outcome = 'search: loop {
        if stack.len() == order.len() {
            break SearchOutcome::Solved(net.clone());
        }
        let edge = order[stack.len()];
        let values = order_values(catalog.blocks(net.get(edge.i, edge.j), cfg.method), cfg);
        stack.push(Frame { edge, values, next: 0 });

        loop {
            let Some(top) = stack.last_mut() else {
                break 'search SearchOutcome::Inconsistent { in_preprocessing: false };
            };
            if top.next == top.values.len() {
                stack.pop();
                stats.backtracks += 1;
                if stack.is_empty() {
                    break 'search SearchOutcome::Inconsistent { in_preprocessing: false };
                }
                trail.undo_level(&mut net);
                continue;
            }
            let value = top.values[top.next];
            top.next += 1;
            let e = top.edge;

            if start.elapsed() >= cfg.timeout {
                break 'search SearchOutcome::Timeout;
            }
            if cfg.node_limit.is_some_and(|limit| stats.nodes >= limit) {
                break 'search SearchOutcome::NodeLimit;
            }
            stats.nodes += 1;

            trail.open_level();
            let current = net.get(e.i, e.j);
            if value != current {
                trail.record(e.i, e.j, current);
                net.set(e.i, e.j, value);
                let out = propagate(&mut net, &cfg.pc, [e], |i, j, old| trail.record(i, j, old));
                stats.propagation.absorb(&out.stats);
                if !out.verdict.is_consistent() {
                    trail.undo_level(&mut net);
                    continue;
                }
            }
            continue 'search;
        }
    };

    stats.trail_peak = trail.peak() as u64;
    stats.elapsed = start.elapsed();
    SearchResult { outcome, stats }
}

/// Concrete rational intervals, one per event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalAssignment {
    pub intervals: Vec<(Rational64, Rational64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("the network is inconsistent")]
    Inconsistent,
    #[error("endpoint precedences contain a cycle")]
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct AssignmentParseError {
    pub line: usize,
    pub message: String,
}

fn format_rational(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl IntervalAssignment {
    pub fn from_integers(intervals: &[(i64, i64)]) -> IntervalAssignment {
        IntervalAssignment {
            intervals: intervals
                .iter()
                .map(|&(s, e)| (Rational64::from_integer(s), Rational64::from_integer(e)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Basic relation between intervals `i` and `j`.
    pub fn relation(&self, i: usize, j: usize) -> Basic {
        let (a, b) = (&self.intervals[i], &self.intervals[j]);
        Basic::between(&a.0, &a.1, &b.0, &b.1)
    }

    /// One line per event: `<index> <start> <end>` with `p/q` rationals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, (s, e)) in self.intervals.iter().enumerate() {
            writeln!(out, "{i} {} {}", format_rational(s), format_rational(e)).unwrap();
        }
        out
    }

    /// Inverse of [`IntervalAssignment::to_text`]; also accepts integers and
    /// `#` comments. Indices must cover `0..count` exactly once.
    pub fn parse(text: &str) -> Result<IntervalAssignment, AssignmentParseError> {
        let mut rows: Vec<Option<(Rational64, Rational64)>> = Vec::new();
        let mut last = 0;
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            last = k + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |message: String| AssignmentParseError { line: k + 1, message };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [idx, s, e] = toks[..] else {
                return Err(fail("expected `<index> <start> <end>`".into()));
            };
            let idx: usize = idx.parse().map_err(|_| fail(format!("bad index `{idx}`")))?;
            if idx >= crate::network::MAX_VERTICES {
                return Err(fail(format!("index {idx} too large")));
            }
            let s: Rational64 = s.parse().map_err(|_| fail(format!("bad rational `{s}`")))?;
            let e: Rational64 = e.parse().map_err(|_| fail(format!("bad rational `{e}`")))?;
            if s >= e {
                return Err(fail("interval start must precede its end".into()));
            }
            if rows.len() <= idx {
                rows.resize(idx + 1, None);
            }
            if rows[idx].replace((s, e)).is_some() {
                return Err(fail(format!("index {idx} listed twice")));
            }
        }
        let intervals = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| AssignmentParseError { line: last, message: format!("index {i} missing") })
            })
            .collect::<Result<_, _>>()?;
        Ok(IntervalAssignment { intervals })
    }
}

/// A network in which every edge carries exactly one basic relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario(Network);

impl Scenario {
    pub fn from_network(net: Network) -> Option<Scenario> {
        net.is_atomic().then_some(Scenario(net))
    }

    /// The scenario realized by concrete intervals.
    pub fn from_assignment(a: &IntervalAssignment) -> Scenario {
        let n = a.len();
        let mut net = Network::new(n);
        for i in 0..n {
            for j in i + 1..n {
                net.set(i, j, a.relation(i, j).into());
            }
        }
        Scenario(net)
    }

    pub fn relation(&self, i: usize, j: usize) -> Basic {
        self.0.get(i, j).as_basic().expect("scenario edges are singletons")
    }

    pub fn network(&self) -> &Network {
        &self.0
    }

    pub fn into_network(self) -> Network {
        self.0
    }
}

/// Realizes `solved` and reads the relations back. Each relation of the
/// result lies inside the corresponding label of `solved`.
pub fn extract_scenario(solved: &Network) -> Result<(Scenario, IntervalAssignment), RealizeError> {
    let a = realize(solved)?;
    let mut s = Scenario::from_assignment(&a);
    for i in 0..solved.n() {
        if let Some(name) = solved.name(i) {
            s.0.set_name(i, name);
        }
    }
    Ok((s, a))
}

/// Builds intervals satisfying `net`.
///
/// Non-singleton labels are first narrowed one edge at a time to a basic
/// relation that survives path consistency. For pointizable and ORD-Horn
/// labels a path-consistent network is consistent, so this never needs to
/// back up. The resulting scenario fixes a total preorder on the `2n`
/// endpoints, which is assigned increasing integers.
pub fn realize(net: &Network) -> Result<IntervalAssignment, RealizeError> {
    if net.is_atomic() {
        return realize_atomic(net);
    }
    let cfg = PcConfig::default();
    let mut work = net.clone();
    if !path_consistency(&mut work, &cfg).verdict.is_consistent() {
        return Err(RealizeError::Inconsistent);
    }
    let mut undo: Vec<(usize, usize, Label)> = Vec::new();
    let edges: Vec<EdgeRef> = work.edges().collect();
    for e in edges {
        let label = work.get(e.i, e.j);
        if label.cardinality() == 1 {
            continue;
        }
        let mut fixed = false;
        for r in label.iter() {
            undo.clear();
            undo.push((e.i, e.j, label));
            work.set(e.i, e.j, r.into());
            let out = propagate(&mut work, &cfg, [e], |i, j, old| undo.push((i, j, old)));
            if out.verdict.is_consistent() {
                fixed = true;
                break;
            }
            for &(i, j, old) in undo.iter().rev() {
                work.set(i, j, old);
            }
        }
        if !fixed {
            return Err(RealizeError::Inconsistent);
        }
    }
    realize_atomic(&work)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut x = x;
    while parent[x] != root {
        let next = parent[x];
        parent[x] = root;
        x = next;
    }
    root
}

fn realize_atomic(net: &Network) -> Result<IntervalAssignment, RealizeError> {
    use std::cmp::Ordering;
    let n = net.n();
    let points = 2 * n;
    let mut parent: Vec<usize> = (0..points).collect();
    let mut strict: Vec<(usize, usize)> = (0..n).map(|i| (2 * i, 2 * i + 1)).collect();
    for e in net.edges() {
        let r = net.get(e.i, e.j).as_basic().ok_or(RealizeError::Inconsistent)?;
        let a = [2 * e.i, 2 * e.i, 2 * e.i + 1, 2 * e.i + 1];
        let b = [2 * e.j, 2 * e.j + 1, 2 * e.j, 2 * e.j + 1];
        for (k, o) in r.endpoint_order().into_iter().enumerate() {
            match o {
                Ordering::Less => strict.push((a[k], b[k])),
                Ordering::Greater => strict.push((b[k], a[k])),
                Ordering::Equal => {
                    let (x, y) = (find(&mut parent, a[k]), find(&mut parent, b[k]));
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); points];
    let mut indegree = vec![0usize; points];
    for (x, y) in strict {
        let (x, y) = (find(&mut parent, x), find(&mut parent, y));
        if x == y {
            return Err(RealizeError::Cycle);
        }
        succ[x].push(y);
        indegree[y] += 1;
    }
    let roots: Vec<usize> = (0..points).filter(|&p| find(&mut parent, p) == p).collect();
    let mut level = vec![0i64; points];
    let mut ready: Vec<usize> = roots.iter().copied().filter(|&p| indegree[p] == 0).collect();
    let mut done = 0;
    while let Some(x) = ready.pop() {
        done += 1;
        for &y in &succ[x] {
            level[y] = level[y].max(level[x] + 1);
            indegree[y] -= 1;
            if indegree[y] == 0 {
                ready.push(y);
            }
        }
    }
    if done != roots.len() {
        return Err(RealizeError::Cycle);
    }
    let intervals = (0..n)
        .map(|i| {
            let s = level[find(&mut parent, 2 * i)];
            let e = level[find(&mut parent, 2 * i + 1)];
            (Rational64::from_integer(s), Rational64::from_integer(e))
        })
        .collect();
    Ok(IntervalAssignment { intervals })
}

/// Whether every edge's label holds between the assigned intervals.
pub fn verify_assignment(net: &Network, a: &IntervalAssignment) -> bool {
    a.len() == net.n()
        && a.intervals.iter().all(|(s, e)| s < e)
        && net.edges().all(|e| net.get(e.i, e.j).contains(a.relation(e.i, e.j)))
}
