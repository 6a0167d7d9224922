//! Worklist path consistency with composition skipping and ordered queues.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::algebra::{composes_to_full, Composition, Label};
use crate::network::{EdgeRef, Network};

/// Order in which the worklist hands out edges.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum QueuePolicy {
    #[default]
    Fifo,
    Lifo,
    /// Ascending label weight.
    Weight,
    /// Ascending label cardinality.
    Cardinality,
    /// Ascending sum of weights of the flanking edges.
    Constrainedness,
}

impl QueuePolicy {
    pub const ALL: [QueuePolicy; 5] = [
        QueuePolicy::Fifo,
        QueuePolicy::Lifo,
        QueuePolicy::Weight,
        QueuePolicy::Cardinality,
        QueuePolicy::Constrainedness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueuePolicy::Fifo => "fifo",
            QueuePolicy::Lifo => "lifo",
            QueuePolicy::Weight => "weight",
            QueuePolicy::Cardinality => "card",
            QueuePolicy::Constrainedness => "constr",
        }
    }

    fn heuristic(self) -> Option<Heuristic> {
        match self {
            QueuePolicy::Fifo | QueuePolicy::Lifo => None,
            QueuePolicy::Weight => Some(Heuristic::Weight),
            QueuePolicy::Cardinality => Some(Heuristic::Cardinality),
            QueuePolicy::Constrainedness => Some(Heuristic::Constrainedness),
        }
    }
}

impl FromStr for QueuePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QueuePolicy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown queue policy `{s}`"))
    }
}

impl fmt::Display for QueuePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which of the three composition-skipping tests are enabled.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SkipSet {
    /// Leave `I` edges out of the initial queue.
    pub a: bool,
    /// Skip compositions that the `b/bi/d·di` test proves to be `I`.
    pub b: bool,
    /// Stop composing once the partial union covers the target label.
    pub c: bool,
}

impl SkipSet {
    pub const NONE: SkipSet = SkipSet { a: false, b: false, c: false };
    pub const ALL: SkipSet = SkipSet { a: true, b: true, c: true };

    /// All eight subsets.
    pub fn subsets() -> impl Iterator<Item = SkipSet> {
        (0..8u8).map(|m| SkipSet { a: m & 1 != 0, b: m & 2 != 0, c: m & 4 != 0 })
    }
}

impl FromStr for SkipSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = SkipSet::NONE;
        if s == "none" {
            return Ok(set);
        }
        for tok in s.split(',') {
            match tok.trim() {
                "a" => set.a = true,
                "b" => set.b = true,
                "c" => set.c = true,
                other => return Err(format!("unknown skipping technique `{other}`")),
            }
        }
        Ok(set)
    }
}

impl fmt::Display for SkipSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = [(self.a, "a"), (self.b, "b"), (self.c, "c")]
            .into_iter()
            .filter_map(|(on, s)| on.then_some(s))
            .collect();
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PcConfig {
    pub composition: Composition,
    pub skip: SkipSet,
    pub queue: QueuePolicy,
    /// Recompute every skipped composition and count the skips that would
    /// have tightened a label. Testing aid; doubles the work.
    pub shadow: bool,
}

impl PcConfig {
    pub fn new(composition: Composition, skip: SkipSet, queue: QueuePolicy) -> PcConfig {
        PcConfig { composition, skip, queue, shadow: false }
    }

    /// Every combination of composition method, skip subset and queue policy.
    pub fn all_combinations() -> Vec<PcConfig> {
        let mut out = Vec::with_capacity(80);
        for composition in Composition::ALL {
            for skip in SkipSet::subsets() {
                for queue in QueuePolicy::ALL {
                    out.push(PcConfig::new(composition, skip, queue));
                }
            }
        }
        out
    }

    /// Short identifier such as `split/a,b,c/fifo`.
    pub fn fingerprint(&self) -> String {
        format!("{}/{}/{}", self.composition, self.skip, self.queue)
    }
}

/// Operation counters for one propagation run.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct PcStats {
    /// Compositions started (including those cut short by technique c).
    pub compositions: u64,
    /// Compositions avoided by keeping `I` edges off the initial queue:
    /// `2(n-2)` per such edge.
    pub skipped_a: u64,
    pub skipped_b: u64,
    /// Compositions cut short.
    pub skipped_c: u64,
    pub enqueues: u64,
    pub queue_peak: u64,
    /// Edges popped.
    pub iterations: u64,
    /// Label writes.
    pub updates: u64,
    /// Skips that shadow execution found would have changed a label.
    pub shadow_violations: u64,
}

impl PcStats {
    pub fn absorb(&mut self, other: &PcStats) {
        self.compositions += other.compositions;
        self.skipped_a += other.skipped_a;
        self.skipped_b += other.skipped_b;
        self.skipped_c += other.skipped_c;
        self.enqueues += other.enqueues;
        self.queue_peak = self.queue_peak.max(other.queue_peak);
        self.iterations += other.iterations;
        self.updates += other.updates;
        self.shadow_violations += other.shadow_violations;
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PcVerdict {
    /// Every triangle is path consistent.
    Consistent,
    /// The label on `edge` became empty.
    Inconsistent { edge: EdgeRef },
}

impl PcVerdict {
    pub fn is_consistent(self) -> bool {
        matches!(self, PcVerdict::Consistent)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PcOutcome {
    pub verdict: PcVerdict,
    pub stats: PcStats,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Heuristic {
    Weight,
    Cardinality,
    Constrainedness,
}

/// Heuristic value of edge `e` in the current network.
pub fn edge_heuristic(net: &Network, e: EdgeRef, kind: Heuristic) -> u64 {
    match kind {
        Heuristic::Weight => net.get(e.i, e.j).weight() as u64,
        Heuristic::Cardinality => net.get(e.i, e.j).cardinality() as u64,
        Heuristic::Constrainedness => (0..net.n())
            .filter(|&k| k != e.i && k != e.j)
            .map(|k| (net.get(k, e.i).weight() + net.get(e.j, k).weight()) as u64)
            .sum(),
    }
}

/// Worklist of undirected edges; an edge is never present twice.
pub struct EdgeQueue {
    policy: QueuePolicy,
    n: usize,
    member: Vec<bool>,
    keys: Vec<u64>,
    plain: VecDeque<EdgeRef>,
    ordered: BTreeSet<(u64, usize, usize)>,
    len: usize,
}

impl EdgeQueue {
    pub fn new(policy: QueuePolicy, n: usize) -> EdgeQueue {
        let ordered_policy = policy.heuristic().is_some();
        EdgeQueue {
            policy,
            n,
            member: vec![false; n * n],
            keys: if ordered_policy { vec![0; n * n] } else { Vec::new() },
            plain: VecDeque::new(),
            ordered: BTreeSet::new(),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Adds `e` unless already present; ordered policies re-key a present
    /// edge with its current heuristic value. Returns whether it was added.
    pub fn push(&mut self, net: &Network, e: EdgeRef) -> bool {
        let e = e.normalized();
        let slot = e.i * self.n + e.j;
        match self.policy.heuristic() {
            None => {
                if self.member[slot] {
                    return false;
                }
                self.plain.push_back(e);
            }
            Some(h) => {
                let key = edge_heuristic(net, e, h);
                if self.member[slot] {
                    self.ordered.remove(&(self.keys[slot], e.i, e.j));
                    self.ordered.insert((key, e.i, e.j));
                    self.keys[slot] = key;
                    return false;
                }
                self.ordered.insert((key, e.i, e.j));
                self.keys[slot] = key;
            }
        }
        self.member[slot] = true;
        self.len += 1;
        true
    }

    pub fn pop(&mut self) -> Option<EdgeRef> {
        let e = match self.policy {
            QueuePolicy::Fifo => self.plain.pop_front()?,
            QueuePolicy::Lifo => self.plain.pop_back()?,
            _ => {
                let (_, i, j) = self.ordered.pop_first()?;
                EdgeRef { i, j }
            }
        };
        self.member[e.i * self.n + e.j] = false;
        self.len -= 1;
        Some(e)
    }
}

enum Revision {
    Unchanged,
    Changed,
    Emptied,
}

struct Propagator<'a, F> {
    net: &'a mut Network,
    cfg: &'a PcConfig,
    queue: EdgeQueue,
    stats: PcStats,
    on_write: F,
}

impl<F: FnMut(usize, usize, Label)> Propagator<'_, F> {
    fn enqueue(&mut self, e: EdgeRef) {
        if self.queue.push(self.net, e) {
            self.stats.enqueues += 1;
            self.stats.queue_peak = self.stats.queue_peak.max(self.queue.len() as u64);
        }
    }

    fn shadow_check(&mut self, left: Label, right: Label, current: Label) {
        if self.cfg.shadow {
            let full = self.cfg.composition.compose(left, right);
            if current & full != current {
                self.stats.shadow_violations += 1;
            }
        }
    }

    /// `C_xy ← C_xy ∩ left · right`
    fn revise(&mut self, left: Label, right: Label, x: usize, y: usize) -> Revision {
        let current = self.net.get(x, y);
        if self.cfg.skip.b && composes_to_full(left, right) {
            self.stats.skipped_b += 1;
            self.shadow_check(left, right, current);
            return Revision::Unchanged;
        }
        self.stats.compositions += 1;
        let composed = if self.cfg.skip.c {
            match self.cfg.composition.compose_until(left, right, current) {
                Some(l) => l,
                None => {
                    self.stats.skipped_c += 1;
                    self.shadow_check(left, right, current);
                    return Revision::Unchanged;
                }
            }
        } else {
            self.cfg.composition.compose(left, right)
        };
        let t = current & composed;
        if t == current {
            return Revision::Unchanged;
        }
        (self.on_write)(x, y, current);
        self.net.set(x, y, t);
        self.stats.updates += 1;
        if t.is_empty() {
            Revision::Emptied
        } else {
            Revision::Changed
        }
    }

    fn run(mut self) -> PcOutcome {
        let n = self.net.n();
        while let Some(EdgeRef { i, j }) = self.queue.pop() {
            self.stats.iterations += 1;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let cij = self.net.get(i, j);
                match self.revise(cij, self.net.get(j, k), i, k) {
                    Revision::Emptied => return self.fail(EdgeRef::new(i, k)),
                    Revision::Changed => self.enqueue(EdgeRef::new(i, k)),
                    Revision::Unchanged => {}
                }
                match self.revise(self.net.get(k, i), cij, k, j) {
                    Revision::Emptied => return self.fail(EdgeRef::new(k, j)),
                    Revision::Changed => self.enqueue(EdgeRef::new(k, j)),
                    Revision::Unchanged => {}
                }
            }
        }
        PcOutcome { verdict: PcVerdict::Consistent, stats: self.stats }
    }

    fn fail(self, edge: EdgeRef) -> PcOutcome {
        PcOutcome { verdict: PcVerdict::Inconsistent { edge }, stats: self.stats }
    }
}

/// Runs propagation from `seeds`, reporting every label write (with the label
/// it replaced) to `on_write` before it happens.
pub(crate) fn propagate<F>(
    net: &mut Network,
    cfg: &PcConfig,
    seeds: impl IntoIterator<Item = EdgeRef>,
    on_write: F,
) -> PcOutcome
where
    F: FnMut(usize, usize, Label),
{
    let n = net.n();
    if let Some(e) = net.edges().find(|e| net.get(e.i, e.j).is_empty()) {
        return PcOutcome {
            verdict: PcVerdict::Inconsistent { edge: e },
            stats: PcStats::default(),
        };
    }
    let mut p = Propagator {
        queue: EdgeQueue::new(cfg.queue, n),
        net,
        cfg,
        stats: PcStats::default(),
        on_write,
    };
    for e in seeds {
        if cfg.skip.a && p.net.get(e.i, e.j).is_full() {
            p.stats.skipped_a += 2 * (n as u64).saturating_sub(2);
            continue;
        }
        p.enqueue(e);
    }
    p.run()
}

/// Computes the path-consistent closure of `net` in place. Stops as soon as
/// a label becomes empty.
pub fn path_consistency(net: &mut Network, cfg: &PcConfig) -> PcOutcome {
    let seeds: Vec<EdgeRef> = net.edges().collect();
    propagate(net, cfg, seeds, |_, _, _| {})
}

/// Restores path consistency after the label on `changed` was tightened in a
/// previously closed network.
pub fn incremental_path_consistency(net: &mut Network, changed: EdgeRef, cfg: &PcConfig) -> PcOutcome {
    propagate(net, cfg, [changed.normalized()], |_, _, _| {})
}
