//! Pointizable (SA) and ORD-Horn (NB) labels and the decomposition of
//! arbitrary labels into blocks from those classes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::algebra::{Basic, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("the empty label has no class membership or decomposition")]
pub struct EmptyLabelError;

/// Branching vocabulary for the backtracking search.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// Single basic relations.
    Si,
    /// Maximal pointizable blocks.
    #[default]
    Sa,
    /// Maximal ORD-Horn blocks.
    Nb,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Si, Method::Sa, Method::Nb];

    pub fn name(self) -> &'static str {
        match self {
            Method::Si => "si",
            Method::Sa => "sa",
            Method::Nb => "nb",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "si" => Ok(Method::Si),
            "sa" => Ok(Method::Sa),
            "nb" => Ok(Method::Nb),
            other => Err(format!("unknown decomposition method `{other}`")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Point-relation sets induced by a label on the cross endpoint pairs
/// `(A-,B-)`, `(A-,B+)`, `(A+,B-)`, `(A+,B+)`. Each entry is a subset of
/// `{<, =, >}` encoded as bits 0, 1, 2.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct EndpointForm(pub [u8; 4]);

fn order_bit(o: Ordering) -> u8 {
    match o {
        Ordering::Less => 1,
        Ordering::Equal => 2,
        Ordering::Greater => 4,
    }
}

impl EndpointForm {
    pub fn of(x: Label) -> EndpointForm {
        let mut sets = [0u8; 4];
        for r in x.iter() {
            for (s, o) in sets.iter_mut().zip(r.endpoint_order()) {
                *s |= order_bit(o);
            }
        }
        EndpointForm(sets)
    }

    pub fn admits(&self, r: Basic) -> bool {
        self.0
            .iter()
            .zip(r.endpoint_order())
            .all(|(s, o)| s & order_bit(o) != 0)
    }

    /// Every basic relation compatible with the four point-relation sets.
    pub fn closure(&self) -> Label {
        Label::from_relations(Basic::ALL.into_iter().filter(|&r| self.admits(r)))
    }
}

/// A membership set over all 8192 labels.
#[derive(Clone, PartialEq, Eq)]
pub struct LabelSet(Box<[u64; Label::COUNT / 64]>);

impl LabelSet {
    pub fn empty() -> LabelSet {
        LabelSet(Box::new([0; Label::COUNT / 64]))
    }

    pub fn from_fn(mut f: impl FnMut(Label) -> bool) -> LabelSet {
        let mut s = LabelSet::empty();
        for x in Label::all() {
            if f(x) {
                s.insert(x);
            }
        }
        s
    }

    #[inline]
    pub fn contains(&self, x: Label) -> bool {
        let b = x.bits() as usize;
        self.0[b / 64] >> (b % 64) & 1 != 0
    }

    #[inline]
    pub fn insert(&mut self, x: Label) -> bool {
        let b = x.bits() as usize;
        let fresh = !self.contains(x);
        self.0[b / 64] |= 1 << (b % 64);
        fresh
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        Label::all().filter(|&x| self.contains(x))
    }

    pub fn is_subset(&self, other: &LabelSet) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabelSet({} labels)", self.len())
    }
}

/// Builds the pointizable table: a label belongs when it equals the closure
/// of its own endpoint form.
pub fn build_sa_table() -> LabelSet {
    LabelSet::from_fn(|x| !x.is_empty() && EndpointForm::of(x).closure() == x)
}

#[derive(Copy, Clone)]
enum PointLiteral {
    Ne(usize, usize),
    Le(usize, usize),
    Eq(usize, usize),
}

impl PointLiteral {
    /// Endpoints are indexed `A-, A+, B-, B+`.
    fn holds(self, p: &[i64; 4]) -> bool {
        match self {
            PointLiteral::Ne(x, y) => p[x] != p[y],
            PointLiteral::Le(x, y) => p[x] <= p[y],
            PointLiteral::Eq(x, y) => p[x] == p[y],
        }
    }
}

/// Builds the ORD-Horn table.
///
/// Each clause is a disjunction of any number of `x != y` literals and at
/// most one `x <= y` or `x = y` literal over the four endpoints. A clause
/// denotes the label of basic relations satisfying it; the ORD-Horn labels
/// are the nonempty intersections of such clause labels, with `I` as the
/// empty conjunction.
pub fn build_nb_table() -> LabelSet {
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut positives: Vec<Option<PointLiteral>> = vec![None];
    for x in 0..4 {
        for y in 0..4 {
            if x != y {
                positives.push(Some(PointLiteral::Le(x, y)));
            }
        }
    }
    positives.extend(PAIRS.iter().map(|&(x, y)| Some(PointLiteral::Eq(x, y))));

    let witnesses: Vec<(Basic, [i64; 4])> = Basic::ALL.iter().map(|&r| (r, r.witness())).collect();
    let mut clause_labels = LabelSet::empty();
    for mask in 0u32..(1 << PAIRS.len()) {
        let negatives = PAIRS
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 != 0)
            .map(|(_, &(x, y))| PointLiteral::Ne(x, y));
        let negatives: Vec<PointLiteral> = negatives.collect();
        for pos in &positives {
            if negatives.is_empty() && pos.is_none() {
                continue;
            }
            let lits: Vec<PointLiteral> = negatives.iter().copied().chain(*pos).collect();
            let label = Label::from_relations(
                witnesses
                    .iter()
                    .filter(|(_, p)| lits.iter().any(|l| l.holds(p)))
                    .map(|&(r, _)| r),
            );
            clause_labels.insert(label);
        }
    }
    let clauses: Vec<Label> = clause_labels.iter().collect();

    let mut table = LabelSet::empty();
    table.insert(Label::FULL);
    let mut frontier = vec![Label::FULL];
    while let Some(x) = frontier.pop() {
        for &c in &clauses {
            let y = x & c;
            if !y.is_empty() && table.insert(y) {
                frontier.push(y);
            }
        }
    }
    table
}

/// Precomputed class tables and decompositions for every label.
pub struct Catalog {
    sa: LabelSet,
    nb: LabelSet,
    offsets: [Vec<u32>; 3],
    blocks: [Vec<Label>; 3],
}

impl Catalog {
    pub fn build() -> Catalog {
        let sa = build_sa_table();
        let nb = build_nb_table();
        let mut offsets: [Vec<u32>; 3] = Default::default();
        let mut blocks: [Vec<Label>; 3] = Default::default();
        for (m, method) in Method::ALL.into_iter().enumerate() {
            offsets[m].reserve(Label::COUNT + 1);
            offsets[m].push(0);
            for x in Label::all() {
                match method {
                    Method::Si => blocks[m].extend(x.iter().map(Label::singleton)),
                    Method::Sa => greedy_partition(x, &sa, &mut blocks[m]),
                    Method::Nb => greedy_partition(x, &nb, &mut blocks[m]),
                }
                offsets[m].push(blocks[m].len() as u32);
            }
        }
        Catalog { sa, nb, offsets, blocks }
    }

    /// Process-wide catalog, built on first use.
    pub fn global() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(Catalog::build)
    }

    pub fn pointizable(&self) -> &LabelSet {
        &self.sa
    }

    pub fn ord_horn(&self) -> &LabelSet {
        &self.nb
    }

    pub fn is_member(&self, x: Label, method: Method) -> bool {
        match method {
            Method::Si => x.cardinality() == 1,
            Method::Sa => self.sa.contains(x),
            Method::Nb => self.nb.contains(x),
        }
    }

    /// Blocks of `x`; empty slice for the empty label.
    #[inline]
    pub fn blocks(&self, x: Label, method: Method) -> &[Label] {
        let m = method as usize;
        let b = x.bits() as usize;
        let (lo, hi) = (self.offsets[m][b] as usize, self.offsets[m][b + 1] as usize);
        &self.blocks[m][lo..hi]
    }

    pub fn decompose(&self, x: Label, method: Method) -> Result<&[Label], EmptyLabelError> {
        if x.is_empty() {
            return Err(EmptyLabelError);
        }
        Ok(self.blocks(x, method))
    }

    #[inline]
    pub fn block_count(&self, x: Label, method: Method) -> usize {
        self.blocks(x, method).len()
    }

    /// One line per label: bits, label text, membership flags and the three
    /// decompositions separated by `|`.
    pub fn dump(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("# bits label sa nb | si | sa | nb\n");
        for x in Label::all().skip(1) {
            write!(
                out,
                "{} {} {} {}",
                x.bits(),
                x,
                self.sa.contains(x) as u8,
                self.nb.contains(x) as u8
            )
            .unwrap();
            for method in Method::ALL {
                out.push_str(" |");
                for b in self.blocks(x, method) {
                    write!(out, " {{{b}}}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Repeatedly removes a maximum-cardinality member subset of what remains.
/// Among equally large candidates the one holding the lowest differing
/// relation index wins.
fn greedy_partition(x: Label, class: &LabelSet, out: &mut Vec<Label>) {
    let mut rest = x.bits();
    while rest != 0 {
        let mut best: u16 = 0;
        let mut sub = rest;
        loop {
            if class.contains(Label::from_bits_truncate(sub)) {
                let (cs, cb) = (sub.count_ones(), best.count_ones());
                let better = cs > cb || (cs == cb && {
                    let diff = sub ^ best;
                    diff != 0 && sub & (diff & diff.wrapping_neg()) != 0
                });
                if better {
                    best = sub;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        assert_ne!(best, 0, "singletons belong to every class");
        out.push(Label::from_bits_truncate(best));
        rest &= !best;
    }
}

pub fn is_pointizable(x: Label) -> Result<bool, EmptyLabelError> {
    if x.is_empty() {
        return Err(EmptyLabelError);
    }
    Ok(Catalog::global().pointizable().contains(x))
}

pub fn is_ord_horn(x: Label) -> Result<bool, EmptyLabelError> {
    if x.is_empty() {
        return Err(EmptyLabelError);
    }
    Ok(Catalog::global().ord_horn().contains(x))
}

pub fn decompose(x: Label, method: Method) -> Result<&'static [Label], EmptyLabelError> {
    Catalog::global().decompose(x, method)
}
