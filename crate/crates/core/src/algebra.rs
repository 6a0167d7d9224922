//! Basic interval relations, labels (sets of basic relations) and composition.
//!
//! A [`Label`] is a 13-bit set. Bit `i` is the basic relation with index `i`
//! in the canonical order `b bi m mi o oi s si d di f fi eq`. Composition is
//! available through two table schemes that always agree: a 13×13 table of
//! basic compositions walked with a nested loop, and four split tables
//! indexed by the low 7 and high 6 bits of each operand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not};
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

/// One of the thirteen basic relations between two intervals `A` and `B`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Basic {
    /// `A+ < B-`
    Before = 0,
    After = 1,
    /// `A+ = B-`
    Meets = 2,
    MetBy = 3,
    /// `A- < B- < A+ < B+`
    Overlaps = 4,
    OverlappedBy = 5,
    /// `A- = B-`, `A+ < B+`
    Starts = 6,
    StartedBy = 7,
    /// `B- < A-`, `A+ < B+`
    During = 8,
    Contains = 9,
    /// `B- < A-`, `A+ = B+`
    Finishes = 10,
    FinishedBy = 11,
    Equal = 12,
}

use Basic::*;

const NAMES: [&str; 13] = [
    "b", "bi", "m", "mi", "o", "oi", "s", "si", "d", "di", "f", "fi", "eq",
];

const WEIGHTS: [u32; 13] = [3, 3, 2, 2, 4, 4, 2, 2, 4, 3, 2, 2, 1];

impl Basic {
    pub const ALL: [Basic; 13] = [
        Before,
        After,
        Meets,
        MetBy,
        Overlaps,
        OverlappedBy,
        Starts,
        StartedBy,
        During,
        Contains,
        Finishes,
        FinishedBy,
        Equal,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Option<Basic> {
        Basic::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    #[inline]
    pub fn inverse(self) -> Basic {
        match self {
            Equal => Equal,
            // inverse pairs occupy adjacent bits (2k, 2k+1)
            r => Basic::ALL[r.index() ^ 1],
        }
    }

    /// Heuristic weight used by the weight and constrainedness orderings.
    pub fn weight(self) -> u32 {
        WEIGHTS[self.index()]
    }

    /// The basic relation holding between intervals `[a_start, a_end]` and
    /// `[b_start, b_end]`. Both intervals must be proper (`start < end`).
    pub fn between<T: Ord>(a_start: &T, a_end: &T, b_start: &T, b_end: &T) -> Basic {
        debug_assert!(a_start < a_end && b_start < b_end);
        match (a_end.cmp(b_start), b_end.cmp(a_start)) {
            (Ordering::Less, _) => return Before,
            (Ordering::Equal, _) => return Meets,
            (_, Ordering::Less) => return After,
            (_, Ordering::Equal) => return MetBy,
            _ => {}
        }
        match (a_start.cmp(b_start), a_end.cmp(b_end)) {
            (Ordering::Equal, Ordering::Equal) => Equal,
            (Ordering::Equal, Ordering::Less) => Starts,
            (Ordering::Equal, Ordering::Greater) => StartedBy,
            (Ordering::Greater, Ordering::Equal) => Finishes,
            (Ordering::Less, Ordering::Equal) => FinishedBy,
            (Ordering::Greater, Ordering::Less) => During,
            (Ordering::Less, Ordering::Greater) => Contains,
            (Ordering::Less, Ordering::Less) => Overlaps,
            (Ordering::Greater, Ordering::Greater) => OverlappedBy,
        }
    }

    /// A small integer realization `(A-, A+, B-, B+)` of this relation.
    pub fn witness(self) -> [i64; 4] {
        match self {
            Before => [0, 1, 2, 3],
            After => [2, 3, 0, 1],
            Meets => [0, 1, 1, 2],
            MetBy => [1, 2, 0, 1],
            Overlaps => [0, 2, 1, 3],
            OverlappedBy => [1, 3, 0, 2],
            Starts => [0, 1, 0, 2],
            StartedBy => [0, 2, 0, 1],
            During => [1, 2, 0, 3],
            Contains => [0, 3, 1, 2],
            Finishes => [1, 2, 0, 2],
            FinishedBy => [0, 2, 1, 2],
            Equal => [0, 1, 0, 1],
        }
    }

    /// Order of the cross endpoint pairs `(A-,B-)`, `(A-,B+)`, `(A+,B-)`, `(A+,B+)`.
    pub fn endpoint_order(self) -> [Ordering; 4] {
        let [a0, a1, b0, b1] = self.witness();
        [a0.cmp(&b0), a0.cmp(&b1), a1.cmp(&b0), a1.cmp(&b1)]
    }
}

impl fmt::Display for Basic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("unknown relation `{0}`")]
    Unknown(String),
    #[error("empty relation list")]
    Empty,
}

impl FromStr for Basic {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NAMES
            .iter()
            .position(|&n| n == s)
            .map(|i| Basic::ALL[i])
            .ok_or_else(|| LabelError::Unknown(s.to_string()))
    }
}

/// A set of basic relations.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Label(u16);

const FULL_BITS: u16 = (1 << 13) - 1;
const INVERSE_LOW: u16 = 0b0101_0101_0101;

impl Label {
    pub const EMPTY: Label = Label(0);
    /// `I`, every basic relation.
    pub const FULL: Label = Label(FULL_BITS);
    /// `{b, bi}`
    pub const DISJOINT: Label = Label(0b11);
    /// Everything except `b` and `bi`.
    pub const INTERSECTS: Label = Label(FULL_BITS & !0b11);
    /// Number of distinct labels including the empty one.
    pub const COUNT: usize = 1 << 13;

    #[inline]
    pub const fn from_bits(bits: u16) -> Option<Label> {
        if bits & !FULL_BITS == 0 {
            Some(Label(bits))
        } else {
            None
        }
    }

    /// Keeps only the low 13 bits.
    #[inline]
    pub const fn from_bits_truncate(bits: u16) -> Label {
        Label(bits & FULL_BITS)
    }

    #[inline]
    pub const fn bits(self) -> u16 {
        self.0
    }

    #[inline]
    pub const fn singleton(r: Basic) -> Label {
        Label(1 << r as u16)
    }

    pub fn from_relations<I: IntoIterator<Item = Basic>>(rels: I) -> Label {
        rels.into_iter().fold(Label::EMPTY, |acc, r| acc | Label::singleton(r))
    }

    #[inline]
    pub fn contains(self, r: Basic) -> bool {
        self.0 & (1 << r as u16) != 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_full(self) -> bool {
        self.0 == FULL_BITS
    }

    #[inline]
    pub fn is_subset(self, other: Label) -> bool {
        self.0 & !other.0 == 0
    }

    /// Number of basic relations in the label.
    #[inline]
    pub fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    /// Sum of the heuristic weights of the members.
    pub fn weight(self) -> u32 {
        self.iter().map(Basic::weight).sum()
    }

    /// The single member, if the label is a singleton.
    pub fn as_basic(self) -> Option<Basic> {
        if self.cardinality() == 1 {
            Basic::from_index(self.0.trailing_zeros() as usize)
        } else {
            None
        }
    }

    #[inline]
    pub fn inverse(self) -> Label {
        let x = self.0;
        Label(((x & INVERSE_LOW) << 1) | ((x >> 1) & INVERSE_LOW) | (x & (1 << 12)))
    }

    pub fn iter(self) -> impl Iterator<Item = Basic> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(Basic::ALL[i])
        })
    }

    /// All labels, empty one first, in numeric order.
    pub fn all() -> impl Iterator<Item = Label> {
        (0..Label::COUNT as u16).map(Label)
    }
}

impl BitAnd for Label {
    type Output = Label;
    #[inline]
    fn bitand(self, rhs: Label) -> Label {
        Label(self.0 & rhs.0)
    }
}

impl BitAndAssign for Label {
    #[inline]
    fn bitand_assign(&mut self, rhs: Label) {
        self.0 &= rhs.0;
    }
}

impl BitOr for Label {
    type Output = Label;
    #[inline]
    fn bitor(self, rhs: Label) -> Label {
        Label(self.0 | rhs.0)
    }
}

impl BitOrAssign for Label {
    #[inline]
    fn bitor_assign(&mut self, rhs: Label) {
        self.0 |= rhs.0;
    }
}

impl Not for Label {
    type Output = Label;
    #[inline]
    fn not(self) -> Label {
        Label(!self.0 & FULL_BITS)
    }
}

impl From<Basic> for Label {
    fn from(r: Basic) -> Label {
        Label::singleton(r)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_full() {
            return f.write_str("I");
        }
        if self.is_empty() {
            return f.write_str("{}");
        }
        for (k, r) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(r.name())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for Label {
    type Err = LabelError;

    /// Parses `I` or a comma separated list of relation names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "I" {
            return Ok(Label::FULL);
        }
        if s.is_empty() {
            return Err(LabelError::Empty);
        }
        let mut label = Label::EMPTY;
        for tok in s.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(LabelError::Empty);
            }
            label |= Label::singleton(tok.parse()?);
        }
        Ok(label)
    }
}

const LOW_BITS: u32 = 7;
const LOW_MASK: u16 = (1 << LOW_BITS) - 1;
const LOW_SIZE: usize = 1 << 7;
const HIGH_SIZE: usize = 1 << 6;

/// Basic composition table plus the four split tables derived from it.
pub struct CompositionTables {
    pairwise: [[Label; 13]; 13],
    low_low: Vec<Label>,
    low_high: Vec<Label>,
    high_low: Vec<Label>,
    high_high: Vec<Label>,
}

impl CompositionTables {
    /// Derives the 13×13 table by enumerating every weak ordering of the six
    /// endpoints of three intervals `A`, `B`, `C` and recording which `A–C`
    /// relation occurs with each `(A–B, B–C)` pair.
    pub fn build() -> CompositionTables {
        let mut pairwise = [[Label::EMPTY; 13]; 13];
        const LEVELS: i64 = 6;
        for code in 0..LEVELS.pow(6) {
            let mut c = code;
            let mut p = [0i64; 6];
            for slot in p.iter_mut() {
                *slot = c % LEVELS;
                c /= LEVELS;
            }
            let [a0, a1, b0, b1, c0, c1] = p;
            if a0 >= a1 || b0 >= b1 || c0 >= c1 {
                continue;
            }
            let ab = Basic::between(&a0, &a1, &b0, &b1);
            let bc = Basic::between(&b0, &b1, &c0, &c1);
            let ac = Basic::between(&a0, &a1, &c0, &c1);
            pairwise[ab.index()][bc.index()] |= Label::singleton(ac);
        }

        let nested = |x: u16, y: u16| nested_compose(&pairwise, Label(x), Label(y));
        let mut low_low = vec![Label::EMPTY; LOW_SIZE * LOW_SIZE];
        let mut low_high = vec![Label::EMPTY; LOW_SIZE * HIGH_SIZE];
        let mut high_low = vec![Label::EMPTY; HIGH_SIZE * LOW_SIZE];
        let mut high_high = vec![Label::EMPTY; HIGH_SIZE * HIGH_SIZE];
        for x in 0..LOW_SIZE as u16 {
            for y in 0..LOW_SIZE as u16 {
                low_low[x as usize * LOW_SIZE + y as usize] = nested(x, y);
            }
            for y in 0..HIGH_SIZE as u16 {
                low_high[x as usize * HIGH_SIZE + y as usize] = nested(x, y << LOW_BITS);
            }
        }
        for x in 0..HIGH_SIZE as u16 {
            for y in 0..LOW_SIZE as u16 {
                high_low[x as usize * LOW_SIZE + y as usize] = nested(x << LOW_BITS, y);
            }
            for y in 0..HIGH_SIZE as u16 {
                high_high[x as usize * HIGH_SIZE + y as usize] =
                    nested(x << LOW_BITS, y << LOW_BITS);
            }
        }

        CompositionTables {
            pairwise,
            low_low,
            low_high,
            high_low,
            high_high,
        }
    }

    /// Process-wide tables, built on first use.
    pub fn global() -> &'static CompositionTables {
        static TABLES: OnceLock<CompositionTables> = OnceLock::new();
        TABLES.get_or_init(CompositionTables::build)
    }

    #[inline]
    pub fn basic(&self, r1: Basic, r2: Basic) -> Label {
        self.pairwise[r1.index()][r2.index()]
    }

    /// Union of the basic compositions of every member pair.
    #[inline]
    pub fn compose_pairwise(&self, x: Label, y: Label) -> Label {
        nested_compose(&self.pairwise, x, y)
    }

    /// Union of four split-table lookups.
    #[inline]
    pub fn compose_split(&self, x: Label, y: Label) -> Label {
        let (xl, xh) = split(x);
        let (yl, yh) = split(y);
        self.low_low[xl * LOW_SIZE + yl]
            | self.low_high[xl * HIGH_SIZE + yh]
            | self.high_low[xh * LOW_SIZE + yl]
            | self.high_high[xh * HIGH_SIZE + yh]
    }

    /// Pairwise composition that stops once the union accumulated so far
    /// covers `target`, checked after every row. Returns `None` when it stopped
    /// early, in which case intersecting with `target` could not change it.
    pub fn compose_pairwise_until(&self, x: Label, y: Label, target: Label) -> Option<Label> {
        let mut acc = Label::EMPTY;
        for r1 in x.iter() {
            let row = &self.pairwise[r1.index()];
            for r2 in y.iter() {
                acc |= row[r2.index()];
            }
            if target.is_subset(acc) {
                return None;
            }
        }
        Some(acc)
    }

    /// Split composition that stops once the union covers `target`, checked
    /// after each of the four lookups.
    pub fn compose_split_until(&self, x: Label, y: Label, target: Label) -> Option<Label> {
        let (xl, xh) = split(x);
        let (yl, yh) = split(y);
        let mut acc = self.low_low[xl * LOW_SIZE + yl];
        if target.is_subset(acc) {
            return None;
        }
        acc |= self.low_high[xl * HIGH_SIZE + yh];
        if target.is_subset(acc) {
            return None;
        }
        acc |= self.high_low[xh * LOW_SIZE + yl];
        if target.is_subset(acc) {
            return None;
        }
        acc |= self.high_high[xh * HIGH_SIZE + yh];
        if target.is_subset(acc) {
            return None;
        }
        Some(acc)
    }
}

#[inline]
fn split(x: Label) -> (usize, usize) {
    ((x.0 & LOW_MASK) as usize, (x.0 >> LOW_BITS) as usize)
}

#[inline]
fn nested_compose(table: &[[Label; 13]; 13], x: Label, y: Label) -> Label {
    let mut acc = Label::EMPTY;
    for r1 in x.iter() {
        let row = &table[r1.index()];
        for r2 in y.iter() {
            acc |= row[r2.index()];
        }
    }
    acc
}

/// Which composition scheme to use.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum Composition {
    /// Nested loop over the 13×13 table.
    Pairwise,
    /// Four lookups into the split tables.
    #[default]
    Split,
}

impl Composition {
    pub const ALL: [Composition; 2] = [Composition::Pairwise, Composition::Split];

    #[inline]
    pub fn compose(self, x: Label, y: Label) -> Label {
        let t = CompositionTables::global();
        match self {
            Composition::Pairwise => t.compose_pairwise(x, y),
            Composition::Split => t.compose_split(x, y),
        }
    }

    #[inline]
    pub fn compose_until(self, x: Label, y: Label, target: Label) -> Option<Label> {
        let t = CompositionTables::global();
        match self {
            Composition::Pairwise => t.compose_pairwise_until(x, y, target),
            Composition::Split => t.compose_split_until(x, y, target),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Composition::Pairwise => "pairwise",
            Composition::Split => "split",
        }
    }
}

impl FromStr for Composition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pairwise" => Ok(Composition::Pairwise),
            "split" => Ok(Composition::Split),
            other => Err(format!("unknown composition method `{other}`")),
        }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `C_ij · C_jk` is certain to be `I` when one of `b·bi`, `bi·b` or `d·di`
/// is among the member pairs.
#[inline]
pub fn composes_to_full(x: Label, y: Label) -> bool {
    (x.contains(Before) && y.contains(After))
        || (x.contains(After) && y.contains(Before))
        || (x.contains(During) && y.contains(Contains))
}
