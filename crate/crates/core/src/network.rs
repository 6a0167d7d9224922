//! IA networks and their text formats.
//!
//! Edge-list format:
//!
//! ```text
//! # comment
//! n 3
//! name 0 Goal
//! 0 1 b,m
//! 1 2 I
//! ```
//!
//! Matrix format (`1` intersects, `0` disjoint, `?` unknown):
//!
//! ```text
//! matrix 3
//! ? 1 0
//! 1 ? ?
//! 0 ? ?
//! ```

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::algebra::{Label, LabelError};

/// Upper bound on vertex counts accepted by the parsers.
pub const MAX_VERTICES: usize = 4096;

/// A directed edge `(i, j)` with `i != j`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub i: usize,
    pub j: usize,
}

impl EdgeRef {
    pub fn new(i: usize, j: usize) -> EdgeRef {
        debug_assert_ne!(i, j);
        EdgeRef { i, j }
    }

    /// The same undirected edge with `i < j`.
    pub fn normalized(self) -> EdgeRef {
        if self.i < self.j {
            self
        } else {
            EdgeRef { i: self.j, j: self.i }
        }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// The constraint matrix `C` over `n` events.
#[derive(Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    labels: Vec<Label>,
    names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Diagonal { i: usize, label: Label },
    Asymmetric { i: usize, j: usize },
    Empty { i: usize, j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Diagonal { i, label } => {
                write!(f, "diagonal entry ({i}, {i}) is {label:?}, expected {{eq}}")
            }
            Violation::Asymmetric { i, j } => {
                write!(f, "label on ({j}, {i}) is not the inverse of ({i}, {j})")
            }
            Violation::Empty { i, j } => write!(f, "edge ({i}, {j}) has an empty label"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header")]
    MissingHeader,
    #[error("malformed header `{0}`")]
    BadHeader(String),
    #[error("vertex count {0} exceeds the limit of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("vertex index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("edge ({i}, {j}) must be written with i < j")]
    NotAscending { i: usize, j: usize },
    #[error("edge ({i}, {j}) listed twice with different labels")]
    ConflictingDuplicate { i: usize, j: usize },
    #[error("vertex {0} named twice")]
    DuplicateName(usize),
    #[error("expected {expected} entries, found {found}")]
    NonSquare { expected: usize, found: usize },
    #[error("entries ({i}, {j}) and ({j}, {i}) differ")]
    Asymmetric { i: usize, j: usize },
    #[error("unknown matrix symbol `{0}`")]
    UnknownSymbol(String),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl Network {
    /// A network over `n` events with every edge labeled `I`.
    pub fn new(n: usize) -> Network {
        let mut labels = vec![Label::FULL; n * n];
        for i in 0..n {
            labels[i * n + i] = Label::singleton(crate::algebra::Basic::Equal);
        }
        Network {
            n,
            labels,
            names: vec![String::new(); n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Label {
        self.labels[i * self.n + j]
    }

    /// Sets `C_ij` and mirrors its inverse onto `C_ji`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, label: Label) {
        assert_ne!(i, j, "diagonal entries are fixed");
        self.labels[i * self.n + j] = label;
        self.labels[j * self.n + i] = label.inverse();
    }

    /// Intersects `C_ij` with `label`; returns the new label.
    pub fn constrain(&mut self, i: usize, j: usize, label: Label) -> Label {
        let t = self.get(i, j) & label;
        self.set(i, j, t);
        t
    }

    /// Raw row-major label matrix.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Overwrites a single matrix cell without mirroring; for tests of
    /// [`Network::validate`].
    #[doc(hidden)]
    pub fn set_raw(&mut self, i: usize, j: usize, label: Label) {
        self.labels[i * self.n + j] = label;
    }

    /// Edges with `i < j`, row by row.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| EdgeRef { i, j }))
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn name(&self, i: usize) -> Option<&str> {
        self.names.get(i).map(String::as_str).filter(|s| !s.is_empty())
    }

    pub fn set_name(&mut self, i: usize, name: impl Into<String>) {
        self.names[i] = name.into();
    }

    /// The name of `i`, or its index when unnamed.
    pub fn display_name(&self, i: usize) -> String {
        self.name(i).map_or_else(|| i.to_string(), str::to_string)
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn has_names(&self) -> bool {
        self.names.iter().any(|s| !s.is_empty())
    }

    /// Same labels, ignoring names.
    pub fn same_labels(&self, other: &Network) -> bool {
        self.n == other.n && self.labels == other.labels
    }

    /// Whether every off-diagonal label is a single basic relation.
    pub fn is_atomic(&self) -> bool {
        self.edges().all(|e| self.get(e.i, e.j).cardinality() == 1)
    }

    /// Checks the identity diagonal, inverse symmetry, and non-emptiness.
    pub fn validate(&self) -> Vec<Violation> {
        let eq = Label::singleton(crate::algebra::Basic::Equal);
        let mut out = Vec::new();
        for i in 0..self.n {
            let d = self.get(i, i);
            if d != eq {
                out.push(Violation::Diagonal { i, label: d });
            }
        }
        for EdgeRef { i, j } in self.edges() {
            let a = self.get(i, j);
            let b = self.get(j, i);
            if b != a.inverse() {
                out.push(Violation::Asymmetric { i, j });
            }
            if a.is_empty() || b.is_empty() {
                out.push(Violation::Empty { i, j });
            }
        }
        out
    }

    /// Parses either text format, chosen by the first header token.
    pub fn load(text: &str) -> Result<Network, ParseError> {
        match content_lines(text).next() {
            Some((_, l)) if l.split_whitespace().next() == Some("matrix") => {
                Network::parse_matrix(text)
            }
            _ => Network::parse(text),
        }
    }

    /// Parses the edge-list format.
    pub fn parse(text: &str) -> Result<Network, ParseError> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or_else(|| err(0, ParseErrorKind::MissingHeader))?;
        let n = parse_header(hline, header, "n")?;
        let mut net = Network::new(n);
        let mut seen = vec![false; n * n];

        for (line, l) in lines {
            let mut toks = l.split_whitespace();
            let first = toks.next().unwrap_or_default();
            if first == "name" {
                let rest = l["name".len()..].trim_start();
                let (idx, name) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err(line, ParseErrorKind::Malformed("expected `name <i> <text>`".into())))?;
                let i = parse_index(line, idx, n)?;
                if !net.names[i].is_empty() {
                    return Err(err(line, ParseErrorKind::DuplicateName(i)));
                }
                net.names[i] = name.trim().to_string();
                continue;
            }
            let (Some(js), Some(rel), None) = (toks.next(), toks.next(), toks.next()) else {
                return Err(err(
                    line,
                    ParseErrorKind::Malformed("expected `<i> <j> <relations>`".into()),
                ));
            };
            let i = parse_index(line, first, n)?;
            let j = parse_index(line, js, n)?;
            if i >= j {
                return Err(err(line, ParseErrorKind::NotAscending { i, j }));
            }
            let label: Label = rel.parse().map_err(|e| err(line, ParseErrorKind::Label(e)))?;
            if seen[i * n + j] && net.get(i, j) != label {
                return Err(err(line, ParseErrorKind::ConflictingDuplicate { i, j }));
            }
            seen[i * n + j] = true;
            net.set(i, j, label);
        }
        Ok(net)
    }

    /// Parses the intersects/disjoint matrix format.
    pub fn parse_matrix(text: &str) -> Result<Network, ParseError> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or_else(|| err(0, ParseErrorKind::MissingHeader))?;
        let n = parse_header(hline, header, "matrix")?;
        let mut cells = vec![Label::FULL; n * n];
        let mut rows = 0;
        let mut last_line = hline;
        for (line, l) in lines {
            last_line = line;
            if rows == n {
                return Err(err(line, ParseErrorKind::NonSquare { expected: n, found: rows + 1 }));
            }
            let syms: Vec<&str> = l.split_whitespace().collect();
            if syms.len() != n {
                return Err(err(line, ParseErrorKind::NonSquare { expected: n, found: syms.len() }));
            }
            for (j, s) in syms.into_iter().enumerate() {
                cells[rows * n + j] = match s {
                    "1" => Label::INTERSECTS,
                    "0" => Label::DISJOINT,
                    "?" => Label::FULL,
                    other => return Err(err(line, ParseErrorKind::UnknownSymbol(other.into()))),
                };
            }
            for j in 0..rows {
                if cells[rows * n + j] != cells[j * n + rows] {
                    return Err(err(line, ParseErrorKind::Asymmetric { i: j, j: rows }));
                }
            }
            rows += 1;
        }
        if rows != n {
            return Err(err(last_line, ParseErrorKind::NonSquare { expected: n, found: rows }));
        }
        let mut net = Network::new(n);
        for EdgeRef { i, j } in (0..n).flat_map(|i| (i + 1..n).map(move |j| EdgeRef { i, j })) {
            net.set(i, j, cells[i * n + j]);
        }
        Ok(net)
    }

    /// Canonical edge-list text: header, names, then every non-`I` edge with
    /// `i < j`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n {}", self.n).unwrap();
        for (i, name) in self.names.iter().enumerate() {
            if !name.is_empty() {
                writeln!(out, "name {i} {name}").unwrap();
            }
        }
        for EdgeRef { i, j } in self.edges() {
            let l = self.get(i, j);
            if !l.is_full() {
                writeln!(out, "{i} {j} {l}").unwrap();
            }
        }
        out
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

fn parse_header(line: usize, text: &str, keyword: &str) -> Result<usize, ParseError> {
    let bad = || err(line, ParseErrorKind::BadHeader(text.to_string()));
    let mut toks = text.split_whitespace();
    if toks.next() != Some(keyword) {
        return Err(bad());
    }
    let n: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
    if toks.next().is_some() {
        return Err(bad());
    }
    if n > MAX_VERTICES {
        return Err(err(line, ParseErrorKind::TooManyVertices(n)));
    }
    Ok(n)
}

fn parse_index(line: usize, tok: &str, n: usize) -> Result<usize, ParseError> {
    let index: usize = tok
        .parse()
        .map_err(|_| err(line, ParseErrorKind::Malformed(format!("bad vertex index `{tok}`"))))?;
    if index >= n {
        return Err(err(line, ParseErrorKind::IndexOutOfRange { index, n }));
    }
    Ok(index)
}

/// The blocks-world planning network over nine events.
pub fn blocks_world() -> Network {
    Network::parse(BLOCKS_WORLD).expect("fixture parses")
}

/// The blocks-world network with `On(A,B) {b} On(B,C)` added.
pub fn blocks_world_inconsistent() -> Network {
    let mut net = blocks_world();
    let on_ab = net.find("On(A,B)").unwrap();
    let on_bc = net.find("On(B,C)").unwrap();
    net.set(on_ab, on_bc, "b".parse().unwrap());
    net
}

pub const BLOCKS_WORLD: &str = "\
# Three blocks start on the table; the goal is A on B on C.
n 9
name 0 Initial
name 1 Clear(A)
name 2 Clear(B)
name 3 Clear(C)
name 4 Stack(A,B)
name 5 Stack(B,C)
name 6 On(A,B)
name 7 On(B,C)
name 8 Goal
# Initial {d} Clear(x)
0 1 d
0 2 d
0 3 d
# Stack(A,B) {bi,mi} Initial, written from Initial's side
0 4 b,m
0 5 b,m
# Stack(A,B) {d} Clear(A), Stack(A,B) {f} Clear(B)
1 4 di
2 4 fi
# Stack(B,C) {d} Clear(B), Stack(B,C) {f} Clear(C)
2 5 di
3 5 fi
# Stack(x,y) {m} On(x,y)
4 6 m
5 7 m
# Goal {d} On(x,y)
6 8 di
7 8 di
";
