use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Tournament, UndirectedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    /// Triangle packing in tournaments.
    #[serde(rename = "TPT")]
    Tpt,
    /// Feedback vertex set in tournaments.
    #[serde(rename = "FVST")]
    Fvst,
    /// Induced P3 packing.
    #[serde(rename = "I2PP")]
    I2pp,
    /// Induced P3 hitting set.
    #[serde(rename = "I2PHS")]
    I2phs,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Tpt => "TPT",
            Problem::Fvst => "FVST",
            Problem::I2pp => "I2PP",
            Problem::I2phs => "I2PHS",
        }
    }

    pub fn on_tournaments(self) -> bool {
        matches!(self, Problem::Tpt | Problem::Fvst)
    }

    /// Packing problems ask for at least `k` objects; hitting problems for at most `k` vertices.
    pub fn is_packing(self) -> bool {
        matches!(self, Problem::Tpt | Problem::I2pp)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "TPT" => Ok(Problem::Tpt),
            "FVST" => Ok(Problem::Fvst),
            "I2PP" => Ok(Problem::I2pp),
            "I2PHS" => Ok(Problem::I2phs),
            _ => Err(format!("unknown problem `{s}` (expected TPT, FVST, I2PP or I2PHS)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Graph(UndirectedGraph),
    Tournament(Tournament),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub problem: Problem,
    pub k: usize,
    pub payload: Payload,
}

impl InstanceSpec {
    /// Fails when the payload kind does not fit the problem.
    pub fn new(problem: Problem, k: usize, payload: Payload) -> Result<Self, String> {
        let fits = match payload {
            Payload::Graph(_) => !problem.on_tournaments(),
            Payload::Tournament(_) => problem.on_tournaments(),
        };
        if !fits {
            return Err(format!("problem {problem} does not match the payload kind"));
        }
        Ok(Self { problem, k, payload })
    }

    pub fn n(&self) -> usize {
        match &self.payload {
            Payload::Graph(g) => g.n(),
            Payload::Tournament(t) => t.n(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate(), last: 0 }
    }

    fn err<T>(&self, line: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line, message: message.into() })
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok((i + 1, l.trim_end_matches('\r')))
            }
            None => self.err(self.last + 1, format!("unexpected end of input, expected {what}")),
        }
    }

    /// Only blank lines may follow the payload.
    fn finish(mut self) -> Result<(), ParseError> {
        for (i, l) in self.inner.by_ref() {
            if !l.trim().is_empty() {
                return Err(ParseError { line: i + 1, message: format!("trailing garbage `{}`", l.trim()) });
            }
        }
        Ok(())
    }
}

fn parse_num(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| ParseError { line, message: format!("expected a non-negative integer, got `{tok}`") })
}

fn read_tournament(lines: &mut Lines<'_>) -> Result<Tournament, ParseError> {
    let (ln, header) = lines.next_line("`tournament <n>` header")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let n = match toks.as_slice() {
        ["tournament", n] => parse_num(n, ln)?,
        _ => return lines.err(ln, format!("expected `tournament <n>`, got `{header}`")),
    };
    let mut rows: Vec<Vec<u8>> = Vec::with_capacity(n);
    for u in 0..n {
        let (ln, row) = lines.next_line(&format!("row {u} of the tournament matrix"))?;
        let row = row.trim();
        if row.len() != n {
            return lines.err(ln, format!("row {u} has {} characters, expected {n}", row.len()));
        }
        for (v, ch) in row.bytes().enumerate() {
            let ok = if u == v { ch == b'-' } else { ch == b'0' || ch == b'1' };
            if !ok {
                return lines.err(ln, format!("invalid character `{}` at column {}", ch as char, v + 1));
            }
        }
        rows.push(row.as_bytes().to_vec());
    }
    for u in 0..n {
        for v in u + 1..n {
            if (rows[u][v] == b'1') == (rows[v][u] == b'1') {
                let line = ln_of_row(lines, n, u);
                return lines.err(line, format!("pair ({u},{v}) must have exactly one arc"));
            }
        }
    }
    Ok(Tournament::from_fn(n, |u, v| rows[u][v] == b'1'))
}

fn ln_of_row(lines: &Lines<'_>, n: usize, u: usize) -> usize {
    lines.last + 1 - n + u
}

fn read_graph(lines: &mut Lines<'_>) -> Result<UndirectedGraph, ParseError> {
    let (ln, header) = lines.next_line("`graph <n> <m>` header")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match toks.as_slice() {
        ["graph", n, m] => (parse_num(n, ln)?, parse_num(m, ln)?),
        _ => return lines.err(ln, format!("expected `graph <n> <m>`, got `{header}`")),
    };
    let mut g = UndirectedGraph::empty(n);
    for i in 0..m {
        let (ln, row) = lines.next_line(&format!("edge {} of {m}", i + 1))?;
        let toks: Vec<&str> = row.split_whitespace().collect();
        let (u, v) = match toks.as_slice() {
            [u, v] => (parse_num(u, ln)?, parse_num(v, ln)?),
            _ => return lines.err(ln, format!("expected `u v`, got `{row}`")),
        };
        if u >= n || v >= n {
            return lines.err(ln, format!("vertex out of range for n = {n}"));
        }
        if u == v {
            return lines.err(ln, format!("self-loop at {u}"));
        }
        if g.has_edge(u, v) {
            return lines.err(ln, format!("duplicate edge {u} {v}"));
        }
        g.insert(u, v);
    }
    for list in &mut g.nbrs {
        list.sort_unstable();
    }
    Ok(g)
}

pub fn parse_tournament(text: &str) -> Result<Tournament, ParseError> {
    let mut lines = Lines::new(text);
    let t = read_tournament(&mut lines)?;
    lines.finish()?;
    Ok(t)
}

pub fn parse_graph(text: &str) -> Result<UndirectedGraph, ParseError> {
    let mut lines = Lines::new(text);
    let g = read_graph(&mut lines)?;
    lines.finish()?;
    Ok(g)
}

pub fn parse_instance(text: &str) -> Result<InstanceSpec, ParseError> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next_line("`problem <P> k <k>` header")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (problem, k) = match toks.as_slice() {
        ["problem", p, "k", k] => {
            let p: Problem = p.parse().map_err(|m| ParseError { line: ln, message: m })?;
            (p, parse_num(k, ln)?)
        }
        _ => return lines.err(ln, format!("expected `problem <TPT|FVST|I2PP|I2PHS> k <k>`, got `{header}`")),
    };
    let payload = if problem.on_tournaments() {
        Payload::Tournament(read_tournament(&mut lines)?)
    } else {
        Payload::Graph(read_graph(&mut lines)?)
    };
    lines.finish()?;
    Ok(InstanceSpec { problem, k, payload })
}

pub fn serialize_tournament(t: &Tournament) -> String {
    let n = t.n();
    let mut s = String::with_capacity((n + 1) * (n + 1) + 16);
    writeln!(s, "tournament {n}").unwrap();
    for u in 0..n {
        for v in 0..n {
            s.push(if u == v {
                '-'
            } else if t.arc(u, v) {
                '1'
            } else {
                '0'
            });
        }
        s.push('\n');
    }
    s
}

pub fn serialize_graph(g: &UndirectedGraph) -> String {
    let edges = g.edges();
    let mut s = String::new();
    writeln!(s, "graph {} {}", g.n(), edges.len()).unwrap();
    for (u, v) in edges {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

pub fn serialize_instance(inst: &InstanceSpec) -> String {
    let body = match &inst.payload {
        Payload::Graph(g) => serialize_graph(g),
        Payload::Tournament(t) => serialize_tournament(t),
    };
    format!("problem {} k {}\n{body}", inst.problem, inst.k)
}
