//! Solution files and their validity checks.
//!
//! Format: a header `packing <m>` followed by `m` lines of three vertex ids, or a
//! header `vertices <m>` followed by one line of `m` vertex ids (empty when `m = 0`).

use std::fmt::Write;

use crate::exact::Witness;
use crate::graph::{InstanceSpec, ParseError, Payload};

pub fn serialize_witness(w: &Witness) -> String {
    let mut s = String::new();
    match w {
        Witness::Packing(p) => {
            writeln!(s, "packing {}", p.len()).unwrap();
            for [a, b, c] in p {
                writeln!(s, "{a} {b} {c}").unwrap();
            }
        }
        Witness::VertexSet(x) => {
            writeln!(s, "vertices {}", x.len()).unwrap();
            let ids: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            writeln!(s, "{}", ids.join(" ")).unwrap();
        }
    }
    s
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

fn ids(tok: &str, line: usize) -> Result<Vec<usize>, ParseError> {
    tok.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| ParseError { line, message: format!("expected a vertex id, got `{t}`") })
        })
        .collect()
}

pub fn parse_witness(text: &str) -> Result<Witness, ParseError> {
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let Some(header) = lines.first() else { return err(1, "empty solution file") };
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (kind, m) = match toks.as_slice() {
        [kind @ ("packing" | "vertices"), m] => {
            (*kind, m.parse::<usize>().map_err(|_| ParseError { line: 1, message: format!("bad count `{m}`") })?)
        }
        _ => return err(1, format!("expected `packing <m>` or `vertices <m>`, got `{header}`")),
    };
    let body_len = if kind == "packing" { m } else { 1 };
    for (i, l) in lines.iter().enumerate().skip(1 + body_len) {
        if !l.trim().is_empty() {
            return err(i + 1, format!("trailing garbage `{}`", l.trim()));
        }
    }
    if kind == "packing" {
        let mut p = Vec::with_capacity(m);
        for i in 0..m {
            let Some(l) = lines.get(1 + i) else { return err(2 + i, "unexpected end of input, expected a triple") };
            match ids(l, 2 + i)?.as_slice() {
                &[a, b, c] => p.push([a, b, c]),
                _ => return err(2 + i, format!("expected three vertex ids, got `{l}`")),
            }
        }
        Ok(Witness::Packing(p))
    } else {
        let x = match lines.get(1) {
            Some(l) => ids(l, 2)?,
            None if m == 0 => Vec::new(),
            None => return err(2, "unexpected end of input, expected the vertex list"),
        };
        if x.len() != m {
            return err(2, format!("header announces {m} vertices, line has {}", x.len()));
        }
        Ok(Witness::VertexSet(x))
    }
}

/// Whether the size of a feasible `w` certifies a yes-answer for `inst`.
pub fn meets_k(inst: &InstanceSpec, w: &Witness) -> bool {
    match w {
        Witness::Packing(p) => p.len() >= inst.k,
        Witness::VertexSet(x) => x.len() <= inst.k,
    }
}

/// Checks feasibility: disjoint obstructions for packing problems, a set hitting every
/// obstruction for hitting problems. The size is not compared with `k`.
pub fn check_witness(inst: &InstanceSpec, w: &Witness) -> Result<(), String> {
    let n = inst.n();
    let is_obstruction = |a: usize, b: usize, c: usize| match &inst.payload {
        Payload::Tournament(t) => t.is_triangle(a, b, c),
        Payload::Graph(g) => g.is_induced_p3(a, b, c),
    };
    match (w, inst.problem.is_packing()) {
        (Witness::Packing(p), true) => {
            let mut used = vec![false; n];
            for &[a, b, c] in p {
                if a >= n || b >= n || c >= n || a == b || b == c || a == c {
                    return Err(format!("triple {a} {b} {c} is not three distinct vertices of the instance"));
                }
                if !is_obstruction(a, b, c) {
                    return Err(format!("triple {a} {b} {c} is not an obstruction"));
                }
                for v in [a, b, c] {
                    if std::mem::replace(&mut used[v], true) {
                        return Err(format!("vertex {v} is used twice"));
                    }
                }
            }
            Ok(())
        }
        (Witness::VertexSet(x), false) => {
            let mut removed = vec![false; n];
            for &v in x {
                if v >= n {
                    return Err(format!("vertex {v} is out of range"));
                }
                if std::mem::replace(&mut removed[v], true) {
                    return Err(format!("vertex {v} is listed twice"));
                }
            }
            let rest: Vec<usize> = (0..n).filter(|&v| !removed[v]).collect();
            let left = match &inst.payload {
                Payload::Tournament(t) => crate::graph::enumerate_triangles(t, &rest),
                Payload::Graph(g) => crate::graph::enumerate_induced_p3(g, &rest),
            };
            match left.first() {
                Some([a, b, c]) => Err(format!("obstruction {a} {b} {c} survives")),
                None => Ok(()),
            }
        }
        _ => Err(format!("solution kind does not fit problem {}", inst.problem)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_instance;

    #[test]
    fn round_trip_and_checks() {
        let inst = parse_instance("problem FVST k 1\ntournament 3\n-10\n0-1\n10-\n").unwrap();
        let x = Witness::VertexSet(vec![2]);
        assert_eq!(parse_witness(&serialize_witness(&x)).unwrap(), x);
        assert!(check_witness(&inst, &x).is_ok());
        assert!(meets_k(&inst, &x));
        assert!(check_witness(&inst, &Witness::VertexSet(vec![])).is_err());
        assert!(check_witness(&inst, &Witness::VertexSet(vec![1, 1])).is_err());
        let two = Witness::VertexSet(vec![0, 1]);
        assert!(check_witness(&inst, &two).is_ok() && !meets_k(&inst, &two));

        let inst = parse_instance("problem TPT k 1\ntournament 3\n-10\n0-1\n10-\n").unwrap();
        let p = Witness::Packing(vec![[0, 1, 2]]);
        assert_eq!(parse_witness(&serialize_witness(&p)).unwrap(), p);
        assert!(check_witness(&inst, &p).is_ok());
        assert!(check_witness(&inst, &x).is_err());
        assert!(check_witness(&inst, &Witness::Packing(vec![[0, 1, 2], [2, 1, 0]])).is_err());
        assert!(!meets_k(&inst, &Witness::Packing(vec![])));

        let empty = Witness::VertexSet(vec![]);
        assert_eq!(parse_witness(&serialize_witness(&empty)).unwrap(), empty);
        assert_eq!(parse_witness("vertices 0\n").unwrap(), empty);
        assert_eq!(parse_witness("packing 1\n0 1 2\nx\n").unwrap_err().line, 3);
        assert_eq!(parse_witness("vertices 2\n1\n").unwrap_err().line, 2);
    }
}
