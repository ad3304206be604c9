use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A loop on one vertex or an edge between two distinct vertices (stored with `u < v`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeShape {
    Loop(usize),
    Pair(usize, usize),
}

impl EdgeShape {
    pub fn pair(u: usize, v: usize) -> Self {
        if u == v {
            EdgeShape::Loop(u)
        } else {
            EdgeShape::Pair(u.min(v), u.max(v))
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        match *self {
            EdgeShape::Loop(v) => v == x,
            EdgeShape::Pair(u, v) => u == x || v == x,
        }
    }

    pub fn intersects(&self, other: &EdgeShape) -> bool {
        self.endpoints().iter().flatten().any(|&x| other.contains(x))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.endpoints().into_iter().flatten()
    }

    /// Endpoints as a fixed array; the second slot is `None` for loops.
    pub fn endpoints(&self) -> [Option<usize>; 2] {
        match *self {
            EdgeShape::Loop(v) => [Some(v), None],
            EdgeShape::Pair(u, v) => [Some(u), Some(v)],
        }
    }

    pub fn size(&self) -> usize {
        match self {
            EdgeShape::Loop(_) => 1,
            EdgeShape::Pair(..) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColoredEdge {
    pub shape: EdgeShape,
    pub color: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoredGraphError {
    #[error("edge {0:?} uses a vertex outside 0..{1}")]
    VertexOutOfRange(EdgeShape, usize),
    #[error("color {0} outside 0..{1}")]
    ColorOutOfRange(usize, usize),
    #[error("color {0} has no edge (color map must be surjective)")]
    MissingColor(usize),
    #[error("parallel edges {0:?} share color {1}")]
    ParallelSameColor(EdgeShape, usize),
    #[error("line {line}: {message}")]
    Dump { line: usize, message: String },
}

/// Edge-colored multigraph with a surjective color map onto `0..colors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredMultigraph {
    vertex_count: usize,
    colors: usize,
    edges: Vec<ColoredEdge>,
    by_color: Vec<Vec<usize>>,
}

impl ColoredMultigraph {
    pub fn new(vertex_count: usize, colors: usize, edges: Vec<ColoredEdge>) -> Result<Self, ColoredGraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut by_color = vec![Vec::new(); colors];
        let mut normalized = Vec::with_capacity(edges.len());
        for (idx, e) in edges.into_iter().enumerate() {
            let shape = match e.shape {
                EdgeShape::Pair(u, v) => EdgeShape::pair(u, v),
                s => s,
            };
            if shape.endpoints().iter().flatten().any(|&x| x >= vertex_count) {
                return Err(ColoredGraphError::VertexOutOfRange(shape, vertex_count));
            }
            if e.color >= colors {
                return Err(ColoredGraphError::ColorOutOfRange(e.color, colors));
            }
            if !seen.insert((shape, e.color)) {
                return Err(ColoredGraphError::ParallelSameColor(shape, e.color));
            }
            by_color[e.color].push(idx);
            normalized.push(ColoredEdge { shape, color: e.color });
        }
        if let Some(c) = by_color.iter().position(Vec::is_empty) {
            return Err(ColoredGraphError::MissingColor(c));
        }
        Ok(Self { vertex_count, colors, edges: normalized, by_color })
    }

    pub fn empty() -> Self {
        Self { vertex_count: 0, colors: 0, edges: Vec::new(), by_color: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn edges(&self) -> &[ColoredEdge] {
        &self.edges
    }

    /// Indices into [`edges`](Self::edges) of the edges with color `c`.
    pub fn edges_of_color(&self, c: usize) -> &[usize] {
        &self.by_color[c]
    }

    pub fn edge(&self, idx: usize) -> &ColoredEdge {
        &self.edges[idx]
    }

    /// One line per edge: `loop v c` or `edge u v c`.
    pub fn to_dump(&self) -> String {
        let mut s = String::new();
        for e in &self.edges {
            match e.shape {
                EdgeShape::Loop(v) => writeln!(s, "loop {v} {}", e.color),
                EdgeShape::Pair(u, v) => writeln!(s, "edge {u} {v} {}", e.color),
            }
            .expect("writing to a String");
        }
        s
    }

    /// Parses the dump format; vertex and color counts are one past the largest ids seen.
    pub fn from_dump(text: &str) -> Result<Self, ColoredGraphError> {
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| ColoredGraphError::Dump { line: i + 1, message };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let nums: Result<Vec<usize>, _> = toks[1..].iter().map(|t| t.parse::<usize>()).collect();
            let nums = nums.map_err(|e| err(format!("bad number: {e}")))?;
            let edge = match (toks[0], nums.as_slice()) {
                ("loop", &[v, c]) => ColoredEdge { shape: EdgeShape::Loop(v), color: c },
                ("edge", &[u, v, c]) if u != v => ColoredEdge { shape: EdgeShape::pair(u, v), color: c },
                _ => return Err(err(format!("expected `loop v c` or `edge u v c`, got `{line}`"))),
            };
            edges.push(edge);
        }
        let n = edges.iter().flat_map(|e| e.shape.endpoints()).flatten().max().map_or(0, |m| m + 1);
        let p = edges.iter().map(|e| e.color).max().map_or(0, |m| m + 1);
        Self::new(n, p, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_(v: usize, c: usize) -> ColoredEdge {
        ColoredEdge { shape: EdgeShape::Loop(v), color: c }
    }

    #[test]
    fn rejects_non_surjective_and_parallel() {
        assert_eq!(ColoredMultigraph::new(2, 2, vec![loop_(0, 0)]), Err(ColoredGraphError::MissingColor(1)));
        assert_eq!(
            ColoredMultigraph::new(2, 1, vec![loop_(0, 0), loop_(0, 0)]),
            Err(ColoredGraphError::ParallelSameColor(EdgeShape::Loop(0), 0))
        );
        let pair = |u, v, c| ColoredEdge { shape: EdgeShape::Pair(u, v), color: c };
        assert_eq!(
            ColoredMultigraph::new(2, 1, vec![pair(0, 1, 0), pair(1, 0, 0)]),
            Err(ColoredGraphError::ParallelSameColor(EdgeShape::Pair(0, 1), 0))
        );
        assert!(ColoredMultigraph::new(2, 2, vec![pair(0, 1, 0), pair(1, 0, 1)]).is_ok());
    }

    #[test]
    fn dump_round_trip() {
        let g = ColoredMultigraph::new(3, 2, vec![loop_(2, 1), ColoredEdge { shape: EdgeShape::pair(1, 0), color: 0 }])
            .unwrap();
        let text = g.to_dump();
        assert_eq!(text, "loop 2 1\nedge 0 1 0\n");
        assert_eq!(ColoredMultigraph::from_dump(&text).unwrap(), g);
        assert!(matches!(
            ColoredMultigraph::from_dump("loop 1 0\nedge 1 x 0\n"),
            Err(ColoredGraphError::Dump { line: 2, .. })
        ));
    }
}
