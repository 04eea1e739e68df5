//! Plain-text graph files.
//!
//! ```text
//! # optional comments
//! n k
//! u v mult      (k lines)
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::Multigraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseGraphError {
    #[error("empty input: expected a header line \"n k\"")]
    MissingHeader,
    #[error("line {line}: malformed header, expected \"n k\"")]
    BadHeader { line: usize },
    #[error("line {line}: malformed edge record, expected \"u v mult\"")]
    BadRecord { line: usize },
    #[error("line {line}: loop at vertex {vertex}")]
    Loop { line: usize, vertex: usize },
    #[error("line {line}: vertex {vertex} out of range for {vertex_count} vertices")]
    OutOfRange {
        line: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("line {line}: multiplicity must be at least 1")]
    ZeroMultiplicity { line: usize },
    #[error("line {line}: duplicate record for pair ({u}, {v}), first given on line {first}")]
    Duplicate {
        line: usize,
        u: usize,
        v: usize,
        first: usize,
    },
    #[error("header announces {expected} edge records, found {found}")]
    RecordCount { expected: usize, found: usize },
}

pub fn parse_graph(text: &str) -> Result<Multigraph, ParseGraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(ParseGraphError::MissingHeader)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, k] = fields[..] else {
        return Err(ParseGraphError::BadHeader { line: hline });
    };
    let bad_header = |_| ParseGraphError::BadHeader { line: hline };
    let n: usize = n.parse().map_err(bad_header)?;
    let k: usize = k.parse().map_err(bad_header)?;

    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges = Vec::with_capacity(k);
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let bad = || ParseGraphError::BadRecord { line };
        let [a, b, m] = fields[..] else {
            return Err(bad());
        };
        let a: usize = a.parse().map_err(|_| bad())?;
        let b: usize = b.parse().map_err(|_| bad())?;
        let m: u64 = m.parse().map_err(|_| bad())?;
        for vertex in [a, b] {
            if vertex >= n {
                return Err(ParseGraphError::OutOfRange {
                    line,
                    vertex,
                    vertex_count: n,
                });
            }
        }
        if a == b {
            return Err(ParseGraphError::Loop { line, vertex: a });
        }
        if m == 0 {
            return Err(ParseGraphError::ZeroMultiplicity { line });
        }
        let (u, v) = (a.min(b), a.max(b));
        if let Some(&first) = seen.get(&(u, v)) {
            return Err(ParseGraphError::Duplicate { line, u, v, first });
        }
        seen.insert((u, v), line);
        edges.push((u, v, m));
    }
    if edges.len() != k {
        return Err(ParseGraphError::RecordCount {
            expected: k,
            found: edges.len(),
        });
    }
    Ok(Multigraph::from_edges(n, edges).expect("records were validated"))
}

/// Canonical text: records sorted by `(u, v)`, single spaces, trailing newline.
pub fn emit_graph(g: &Multigraph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.vertex_count(), g.edges().len()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.mult).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{banana, cycle};
    use super::*;

    #[test]
    fn banana_from_text() {
        assert_eq!(parse_graph("2 1\n0 1 3\n").unwrap(), banana(3).unwrap());
    }

    #[test]
    fn cycle_emits_sorted() {
        assert_eq!(emit_graph(&cycle(3).unwrap()), "3 3\n0 1 1\n0 2 1\n1 2 1\n");
    }

    #[test]
    fn comments_blank_lines_and_orientation() {
        let g = parse_graph("# a triangle\n\n3 3\n2 1 1\n# mid\n0 1 1\n2 0 1\n").unwrap();
        assert_eq!(g, cycle(3).unwrap());
    }

    #[test]
    fn distinct_diagnostics() {
        use ParseGraphError::*;
        assert_eq!(parse_graph("2 1\n0 0 1\n"), Err(Loop { line: 2, vertex: 0 }));
        assert_eq!(parse_graph(""), Err(MissingHeader));
        assert_eq!(parse_graph("2\n"), Err(BadHeader { line: 1 }));
        assert_eq!(parse_graph("2 1\n0 1\n"), Err(BadRecord { line: 2 }));
        assert_eq!(parse_graph("2 1\n0 x 1\n"), Err(BadRecord { line: 2 }));
        assert_eq!(
            parse_graph("2 1\n0 5 1\n"),
            Err(OutOfRange {
                line: 2,
                vertex: 5,
                vertex_count: 2
            })
        );
        assert_eq!(parse_graph("2 1\n0 1 0\n"), Err(ZeroMultiplicity { line: 2 }));
        assert_eq!(
            parse_graph("2 2\n0 1 1\n\n1 0 2\n"),
            Err(Duplicate {
                line: 4,
                u: 0,
                v: 1,
                first: 2
            })
        );
        assert_eq!(
            parse_graph("3 3\n0 1 1\n"),
            Err(RecordCount {
                expected: 3,
                found: 1
            })
        );
    }

    #[test]
    fn round_trip() {
        let g = super::super::wedge(&cycle(5).unwrap(), &banana(4).unwrap(), 3, 1).unwrap();
        assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
    }
}
