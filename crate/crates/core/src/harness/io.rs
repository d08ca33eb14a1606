//! Edge-list files.
//!
//! ```text
//! # comment
//! n 4
//! 0 1 2.5
//! 2 3 1
//! ```
//!
//! One `n <count>` header, then `u v w` lines. Weights are written with 17
//! significant digits so a save/load round trip is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{edge_id, Graph};

/// Whether loading accepts negative weights (cut releases carry them).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weights {
    #[default]
    NonNegative,
    Signed,
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    load_graph_with(path, Weights::NonNegative)
}

pub fn load_graph_with(path: impl AsRef<Path>, weights: Weights) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    parse_graph(&text, path, weights)
}

pub fn parse_graph(text: &str, path: &Path, weights: Weights) -> Result<Graph> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut graph: Option<Graph> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let Some(g) = graph.as_mut() else {
            match fields.as_slice() {
                ["n", count] => {
                    let n = count
                        .parse::<usize>()
                        .map_err(|e| err(line, format!("bad vertex count {count:?}: {e}")))?;
                    graph = Some(Graph::new(n));
                    continue;
                }
                _ => return Err(err(line, format!("expected `n <count>` header, found {body:?}"))),
            }
        };
        let [u, v, w] = fields.as_slice() else {
            return Err(err(line, format!("expected `u v w`, found {body:?}")));
        };
        let u: usize = u.parse().map_err(|e| err(line, format!("bad vertex {u:?}: {e}")))?;
        let v: usize = v.parse().map_err(|e| err(line, format!("bad vertex {v:?}: {e}")))?;
        let w: f64 = w.parse().map_err(|e| err(line, format!("bad weight {w:?}: {e}")))?;
        if !w.is_finite() {
            return Err(err(line, format!("weight {w} is not finite")));
        }
        if w < 0.0 && weights == Weights::NonNegative {
            return Err(err(line, format!("negative weight {w}")));
        }
        let e = edge_id(u, v, g.n()).map_err(|e| err(line, e.to_string()))?;
        if g.contains_slot(e) {
            return Err(err(line, format!("duplicate pair {{{}, {}}}", u.min(v), u.max(v))));
        }
        g.set_signed_slot(e, w).map_err(|e| err(line, e.to_string()))?;
    }
    graph.ok_or_else(|| err(text.lines().count().max(1), "missing `n <count>` header".into()))
}

/// Renders the file contents, flagging negative weights in a header comment.
pub fn format_graph(g: &Graph) -> String {
    let mut out = String::new();
    if !g.is_nonnegative() {
        out.push_str("# contains negative weights; load with signed weights enabled\n");
    }
    writeln!(out, "n {}", g.n()).unwrap();
    for (u, v, w) in g.edges() {
        writeln!(out, "{u} {v} {w:.16e}").unwrap();
    }
    out
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_graph(g)).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        parse_graph(text, Path::new("t.el"), Weights::NonNegative)
    }

    #[test]
    fn header_only_is_empty_graph() {
        let g = parse("n 3\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.stored_slots(), 0);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Graph::from_edges(5, [(0, 1, 0.1), (1, 4, 1.0 / 3.0), (2, 3, 0.0), (0, 4, 1e-300)]).unwrap();
        let back = parse(&format_graph(&g)).unwrap();
        assert_eq!(back, g);
        for ((_, a), (_, b)) in g.iter().zip(back.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse("# c\nn 3\n0 1 1\n0 x 2\n").unwrap_err().to_string();
        assert!(e.starts_with("t.el:4:"), "{e}");
        let e = parse("n 3\n0 1 1\n1 0 2\n").unwrap_err().to_string();
        assert!(e.contains(":3:") && e.contains("duplicate"), "{e}");
        let e = parse("n 3\n0 1 -1\n").unwrap_err().to_string();
        assert!(e.contains(":2:") && e.contains("negative"), "{e}");
        assert!(parse("0 1 1\n").is_err());
        assert!(parse("n 3\n0 3 1\n").is_err());
        assert!(parse("n 3\n1 1 1\n").is_err());
        assert!(parse("n 3\n0 1\n").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn signed_weights_load_when_allowed() {
        let mut g = Graph::new(3);
        g.set_signed_weight(0, 2, -1.5).unwrap();
        let text = format_graph(&g);
        assert!(text.starts_with("# contains negative"));
        assert!(parse(&text).is_err());
        assert_eq!(parse_graph(&text, Path::new("s"), Weights::Signed).unwrap(), g);
    }
}
