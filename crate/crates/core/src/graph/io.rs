//! Plain-text edge lists (`u v` per line, 0-based) and degree sequences (one
//! integer per line). Blank lines and lines starting with `#` are skipped.

use std::io::Write;
use std::path::Path;

use super::{Graph, GraphError};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_id(token: &str, line: usize) -> Result<usize, GraphError> {
    token.parse().map_err(|_| GraphError::Parse {
        line,
        message: format!("`{token}` is not a node id"),
    })
}

/// Node count is one past the largest id mentioned.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for (line, content) in content_lines(text) {
        let mut tokens = content.split_whitespace();
        let (Some(u), Some(v), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(GraphError::Parse {
                line,
                message: "expected exactly two node ids".into(),
            });
        };
        edges.push((parse_id(u, line)?, parse_id(v, line)?));
    }
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    Graph::from_edges(n, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<(), GraphError> {
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn parse_degree_sequence(text: &str) -> Result<Vec<usize>, GraphError> {
    content_lines(text)
        .map(|(line, content)| {
            content.parse().map_err(|_| GraphError::Parse {
                line,
                message: format!("`{content}` is not a degree"),
            })
        })
        .collect()
}

pub fn read_degree_sequence(path: impl AsRef<Path>) -> Result<Vec<usize>, GraphError> {
    parse_degree_sequence(&std::fs::read_to_string(path)?)
}

pub fn write_degree_sequence<W: Write>(degrees: &[usize], mut out: W) -> Result<(), GraphError> {
    for d in degrees {
        writeln!(out, "{d}")?;
    }
    Ok(())
}
