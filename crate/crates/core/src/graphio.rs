//! Plain-text edge-list ingestion and export.
//!
//! Format: one undirected edge per line, `u v`, integer vertex ids. Ids may
//! be 0-based or 1-based; the minimum id decides (a minimum of 0 means
//! 0-based). Duplicate edges are ignored; a `u u` line marks the graph as
//! containing self-loops. Blank lines and `#` comments are skipped.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::AdjacencyMatrix;

pub fn read_edge_list<P: AsRef<Path>>(path: P) -> Result<AdjacencyMatrix> {
    let file = std::fs::File::open(path)?;
    read_edge_list_from(BufReader::new(file))
}

pub fn read_edge_list_from<R: Read>(reader: R) -> Result<AdjacencyMatrix> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let parse = |tok: Option<&str>, lineno: usize| -> Result<usize> {
            tok.ok_or_else(|| Error::EdgeListParse {
                line: lineno + 1,
                reason: "expected two vertex ids".into(),
            })?
            .parse::<usize>()
            .map_err(|e| Error::EdgeListParse { line: lineno + 1, reason: e.to_string() })
        };
        let u = parse(parts.next(), lineno)?;
        let v = parse(parts.next(), lineno)?;
        if parts.next().is_some() {
            return Err(Error::EdgeListParse {
                line: lineno + 1,
                reason: "more than two fields".into(),
            });
        }
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::InvalidArgument("edge list contains no edges".into()));
    }

    let min_id = edges.iter().map(|&(u, v)| u.min(v)).min().unwrap();
    let base = if min_id == 0 { 0 } else { 1 };
    let max_id = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap();
    let n = max_id - base + 1;

    let mut values = vec![0u8; n * n];
    let mut self_loops = false;
    for (u, v) in edges {
        let (i, j) = (u - base, v - base);
        if i == j {
            self_loops = true;
        }
        values[i * n + j] = 1;
        values[j * n + i] = 1;
    }
    AdjacencyMatrix::from_entries(n, values, self_loops)
}

/// Write `u v` lines (0-based ids, each undirected edge once).
pub fn write_edge_list<P: AsRef<Path>>(path: P, y: &AdjacencyMatrix) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n = y.n();
    for i in 0..n {
        for j in i..n {
            if y.get(i, j) == 1 {
                writeln!(out, "{i} {j}")?;
            }
        }
    }
    Ok(())
}

/// Read one 1-based integer label per line (vertex order).
pub fn read_labels<P: AsRef<Path>>(path: P) -> Result<Vec<usize>> {
    let file = std::fs::File::open(path)?;
    let mut labels = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let label: usize = trimmed
            .parse()
            .map_err(|e: std::num::ParseIntError| Error::EdgeListParse {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
        if label == 0 {
            return Err(Error::EdgeListParse {
                line: lineno + 1,
                reason: "labels are 1-based".into(),
            });
        }
        labels.push(label);
    }
    Ok(labels)
}
