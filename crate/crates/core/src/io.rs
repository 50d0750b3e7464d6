//! Plain-text formats.
//!
//! * graph: `n m` header, then `m` lines `tail head` (0-based).
//! * pairs: one `s t` per line.
//! * subgraph: `n k` header, then `k` lines `edge_id tail head` referring to
//!   the parent graph. Two-column `tail head` lines are also accepted and
//!   resolved against the parent.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use crate::error::{Error, Result};
use crate::graph::{DiGraph, PairSet, Subgraph, Vertex};
use std::fmt::Write as _;
use std::path::Path;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        (!line.is_empty() && !line.starts_with('#'))
            .then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn parse_num(line: usize, field: &str) -> Result<usize> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a non-negative integer, got {field:?}"),
    })
}

fn parse_fields<const N: usize>(line: usize, fields: &[&str]) -> Result<[usize; N]> {
    if fields.len() != N {
        return Err(Error::Parse {
            line,
            message: format!("expected {N} fields, got {}", fields.len()),
        });
    }
    let mut out = [0; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = parse_num(line, f)?;
    }
    Ok(out)
}

fn check_range(line: usize, v: Vertex, n: usize) -> Result<()> {
    if v >= n {
        return Err(Error::Parse {
            line,
            message: format!("vertex {v} out of range (n = {n})"),
        });
    }
    Ok(())
}

pub fn parse_graph(text: &str) -> Result<DiGraph> {
    let mut lines = content_lines(text);
    let Some((hline, header)) = lines.next() else {
        return Err(Error::Parse {
            line: 1,
            message: "missing `n m` header".into(),
        });
    };
    let [n, m] = parse_fields::<2>(hline, &header)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for (line, fields) in lines {
        let [u, v] = parse_fields::<2>(line, &fields)?;
        check_range(line, u, n)?;
        check_range(line, v, n)?;
        if u == v {
            return Err(Error::Parse {
                line,
                message: format!("self-loop at vertex {u}"),
            });
        }
        if !seen.insert((u, v)) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate edge ({u}, {v})"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: hline,
            message: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    DiGraph::new(n, edges)
}

pub fn format_graph(g: &DiGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_pairs(text: &str, n: usize) -> Result<PairSet> {
    content_lines(text)
        .map(|(line, fields)| {
            let [s, t] = parse_fields::<2>(line, &fields)?;
            check_range(line, s, n)?;
            check_range(line, t, n)?;
            Ok((s, t))
        })
        .collect::<Result<Vec<_>>>()
        .map(PairSet::new)
}

pub fn format_pairs(pairs: &PairSet) -> String {
    let mut out = String::new();
    for &(s, t) in pairs {
        let _ = writeln!(out, "{s} {t}");
    }
    out
}

pub fn parse_subgraph<'g>(text: &str, parent: &'g DiGraph) -> Result<Subgraph<'g>> {
    let mut lines = content_lines(text);
    let Some((hline, header)) = lines.next() else {
        return Err(Error::Parse {
            line: 1,
            message: "missing `n k` header".into(),
        });
    };
    let [n, k] = parse_fields::<2>(hline, &header)?;
    if n != parent.n() {
        return Err(Error::Parse {
            line: hline,
            message: format!("subgraph has {n} vertices, parent has {}", parent.n()),
        });
    }
    let mut h = parent.empty_subgraph();
    let mut count = 0;
    for (line, fields) in lines {
        let id = match fields.len() {
            3 => {
                let [e, u, v] = parse_fields::<3>(line, &fields)?;
                if e >= parent.m() || parent.edge(e) != (u, v) {
                    return Err(Error::Parse {
                        line,
                        message: format!("edge {e} = ({u}, {v}) is not an edge of the parent"),
                    });
                }
                e
            }
            _ => {
                let [u, v] = parse_fields::<2>(line, &fields)?;
                check_range(line, u, n)?;
                check_range(line, v, n)?;
                parent.find_edge(u, v).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("({u}, {v}) is not an edge of the parent"),
                })?
            }
        };
        h.insert(id);
        count += 1;
    }
    if count != k {
        return Err(Error::Parse {
            line: hline,
            message: format!("header announces {k} edges, found {count}"),
        });
    }
    Ok(h)
}

pub fn format_subgraph(h: &Subgraph<'_>) -> String {
    let g = h.parent();
    let mut out = format!("{} {}\n", g.n(), h.edge_count());
    for e in h.mask().iter() {
        let (u, v) = g.edge(e);
        let _ = writeln!(out, "{e} {u} {v}");
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<DiGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn read_pairs(path: impl AsRef<Path>, n: usize) -> Result<PairSet> {
    parse_pairs(&std::fs::read_to_string(path)?, n)
}

pub fn read_subgraph<'g>(path: impl AsRef<Path>, parent: &'g DiGraph) -> Result<Subgraph<'g>> {
    parse_subgraph(&std::fs::read_to_string(path)?, parent)
}
