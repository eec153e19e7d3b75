//! Text formats shared by all commands.
//!
//! Graph files: optional comment lines starting `c `, a header
//! `p ds <n> <m>`, then exactly `m` lines `e <u> <v>` with 1-based ids.
//! Writers emit edges sorted by `(min, max)`, so write-read round trips
//! are byte identical.
//!
//! Red-blue files: header `p rbds <nR> <nB> <m> <k>`; reds are `1..nR`,
//! blues `nR+1..nR+nB`; edges `e <r> <b>`; optional `col <r> <c>` lines.
//!
//! Solution files: a single line `s YES <size> <v...>` (1-based, ascending)
//! or `s NO`.

use crate::graph::Graph;
use crate::reductions::RedBlueInstance;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Parse {
        line,
        message: message.into(),
    })
}

/// A solved instance as written to output: `YES` with a witness or `NO`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionFile {
    /// Witness vertices in 0-based ids (files store them 1-based).
    Yes(Vec<usize>),
    No,
}

pub fn format_graph(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = String::new();
    let _ = writeln!(out, "p ds {} {}", g.n(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph, IoError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.starts_with("c ") || raw == "c" {
            continue;
        }
        let fields: Vec<&str> = raw.split_ascii_whitespace().collect();
        match fields.as_slice() {
            ["p", "ds", n, m] => {
                if header.is_some() {
                    return parse_err(lineno, "duplicate header");
                }
                let n: usize = n
                    .parse()
                    .map_err(|_| bad_number(lineno, n))?;
                let m: usize = m
                    .parse()
                    .map_err(|_| bad_number(lineno, m))?;
                header = Some((n, m));
            }
            ["e", u, v] => {
                let (n, m) = match header {
                    Some(h) => h,
                    None => return parse_err(lineno, "edge before header"),
                };
                if edges.len() == m {
                    return parse_err(lineno, format!("more than {m} edge lines"));
                }
                let u = parse_vertex(lineno, u, n)?;
                let v = parse_vertex(lineno, v, n)?;
                if u == v {
                    return parse_err(lineno, format!("self-loop at vertex {}", u + 1));
                }
                edges.push((u, v));
            }
            _ => return parse_err(lineno, format!("unrecognized line: {raw:?}")),
        }
    }
    let (n, m) = match header {
        Some(h) => h,
        None => return parse_err(1, "missing header \"p ds <n> <m>\""),
    };
    if edges.len() != m {
        return parse_err(
            text.lines().count().max(1),
            format!("expected {m} edge lines, found {}", edges.len()),
        );
    }
    Graph::build(n, &edges).map_err(|e| IoError::Parse {
        line: 1,
        message: e.to_string(),
    })
}

fn bad_number(line: usize, token: &str) -> IoError {
    IoError::Parse {
        line,
        message: format!("invalid number {token:?}"),
    }
}

fn parse_vertex(line: usize, token: &str, n: usize) -> Result<usize, IoError> {
    let v: usize = token.parse().map_err(|_| bad_number(line, token))?;
    if v == 0 || v > n {
        return parse_err(line, format!("vertex {v} out of range 1..={n}"));
    }
    Ok(v - 1)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph, IoError> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &Graph) -> Result<(), IoError> {
    fs::write(path, format_graph(g))?;
    Ok(())
}

pub fn format_rbds(inst: &RedBlueInstance) -> String {
    let n_red = inst.reds.len();
    let edges = inst.graph.edges();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p rbds {} {} {} {}",
        n_red,
        inst.blues.len(),
        edges.len(),
        inst.k
    );
    // Red ids precede blue ids, so (min, max) order is (red, blue) order.
    for (u, v) in edges {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    if let Some(colors) = &inst.colors {
        for (&r, &c) in colors {
            let _ = writeln!(out, "col {} {}", r + 1, c);
        }
    }
    out
}

pub fn parse_rbds(text: &str) -> Result<RedBlueInstance, IoError> {
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut colors: BTreeMap<usize, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.starts_with("c ") || raw == "c" {
            continue;
        }
        let fields: Vec<&str> = raw.split_ascii_whitespace().collect();
        match fields.as_slice() {
            ["p", "rbds", nr, nb, m, k] => {
                if header.is_some() {
                    return parse_err(lineno, "duplicate header");
                }
                let nr: usize = nr.parse().map_err(|_| bad_number(lineno, nr))?;
                let nb: usize = nb.parse().map_err(|_| bad_number(lineno, nb))?;
                let m: usize = m.parse().map_err(|_| bad_number(lineno, m))?;
                let k: usize = k.parse().map_err(|_| bad_number(lineno, k))?;
                header = Some((nr, nb, m, k));
            }
            ["e", r, b] => {
                let (nr, nb, m, _) = match header {
                    Some(h) => h,
                    None => return parse_err(lineno, "edge before header"),
                };
                if edges.len() == m {
                    return parse_err(lineno, format!("more than {m} edge lines"));
                }
                let r = parse_vertex(lineno, r, nr + nb)?;
                let b = parse_vertex(lineno, b, nr + nb)?;
                if r >= nr {
                    return parse_err(lineno, format!("red endpoint {} is not in 1..={nr}", r + 1));
                }
                if b < nr {
                    return parse_err(
                        lineno,
                        format!("blue endpoint {} is not in {}..={}", b + 1, nr + 1, nr + nb),
                    );
                }
                edges.push((r, b));
            }
            ["col", r, c] => {
                let (nr, _, _, k) = match header {
                    Some(h) => h,
                    None => return parse_err(lineno, "colour before header"),
                };
                let r = parse_vertex(lineno, r, nr)?;
                let c: usize = c.parse().map_err(|_| bad_number(lineno, c))?;
                if c == 0 || c > k {
                    return parse_err(lineno, format!("colour {c} out of range 1..={k}"));
                }
                colors.insert(r, c);
            }
            _ => return parse_err(lineno, format!("unrecognized line: {raw:?}")),
        }
    }
    let (nr, nb, m, k) = match header {
        Some(h) => h,
        None => return parse_err(1, "missing header \"p rbds <nR> <nB> <m> <k>\""),
    };
    if edges.len() != m {
        return parse_err(
            text.lines().count().max(1),
            format!("expected {m} edge lines, found {}", edges.len()),
        );
    }
    let graph = Graph::build(nr + nb, &edges).map_err(|e| IoError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    RedBlueInstance::new(graph, nr, k, if colors.is_empty() { None } else { Some(colors) })
        .map_err(|e| IoError::Parse {
            line: 1,
            message: e.to_string(),
        })
}

pub fn read_rbds(path: impl AsRef<Path>) -> Result<RedBlueInstance, IoError> {
    parse_rbds(&fs::read_to_string(path)?)
}

pub fn write_rbds(path: impl AsRef<Path>, inst: &RedBlueInstance) -> Result<(), IoError> {
    fs::write(path, format_rbds(inst))?;
    Ok(())
}

pub fn format_solution(sol: &SolutionFile) -> String {
    match sol {
        SolutionFile::Yes(vertices) => {
            let mut sorted = vertices.clone();
            sorted.sort_unstable();
            let mut out = format!("s YES {}", sorted.len());
            for v in sorted {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
            out
        }
        SolutionFile::No => "s NO\n".to_string(),
    }
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, IoError> {
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.starts_with("c ") || raw == "c" {
            continue;
        }
        let fields: Vec<&str> = raw.split_ascii_whitespace().collect();
        match fields.as_slice() {
            ["s", "NO"] => return Ok(SolutionFile::No),
            ["s", "YES", count, rest @ ..] => {
                let count: usize = count.parse().map_err(|_| bad_number(lineno, count))?;
                if rest.len() != count {
                    return parse_err(
                        lineno,
                        format!("expected {count} vertices, found {}", rest.len()),
                    );
                }
                let mut vertices = Vec::with_capacity(count);
                for tok in rest {
                    let v: usize = tok.parse().map_err(|_| bad_number(lineno, tok))?;
                    if v == 0 {
                        return parse_err(lineno, "vertex ids are 1-based");
                    }
                    vertices.push(v - 1);
                }
                return Ok(SolutionFile::Yes(vertices));
            }
            _ => return parse_err(lineno, format!("unrecognized line: {raw:?}")),
        }
    }
    parse_err(1, "missing solution line")
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<SolutionFile, IoError> {
    parse_solution(&fs::read_to_string(path)?)
}

pub fn write_solution(path: impl AsRef<Path>, sol: &SolutionFile) -> Result<(), IoError> {
    fs::write(path, format_solution(sol))?;
    Ok(())
}
