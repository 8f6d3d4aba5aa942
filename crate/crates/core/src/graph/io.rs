use std::io::{BufRead, Write};

use super::{Attributes, Graph, GraphBuilder};
use crate::error::{parse_err, Error, Result};

/// Non-empty, non-comment lines as `(1-based line number, fields)`.
pub(crate) fn data_lines<R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<(usize, Vec<String>)>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(Error::Io(e))),
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return None;
        }
        Some(Ok((i + 1, trimmed.split_whitespace().map(str::to_owned).collect())))
    })
}

pub(crate) fn parse_f64(line: usize, field: &str, what: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid {what} '{field}'")))
}

/// Read a whitespace-separated edge list: `src dst [weight]`, `#` comments.
///
/// Dense ids are assigned in first-seen order. Duplicate edges collapse
/// with their weights summed.
pub fn load_edge_list<R: BufRead>(reader: R, directed: bool, weighted: bool) -> Result<Graph> {
    let mut b = GraphBuilder::new(directed, weighted);
    for item in data_lines(reader) {
        let (line, fields) = item?;
        let weight = match fields.len() {
            2 => 1.0,
            3 => parse_f64(line, &fields[2], "weight")?,
            n => return Err(parse_err(line, format!("expected 2 or 3 columns, found {n}"))),
        };
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::Validation(format!(
                "line {line}: edge weight must be positive, got {weight}"
            )));
        }
        let src = b.node(&fields[0]);
        let dst = b.node(&fields[1]);
        b.add_edge(src, dst, weight)?;
    }
    Ok(b.build())
}

/// Write `graph` back as an edge list using external ids.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    for e in graph.edges() {
        let (s, d) = (graph.ids().name(e.src), graph.ids().name(e.dst));
        if graph.is_weighted() {
            writeln!(out, "{s} {d} {}", e.weight)?;
        } else {
            writeln!(out, "{s} {d}")?;
        }
    }
    Ok(())
}

/// Attach sparse attributes from `node feature value` triples.
///
/// The attribute width is one past the largest feature index seen. An empty
/// stream leaves the graph without attributes.
pub fn load_attributes<R: BufRead>(graph: Graph, reader: R) -> Result<Graph> {
    let mut rows = vec![Vec::new(); graph.node_count()];
    let mut dim = 0;
    let mut any = false;
    for item in data_lines(reader) {
        let (line, fields) = item?;
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected 3 columns, found {}", fields.len())));
        }
        let node = graph
            .ids()
            .get(&fields[0])
            .ok_or_else(|| Error::UnknownNode(fields[0].clone()))?;
        let feat: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid feature index '{}'", fields[1])))?;
        let value = parse_f64(line, &fields[2], "attribute value")?;
        dim = dim.max(feat + 1);
        rows[node].push((feat, value));
        any = true;
    }
    if !any {
        return Ok(graph);
    }
    let attrs = Attributes::new(dim, rows)?;
    graph.with_attributes(attrs)
}

/// Attach integer class labels from `node label` lines; every node needs one.
pub fn load_labels<R: BufRead>(graph: Graph, reader: R) -> Result<Graph> {
    let mut labels = vec![None; graph.node_count()];
    for item in data_lines(reader) {
        let (line, fields) = item?;
        if fields.len() != 2 {
            return Err(parse_err(line, format!("expected 2 columns, found {}", fields.len())));
        }
        let node = graph
            .ids()
            .get(&fields[0])
            .ok_or_else(|| Error::UnknownNode(fields[0].clone()))?;
        let label: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid label '{}'", fields[1])))?;
        labels[node] = Some(label);
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| {
                Error::Validation(format!("node '{}' has no label", graph.ids().name(i)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    graph.with_labels(labels)
}
