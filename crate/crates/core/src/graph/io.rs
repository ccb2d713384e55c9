use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{Graph, GraphError, Vertex};

/// Noise dropped while reading a graph file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub duplicates: usize,
    pub self_loops: usize,
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

/// Collects an edge list, counting repeats of the same unordered pair.
struct EdgeCollector {
    edges: Vec<(Vertex, Vertex)>,
    stats: ParseStats,
}

impl EdgeCollector {
    fn new() -> Self {
        EdgeCollector {
            edges: Vec::new(),
            stats: ParseStats::default(),
        }
    }

    fn push(&mut self, a: Vertex, b: Vertex) {
        self.edges.push(if a < b { (a, b) } else { (b, a) });
    }

    fn finish(mut self, n: usize) -> (Graph, ParseStats) {
        self.edges.sort_unstable();
        let before = self.edges.len();
        self.edges.dedup();
        self.stats.duplicates += before - self.edges.len();
        (Graph::from_edges(n, self.edges), self.stats)
    }
}

/// Reads the DIMACS clique format: `c` comments, one `p edge <n> <m>`
/// header (`p col` is accepted too), then `e <u> <v>` lines with 1-based
/// labels.
///
/// Duplicate edges collapse silently and are counted in [`ParseStats`];
/// self-loops are rejected.
pub fn parse_dimacs<R: BufRead>(reader: R) -> Result<(Graph, ParseStats), GraphError> {
    let mut n: Option<usize> = None;
    let mut edges = EdgeCollector::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        match tag {
            "c" => {}
            "p" => {
                if n.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                let format = tokens.next();
                if !matches!(format, Some("edge") | Some("col")) {
                    return Err(parse_err(lineno, "expected `p edge <n> <m>`"));
                }
                let count = tokens
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| parse_err(lineno, "missing or invalid vertex count"))?;
                tokens
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| parse_err(lineno, "missing or invalid edge count"))?;
                n = Some(count);
            }
            "e" => {
                let n = n.ok_or_else(|| parse_err(lineno, "edge line before problem line"))?;
                let mut endpoint = || -> Result<Vertex, GraphError> {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| parse_err(lineno, "edge line needs two endpoints"))?;
                    let label: usize = tok
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("invalid vertex label `{tok}`")))?;
                    if label == 0 || label > n {
                        return Err(parse_err(
                            lineno,
                            format!("vertex label {label} outside 1..={n}"),
                        ));
                    }
                    Ok(label - 1)
                };
                let a = endpoint()?;
                let b = endpoint()?;
                if a == b {
                    return Err(parse_err(lineno, format!("self-loop on vertex {}", a + 1)));
                }
                edges.push(a, b);
            }
            other => return Err(parse_err(lineno, format!("unknown line type `{other}`"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing `p edge` problem line"))?;
    Ok(edges.finish(n))
}

/// Reads whitespace-separated integer pairs, one edge per line. Lines
/// starting with `%` or `#` are comments and columns past the second are
/// ignored.
///
/// Vertices are the labels that occur, relabeled densely in increasing label
/// order; the original labels are kept on the graph. Self-loops and repeated
/// pairs are dropped and counted. With `one_indexed`, label 0 is an error.
pub fn parse_edgelist<R: BufRead>(
    reader: R,
    one_indexed: bool,
) -> Result<(Graph, ParseStats), GraphError> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut label = || -> Result<u64, GraphError> {
            let tok = tokens
                .next()
                .ok_or_else(|| parse_err(lineno, "expected two vertex labels"))?;
            let value: u64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("invalid vertex label `{tok}`")))?;
            if one_indexed && value == 0 {
                return Err(parse_err(lineno, "label 0 in one-indexed input"));
            }
            Ok(value)
        };
        let a = label()?;
        let b = label()?;
        raw.push((a, b));
    }

    let mut ids: BTreeMap<u64, Vertex> = BTreeMap::new();
    for &(a, b) in &raw {
        ids.insert(a, 0);
        ids.insert(b, 0);
    }
    let labels: Vec<u64> = ids.keys().copied().collect();
    for (i, id) in ids.values_mut().enumerate() {
        *id = i;
    }

    let mut edges = EdgeCollector::new();
    for (a, b) in raw {
        if a == b {
            edges.stats.self_loops += 1;
        } else {
            edges.push(ids[&a], ids[&b]);
        }
    }
    let (graph, stats) = edges.finish(labels.len());
    Ok((graph.with_labels(labels), stats))
}

/// Writes `g` in DIMACS format with 1-based ids and sorted canonical edges.
pub fn write_dimacs<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "p edge {} {}", g.n(), g.m())?;
    for e in g.edges() {
        writeln!(out, "e {} {}", e.u() + 1, e.v() + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dimacs(text: &str) -> Result<(Graph, ParseStats), GraphError> {
        parse_dimacs(text.as_bytes())
    }

    #[test]
    fn dimacs_triangle() {
        let (g, stats) = dimacs("c tiny\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert_eq!(stats, ParseStats::default());
        assert!(g.check_invariants());
    }

    #[test]
    fn dimacs_collapses_duplicates() {
        let (g, stats) = dimacs("p edge 2 1\ne 1 2\ne 2 1\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(stats.duplicates, 1);
    }

    #[test]
    fn dimacs_errors_name_the_line() {
        let cases = [
            ("p edge x 1\n", 1),
            ("p graph 3 1\n", 1),
            ("p edge 3 1\ne 1 4\n", 2),
            ("p edge 3 1\nc ok\ne 2 2\n", 3),
            ("e 1 2\n", 1),
            ("p edge 3 1\ne 1\n", 2),
        ];
        for (text, line) in cases {
            match dimacs(text) {
                Err(GraphError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(dimacs("c nothing\n").is_err());
    }

    #[test]
    fn edgelist_zero_indexed_path() {
        let (g, _) = parse_edgelist("0 1\n1 2".as_bytes(), false).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.labels().unwrap(), &[0, 1, 2]);
    }

    #[test]
    fn edgelist_drops_noise() {
        let (g, stats) = parse_edgelist("% c\n1 2\n2 1\n3 3\n".as_bytes(), true).unwrap();
        assert_eq!((g.n(), g.m()), (3, 1));
        assert!(g.has_edge(0, 1));
        assert_eq!(g.degree(2), 0);
        assert_eq!(stats, ParseStats { duplicates: 1, self_loops: 1 });
    }

    #[test]
    fn edgelist_empty_and_errors() {
        let (g, _) = parse_edgelist("".as_bytes(), true).unwrap();
        assert_eq!((g.n(), g.m()), (0, 0));
        assert!(matches!(
            parse_edgelist("# x\n1 a\n".as_bytes(), true),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(parse_edgelist("0 1\n".as_bytes(), true).is_err());
    }

    #[test]
    fn edgelist_keeps_labels_and_ignores_extra_columns() {
        let (g, _) = parse_edgelist("10 30 0.5\n30 20 1\n".as_bytes(), true).unwrap();
        assert_eq!(g.labels().unwrap(), &[10, 20, 30]);
        assert!(g.has_edge(0, 2) && g.has_edge(1, 2));
        assert_eq!(g.label(2), 30);
    }

    #[test]
    fn dimacs_echo_is_stable() {
        let text = "p edge 4 3\ne 1 2\ne 1 4\ne 2 3\n";
        let (g, _) = dimacs("c header\np edge 4 3\ne 2 1\ne 3 2\ne 4 1\n").unwrap();
        let mut out = Vec::new();
        write_dimacs(&g, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }
}
