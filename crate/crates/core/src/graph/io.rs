//! Plain-text edge lists:
//!
//! ```text
//! vertices <n> basepoint <o>
//! edge <u> <v>
//! ...
//! boundary <v> <v> ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored when reading.

use super::Graph;
use crate::error::{Error, Result};
use std::fmt::Write;

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "vertices {} basepoint {}", g.vertex_count(), g.basepoint()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
    out.push_str("boundary");
    for &b in g.boundary() {
        write!(out, " {b}").unwrap();
    }
    out.push('\n');
    out
}

fn parse_err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        column,
        message: message.into(),
    })
}

pub fn parse_edge_list(text: &str, family: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut boundary = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, c) in raw.char_indices().chain(std::iter::once((raw.len(), ' '))) {
            if c.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push((&raw[s..i], s + 1));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        let num = |(tok, c): (&str, usize)| -> Result<usize> {
            tok.parse()
                .or_else(|_| parse_err(line_no, c, format!("expected integer, found `{tok}`")))
        };
        match tokens[0].0 {
            "vertices" => {
                if header.is_some() {
                    return parse_err(line_no, 1, "repeated header");
                }
                if tokens.len() != 4 || tokens[2].0 != "basepoint" {
                    return parse_err(line_no, 1, "expected `vertices <n> basepoint <o>`");
                }
                header = Some((num(tokens[1])?, num(tokens[3])?));
            }
            "edge" => {
                if header.is_none() {
                    return parse_err(line_no, 1, "edge before header");
                }
                if tokens.len() != 3 {
                    return parse_err(line_no, 1, "expected `edge <u> <v>`");
                }
                edges.push((num(tokens[1])?, num(tokens[2])?));
            }
            "boundary" => {
                for &t in &tokens[1..] {
                    boundary.push(num(t)?);
                }
            }
            other => return parse_err(line_no, tokens[0].1, format!("unknown record `{other}`")),
        }
    }
    let (n, o) = header.map_or_else(|| parse_err(1, 1, "missing header"), Ok)?;
    Graph::from_edges(n, edges, o, &boundary, family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_tree_cross_z_ball, DEFAULT_VERTEX_CAP};
    use proptest::prelude::*;

    #[test]
    fn round_trip_product_ball() {
        let g = gen_tree_cross_z_ball(3, 3, DEFAULT_VERTEX_CAP).unwrap();
        let text = write_edge_list(&g);
        assert!(text.starts_with(&format!("vertices {} basepoint", g.vertex_count())));
        let back = parse_edge_list(&text, g.family()).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.boundary(), g.boundary());
        assert_eq!(back.basepoint(), g.basepoint());
    }

    #[test]
    fn reports_line_and_column() {
        let text = "vertices 3 basepoint 0\nedge 0 1\nedge 1 x\n";
        match parse_edge_list(text, "t") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 8)),
            other => panic!("{other:?}"),
        }
        assert!(parse_edge_list("edge 0 1\n", "t").is_err());
    }

    proptest! {
        #[test]
        fn random_graphs_round_trip(n in 2usize..30, raw in prop::collection::vec((0usize..30, 0usize..30), 0..60)) {
            let mut edges: Vec<(usize, usize)> = raw.into_iter()
                .map(|(a, b)| (a % n, b % n))
                .filter(|(a, b)| a != b)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            edges.sort();
            edges.dedup();
            let g = Graph::from_edges(n, edges, 0, &[n - 1], "p").unwrap();
            let back = parse_edge_list(&write_edge_list(&g), "p").unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
