//! The graph-spec mini language used on the command line:
//! `torus:<dim>:<side>`, `tree:<deg>:r<radius>`, `grid:<dim>:r<radius>`,
//! `treez:<deg>:r<radius>`, `gw:<law>:d<depth>`, `horo:d<depth>` and
//! `stretch(<spec>,geom:<q>)`. Offspring laws are written `k@p+k@p...`.

use super::generators::{
    gen_grid_ball, gen_gw_tree, gen_horocyclic_tree, gen_stretched, gen_torus, gen_tree_ball, gen_tree_cross_z_ball,
    LengthLaw, OffspringLaw,
};
use super::Graph;
use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Torus { dim: usize, side: usize },
    Tree { degree: usize, radius: usize },
    Grid { dim: usize, radius: usize },
    TreeZ { degree: usize, radius: usize },
    Gw { law: OffspringLaw, depth: usize },
    Horo { depth: usize },
    Stretch { inner: Box<GraphSpec>, law: LengthLaw },
}

/// Default retry budget for conditioning Galton–Watson trees on survival.
pub const GW_RETRY_CAP: usize = 10_000;

fn err<T>(column: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line: 1,
        column,
        message: message.into(),
    })
}

fn number<T: std::str::FromStr>(tok: &str, column: usize, what: &str) -> Result<T> {
    tok.parse()
        .or_else(|_| err(column, format!("expected {what}, found `{tok}`")))
}

fn prefixed(tok: &str, prefix: char, column: usize, what: &str) -> Result<usize> {
    match tok.strip_prefix(prefix) {
        Some(rest) => number(rest, column + 1, what),
        None => err(column, format!("expected `{prefix}<{what}>`, found `{tok}`")),
    }
}

/// Splits on `:` and records the 1-based column where each field starts.
fn fields(s: &str, base: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        if c == ':' {
            out.push((&s[start..i], base + start));
            start = i + 1;
        }
    }
    out.push((&s[start..], base + start));
    out
}

fn parse_law(tok: &str, column: usize) -> Result<OffspringLaw> {
    let mut support = Vec::new();
    let mut offset = 0;
    for part in tok.split('+') {
        let col = column + offset;
        let (k, p) = part
            .split_once('@')
            .map_or_else(|| err(col, format!("expected `k@p`, found `{part}`")), Ok)?;
        support.push((
            number(k, col, "offspring count")?,
            number(p, col + k.len() + 1, "probability")?,
        ));
        offset += part.len() + 1;
    }
    Ok(OffspringLaw(support))
}

impl GraphSpec {
    pub fn parse(s: &str) -> Result<GraphSpec> {
        Self::parse_at(s.trim(), 1)
    }

    fn parse_at(s: &str, base: usize) -> Result<GraphSpec> {
        if let Some(inner) = s.strip_prefix("stretch(") {
            let body = inner
                .strip_suffix(')')
                .map_or_else(|| err(base + s.len(), "missing `)`"), Ok)?;
            let comma = body
                .rfind(',')
                .map_or_else(|| err(base + 8, "expected `stretch(<spec>,geom:<q>)`"), Ok)?;
            let inner_spec = Self::parse_at(&body[..comma], base + 8)?;
            let law_str = &body[comma + 1..];
            let col = base + 8 + comma + 1;
            let law = match law_str.split_once(':') {
                Some(("geom", q)) => LengthLaw::Geometric(number(q, col + 5, "probability")?),
                Some(("const", k)) => LengthLaw::Constant(number(k, col + 6, "length")?),
                _ => return err(col, format!("unknown length law `{law_str}`")),
            };
            return Ok(GraphSpec::Stretch {
                inner: Box::new(inner_spec),
                law,
            });
        }
        let f = fields(s, base);
        let arity = |n: usize| -> Result<()> {
            if f.len() == n {
                Ok(())
            } else {
                err(base, format!("`{}` expects {} fields, found {}", f[0].0, n, f.len()))
            }
        };
        match f[0].0 {
            "torus" => {
                arity(3)?;
                Ok(GraphSpec::Torus {
                    dim: number(f[1].0, f[1].1, "dimension")?,
                    side: number(f[2].0, f[2].1, "side")?,
                })
            }
            "tree" | "grid" | "treez" => {
                arity(3)?;
                let a = number(f[1].0, f[1].1, "integer")?;
                let radius = prefixed(f[2].0, 'r', f[2].1, "radius")?;
                Ok(match f[0].0 {
                    "tree" => GraphSpec::Tree { degree: a, radius },
                    "grid" => GraphSpec::Grid { dim: a, radius },
                    _ => GraphSpec::TreeZ { degree: a, radius },
                })
            }
            "gw" => {
                arity(3)?;
                Ok(GraphSpec::Gw {
                    law: parse_law(f[1].0, f[1].1)?,
                    depth: prefixed(f[2].0, 'd', f[2].1, "depth")?,
                })
            }
            "horo" => {
                arity(2)?;
                Ok(GraphSpec::Horo {
                    depth: prefixed(f[1].0, 'd', f[1].1, "depth")?,
                })
            }
            other => err(base, format!("unknown graph family `{other}`")),
        }
    }

    /// Generates the graph. `seed` feeds the random families (Galton–Watson
    /// and stretched graphs) and is ignored by the others.
    pub fn build(&self, seed: u64, cap: usize) -> Result<Graph> {
        match self {
            GraphSpec::Torus { dim, side } => gen_torus(*dim, *side, cap),
            GraphSpec::Tree { degree, radius } => gen_tree_ball(*degree, *radius, cap),
            GraphSpec::Grid { dim, radius } => gen_grid_ball(*dim, *radius, cap),
            GraphSpec::TreeZ { degree, radius } => gen_tree_cross_z_ball(*degree, *radius, cap),
            GraphSpec::Gw { law, depth } => Ok(gen_gw_tree(law, *depth, seed, GW_RETRY_CAP, cap)?.graph),
            GraphSpec::Horo { depth } => Ok(gen_horocyclic_tree(*depth, cap)?.graph),
            GraphSpec::Stretch { inner, law } => {
                let g = inner.build(seed, cap)?;
                gen_stretched(&g, law, seed, cap)
            }
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Torus { dim, side } => write!(f, "torus:{dim}:{side}"),
            GraphSpec::Tree { degree, radius } => write!(f, "tree:{degree}:r{radius}"),
            GraphSpec::Grid { dim, radius } => write!(f, "grid:{dim}:r{radius}"),
            GraphSpec::TreeZ { degree, radius } => write!(f, "treez:{degree}:r{radius}"),
            GraphSpec::Gw { law, depth } => {
                let parts: Vec<String> = law.0.iter().map(|(k, p)| format!("{k}@{p}")).collect();
                write!(f, "gw:{}:d{depth}", parts.join("+"))
            }
            GraphSpec::Horo { depth } => write!(f, "horo:d{depth}"),
            GraphSpec::Stretch { inner, law } => match law {
                LengthLaw::Geometric(q) => write!(f, "stretch({inner},geom:{q})"),
                LengthLaw::Constant(k) => write!(f, "stretch({inner},const:{k})"),
                LengthLaw::Finite(_) => write!(f, "stretch({inner},finite)"),
            },
        }
    }
}

/// A radius-free family such as `grid:2` or `tree:3`, for experiments that
/// sweep the radius. Full specs with a radius are accepted too and the
/// radius is replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySpec {
    Tree(usize),
    Grid(usize),
    TreeZ(usize),
}

impl FamilySpec {
    pub fn parse(s: &str) -> Result<FamilySpec> {
        let s = s.trim();
        let f = fields(s, 1);
        if f.len() != 2 && f.len() != 3 {
            return err(1, format!("expected `<family>:<param>`, found `{s}`"));
        }
        let a = number(f[1].0, f[1].1, "integer")?;
        match f[0].0 {
            "tree" => Ok(FamilySpec::Tree(a)),
            "grid" => Ok(FamilySpec::Grid(a)),
            "treez" => Ok(FamilySpec::TreeZ(a)),
            other => err(1, format!("family `{other}` does not take a radius")),
        }
    }

    pub fn at_radius(&self, radius: usize) -> GraphSpec {
        match *self {
            FamilySpec::Tree(degree) => GraphSpec::Tree { degree, radius },
            FamilySpec::Grid(dim) => GraphSpec::Grid { dim, radius },
            FamilySpec::TreeZ(degree) => GraphSpec::TreeZ { degree, radius },
        }
    }

    pub fn build(&self, radius: usize, cap: usize) -> Result<Graph> {
        self.at_radius(radius).build(0, cap)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Tree(d) => write!(f, "tree:{d}"),
            FamilySpec::Grid(d) => write!(f, "grid:{d}"),
            FamilySpec::TreeZ(d) => write!(f, "treez:{d}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DEFAULT_VERTEX_CAP;

    #[test]
    fn parses_every_family() {
        for s in [
            "torus:2:16",
            "tree:3:r12",
            "grid:2:r32",
            "treez:3:r4",
            "gw:1@0.5+2@0.5:d10",
            "horo:d5",
            "stretch(tree:3:r6,geom:0.5)",
            "stretch(stretch(torus:1:4,const:2),geom:0.25)",
        ] {
            let spec = GraphSpec::parse(s).unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }

    #[test]
    fn malformed_specs_report_columns() {
        match GraphSpec::parse("tree:3") {
            Err(Error::Parse { line: 1, column: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match GraphSpec::parse("tree:3:x5") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 8),
            other => panic!("{other:?}"),
        }
        match GraphSpec::parse("torus:2:abc") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 9),
            other => panic!("{other:?}"),
        }
        assert!(GraphSpec::parse("cube:3").is_err());
        assert!(GraphSpec::parse("stretch(tree:3:r2,foo:1)").is_err());
    }

    #[test]
    fn builds_match_generators() {
        let g = GraphSpec::parse("stretch(torus:1:4,const:2)")
            .unwrap()
            .build(0, DEFAULT_VERTEX_CAP)
            .unwrap();
        assert_eq!(g.vertex_count(), 8);
        let g = GraphSpec::parse("gw:2@1:d3")
            .unwrap()
            .build(5, DEFAULT_VERTEX_CAP)
            .unwrap();
        assert_eq!(g.vertex_count(), 15);
        assert_eq!(
            FamilySpec::parse("grid:2").unwrap().at_radius(4).to_string(),
            "grid:2:r4"
        );
    }
}
