//! Built-in example workspaces.

use crate::dsl::{parse_workspace, DslError, Workspace};
use std::fmt::Write;
use thiserror::Error;

/// A named example with its `.gct` source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub id: &'static str,
    pub summary: &'static str,
    source: &'static str,
}

pub const ENTRIES: [Entry; 8] = [
    Entry {
        id: "r3-new",
        summary: "construction from a pair of generalized complex structures on R^3",
        source: include_str!("../catalogue/r3-new.gct"),
    },
    Entry {
        id: "t3-new",
        summary: "the same construction on the torus T^3",
        source: include_str!("../catalogue/t3-new.gct"),
    },
    Entry {
        id: "heisenberg",
        summary: "left-invariant construction on the Heisenberg group",
        source: include_str!("../catalogue/heisenberg.gct"),
    },
    Entry {
        id: "t2xs1",
        summary: "T^2 x S^1 with a Reeb field tilted by cos(2 pi t)",
        source: include_str!("../catalogue/t2xs1.gct"),
    },
    Entry {
        id: "contact-r3",
        summary: "the standard contact structure dz - y dx on R^3",
        source: include_str!("../catalogue/contact-r3.gct"),
    },
    Entry {
        id: "cosymplectic-t3",
        summary: "the flat cosymplectic structure on T^3 fibred over T^2",
        source: include_str!("../catalogue/cosymplectic-t3.gct"),
    },
    Entry {
        id: "heisenberg-bundle",
        summary: "circle bundle dz + x dy over T^2",
        source: include_str!("../catalogue/heisenberg-bundle.gct"),
    },
    Entry {
        id: "product-gc",
        summary: "product of a symplectic torus with the line",
        source: include_str!("../catalogue/product-gc.gct"),
    },
];

/// Default and admissible `n` for `r2n1-new(n)`.
pub const R2N1_DEFAULT: usize = 2;
pub const R2N1_MAX: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogueError {
    #[error("no catalogue entry `{0}`; run `gct list`")]
    Unknown(String),
    #[error("r2n1-new takes n in 1..={R2N1_MAX}, got {0}")]
    BadParameter(String),
    #[error("catalogue entry `{id}` does not parse: {source}")]
    Parse {
        id: String,
        #[source]
        source: DslError,
    },
}

/// Every id `source` accepts, with the parametric family at its default.
pub fn ids() -> Vec<String> {
    let mut out: Vec<String> = ENTRIES.iter().map(|e| e.id.to_string()).collect();
    out.insert(3, "r2n1-new".into());
    out
}

/// `.gct` text for an id; `r2n1-new(n)` is generated.
pub fn source(id: &str) -> Result<String, CatalogueError> {
    if let Some(e) = ENTRIES.iter().find(|e| e.id == id) {
        return Ok(e.source.to_string());
    }
    if id == "r2n1-new" {
        return Ok(r2n1_source(R2N1_DEFAULT));
    }
    if let Some(arg) = id
        .strip_prefix("r2n1-new(")
        .and_then(|r| r.strip_suffix(')'))
    {
        return match arg.trim().parse::<usize>() {
            Ok(n) if (1..=R2N1_MAX).contains(&n) => Ok(r2n1_source(n)),
            _ => Err(CatalogueError::BadParameter(arg.to_string())),
        };
    }
    Err(CatalogueError::Unknown(id.to_string()))
}

pub fn load(id: &str) -> Result<Workspace, CatalogueError> {
    let text = source(id)?;
    parse_workspace(&text).map_err(|source| CatalogueError::Parse {
        id: id.to_string(),
        source,
    })
}

/// Construction on R^{2n+1}: a three-dimensional block on x1, x2, x3 and a
/// complex structure pairing x_k with x_{k+n-1} for k = 4..=n+2.
pub fn r2n1_source(n: usize) -> String {
    assert!((1..=R2N1_MAX).contains(&n), "n out of range");
    let dim = 2 * n + 1;
    let coords: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
    let mut out = String::new();
    writeln!(out, "model r2n1-new-{n};").unwrap();
    writeln!(out, "coords {};\n", coords.join(", ")).unwrap();
    writeln!(out, "gac S = construct(d/dx1 + dx2, (d/dx2 + dx1)/2) {{").unwrap();
    out.push_str("    d/dx1 - dx2 -> sqrt(2)*dx3;\n");
    out.push_str("    d/dx3 -> (d/dx2 - dx1)/sqrt(2);\n");
    out.push_str("    d/dx2 - dx1 -> -sqrt(2)*d/dx3;\n");
    out.push_str("    dx3 -> -(d/dx1 - dx2)/sqrt(2);\n");
    for k in 4..=n + 2 {
        let l = k + n - 1;
        writeln!(out, "    d/dx{k} -> d/dx{l};").unwrap();
        writeln!(out, "    d/dx{l} -> -d/dx{k};").unwrap();
        writeln!(out, "    dx{k} -> dx{l};").unwrap();
        writeln!(out, "    dx{l} -> -dx{k};").unwrap();
    }
    out.push_str("}\n\ncheck axioms;\ncheck classify;\ncheck prop-c;\ncheck delta;\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{print_workspace, validate_workspace};
    use crate::sample::{SampleSet, DEFAULT_SAMPLES};

    #[test]
    fn every_entry_parses_and_validates() {
        let mut all = ids();
        all.extend((1..=R2N1_MAX).map(|n| format!("r2n1-new({n})")));
        for id in all {
            let w = load(&id).unwrap_or_else(|e| panic!("{e}"));
            let samples = SampleSet::halton(&w.model, DEFAULT_SAMPLES);
            let v = validate_workspace(&w, &samples);
            assert!(v.is_valid(), "{id}: {:?}", v.diagnostics());
        }
    }

    #[test]
    fn r2n1_dimensions() {
        for n in 1..=R2N1_MAX {
            assert_eq!(
                load(&format!("r2n1-new({n})")).unwrap().model.dim(),
                2 * n + 1
            );
        }
        assert_eq!(source("r2n1-new").unwrap(), r2n1_source(R2N1_DEFAULT));
    }

    #[test]
    fn bad_ids() {
        assert!(matches!(source("nope"), Err(CatalogueError::Unknown(_))));
        assert!(matches!(
            source("r2n1-new(0)"),
            Err(CatalogueError::BadParameter(_))
        ));
        assert!(matches!(
            source("r2n1-new(x)"),
            Err(CatalogueError::BadParameter(_))
        ));
    }

    #[test]
    fn print_parse_is_idempotent() {
        for id in ids() {
            let w = load(&id).unwrap();
            let printed = print_workspace(&w);
            let again =
                parse_workspace(&printed).unwrap_or_else(|e| panic!("{id}: {e}\n{printed}"));
            assert_eq!(print_workspace(&again), printed, "{id}");
        }
    }
}
