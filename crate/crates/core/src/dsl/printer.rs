//! Canonical `.gct` printing.

use super::{CheckRequest, ExpectKey, GacDecl, Item, Workspace};
use crate::courant::{GEndo, GSection};
use crate::frame::{combinations, FrameAction, FrameModel, PForm};
use crate::gac::PwSign;
use std::fmt::Write;

/// Prints a workspace so that parsing the output reproduces it.
pub fn print_workspace(w: &Workspace) -> String {
    let m = &w.model;
    let mut out = String::new();
    writeln!(out, "model {};", m.name).unwrap();
    if !m.coordinates().is_empty() {
        let coords: Vec<String> = m
            .coordinates()
            .iter()
            .map(|c| {
                if c.periodic {
                    format!("{} periodic", c.name)
                } else {
                    c.name.to_string()
                }
            })
            .collect();
        writeln!(out, "coords {};", coords.join(", ")).unwrap();
    }
    let lie: Vec<usize> = (0..m.dim())
        .filter(|&a| m.actions()[a] == FrameAction::Lie)
        .collect();
    if !lie.is_empty() {
        let frame: Vec<&str> = lie.iter().map(|&a| m.frame_names()[a].as_str()).collect();
        let dual: Vec<&str> = lie.iter().map(|&a| m.coframe_names()[a].as_str()).collect();
        writeln!(out, "frame {} dual {};", frame.join(", "), dual.join(", ")).unwrap();
    }
    for (n, &i) in lie.iter().enumerate() {
        for &j in &lie[n + 1..] {
            let v = m.frame_bracket(i, j);
            if !v.is_zero() {
                writeln!(
                    out,
                    "bracket[{}, {}] = {};",
                    i + 1,
                    j + 1,
                    m.render_vector(&v)
                )
                .unwrap();
            }
        }
    }
    if !w.items.is_empty() {
        out.push('\n');
    }
    for (name, item) in &w.items {
        match item {
            Item::Scalar(s) => writeln!(out, "scalar {name} = {s};"),
            Item::Section(s) => writeln!(out, "section {name} = {};", m.render_section(s)),
            Item::Form(f) => writeln!(out, "form {name} = {};", render_form(m, f)),
            Item::Bivector(p) => writeln!(out, "bivector {name} = {};", m.render_bivector(p)),
            Item::Endo(e) => writeln!(out, "endo {name} {{\n{}}}", endo_rules(m, e)),
            Item::Gac(GacDecl::Triple {
                phi,
                e_plus,
                e_minus,
                twist,
            }) => {
                let twist = twist
                    .as_ref()
                    .map(|h| format!(" twist {}", render_form(m, h)))
                    .unwrap_or_default();
                writeln!(
                    out,
                    "gac {name} = ({phi}, {}, {}){twist};",
                    m.render_section(e_plus),
                    m.render_section(e_minus)
                )
            }
            Item::Gac(GacDecl::Construct {
                e_plus,
                e_minus,
                rules,
            }) => {
                let body: String = rules
                    .iter()
                    .map(|(s, t)| {
                        format!("    {} -> {};\n", m.render_section(s), m.render_section(t))
                    })
                    .collect();
                writeln!(
                    out,
                    "gac {name} = construct({}, {}) {{\n{body}}}",
                    m.render_section(e_plus),
                    m.render_section(e_minus)
                )
            }
        }
        .unwrap();
    }
    if !w.checks.is_empty() {
        out.push('\n');
    }
    for c in &w.checks {
        writeln!(out, "{};", render_check(c)).unwrap();
    }
    if !w.expectations.is_empty() {
        out.push('\n');
    }
    for e in &w.expectations {
        let key = match &e.key {
            ExpectKey::Fact(path) => path.clone(),
            ExpectKey::Bracket(s, t) => {
                format!("bracket({}, {})", m.render_section(s), m.render_section(t))
            }
            ExpectKey::Member(s, frame) => format!("member({}, {frame})", m.render_section(s)),
        };
        writeln!(out, "expect {key} = \"{}\";", e.value).unwrap();
    }
    out
}

/// Zero forms keep their degree as `0*dx^dy`.
fn render_form(m: &FrameModel, f: &PForm) -> String {
    if !f.is_zero() || f.degree() == 0 {
        return m.render_form(f);
    }
    let first = &combinations(m.dim(), f.degree())[0];
    let names: Vec<&str> = first
        .iter()
        .map(|&a| m.coframe_names()[a].as_str())
        .collect();
    format!("0*{}", names.join("^"))
}

fn endo_rules(m: &FrameModel, e: &GEndo) -> String {
    let n = m.dim();
    (0..2 * n)
        .filter_map(|k| {
            let image = e.apply(&GSection::basis(n, k));
            (!image.is_zero()).then(|| {
                format!(
                    "    {} -> {};\n",
                    m.render_section(&GSection::basis(n, k)),
                    m.render_section(&image)
                )
            })
        })
        .collect()
}

fn render_check(c: &CheckRequest) -> String {
    let mut out = format!("check {}", c.kind);
    if let Some(t) = &c.target {
        write!(out, " on {t}").unwrap();
    }
    if let Some(side) = c.side {
        out.push_str(match side {
            PwSign::Plus => " side +",
            PwSign::Minus => " side -",
        });
    }
    if let Some(f) = &c.fiber {
        write!(out, " fiber {f}").unwrap();
    }
    out
}
