//! The `.gct` text format: parsing, canonical printing and validation.

mod lexer;
mod parser;
mod printer;

pub use lexer::{tokenize, Tok, Token};
pub use parser::parse_workspace;
pub use printer::print_workspace;

use crate::courant::{Bivector, GEndo, GSection, Twist};
use crate::frame::{FrameDiagnostic, FrameModel, PForm};
use crate::gac::{construct_from_gcs, GacData, GacError, PwSign};
use crate::sample::SampleSet;
use crate::scalar::Scalar;
use std::fmt;
use thiserror::Error;

/// One-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pos}: {kind}")]
pub struct DslError {
    pub pos: Pos,
    pub kind: ErrorKind,
}

impl DslError {
    pub fn new(pos: Pos, kind: ErrorKind) -> Self {
        DslError { pos, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("unterminated string")]
    UnterminatedString,
    #[error("found {found}, expected {}", .expected.join(" or "))]
    Syntax {
        found: String,
        expected: Vec<String>,
    },
    #[error("unresolved name `{0}`")]
    Unresolved(String),
    #[error("`{0}` is already defined")]
    Duplicate(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("expected {expected}, found {found}")]
    Type { expected: String, found: String },
    #[error("{0}")]
    Math(String),
    #[error("the file must start with a `model` statement")]
    NoModel,
    #[error(
        "the model already has statements depending on it; declare coordinates and frames first"
    )]
    ModelFrozen,
    #[error("the model has no coordinates or frame")]
    EmptyModel,
}

/// Named values and structure declarations in source order.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Scalar(Scalar),
    Section(GSection),
    Form(PForm),
    Bivector(Bivector),
    Endo(GEndo),
    Gac(GacDecl),
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Scalar(_) => "scalar",
            Item::Section(_) => "section",
            Item::Form(_) => "form",
            Item::Bivector(_) => "bivector",
            Item::Endo(_) => "endo",
            Item::Gac(_) => "gac",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GacDecl {
    /// `gac S = (Phi, E+, E-) twist H;`
    Triple {
        phi: String,
        e_plus: GSection,
        e_minus: GSection,
        twist: Option<PForm>,
    },
    /// `gac S = construct(E+, E-) { v -> J v; ... }`
    Construct {
        e_plus: GSection,
        e_minus: GSection,
        rules: Vec<(GSection, GSection)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Calculus,
    Axioms,
    Frames,
    Classify,
    Battery,
    PropC,
    Delta,
    Quotient,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Calculus,
        CheckKind::Axioms,
        CheckKind::Frames,
        CheckKind::Classify,
        CheckKind::Battery,
        CheckKind::PropC,
        CheckKind::Delta,
        CheckKind::Quotient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Calculus => "calculus",
            CheckKind::Axioms => "axioms",
            CheckKind::Frames => "frames",
            CheckKind::Classify => "classify",
            CheckKind::Battery => "battery",
            CheckKind::PropC => "prop-c",
            CheckKind::Delta => "delta",
            CheckKind::Quotient => "quotient",
        }
    }

    pub fn from_name(name: &str) -> Option<CheckKind> {
        CheckKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Needs a generalized almost contact structure.
    pub fn needs_structure(self) -> bool {
        self != CheckKind::Calculus
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `check battery on S side +;`
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRequest {
    pub kind: CheckKind,
    pub target: Option<String>,
    pub side: Option<PwSign>,
    pub fiber: Option<String>,
}

impl CheckRequest {
    pub fn new(kind: CheckKind) -> Self {
        CheckRequest {
            kind,
            target: None,
            side: None,
            fiber: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpectKey {
    /// Dotted report path such as `classify.level`.
    Fact(String),
    /// Rendered Courant bracket of two sections under the default structure's twist.
    Bracket(GSection, GSection),
    /// Membership verdict of a section in a named frame of the default structure.
    Member(GSection, String),
}

/// `expect <key> = "<rendered value>";`
#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub key: ExpectKey,
    pub value: String,
}

#[derive(Debug, Clone)]
pub struct Workspace {
    pub model: FrameModel,
    pub items: Vec<(String, Item)>,
    pub checks: Vec<CheckRequest>,
    pub expectations: Vec<Expectation>,
}

impl Workspace {
    pub fn get(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|(n, _)| n == name).map(|(_, i)| i)
    }

    pub fn structure_names(&self) -> Vec<&str> {
        self.items
            .iter()
            .filter(|(_, i)| matches!(i, Item::Gac(_)))
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// The structure checks refer to when they name none: the last one declared.
    pub fn default_structure(&self) -> Option<&str> {
        self.structure_names().last().copied()
    }

    /// Builds and validates a declared structure.
    pub fn build_structure(
        &self,
        name: &str,
        samples: &SampleSet,
    ) -> Result<GacData, StructureError> {
        let decl = match self.get(name) {
            Some(Item::Gac(d)) => d,
            _ => return Err(StructureError::Unknown(name.to_string())),
        };
        let m = &self.model;
        match decl {
            GacDecl::Triple {
                phi,
                e_plus,
                e_minus,
                twist,
            } => {
                let endo = match self.get(phi) {
                    Some(Item::Endo(e)) => e.clone(),
                    _ => return Err(StructureError::Unknown(phi.clone())),
                };
                let twist = match twist {
                    Some(h) => Some(
                        Twist::new(m, h.clone())
                            .map_err(|e| StructureError::Twist(e.to_string()))?,
                    ),
                    None => None,
                };
                Ok(GacData::build(
                    m,
                    endo,
                    e_plus.clone(),
                    e_minus.clone(),
                    twist,
                    samples,
                )?)
            }
            GacDecl::Construct {
                e_plus,
                e_minus,
                rules,
            } => {
                let phi = construct_from_gcs(m, e_plus, e_minus, rules, samples)?;
                Ok(GacData::build(
                    m,
                    phi,
                    e_plus.clone(),
                    e_minus.clone(),
                    None,
                    samples,
                )?)
            }
        }
    }
}

impl PartialEq for Workspace {
    /// Workspaces agree when their canonical printings agree.
    fn eq(&self, other: &Self) -> bool {
        print_workspace(self) == print_workspace(other)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("no structure or endomorphism named `{0}`")]
    Unknown(String),
    #[error("invalid twist: {0}")]
    Twist(String),
    #[error(transparent)]
    Gac(#[from] GacError),
}

/// Result of [`validate_workspace`].
#[derive(Debug, Clone)]
pub struct Validation {
    pub frame: Vec<FrameDiagnostic>,
    pub structures: Vec<(String, Result<GacData, StructureError>)>,
    pub runnable: Vec<CheckKind>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.frame.is_empty() && self.structures.iter().all(|(_, r)| r.is_ok())
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out: Vec<String> = self.frame.iter().map(|d| d.to_string()).collect();
        for (name, r) in &self.structures {
            if let Err(e) = r {
                out.push(format!("structure `{name}`: {e}"));
            }
        }
        out
    }

    pub fn structure(&self, name: &str) -> Option<&Result<GacData, StructureError>> {
        self.structures
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r)
    }
}

/// Checks the frame relations, builds every structure and lists the runnable checks.
pub fn validate_workspace(w: &Workspace, samples: &SampleSet) -> Validation {
    let frame = w.model.validate();
    let structures: Vec<(String, Result<GacData, StructureError>)> = w
        .structure_names()
        .into_iter()
        .map(|n| (n.to_string(), w.build_structure(n, samples)))
        .collect();
    let any_valid = structures.iter().any(|(_, r)| r.is_ok());
    let runnable = CheckKind::ALL
        .into_iter()
        .filter(|k| !k.needs_structure() || any_valid)
        .collect();
    Validation {
        frame,
        structures,
        runnable,
    }
}
