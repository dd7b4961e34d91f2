//! Text format for corruption models (`.scm.txt`).
//!
//! ```text
//! version 1;
//! option halfnormal_offset = identity;   # optional
//!
//! node clouds {
//!   op = clouds;
//!   eps e ~ uniform(0, 1);
//!   factor = if eps(e) < 0.75 then 0 else ~ halfnormal(0.3);
//! }
//!
//! node blur after clouds {
//!   op = blur;
//!   sigma = if clouds.factor > 0.2 then 1 else ~ discrete(1..9);
//! }
//! ```
//!
//! Grammar (EBNF):
//!
//! ```text
//! document  = { header | node } ;
//! header    = "version" NUMBER ";" | "option" "halfnormal_offset" "=" ( "identity" | "none" ) ";" ;
//! node      = "node" IDENT [ "after" IDENT { "," IDENT } ] [ "render_from" ( "clean" | "parent" ) ]
//!             "{" { item } "}" ;
//! item      = "op" "=" IDENT ";" | "eps" IDENT "~" dist ";" | IDENT "=" expr ";" ;
//! expr      = "if" cond "then" expr "else" expr | "~" dist | "(" expr ")"
//!           | [ num "*" ] "eps" "(" IDENT ")" [ ( "+" | "-" ) num ] | num ;
//! cond      = conj { "or" conj } ;
//! conj      = atom { "and" atom } ;
//! atom      = "(" cond ")" | operand cmp num ;
//! operand   = IDENT "." IDENT | "eps" "(" IDENT ")" ;
//! cmp       = "<" | "<=" | ">" | ">=" | "==" | "!=" ;
//! dist      = "uniform" "(" num "," num ")" | "halfnormal" "(" num ")" | "normal" "(" num "," num ")"
//!           | "point" "(" num ")" | "discrete" "(" item { "," item } ")"
//!           | "mixture" "(" num ":" dist { "," num ":" dist } ")" ;
//! num       = [ "-" ] NUMBER ;
//! ```
//!
//! `#` starts a comment that runs to the end of the line. A node with exactly one
//! parent renders from that parent unless `render_from clean` is given.

mod lexer;
mod parser;
mod serialize;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use crate::scm::{CausalGraph, ScmError};

pub use parser::{parse_distribution, parse_spec};
pub use serialize::{format_distribution, serialize_spec};
pub use validate::{validate_spec, Diagnostic, Level};

/// The only format version understood by this crate.
pub const FORMAT_VERSION: u32 = 1;

/// File extension for model files.
pub const EXTENSION: &str = ".scm.txt";

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Default for Pos {
    fn default() -> Self {
        Pos { line: 1, col: 1 }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Source positions of every named element of a parsed document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpanIndex {
    pub nodes: BTreeMap<String, Pos>,
    pub params: BTreeMap<(String, String), Pos>,
    pub eps: BTreeMap<(String, String), Pos>,
    pub edges: Vec<((String, String), Pos)>,
    /// Parent parameter references `(node, param)` in mechanisms.
    pub refs: Vec<((String, String), Pos)>,
}

#[derive(Debug, Clone)]
pub struct SpecDocument {
    pub source_text: String,
    pub graph: CausalGraph,
    pub version: u32,
    pub spans: SpanIndex,
}

impl SpecDocument {
    /// SHA-256 of the source text, hex encoded.
    pub fn fingerprint(&self) -> String {
        crate::hash::sha256_hex(self.source_text.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DslError {
    #[error("{pos}: syntax error: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        pos: Pos,
        expected: Vec<String>,
        found: String,
    },
    #[error("{pos}: unknown operator `{name}`")]
    UnknownOperator { pos: Pos, name: String },
    #[error("{pos}: node `{node}` refers to `{parent}`, which is not one of its parents")]
    UnknownParent {
        pos: Pos,
        node: String,
        parent: String,
    },
    #[error("{pos}: duplicate node `{name}`")]
    DuplicateNode { pos: Pos, name: String },
    #[error("{pos}: graph contains a cycle: {}", .cycle.join(" -> "))]
    AcyclicityViolation { pos: Pos, cycle: Vec<String> },
    #[error(
        "{pos}: node `{node}`: missing parameters {missing:?}, unexpected parameters {extra:?}"
    )]
    ArityError {
        pos: Pos,
        node: String,
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("{pos}: invalid distribution: {detail}")]
    InvalidDistribution { pos: Pos, detail: String },
    #[error("{pos}: node `{node}` references undeclared `{reference}`")]
    UnknownReference {
        pos: Pos,
        node: String,
        reference: String,
    },
    #[error("{pos}: {source}")]
    Graph { pos: Pos, source: ScmError },
}

impl DslError {
    pub fn pos(&self) -> Option<Pos> {
        Some(match self {
            DslError::Syntax { pos, .. }
            | DslError::UnknownOperator { pos, .. }
            | DslError::UnknownParent { pos, .. }
            | DslError::DuplicateNode { pos, .. }
            | DslError::AcyclicityViolation { pos, .. }
            | DslError::ArityError { pos, .. }
            | DslError::InvalidDistribution { pos, .. }
            | DslError::UnknownReference { pos, .. }
            | DslError::Graph { pos, .. } => *pos,
        })
    }
}

/// Reference models shipped with the crate.
pub mod shipped {
    pub const IID_UNIFORM: &str = include_str!("../../specs/iid_uniform.scm.txt");
    pub const IID_HALFNORMAL: &str = include_str!("../../specs/iid_halfnormal.scm.txt");
    pub const CHAIN_UNIFORM: &str = include_str!("../../specs/chain_uniform.scm.txt");
    pub const CHAIN_HALFNORMAL: &str = include_str!("../../specs/chain_halfnormal.scm.txt");
    pub const LONGTAIL: &str = include_str!("../../specs/longtail.scm.txt");

    /// `(name, text)` for every shipped model.
    pub const ALL: [(&str, &str); 5] = [
        ("iid_uniform", IID_UNIFORM),
        ("iid_halfnormal", IID_HALFNORMAL),
        ("chain_uniform", CHAIN_UNIFORM),
        ("chain_halfnormal", CHAIN_HALFNORMAL),
        ("longtail", LONGTAIL),
    ];

    pub fn by_name(name: &str) -> Option<&'static str> {
        ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }
}
