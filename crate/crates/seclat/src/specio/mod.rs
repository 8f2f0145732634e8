//! Textual specification format, exporters, and the example corpus.
//!
//! Documents hold named `interface`, `flows`, `lattice`, and `contract`
//! blocks. Each parsed declaration keeps its statements in written order
//! (so pretty-printing a canonical file reproduces it byte for byte) next to
//! the resolved semantic object. DOT and JSON emitters render lattices and
//! all core values deterministically.

mod corpus;
mod dot;
mod json;
mod parse;
mod print;

use std::fmt;

use thiserror::Error;

use crate::contracts::{ContractPart, FlowContract, LatticeContract};
use crate::flow::{FlowRelation, NoFlowInterface, Variable};
use crate::lattice::SecurityLattice;

pub use corpus::{corpus, corpus_sources, CorpusEntry};
pub use dot::emit_dot;
pub use json::{
    document_to_json, flow_contract_from_json, flow_contract_to_json, flow_relation_from_json,
    flow_relation_to_json, interface_from_json, interface_to_json, json_text, label_from_json,
    label_to_json, lattice_contract_from_json, lattice_contract_to_json, lattice_from_json,
    lattice_to_json, JsonSchemaError,
};
pub use parse::parse_spec;
pub use print::pretty;

/// Location of a token in the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    /// 1-based.
    pub line: usize,
    /// 1-based.
    pub column: usize,
    /// In characters.
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {found:?}")]
    InvalidToken { found: char },
    #[error("expected {expected}, found {found}")]
    Expected { expected: String, found: String },
    #[error("names starting with an underscore are reserved: {name}")]
    ReservedName { name: String },
    #[error("unknown variable {name}")]
    UnknownVariable { name: String },
    #[error("duplicate declaration name {name}")]
    DuplicateName { name: String },
    #[error("duplicate variable {name}")]
    DuplicateVariable { name: String },
    #[error("{source_var} -> {target} must point at a declared target")]
    MisdirectedPair { source_var: String, target: String },
    #[error("no declaration named {name} to reference")]
    UnknownReference { name: String },
    #[error("contract mixes flows and lattice members")]
    MixedContractMembers,
    #[error("{message}")]
    InvalidContract { message: String },
}

/// An ordered list of named declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecDocument {
    pub declarations: Vec<Declaration>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Interface(InterfaceDecl),
    Flows(FlowsDecl),
    Lattice(LatticeDecl),
    Contract(ContractDecl),
}

impl Declaration {
    pub fn name(&self) -> &str {
        match self {
            Declaration::Interface(d) => &d.name,
            Declaration::Flows(d) => &d.name,
            Declaration::Lattice(d) => &d.name,
            Declaration::Contract(d) => &d.name,
        }
    }
}

impl SpecDocument {
    pub fn find(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| d.name() == name)
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        match self.find(name) {
            Some(Declaration::Interface(d)) => Some(d),
            _ => None,
        }
    }

    pub fn flows(&self, name: &str) -> Option<&FlowsDecl> {
        match self.find(name) {
            Some(Declaration::Flows(d)) => Some(d),
            _ => None,
        }
    }

    pub fn lattice(&self, name: &str) -> Option<&LatticeDecl> {
        match self.find(name) {
            Some(Declaration::Lattice(d)) => Some(d),
            _ => None,
        }
    }

    pub fn contract(&self, name: &str) -> Option<&ContractDecl> {
        match self.find(name) {
            Some(Declaration::Contract(d)) => Some(d),
            _ => None,
        }
    }
}

/// `interface N { ... }`: ports plus no-flow requirements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub name: String,
    pub inputs: Vec<Variable>,
    pub outputs: Vec<Variable>,
    /// No-flow statements in written order.
    pub no_flows: Vec<(ContractPart, (Variable, Variable))>,
    pub interface: NoFlowInterface,
}

/// `flows N { ... }`: ports plus flow pairs, closed on load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowsDecl {
    pub name: String,
    pub inputs: Vec<Variable>,
    pub outputs: Vec<Variable>,
    /// Flow statements in written order, before closure.
    pub flow_pairs: Vec<(Variable, Variable)>,
    pub relation: FlowRelation,
}

/// `lattice N { ... }`: labels by content, order by derived label names,
/// sentinels implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeDecl {
    pub name: String,
    /// Label statements in written order.
    pub label_sets: Vec<Vec<Variable>>,
    /// Below statements in written order, by label name (sorted contents
    /// joined with underscores).
    pub below: Vec<(String, String)>,
    pub lattice: SecurityLattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberKind {
    Flows,
    Lattice,
}

impl fmt::Display for MemberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemberKind::Flows => f.write_str("flows"),
            MemberKind::Lattice => f.write_str("lattice"),
        }
    }
}

/// One `assumption`/`guarantee` line of a contract block, referencing a
/// flows or lattice declaration elsewhere in the document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractMember {
    pub part: ContractPart,
    pub maximal: bool,
    pub kind: MemberKind,
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolvedContract {
    Flows(FlowContract),
    Lattices(LatticeContract),
}

/// `contract N { ... }`: ports plus member references; members must be all
/// flows or all lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDecl {
    pub name: String,
    pub inputs: Vec<Variable>,
    pub outputs: Vec<Variable>,
    /// Member statements in written order.
    pub members: Vec<ContractMember>,
    pub contract: ResolvedContract,
}
