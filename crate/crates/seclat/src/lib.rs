//! Security lattices for information-flow specifications.
//!
//! The library connects two ways of stating what information may reach what:
//!
//! * **Flow relations** (`flow`): a relation `M ⊆ (U ∪ V) × V` over source
//!   variables `U` and target variables `V`, transitively closed and reflexive
//!   over targets, together with *no-flow* interfaces that forbid particular
//!   pairs.
//! * **Security lattices** (`lattice`): finite bounded orders over labels
//!   (variable sets, plus `Top`/`Bottom` sentinels and synthetic join labels)
//!   satisfying the classic lattice axioms for label combining.
//!
//! The `translate` module converts between the two representations and checks
//! the round-trip laws executable-y: every flow relation maps to an equivalent
//! lattice (strongly connected components become labels, missing joins are
//! completed with fresh labels), and reading the lattice back yields exactly
//! the original relation. `contracts` lifts both representations to
//! assume/guarantee pairs, and `specio` provides a small text format, DOT and
//! JSON emitters, and a corpus of worked examples.

pub mod contracts;
pub mod flow;
pub mod gen;
pub mod lattice;
pub mod oracle;
pub mod specio;
pub mod translate;

pub use flow::{
    transitive_closure, BuildMode, FlowError, FlowRelation, NoFlowInterface, VarDomain, Variable,
    ViolationWitness, WitnessKind,
};
pub use lattice::{
    validate_poset, Axiom, AxiomCheck, AxiomViolation, JoinOutcome, Label, LatticeError,
    PosetReport, SecurityLattice,
};
pub use translate::{
    add_least_upper_labels, can_flow_order, fresh_renaming_equivalent, is_equivalent,
    maximal_loop_labels, replay_trace, to_flow_rel, to_lattice, Completion, EquivalenceVerdict,
    TranslateError, TranslationTrace,
};
