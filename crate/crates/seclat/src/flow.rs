//! Variables, flow relations, and no-flow interfaces.
//!
//! A [`FlowRelation`] records which variables may influence which target
//! variables. Stored relations are always transitively closed and reflexive
//! over targets; [`BuildMode`] picks whether the constructor closes raw input
//! itself or insists the input is already closed. Violations of the
//! representation invariants are plain data ([`ViolationWitness`]) so tools
//! can report them instead of aborting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A named system variable (a port or signal).
///
/// Names starting with `_` are reserved for the rendered form of fresh join
/// labels and cannot be built with [`Variable::new`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Result<Self, FlowError> {
        let name = name.into();
        if name.is_empty() {
            return Err(FlowError::InvalidName { name });
        }
        if name.starts_with('_') {
            return Err(FlowError::ReservedName { name });
        }
        Ok(Variable(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Disjoint source and target variable sets `(U, V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDomain {
    sources: BTreeSet<Variable>,
    targets: BTreeSet<Variable>,
}

impl VarDomain {
    pub fn new(
        sources: impl IntoIterator<Item = Variable>,
        targets: impl IntoIterator<Item = Variable>,
    ) -> Result<Self, FlowError> {
        let sources: BTreeSet<_> = sources.into_iter().collect();
        let targets: BTreeSet<_> = targets.into_iter().collect();
        if let Some(v) = sources.intersection(&targets).next() {
            return Err(FlowError::OverlappingDomains { name: v.clone() });
        }
        Ok(VarDomain { sources, targets })
    }

    pub fn sources(&self) -> &BTreeSet<Variable> {
        &self.sources
    }

    pub fn targets(&self) -> &BTreeSet<Variable> {
        &self.targets
    }

    /// `U ∪ V`.
    pub fn vars(&self) -> BTreeSet<Variable> {
        self.sources.union(&self.targets).cloned().collect()
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.sources.contains(v) || self.targets.contains(v)
    }

    pub fn is_target(&self, v: &Variable) -> bool {
        self.targets.contains(v)
    }
}

/// Smallest transitive superset of `pairs`.
pub fn transitive_closure(
    pairs: &BTreeSet<(Variable, Variable)>,
) -> BTreeSet<(Variable, Variable)> {
    let vars: Vec<&Variable> = pairs
        .iter()
        .flat_map(|(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = vars.len();
    let mut reach = vec![vec![false; n]; n];
    for (a, b) in pairs {
        reach[index[a]][index[b]] = true;
    }
    for k in 0..n {
        // Row k never changes during pass k, so the snapshot is exact.
        let via = reach[k].clone();
        for row in &mut reach {
            if row[k] {
                for (cell, &hop) in row.iter_mut().zip(&via) {
                    *cell |= hop;
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if reach[i][j] {
                out.insert((vars[i].clone(), vars[j].clone()));
            }
        }
    }
    out
}

/// How [`FlowRelation::new`] treats raw input pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildMode {
    /// Add reflexive target pairs and the transitive closure.
    Close,
    /// Require the input to already be closed and reflexive over targets.
    Strict,
}

/// What a validity check found wrong, as data.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ViolationWitness {
    pub pair: (Variable, Variable),
    pub kind: WitnessKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum WitnessKind {
    NotTransitive,
    NotReflexive,
    BadRange,
    NoFlowViolated,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WitnessKind::NotTransitive => "not-transitive",
            WitnessKind::NotReflexive => "not-reflexive",
            WitnessKind::BadRange => "bad-range",
            WitnessKind::NoFlowViolated => "noflow-violated",
        };
        f.write_str(s)
    }
}

impl fmt::Display for ViolationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} -> {}", self.kind, self.pair.0, self.pair.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("invalid variable name {name:?}")]
    InvalidName { name: String },
    #[error("name {name:?} is reserved for synthetic labels")]
    ReservedName { name: String },
    #[error("variable {name} appears in both sources and targets")]
    OverlappingDomains { name: Variable },
    #[error("unknown variable {name}")]
    UnknownVariable { name: Variable },
    #[error("flow {source_var} -> {target} targets a non-target variable")]
    RangeError {
        source_var: Variable,
        target: Variable,
    },
    #[error("relation is not closed: {witness}")]
    NotClosed { witness: ViolationWitness },
}

/// A permitted-flow relation `M ⊆ (U ∪ V) × V`.
///
/// Valid relations are transitively closed and reflexive over targets; use
/// [`FlowRelation::violations`] to check a relation built from raw parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowRelation {
    domain: VarDomain,
    pairs: BTreeSet<(Variable, Variable)>,
}

impl FlowRelation {
    /// Build a relation from raw pairs, either closing them or checking them
    /// (`mode`). Every pair must stay inside the domain and point at a target.
    pub fn new(
        domain: VarDomain,
        raw_pairs: impl IntoIterator<Item = (Variable, Variable)>,
        mode: BuildMode,
    ) -> Result<Self, FlowError> {
        let raw: BTreeSet<(Variable, Variable)> = raw_pairs.into_iter().collect();
        for (a, b) in &raw {
            if !domain.contains(a) {
                return Err(FlowError::UnknownVariable { name: a.clone() });
            }
            if !domain.contains(b) {
                return Err(FlowError::UnknownVariable { name: b.clone() });
            }
            if !domain.is_target(b) {
                return Err(FlowError::RangeError {
                    source_var: a.clone(),
                    target: b.clone(),
                });
            }
        }
        match mode {
            BuildMode::Close => {
                let mut pairs = raw;
                for v in domain.targets() {
                    pairs.insert((v.clone(), v.clone()));
                }
                let pairs = transitive_closure(&pairs);
                Ok(FlowRelation { domain, pairs })
            }
            BuildMode::Strict => {
                let candidate = FlowRelation { domain, pairs: raw };
                if let Some(witness) = candidate.violations().into_iter().next() {
                    return Err(FlowError::NotClosed { witness });
                }
                Ok(candidate)
            }
        }
    }

    /// Wrap parts without any checking; pair with [`FlowRelation::violations`].
    pub fn from_parts(domain: VarDomain, pairs: BTreeSet<(Variable, Variable)>) -> Self {
        FlowRelation { domain, pairs }
    }

    pub fn domain(&self) -> &VarDomain {
        &self.domain
    }

    pub fn pairs(&self) -> &BTreeSet<(Variable, Variable)> {
        &self.pairs
    }

    /// All invariant violations, in canonical order: range errors, then
    /// missing transitive pairs, then missing reflexive target pairs.
    ///
    /// A pair whose source lies outside `U ∪ V` is reported as `bad-range`
    /// too: it is outside the relation's type `(U ∪ V) × V` either way.
    pub fn violations(&self) -> Vec<ViolationWitness> {
        let mut out = Vec::new();
        for (a, b) in &self.pairs {
            if !self.domain.is_target(b) || !self.domain.contains(a) {
                out.push(ViolationWitness {
                    pair: (a.clone(), b.clone()),
                    kind: WitnessKind::BadRange,
                });
            }
        }
        let mut missing = BTreeSet::new();
        for (a, b) in &self.pairs {
            for (c, d) in self.pairs.range((b.clone(), Variable(String::new()))..) {
                if c != b {
                    break;
                }
                if !self.pairs.contains(&(a.clone(), d.clone())) {
                    missing.insert((a.clone(), d.clone()));
                }
            }
        }
        for pair in missing {
            out.push(ViolationWitness {
                pair,
                kind: WitnessKind::NotTransitive,
            });
        }
        for v in self.domain.targets() {
            if !self.pairs.contains(&(v.clone(), v.clone())) {
                out.push(ViolationWitness {
                    pair: (v.clone(), v.clone()),
                    kind: WitnessKind::NotReflexive,
                });
            }
        }
        out
    }

    /// Which forbidden pairs the relation nevertheless permits.
    ///
    /// Errors if a no-flow pair mentions a variable the relation never
    /// declared.
    pub fn check_no_flows(
        &self,
        no_flows: &BTreeSet<(Variable, Variable)>,
    ) -> Result<Vec<ViolationWitness>, FlowError> {
        for (a, b) in no_flows {
            if !self.domain.contains(a) {
                return Err(FlowError::UnknownVariable { name: a.clone() });
            }
            if !self.domain.contains(b) {
                return Err(FlowError::UnknownVariable { name: b.clone() });
            }
        }
        Ok(no_flows
            .iter()
            .filter(|pair| self.pairs.contains(pair))
            .map(|pair| ViolationWitness {
                pair: pair.clone(),
                kind: WitnessKind::NoFlowViolated,
            })
            .collect())
    }
}

/// An interface stated purely as forbidden flows: assumptions constrain the
/// environment (pairs into inputs), guarantees constrain the implementation
/// (pairs into outputs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoFlowInterface {
    inputs: BTreeSet<Variable>,
    outputs: BTreeSet<Variable>,
    assumption_no_flows: BTreeSet<(Variable, Variable)>,
    guarantee_no_flows: BTreeSet<(Variable, Variable)>,
}

impl NoFlowInterface {
    pub fn new(
        inputs: impl IntoIterator<Item = Variable>,
        outputs: impl IntoIterator<Item = Variable>,
        assumption_no_flows: impl IntoIterator<Item = (Variable, Variable)>,
        guarantee_no_flows: impl IntoIterator<Item = (Variable, Variable)>,
    ) -> Result<Self, FlowError> {
        let inputs: BTreeSet<_> = inputs.into_iter().collect();
        let outputs: BTreeSet<_> = outputs.into_iter().collect();
        if let Some(v) = inputs.intersection(&outputs).next() {
            return Err(FlowError::OverlappingDomains { name: v.clone() });
        }
        let assumption_no_flows: BTreeSet<_> = assumption_no_flows.into_iter().collect();
        let guarantee_no_flows: BTreeSet<_> = guarantee_no_flows.into_iter().collect();
        let known = |v: &Variable| inputs.contains(v) || outputs.contains(v);
        for (a, b) in &assumption_no_flows {
            if !known(a) || !known(b) {
                let name = if known(a) { b.clone() } else { a.clone() };
                return Err(FlowError::UnknownVariable { name });
            }
            if !inputs.contains(b) {
                return Err(FlowError::RangeError {
                    source_var: a.clone(),
                    target: b.clone(),
                });
            }
        }
        for (a, b) in &guarantee_no_flows {
            if !known(a) || !known(b) {
                let name = if known(a) { b.clone() } else { a.clone() };
                return Err(FlowError::UnknownVariable { name });
            }
            if !outputs.contains(b) {
                return Err(FlowError::RangeError {
                    source_var: a.clone(),
                    target: b.clone(),
                });
            }
        }
        Ok(NoFlowInterface {
            inputs,
            outputs,
            assumption_no_flows,
            guarantee_no_flows,
        })
    }

    pub fn inputs(&self) -> &BTreeSet<Variable> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<Variable> {
        &self.outputs
    }

    pub fn assumption_no_flows(&self) -> &BTreeSet<(Variable, Variable)> {
        &self.assumption_no_flows
    }

    pub fn guarantee_no_flows(&self) -> &BTreeSet<(Variable, Variable)> {
        &self.guarantee_no_flows
    }
}
