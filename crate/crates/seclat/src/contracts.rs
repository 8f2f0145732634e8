//! Assume-guarantee contracts over information flows.
//!
//! A contract splits a component's ports into inputs and outputs and
//! constrains the environment (assumption members, which target inputs) and
//! the implementation (guarantee members, which target outputs). Members are
//! flow relations in a [`FlowContract`] and security lattices in a
//! [`LatticeContract`]; [`to_lattice_contract`] and [`to_flow_contract`]
//! translate member-wise and invert each other on contracts whose members
//! span the full port set.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::flow::{FlowRelation, Variable, ViolationWitness, WitnessKind};
use crate::lattice::{Axiom, SecurityLattice};
use crate::translate::{to_flow_rel, to_lattice, TranslateError};

/// Which half of a contract a member belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContractPart {
    Assumption,
    Guarantee,
}

impl fmt::Display for ContractPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContractPart::Assumption => write!(f, "assumption"),
            ContractPart::Guarantee => write!(f, "guarantee"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("variable {name} is declared both input and output")]
    OverlappingPorts { name: Variable },
    #[error("{part} member {index} uses undeclared variable {name}")]
    ForeignVariable {
        part: ContractPart,
        index: usize,
        name: Variable,
    },
    #[error("{part} member {index} fails the {axiom} lattice check")]
    MemberNotALattice {
        part: ContractPart,
        index: usize,
        axiom: Axiom,
    },
}

/// A problem found in a contract member, tagged with its position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractViolation {
    pub part: ContractPart,
    pub index: usize,
    pub witness: ViolationWitness,
}

impl fmt::Display for ContractViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]: {}", self.part, self.index, self.witness)
    }
}

/// Assumptions and guarantees as flow relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowContract {
    inputs: BTreeSet<Variable>,
    outputs: BTreeSet<Variable>,
    assumption: Vec<FlowRelation>,
    guarantee: Vec<FlowRelation>,
}

/// Assumptions and guarantees as security lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeContract {
    inputs: BTreeSet<Variable>,
    outputs: BTreeSet<Variable>,
    assumption: Vec<SecurityLattice>,
    guarantee: Vec<SecurityLattice>,
}

fn check_ports(
    inputs: &BTreeSet<Variable>,
    outputs: &BTreeSet<Variable>,
) -> Result<(), ContractError> {
    if let Some(shared) = inputs.intersection(outputs).next() {
        return Err(ContractError::OverlappingPorts {
            name: shared.clone(),
        });
    }
    Ok(())
}

impl FlowContract {
    /// Ports must be disjoint and member relations may only mention declared
    /// ports. Whether members target the *right* ports is a [`validate`]
    /// concern, so ill-directed contracts can be built and then reported.
    ///
    /// [`validate`]: FlowContract::validate
    pub fn new(
        inputs: impl IntoIterator<Item = Variable>,
        outputs: impl IntoIterator<Item = Variable>,
        assumption: impl IntoIterator<Item = FlowRelation>,
        guarantee: impl IntoIterator<Item = FlowRelation>,
    ) -> Result<Self, ContractError> {
        let contract = FlowContract {
            inputs: inputs.into_iter().collect(),
            outputs: outputs.into_iter().collect(),
            assumption: assumption.into_iter().collect(),
            guarantee: guarantee.into_iter().collect(),
        };
        check_ports(&contract.inputs, &contract.outputs)?;
        let z = contract.z();
        for (part, members) in [
            (ContractPart::Assumption, &contract.assumption),
            (ContractPart::Guarantee, &contract.guarantee),
        ] {
            for (index, m) in members.iter().enumerate() {
                if let Some(v) = m.domain().vars().difference(&z).next() {
                    return Err(ContractError::ForeignVariable {
                        part,
                        index,
                        name: v.clone(),
                    });
                }
            }
        }
        Ok(contract)
    }

    pub fn inputs(&self) -> &BTreeSet<Variable> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<Variable> {
        &self.outputs
    }

    /// All ports.
    pub fn z(&self) -> BTreeSet<Variable> {
        self.inputs.union(&self.outputs).cloned().collect()
    }

    pub fn assumption(&self) -> &[FlowRelation] {
        &self.assumption
    }

    pub fn guarantee(&self) -> &[FlowRelation] {
        &self.guarantee
    }

    /// Report members that target the wrong half of the port set (as a
    /// bad-range witness on the offending target) plus each member's own
    /// closure and range violations.
    pub fn validate(&self) -> Vec<ContractViolation> {
        let mut out = Vec::new();
        for (part, allowed, members) in [
            (ContractPart::Assumption, &self.inputs, &self.assumption),
            (ContractPart::Guarantee, &self.outputs, &self.guarantee),
        ] {
            for (index, m) in members.iter().enumerate() {
                for t in m.domain().targets() {
                    if !allowed.contains(t) {
                        out.push(ContractViolation {
                            part,
                            index,
                            witness: ViolationWitness {
                                pair: (t.clone(), t.clone()),
                                kind: WitnessKind::BadRange,
                            },
                        });
                    }
                }
                for witness in m.violations() {
                    out.push(ContractViolation {
                        part,
                        index,
                        witness,
                    });
                }
            }
        }
        out
    }
}

impl LatticeContract {
    /// Ports must be disjoint, member lattices must validate, and member
    /// label variables may only mention declared ports.
    pub fn new(
        inputs: impl IntoIterator<Item = Variable>,
        outputs: impl IntoIterator<Item = Variable>,
        assumption: impl IntoIterator<Item = SecurityLattice>,
        guarantee: impl IntoIterator<Item = SecurityLattice>,
    ) -> Result<Self, ContractError> {
        let contract = LatticeContract {
            inputs: inputs.into_iter().collect(),
            outputs: outputs.into_iter().collect(),
            assumption: assumption.into_iter().collect(),
            guarantee: guarantee.into_iter().collect(),
        };
        check_ports(&contract.inputs, &contract.outputs)?;
        let z = contract.z();
        for (part, members) in [
            (ContractPart::Assumption, &contract.assumption),
            (ContractPart::Guarantee, &contract.guarantee),
        ] {
            for (index, s) in members.iter().enumerate() {
                if let Some(axiom) = s.validate().first_failed_axiom() {
                    return Err(ContractError::MemberNotALattice { part, index, axiom });
                }
                for label in s.labels() {
                    let Some(vs) = label.vars() else { continue };
                    if let Some(v) = vs.iter().find(|v| !z.contains(*v)) {
                        return Err(ContractError::ForeignVariable {
                            part,
                            index,
                            name: v.clone(),
                        });
                    }
                }
            }
        }
        Ok(contract)
    }

    pub fn inputs(&self) -> &BTreeSet<Variable> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<Variable> {
        &self.outputs
    }

    /// All ports.
    pub fn z(&self) -> BTreeSet<Variable> {
        self.inputs.union(&self.outputs).cloned().collect()
    }

    pub fn assumption(&self) -> &[SecurityLattice] {
        &self.assumption
    }

    pub fn guarantee(&self) -> &[SecurityLattice] {
        &self.guarantee
    }
}

/// Translate every member relation to a lattice. Member counts and the
/// input/output split are preserved.
pub fn to_lattice_contract(c: &FlowContract) -> Result<LatticeContract, TranslateError> {
    let mut assumption = Vec::with_capacity(c.assumption.len());
    for m in &c.assumption {
        assumption.push(to_lattice(m)?.0);
    }
    let mut guarantee = Vec::with_capacity(c.guarantee.len());
    for m in &c.guarantee {
        guarantee.push(to_lattice(m)?.0);
    }
    Ok(
        LatticeContract::new(c.inputs.clone(), c.outputs.clone(), assumption, guarantee)
            .expect("translated members validate and stay within the ports"),
    )
}

/// Read every member lattice back as a flow relation: assumptions over all
/// ports into the inputs, guarantees over all ports into the outputs.
pub fn to_flow_contract(c: &LatticeContract) -> FlowContract {
    let z = c.z();
    let assumption: Vec<FlowRelation> = c
        .assumption
        .iter()
        .map(|s| to_flow_rel(s, &z, &c.inputs))
        .collect();
    let guarantee: Vec<FlowRelation> = c
        .guarantee
        .iter()
        .map(|s| to_flow_rel(s, &z, &c.outputs))
        .collect();
    FlowContract::new(c.inputs.clone(), c.outputs.clone(), assumption, guarantee)
        .expect("derived members stay within the ports")
}
