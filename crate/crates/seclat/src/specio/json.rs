//! Canonical JSON for every core value.
//!
//! Values carry `"schema": 1` and a `"kind"` discriminator. Emission is
//! deterministic: object keys are kept sorted by the underlying map and all
//! sets serialize in their canonical order. Parsing checks shape and kind
//! and re-validates semantic constraints, so a parsed value is as good as a
//! constructed one.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::contracts::{FlowContract, LatticeContract};
use crate::flow::{BuildMode, FlowRelation, NoFlowInterface, VarDomain, Variable};
use crate::lattice::{Label, SecurityLattice};

use super::{Declaration, ResolvedContract, SpecDocument};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed value: {message}")]
pub struct JsonSchemaError {
    pub message: String,
}

fn err(message: impl Into<String>) -> JsonSchemaError {
    JsonSchemaError {
        message: message.into(),
    }
}

/// Pretty text for an emitted value.
pub fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("in-memory values serialize")
}

// ===== Emission =====

fn var_array(vars: &BTreeSet<Variable>) -> Value {
    Value::Array(
        vars.iter()
            .map(|v| Value::String(v.name().to_string()))
            .collect(),
    )
}

fn pair_array(pairs: &BTreeSet<(Variable, Variable)>) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|(a, b)| json!([a.name(), b.name()]))
            .collect(),
    )
}

pub fn label_to_json(l: &Label) -> Value {
    match l {
        Label::Bottom => json!({"kind": "bottom"}),
        Label::Top => json!({"kind": "top"}),
        Label::Vars(vs) => json!({"kind": "vars", "vars": var_array(vs)}),
        Label::Fresh(id) => json!({"kind": "fresh", "id": id}),
    }
}

pub fn flow_relation_to_json(m: &FlowRelation) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "kind": "flow-relation",
        "sources": var_array(m.domain().sources()),
        "targets": var_array(m.domain().targets()),
        "pairs": pair_array(m.pairs()),
    })
}

pub fn interface_to_json(i: &NoFlowInterface) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "kind": "no-flow-interface",
        "inputs": var_array(i.inputs()),
        "outputs": var_array(i.outputs()),
        "assumption_no_flows": pair_array(i.assumption_no_flows()),
        "guarantee_no_flows": pair_array(i.guarantee_no_flows()),
    })
}

pub fn lattice_to_json(s: &SecurityLattice) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "kind": "security-lattice",
        "labels": Value::Array(s.labels().iter().map(label_to_json).collect()),
        "can_flow": Value::Array(
            s.can_flow()
                .iter()
                .map(|(a, b)| json!([label_to_json(a), label_to_json(b)]))
                .collect()
        ),
    })
}

pub fn flow_contract_to_json(c: &FlowContract) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "kind": "flow-contract",
        "inputs": var_array(c.inputs()),
        "outputs": var_array(c.outputs()),
        "assumption": Value::Array(c.assumption().iter().map(flow_relation_to_json).collect()),
        "guarantee": Value::Array(c.guarantee().iter().map(flow_relation_to_json).collect()),
    })
}

pub fn lattice_contract_to_json(c: &LatticeContract) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "kind": "lattice-contract",
        "inputs": var_array(c.inputs()),
        "outputs": var_array(c.outputs()),
        "assumption": Value::Array(c.assumption().iter().map(lattice_to_json).collect()),
        "guarantee": Value::Array(c.guarantee().iter().map(lattice_to_json).collect()),
    })
}

/// Whole-document export: each declaration's semantic value plus its name.
pub fn document_to_json(doc: &SpecDocument) -> Value {
    let declarations: Vec<Value> = doc
        .declarations
        .iter()
        .map(|d| {
            let (name, mut value) = match d {
                Declaration::Interface(d) => (&d.name, interface_to_json(&d.interface)),
                Declaration::Flows(d) => (&d.name, flow_relation_to_json(&d.relation)),
                Declaration::Lattice(d) => (&d.name, lattice_to_json(&d.lattice)),
                Declaration::Contract(d) => (
                    &d.name,
                    match &d.contract {
                        ResolvedContract::Flows(c) => flow_contract_to_json(c),
                        ResolvedContract::Lattices(c) => lattice_contract_to_json(c),
                    },
                ),
            };
            value
                .as_object_mut()
                .expect("emitters build objects")
                .insert("name".to_string(), Value::String(name.clone()));
            value
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "kind": "document",
        "declarations": declarations,
    })
}

// ===== Parsing =====

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, JsonSchemaError> {
    v.as_object()
        .ok_or_else(|| err(format!("{what} must be an object")))
}

fn get<'a>(m: &'a Map<String, Value>, key: &str) -> Result<&'a Value, JsonSchemaError> {
    m.get(key)
        .ok_or_else(|| err(format!("missing field `{key}`")))
}

fn check_envelope(m: &Map<String, Value>, kind: &str) -> Result<(), JsonSchemaError> {
    let schema = get(m, "schema")?
        .as_u64()
        .ok_or_else(|| err("`schema` must be a number"))?;
    if schema != SCHEMA_VERSION {
        return Err(err(format!("unsupported schema version {schema}")));
    }
    let found = get(m, "kind")?
        .as_str()
        .ok_or_else(|| err("`kind` must be a string"))?;
    if found != kind {
        return Err(err(format!("expected kind {kind:?}, found {found:?}")));
    }
    Ok(())
}

fn parse_variable(v: &Value) -> Result<Variable, JsonSchemaError> {
    let name = v
        .as_str()
        .ok_or_else(|| err("variable names must be strings"))?;
    Variable::new(name).map_err(|e| err(e.to_string()))
}

fn parse_var_list(v: &Value, what: &str) -> Result<Vec<Variable>, JsonSchemaError> {
    v.as_array()
        .ok_or_else(|| err(format!("`{what}` must be an array")))?
        .iter()
        .map(parse_variable)
        .collect()
}

fn parse_pair(v: &Value) -> Result<(Variable, Variable), JsonSchemaError> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((parse_variable(a)?, parse_variable(b)?)),
        _ => Err(err("pairs must be two-element arrays")),
    }
}

fn parse_pair_list(v: &Value, what: &str) -> Result<Vec<(Variable, Variable)>, JsonSchemaError> {
    v.as_array()
        .ok_or_else(|| err(format!("`{what}` must be an array")))?
        .iter()
        .map(parse_pair)
        .collect()
}

pub fn label_from_json(v: &Value) -> Result<Label, JsonSchemaError> {
    let m = as_object(v, "a label")?;
    let kind = get(m, "kind")?
        .as_str()
        .ok_or_else(|| err("`kind` must be a string"))?;
    match kind {
        "bottom" => Ok(Label::Bottom),
        "top" => Ok(Label::Top),
        "vars" => {
            let vars = parse_var_list(get(m, "vars")?, "vars")?;
            Label::var_set(vars).map_err(|e| err(e.to_string()))
        }
        "fresh" => {
            let id = get(m, "id")?
                .as_u64()
                .ok_or_else(|| err("`id` must be a non-negative number"))?;
            Ok(Label::fresh(id))
        }
        other => Err(err(format!("unknown label kind {other:?}"))),
    }
}

pub fn flow_relation_from_json(v: &Value) -> Result<FlowRelation, JsonSchemaError> {
    let m = as_object(v, "a flow relation")?;
    check_envelope(m, "flow-relation")?;
    let sources = parse_var_list(get(m, "sources")?, "sources")?;
    let targets = parse_var_list(get(m, "targets")?, "targets")?;
    let pairs = parse_pair_list(get(m, "pairs")?, "pairs")?;
    let domain = VarDomain::new(sources, targets).map_err(|e| err(e.to_string()))?;
    FlowRelation::new(domain, pairs, BuildMode::Strict).map_err(|e| err(e.to_string()))
}

pub fn interface_from_json(v: &Value) -> Result<NoFlowInterface, JsonSchemaError> {
    let m = as_object(v, "an interface")?;
    check_envelope(m, "no-flow-interface")?;
    NoFlowInterface::new(
        parse_var_list(get(m, "inputs")?, "inputs")?,
        parse_var_list(get(m, "outputs")?, "outputs")?,
        parse_pair_list(get(m, "assumption_no_flows")?, "assumption_no_flows")?,
        parse_pair_list(get(m, "guarantee_no_flows")?, "guarantee_no_flows")?,
    )
    .map_err(|e| err(e.to_string()))
}

pub fn lattice_from_json(v: &Value) -> Result<SecurityLattice, JsonSchemaError> {
    let m = as_object(v, "a lattice")?;
    check_envelope(m, "security-lattice")?;
    let labels: BTreeSet<Label> = get(m, "labels")?
        .as_array()
        .ok_or_else(|| err("`labels` must be an array"))?
        .iter()
        .map(label_from_json)
        .collect::<Result<_, _>>()?;
    let can_flow: BTreeSet<(Label, Label)> = get(m, "can_flow")?
        .as_array()
        .ok_or_else(|| err("`can_flow` must be an array"))?
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((label_from_json(a)?, label_from_json(b)?)),
            _ => Err(err("`can_flow` entries must be two-element arrays")),
        })
        .collect::<Result<_, _>>()?;
    Ok(SecurityLattice::from_parts(labels, can_flow))
}

pub fn flow_contract_from_json(v: &Value) -> Result<FlowContract, JsonSchemaError> {
    let m = as_object(v, "a flow contract")?;
    check_envelope(m, "flow-contract")?;
    let members = |key: &str| -> Result<Vec<FlowRelation>, JsonSchemaError> {
        get(m, key)?
            .as_array()
            .ok_or_else(|| err(format!("`{key}` must be an array")))?
            .iter()
            .map(flow_relation_from_json)
            .collect()
    };
    FlowContract::new(
        parse_var_list(get(m, "inputs")?, "inputs")?,
        parse_var_list(get(m, "outputs")?, "outputs")?,
        members("assumption")?,
        members("guarantee")?,
    )
    .map_err(|e| err(e.to_string()))
}

pub fn lattice_contract_from_json(v: &Value) -> Result<LatticeContract, JsonSchemaError> {
    let m = as_object(v, "a lattice contract")?;
    check_envelope(m, "lattice-contract")?;
    let members = |key: &str| -> Result<Vec<SecurityLattice>, JsonSchemaError> {
        get(m, key)?
            .as_array()
            .ok_or_else(|| err(format!("`{key}` must be an array")))?
            .iter()
            .map(lattice_from_json)
            .collect()
    };
    LatticeContract::new(
        parse_var_list(get(m, "inputs")?, "inputs")?,
        parse_var_list(get(m, "outputs")?, "outputs")?,
        members("assumption")?,
        members("guarantee")?,
    )
    .map_err(|e| err(e.to_string()))
}
