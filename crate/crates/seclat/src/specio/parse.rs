//! Hand-rolled lexer and recursive-descent parser for spec documents.
//!
//! Parsing is two-phase: blocks are parsed and resolved in order, except
//! contract members, which may reference declarations later in the document
//! and are resolved once the whole document has been read.

use std::collections::BTreeMap;

use crate::contracts::{ContractError, ContractPart, FlowContract, LatticeContract};
use crate::flow::{BuildMode, FlowRelation, NoFlowInterface, VarDomain, Variable};
use crate::lattice::{Label, SecurityLattice};

use super::{
    ContractDecl, ContractMember, Declaration, FlowsDecl, InterfaceDecl, LatticeDecl, MemberKind,
    ParseError, ParseErrorKind, ResolvedContract, SourceSpan, SpecDocument,
};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    Colon,
    Semi,
    Comma,
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::Colon => "`:`".to_string(),
            Tok::Semi => "`;`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Arrow => "`->`".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<(Vec<Token>, SourceSpan), ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = |length| SourceSpan {
            line,
            column,
            length,
        };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            _ if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                    column += 1;
                }
            }
            '{' | '}' | ':' | ';' | ',' => {
                chars.next();
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                out.push(Token { tok, span: span(1) });
                column += 1;
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    out.push(Token {
                        tok: Tok::Arrow,
                        span: span(2),
                    });
                    column += 2;
                } else {
                    return Err(ParseError {
                        span: span(1),
                        kind: ParseErrorKind::InvalidToken { found: '-' },
                    });
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while chars
                    .peek()
                    .is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_')
                {
                    name.push(chars.next().expect("peeked"));
                }
                let length = name.chars().count();
                if name.starts_with('_') {
                    return Err(ParseError {
                        span: span(length),
                        kind: ParseErrorKind::ReservedName { name },
                    });
                }
                out.push(Token {
                    tok: Tok::Ident(name),
                    span: span(length),
                });
                column += length;
            }
            _ => {
                return Err(ParseError {
                    span: span(1),
                    kind: ParseErrorKind::InvalidToken { found: c },
                });
            }
        }
    }
    let eof = SourceSpan {
        line,
        column,
        length: 0,
    };
    Ok((out, eof))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: SourceSpan,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    /// Token after the next one; drives the `label {` vs `x below y`
    /// disambiguation inside lattice blocks.
    fn peek2(&self) -> Option<&Tok> {
        self.tokens.get(self.pos + 1).map(|t| &t.tok)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> SourceSpan {
        self.tokens.get(self.pos).map_or(self.eof, |t| t.span)
    }

    fn expected(&self, expected: &str) -> ParseError {
        let found = self
            .tokens
            .get(self.pos)
            .map_or("end of input".to_string(), |t| t.tok.describe());
        ParseError {
            span: self.here(),
            kind: ParseErrorKind::Expected {
                expected: expected.to_string(),
                found,
            },
        }
    }

    fn expect_tok(&mut self, tok: Tok, expected: &str) -> Result<SourceSpan, ParseError> {
        if self.peek() == Some(&tok) {
            Ok(self.advance().expect("peeked").span)
        } else {
            Err(self.expected(expected))
        }
    }

    fn expect_ident(&mut self, expected: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let t = self.advance().expect("peeked");
                match t.tok {
                    Tok::Ident(name) => Ok((name, t.span)),
                    _ => unreachable!("peeked an identifier"),
                }
            }
            _ => Err(self.expected(expected)),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<SourceSpan, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) if name == keyword => Ok(self.advance().expect("peeked").span),
            _ => Err(self.expected(&format!("`{keyword}`"))),
        }
    }
}

fn make_variable(name: String, span: SourceSpan) -> Result<Variable, ParseError> {
    Variable::new(name.clone()).map_err(|_| ParseError {
        span,
        kind: ParseErrorKind::ReservedName { name },
    })
}

/// Comma-separated variable list, possibly empty, ending before `;`.
fn name_list(p: &mut Parser) -> Result<Vec<(Variable, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    if p.peek() == Some(&Tok::Semi) {
        return Ok(out);
    }
    loop {
        let (name, span) = p.expect_ident("a variable name")?;
        out.push((make_variable(name, span)?, span));
        if p.peek() == Some(&Tok::Comma) {
            p.advance();
        } else {
            return Ok(out);
        }
    }
}

struct Ports {
    inputs: Vec<(Variable, SourceSpan)>,
    outputs: Vec<(Variable, SourceSpan)>,
}

impl Ports {
    fn contains(&self, v: &Variable) -> bool {
        self.input(v) || self.output(v)
    }

    fn input(&self, v: &Variable) -> bool {
        self.inputs.iter().any(|(i, _)| i == v)
    }

    fn output(&self, v: &Variable) -> bool {
        self.outputs.iter().any(|(o, _)| o == v)
    }

    fn input_vars(&self) -> Vec<Variable> {
        self.inputs.iter().map(|(v, _)| v.clone()).collect()
    }

    fn output_vars(&self) -> Vec<Variable> {
        self.outputs.iter().map(|(v, _)| v.clone()).collect()
    }
}

/// `inputs: ...; outputs: ...;` with all port names distinct.
fn ports(p: &mut Parser) -> Result<Ports, ParseError> {
    p.expect_keyword("inputs")?;
    p.expect_tok(Tok::Colon, "`:`")?;
    let inputs = name_list(p)?;
    p.expect_tok(Tok::Semi, "`;`")?;
    p.expect_keyword("outputs")?;
    p.expect_tok(Tok::Colon, "`:`")?;
    let outputs = name_list(p)?;
    p.expect_tok(Tok::Semi, "`;`")?;
    let mut seen: BTreeMap<&Variable, SourceSpan> = BTreeMap::new();
    for (v, span) in inputs.iter().chain(&outputs) {
        if seen.insert(v, *span).is_some() {
            return Err(ParseError {
                span: *span,
                kind: ParseErrorKind::DuplicateVariable {
                    name: v.name().to_string(),
                },
            });
        }
    }
    Ok(Ports { inputs, outputs })
}

fn resolve_port(ports: &Ports, v: &Variable, span: SourceSpan) -> Result<(), ParseError> {
    if ports.contains(v) {
        Ok(())
    } else {
        Err(ParseError {
            span,
            kind: ParseErrorKind::UnknownVariable {
                name: v.name().to_string(),
            },
        })
    }
}

fn contract_part(p: &mut Parser) -> Result<ContractPart, ParseError> {
    let (kw, span) = p.expect_ident("`assumption`, `guarantee`, or `}`")?;
    match kw.as_str() {
        "assumption" => Ok(ContractPart::Assumption),
        "guarantee" => Ok(ContractPart::Guarantee),
        other => Err(ParseError {
            span,
            kind: ParseErrorKind::Expected {
                expected: "`assumption`, `guarantee`, or `}`".to_string(),
                found: format!("`{other}`"),
            },
        }),
    }
}

fn interface_decl(p: &mut Parser, name: String) -> Result<InterfaceDecl, ParseError> {
    p.expect_tok(Tok::LBrace, "`{`")?;
    let ports = ports(p)?;
    let mut no_flows = Vec::new();
    while p.peek() != Some(&Tok::RBrace) {
        let part = contract_part(p)?;
        p.expect_keyword("noflow")?;
        let (a, a_span) = p.expect_ident("a variable name")?;
        let a = make_variable(a, a_span)?;
        p.expect_tok(Tok::Arrow, "`->`")?;
        let (b, b_span) = p.expect_ident("a variable name")?;
        let b = make_variable(b, b_span)?;
        p.expect_tok(Tok::Semi, "`;`")?;
        resolve_port(&ports, &a, a_span)?;
        resolve_port(&ports, &b, b_span)?;
        let well_directed = match part {
            ContractPart::Assumption => ports.input(&b),
            ContractPart::Guarantee => ports.output(&b),
        };
        if !well_directed {
            return Err(ParseError {
                span: b_span,
                kind: ParseErrorKind::MisdirectedPair {
                    source_var: a.name().to_string(),
                    target: b.name().to_string(),
                },
            });
        }
        no_flows.push((part, (a, b)));
    }
    p.expect_tok(Tok::RBrace, "`}`")?;
    let assumption = no_flows
        .iter()
        .filter(|(p, _)| *p == ContractPart::Assumption)
        .map(|(_, pair)| pair.clone());
    let guarantee = no_flows
        .iter()
        .filter(|(p, _)| *p == ContractPart::Guarantee)
        .map(|(_, pair)| pair.clone());
    let interface = NoFlowInterface::new(
        ports.input_vars(),
        ports.output_vars(),
        assumption,
        guarantee,
    )
    .expect("statement endpoints and directions were checked");
    Ok(InterfaceDecl {
        name,
        inputs: ports.input_vars(),
        outputs: ports.output_vars(),
        no_flows,
        interface,
    })
}

fn flows_decl(p: &mut Parser, name: String) -> Result<FlowsDecl, ParseError> {
    p.expect_tok(Tok::LBrace, "`{`")?;
    let ports = ports(p)?;
    let mut flow_pairs = Vec::new();
    while p.peek() != Some(&Tok::RBrace) {
        p.expect_keyword("flow")?;
        let (a, a_span) = p.expect_ident("a variable name")?;
        let a = make_variable(a, a_span)?;
        p.expect_tok(Tok::Arrow, "`->`")?;
        let (b, b_span) = p.expect_ident("a variable name")?;
        let b = make_variable(b, b_span)?;
        p.expect_tok(Tok::Semi, "`;`")?;
        resolve_port(&ports, &a, a_span)?;
        resolve_port(&ports, &b, b_span)?;
        if !ports.output(&b) {
            return Err(ParseError {
                span: b_span,
                kind: ParseErrorKind::MisdirectedPair {
                    source_var: a.name().to_string(),
                    target: b.name().to_string(),
                },
            });
        }
        flow_pairs.push((a, b));
    }
    p.expect_tok(Tok::RBrace, "`}`")?;
    let domain = VarDomain::new(ports.input_vars(), ports.output_vars())
        .expect("port names were checked for duplicates");
    let relation = FlowRelation::new(domain, flow_pairs.iter().cloned(), BuildMode::Close)
        .expect("statement endpoints and directions were checked");
    Ok(FlowsDecl {
        name,
        inputs: ports.input_vars(),
        outputs: ports.output_vars(),
        flow_pairs,
        relation,
    })
}

/// Label name used in `below` statements: sorted contents joined with `_`.
pub(crate) fn label_name(vars: &[Variable]) -> String {
    let mut names: Vec<&str> = vars.iter().map(Variable::name).collect();
    names.sort_unstable();
    names.join("_")
}

fn lattice_decl(p: &mut Parser, name: String) -> Result<LatticeDecl, ParseError> {
    p.expect_tok(Tok::LBrace, "`{`")?;
    let mut label_sets: Vec<Vec<Variable>> = Vec::new();
    let mut label_spans: Vec<SourceSpan> = Vec::new();
    let mut below_raw: Vec<((String, SourceSpan), (String, SourceSpan))> = Vec::new();
    loop {
        match p.peek() {
            Some(Tok::RBrace) => break,
            Some(Tok::Ident(kw)) if kw == "label" && p.peek2() == Some(&Tok::LBrace) => {
                let (_, label_span) = p.expect_ident("`label`")?;
                p.expect_tok(Tok::LBrace, "`{`")?;
                let mut set = Vec::new();
                loop {
                    let (v, v_span) = p.expect_ident("a variable name")?;
                    let v = make_variable(v, v_span)?;
                    if set.contains(&v) {
                        return Err(ParseError {
                            span: v_span,
                            kind: ParseErrorKind::DuplicateVariable {
                                name: v.name().to_string(),
                            },
                        });
                    }
                    set.push(v);
                    if p.peek() == Some(&Tok::Comma) {
                        p.advance();
                    } else {
                        break;
                    }
                }
                p.expect_tok(Tok::RBrace, "`}`")?;
                p.expect_tok(Tok::Semi, "`;`")?;
                label_sets.push(set);
                label_spans.push(label_span);
            }
            Some(Tok::Ident(_)) => {
                let (left, left_span) = p.expect_ident("a label name")?;
                p.expect_keyword("below")?;
                let (right, right_span) = p.expect_ident("a label name")?;
                p.expect_tok(Tok::Semi, "`;`")?;
                below_raw.push(((left, left_span), (right, right_span)));
            }
            _ => return Err(p.expected("`label`, a label name, or `}`")),
        }
    }
    p.expect_tok(Tok::RBrace, "`}`")?;

    let mut by_name: BTreeMap<String, Label> = BTreeMap::new();
    for (set, span) in label_sets.iter().zip(&label_spans) {
        let label_name = label_name(set);
        let label = Label::var_set(set.iter().cloned()).expect("label sets are non-empty");
        if by_name.insert(label_name.clone(), label).is_some() {
            return Err(ParseError {
                span: *span,
                kind: ParseErrorKind::DuplicateName { name: label_name },
            });
        }
    }
    let mut below = Vec::new();
    let mut edges = Vec::new();
    for ((left, left_span), (right, right_span)) in below_raw {
        let resolve = |name: &str, span: SourceSpan| {
            by_name.get(name).cloned().ok_or(ParseError {
                span,
                kind: ParseErrorKind::UnknownReference {
                    name: name.to_string(),
                },
            })
        };
        edges.push((resolve(&left, left_span)?, resolve(&right, right_span)?));
        below.push((left, right));
    }
    let lattice = SecurityLattice::from_generators(by_name.into_values(), edges);
    Ok(LatticeDecl {
        name,
        label_sets,
        below,
        lattice,
    })
}

struct RawContract {
    name: String,
    ports: Ports,
    members: Vec<ContractMember>,
    member_spans: Vec<SourceSpan>,
}

fn contract_decl(p: &mut Parser, name: String) -> Result<RawContract, ParseError> {
    p.expect_tok(Tok::LBrace, "`{`")?;
    let ports = ports(p)?;
    let mut members = Vec::new();
    let mut member_spans = Vec::new();
    while p.peek() != Some(&Tok::RBrace) {
        let part = contract_part(p)?;
        let (mut kw, mut kw_span) = p.expect_ident("`maximal`, `flows`, or `lattice`")?;
        let maximal = kw == "maximal";
        if maximal {
            let next = p.expect_ident("`flows` or `lattice`")?;
            kw = next.0;
            kw_span = next.1;
        }
        let kind = match kw.as_str() {
            "flows" => MemberKind::Flows,
            "lattice" => MemberKind::Lattice,
            other => {
                return Err(ParseError {
                    span: kw_span,
                    kind: ParseErrorKind::Expected {
                        expected: "`flows` or `lattice`".to_string(),
                        found: format!("`{other}`"),
                    },
                })
            }
        };
        let (reference, ref_span) = p.expect_ident("a declaration name")?;
        p.expect_tok(Tok::Semi, "`;`")?;
        members.push(ContractMember {
            part,
            maximal,
            kind,
            reference,
        });
        member_spans.push(ref_span);
    }
    p.expect_tok(Tok::RBrace, "`}`")?;
    Ok(RawContract {
        name,
        ports,
        members,
        member_spans,
    })
}

fn contract_error(e: ContractError, raw: &RawContract, name_span: SourceSpan) -> ParseError {
    let span = match &e {
        ContractError::ForeignVariable { part, index, .. } => {
            let position = raw
                .members
                .iter()
                .enumerate()
                .filter(|(_, m)| m.part == *part)
                .nth(*index)
                .map(|(i, _)| i);
            position.map_or(name_span, |i| raw.member_spans[i])
        }
        _ => name_span,
    };
    let kind = match e {
        ContractError::ForeignVariable { name, .. } => ParseErrorKind::UnknownVariable {
            name: name.name().to_string(),
        },
        other => ParseErrorKind::InvalidContract {
            message: other.to_string(),
        },
    };
    ParseError { span, kind }
}

fn resolve_contract(
    raw: RawContract,
    name_span: SourceSpan,
    by_name: &BTreeMap<String, Declaration>,
) -> Result<ContractDecl, ParseError> {
    let mut kinds = raw.members.iter().map(|m| m.kind);
    let contract_kind = kinds.next().unwrap_or(MemberKind::Flows);
    if let Some(position) = raw.members.iter().position(|m| m.kind != contract_kind) {
        return Err(ParseError {
            span: raw.member_spans[position],
            kind: ParseErrorKind::MixedContractMembers,
        });
    }

    let mut flow_members: Vec<(ContractPart, FlowRelation)> = Vec::new();
    let mut lattice_members: Vec<(ContractPart, SecurityLattice)> = Vec::new();
    for (member, span) in raw.members.iter().zip(&raw.member_spans) {
        let unknown = || ParseError {
            span: *span,
            kind: ParseErrorKind::UnknownReference {
                name: member.reference.clone(),
            },
        };
        match (member.kind, by_name.get(&member.reference)) {
            (MemberKind::Flows, Some(Declaration::Flows(d))) => {
                flow_members.push((member.part, d.relation.clone()));
            }
            (MemberKind::Lattice, Some(Declaration::Lattice(d))) => {
                lattice_members.push((member.part, d.lattice.clone()));
            }
            _ => return Err(unknown()),
        }
    }

    fn split<T>(members: Vec<(ContractPart, T)>) -> (Vec<T>, Vec<T>) {
        let mut assumption = Vec::new();
        let mut guarantee = Vec::new();
        for (part, value) in members {
            match part {
                ContractPart::Assumption => assumption.push(value),
                ContractPart::Guarantee => guarantee.push(value),
            }
        }
        (assumption, guarantee)
    }

    let contract = match contract_kind {
        MemberKind::Flows => {
            let (assumption, guarantee) = split(flow_members);
            ResolvedContract::Flows(
                FlowContract::new(
                    raw.ports.input_vars(),
                    raw.ports.output_vars(),
                    assumption,
                    guarantee,
                )
                .map_err(|e| contract_error(e, &raw, name_span))?,
            )
        }
        MemberKind::Lattice => {
            let (assumption, guarantee) = split(lattice_members);
            ResolvedContract::Lattices(
                LatticeContract::new(
                    raw.ports.input_vars(),
                    raw.ports.output_vars(),
                    assumption,
                    guarantee,
                )
                .map_err(|e| contract_error(e, &raw, name_span))?,
            )
        }
    };

    Ok(ContractDecl {
        name: raw.name,
        inputs: raw.ports.input_vars(),
        outputs: raw.ports.output_vars(),
        members: raw.members,
        contract,
    })
}

enum Slot {
    Done(Declaration),
    Pending(RawContract, SourceSpan),
}

/// Parse a whole document.
pub fn parse_spec(text: &str) -> Result<SpecDocument, ParseError> {
    let (tokens, eof) = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        eof,
    };

    let mut slots: Vec<Slot> = Vec::new();
    let mut names: BTreeMap<String, SourceSpan> = BTreeMap::new();
    while p.peek().is_some() {
        let (kw, kw_span) = p.expect_ident("`interface`, `flows`, `lattice`, or `contract`")?;
        let (name, name_span) = p.expect_ident("a declaration name")?;
        if names.insert(name.clone(), name_span).is_some() {
            return Err(ParseError {
                span: name_span,
                kind: ParseErrorKind::DuplicateName { name },
            });
        }
        match kw.as_str() {
            "interface" => slots.push(Slot::Done(Declaration::Interface(interface_decl(
                &mut p, name,
            )?))),
            "flows" => slots.push(Slot::Done(Declaration::Flows(flows_decl(&mut p, name)?))),
            "lattice" => slots.push(Slot::Done(Declaration::Lattice(lattice_decl(
                &mut p, name,
            )?))),
            "contract" => {
                let raw = contract_decl(&mut p, name)?;
                slots.push(Slot::Pending(raw, name_span));
            }
            other => {
                return Err(ParseError {
                    span: kw_span,
                    kind: ParseErrorKind::Expected {
                        expected: "`interface`, `flows`, `lattice`, or `contract`".to_string(),
                        found: format!("`{other}`"),
                    },
                })
            }
        }
    }

    // Contract members may point forward, so resolve them against the full
    // document.
    let by_name: BTreeMap<String, Declaration> = slots
        .iter()
        .filter_map(|s| match s {
            Slot::Done(d) => Some((d.name().to_string(), d.clone())),
            Slot::Pending(..) => None,
        })
        .collect();
    let mut declarations = Vec::with_capacity(slots.len());
    for slot in slots {
        declarations.push(match slot {
            Slot::Done(d) => d,
            Slot::Pending(raw, name_span) => {
                Declaration::Contract(resolve_contract(raw, name_span, &by_name)?)
            }
        });
    }
    Ok(SpecDocument { declarations })
}
