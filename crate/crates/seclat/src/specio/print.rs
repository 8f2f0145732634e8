//! Canonical pretty-printer.
//!
//! Emits four-space indentation, one statement per line in written order,
//! and a single blank line between declarations. Corpus files are stored in
//! exactly this shape, so printing a parsed corpus document reproduces the
//! file byte for byte.

use std::fmt::Write;

use crate::flow::Variable;

use super::{Declaration, SpecDocument};

fn name_list(out: &mut String, vars: &[Variable]) {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        } else {
            out.push(' ');
        }
        out.push_str(v.name());
    }
}

fn ports(out: &mut String, inputs: &[Variable], outputs: &[Variable]) {
    out.push_str("    inputs:");
    name_list(out, inputs);
    out.push_str(";\n    outputs:");
    name_list(out, outputs);
    out.push_str(";\n");
}

/// Render a document in canonical form.
pub fn pretty(doc: &SpecDocument) -> String {
    let mut out = String::new();
    for (i, decl) in doc.declarations.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match decl {
            Declaration::Interface(d) => {
                writeln!(out, "interface {} {{", d.name).expect("writing to a string");
                ports(&mut out, &d.inputs, &d.outputs);
                for (part, (a, b)) in &d.no_flows {
                    writeln!(out, "    {part} noflow {a} -> {b};").expect("writing to a string");
                }
                out.push_str("}\n");
            }
            Declaration::Flows(d) => {
                writeln!(out, "flows {} {{", d.name).expect("writing to a string");
                ports(&mut out, &d.inputs, &d.outputs);
                for (a, b) in &d.flow_pairs {
                    writeln!(out, "    flow {a} -> {b};").expect("writing to a string");
                }
                out.push_str("}\n");
            }
            Declaration::Lattice(d) => {
                writeln!(out, "lattice {} {{", d.name).expect("writing to a string");
                for set in &d.label_sets {
                    let names: Vec<&str> = set.iter().map(Variable::name).collect();
                    writeln!(out, "    label {{{}}};", names.join(", "))
                        .expect("writing to a string");
                }
                for (left, right) in &d.below {
                    writeln!(out, "    {left} below {right};").expect("writing to a string");
                }
                out.push_str("}\n");
            }
            Declaration::Contract(d) => {
                writeln!(out, "contract {} {{", d.name).expect("writing to a string");
                ports(&mut out, &d.inputs, &d.outputs);
                for m in &d.members {
                    let maximal = if m.maximal { " maximal" } else { "" };
                    writeln!(out, "    {}{} {} {};", m.part, maximal, m.kind, m.reference)
                        .expect("writing to a string");
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_spec;
    use super::*;

    #[test]
    fn canonical_interface_layout() {
        let text = "interface Bus {\n    inputs: wheel_s, distw_f_s, distw_b_s;\n    \
                    outputs: odo_t, distw_f_t, distw_b_t;\n    \
                    guarantee noflow wheel_s -> distw_f_t;\n    \
                    guarantee noflow wheel_s -> distw_b_t;\n}\n";
        let doc = parse_spec(text).unwrap();
        assert_eq!(pretty(&doc), text);
    }

    #[test]
    fn normalizes_whitespace_and_drops_comments() {
        let doc = parse_spec("flows F{inputs:u;outputs:v;  # dense\n  flow u->v;}").unwrap();
        assert_eq!(
            pretty(&doc),
            "flows F {\n    inputs: u;\n    outputs: v;\n    flow u -> v;\n}\n"
        );
    }

    #[test]
    fn empty_port_lists_print_tightly() {
        let doc = parse_spec("flows F { inputs:; outputs:; }").unwrap();
        assert_eq!(pretty(&doc), "flows F {\n    inputs:;\n    outputs:;\n}\n");
    }

    #[test]
    fn blocks_are_separated_by_one_blank_line() {
        let text = "lattice A {\n    label {x};\n}\n\nlattice B {\n    label {y};\n}\n";
        let doc = parse_spec(text).unwrap();
        assert_eq!(pretty(&doc), text);
    }

    #[test]
    fn printing_then_parsing_is_structurally_lossless() {
        let text = "contract C {\n    inputs: u;\n    outputs: v;\n    \
                    assumption flows A;\n    guarantee maximal flows F;\n}\n\n\
                    flows A {\n    inputs: v;\n    outputs: u;\n}\n\n\
                    flows F {\n    inputs: u;\n    outputs: v;\n    flow u -> v;\n}\n";
        let doc = parse_spec(text).unwrap();
        let printed = pretty(&doc);
        assert_eq!(printed, text);
        assert_eq!(parse_spec(&printed).unwrap(), doc);
    }
}
