//! Hasse-diagram export in DOT form.

use std::fmt::Write;

use crate::lattice::SecurityLattice;

/// Render the covering relation of `s`, bottom-up, one quoted node per
/// label. If `s` fails validation the full non-reflexive order is drawn
/// instead and a warning lands in the graph's `comment` attribute. Output
/// depends only on the lattice value, so equal inputs give identical bytes.
pub fn emit_dot(s: &SecurityLattice) -> String {
    let mut out = String::from("digraph security_lattice {\n    rankdir=BT;\n");
    let report = s.validate();
    if !report.is_lattice() {
        let axiom = report
            .first_failed_axiom()
            .expect("a failed report names an axiom");
        writeln!(
            out,
            "    comment=\"warning: not a lattice; the {axiom} check fails\";"
        )
        .expect("writing to a string");
    }
    for label in s.labels() {
        writeln!(out, "    \"{label}\";").expect("writing to a string");
    }
    let edges: Vec<_> = if report.is_lattice() {
        s.hasse_edges().into_iter().collect()
    } else {
        s.can_flow()
            .iter()
            .filter(|(a, b)| a != b)
            .cloned()
            .collect()
    };
    for (a, b) in edges {
        writeln!(out, "    \"{a}\" -> \"{b}\";").expect("writing to a string");
    }
    out.push_str("}\n");
    out
}
