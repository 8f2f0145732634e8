//! Example documents compiled into the library.
//!
//! The automotive bus system appears three ways: its system-level no-flow
//! interface, a decomposition into sending, bus, and receiving parts with
//! the extra assumptions that make the split sound, and the implementation
//! whose flows force one fresh join label. The three small lattices are the
//! classic confidentiality chain, integrity chain, and their combination.
//! Two stress entries exercise flow cycles and a non-lattice order.

use std::collections::BTreeMap;

use super::{parse_spec, SpecDocument};

/// A named corpus file in canonical text form.
#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
}

/// The shipped sources, in name order.
pub fn corpus_sources() -> &'static [CorpusEntry] {
    &[
        CorpusEntry {
            name: "bus_decomposed",
            source: include_str!("../../corpus/bus_decomposed.ifs"),
        },
        CorpusEntry {
            name: "bus_i3",
            source: include_str!("../../corpus/bus_i3.ifs"),
        },
        CorpusEntry {
            name: "bus_system",
            source: include_str!("../../corpus/bus_system.ifs"),
        },
        CorpusEntry {
            name: "fig3_conf",
            source: include_str!("../../corpus/fig3_conf.ifs"),
        },
        CorpusEntry {
            name: "fig3_int",
            source: include_str!("../../corpus/fig3_int.ifs"),
        },
        CorpusEntry {
            name: "fig3_product",
            source: include_str!("../../corpus/fig3_product.ifs"),
        },
        CorpusEntry {
            name: "stress_cycles",
            source: include_str!("../../corpus/stress_cycles.ifs"),
        },
        CorpusEntry {
            name: "stress_incomplete_poset",
            source: include_str!("../../corpus/stress_incomplete_poset.ifs"),
        },
    ]
}

/// All corpus documents, parsed.
pub fn corpus() -> BTreeMap<&'static str, SpecDocument> {
    corpus_sources()
        .iter()
        .map(|e| {
            let doc = parse_spec(e.source)
                .unwrap_or_else(|err| panic!("corpus entry {} must parse: {err}", e.name));
            (e.name, doc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses() {
        assert_eq!(corpus().len(), corpus_sources().len());
    }

    #[test]
    fn bus_implementation_satisfies_the_system_guarantees() {
        let corpus = corpus();
        let i3 = &corpus["bus_i3"].flows("I3").unwrap().relation;
        let bus = &corpus["bus_system"].interface("Bus").unwrap().interface;
        let violated = i3.check_no_flows(bus.guarantee_no_flows()).unwrap();
        assert!(violated.is_empty());
    }

    #[test]
    fn decomposed_bus_assumes_no_sensor_leaks_into_warner_inputs() {
        let corpus = corpus();
        let bus = &corpus["bus_decomposed"].interface("Bus").unwrap().interface;
        let assumptions = bus.assumption_no_flows();
        assert_eq!(assumptions.len(), 4);
        for source in ["wheel_s_bus", "odo_t_bus"] {
            for target in ["distw_f_s_bus", "distw_b_s_bus"] {
                let pair = (
                    crate::flow::Variable::new(source).unwrap(),
                    crate::flow::Variable::new(target).unwrap(),
                );
                assert!(assumptions.contains(&pair), "missing {source} -> {target}");
            }
        }
    }

    #[test]
    fn product_corpus_lattice_is_the_diamond() {
        let corpus = corpus();
        let product = &corpus["fig3_product"].lattice("ConfInt").unwrap().lattice;
        assert_eq!(product.labels().len(), 6);
        assert!(product.validate().is_lattice());
    }
}
