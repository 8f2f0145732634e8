//! Brute-force reference construction used to cross-check `to_lattice`.
//!
//! Everything here is deliberately naive and shares no code path with the
//! production translation: loop labels come from enumerating every cyclic
//! variable sequence and discarding subsumed sets (not from a component
//! search), closure is a plain fixpoint (not an indexed sweep), and join
//! completion rescans all pairs from the start after every insertion (not a
//! work queue). Agreement between the two paths is checked up to renaming of
//! fresh labels.

use std::collections::BTreeSet;

use crate::flow::{FlowRelation, Variable};
use crate::lattice::{validate_poset, Label, SecurityLattice};
use crate::translate::TranslateError;

/// Cycle enumeration is factorial in the variable count; past this size the
/// oracle refuses rather than hangs.
pub const MAX_ORACLE_VARS: usize = 8;

/// Build the lattice for `m` the slow, obvious way.
pub fn brute_force_lattice(m: &FlowRelation) -> Result<SecurityLattice, TranslateError> {
    let vars: Vec<Variable> = m.domain().vars().into_iter().collect();
    if vars.len() > MAX_ORACLE_VARS {
        return Err(TranslateError::InstanceTooLarge {
            vars: vars.len(),
            max: MAX_ORACLE_VARS,
        });
    }

    // Every set of variables reachable around a cycle is a loop candidate.
    let mut candidates: BTreeSet<BTreeSet<Variable>> = BTreeSet::new();
    for start in &vars {
        let mut seq = vec![start.clone()];
        enumerate_cycles(m, &mut seq, &mut candidates);
    }
    // Keep only the maximal candidates.
    let maximal: BTreeSet<BTreeSet<Variable>> = candidates
        .iter()
        .filter(|s| {
            !candidates
                .iter()
                .any(|t| t.len() > s.len() && s.is_subset(t))
        })
        .cloned()
        .collect();
    // Variables on no cycle (sources, in a closed relation) still need a
    // label of their own.
    let mut label_sets = maximal;
    for v in &vars {
        if !label_sets.iter().any(|s| s.contains(v)) {
            label_sets.insert(BTreeSet::from([v.clone()]));
        }
    }

    let mut labels: BTreeSet<Label> = label_sets.iter().map(|s| Label::Vars(s.clone())).collect();
    labels.insert(Label::Bottom);
    labels.insert(Label::Top);

    // Order by exhaustively testing every variable pair in the product.
    let mut order: BTreeSet<(Label, Label)> = BTreeSet::new();
    for l in &labels {
        order.insert((Label::Bottom, l.clone()));
        order.insert((l.clone(), Label::Top));
        order.insert((l.clone(), l.clone()));
    }
    for s1 in &label_sets {
        for s2 in &label_sets {
            let mut all_flow = true;
            for a in s1 {
                for b in s2 {
                    if !m.pairs().contains(&(a.clone(), b.clone())) {
                        all_flow = false;
                    }
                }
            }
            if all_flow {
                order.insert((Label::Vars(s1.clone()), Label::Vars(s2.clone())));
            }
        }
    }

    // Complete: rescan from the top after every insertion, so scheduling
    // differs from the queue-driven production version.
    let budget = labels.len() * labels.len();
    let mut fresh = 0u64;
    while !validate_poset(&labels, &order).is_lattice() {
        let Some((l1, l2)) = first_pair_without_join(&labels, &order) else {
            break;
        };
        if fresh as usize == budget {
            return Err(TranslateError::CompletionBudgetExceeded { budget });
        }
        let new = Label::fresh(fresh);
        fresh += 1;
        let mut added: BTreeSet<(Label, Label)> = BTreeSet::from([
            (Label::Bottom, new.clone()),
            (new.clone(), Label::Top),
            (new.clone(), new.clone()),
            (l1.clone(), new.clone()),
            (l2.clone(), new.clone()),
        ]);
        for u in &labels {
            if order.contains(&(l1.clone(), u.clone())) && order.contains(&(l2.clone(), u.clone()))
            {
                added.insert((new.clone(), u.clone()));
            }
        }
        order.extend(added);
        labels.insert(new);
        order = fixpoint_closure(&order);
    }

    Ok(SecurityLattice::from_parts(labels, order))
}

/// Extend `seq` by unused successors; whenever the last element flows back
/// to the first, record the visited set.
fn enumerate_cycles(
    m: &FlowRelation,
    seq: &mut Vec<Variable>,
    out: &mut BTreeSet<BTreeSet<Variable>>,
) {
    let last = seq.last().expect("sequence starts non-empty").clone();
    let first = seq[0].clone();
    if m.pairs().contains(&(last.clone(), first)) {
        out.insert(seq.iter().cloned().collect());
    }
    for v in m.domain().vars() {
        if seq.contains(&v) {
            continue;
        }
        if m.pairs().contains(&(last.clone(), v.clone())) {
            seq.push(v);
            enumerate_cycles(m, seq, out);
            seq.pop();
        }
    }
}

fn upper_bounds(
    labels: &BTreeSet<Label>,
    order: &BTreeSet<(Label, Label)>,
    l1: &Label,
    l2: &Label,
) -> Vec<Label> {
    labels
        .iter()
        .filter(|u| {
            order.contains(&(l1.clone(), (*u).clone()))
                && order.contains(&(l2.clone(), (*u).clone()))
        })
        .cloned()
        .collect()
}

/// First pair (in canonical order) whose common upper bounds have more than
/// one minimal element, i.e. no least upper bound.
fn first_pair_without_join(
    labels: &BTreeSet<Label>,
    order: &BTreeSet<(Label, Label)>,
) -> Option<(Label, Label)> {
    let list: Vec<&Label> = labels.iter().collect();
    for (i, l1) in list.iter().enumerate() {
        for l2 in &list[i..] {
            let ubs = upper_bounds(labels, order, l1, l2);
            let minimal: Vec<&Label> = ubs
                .iter()
                .filter(|u| {
                    !ubs.iter()
                        .any(|w| w != *u && order.contains(&(w.clone(), (*u).clone())))
                })
                .collect();
            if minimal.len() != 1 {
                return Some(((*l1).clone(), (*l2).clone()));
            }
        }
    }
    None
}

/// Transitive closure by iterating to a fixpoint.
fn fixpoint_closure(order: &BTreeSet<(Label, Label)>) -> BTreeSet<(Label, Label)> {
    let mut closed = order.clone();
    loop {
        let mut next = closed.clone();
        for (a, b) in &closed {
            for (c, d) in &closed {
                if b == c {
                    next.insert((a.clone(), d.clone()));
                }
            }
        }
        if next == closed {
            return closed;
        }
        closed = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{BuildMode, VarDomain};
    use crate::translate::{fresh_renaming_equivalent, to_lattice};

    fn var(name: &str) -> Variable {
        Variable::new(name).unwrap()
    }

    fn relation(sources: &[&str], targets: &[&str], pairs: &[(&str, &str)]) -> FlowRelation {
        let domain = VarDomain::new(
            sources.iter().map(|s| var(s)),
            targets.iter().map(|t| var(t)),
        )
        .unwrap();
        FlowRelation::new(
            domain,
            pairs.iter().map(|(a, b)| (var(a), var(b))),
            BuildMode::Close,
        )
        .unwrap()
    }

    #[test]
    fn oracle_builds_the_merged_loop_chain() {
        let m = relation(&[], &["a", "b", "c"], &[("a", "b"), ("b", "a"), ("b", "c")]);
        let oracle = brute_force_lattice(&m).unwrap();
        let ab = Label::var_set([var("a"), var("b")]).unwrap();
        let c = Label::singleton(var("c"));
        assert_eq!(
            oracle.labels(),
            &BTreeSet::from([Label::Bottom, ab.clone(), c.clone(), Label::Top])
        );
        assert!(oracle.can_flow().contains(&(ab, c)));
        assert!(oracle.validate().is_lattice());
    }

    #[test]
    fn oracle_matches_translation_on_the_bus_relation() {
        let m = relation(
            &["wheel_s", "distw_f_s", "distw_b_s"],
            &["odo_t", "distw_f_t", "distw_b_t"],
            &[
                ("wheel_s", "odo_t"),
                ("distw_f_s", "distw_f_t"),
                ("distw_f_s", "distw_b_t"),
                ("distw_b_s", "distw_f_t"),
                ("distw_b_s", "distw_b_t"),
            ],
        );
        let oracle = brute_force_lattice(&m).unwrap();
        assert_eq!(oracle.labels().len(), 9);
        let (lattice, _) = to_lattice(&m).unwrap();
        assert!(fresh_renaming_equivalent(&oracle, &lattice));
    }

    #[test]
    fn oracle_on_empty_relation_is_two_point() {
        let m = relation(&[], &[], &[]);
        let oracle = brute_force_lattice(&m).unwrap();
        assert_eq!(
            oracle.labels(),
            &BTreeSet::from([Label::Bottom, Label::Top])
        );
    }

    #[test]
    fn oracle_rejects_oversized_instances() {
        let names: Vec<String> = (0..9).map(|i| format!("v{i}")).collect();
        let targets: Vec<&str> = names.iter().map(String::as_str).collect();
        let m = relation(&[], &targets, &[]);
        assert_eq!(
            brute_force_lattice(&m).unwrap_err(),
            TranslateError::InstanceTooLarge { vars: 9, max: 8 }
        );
    }
}
