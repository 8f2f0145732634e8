//! Translation between flow relations and security lattices.
//!
//! `to_lattice` builds labels from the strongly connected components of the
//! flow digraph (every loop through a transitively closed relation lives
//! inside one component, so the components *are* the maximal loop-closed
//! variable sets), orders them by subset product tests, and completes missing
//! joins with fresh `_j<n>` labels. `to_flow_rel` reads a lattice back as a
//! relation; `is_equivalent` checks the two views agree over a variable
//! domain. Every step is recorded in a [`TranslationTrace`] that can be
//! replayed deterministically.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::flow::{FlowRelation, VarDomain, Variable};
use crate::lattice::{
    close_label_pairs, find_isomorphism, minimal_upper_bounds, validate_poset, Label,
    SecurityLattice,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("lattice completion exceeded its budget of {budget} fresh labels")]
    CompletionBudgetExceeded { budget: usize },
    #[error("instance has {vars} variables, oracle limit is {max}")]
    InstanceTooLarge { vars: usize, max: usize },
}

/// Everything `to_lattice` did, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationTrace {
    /// One label per strongly connected component, plus source singletons.
    pub loop_labels: BTreeSet<Label>,
    /// Labels dropped by subsumption. Always empty here: component
    /// condensation never generates a subsumed candidate in the first place
    /// (naive generation plus literal pruning live in the test oracle).
    pub pruned_labels: BTreeSet<Label>,
    /// Labels and order before join completion.
    pub pre_completion: (BTreeSet<Label>, BTreeSet<(Label, Label)>),
    /// Fresh labels in insertion order, each with the pair it resolved.
    pub fresh_added: Vec<(Label, (Label, Label))>,
}

/// Output of join completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub labels: BTreeSet<Label>,
    pub can_flow: BTreeSet<(Label, Label)>,
    pub fresh_added: Vec<(Label, (Label, Label))>,
}

/// Why a lattice and a flow relation disagree, if they do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    /// A relation pair not derivable from the lattice.
    pub missing_flow: Option<(Variable, Variable)>,
    /// A derivable pair absent from the relation.
    pub extra_flow: Option<(Variable, Variable)>,
    /// The order pair whose variable products escape the relation.
    pub bad_order_pair: Option<(Label, Label)>,
}

// ===== Loop labels =====

/// One variable-set label per strongly connected component of
/// `(vars(M), M.pairs)`.
///
/// In a closed relation every subset of a component is loop-closed and the
/// components are exactly the maximal such sets; sources (which never have
/// self-flows) still land in singleton components, which doubles as giving
/// every source variable its own label.
pub fn maximal_loop_labels(m: &FlowRelation) -> BTreeSet<Label> {
    let vars: Vec<Variable> = m.domain().vars().into_iter().collect();
    let index: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); vars.len()];
    for (a, b) in m.pairs() {
        if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
            adj[i].push(j);
        }
    }

    struct Tarjan<'g> {
        adj: &'g [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comps: Vec<Vec<usize>>,
    }

    impl Tarjan<'_> {
        fn connect(&mut self, v: usize) {
            self.index[v] = Some(self.next);
            self.low[v] = self.next;
            self.next += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for i in 0..self.adj[v].len() {
                let w = self.adj[v][i];
                if self.index[w].is_none() {
                    self.connect(w);
                    self.low[v] = self.low[v].min(self.low[w]);
                } else if self.on_stack[w] {
                    self.low[v] = self.low[v].min(self.index[w].unwrap());
                }
            }
            if self.low[v] == self.index[v].unwrap() {
                let mut comp = Vec::new();
                loop {
                    let w = self.stack.pop().unwrap();
                    self.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                self.comps.push(comp);
            }
        }
    }

    let mut t = Tarjan {
        adj: &adj,
        index: vec![None; vars.len()],
        low: vec![0; vars.len()],
        on_stack: vec![false; vars.len()],
        stack: Vec::new(),
        next: 0,
        comps: Vec::new(),
    };
    for v in 0..vars.len() {
        if t.index[v].is_none() {
            t.connect(v);
        }
    }

    t.comps
        .iter()
        .map(|comp| Label::Vars(comp.iter().map(|&i| vars[i].clone()).collect()))
        .collect()
}

// ===== Ordering =====

/// Order the labels by can-flow: `(L1, L2)` for variable-set labels iff
/// `L1 × L2 ⊆ M.pairs`, plus sentinel, reflexive, and baseline pairs.
///
/// With labels from [`maximal_loop_labels`] the result is already a
/// transitively closed bounded partial order.
pub fn can_flow_order(
    labels: &BTreeSet<Label>,
    m: &FlowRelation,
) -> (BTreeSet<Label>, BTreeSet<(Label, Label)>) {
    let mut all: BTreeSet<Label> = labels.clone();
    all.insert(Label::Bottom);
    all.insert(Label::Top);

    let mut order = BTreeSet::from([
        (Label::Bottom, Label::Top),
        (Label::Bottom, Label::Bottom),
        (Label::Top, Label::Top),
    ]);
    for l in labels {
        order.insert((Label::Bottom, l.clone()));
        order.insert((l.clone(), Label::Top));
        order.insert((l.clone(), l.clone()));
    }
    for l1 in labels {
        for l2 in labels {
            let (Some(v1), Some(v2)) = (l1.vars(), l2.vars()) else {
                continue;
            };
            let subset = v1.iter().all(|a| {
                v2.iter()
                    .all(|b| m.pairs().contains(&(a.clone(), b.clone())))
            });
            if subset {
                order.insert((l1.clone(), l2.clone()));
            }
        }
    }
    (all, order)
}

// ===== Join completion =====

fn normalize(l1: &Label, l2: &Label) -> (Label, Label) {
    if l1 <= l2 {
        (l1.clone(), l2.clone())
    } else {
        (l2.clone(), l1.clone())
    }
}

/// Insert one fresh label above `l1`, `l2` (and, by closure, everything
/// below them) and below all their common upper bounds.
fn insert_fresh(
    labels: &mut BTreeSet<Label>,
    order: &mut BTreeSet<(Label, Label)>,
    fresh: Label,
    l1: &Label,
    l2: &Label,
) {
    order.insert((Label::Bottom, fresh.clone()));
    order.insert((fresh.clone(), Label::Top));
    order.insert((fresh.clone(), fresh.clone()));
    order.insert((l1.clone(), fresh.clone()));
    order.insert((l2.clone(), fresh.clone()));
    for l in labels.iter() {
        if order.contains(&(l1.clone(), l.clone())) && order.contains(&(l2.clone(), l.clone())) {
            order.insert((fresh.clone(), l.clone()));
        }
    }
    labels.insert(fresh);
    *order = close_label_pairs(order);
}

/// Complete a bounded partial order to a lattice by inserting fresh labels
/// for pairs lacking a unique least upper bound.
///
/// Processes all label pairs in lexicographic order of canonically sorted
/// contents (queueing `(fresh, L)` pairs as fresh labels appear), then
/// re-validates and repeats while not yet a lattice: a fresh label can make a
/// previously processed pair ambiguous again, so a single pass is not always
/// enough. Total fresh insertions are capped at `|labels|²`.
pub fn add_least_upper_labels(
    labels: &BTreeSet<Label>,
    can_flow: &BTreeSet<(Label, Label)>,
) -> Result<Completion, TranslateError> {
    let budget = labels.len() * labels.len();
    let initial: Vec<(Label, Label)> = pair_queue(labels);
    complete(labels, can_flow, &initial, budget)
}

/// Unordered label pairs in canonical order.
fn pair_queue(labels: &BTreeSet<Label>) -> Vec<(Label, Label)> {
    let list: Vec<&Label> = labels.iter().collect();
    let mut out = Vec::new();
    for (i, l1) in list.iter().enumerate() {
        for l2 in &list[i..] {
            out.push(((*l1).clone(), (*l2).clone()));
        }
    }
    out
}

pub(crate) fn complete(
    labels: &BTreeSet<Label>,
    can_flow: &BTreeSet<(Label, Label)>,
    initial_pairs: &[(Label, Label)],
    budget: usize,
) -> Result<Completion, TranslateError> {
    let mut labels = labels.clone();
    let mut order = can_flow.clone();
    let mut fresh_added: Vec<(Label, (Label, Label))> = Vec::new();
    // Never collide with fresh labels already present in the input.
    let mut counter = labels
        .iter()
        .filter_map(Label::fresh_id)
        .max()
        .map_or(0, |m| m + 1);

    let mut first_pass = true;
    loop {
        let mut queue: VecDeque<(Label, Label)> = if first_pass {
            initial_pairs.iter().cloned().collect()
        } else {
            pair_queue(&labels).into_iter().collect()
        };
        first_pass = false;
        let mut inserted = false;
        while let Some((l1, l2)) = queue.pop_front() {
            let mins = minimal_upper_bounds(&labels, &order, &l1, &l2);
            if mins.len() == 1 {
                continue;
            }
            if fresh_added.len() == budget {
                return Err(TranslateError::CompletionBudgetExceeded { budget });
            }
            let fresh = Label::fresh(counter);
            counter += 1;
            for l in labels.iter() {
                queue.push_back(normalize(&fresh, l));
            }
            insert_fresh(&mut labels, &mut order, fresh.clone(), &l1, &l2);
            fresh_added.push((fresh, (l1, l2)));
            inserted = true;
        }
        if validate_poset(&labels, &order).is_lattice() {
            break;
        }
        if !inserted {
            // No pair lacked a join yet validation failed: the input was not
            // a bounded partial order. Return it unchanged-in-spirit; the
            // caller sees the validation failure.
            break;
        }
    }

    Ok(Completion {
        labels,
        can_flow: order,
        fresh_added,
    })
}

// ===== Full translations =====

/// Translate a flow relation to an equivalent security lattice.
pub fn to_lattice(m: &FlowRelation) -> Result<(SecurityLattice, TranslationTrace), TranslateError> {
    let loop_labels = maximal_loop_labels(m);
    let (labels, order) = can_flow_order(&loop_labels, m);
    let pre_completion = (labels.clone(), order.clone());

    let (final_labels, final_order, fresh_added) = if validate_poset(&labels, &order).is_lattice() {
        (labels, order, Vec::new())
    } else {
        let completion = add_least_upper_labels(&labels, &order)?;
        (
            completion.labels,
            completion.can_flow,
            completion.fresh_added,
        )
    };

    let trace = TranslationTrace {
        loop_labels,
        pruned_labels: BTreeSet::new(),
        pre_completion,
        fresh_added,
    };
    Ok((
        SecurityLattice::from_parts(final_labels, final_order),
        trace,
    ))
}

/// Read a lattice back as a flow relation over `(zs \ vs, vs)`:
/// `{(z, z') | (L, L') ∈ canFlow, z ∈ L ∩ zs, z' ∈ L' ∩ vs}`.
///
/// Sentinels and fresh labels carry no variables and contribute nothing.
/// `vs ⊆ zs` is expected; the result is returned unvalidated (a lattice
/// whose labels miss some target variable yields a relation without that
/// reflexive pair).
pub fn to_flow_rel(
    s: &SecurityLattice,
    zs: &BTreeSet<Variable>,
    vs: &BTreeSet<Variable>,
) -> FlowRelation {
    debug_assert!(vs.is_subset(zs));
    let mut pairs = BTreeSet::new();
    for (l1, l2) in s.can_flow() {
        let from = l1.vars_within(zs);
        if from.is_empty() {
            continue;
        }
        let to = l2.vars_within(vs);
        for z in &from {
            for v in &to {
                pairs.insert((z.clone(), v.clone()));
            }
        }
    }
    let sources: BTreeSet<Variable> = zs.difference(vs).cloned().collect();
    let domain =
        VarDomain::new(sources, vs.iter().cloned()).expect("difference and subset are disjoint");
    FlowRelation::from_parts(domain, pairs)
}

/// Check lattice/relation equivalence over `(zs, vs)`: soundness (every
/// can-flow pair's variable product lies inside the relation) and
/// completeness (reading the lattice back yields exactly the relation).
pub fn is_equivalent(
    s: &SecurityLattice,
    m: &FlowRelation,
    zs: &BTreeSet<Variable>,
    vs: &BTreeSet<Variable>,
) -> EquivalenceVerdict {
    let mut bad_order_pair = None;
    let mut extra_flow = None;
    'outer: for (l1, l2) in s.can_flow() {
        let from = l1.vars_within(zs);
        let to = l2.vars_within(vs);
        if from.is_empty() || to.is_empty() {
            continue;
        }
        for z in &from {
            for v in &to {
                if !m.pairs().contains(&(z.clone(), v.clone())) {
                    bad_order_pair = Some((l1.clone(), l2.clone()));
                    extra_flow = Some((z.clone(), v.clone()));
                    break 'outer;
                }
            }
        }
    }

    let derived = to_flow_rel(s, zs, vs);
    if extra_flow.is_none() {
        extra_flow = derived.pairs().difference(m.pairs()).next().cloned();
    }
    let missing_flow = m.pairs().difference(derived.pairs()).next().cloned();

    EquivalenceVerdict {
        equivalent: bad_order_pair.is_none() && extra_flow.is_none() && missing_flow.is_none(),
        missing_flow,
        extra_flow,
        bad_order_pair,
    }
}

/// Re-run the recorded steps: loop labels, ordering, then the logged fresh
/// insertions. Produces the same lattice as the original translation.
pub fn replay_trace(m: &FlowRelation, trace: &TranslationTrace) -> SecurityLattice {
    let (mut labels, mut order) = can_flow_order(&trace.loop_labels, m);
    for (fresh, (l1, l2)) in &trace.fresh_added {
        insert_fresh(&mut labels, &mut order, fresh.clone(), l1, l2);
    }
    SecurityLattice::from_parts(labels, order)
}

/// Equality up to renaming of fresh labels: a kind-preserving order
/// isomorphism that fixes every non-fresh label.
pub fn fresh_renaming_equivalent(a: &SecurityLattice, b: &SecurityLattice) -> bool {
    find_isomorphism(a, b, |l| if l.is_fresh() { None } else { Some(l.clone()) })
}
