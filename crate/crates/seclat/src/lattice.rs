//! Security labels and bounded label orders.
//!
//! A [`SecurityLattice`] is a finite set of [`Label`]s with a can-flow order,
//! stored transitively closed. The type itself is a *candidate* lattice:
//! [`validate_poset`] checks the axioms one by one —
//!
//! | axiom | check |
//! |-------|-------|
//! | Finiteness | trivially true for in-memory sets, still reported |
//! | Order | reflexive, transitive, antisymmetric |
//! | Public Label | a unique lower bound (`Bottom`) |
//! | Unique Top | a unique upper bound (`Top`) |
//! | Totally of Label Combining | every label pair has a unique least upper bound |
//!
//! — and returns the failures as data. `join` is defined on any candidate
//! (returning the antichain of minimal upper bounds when no least one
//! exists), which is exactly what lattice completion needs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::flow::Variable;

/// A security label.
///
/// Variant order is the canonical label order used everywhere output must be
/// deterministic: `Bottom`, then variable sets lexicographically, then fresh
/// labels by id, then `Top`. Fresh labels carry exactly the synthetic name
/// `_j<id>` and no user variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Bottom,
    Vars(BTreeSet<Variable>),
    Fresh(u64),
    Top,
}

impl Label {
    /// A non-empty variable-set label.
    pub fn var_set(vars: impl IntoIterator<Item = Variable>) -> Result<Self, LatticeError> {
        let set: BTreeSet<_> = vars.into_iter().collect();
        if set.is_empty() {
            return Err(LatticeError::EmptyVarSet);
        }
        Ok(Label::Vars(set))
    }

    pub fn singleton(v: Variable) -> Self {
        Label::Vars(BTreeSet::from([v]))
    }

    pub fn fresh(id: u64) -> Self {
        Label::Fresh(id)
    }

    /// The user variables carried by the label (`None` for sentinels and
    /// fresh labels).
    pub fn vars(&self) -> Option<&BTreeSet<Variable>> {
        match self {
            Label::Vars(set) => Some(set),
            _ => None,
        }
    }

    pub fn fresh_id(&self) -> Option<u64> {
        match self {
            Label::Fresh(id) => Some(*id),
            _ => None,
        }
    }

    pub fn is_sentinel(&self) -> bool {
        matches!(self, Label::Top | Label::Bottom)
    }

    pub fn is_fresh(&self) -> bool {
        matches!(self, Label::Fresh(_))
    }

    /// `L ∩ zs`, empty for sentinels and fresh labels.
    pub fn vars_within(&self, zs: &BTreeSet<Variable>) -> BTreeSet<Variable> {
        match self {
            Label::Vars(set) => set.intersection(zs).cloned().collect(),
            _ => BTreeSet::new(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Bottom => f.write_str("BOT"),
            Label::Top => f.write_str("TOP"),
            Label::Fresh(id) => write!(f, "_j{id}"),
            Label::Vars(set) => {
                f.write_str("{")?;
                for (i, v) in set.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("variable-set labels must be non-empty")]
    EmptyVarSet,
    #[error("label {label} is not in the lattice")]
    UnknownLabel { label: Label },
    #[error("operation requires a lattice; validation failed on axiom {axiom}")]
    NotALattice { axiom: Axiom },
    #[error("product operands must use only variable-set labels, found {label}")]
    ProductNonVarSetLabel { label: Label },
    #[error("product operands must use disjoint variable namespaces, {name} appears in both")]
    ProductSharedVariable { name: Variable },
}

/// Result of a join: the least upper bound, or the antichain of minimal
/// upper bounds when no unique one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JoinOutcome {
    Join(Label),
    NoJoin { minimal_upper_bounds: Vec<Label> },
}

// ===== Axiom reporting =====

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    Finiteness,
    Order,
    PublicLabel,
    UniqueTop,
    TotalLabelCombining,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Finiteness => "Finiteness",
            Axiom::Order => "Order",
            Axiom::PublicLabel => "Public Label",
            Axiom::UniqueTop => "Unique Top",
            Axiom::TotalLabelCombining => "Totally of Label Combining",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    UnknownLabelInOrder {
        pair: (Label, Label),
    },
    NotReflexive {
        label: Label,
    },
    NotTransitive {
        pair: (Label, Label),
    },
    NotAntisymmetric {
        pair: (Label, Label),
    },
    MissingBottom,
    NotAboveBottom {
        label: Label,
    },
    MissingTop,
    NotBelowTop {
        label: Label,
    },
    NoUniqueJoin {
        pair: (Label, Label),
        minimal_upper_bounds: Vec<Label>,
    },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::UnknownLabelInOrder { pair } => {
                write!(
                    f,
                    "order mentions undeclared labels ({}, {})",
                    pair.0, pair.1
                )
            }
            AxiomViolation::NotReflexive { label } => write!(f, "missing ({label}, {label})"),
            AxiomViolation::NotTransitive { pair } => {
                write!(f, "missing implied pair ({}, {})", pair.0, pair.1)
            }
            AxiomViolation::NotAntisymmetric { pair } => {
                write!(f, "({}, {}) and its reverse both present", pair.0, pair.1)
            }
            AxiomViolation::MissingBottom => f.write_str("no Bottom label"),
            AxiomViolation::NotAboveBottom { label } => {
                write!(f, "{label} is not above Bottom")
            }
            AxiomViolation::MissingTop => f.write_str("no Top label"),
            AxiomViolation::NotBelowTop { label } => write!(f, "{label} is not below Top"),
            AxiomViolation::NoUniqueJoin {
                pair,
                minimal_upper_bounds,
            } => {
                write!(f, "({}, {}) has minimal upper bounds", pair.0, pair.1)?;
                for l in minimal_upper_bounds {
                    write!(f, " {l}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub failures: Vec<AxiomViolation>,
}

/// Axiom-by-axiom validation outcome; a lattice is a report with no failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetReport {
    pub checks: Vec<AxiomCheck>,
}

impl PosetReport {
    pub fn is_lattice(&self) -> bool {
        self.checks.iter().all(|c| c.failures.is_empty())
    }

    pub fn failures(&self) -> impl Iterator<Item = (Axiom, &AxiomViolation)> {
        self.checks
            .iter()
            .flat_map(|c| c.failures.iter().map(move |v| (c.axiom, v)))
    }

    /// The first failed axiom, if any.
    pub fn first_failed_axiom(&self) -> Option<Axiom> {
        self.checks
            .iter()
            .find(|c| !c.failures.is_empty())
            .map(|c| c.axiom)
    }
}

/// Minimal elements of the common-upper-bound set of `l1` and `l2`.
pub(crate) fn minimal_upper_bounds(
    labels: &BTreeSet<Label>,
    order: &BTreeSet<(Label, Label)>,
    l1: &Label,
    l2: &Label,
) -> Vec<Label> {
    let ubs: Vec<&Label> = labels
        .iter()
        .filter(|l| {
            order.contains(&(l1.clone(), (*l).clone()))
                && order.contains(&(l2.clone(), (*l).clone()))
        })
        .collect();
    ubs.iter()
        .filter(|u| {
            !ubs.iter()
                .any(|o| *o != **u && order.contains(&((*o).clone(), (**u).clone())))
        })
        .map(|u| (*u).clone())
        .collect()
}

/// Check Denning's axioms, in order, over raw label and order sets.
pub fn validate_poset(labels: &BTreeSet<Label>, order: &BTreeSet<(Label, Label)>) -> PosetReport {
    let mut checks = Vec::new();

    checks.push(AxiomCheck {
        axiom: Axiom::Finiteness,
        failures: Vec::new(),
    });

    let mut order_failures = Vec::new();
    for (a, b) in order {
        if !labels.contains(a) || !labels.contains(b) {
            order_failures.push(AxiomViolation::UnknownLabelInOrder {
                pair: (a.clone(), b.clone()),
            });
        }
    }
    for l in labels {
        if !order.contains(&(l.clone(), l.clone())) {
            order_failures.push(AxiomViolation::NotReflexive { label: l.clone() });
        }
    }
    let mut missing = BTreeSet::new();
    for (a, b) in order {
        for (c, d) in order {
            if c == b && !order.contains(&(a.clone(), d.clone())) {
                missing.insert((a.clone(), d.clone()));
            }
        }
    }
    for pair in missing {
        order_failures.push(AxiomViolation::NotTransitive { pair });
    }
    for (a, b) in order {
        if a < b && order.contains(&(b.clone(), a.clone())) {
            order_failures.push(AxiomViolation::NotAntisymmetric {
                pair: (a.clone(), b.clone()),
            });
        }
    }
    let order_ok = order_failures.is_empty();
    checks.push(AxiomCheck {
        axiom: Axiom::Order,
        failures: order_failures,
    });

    let mut bottom_failures = Vec::new();
    if labels.contains(&Label::Bottom) {
        for l in labels {
            if !order.contains(&(Label::Bottom, l.clone())) {
                bottom_failures.push(AxiomViolation::NotAboveBottom { label: l.clone() });
            }
        }
    } else {
        bottom_failures.push(AxiomViolation::MissingBottom);
    }
    checks.push(AxiomCheck {
        axiom: Axiom::PublicLabel,
        failures: bottom_failures,
    });

    let mut top_failures = Vec::new();
    if labels.contains(&Label::Top) {
        for l in labels {
            if !order.contains(&(l.clone(), Label::Top)) {
                top_failures.push(AxiomViolation::NotBelowTop { label: l.clone() });
            }
        }
    } else {
        top_failures.push(AxiomViolation::MissingTop);
    }
    checks.push(AxiomCheck {
        axiom: Axiom::UniqueTop,
        failures: top_failures,
    });

    // Join uniqueness is only meaningful over a genuine partial order.
    let mut join_failures = Vec::new();
    if order_ok {
        let list: Vec<&Label> = labels.iter().collect();
        for (i, l1) in list.iter().enumerate() {
            for l2 in &list[i + 1..] {
                let mins = minimal_upper_bounds(labels, order, l1, l2);
                if mins.len() != 1 {
                    join_failures.push(AxiomViolation::NoUniqueJoin {
                        pair: ((*l1).clone(), (*l2).clone()),
                        minimal_upper_bounds: mins,
                    });
                }
            }
        }
    }
    checks.push(AxiomCheck {
        axiom: Axiom::TotalLabelCombining,
        failures: join_failures,
    });

    PosetReport { checks }
}

/// A finite bounded label order with the can-flow relation stored
/// transitively closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecurityLattice {
    labels: BTreeSet<Label>,
    can_flow: BTreeSet<(Label, Label)>,
}

impl SecurityLattice {
    /// Wrap parts without checking; pair with [`SecurityLattice::validate`].
    pub fn from_parts(labels: BTreeSet<Label>, can_flow: BTreeSet<(Label, Label)>) -> Self {
        SecurityLattice { labels, can_flow }
    }

    /// Build from non-sentinel labels and generator order pairs: sentinels,
    /// reflexivity, bound edges, and the transitive closure are added.
    pub fn from_generators(
        inner_labels: impl IntoIterator<Item = Label>,
        below: impl IntoIterator<Item = (Label, Label)>,
    ) -> Self {
        let mut labels: BTreeSet<Label> = inner_labels.into_iter().collect();
        labels.insert(Label::Bottom);
        labels.insert(Label::Top);
        let mut order: BTreeSet<(Label, Label)> = below.into_iter().collect();
        for l in &labels {
            order.insert((Label::Bottom, l.clone()));
            order.insert((l.clone(), Label::Top));
            order.insert((l.clone(), l.clone()));
        }
        let order = close_label_pairs(&order);
        SecurityLattice {
            labels,
            can_flow: order,
        }
    }

    pub fn labels(&self) -> &BTreeSet<Label> {
        &self.labels
    }

    pub fn can_flow(&self) -> &BTreeSet<(Label, Label)> {
        &self.can_flow
    }

    /// Labels other than the two sentinels.
    pub fn inner_labels(&self) -> impl Iterator<Item = &Label> {
        self.labels.iter().filter(|l| !l.is_sentinel())
    }

    fn require_label(&self, l: &Label) -> Result<(), LatticeError> {
        if self.labels.contains(l) {
            Ok(())
        } else {
            Err(LatticeError::UnknownLabel { label: l.clone() })
        }
    }

    pub fn leq(&self, l1: &Label, l2: &Label) -> Result<bool, LatticeError> {
        self.require_label(l1)?;
        self.require_label(l2)?;
        Ok(self.can_flow.contains(&(l1.clone(), l2.clone())))
    }

    pub fn join(&self, l1: &Label, l2: &Label) -> Result<JoinOutcome, LatticeError> {
        self.require_label(l1)?;
        self.require_label(l2)?;
        let mut mins = minimal_upper_bounds(&self.labels, &self.can_flow, l1, l2);
        if mins.len() == 1 {
            Ok(JoinOutcome::Join(mins.pop().unwrap()))
        } else {
            Ok(JoinOutcome::NoJoin {
                minimal_upper_bounds: mins,
            })
        }
    }

    /// Greatest lower bound, computed as the join of all common lower bounds.
    pub fn meet(&self, l1: &Label, l2: &Label) -> Result<Label, LatticeError> {
        self.require_label(l1)?;
        self.require_label(l2)?;
        let report = self.validate();
        if let Some(axiom) = report.first_failed_axiom() {
            return Err(LatticeError::NotALattice { axiom });
        }
        let mut acc = Label::Bottom;
        for l in &self.labels {
            if self.can_flow.contains(&(l.clone(), l1.clone()))
                && self.can_flow.contains(&(l.clone(), l2.clone()))
            {
                match self.join(&acc, l)? {
                    JoinOutcome::Join(j) => acc = j,
                    // Unreachable: validation above guaranteed unique joins.
                    JoinOutcome::NoJoin { .. } => {
                        return Err(LatticeError::NotALattice {
                            axiom: Axiom::TotalLabelCombining,
                        })
                    }
                }
            }
        }
        Ok(acc)
    }

    pub fn validate(&self) -> PosetReport {
        validate_poset(&self.labels, &self.can_flow)
    }

    /// The covering relation: `can_flow` minus reflexive pairs minus pairs
    /// implied by transitivity.
    pub fn hasse_edges(&self) -> BTreeSet<(Label, Label)> {
        let mut out = BTreeSet::new();
        for (a, b) in &self.can_flow {
            if a == b {
                continue;
            }
            let skippable = self.labels.iter().any(|c| {
                c != a
                    && c != b
                    && self.can_flow.contains(&(a.clone(), c.clone()))
                    && self.can_flow.contains(&(c.clone(), b.clone()))
            });
            if !skippable {
                out.insert((a.clone(), b.clone()));
            }
        }
        out
    }

    /// Componentwise product over the operands' non-sentinel labels.
    ///
    /// A pair of labels is encoded as the union of their variable sets, so
    /// both operands must use only variable-set labels and must not share
    /// variable names. The product gets its own sentinels; pairs involving
    /// operand sentinels are not materialized.
    pub fn product(&self, other: &SecurityLattice) -> Result<SecurityLattice, LatticeError> {
        for s in [self, other] {
            let report = s.validate();
            if let Some(axiom) = report.first_failed_axiom() {
                return Err(LatticeError::NotALattice { axiom });
            }
            for l in s.inner_labels() {
                if l.vars().is_none() {
                    return Err(LatticeError::ProductNonVarSetLabel { label: l.clone() });
                }
            }
        }
        let left_vars: BTreeSet<&Variable> = self
            .inner_labels()
            .flat_map(|l| l.vars().unwrap())
            .collect();
        for l in other.inner_labels() {
            for v in l.vars().unwrap() {
                if left_vars.contains(v) {
                    return Err(LatticeError::ProductSharedVariable { name: v.clone() });
                }
            }
        }

        let pair_label = |a: &Label, b: &Label| -> Label {
            let vars = a
                .vars()
                .unwrap()
                .iter()
                .chain(b.vars().unwrap())
                .cloned()
                .collect::<BTreeSet<_>>();
            Label::Vars(vars)
        };
        let mut labels = BTreeSet::new();
        let mut below = BTreeSet::new();
        for a in self.inner_labels() {
            for b in other.inner_labels() {
                labels.insert(pair_label(a, b));
            }
        }
        for a1 in self.inner_labels() {
            for b1 in other.inner_labels() {
                for a2 in self.inner_labels() {
                    for b2 in other.inner_labels() {
                        if self.can_flow.contains(&(a1.clone(), a2.clone()))
                            && other.can_flow.contains(&(b1.clone(), b2.clone()))
                        {
                            below.insert((pair_label(a1, b1), pair_label(a2, b2)));
                        }
                    }
                }
            }
        }
        Ok(SecurityLattice::from_generators(labels, below))
    }

    /// Whether an order isomorphism mapping sentinels to sentinels exists.
    pub fn order_isomorphic(&self, other: &SecurityLattice) -> bool {
        find_isomorphism(self, other, |l| {
            if l.is_sentinel() {
                Some(l.clone())
            } else {
                None
            }
        })
    }
}

/// Transitive closure over label pairs.
pub(crate) fn close_label_pairs(pairs: &BTreeSet<(Label, Label)>) -> BTreeSet<(Label, Label)> {
    let labels: Vec<&Label> = pairs
        .iter()
        .flat_map(|(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let n = labels.len();
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
                out.insert((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    out
}

/// Backtracking search for an order isomorphism `a -> b`. `fixed` pins the
/// image of particular labels (returning `None` leaves the label free).
pub(crate) fn find_isomorphism(
    a: &SecurityLattice,
    b: &SecurityLattice,
    fixed: impl Fn(&Label) -> Option<Label>,
) -> bool {
    if a.labels().len() != b.labels().len() || a.can_flow().len() != b.can_flow().len() {
        return false;
    }
    let a_labels: Vec<&Label> = a.labels().iter().collect();
    let b_labels: Vec<&Label> = b.labels().iter().collect();

    // Order signature: (in-degree, out-degree) must match under any iso.
    let degree = |s: &SecurityLattice, l: &Label| -> (usize, usize) {
        let below = s
            .can_flow()
            .iter()
            .filter(|(x, y)| y == l && x != l)
            .count();
        let above = s
            .can_flow()
            .iter()
            .filter(|(x, y)| x == l && y != l)
            .count();
        (below, above)
    };
    let a_deg: Vec<(usize, usize)> = a_labels.iter().map(|l| degree(a, l)).collect();
    let b_deg: BTreeMap<&Label, (usize, usize)> =
        b_labels.iter().map(|l| (*l, degree(b, l))).collect();

    fn consistent(
        a: &SecurityLattice,
        b: &SecurityLattice,
        assigned: &BTreeMap<&Label, &Label>,
        la: &Label,
        lb: &Label,
    ) -> bool {
        for (oa, ob) in assigned {
            let fwd = a.can_flow().contains(&(la.clone(), (*oa).clone()));
            if fwd != b.can_flow().contains(&(lb.clone(), (*ob).clone())) {
                return false;
            }
            let bwd = a.can_flow().contains(&((*oa).clone(), la.clone()));
            if bwd != b.can_flow().contains(&((*ob).clone(), lb.clone())) {
                return false;
            }
        }
        let refl = a.can_flow().contains(&(la.clone(), la.clone()));
        refl == b.can_flow().contains(&(lb.clone(), lb.clone()))
    }

    /// Read-only state shared by every level of the backtracking search.
    struct SearchCtx<'l, F> {
        a: &'l SecurityLattice,
        b: &'l SecurityLattice,
        a_labels: &'l [&'l Label],
        a_deg: &'l [(usize, usize)],
        b_deg: &'l BTreeMap<&'l Label, (usize, usize)>,
        b_labels: &'l [&'l Label],
        fixed: &'l F,
    }

    fn search<'l, F: Fn(&Label) -> Option<Label>>(
        ctx: &SearchCtx<'l, F>,
        pos: usize,
        assigned: &mut BTreeMap<&'l Label, &'l Label>,
        used: &mut BTreeSet<&'l Label>,
    ) -> bool {
        if pos == ctx.a_labels.len() {
            return true;
        }
        let la = ctx.a_labels[pos];
        let candidates: Vec<&'l Label> = match (ctx.fixed)(la) {
            Some(img) => match ctx.b_labels.iter().find(|l| ***l == img) {
                Some(l) => vec![*l],
                None => return false,
            },
            None => ctx
                .b_labels
                .iter()
                .filter(|l| (ctx.fixed)(l).is_none())
                .copied()
                .collect(),
        };
        for lb in candidates {
            if used.contains(lb) || ctx.b_deg[lb] != ctx.a_deg[pos] {
                continue;
            }
            if !consistent(ctx.a, ctx.b, assigned, la, lb) {
                continue;
            }
            assigned.insert(la, lb);
            used.insert(lb);
            if search(ctx, pos + 1, assigned, used) {
                return true;
            }
            assigned.remove(la);
            used.remove(lb);
        }
        false
    }

    let ctx = SearchCtx {
        a,
        b,
        a_labels: &a_labels,
        a_deg: &a_deg,
        b_deg: &b_deg,
        b_labels: &b_labels,
        fixed: &fixed,
    };
    let mut assigned = BTreeMap::new();
    let mut used = BTreeSet::new();
    search(&ctx, 0, &mut assigned, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str) -> Variable {
        Variable::new(name).unwrap()
    }

    fn vset(names: &[&str]) -> Label {
        Label::var_set(names.iter().map(|n| var(n))).unwrap()
    }

    /// The 2-chain over {Public} and {Secret} with sentinels.
    fn conf_chain() -> SecurityLattice {
        SecurityLattice::from_generators(
            [vset(&["Public"]), vset(&["Secret"])],
            [(vset(&["Public"]), vset(&["Secret"]))],
        )
    }

    /// The 4-corner diamond over pairs of confidentiality/integrity levels.
    fn conf_int_diamond() -> SecurityLattice {
        let bottom = vset(&["LowC", "HighI"]);
        let left = vset(&["HighC", "HighI"]);
        let right = vset(&["LowC", "LowI"]);
        let top = vset(&["HighC", "LowI"]);
        SecurityLattice::from_generators(
            [bottom.clone(), left.clone(), right.clone(), top.clone()],
            [
                (bottom.clone(), left.clone()),
                (bottom.clone(), right.clone()),
                (left.clone(), top.clone()),
                (right.clone(), top.clone()),
            ],
        )
    }

    #[test]
    fn canonical_label_order() {
        let mut labels = vec![
            Label::Top,
            Label::fresh(1),
            vset(&["b"]),
            Label::Bottom,
            vset(&["a", "c"]),
            Label::fresh(0),
        ];
        labels.sort();
        assert_eq!(
            labels,
            vec![
                Label::Bottom,
                vset(&["a", "c"]),
                vset(&["b"]),
                Label::fresh(0),
                Label::fresh(1),
                Label::Top,
            ]
        );
    }

    #[test]
    fn label_display() {
        assert_eq!(Label::Top.to_string(), "TOP");
        assert_eq!(Label::Bottom.to_string(), "BOT");
        assert_eq!(Label::fresh(0).to_string(), "_j0");
        assert_eq!(vset(&["b", "a"]).to_string(), "{a,b}");
    }

    #[test]
    fn empty_var_set_rejected() {
        assert_eq!(Label::var_set([]).unwrap_err(), LatticeError::EmptyVarSet);
    }

    #[test]
    fn leq_bottom_below_everything() {
        let s = conf_chain();
        for l in s.labels() {
            assert!(s.leq(&Label::Bottom, l).unwrap());
        }
    }

    #[test]
    fn leq_on_conf_chain() {
        let s = conf_chain();
        assert!(s.leq(&vset(&["Public"]), &vset(&["Secret"])).unwrap());
        assert!(!s.leq(&vset(&["Secret"]), &vset(&["Public"])).unwrap());
    }

    #[test]
    fn leq_unknown_label() {
        let s = conf_chain();
        assert_eq!(
            s.leq(&vset(&["ghost"]), &Label::Top).unwrap_err(),
            LatticeError::UnknownLabel {
                label: vset(&["ghost"])
            }
        );
    }

    #[test]
    fn join_with_bottom_is_identity() {
        let s = conf_int_diamond();
        for l in s.labels() {
            assert_eq!(
                s.join(&Label::Bottom, l).unwrap(),
                JoinOutcome::Join(l.clone())
            );
        }
    }

    #[test]
    fn diamond_join_of_incomparable_middles() {
        let s = conf_int_diamond();
        assert_eq!(
            s.join(&vset(&["HighC", "HighI"]), &vset(&["LowC", "LowI"]))
                .unwrap(),
            JoinOutcome::Join(vset(&["HighC", "LowI"]))
        );
    }

    #[test]
    fn no_join_reports_minimal_upper_bound_antichain() {
        // Pre-completion shape: two incomparable labels below two
        // incomparable upper bounds.
        let a = vset(&["a"]);
        let b = vset(&["b"]);
        let c = vset(&["c"]);
        let d = vset(&["d"]);
        let s = SecurityLattice::from_generators(
            [a.clone(), b.clone(), c.clone(), d.clone()],
            [
                (a.clone(), c.clone()),
                (a.clone(), d.clone()),
                (b.clone(), c.clone()),
                (b.clone(), d.clone()),
            ],
        );
        assert_eq!(
            s.join(&a, &b).unwrap(),
            JoinOutcome::NoJoin {
                minimal_upper_bounds: vec![c.clone(), d.clone()],
            }
        );
        // And validation reports the same pair under label combining.
        let report = s.validate();
        assert!(!report.is_lattice());
        let failing: Vec<_> = report.failures().collect();
        assert!(failing
            .iter()
            .all(|(ax, _)| *ax == Axiom::TotalLabelCombining));
        assert!(matches!(
            failing[0].1,
            AxiomViolation::NoUniqueJoin { pair, .. } if *pair == (a.clone(), b.clone())
        ));
    }

    #[test]
    fn meet_with_top_is_identity() {
        let s = conf_int_diamond();
        for l in s.labels() {
            assert_eq!(s.meet(&Label::Top, l).unwrap(), l.clone());
        }
    }

    #[test]
    fn diamond_meet_of_incomparable_middles() {
        let s = conf_int_diamond();
        assert_eq!(
            s.meet(&vset(&["HighC", "HighI"]), &vset(&["LowC", "LowI"]))
                .unwrap(),
            vset(&["LowC", "HighI"])
        );
    }

    #[test]
    fn meet_requires_a_lattice() {
        let a = vset(&["a"]);
        let b = vset(&["b"]);
        let s = SecurityLattice::from_generators(
            [a.clone(), b.clone(), vset(&["c"]), vset(&["d"])],
            [
                (a.clone(), vset(&["c"])),
                (a.clone(), vset(&["d"])),
                (b.clone(), vset(&["c"])),
                (b.clone(), vset(&["d"])),
            ],
        );
        assert_eq!(
            s.meet(&a, &b).unwrap_err(),
            LatticeError::NotALattice {
                axiom: Axiom::TotalLabelCombining,
            }
        );
    }

    #[test]
    fn validate_passes_on_chain() {
        let report = conf_chain().validate();
        assert!(report.is_lattice());
        // Finiteness is still part of the report.
        assert_eq!(report.checks[0].axiom, Axiom::Finiteness);
        assert_eq!(report.checks.len(), 5);
    }

    #[test]
    fn validate_rejects_antisymmetry_violation() {
        let a = vset(&["a"]);
        let b = vset(&["b"]);
        let mut s = SecurityLattice::from_generators(
            [a.clone(), b.clone()],
            [(a.clone(), b.clone()), (b.clone(), a.clone())],
        );
        // from_generators closes transitively but keeps both directions.
        let report = s.validate();
        assert!(!report.is_lattice());
        assert!(report.failures().any(|(ax, v)| {
            ax == Axiom::Order
                && matches!(v, AxiomViolation::NotAntisymmetric { pair } if *pair == (a.clone(), b.clone()))
        }));
        // Dropping a label from the set surfaces the unknown-label check.
        s.labels.remove(&a);
        assert!(s
            .validate()
            .failures()
            .any(|(ax, v)| ax == Axiom::Order
                && matches!(v, AxiomViolation::UnknownLabelInOrder { .. })));
    }

    #[test]
    fn validate_reports_missing_bottom_and_top() {
        let a = vset(&["a"]);
        let labels = BTreeSet::from([a.clone()]);
        let order = BTreeSet::from([(a.clone(), a.clone())]);
        let report = validate_poset(&labels, &order);
        assert!(report
            .failures()
            .any(|(ax, v)| ax == Axiom::PublicLabel && matches!(v, AxiomViolation::MissingBottom)));
        assert!(report
            .failures()
            .any(|(ax, v)| ax == Axiom::UniqueTop && matches!(v, AxiomViolation::MissingTop)));
    }

    #[test]
    fn hasse_of_chain_keeps_covering_edges_only() {
        let s = conf_chain();
        assert_eq!(
            s.hasse_edges(),
            BTreeSet::from([
                (Label::Bottom, vset(&["Public"])),
                (vset(&["Public"]), vset(&["Secret"])),
                (vset(&["Secret"]), Label::Top),
            ])
        );
    }

    #[test]
    fn hasse_of_sentinel_only_lattice() {
        let s = SecurityLattice::from_generators([], []);
        assert_eq!(
            s.hasse_edges(),
            BTreeSet::from([(Label::Bottom, Label::Top)])
        );
    }

    #[test]
    fn hasse_of_diamond_has_user_diamond_edges() {
        let s = conf_int_diamond();
        let edges = s.hasse_edges();
        let user_edges: BTreeSet<_> = edges
            .iter()
            .filter(|(a, b)| !a.is_sentinel() && !b.is_sentinel())
            .cloned()
            .collect();
        assert_eq!(
            user_edges,
            BTreeSet::from([
                (vset(&["LowC", "HighI"]), vset(&["HighC", "HighI"])),
                (vset(&["LowC", "HighI"]), vset(&["LowC", "LowI"])),
                (vset(&["HighC", "HighI"]), vset(&["HighC", "LowI"])),
                (vset(&["LowC", "LowI"]), vset(&["HighC", "LowI"])),
            ])
        );
    }

    fn int_chain() -> SecurityLattice {
        SecurityLattice::from_generators(
            [vset(&["Trusted"]), vset(&["Untrusted"])],
            [(vset(&["Trusted"]), vset(&["Untrusted"]))],
        )
    }

    #[test]
    fn product_of_chains_is_diamond() {
        let p = conf_chain().product(&int_chain()).unwrap();
        assert!(p.validate().is_lattice());
        assert!(p.order_isomorphic(&conf_int_diamond()));
        assert_eq!(p.inner_labels().count(), 4);
        let user_hasse = p
            .hasse_edges()
            .into_iter()
            .filter(|(a, b)| !a.is_sentinel() && !b.is_sentinel())
            .count();
        assert_eq!(user_hasse, 4);
    }

    #[test]
    fn product_with_two_point_lattice_collapses() {
        // The two-point {BOT, TOP} lattice has no non-sentinel labels, so the
        // product over non-sentinel pairs is the two-point lattice again. (The
        // one-point lattice would be the true unit, but sentinels are distinct
        // by construction, so it is not representable.)
        let two_point = SecurityLattice::from_generators([], []);
        let p = conf_chain().product(&two_point).unwrap();
        assert_eq!(p.inner_labels().count(), 0);
        assert!(p.validate().is_lattice());
    }

    #[test]
    fn product_rejects_shared_variables() {
        assert_eq!(
            conf_chain().product(&conf_chain()).unwrap_err(),
            LatticeError::ProductSharedVariable {
                name: var("Public")
            }
        );
    }

    #[test]
    fn product_rejects_invalid_operand() {
        let a = vset(&["a"]);
        let b = vset(&["b"]);
        let broken = SecurityLattice::from_generators(
            [a.clone(), b.clone(), vset(&["c"]), vset(&["d"])],
            [
                (a.clone(), vset(&["c"])),
                (a.clone(), vset(&["d"])),
                (b.clone(), vset(&["c"])),
                (b.clone(), vset(&["d"])),
            ],
        );
        assert!(matches!(
            conf_chain().product(&broken),
            Err(LatticeError::NotALattice { .. })
        ));
    }

    #[test]
    fn order_isomorphism_respects_structure() {
        let chain_a = conf_chain();
        let chain_b = int_chain();
        assert!(chain_a.order_isomorphic(&chain_b));
        assert!(!chain_a.order_isomorphic(&conf_int_diamond()));
    }
}
