//! Deduction trees, assumption classes, the checker and structural editing.

mod check;
pub(crate) mod edit;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Name, PredPattern, Term};

pub use check::{check, check_with, CheckOptions, CheckReport, Violation, ViolationKind};
pub use edit::{freshen, graft, relabel_fresh, EditError, Fresh, GraftOptions};
pub use subst::{subst_parameter, subst_pred_parameter};

pub type ClassId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleTag {
    AndI,
    AndE,
    ImpI,
    ImpE,
    OrI1,
    OrI2,
    OrE,
    BotE,
    TopI,
    ExI,
    ExE,
    AllI,
    AllE,
    EqE,
    EqES,
    EqI,
    EqIPrime,
    Assumption,
}

impl RuleTag {
    pub const RULES: [RuleTag; 17] = [
        RuleTag::AndI,
        RuleTag::AndE,
        RuleTag::ImpI,
        RuleTag::ImpE,
        RuleTag::OrI1,
        RuleTag::OrI2,
        RuleTag::OrE,
        RuleTag::BotE,
        RuleTag::TopI,
        RuleTag::ExI,
        RuleTag::ExE,
        RuleTag::AllI,
        RuleTag::AllE,
        RuleTag::EqE,
        RuleTag::EqES,
        RuleTag::EqI,
        RuleTag::EqIPrime,
    ];

    /// Head used by the `.ndi` format.
    pub fn head(self) -> &'static str {
        match self {
            RuleTag::AndI => "andI",
            RuleTag::AndE => "andE",
            RuleTag::ImpI => "impI",
            RuleTag::ImpE => "impE",
            RuleTag::OrI1 => "orI1",
            RuleTag::OrI2 => "orI2",
            RuleTag::OrE => "orE",
            RuleTag::BotE => "botE",
            RuleTag::TopI => "topI",
            RuleTag::ExI => "exI",
            RuleTag::ExE => "exE",
            RuleTag::AllI => "allI",
            RuleTag::AllE => "allE",
            RuleTag::EqE => "eqE",
            RuleTag::EqES => "eqES",
            RuleTag::EqI => "eqI",
            RuleTag::EqIPrime => "eqIprime",
            RuleTag::Assumption => "as",
        }
    }

    pub fn from_head(head: &str) -> Option<RuleTag> {
        RuleTag::RULES
            .iter()
            .copied()
            .chain([RuleTag::Assumption])
            .find(|t| t.head() == head)
    }

    pub fn arity(self) -> usize {
        match self {
            RuleTag::Assumption => 0,
            RuleTag::BotE | RuleTag::TopI | RuleTag::EqI => 1,
            RuleTag::AndE
            | RuleTag::ImpI
            | RuleTag::OrI1
            | RuleTag::OrI2
            | RuleTag::ExI
            | RuleTag::ExE
            | RuleTag::AllI
            | RuleTag::AllE => 2,
            RuleTag::AndI
            | RuleTag::ImpE
            | RuleTag::OrE
            | RuleTag::EqE
            | RuleTag::EqES
            | RuleTag::EqIPrime => 3,
        }
    }

    /// For each discharge position, the child whose leaves it binds.
    pub fn discharge_children(self) -> &'static [usize] {
        match self {
            RuleTag::Assumption | RuleTag::BotE => &[],
            RuleTag::AndI | RuleTag::ImpE | RuleTag::EqE | RuleTag::EqES => &[2],
            RuleTag::AndE => &[1, 1],
            RuleTag::ImpI => &[0, 1],
            RuleTag::OrE => &[1, 2],
            RuleTag::OrI1
            | RuleTag::OrI2
            | RuleTag::ExI
            | RuleTag::ExE
            | RuleTag::AllI
            | RuleTag::AllE => &[1],
            RuleTag::TopI | RuleTag::EqI => &[0],
            RuleTag::EqIPrime => &[0, 1, 2],
        }
    }

    pub fn is_intro(self) -> bool {
        matches!(
            self,
            RuleTag::AndI
                | RuleTag::ImpI
                | RuleTag::OrI1
                | RuleTag::OrI2
                | RuleTag::TopI
                | RuleTag::ExI
                | RuleTag::AllI
                | RuleTag::EqI
                | RuleTag::EqIPrime
        )
    }

    pub fn is_elim(self) -> bool {
        self != RuleTag::Assumption && !self.is_intro()
    }

    /// Discharge position of an introduction's major assumption.
    pub fn major_discharge(self) -> Option<usize> {
        match self {
            RuleTag::ImpI => Some(1),
            RuleTag::EqIPrime => Some(2),
            t if t.is_intro() => Some(0),
            _ => None,
        }
    }

    /// Child index of an elimination's major premise.
    pub fn major_premise(self) -> Option<usize> {
        self.is_elim().then_some(0)
    }

    pub fn arbitrary_children(self) -> &'static [usize] {
        match self {
            RuleTag::Assumption | RuleTag::BotE => &[],
            RuleTag::AndI | RuleTag::ImpE | RuleTag::EqE | RuleTag::EqES | RuleTag::EqIPrime => {
                &[2]
            }
            RuleTag::OrE => &[1, 2],
            RuleTag::TopI | RuleTag::EqI => &[0],
            _ => &[1],
        }
    }

    /// Specific premises of introductions and minor premises of eliminations.
    pub fn side_children(self) -> &'static [usize] {
        match self {
            RuleTag::AndI | RuleTag::EqIPrime => &[0, 1],
            RuleTag::ImpI | RuleTag::OrI1 | RuleTag::OrI2 | RuleTag::ExI | RuleTag::AllI => &[0],
            RuleTag::ImpE | RuleTag::EqE | RuleTag::EqES => &[1],
            _ => &[],
        }
    }

    pub fn is_arbitrary(self, child: usize) -> bool {
        self.arbitrary_children().contains(&child)
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.head())
    }
}

/// A rule together with its instantiation annotation.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    AndI,
    AndE,
    ImpI,
    ImpE,
    OrI1,
    OrI2,
    OrE,
    /// Annotated with its conclusion.
    BotE(Formula),
    TopI,
    /// `A^x_t` from the specific premise, discharging `∃xA`.
    ExI {
        witness: Term,
        target: Formula,
    },
    ExE {
        eigen: Name,
    },
    AllI {
        eigen: Name,
    },
    AllE {
        witness: Term,
    },
    EqE(PredPattern),
    EqES(PredPattern),
    EqI,
    EqIPrime {
        pred: Name,
        lhs: Term,
        rhs: Term,
    },
}

impl Rule {
    pub fn tag(&self) -> RuleTag {
        match self {
            Rule::AndI => RuleTag::AndI,
            Rule::AndE => RuleTag::AndE,
            Rule::ImpI => RuleTag::ImpI,
            Rule::ImpE => RuleTag::ImpE,
            Rule::OrI1 => RuleTag::OrI1,
            Rule::OrI2 => RuleTag::OrI2,
            Rule::OrE => RuleTag::OrE,
            Rule::BotE(_) => RuleTag::BotE,
            Rule::TopI => RuleTag::TopI,
            Rule::ExI { .. } => RuleTag::ExI,
            Rule::ExE { .. } => RuleTag::ExE,
            Rule::AllI { .. } => RuleTag::AllI,
            Rule::AllE { .. } => RuleTag::AllE,
            Rule::EqE(_) => RuleTag::EqE,
            Rule::EqES(_) => RuleTag::EqES,
            Rule::EqI => RuleTag::EqI,
            Rule::EqIPrime { .. } => RuleTag::EqIPrime,
        }
    }

    pub fn eigen(&self) -> Option<&str> {
        match self {
            Rule::ExE { eigen } | Rule::AllI { eigen } => Some(eigen),
            _ => None,
        }
    }

    pub(crate) fn map_formulas(
        &self,
        f: &mut dyn FnMut(&Formula) -> Formula,
        t: &mut dyn FnMut(&Term) -> Term,
    ) -> Rule {
        match self {
            Rule::BotE(c) => Rule::BotE(f(c)),
            Rule::ExI { witness, target } => Rule::ExI {
                witness: t(witness),
                target: f(target),
            },
            Rule::AllE { witness } => Rule::AllE {
                witness: t(witness),
            },
            Rule::EqE(p) => Rule::EqE(PredPattern {
                body: f(&p.body),
                hole: p.hole.clone(),
            }),
            Rule::EqES(p) => Rule::EqES(PredPattern {
                body: f(&p.body),
                hole: p.hole.clone(),
            }),
            Rule::EqIPrime { pred, lhs, rhs } => Rule::EqIPrime {
                pred: pred.clone(),
                lhs: t(lhs),
                rhs: t(rhs),
            },
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub rule: Rule,
    pub premises: Vec<Deduction>,
    /// Class ids in rule-determined positions; see [`RuleTag::discharge_children`].
    pub discharges: Vec<ClassId>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Deduction {
    Assumption { class: ClassId, formula: Formula },
    Apply(Box<Inference>),
}

/// Root-to-node path of child indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Address(pub Vec<usize>);

impl Address {
    pub fn root() -> Address {
        Address(Vec::new())
    }

    pub fn child(&self, i: usize) -> Address {
        let mut v = self.0.clone();
        v.push(i);
        Address(v)
    }

    pub fn parent(&self) -> Option<Address> {
        let mut v = self.0.clone();
        v.pop().map(|_| Address(v))
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("`{rule}` at {at} expects {expected} premises, found {found}")]
    Arity {
        rule: RuleTag,
        at: Address,
        expected: usize,
        found: usize,
    },
    #[error("`{rule}` at {at} expects {expected} discharge labels, found {found}")]
    DischargeCount {
        rule: RuleTag,
        at: Address,
        expected: usize,
        found: usize,
    },
    #[error("class {class} discharged twice (at {first} and {second})")]
    DuplicateDischarge {
        class: ClassId,
        first: Address,
        second: Address,
    },
    #[error("no node at {0}")]
    NoSuchNode(Address),
}

/// Open-assumption view `Γ ⊢ A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentView {
    pub conclusion: Formula,
    pub assumptions: Vec<(ClassId, Formula)>,
}

impl SequentView {
    /// Distinct open formulas up to alpha-equivalence.
    pub fn formula_set(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = Vec::new();
        for (_, f) in &self.assumptions {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.assumptions.is_empty()
    }
}

impl Deduction {
    pub fn leaf(class: ClassId, formula: Formula) -> Deduction {
        Deduction::Assumption { class, formula }
    }

    pub fn apply(rule: Rule, premises: Vec<Deduction>, discharges: Vec<ClassId>) -> Deduction {
        Deduction::Apply(Box::new(Inference {
            rule,
            premises,
            discharges,
        }))
    }

    pub fn tag(&self) -> RuleTag {
        match self {
            Deduction::Assumption { .. } => RuleTag::Assumption,
            Deduction::Apply(inf) => inf.rule.tag(),
        }
    }

    pub fn inference(&self) -> Option<&Inference> {
        match self {
            Deduction::Apply(inf) => Some(inf),
            Deduction::Assumption { .. } => None,
        }
    }

    pub fn premises(&self) -> &[Deduction] {
        match self {
            Deduction::Apply(inf) => &inf.premises,
            Deduction::Assumption { .. } => &[],
        }
    }

    pub fn discharges(&self) -> &[ClassId] {
        match self {
            Deduction::Apply(inf) => &inf.discharges,
            Deduction::Assumption { .. } => &[],
        }
    }

    pub fn conclusion(&self) -> &Formula {
        match self {
            Deduction::Assumption { formula, .. } => formula,
            Deduction::Apply(inf) => match &inf.rule {
                Rule::BotE(c) => c,
                rule => {
                    let i = rule.tag().arbitrary_children()[0];
                    inf.premises[i].conclusion()
                }
            },
        }
    }

    /// Number of formula occurrences (nodes) in the tree.
    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(Deduction::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self
            .premises()
            .iter()
            .map(Deduction::height)
            .max()
            .unwrap_or(0)
    }

    pub fn get(&self, addr: &Address) -> Option<&Deduction> {
        let mut cur = self;
        for &i in &addr.0 {
            cur = cur.premises().get(i)?;
        }
        Some(cur)
    }

    pub fn get_mut(&mut self, addr: &Address) -> Option<&mut Deduction> {
        let mut cur = self;
        for &i in &addr.0 {
            cur = match cur {
                Deduction::Apply(inf) => inf.premises.get_mut(i)?,
                Deduction::Assumption { .. } => return None,
            };
        }
        Some(cur)
    }

    /// Returns a copy with the subtree at `addr` replaced.
    pub fn replace_at(&self, addr: &Address, sub: Deduction) -> Result<Deduction, StructureError> {
        let mut out = self.clone();
        let slot = out
            .get_mut(addr)
            .ok_or_else(|| StructureError::NoSuchNode(addr.clone()))?;
        *slot = sub;
        Ok(out)
    }

    /// Pre-order visit of every node with its address.
    pub fn visit(&self, f: &mut dyn FnMut(&Address, &Deduction)) {
        fn go(d: &Deduction, addr: &mut Vec<usize>, f: &mut dyn FnMut(&Address, &Deduction)) {
            f(&Address(addr.clone()), d);
            for (i, c) in d.premises().iter().enumerate() {
                addr.push(i);
                go(c, addr, f);
                addr.pop();
            }
        }
        go(self, &mut Vec::new(), f);
    }

    pub fn addresses(&self) -> Vec<Address> {
        let mut out = Vec::new();
        self.visit(&mut |a, _| out.push(a.clone()));
        out
    }

    /// Every leaf with its address.
    pub fn leaves(&self) -> Vec<(Address, ClassId, Formula)> {
        let mut out = Vec::new();
        self.visit(&mut |a, d| {
            if let Deduction::Assumption { class, formula } = d {
                out.push((a.clone(), *class, formula.clone()));
            }
        });
        out
    }

    /// Leaves not discharged inside this subtree.
    pub fn open_leaves(&self) -> Vec<(Address, ClassId, Formula)> {
        let mut out = Vec::new();
        self.open_leaves_into(&mut Vec::new(), &mut Vec::new(), &mut out);
        out
    }

    fn open_leaves_into(
        &self,
        addr: &mut Vec<usize>,
        bound: &mut Vec<ClassId>,
        out: &mut Vec<(Address, ClassId, Formula)>,
    ) {
        match self {
            Deduction::Assumption { class, formula } => {
                if !bound.contains(class) {
                    out.push((Address(addr.clone()), *class, formula.clone()));
                }
            }
            Deduction::Apply(inf) => {
                let targets = inf.rule.tag().discharge_children();
                for (i, c) in inf.premises.iter().enumerate() {
                    let n = bound.len();
                    for (k, &child) in targets.iter().enumerate() {
                        if child == i {
                            if let Some(&cls) = inf.discharges.get(k) {
                                bound.push(cls);
                            }
                        }
                    }
                    addr.push(i);
                    c.open_leaves_into(addr, bound, out);
                    addr.pop();
                    bound.truncate(n);
                }
            }
        }
    }

    pub fn sequent(&self) -> SequentView {
        SequentView {
            conclusion: self.conclusion().clone(),
            assumptions: self
                .open_leaves()
                .into_iter()
                .map(|(_, c, f)| (c, f))
                .collect(),
        }
    }

    /// Leaves of `class` inside the given child of this node.
    pub fn class_leaves_in_child(&self, child: usize, class: ClassId) -> Vec<(Address, Formula)> {
        let Some(c) = self.premises().get(child) else {
            return Vec::new();
        };
        c.open_leaves()
            .into_iter()
            .filter(|(_, cls, _)| *cls == class)
            .map(|(a, _, f)| (Address(std::iter::once(child).chain(a.0).collect()), f))
            .collect()
    }

    /// Leaves bound by discharge position `pos` of this node, addresses relative to it.
    pub fn discharged_leaves(&self, pos: usize) -> Vec<(Address, Formula)> {
        let Deduction::Apply(inf) = self else {
            return Vec::new();
        };
        let child = inf.rule.tag().discharge_children()[pos];
        self.class_leaves_in_child(child, inf.discharges[pos])
    }

    /// Formula of the introduction's major assumption, if determinable.
    pub fn intro_major(&self) -> Option<Formula> {
        let inf = self.inference()?;
        let pos = inf.rule.tag().major_discharge()?;
        if let Some((_, f)) = self.discharged_leaves(pos).into_iter().next() {
            return Some(f);
        }
        let c = |i: usize| inf.premises[i].conclusion().clone();
        match &inf.rule {
            Rule::AndI => Some(Formula::and(c(0), c(1))),
            Rule::ImpI => self
                .discharged_leaves(0)
                .into_iter()
                .next()
                .map(|(_, a)| Formula::imp(a, c(0))),
            Rule::TopI => Some(Formula::Top),
            Rule::ExI { target, .. } => Some(target.clone()),
            Rule::AllI { eigen } => {
                let body = c(0);
                let x = body.fresh_var();
                Some(Formula::forall(&x, body.abstract_param(eigen, &x)))
            }
            Rule::EqIPrime { lhs, rhs, .. } => Some(Formula::eq(lhs.clone(), rhs.clone())),
            _ => None,
        }
    }

    /// All class ids appearing as labels or on leaves.
    pub fn class_ids(&self) -> BTreeSet<ClassId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |_, d| match d {
            Deduction::Assumption { class, .. } => {
                out.insert(*class);
            }
            Deduction::Apply(inf) => out.extend(inf.discharges.iter().copied()),
        });
        out
    }

    /// Map from discharged class id to the address of its discharging node.
    pub fn dischargers(&self) -> Result<BTreeMap<ClassId, (Address, usize)>, StructureError> {
        let mut out: BTreeMap<ClassId, (Address, usize)> = BTreeMap::new();
        let mut err = None;
        self.visit(&mut |a, d| {
            for (pos, &cls) in d.discharges().iter().enumerate() {
                if let Some((first, _)) = out.get(&cls) {
                    if err.is_none() {
                        err = Some(StructureError::DuplicateDischarge {
                            class: cls,
                            first: first.clone(),
                            second: a.clone(),
                        });
                    }
                } else {
                    out.insert(cls, (a.clone(), pos));
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Arity and discharge-count sanity; everything else is left to [`check`].
    pub fn validate_structure(&self) -> Result<(), StructureError> {
        let mut err = None;
        self.visit(&mut |a, d| {
            if err.is_some() {
                return;
            }
            if let Deduction::Apply(inf) = d {
                let tag = inf.rule.tag();
                if inf.premises.len() != tag.arity() {
                    err = Some(StructureError::Arity {
                        rule: tag,
                        at: a.clone(),
                        expected: tag.arity(),
                        found: inf.premises.len(),
                    });
                } else if inf.discharges.len() != tag.discharge_children().len() {
                    err = Some(StructureError::DischargeCount {
                        rule: tag,
                        at: a.clone(),
                        expected: tag.discharge_children().len(),
                        found: inf.discharges.len(),
                    });
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        self.dischargers().map(|_| ())
    }

    /// Parameters occurring anywhere (formulas and annotations).
    pub fn params(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |_, d| match d {
            Deduction::Assumption { formula, .. } => formula.collect_params(&mut out),
            Deduction::Apply(inf) => match &inf.rule {
                Rule::BotE(c) => c.collect_params(&mut out),
                Rule::ExI { witness, target } => {
                    witness.collect_params(&mut out);
                    target.collect_params(&mut out);
                }
                Rule::AllE { witness } => witness.collect_params(&mut out),
                Rule::ExE { eigen } | Rule::AllI { eigen } => {
                    out.insert(eigen.clone());
                }
                Rule::EqE(p) | Rule::EqES(p) => p.body.collect_params(&mut out),
                Rule::EqIPrime { lhs, rhs, .. } => {
                    lhs.collect_params(&mut out);
                    rhs.collect_params(&mut out);
                }
                _ => {}
            },
        });
        out
    }

    pub fn preds(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |_, d| match d {
            Deduction::Assumption { formula, .. } => formula.collect_preds(&mut out),
            Deduction::Apply(inf) => match &inf.rule {
                Rule::BotE(c) | Rule::ExI { target: c, .. } => c.collect_preds(&mut out),
                Rule::EqE(p) | Rule::EqES(p) => p.body.collect_preds(&mut out),
                Rule::EqIPrime { pred, .. } => {
                    out.insert(pred.clone());
                }
                _ => {}
            },
        });
        out
    }

    /// Eigenparameters and =I′ predicate parameters owned by rules in this tree.
    pub fn eigens(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit(&mut |_, d| {
            if let Some(e) = d.inference().and_then(|i| i.rule.eigen()) {
                out.push(e.to_string());
            }
        });
        out
    }

    pub fn pred_eigens(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit(&mut |_, d| {
            if let Some(Inference {
                rule: Rule::EqIPrime { pred, .. },
                ..
            }) = d.inference()
            {
                out.push(pred.clone());
            }
        });
        out
    }

    /// Rule tags used, in pre-order.
    pub fn tags(&self) -> Vec<RuleTag> {
        let mut out = Vec::new();
        self.visit(&mut |_, d| out.push(d.tag()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn and_i() -> Deduction {
        Deduction::apply(
            Rule::AndI,
            vec![
                Deduction::leaf(2, f("p")),
                Deduction::leaf(3, f("q")),
                Deduction::leaf(1, f("p & q")),
            ],
            vec![1],
        )
    }

    #[test]
    fn sequent_of_leaf() {
        let d = Deduction::leaf(1, f("p"));
        let s = d.sequent();
        assert_eq!(s.conclusion, f("p"));
        assert_eq!(s.assumptions, vec![(1, f("p"))]);
    }

    #[test]
    fn sequent_of_derived_and_intro() {
        let s = and_i().sequent();
        assert_eq!(s.conclusion, f("p & q"));
        assert_eq!(s.formula_set(), vec![f("p"), f("q")]);
    }

    #[test]
    fn closed_identity_proof() {
        let d = Deduction::apply(
            Rule::ImpI,
            vec![Deduction::leaf(1, f("p")), Deduction::leaf(2, f("p -> p"))],
            vec![1, 2],
        );
        assert!(d.sequent().is_closed());
        assert_eq!(d.conclusion(), &f("p -> p"));
        assert_eq!(d.intro_major(), Some(f("p -> p")));
    }

    #[test]
    fn addresses_print_dotted() {
        assert_eq!(Address(vec![0, 2, 1]).to_string(), "0.2.1");
        assert_eq!(Address::root().to_string(), "root");
        let d = and_i();
        assert_eq!(d.get(&Address(vec![1])).unwrap().conclusion(), &f("q"));
        assert_eq!(d.size(), 4);
    }

    #[test]
    fn structure_errors() {
        let bad = Deduction::apply(Rule::AndI, vec![Deduction::leaf(1, f("p"))], vec![1]);
        assert!(matches!(
            bad.validate_structure(),
            Err(StructureError::Arity { .. })
        ));
        let dup = Deduction::apply(
            Rule::AndE,
            vec![Deduction::leaf(1, f("p & q")), Deduction::leaf(2, f("p"))],
            vec![2, 2],
        );
        assert!(matches!(
            dup.validate_structure(),
            Err(StructureError::DuplicateDischarge { .. })
        ));
    }

    #[test]
    fn tag_roles_are_consistent() {
        for tag in RuleTag::RULES {
            assert!(tag.discharge_children().iter().all(|&c| c < tag.arity()));
            assert!(tag.arbitrary_children().iter().all(|&c| c < tag.arity()));
            assert_eq!(RuleTag::from_head(tag.head()), Some(tag));
            assert!(tag.is_intro() != tag.is_elim());
        }
    }
}
