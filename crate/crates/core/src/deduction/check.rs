use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Address, ClassId, Deduction, Inference, Rule, StructureError};
use crate::formula::{Formula, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    RuleShape,
    ImpMinor,
    OrArms,
    BotPremise,
    NonatomicBot,
    Eigenparameter,
    PredParameter,
    VacuousArbitrary,
    DischargeShape,
    ClassShape,
    DischargeScope,
    TrivialEq,
    Pattern,
    FreeVariable,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::RuleShape => "rule-shape",
            ViolationKind::ImpMinor => "imp-minor",
            ViolationKind::OrArms => "or-arms",
            ViolationKind::BotPremise => "bot-premise",
            ViolationKind::NonatomicBot => "nonatomic-bot",
            ViolationKind::Eigenparameter => "eigenparameter",
            ViolationKind::PredParameter => "pred-parameter",
            ViolationKind::VacuousArbitrary => "vacuous-arbitrary",
            ViolationKind::DischargeShape => "discharge-shape",
            ViolationKind::ClassShape => "class-shape",
            ViolationKind::DischargeScope => "discharge-scope",
            ViolationKind::TrivialEq => "trivial-eq",
            ViolationKind::Pattern => "pattern",
            ViolationKind::FreeVariable => "free-variable",
        }
    }

    /// Defects the normalizer's preprocessing removes.
    pub fn is_cleanable(self) -> bool {
        matches!(
            self,
            ViolationKind::VacuousArbitrary | ViolationKind::NonatomicBot
        )
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub at: Address,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.kind, self.at, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Valid except for defects that preprocessing removes.
    pub fn is_cleanable(&self) -> bool {
        self.violations.iter().all(|v| v.kind.is_cleanable())
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Reject equality rules whose two terms are identical.
    pub strict_eq: bool,
}

pub fn check(d: &Deduction) -> Result<CheckReport, StructureError> {
    check_with(d, CheckOptions::default())
}

pub fn check_with(d: &Deduction, opts: CheckOptions) -> Result<CheckReport, StructureError> {
    d.validate_structure()?;
    let mut cx = Checker {
        opts,
        out: Vec::new(),
    };
    cx.classes(d)?;
    d.visit(&mut |addr, node| match node {
        Deduction::Assumption { formula, .. } => cx.closed(addr, formula, "assumption"),
        Deduction::Apply(inf) => cx.node(addr, node, inf),
    });
    Ok(CheckReport { violations: cx.out })
}

struct Checker {
    opts: CheckOptions,
    out: Vec<Violation>,
}

fn show(f: &Formula) -> String {
    crate::textio::print_formula(f, crate::textio::Style::Pretty)
}

impl Checker {
    fn push(&mut self, at: &Address, kind: ViolationKind, message: impl Into<String>) {
        self.out.push(Violation {
            at: at.clone(),
            kind,
            message: message.into(),
        });
    }

    fn closed(&mut self, at: &Address, f: &Formula, what: &str) {
        if !f.is_closed() {
            self.push(
                at,
                ViolationKind::FreeVariable,
                format!("{what} `{}` has free variables", show(f)),
            );
        }
    }

    fn closed_term(&mut self, at: &Address, t: &Term) {
        if t.has_vars() {
            self.push(
                at,
                ViolationKind::FreeVariable,
                format!("term `{t}` has free variables"),
            );
        }
    }

    fn classes(&mut self, d: &Deduction) -> Result<(), StructureError> {
        let dischargers = d.dischargers()?;
        let mut shapes: BTreeMap<ClassId, Formula> = BTreeMap::new();
        for (addr, class, formula) in d.leaves() {
            match shapes.get(&class) {
                Some(f) if *f != formula => self.push(
                    &addr,
                    ViolationKind::ClassShape,
                    format!("class {class} mixes `{}` and `{}`", show(f), show(&formula)),
                ),
                Some(_) => {}
                None => {
                    shapes.insert(class, formula.clone());
                }
            }
            if let Some((node, pos)) = dischargers.get(&class) {
                let tag = d.get(node).map(Deduction::tag).expect("discharger exists");
                let scope = node.child(tag.discharge_children()[*pos]);
                if !scope.is_prefix_of(&addr) {
                    self.push(
                        &addr,
                        ViolationKind::DischargeScope,
                        format!("class {class} is discharged at {node} but this leaf lies outside its scope"),
                    );
                }
            }
        }
        Ok(())
    }

    fn expect_leaves(&mut self, at: &Address, node: &Deduction, pos: usize, expected: &Formula) {
        for (rel, f) in node.discharged_leaves(pos) {
            if f != *expected {
                let mut leaf = at.0.clone();
                leaf.extend(rel.0);
                self.push(
                    &Address(leaf),
                    ViolationKind::DischargeShape,
                    format!(
                        "discharged `{}` where the rule requires `{}`",
                        show(&f),
                        show(expected)
                    ),
                );
            }
        }
    }

    fn vacuous(&mut self, at: &Address, node: &Deduction, inf: &Inference) {
        let tag = inf.rule.tag();
        for &child in tag.arbitrary_children() {
            let positions: Vec<usize> = tag
                .discharge_children()
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == child)
                .map(|(p, _)| p)
                .collect();
            if !positions.is_empty()
                && positions
                    .iter()
                    .all(|&p| node.discharged_leaves(p).is_empty())
            {
                self.push(
                    at,
                    ViolationKind::VacuousArbitrary,
                    format!("vacuous discharge above premise {child}"),
                );
            }
        }
    }

    fn node(&mut self, at: &Address, node: &Deduction, inf: &Inference) {
        use ViolationKind::*;
        self.vacuous(at, node, inf);
        let c = |i: usize| inf.premises[i].conclusion();
        let leaves = |p: usize| node.discharged_leaves(p);
        match &inf.rule {
            Rule::AndI => {
                self.expect_leaves(at, node, 0, &Formula::and(c(0).clone(), c(1).clone()))
            }
            Rule::AndE => match c(0) {
                Formula::And(a, b) => {
                    self.expect_leaves(at, node, 0, a);
                    self.expect_leaves(at, node, 1, b);
                }
                f => self.push(
                    at,
                    RuleShape,
                    format!("major premise `{}` is not a conjunction", show(f)),
                ),
            },
            Rule::ImpI => {
                let antecedent = match (leaves(1).first(), leaves(0).first()) {
                    (Some((_, Formula::Imp(a, _))), _) => Some((**a).clone()),
                    (Some((rel, f)), _) => {
                        let mut leaf = at.0.clone();
                        leaf.extend(rel.0.iter());
                        self.push(
                            &Address(leaf),
                            DischargeShape,
                            format!("major assumption `{}` is not an implication", show(f)),
                        );
                        None
                    }
                    (None, Some((_, a))) => Some(a.clone()),
                    (None, None) => None,
                };
                if let Some(a) = antecedent {
                    self.expect_leaves(at, node, 0, &a);
                    self.expect_leaves(at, node, 1, &Formula::imp(a, c(0).clone()));
                }
            }
            Rule::ImpE => match c(0) {
                Formula::Imp(a, b) => {
                    if c(1) != &**a {
                        self.push(
                            at,
                            ImpMinor,
                            format!(
                                "minor premise `{}` does not match antecedent `{}`",
                                show(c(1)),
                                show(a)
                            ),
                        );
                    }
                    self.expect_leaves(at, node, 0, b);
                }
                f => self.push(
                    at,
                    RuleShape,
                    format!("major premise `{}` is not an implication", show(f)),
                ),
            },
            Rule::OrI1 | Rule::OrI2 => {
                let left = matches!(inf.rule, Rule::OrI1);
                for (rel, f) in leaves(0) {
                    let ok = match &f {
                        Formula::Or(a, b) => (if left { &**a } else { &**b }) == c(0),
                        _ => false,
                    };
                    if !ok {
                        let mut leaf = at.0.clone();
                        leaf.extend(rel.0);
                        self.push(
                            &Address(leaf),
                            DischargeShape,
                            format!(
                                "`{}` is not a disjunction with disjunct `{}`",
                                show(&f),
                                show(c(0))
                            ),
                        );
                    }
                }
            }
            Rule::OrE => {
                match c(0) {
                    Formula::Or(a, b) => {
                        self.expect_leaves(at, node, 0, a);
                        self.expect_leaves(at, node, 1, b);
                    }
                    f => self.push(
                        at,
                        RuleShape,
                        format!("major premise `{}` is not a disjunction", show(f)),
                    ),
                }
                if c(1) != c(2) {
                    self.push(
                        at,
                        OrArms,
                        format!("arms conclude `{}` and `{}`", show(c(1)), show(c(2))),
                    );
                }
            }
            Rule::BotE(concl) => {
                if c(0) != &Formula::Bottom {
                    self.push(
                        at,
                        BotPremise,
                        format!("premise `{}` is not falsum", show(c(0))),
                    );
                }
                self.closed(at, concl, "conclusion");
                if !concl.is_atomic() {
                    self.push(
                        at,
                        NonatomicBot,
                        format!("conclusion `{}` is not atomic", show(concl)),
                    );
                }
            }
            Rule::TopI => self.expect_leaves(at, node, 0, &Formula::Top),
            Rule::ExI { witness, target } => {
                self.closed_term(at, witness);
                self.closed(at, target, "target");
                match target.instantiate(witness) {
                    Some(inst) if matches!(target, Formula::Exists(..)) => {
                        if &inst != c(0) {
                            self.push(
                                at,
                                RuleShape,
                                format!("premise `{}` is not `{}`", show(c(0)), show(&inst)),
                            );
                        }
                    }
                    _ => self.push(
                        at,
                        RuleShape,
                        format!("target `{}` is not existential", show(target)),
                    ),
                }
                self.expect_leaves(at, node, 0, target);
            }
            Rule::AllE { witness } => {
                self.closed_term(at, witness);
                match c(0) {
                    Formula::Forall(..) => {
                        if let Some(inst) = c(0).instantiate(witness) {
                            self.expect_leaves(at, node, 0, &inst);
                        }
                    }
                    f => self.push(
                        at,
                        RuleShape,
                        format!("major premise `{}` is not universal", show(f)),
                    ),
                }
            }
            Rule::ExE { eigen } => {
                match c(0) {
                    Formula::Exists(..) => {
                        if c(0).mentions_param(eigen) {
                            self.push(
                                at,
                                Eigenparameter,
                                format!("`{eigen}` occurs in the major premise"),
                            );
                        }
                        let inst = c(0)
                            .instantiate(&Term::Param(eigen.clone()))
                            .expect("existential");
                        self.expect_leaves(at, node, 0, &inst);
                    }
                    f => self.push(
                        at,
                        RuleShape,
                        format!("major premise `{}` is not existential", show(f)),
                    ),
                }
                if c(1).mentions_param(eigen) {
                    self.push(
                        at,
                        Eigenparameter,
                        format!("`{eigen}` occurs in the conclusion"),
                    );
                }
                let own = inf.discharges[0];
                if inf.premises[1]
                    .open_leaves()
                    .iter()
                    .any(|(_, cls, f)| *cls != own && f.mentions_param(eigen))
                {
                    self.push(
                        at,
                        Eigenparameter,
                        format!("`{eigen}` occurs in an open assumption of the minor deduction"),
                    );
                }
            }
            Rule::AllI { eigen } => {
                for (rel, f) in leaves(0) {
                    let ok = match &f {
                        Formula::Forall(..) => {
                            !f.mentions_param(eigen)
                                && f.instantiate(&Term::Param(eigen.clone())).as_ref() == Some(c(0))
                        }
                        _ => false,
                    };
                    if !ok {
                        let mut leaf = at.0.clone();
                        leaf.extend(rel.0);
                        self.push(
                            &Address(leaf),
                            DischargeShape,
                            format!(
                                "`{}` is not the generalization of `{}` over `{eigen}`",
                                show(&f),
                                show(c(0))
                            ),
                        );
                    }
                }
                for (i, what) in [(0, "specific"), (1, "arbitrary")] {
                    if inf.premises[i]
                        .open_leaves()
                        .iter()
                        .any(|(_, _, f)| f.mentions_param(eigen))
                    {
                        self.push(
                            at,
                            Eigenparameter,
                            format!(
                                "`{eigen}` occurs in an open assumption above the {what} premise"
                            ),
                        );
                    }
                }
            }
            Rule::EqE(pat) | Rule::EqES(pat) => {
                if !pat.is_well_formed() {
                    self.push(
                        at,
                        Pattern,
                        format!(
                            "pattern `{}` is not atomic in `{}`",
                            show(&pat.body),
                            pat.hole
                        ),
                    );
                    return;
                }
                match c(0) {
                    Formula::Eq(t1, t2) => {
                        let (from, to) = if matches!(inf.rule, Rule::EqE(_)) {
                            (t1, t2)
                        } else {
                            (t2, t1)
                        };
                        let premise = pat.apply(from);
                        if &premise != c(1) {
                            self.push(
                                at,
                                Pattern,
                                format!(
                                    "minor premise `{}` is not `{}`",
                                    show(c(1)),
                                    show(&premise)
                                ),
                            );
                        }
                        self.expect_leaves(at, node, 0, &pat.apply(to));
                        if self.opts.strict_eq && t1 == t2 {
                            self.push(at, TrivialEq, format!("both sides are `{t1}`"));
                        }
                    }
                    f => self.push(
                        at,
                        RuleShape,
                        format!("major premise `{}` is not an equation", show(f)),
                    ),
                }
            }
            Rule::EqI => {
                for (rel, f) in leaves(0) {
                    if !matches!(&f, Formula::Eq(l, r) if l == r) {
                        let mut leaf = at.0.clone();
                        leaf.extend(rel.0);
                        self.push(
                            &Address(leaf),
                            DischargeShape,
                            format!("`{}` is not reflexive", show(&f)),
                        );
                    }
                }
            }
            Rule::EqIPrime { pred, lhs, rhs } => {
                self.closed_term(at, lhs);
                self.closed_term(at, rhs);
                let fp = |t: &Term| Formula::PredParam(pred.clone(), vec![t.clone()]);
                for (i, concl, hyp) in [(0, lhs, rhs), (1, rhs, lhs)] {
                    if c(i) != &fp(concl) {
                        self.push(
                            at,
                            RuleShape,
                            format!("premise {i} `{}` is not `{}`", show(c(i)), show(&fp(concl))),
                        );
                    }
                    self.expect_leaves(at, node, i, &fp(hyp));
                    let own = inf.discharges[i];
                    if inf.premises[i]
                        .open_leaves()
                        .iter()
                        .any(|(_, cls, f)| *cls != own && f.mentions_pred(pred))
                    {
                        self.push(
                            at,
                            PredParameter,
                            format!("`%{pred}` occurs in an open assumption above premise {i}"),
                        );
                    }
                }
                self.expect_leaves(at, node, 2, &Formula::eq(lhs.clone(), rhs.clone()));
                if self.opts.strict_eq && lhs == rhs {
                    self.push(at, TrivialEq, format!("both sides are `{lhs}`"));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_deduction, parse_formula};

    fn kinds(src: &str) -> Vec<ViolationKind> {
        let d = parse_deduction(src).unwrap();
        check(&d)
            .unwrap()
            .violations
            .into_iter()
            .map(|v| v.kind)
            .collect()
    }

    #[test]
    fn leaf_is_valid() {
        let d = Deduction::leaf(1, parse_formula("p").unwrap());
        assert!(check(&d).unwrap().is_valid());
    }

    #[test]
    fn derived_and_intro_is_valid() {
        assert!(kinds(r#"(andI (as 2 "p") (as 3 "q") (as 1 "p & q") :dis 1)"#).is_empty());
    }

    #[test]
    fn d_mf_is_valid() {
        let src =
            r#"(andI (as 0 "p") (as 2 "q") (andE (as 1 "p & q") (as 3 "p") :dis 3 4) :dis 1)"#;
        assert!(kinds(src).is_empty());
    }

    #[test]
    fn eigenparameter_in_open_assumption() {
        let src = r#"(allI (as 1 "P(a)") (as 2 "all x. P(x)") :dis 2 :eigen a)"#;
        assert!(kinds(src).contains(&ViolationKind::Eigenparameter));
    }

    #[test]
    fn imp_minor_mismatch() {
        let src = r#"(impE (as 1 "p -> q") (as 2 "r") (as 3 "q") :dis 3)"#;
        assert_eq!(kinds(src), vec![ViolationKind::ImpMinor]);
    }

    #[test]
    fn or_arms_mismatch() {
        let src = r#"(orE (as 1 "p | q") (as 2 "p") (as 3 "q") :dis 2 3)"#;
        assert_eq!(kinds(src), vec![ViolationKind::OrArms]);
    }

    #[test]
    fn nonatomic_bot_and_vacuous_are_cleanable() {
        let d = parse_deduction(r#"(botE (as 1 "_|_") :concl "p & q")"#).unwrap();
        let r = check(&d).unwrap();
        assert_eq!(r.violations[0].kind, ViolationKind::NonatomicBot);
        assert!(r.is_cleanable());
        let v = parse_deduction(r#"(andI (as 1 "p") (as 2 "q") (as 3 "r") :dis 4)"#).unwrap();
        let r = check(&v).unwrap();
        assert!(r.has(ViolationKind::VacuousArbitrary) && r.is_cleanable());
    }

    #[test]
    fn discharge_shape_and_scope() {
        let src = r#"(andI (as 1 "p") (as 2 "q") (as 3 "q & p") :dis 3)"#;
        assert!(kinds(src).contains(&ViolationKind::DischargeShape));
        let src = r#"(andI (as 3 "p & q") (as 2 "q") (as 3 "p & q") :dis 3)"#;
        assert!(kinds(src).contains(&ViolationKind::DischargeScope));
    }

    #[test]
    fn class_shape() {
        let src = r#"(andE (as 1 "p & q") (as 1 "p") :dis 5 6)"#;
        assert!(kinds(src).contains(&ViolationKind::ClassShape));
    }

    #[test]
    fn pred_parameter_condition() {
        let ok = r#"(eqIprime (as 1 "%F(a)") (as 2 "%F(a)") (as 3 "a = a") :dis 1 2 3 :pred F :terms "a" "a")"#;
        assert!(kinds(ok).is_empty());
        let bad = r#"(eqIprime (as 7 "%F(a)") (as 2 "%F(b)") (as 3 "a = b") :dis 1 2 3 :pred F :terms "a" "b")"#;
        assert!(kinds(bad).contains(&ViolationKind::PredParameter));
    }

    #[test]
    fn strict_eq_flags_trivial_equations() {
        let d = parse_deduction(
            r#"(eqE (as 1 "a = a") (as 2 "P(a)") (as 3 "P(a)") :dis 3 :pat "P(x)" x)"#,
        )
        .unwrap();
        assert!(check(&d).unwrap().is_valid());
        let strict = check_with(&d, CheckOptions { strict_eq: true }).unwrap();
        assert!(strict.has(ViolationKind::TrivialEq));
    }

    #[test]
    fn quantifier_rules() {
        let ex = r#"(exE (as 1 "ex x. P(x)") (exI (as 2 "P(a)") (as 3 "ex y. P(y)") :dis 3 :witness "a" :target "ex y. P(y)") :dis 2 :eigen a)"#;
        assert!(!kinds(ex).contains(&ViolationKind::Eigenparameter));
        let all = r#"(allE (as 1 "all x. P(x)") (as 2 "P(f(c))") :dis 2 :witness "f(c)")"#;
        assert!(kinds(all).is_empty());
    }
}
