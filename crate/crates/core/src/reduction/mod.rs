//! Single-step transformations: simplification, ⊥E atomization, detour
//! reductions, permutations and the unique-discharge split.

mod atomize;
mod detour;
mod permute;
mod simplify;
mod unique;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Rank;
use crate::deduction::edit::{rename_param, rename_pred};
use crate::deduction::{freshen, Address, ClassId, Deduction, EditError, Fresh, Rule, RuleTag};
use crate::formula::{Connective, Formula, Name, Term};

pub use atomize::atomize_falsum;
pub use detour::{reduce_detour, reduce_detour_simultaneous};
pub use permute::permute;
pub use simplify::simplify_vacuous;
pub use unique::unique_discharge_transform;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("stale redex site: {0}")]
    Stale(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Edit(#[from] EditError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StepKind {
    Simplify,
    Atomize,
    Detour { connective: Connective },
    DetourSimultaneous { connective: Connective },
    Permute { elim: RuleTag, feeding: RuleTag },
    UniqueDischargeSplit,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Simplify => f.write_str("simplify"),
            StepKind::Atomize => f.write_str("atomize"),
            StepKind::Detour { connective } => write!(f, "detour({connective})"),
            StepKind::DetourSimultaneous { connective } => {
                write!(f, "detour-simultaneous({connective})")
            }
            StepKind::Permute { elim, feeding } => write!(f, "permute({elim}/{feeding})"),
            StepKind::UniqueDischargeSplit => f.write_str("unique-discharge-split"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub sites: Vec<Address>,
    pub before: Rank,
    pub after: Rank,
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sites: Vec<String> = self.sites.iter().map(|a| a.to_string()).collect();
        let at = if sites.is_empty() {
            "root".to_string()
        } else {
            sites.join(",")
        };
        write!(
            f,
            "{} at {} rank {} -> {}",
            self.kind, at, self.before, self.after
        )
    }
}

/// Connective family of an introduction or elimination rule.
pub fn rule_connective(tag: RuleTag) -> Option<Connective> {
    Some(match tag {
        RuleTag::AndI | RuleTag::AndE => Connective::And,
        RuleTag::OrI1 | RuleTag::OrI2 | RuleTag::OrE => Connective::Or,
        RuleTag::ImpI | RuleTag::ImpE => Connective::Imp,
        RuleTag::ExI | RuleTag::ExE => Connective::Exists,
        RuleTag::AllI | RuleTag::AllE => Connective::Forall,
        RuleTag::EqI | RuleTag::EqIPrime | RuleTag::EqE | RuleTag::EqES => Connective::Eq,
        RuleTag::TopI => Connective::Top,
        RuleTag::BotE | RuleTag::Assumption => return None,
    })
}

/// Premises of a usual (one-step-discharge) introduction.
#[derive(Debug, Clone)]
pub enum Grounds {
    And(Deduction, Deduction),
    Or {
        left: bool,
        proof: Deduction,
    },
    /// `body` concludes the consequent from the open class `hyp`.
    Imp {
        body: Deduction,
        hyp: ClassId,
    },
    Ex {
        witness: Term,
        body: Deduction,
    },
    All {
        eigen: Name,
        body: Deduction,
    },
    Top,
    Eq(Term),
    EqPrime {
        pred: Name,
        lhs: Term,
        rhs: Term,
        left: Deduction,
        right: Deduction,
        hyps: (ClassId, ClassId),
    },
}

/// The general introduction rule used as a usual one: concludes `target`
/// by discharging a single fresh major assumption that is the arbitrary premise.
pub fn build_direct_introduction(
    target: &Formula,
    grounds: Grounds,
    fresh: &mut Fresh,
) -> Result<Deduction, ReductionError> {
    let k = fresh.class();
    let leaf = Deduction::leaf(k, target.clone());
    let mismatch = || {
        ReductionError::Precondition(format!(
            "grounds do not introduce `{}`",
            crate::textio::print_formula(target, crate::textio::Style::Pretty)
        ))
    };
    let out = match (target, grounds) {
        (Formula::And(a, b), Grounds::And(l, r))
            if l.conclusion() == &**a && r.conclusion() == &**b =>
        {
            Deduction::apply(Rule::AndI, vec![l, r, leaf], vec![k])
        }
        (Formula::Or(a, b), Grounds::Or { left, proof })
            if proof.conclusion() == if left { &**a } else { &**b } =>
        {
            Deduction::apply(
                if left { Rule::OrI1 } else { Rule::OrI2 },
                vec![proof, leaf],
                vec![k],
            )
        }
        (Formula::Imp(_, b), Grounds::Imp { body, hyp }) if body.conclusion() == &**b => {
            Deduction::apply(Rule::ImpI, vec![body, leaf], vec![hyp, k])
        }
        (Formula::Exists(..), Grounds::Ex { witness, body })
            if target.instantiate(&witness).as_ref() == Some(body.conclusion()) =>
        {
            Deduction::apply(
                Rule::ExI {
                    witness,
                    target: target.clone(),
                },
                vec![body, leaf],
                vec![k],
            )
        }
        (Formula::Forall(..), Grounds::All { eigen, body })
            if target.instantiate(&Term::Param(eigen.clone())).as_ref()
                == Some(body.conclusion()) =>
        {
            Deduction::apply(Rule::AllI { eigen }, vec![body, leaf], vec![k])
        }
        (Formula::Top, Grounds::Top) => Deduction::apply(Rule::TopI, vec![leaf], vec![k]),
        (Formula::Eq(l, r), Grounds::Eq(t)) if *l == t && *r == t => {
            Deduction::apply(Rule::EqI, vec![leaf], vec![k])
        }
        (
            Formula::Eq(l, r),
            Grounds::EqPrime {
                pred,
                lhs,
                rhs,
                left,
                right,
                hyps,
            },
        ) if *l == lhs && *r == rhs => Deduction::apply(
            Rule::EqIPrime { pred, lhs, rhs },
            vec![left, right, leaf],
            vec![hyps.0, hyps.1, k],
        ),
        _ => return Err(mismatch()),
    };
    Ok(out)
}

/// Specific premises and minor-class ids of an introduction, optionally as a
/// fresh copy: internal classes, minor classes, the intro's own eigenparameter
/// and predicate parameter renamed.
pub(crate) struct IntroParts {
    pub rule: Rule,
    pub specific: Vec<Deduction>,
    /// Discharge ids in rule positions; the major position is left as-is.
    pub discharges: Vec<ClassId>,
}

pub(crate) fn intro_parts(intro: &Deduction, fresh: &mut Fresh, copy: bool) -> IntroParts {
    let inf = intro.inference().expect("introduction node");
    let tag = inf.rule.tag();
    let side = tag.side_children();
    let mut specific: Vec<Deduction> = side.iter().map(|&i| inf.premises[i].clone()).collect();
    let mut rule = inf.rule.clone();
    let mut discharges = inf.discharges.clone();
    if !copy {
        return IntroParts {
            rule,
            specific,
            discharges,
        };
    }
    specific = specific.iter().map(|s| freshen(s, fresh)).collect();
    let major = tag.major_discharge();
    for (pos, child) in tag.discharge_children().iter().enumerate() {
        if Some(pos) == major {
            continue;
        }
        let old = discharges[pos];
        let new = fresh.class();
        discharges[pos] = new;
        if let Some(slot) = side.iter().position(|s| s == child) {
            specific[slot] = rename_class(&specific[slot], old, new);
        }
    }
    match &mut rule {
        Rule::AllI { eigen } => {
            let new = fresh.param();
            specific = specific
                .iter()
                .map(|s| rename_param(s, eigen, &new))
                .collect();
            *eigen = new;
        }
        Rule::EqIPrime { pred, .. } => {
            let new = fresh.pred();
            specific = specific
                .iter()
                .map(|s| rename_pred(s, pred, &new))
                .collect();
            *pred = new;
        }
        _ => {}
    }
    IntroParts {
        rule,
        specific,
        discharges,
    }
}

/// Renames leaves of one class.
pub(crate) fn rename_class(d: &Deduction, old: ClassId, new: ClassId) -> Deduction {
    match d {
        Deduction::Assumption { class, formula } if *class == old => {
            Deduction::leaf(new, formula.clone())
        }
        Deduction::Assumption { .. } => d.clone(),
        Deduction::Apply(inf) => Deduction::apply(
            inf.rule.clone(),
            inf.premises
                .iter()
                .map(|c| rename_class(c, old, new))
                .collect(),
            inf.discharges
                .iter()
                .map(|&c| if c == old { new } else { c })
                .collect(),
        ),
    }
}

/// A usual introduction of `target` built from the parts of a general one.
pub(crate) fn direct_from_parts(
    target: &Formula,
    parts: IntroParts,
    fresh: &mut Fresh,
) -> Result<Deduction, ReductionError> {
    let mut spec = parts.specific.into_iter();
    let grounds = match parts.rule {
        Rule::AndI => Grounds::And(spec.next().unwrap(), spec.next().unwrap()),
        Rule::OrI1 => Grounds::Or {
            left: true,
            proof: spec.next().unwrap(),
        },
        Rule::OrI2 => Grounds::Or {
            left: false,
            proof: spec.next().unwrap(),
        },
        Rule::ImpI => Grounds::Imp {
            body: spec.next().unwrap(),
            hyp: parts.discharges[0],
        },
        Rule::ExI { witness, .. } => Grounds::Ex {
            witness,
            body: spec.next().unwrap(),
        },
        Rule::AllI { eigen } => Grounds::All {
            eigen,
            body: spec.next().unwrap(),
        },
        Rule::TopI => Grounds::Top,
        Rule::EqI => match target {
            Formula::Eq(t, _) => Grounds::Eq(t.clone()),
            _ => {
                return Err(ReductionError::Precondition(
                    "reflexivity target is not an equation".into(),
                ))
            }
        },
        Rule::EqIPrime { pred, lhs, rhs } => Grounds::EqPrime {
            pred,
            lhs,
            rhs,
            left: spec.next().unwrap(),
            right: spec.next().unwrap(),
            hyps: (parts.discharges[0], parts.discharges[1]),
        },
        other => {
            return Err(ReductionError::Precondition(format!(
                "`{}` is not an introduction",
                other.tag()
            )))
        }
    };
    build_direct_introduction(target, grounds, fresh)
}

pub(crate) fn node_at<'a>(
    d: &'a Deduction,
    addr: &Address,
) -> Result<&'a Deduction, ReductionError> {
    d.get(addr)
        .ok_or_else(|| ReductionError::Stale(format!("no node at {addr}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::check;
    use crate::textio::{parse_deduction, parse_formula};

    #[test]
    fn direct_and_intro() {
        let l = Deduction::leaf(1, parse_formula("p").unwrap());
        let r = Deduction::leaf(2, parse_formula("q").unwrap());
        let mut fresh = Fresh::new([&l, &r]);
        let d = build_direct_introduction(
            &parse_formula("p & q").unwrap(),
            Grounds::And(l, r),
            &mut fresh,
        )
        .unwrap();
        assert!(check(&d).unwrap().is_valid());
        assert_eq!(d.conclusion(), &parse_formula("p & q").unwrap());
        assert_eq!(d.discharged_leaves(0).len(), 1);
    }

    #[test]
    fn direct_or_and_imp() {
        let p = Deduction::leaf(1, parse_formula("p").unwrap());
        let mut fresh = Fresh::new([&p]);
        let or = build_direct_introduction(
            &parse_formula("p | q").unwrap(),
            Grounds::Or {
                left: true,
                proof: p.clone(),
            },
            &mut fresh,
        )
        .unwrap();
        assert!(check(&or).unwrap().is_valid());
        let body = parse_deduction(r#"(andE (as 1 "q & p") (as 2 "p") :dis 3 2)"#).unwrap();
        fresh.reserve(&body);
        let imp = build_direct_introduction(
            &parse_formula("q & p -> p").unwrap(),
            Grounds::Imp { body, hyp: 1 },
            &mut fresh,
        )
        .unwrap();
        let report = check(&imp).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
        assert!(imp.sequent().is_closed());
        assert!(build_direct_introduction(
            &parse_formula("p & q").unwrap(),
            Grounds::Top,
            &mut fresh
        )
        .is_err());
    }

    #[test]
    fn step_display() {
        let s = ReductionStep {
            kind: StepKind::Detour {
                connective: Connective::And,
            },
            sites: vec![Address(vec![0, 2])],
            before: Rank { d: 2, l: 1 },
            after: Rank { d: 1, l: 3 },
        };
        assert_eq!(s.to_string(), "detour(and) at 0.2 rank 2,1 -> 1,3");
    }
}
