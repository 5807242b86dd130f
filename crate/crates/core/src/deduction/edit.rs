use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{ClassId, Deduction, Inference, Rule, StructureError};
use crate::formula::{Formula, Name, SubstError, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("`{0}` is an eigenparameter inside the deduction")]
    EigenClash(String),
    #[error("term `{0}` is not closed")]
    OpenTerm(String),
    #[error(transparent)]
    Subst(#[from] SubstError),
    #[error("class {class} holds `{found}` but the grafted deduction concludes `{expected}`")]
    ShapeMismatch {
        class: ClassId,
        expected: String,
        found: String,
    },
    #[error("class {0} is discharged inside the target deduction")]
    ClassDischarged(ClassId),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Supply of class ids, eigenparameters and predicate parameters unused by
/// the trees it was created from.
#[derive(Debug, Clone)]
pub struct Fresh {
    next_class: ClassId,
    params: BTreeSet<Name>,
    preds: BTreeSet<Name>,
    counter: usize,
}

impl Fresh {
    pub fn new<'a>(trees: impl IntoIterator<Item = &'a Deduction>) -> Fresh {
        let mut fresh = Fresh {
            next_class: 1,
            params: BTreeSet::new(),
            preds: BTreeSet::new(),
            counter: 0,
        };
        for d in trees {
            fresh.reserve(d);
        }
        fresh
    }

    pub fn reserve(&mut self, d: &Deduction) {
        if let Some(&max) = d.class_ids().iter().next_back() {
            self.next_class = self.next_class.max(max + 1);
        }
        self.params.extend(d.params());
        self.preds.extend(d.preds());
    }

    pub fn reserve_formula(&mut self, f: &Formula) {
        self.params.extend(f.params());
        f.collect_preds(&mut self.preds);
    }

    pub fn class(&mut self) -> ClassId {
        let c = self.next_class;
        self.next_class += 1;
        c
    }

    pub fn param(&mut self) -> Name {
        loop {
            self.counter += 1;
            let name = format!("e{}", self.counter);
            if self.params.insert(name.clone()) {
                return name;
            }
        }
    }

    pub fn pred(&mut self) -> Name {
        loop {
            self.counter += 1;
            let name = format!("F{}", self.counter);
            if self.preds.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn rename_classes(d: &Deduction, map: &BTreeMap<ClassId, ClassId>) -> Deduction {
    let r = |c: &ClassId| *map.get(c).unwrap_or(c);
    match d {
        Deduction::Assumption { class, formula } => Deduction::Assumption {
            class: r(class),
            formula: formula.clone(),
        },
        Deduction::Apply(inf) => Deduction::Apply(Box::new(Inference {
            rule: inf.rule.clone(),
            premises: inf
                .premises
                .iter()
                .map(|c| rename_classes(c, map))
                .collect(),
            discharges: inf.discharges.iter().map(r).collect(),
        })),
    }
}

pub(crate) fn rename_param(d: &Deduction, from: &str, to: &str) -> Deduction {
    let t = Term::Param(to.to_string());
    match d {
        Deduction::Assumption { class, formula } => Deduction::Assumption {
            class: *class,
            formula: formula.replace_param(from, &t),
        },
        Deduction::Apply(inf) => {
            let mut rule = inf
                .rule
                .map_formulas(&mut |f| f.replace_param(from, &t), &mut |s| {
                    s.replace_param(from, &t)
                });
            match &mut rule {
                Rule::ExE { eigen } | Rule::AllI { eigen } if eigen == from => {
                    *eigen = to.to_string()
                }
                _ => {}
            }
            Deduction::Apply(Box::new(Inference {
                rule,
                premises: inf
                    .premises
                    .iter()
                    .map(|c| rename_param(c, from, to))
                    .collect(),
                discharges: inf.discharges.clone(),
            }))
        }
    }
}

fn rename_pred_formula(f: &Formula, from: &str, to: &str) -> Formula {
    match f {
        Formula::PredParam(p, args) if p == from => {
            Formula::PredParam(to.to_string(), args.clone())
        }
        Formula::And(l, r) => Formula::and(
            rename_pred_formula(l, from, to),
            rename_pred_formula(r, from, to),
        ),
        Formula::Or(l, r) => Formula::or(
            rename_pred_formula(l, from, to),
            rename_pred_formula(r, from, to),
        ),
        Formula::Imp(l, r) => Formula::imp(
            rename_pred_formula(l, from, to),
            rename_pred_formula(r, from, to),
        ),
        Formula::Forall(x, b) => {
            Formula::Forall(x.clone(), Box::new(rename_pred_formula(b, from, to)))
        }
        Formula::Exists(x, b) => {
            Formula::Exists(x.clone(), Box::new(rename_pred_formula(b, from, to)))
        }
        other => other.clone(),
    }
}

pub(crate) fn rename_pred(d: &Deduction, from: &str, to: &str) -> Deduction {
    match d {
        Deduction::Assumption { class, formula } => Deduction::Assumption {
            class: *class,
            formula: rename_pred_formula(formula, from, to),
        },
        Deduction::Apply(inf) => {
            let mut rule = inf
                .rule
                .map_formulas(&mut |f| rename_pred_formula(f, from, to), &mut |s| {
                    s.clone()
                });
            if let Rule::EqIPrime { pred, .. } = &mut rule {
                if pred == from {
                    *pred = to.to_string();
                }
            }
            Deduction::Apply(Box::new(Inference {
                rule,
                premises: inf
                    .premises
                    .iter()
                    .map(|c| rename_pred(c, from, to))
                    .collect(),
                discharges: inf.discharges.clone(),
            }))
        }
    }
}

/// A copy of `d` whose internally discharged classes, eigenparameters and
/// =I′ predicate parameters are fresh. Open classes keep their ids.
pub fn freshen(d: &Deduction, fresh: &mut Fresh) -> Deduction {
    let mut map = BTreeMap::new();
    d.visit(&mut |_, n| {
        for &c in n.discharges() {
            map.entry(c).or_insert_with(|| fresh.class());
        }
    });
    let mut out = rename_classes(d, &map);
    for e in d.eigens() {
        let new = fresh.param();
        out = rename_param(&out, &e, &new);
    }
    for p in d.pred_eigens() {
        let new = fresh.pred();
        out = rename_pred(&out, &p, &new);
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraftOptions {
    /// Use `sub` itself (not a freshened copy) for the first leaf.
    pub reuse_first: bool,
}

/// Replaces every leaf of the open class `class` in `d` by a copy of `sub`.
pub fn graft(
    d: &Deduction,
    class: ClassId,
    sub: &Deduction,
    fresh: &mut Fresh,
    opts: GraftOptions,
) -> Result<Deduction, EditError> {
    let mut discharged = false;
    d.visit(&mut |_, n| discharged |= n.discharges().contains(&class));
    if discharged {
        return Err(EditError::ClassDischarged(class));
    }
    let expected = sub.conclusion();
    let mut first = opts.reuse_first;
    graft_into(d, class, sub, expected, fresh, &mut first)
}

fn graft_into(
    d: &Deduction,
    class: ClassId,
    sub: &Deduction,
    expected: &Formula,
    fresh: &mut Fresh,
    first: &mut bool,
) -> Result<Deduction, EditError> {
    match d {
        Deduction::Assumption { class: c, formula } if *c == class => {
            if formula != expected {
                let show =
                    |f: &Formula| crate::textio::print_formula(f, crate::textio::Style::Pretty);
                return Err(EditError::ShapeMismatch {
                    class,
                    expected: show(expected),
                    found: show(formula),
                });
            }
            if std::mem::take(first) {
                Ok(sub.clone())
            } else {
                Ok(freshen(sub, fresh))
            }
        }
        Deduction::Assumption { .. } => Ok(d.clone()),
        Deduction::Apply(inf) => {
            let premises = inf
                .premises
                .iter()
                .map(|c| graft_into(c, class, sub, expected, fresh, first))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Deduction::Apply(Box::new(Inference {
                rule: inf.rule.clone(),
                premises,
                discharges: inf.discharges.clone(),
            })))
        }
    }
}

/// Canonical dense renumbering of class ids, in pre-order of first occurrence.
pub fn relabel_fresh(d: &Deduction) -> Deduction {
    let mut map = BTreeMap::new();
    let mut next = 1;
    d.visit(&mut |_, n| {
        let ids: Vec<ClassId> = match n {
            Deduction::Assumption { class, .. } => vec![*class],
            Deduction::Apply(inf) => inf.discharges.clone(),
        };
        for c in ids {
            map.entry(c).or_insert_with(|| {
                next += 1;
                next - 1
            });
        }
    });
    rename_classes(d, &map)
}
