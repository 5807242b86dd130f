//! Terms, formulas, substitution, degree and the subformula relation.
//!
//! Parameters (`a`..`t`) play the role of free variables; bound variables
//! (`u`..`z`) only ever occur under a binder. A formula whose binder bodies
//! mention their variable is stored with [`Term::Var`] at those positions,
//! so bodies are pseudo-formulas and everything else is closed.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Identifier used for parameters, variables, constants, predicates and functions.
pub type Name = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Free parameter (`a`, `b`, ..., `e3`).
    Param(Name),
    /// Reference to an enclosing binder's variable.
    Var(Name),
    /// Constant symbol.
    Const(Name),
    /// Function application `f(t1, ..., tn)`.
    App(Name, Vec<Term>),
}

impl Term {
    pub fn param(name: &str) -> Term {
        Term::Param(name.to_string())
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    pub fn mentions_param(&self, a: &str) -> bool {
        match self {
            Term::Param(p) => p == a,
            Term::Var(_) | Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|t| t.mentions_param(a)),
        }
    }

    pub fn contains_subterm(&self, t: &Term) -> bool {
        self == t
            || match self {
                Term::App(_, args) => args.iter().any(|s| s.contains_subterm(t)),
                _ => false,
            }
    }

    pub fn collect_params(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Param(p) => {
                out.insert(p.clone());
            }
            Term::Var(_) | Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|t| t.collect_params(out)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Param(_) | Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Param(_) | Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(Term::has_vars),
        }
    }

    fn replace_var(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(v) if v == x => t.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|s| s.replace_var(x, t)).collect(),
            ),
            other => other.clone(),
        }
    }

    pub fn replace_param(&self, a: &str, t: &Term) -> Term {
        match self {
            Term::Param(p) if p == a => t.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|s| s.replace_param(a, t)).collect(),
            ),
            other => other.clone(),
        }
    }

    fn abstract_param(&self, a: &str, x: &str) -> Term {
        match self {
            Term::Param(p) if p == a => Term::Var(x.to_string()),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|s| s.abstract_param(a, x)).collect(),
            ),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Param(n) | Term::Var(n) | Term::Const(n) => f.write_str(n),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A formula of the first-order language with equality.
///
/// Equality of formulas is alpha-equivalence: `all x. P(x)` equals
/// `all y. P(y)`.
#[derive(Debug, Clone, Eq)]
pub enum Formula {
    Atom(Name, Vec<Term>),
    /// Predicate parameter atom `%F(t)`.
    PredParam(Name, Vec<Term>),
    Bottom,
    Top,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(Name, Box<Formula>),
    Exists(Name, Box<Formula>),
    Eq(Term, Term),
}

/// Connective families; each with an introduction rule.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum Connective {
    And,
    Or,
    Imp,
    Exists,
    Forall,
    Eq,
    Top,
}

impl Connective {
    pub fn as_str(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Imp => "imp",
            Connective::Exists => "ex",
            Connective::Forall => "all",
            Connective::Eq => "eq",
            Connective::Top => "top",
        }
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("substituting for `{var}` would capture variable `{captured}`")]
    Capture { var: Name, captured: Name },
    #[error("predicate parameter `{pred}` used with {found} arguments, pattern expects 1")]
    PredArity { pred: Name, found: usize },
}

impl Formula {
    pub fn atom(name: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(name.to_string(), args)
    }

    pub fn prop(name: &str) -> Formula {
        Formula::Atom(name.to_string(), Vec::new())
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(body))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(body))
    }

    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    /// Number of connective nodes; `⊥`, `⊤` and `=` count as connectives.
    pub fn degree(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::PredParam(..) => 0,
            Formula::Bottom | Formula::Top | Formula::Eq(..) => 1,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                1 + l.degree() + r.degree()
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => 1 + b.degree(),
        }
    }

    /// Atomic formulas in the sense of the `⊥E` restriction: no connective at all.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::PredParam(..))
    }

    pub fn connective(&self) -> Option<Connective> {
        Some(match self {
            Formula::And(..) => Connective::And,
            Formula::Or(..) => Connective::Or,
            Formula::Imp(..) => Connective::Imp,
            Formula::Exists(..) => Connective::Exists,
            Formula::Forall(..) => Connective::Forall,
            Formula::Eq(..) => Connective::Eq,
            Formula::Top => Connective::Top,
            _ => return None,
        })
    }

    /// Immediate subformulas. Binder bodies are returned as pseudo-formulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => vec![l, r],
            Formula::Forall(_, b) | Formula::Exists(_, b) => vec![b],
            _ => Vec::new(),
        }
    }

    /// `A^x_t` for a binder body `A`: replaces every free occurrence of `x`.
    pub fn substitute_var(&self, x: &str, t: &Term) -> Result<Formula, SubstError> {
        let mut tvars = BTreeSet::new();
        t.collect_vars(&mut tvars);
        self.subst_var_inner(x, t, &tvars, &mut Vec::new())
    }

    fn subst_var_inner(
        &self,
        x: &str,
        t: &Term,
        tvars: &BTreeSet<Name>,
        binders: &mut Vec<Name>,
    ) -> Result<Formula, SubstError> {
        let terms = |args: &[Term], binders: &[Name]| -> Result<Vec<Term>, SubstError> {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                let mut vs = BTreeSet::new();
                a.collect_vars(&mut vs);
                if vs.contains(x) {
                    if let Some(c) = binders.iter().find(|b| tvars.contains(*b)) {
                        return Err(SubstError::Capture {
                            var: x.to_string(),
                            captured: c.clone(),
                        });
                    }
                }
                out.push(a.replace_var(x, t));
            }
            Ok(out)
        };
        Ok(match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), terms(args, binders)?),
            Formula::PredParam(p, args) => Formula::PredParam(p.clone(), terms(args, binders)?),
            Formula::Eq(l, r) => {
                let v = terms(&[l.clone(), r.clone()], binders)?;
                let mut it = v.into_iter();
                Formula::Eq(it.next().unwrap(), it.next().unwrap())
            }
            Formula::Bottom => Formula::Bottom,
            Formula::Top => Formula::Top,
            Formula::And(l, r) => Formula::and(
                l.subst_var_inner(x, t, tvars, binders)?,
                r.subst_var_inner(x, t, tvars, binders)?,
            ),
            Formula::Or(l, r) => Formula::or(
                l.subst_var_inner(x, t, tvars, binders)?,
                r.subst_var_inner(x, t, tvars, binders)?,
            ),
            Formula::Imp(l, r) => Formula::imp(
                l.subst_var_inner(x, t, tvars, binders)?,
                r.subst_var_inner(x, t, tvars, binders)?,
            ),
            Formula::Forall(y, b) | Formula::Exists(y, b) => {
                let body = if y == x {
                    (**b).clone()
                } else {
                    binders.push(y.clone());
                    let r = b.subst_var_inner(x, t, tvars, binders);
                    binders.pop();
                    r?
                };
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(y.clone(), Box::new(body))
                } else {
                    Formula::Exists(y.clone(), Box::new(body))
                }
            }
        })
    }

    /// Instance of a quantified formula's body: `∀x.A` or `∃x.A` to `A^x_t`.
    pub fn instantiate(&self, t: &Term) -> Option<Formula> {
        match self {
            Formula::Forall(x, b) | Formula::Exists(x, b) => b.substitute_var(x, t).ok(),
            _ => None,
        }
    }

    fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(f).collect()),
            Formula::PredParam(p, args) => {
                Formula::PredParam(p.clone(), args.iter().map(f).collect())
            }
            Formula::Eq(l, r) => Formula::Eq(f(l), f(r)),
            Formula::Bottom => Formula::Bottom,
            Formula::Top => Formula::Top,
            Formula::And(l, r) => Formula::and(l.map_terms(f), r.map_terms(f)),
            Formula::Or(l, r) => Formula::or(l.map_terms(f), r.map_terms(f)),
            Formula::Imp(l, r) => Formula::imp(l.map_terms(f), r.map_terms(f)),
            Formula::Forall(x, b) => Formula::Forall(x.clone(), Box::new(b.map_terms(f))),
            Formula::Exists(x, b) => Formula::Exists(x.clone(), Box::new(b.map_terms(f))),
        }
    }

    /// Replaces the parameter `a` by the closed term `t` everywhere.
    pub fn replace_param(&self, a: &str, t: &Term) -> Formula {
        self.map_terms(&|s| s.replace_param(a, t))
    }

    /// `∀x.A[a:=x]` style abstraction: replaces `a` by `Var(x)`.
    pub fn abstract_param(&self, a: &str, x: &str) -> Formula {
        self.map_terms(&|s| s.abstract_param(a, x))
    }

    /// Replaces every `%F(t)` by the pattern instantiated at `t`.
    pub fn replace_pred_param(&self, pred: &str, pat: &PredPattern) -> Result<Formula, SubstError> {
        Ok(match self {
            Formula::PredParam(p, args) if p == pred => {
                if args.len() != 1 {
                    return Err(SubstError::PredArity {
                        pred: pred.to_string(),
                        found: args.len(),
                    });
                }
                pat.apply(&args[0])
            }
            Formula::Atom(..)
            | Formula::PredParam(..)
            | Formula::Eq(..)
            | Formula::Bottom
            | Formula::Top => self.clone(),
            Formula::And(l, r) => Formula::and(
                l.replace_pred_param(pred, pat)?,
                r.replace_pred_param(pred, pat)?,
            ),
            Formula::Or(l, r) => Formula::or(
                l.replace_pred_param(pred, pat)?,
                r.replace_pred_param(pred, pat)?,
            ),
            Formula::Imp(l, r) => Formula::imp(
                l.replace_pred_param(pred, pat)?,
                r.replace_pred_param(pred, pat)?,
            ),
            Formula::Forall(x, b) => {
                Formula::Forall(x.clone(), Box::new(b.replace_pred_param(pred, pat)?))
            }
            Formula::Exists(x, b) => {
                Formula::Exists(x.clone(), Box::new(b.replace_pred_param(pred, pat)?))
            }
        })
    }

    fn for_each_term(&self, f: &mut dyn FnMut(&Term)) {
        match self {
            Formula::Atom(_, args) | Formula::PredParam(_, args) => args.iter().for_each(&mut *f),
            Formula::Eq(l, r) => {
                f(l);
                f(r);
            }
            Formula::Bottom | Formula::Top => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.for_each_term(f);
                r.for_each_term(f);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.for_each_term(f),
        }
    }

    pub fn mentions_param(&self, a: &str) -> bool {
        let mut found = false;
        self.for_each_term(&mut |t| found |= t.mentions_param(a));
        found
    }

    pub fn collect_params(&self, out: &mut BTreeSet<Name>) {
        self.for_each_term(&mut |t| t.collect_params(out));
    }

    pub fn params(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    pub fn mentions_pred(&self, pred: &str) -> bool {
        match self {
            Formula::PredParam(p, _) => p == pred,
            Formula::Atom(..) | Formula::Eq(..) | Formula::Bottom | Formula::Top => false,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.mentions_pred(pred) || r.mentions_pred(pred)
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.mentions_pred(pred),
        }
    }

    pub fn collect_preds(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::PredParam(p, _) => {
                out.insert(p.clone());
            }
            Formula::Atom(..) | Formula::Eq(..) | Formula::Bottom | Formula::Top => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.collect_preds(out);
                r.collect_preds(out);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.collect_preds(out),
        }
    }

    /// Variables occurring free (i.e. not under their own binder).
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_vars_inner(&mut Vec::new(), &mut out);
        out
    }

    fn free_vars_inner(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                bound.push(x.clone());
                b.free_vars_inner(bound, out);
                bound.pop();
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.free_vars_inner(bound, out);
                r.free_vars_inner(bound, out);
            }
            _ => {
                let mut vs = BTreeSet::new();
                self.for_each_term(&mut |t| t.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// A bound-variable name not used anywhere in this formula.
    pub fn fresh_var(&self) -> Name {
        let mut used = BTreeSet::new();
        self.collect_var_names(&mut used);
        ["x", "y", "z", "u", "v", "w"]
            .iter()
            .map(|s| s.to_string())
            .chain((1..).map(|i| format!("x{i}")))
            .find(|v| !used.contains(v))
            .unwrap()
    }

    fn collect_var_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                out.insert(x.clone());
                b.collect_var_names(out);
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.collect_var_names(out);
                r.collect_var_names(out);
            }
            _ => self.for_each_term(&mut |t| t.collect_vars(out)),
        }
    }

    fn alpha_eq(&self, other: &Formula, env: &mut Vec<(Name, Name)>) -> bool {
        match (self, other) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys))
            | (Formula::PredParam(p, xs), Formula::PredParam(q, ys)) => {
                p == q
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(s, t)| term_alpha_eq(s, t, env))
            }
            (Formula::Eq(a, b), Formula::Eq(c, d)) => {
                term_alpha_eq(a, c, env) && term_alpha_eq(b, d, env)
            }
            (Formula::Bottom, Formula::Bottom) | (Formula::Top, Formula::Top) => true,
            (Formula::And(a, b), Formula::And(c, d))
            | (Formula::Or(a, b), Formula::Or(c, d))
            | (Formula::Imp(a, b), Formula::Imp(c, d)) => a.alpha_eq(c, env) && b.alpha_eq(d, env),
            (Formula::Forall(x, a), Formula::Forall(y, b))
            | (Formula::Exists(x, a), Formula::Exists(y, b)) => {
                env.push((x.clone(), y.clone()));
                let r = a.alpha_eq(b, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
}

fn term_alpha_eq(s: &Term, t: &Term, env: &[(Name, Name)]) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => {
            match (
                env.iter().rposition(|(a, _)| a == x),
                env.iter().rposition(|(_, b)| b == y),
            ) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Param(a), Term::Param(b)) | (Term::Const(a), Term::Const(b)) => a == b,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(a, b)| term_alpha_eq(a, b, env))
        }
        _ => false,
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        self.alpha_eq(other, &mut Vec::new())
    }
}

/// An atomic pseudo-formula with a distinguished hole variable, used by the
/// equality rules: `P^x_t` is [`PredPattern::apply`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredPattern {
    pub body: Formula,
    pub hole: Name,
}

impl PredPattern {
    pub fn new(body: Formula, hole: &str) -> PredPattern {
        PredPattern {
            body,
            hole: hole.to_string(),
        }
    }

    pub fn is_well_formed(&self) -> bool {
        self.body.is_atomic() && self.body.free_vars().iter().all(|v| *v == self.hole)
    }

    pub fn apply(&self, t: &Term) -> Formula {
        // Atomic bodies have no binders, so substitution cannot capture.
        self.body
            .substitute_var(&self.hole, t)
            .expect("atomic pattern substitution")
    }

    pub fn replace_param(&self, a: &str, t: &Term) -> PredPattern {
        PredPattern {
            body: self.body.replace_param(a, t),
            hole: self.hole.clone(),
        }
    }
}

/// `a` is a subformula of `b`, counting every instance `B^x_t` of a
/// quantified `∀x.B` / `∃x.B` among its subformulas.
pub fn is_subformula(a: &Formula, b: &Formula) -> bool {
    let mut holes = Vec::new();
    sub_search(a, b, &mut holes, false)
}

/// [`is_subformula`] extended to equations: an atomic formula counts as a
/// subformula of `t1 = t2` when it is a Leibniz instance `P^x_{t1}` or
/// `P^x_{t2}` with the hole actually occurring in `P`, i.e. when it has
/// `t1` or `t2` as a subterm.
pub fn is_subformula_leibniz(a: &Formula, b: &Formula) -> bool {
    let mut holes = Vec::new();
    sub_search(a, b, &mut holes, true)
}

type Holes = Vec<(Name, Option<Term>)>;

fn sub_search(a: &Formula, b: &Formula, holes: &mut Holes, leibniz: bool) -> bool {
    let snapshot = holes.clone();
    let mut env = Vec::new();
    if match_pattern(a, b, holes, &mut env) {
        return true;
    }
    *holes = snapshot;
    if leibniz {
        if let (Formula::Eq(l, r), true) = (b, a.is_atomic() || matches!(a, Formula::Eq(..))) {
            for side in [l, r] {
                let mut subterms = Vec::new();
                a.for_each_term(&mut |t| collect_subterms(t, &mut subterms));
                for s in subterms {
                    let mut trial = holes.clone();
                    if match_term(&s, side, &mut trial, &[]) {
                        return true;
                    }
                }
            }
        }
    }
    match b {
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
            sub_search(a, l, holes, leibniz) || sub_search(a, r, holes, leibniz)
        }
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            holes.push((x.clone(), None));
            let r = sub_search(a, body, holes, leibniz);
            holes.pop();
            r
        }
        _ => false,
    }
}

fn collect_subterms(t: &Term, out: &mut Vec<Term>) {
    out.push(t.clone());
    if let Term::App(_, args) = t {
        args.iter().for_each(|s| collect_subterms(s, out));
    }
}

/// Matches formula `a` against pseudo-formula `b` whose free variables listed
/// in `holes` act as wildcards, each standing for a single closed term.
/// `env` pairs binders of `a` with binders of `b` entered in lockstep.
fn match_pattern(a: &Formula, b: &Formula, holes: &mut Holes, env: &mut Vec<(Name, Name)>) -> bool {
    match (a, b) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys))
        | (Formula::PredParam(p, xs), Formula::PredParam(q, ys)) => {
            p == q
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(s, t)| match_term(s, t, holes, env))
        }
        (Formula::Eq(s1, s2), Formula::Eq(t1, t2)) => {
            match_term(s1, t1, holes, env) && match_term(s2, t2, holes, env)
        }
        (Formula::Bottom, Formula::Bottom) | (Formula::Top, Formula::Top) => true,
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => {
            match_pattern(a1, b1, holes, env) && match_pattern(a2, b2, holes, env)
        }
        (Formula::Forall(x, a1), Formula::Forall(y, b1))
        | (Formula::Exists(x, a1), Formula::Exists(y, b1)) => {
            env.push((x.clone(), y.clone()));
            let r = match_pattern(a1, b1, holes, env);
            env.pop();
            r
        }
        _ => false,
    }
}

fn match_term(s: &Term, t: &Term, holes: &mut Holes, env: &[(Name, Name)]) -> bool {
    if let Term::Var(y) = t {
        // Innermost binding wins: lockstep binders shadow holes.
        if let Some(j) = env.iter().rposition(|(_, b)| b == y) {
            return matches!(s, Term::Var(x) if env.iter().rposition(|(a, _)| a == x) == Some(j));
        }
        if let Some(h) = holes.iter().rposition(|(n, _)| n == y) {
            // The instance term must not mention variables bound inside `a`.
            let mut vs = BTreeSet::new();
            s.collect_vars(&mut vs);
            if !vs.is_empty() {
                return false;
            }
            return match &holes[h].1 {
                Some(bound) => bound == s,
                None => {
                    holes[h].1 = Some(s.clone());
                    true
                }
            };
        }
        return matches!(s, Term::Var(x) if x == y && env.iter().all(|(a, _)| a != x));
    }
    match (s, t) {
        (Term::Param(a), Term::Param(b)) | (Term::Const(a), Term::Const(b)) => a == b,
        (Term::Var(_), _) => false,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(a, b)| match_term(a, b, holes, env))
        }
        _ => false,
    }
}

/// Canonical key for alpha-equivalence classes (binder names erased).
pub fn alpha_key(f: &Formula) -> String {
    fn go(f: &Formula, env: &mut Vec<Name>, out: &mut String) {
        let term = |t: &Term, env: &Vec<Name>, out: &mut String| out.push_str(&term_key(t, env));
        match f {
            Formula::Atom(p, args) | Formula::PredParam(p, args) => {
                if matches!(f, Formula::PredParam(..)) {
                    out.push('%');
                }
                out.push_str(p);
                out.push('(');
                for a in args {
                    term(a, env, out);
                    out.push(',');
                }
                out.push(')');
            }
            Formula::Eq(l, r) => {
                out.push_str("=(");
                term(l, env, out);
                out.push(',');
                term(r, env, out);
                out.push(')');
            }
            Formula::Bottom => out.push('⊥'),
            Formula::Top => out.push('⊤'),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                out.push(match f {
                    Formula::And(..) => '&',
                    Formula::Or(..) => '|',
                    _ => '>',
                });
                out.push('(');
                go(l, env, out);
                out.push(',');
                go(r, env, out);
                out.push(')');
            }
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                out.push(if matches!(f, Formula::Forall(..)) {
                    'A'
                } else {
                    'E'
                });
                env.push(x.clone());
                out.push('(');
                go(b, env, out);
                out.push(')');
                env.pop();
            }
        }
    }
    fn term_key(t: &Term, env: &Vec<Name>) -> String {
        match t {
            Term::Var(x) => match env.iter().rposition(|v| v == x) {
                Some(i) => format!("#{}", env.len() - i),
                None => format!("?{x}"),
            },
            Term::Param(p) => p.clone(),
            Term::Const(c) => format!("'{c}"),
            Term::App(g, args) => {
                let inner: Vec<String> = args.iter().map(|a| term_key(a, env)).collect();
                format!("{g}({})", inner.join(","))
            }
        }
    }
    let mut out = String::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// Map from formula (up to alpha-equivalence) to something.
pub type FormulaMap<V> = HashMap<String, (Formula, V)>;

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::prop("p")
    }
    fn q() -> Formula {
        Formula::prop("q")
    }
    fn pa(t: Term) -> Formula {
        Formula::atom("P", vec![t])
    }

    #[test]
    fn degree_examples() {
        assert_eq!(p().degree(), 0);
        assert_eq!(Formula::Bottom.degree(), 1);
        assert_eq!(
            Formula::imp(Formula::and(p(), q()), Formula::Bottom).degree(),
            3
        );
        assert!(Formula::Top.degree() > 0);
        assert!(Formula::eq(Term::param("a"), Term::param("b")).degree() > 0);
    }

    #[test]
    fn substitution_examples() {
        let a = Term::param("a");
        assert_eq!(
            pa(Term::var("x")).substitute_var("x", &a).unwrap(),
            pa(a.clone())
        );

        let body = Formula::forall(
            "y",
            Formula::atom("Q", vec![Term::var("x"), Term::var("y")]),
        );
        let fa = Term::app("f", vec![a.clone()]);
        assert_eq!(
            body.substitute_var("x", &fa).unwrap(),
            Formula::forall("y", Formula::atom("Q", vec![fa.clone(), Term::var("y")]))
        );

        let both = Formula::and(pa(Term::var("x")), pa(Term::var("x")));
        assert_eq!(
            both.substitute_var("x", &a).unwrap(),
            Formula::and(pa(a.clone()), pa(a))
        );
    }

    #[test]
    fn substitution_detects_capture() {
        let body = Formula::forall(
            "y",
            Formula::atom("Q", vec![Term::var("x"), Term::var("y")]),
        );
        let err = body.substitute_var("x", &Term::var("y")).unwrap_err();
        assert!(matches!(err, SubstError::Capture { .. }));
    }

    #[test]
    fn shadowed_binder_untouched() {
        let body = Formula::forall("x", pa(Term::var("x")));
        assert_eq!(body.substitute_var("x", &Term::param("a")).unwrap(), body);
    }

    #[test]
    fn pattern_examples() {
        let c = Term::constant("C");
        let rxx = PredPattern::new(
            Formula::atom("R", vec![Term::var("x"), Term::var("x")]),
            "x",
        );
        assert_eq!(
            rxx.apply(&c),
            Formula::atom("R", vec![c.clone(), c.clone()])
        );
        let ra = PredPattern::new(Formula::atom("R", vec![Term::param("a")]), "x");
        assert_eq!(ra.apply(&c), Formula::atom("R", vec![Term::param("a")]));
        let px = PredPattern::new(pa(Term::var("x")), "x");
        let fb = Term::app("f", vec![Term::param("b")]);
        assert_eq!(px.apply(&fb), pa(fb));
    }

    #[test]
    fn subformula_examples() {
        assert!(is_subformula(&p(), &Formula::and(p(), q())));
        assert!(is_subformula(
            &pa(Term::param("c")),
            &Formula::forall("x", pa(Term::var("x")))
        ));
        assert!(!is_subformula(&q(), &p()));
    }

    #[test]
    fn subformula_instances_are_consistent() {
        // R(a,b) is not an instance of R(x,x).
        let rxx = Formula::exists(
            "x",
            Formula::atom("R", vec![Term::var("x"), Term::var("x")]),
        );
        let rab = Formula::atom("R", vec![Term::param("a"), Term::param("b")]);
        let raa = Formula::atom("R", vec![Term::param("a"), Term::param("a")]);
        assert!(!is_subformula(&rab, &rxx));
        assert!(is_subformula(&raa, &rxx));
    }

    #[test]
    fn subformula_nested_binders() {
        let b = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::atom("Q", vec![Term::var("x"), Term::var("y")]),
            ),
        );
        let a = Formula::forall(
            "z",
            Formula::atom("Q", vec![Term::param("c"), Term::var("z")]),
        );
        assert!(is_subformula(&a, &b));
        let qcd = Formula::atom("Q", vec![Term::param("c"), Term::param("d")]);
        assert!(is_subformula(&qcd, &b));
        // Cannot instantiate the outer hole with the inner bound variable.
        let bad = Formula::forall(
            "z",
            Formula::atom("Q", vec![Term::var("z"), Term::var("z")]),
        );
        assert!(!is_subformula(&bad, &b));
    }

    #[test]
    fn leibniz_extension() {
        let eq = Formula::eq(Term::param("a"), Term::param("b"));
        let pb = pa(Term::param("b"));
        assert!(!is_subformula(&pb, &eq));
        assert!(is_subformula_leibniz(&pb, &eq));
        assert!(!is_subformula_leibniz(&pa(Term::param("c")), &eq));
    }

    #[test]
    fn alpha_equality() {
        let f = Formula::forall("x", pa(Term::var("x")));
        let g = Formula::forall("y", pa(Term::var("y")));
        assert_eq!(f, g);
        assert_eq!(alpha_key(&f), alpha_key(&g));
        let h = Formula::forall(
            "y",
            Formula::forall(
                "x",
                Formula::atom("R", vec![Term::var("x"), Term::var("y")]),
            ),
        );
        let k = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::atom("R", vec![Term::var("x"), Term::var("y")]),
            ),
        );
        assert_ne!(h, k);
    }

    #[test]
    fn pred_param_replacement() {
        let f = Formula::and(Formula::PredParam("F".into(), vec![Term::param("a")]), q());
        let pat = PredPattern::new(
            Formula::atom("R", vec![Term::var("x"), Term::var("x")]),
            "x",
        );
        assert_eq!(
            f.replace_pred_param("F", &pat).unwrap(),
            Formula::and(
                Formula::atom("R", vec![Term::param("a"), Term::param("a")]),
                q()
            )
        );
        let bad = Formula::PredParam("F".into(), vec![]);
        assert!(bad.replace_pred_param("F", &pat).is_err());
    }
}
