//! Random and exhaustive generation of valid deductions, detour padding and
//! shrinking.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deduction::{check, relabel_fresh, Address, ClassId, Deduction, Rule, ViolationKind};
use crate::formula::{Formula, Name, PredPattern, Term};
use crate::reduction::simplify_vacuous;
use crate::textio::print_deduction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub max_nodes: usize,
    pub max_degree: usize,
    /// Number of propositional atoms, and of parameters used as terms.
    pub atom_pool: usize,
    pub quantifiers: bool,
    pub equality: bool,
    pub seed: u64,
    /// Insert introduce-then-eliminate detours.
    pub detours: bool,
    /// Allow ⊥E with compound conclusions. Such deductions are cleanable
    /// rather than valid.
    pub nonatomic_falsum: bool,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            max_nodes: 25,
            max_degree: 3,
            atom_pool: 3,
            quantifiers: true,
            equality: true,
            seed: 0,
            detours: true,
            nonatomic_falsum: false,
        }
    }
}

impl GenConfig {
    pub fn with_seed(self, seed: u64) -> GenConfig {
        GenConfig { seed, ..self }
    }

    /// Propositional, two atoms: the setting of exhaustive enumeration.
    pub fn small(max_nodes: usize) -> GenConfig {
        GenConfig {
            max_nodes,
            max_degree: 2,
            atom_pool: 2,
            quantifiers: false,
            equality: false,
            seed: 0,
            detours: true,
            nonatomic_falsum: false,
        }
    }
}

/// Stream of choices driving generation.
pub trait Source {
    /// Index of an option with nonzero weight.
    fn pick(&mut self, weights: &[u32]) -> usize;

    fn below(&mut self, n: usize) -> usize {
        self.pick(&vec![1; n.max(1)])
    }

    fn chance(&mut self, yes: u32, no: u32) -> bool {
        self.pick(&[no, yes]) == 1
    }
}

pub struct RngSource(ChaCha8Rng);

impl RngSource {
    pub fn new(seed: u64) -> RngSource {
        RngSource(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl Source for RngSource {
    fn pick(&mut self, weights: &[u32]) -> usize {
        let total: u32 = weights.iter().sum();
        if total == 0 {
            return 0;
        }
        let mut r = self.0.gen_range(0..total);
        for (i, &w) in weights.iter().enumerate() {
            if r < w {
                return i;
            }
            r -= w;
        }
        weights.len() - 1
    }
}

/// Replays a choice prefix, then takes the first option at every later
/// choice point.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    prefix: Vec<usize>,
    log: Vec<(usize, usize)>,
}

impl Tape {
    /// Tapes that bump one choice at or after the last explicit one. Starting
    /// from the empty tape, every choice sequence is reached exactly once,
    /// in order of its summed choice indices when visited breadth-first.
    pub fn children(&self) -> Vec<Tape> {
        let from = self.prefix.len().saturating_sub(1);
        (from..self.log.len())
            .filter(|&j| self.log[j].0 + 1 < self.log[j].1)
            .map(|j| {
                let mut prefix: Vec<usize> = self.log[..j].iter().map(|&(c, _)| c).collect();
                prefix.push(self.log[j].0 + 1);
                Tape {
                    prefix,
                    log: Vec::new(),
                }
            })
            .collect()
    }
}

impl Source for Tape {
    fn pick(&mut self, weights: &[u32]) -> usize {
        let options: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0).collect();
        if options.is_empty() {
            return 0;
        }
        let pos = self.log.len();
        let c = self
            .prefix
            .get(pos)
            .copied()
            .unwrap_or(0)
            .min(options.len() - 1);
        self.log.push((c, options.len()));
        options[c]
    }
}

const PROPS: [&str; 6] = ["p", "q", "r", "s", "m", "n"];
const PARAMS: [&str; 3] = ["a", "b", "c"];
const PREDS: [&str; 2] = ["P", "Q"];

#[derive(Clone, Default)]
struct Ctx {
    hyps: Vec<(ClassId, Formula)>,
    forbidden: Vec<Name>,
    forbidden_preds: Vec<Name>,
}

impl Ctx {
    fn with(&self, class: ClassId, f: Formula) -> Ctx {
        let mut c = self.clone();
        c.hyps.push((class, f));
        c
    }

    fn forbid(mut self, a: &str) -> Ctx {
        self.forbidden.push(a.to_string());
        self
    }

    fn forbid_pred(mut self, p: &str) -> Ctx {
        self.forbidden_preds.push(p.to_string());
        self
    }

    fn may_assume(&self, f: &Formula) -> bool {
        !self.forbidden.iter().any(|a| f.mentions_param(a))
            && !self.forbidden_preds.iter().any(|p| f.mentions_pred(p))
    }
}

struct Gen<'a, S: Source> {
    src: &'a mut S,
    cfg: GenConfig,
    class: ClassId,
    names: usize,
}

impl<S: Source> Gen<'_, S> {
    fn class(&mut self) -> ClassId {
        self.class += 1;
        self.class
    }

    fn eigen(&mut self) -> Name {
        self.names += 1;
        format!("e{}", self.names)
    }

    fn pred(&mut self) -> Name {
        self.names += 1;
        format!("F{}", self.names)
    }

    fn params(&self) -> &'static [&'static str] {
        &PARAMS[..self.cfg.atom_pool.clamp(1, PARAMS.len())]
    }

    fn term(&mut self) -> Term {
        let ps = self.params();
        let i = self.src.below(ps.len());
        let t = Term::param(ps[i]);
        if self.cfg.quantifiers && self.src.chance(1, 9) {
            Term::app("f", vec![t])
        } else {
            t
        }
    }

    fn atom(&mut self) -> Formula {
        let props = &PROPS[..self.cfg.atom_pool.clamp(1, PROPS.len())];
        let preds = self.cfg.quantifiers || self.cfg.equality;
        match self.src.pick(&[4, if preds { 2 } else { 0 }]) {
            0 => Formula::prop(props[self.src.below(props.len())]),
            _ => {
                let p = PREDS[self.src.below(PREDS.len())];
                Formula::atom(p, vec![self.term()])
            }
        }
    }

    fn formula(&mut self, degree: usize) -> Formula {
        if degree == 0 {
            return self.atom();
        }
        let q = if self.cfg.quantifiers { 1 } else { 0 };
        let e = if self.cfg.equality { 1 } else { 0 };
        match self.src.pick(&[3, 2, 2, 2, q, q, e, 1, 1]) {
            0 => self.atom(),
            k @ 1..=3 => {
                let left = self.src.below(degree);
                let (l, r) = (self.formula(left), self.formula(degree - 1 - left));
                match k {
                    1 => Formula::and(l, r),
                    2 => Formula::or(l, r),
                    _ => Formula::imp(l, r),
                }
            }
            k @ 4..=5 => {
                let body = self.formula(degree - 1);
                let x = body.fresh_var();
                let params: Vec<Name> = body.params().into_iter().collect();
                let body = if params.is_empty() {
                    body
                } else {
                    let a = &params[self.src.below(params.len())];
                    body.abstract_param(a, &x)
                };
                if k == 4 {
                    Formula::forall(&x, body)
                } else {
                    Formula::exists(&x, body)
                }
            }
            6 => Formula::eq(self.term(), self.term()),
            7 => Formula::Bottom,
            _ => Formula::Top,
        }
    }

    /// A formula of degree `lo + k` for some `k < n`.
    fn formula_from(&mut self, lo: usize, n: usize) -> Formula {
        let k = self.src.below(n);
        self.formula(lo + k)
    }

    fn split(&mut self, budget: usize, parts: usize) -> Vec<usize> {
        let mut rest = budget.saturating_sub(1).max(parts);
        let mut out = Vec::with_capacity(parts);
        for i in 0..parts {
            let left = parts - i - 1;
            if left == 0 {
                out.push(rest);
            } else {
                let room = rest - left;
                let take = 1 + self.src.below(room.min(8));
                out.push(take);
                rest -= take;
            }
        }
        out
    }

    fn bot_ok(&self, goal: &Formula) -> bool {
        goal.is_atomic() || (self.cfg.nonatomic_falsum && *goal != Formula::Bottom)
    }

    /// A deduction of `goal`.
    fn gen(&mut self, goal: &Formula, ctx: &Ctx, budget: usize) -> Deduction {
        let matching: Vec<ClassId> = ctx
            .hyps
            .iter()
            .filter(|(_, f)| f == goal)
            .map(|(c, _)| *c)
            .collect();
        let eliminable: Vec<usize> = (0..ctx.hyps.len())
            .filter(|&i| {
                let f = &ctx.hyps[i].1;
                match f {
                    Formula::Bottom => self.bot_ok(goal),
                    Formula::Top => false,
                    f => !f.is_atomic(),
                }
            })
            .collect();
        let can_open = ctx.may_assume(goal);
        let intro_ok = !matches!(goal, Formula::Bottom) && !goal.is_atomic();
        let leibniz = self.cfg.equality && goal.is_atomic() && !goal.params().is_empty();
        let small = budget <= 1;
        let w = |c: bool, x: u32| if c { x } else { 0 };
        let weights = [
            w(!matching.is_empty(), if small { 10 } else { 6 }),
            w(can_open, if small { 6 } else { 1 }),
            w(self.bot_ok(goal) && budget >= 2, 1),
            w(intro_ok && budget >= 2, 3),
            w(!eliminable.is_empty() && budget >= 3, 4),
            w(budget >= 5, 1),
            w(self.cfg.detours && budget >= 5, 6),
            w(budget >= 5, 2),
            w(leibniz && budget >= 4, 1),
        ];
        if weights.iter().all(|&x| x == 0) {
            return self.forced(goal, ctx, budget);
        }
        match self.src.pick(&weights) {
            0 => Deduction::leaf(matching[self.src.below(matching.len())], goal.clone()),
            1 => {
                let c = self.class();
                Deduction::leaf(c, goal.clone())
            }
            2 => {
                let premise = self.gen(&Formula::Bottom, ctx, budget - 1);
                Deduction::apply(Rule::BotE(goal.clone()), vec![premise], vec![])
            }
            3 => self.intro(goal, ctx, budget),
            4 => {
                let (class, major) = ctx.hyps[eliminable[self.src.below(eliminable.len())]].clone();
                let leaf = Deduction::leaf(class, major.clone());
                self.elim(leaf, goal, ctx, budget - 1)
            }
            5 => {
                let m = self.formula_from(1, self.cfg.max_degree.max(1));
                self.general_intro(&m, goal, ctx, budget)
            }
            6 => self.detour(goal, ctx, budget),
            7 => {
                let m = self.formula_from(1, self.cfg.max_degree.max(1));
                if matches!(m, Formula::Top) || (m == Formula::Bottom && !self.bot_ok(goal)) {
                    return self.forced(goal, ctx, budget);
                }
                let shares = self.split(budget, 2);
                let major = if self.src.chance(1, 2) {
                    self.segment(&m, ctx, shares[0])
                } else {
                    self.gen(&m, ctx, shares[0])
                };
                self.elim(major, goal, ctx, shares[1])
            }
            _ => self.leibniz(goal, ctx, budget),
        }
    }

    /// A deduction of `goal` ending in an elimination, which makes `goal` a
    /// segment when it is itself eliminated.
    fn segment(&mut self, goal: &Formula, ctx: &Ctx, budget: usize) -> Deduction {
        let m = if self.src.chance(1, 1) {
            let other = if self.src.chance(1, 1) {
                goal.clone()
            } else {
                self.atom()
            };
            Formula::or(goal.clone(), other)
        } else {
            self.formula_from(1, self.cfg.max_degree.max(1))
        };
        if matches!(m, Formula::Top | Formula::Bottom) || !ctx.may_assume(&m) || budget < 3 {
            return self.gen(goal, ctx, budget);
        }
        let leaf = Deduction::leaf(self.class(), m);
        self.elim(leaf, goal, ctx, budget - 1)
    }

    /// Like [`Gen::gen`], retried a few times until one of `classes` is used.
    fn gen_using(
        &mut self,
        goal: &Formula,
        ctx: &Ctx,
        classes: &[ClassId],
        budget: usize,
    ) -> Deduction {
        let mut last = None;
        for _ in 0..4 {
            let d = self.gen(goal, ctx, budget);
            if d.open_leaves().iter().any(|(_, c, _)| classes.contains(c)) {
                return d;
            }
            last = Some(d);
        }
        last.expect("at least one attempt")
    }

    /// Smallest construction available regardless of budget.
    fn forced(&mut self, goal: &Formula, ctx: &Ctx, _budget: usize) -> Deduction {
        if let Some((c, _)) = ctx.hyps.iter().find(|(_, f)| f == goal) {
            return Deduction::leaf(*c, goal.clone());
        }
        if ctx.may_assume(goal) {
            let c = self.class();
            return Deduction::leaf(c, goal.clone());
        }
        if goal.is_atomic() {
            let c = self.class();
            return Deduction::apply(
                Rule::BotE(goal.clone()),
                vec![Deduction::leaf(c, Formula::Bottom)],
                vec![],
            );
        }
        self.intro(goal, ctx, 0)
    }

    /// The usual introduction of `goal`, as a general rule discharging `goal` itself.
    fn intro(&mut self, goal: &Formula, ctx: &Ctx, budget: usize) -> Deduction {
        let k = self.class();
        let leaf = Deduction::leaf(k, goal.clone());
        let sub = |g: &mut Self, f: &Formula, c: &Ctx, b: usize| {
            if b == 0 {
                g.forced(f, c, 0)
            } else {
                g.gen(f, c, b)
            }
        };
        match goal {
            Formula::And(a, b) => {
                let s = if budget == 0 {
                    vec![0, 0]
                } else {
                    self.split(budget, 3)
                };
                let l = sub(self, a, ctx, s[0]);
                let r = sub(self, b, ctx, s[1]);
                Deduction::apply(Rule::AndI, vec![l, r, leaf], vec![k])
            }
            Formula::Or(a, b) => {
                let left = self.src.chance(1, 1);
                let p = sub(
                    self,
                    if left { a } else { b },
                    ctx,
                    budget.saturating_sub(2),
                );
                Deduction::apply(
                    if left { Rule::OrI1 } else { Rule::OrI2 },
                    vec![p, leaf],
                    vec![k],
                )
            }
            Formula::Imp(a, b) => {
                let m = self.class();
                let body = sub(
                    self,
                    b,
                    &ctx.with(m, (**a).clone()),
                    budget.saturating_sub(2),
                );
                Deduction::apply(Rule::ImpI, vec![body, leaf], vec![m, k])
            }
            Formula::Exists(..) => {
                let t = self.term();
                let inst = goal.instantiate(&t).expect("existential");
                let body = sub(self, &inst, ctx, budget.saturating_sub(2));
                Deduction::apply(
                    Rule::ExI {
                        witness: t,
                        target: goal.clone(),
                    },
                    vec![body, leaf],
                    vec![k],
                )
            }
            Formula::Forall(..) => {
                let e = self.eigen();
                let inst = goal.instantiate(&Term::param(&e)).expect("universal");
                let body = sub(
                    self,
                    &inst,
                    &ctx.clone().forbid(&e),
                    budget.saturating_sub(2),
                );
                Deduction::apply(Rule::AllI { eigen: e }, vec![body, leaf], vec![k])
            }
            Formula::Top => Deduction::apply(Rule::TopI, vec![leaf], vec![k]),
            Formula::Eq(t1, t2) if t1 == t2 => Deduction::apply(Rule::EqI, vec![leaf], vec![k]),
            Formula::Eq(t1, t2) => {
                let f = self.pred();
                let (c0, c1) = self.leibniz_sides(&f, t1, t2, ctx, budget.saturating_sub(2));
                let (i, j) = (c0.1, c1.1);
                Deduction::apply(
                    Rule::EqIPrime {
                        pred: f,
                        lhs: t1.clone(),
                        rhs: t2.clone(),
                    },
                    vec![c0.0, c1.0, leaf],
                    vec![i, j, k],
                )
            }
            _ => self.forced(goal, ctx, 0),
        }
    }

    /// Specific premises of =I′: `%F(t1)` from `[%F(t2)]` and `%F(t2)` from `[%F(t1)]`.
    fn leibniz_sides(
        &mut self,
        f: &str,
        t1: &Term,
        t2: &Term,
        ctx: &Ctx,
        budget: usize,
    ) -> ((Deduction, ClassId), (Deduction, ClassId)) {
        let fp = |t: &Term| Formula::PredParam(f.to_string(), vec![t.clone()]);
        let inner = ctx.clone().forbid_pred(f);
        let half = (budget / 2).max(1);
        let i = self.class();
        let c0 = self.gen(&fp(t1), &inner.with(i, fp(t2)), half);
        let j = self.class();
        let c1 = self.gen(&fp(t2), &inner.with(j, fp(t1)), half);
        ((c0, i), (c1, j))
    }

    /// A general introduction of `m` whose arbitrary premise derives `goal`.
    fn general_intro(
        &mut self,
        m: &Formula,
        goal: &Formula,
        ctx: &Ctx,
        budget: usize,
    ) -> Deduction {
        let k = self.class();
        let shares = self.split(budget, 2);
        let arb = self.gen_using(goal, &ctx.with(k, m.clone()), &[k], shares[1]);
        self.wrap_intro(m, k, arb, ctx, shares[0])
    }

    /// Builds an introduction of `m` discharging class `k` above `arb`.
    fn wrap_intro(
        &mut self,
        m: &Formula,
        k: ClassId,
        arb: Deduction,
        ctx: &Ctx,
        budget: usize,
    ) -> Deduction {
        let b = budget.max(1);
        match m {
            Formula::And(a, c) => {
                let s = self.split(b + 1, 2);
                let l = self.gen(a, ctx, s[0]);
                let r = self.gen(c, ctx, s[1]);
                Deduction::apply(Rule::AndI, vec![l, r, arb], vec![k])
            }
            Formula::Or(a, c) => {
                let left = self.src.chance(1, 1);
                let p = self.gen(if left { a } else { c }, ctx, b);
                Deduction::apply(
                    if left { Rule::OrI1 } else { Rule::OrI2 },
                    vec![p, arb],
                    vec![k],
                )
            }
            Formula::Imp(a, c) => {
                let h = self.class();
                let body = self.gen(c, &ctx.with(h, (**a).clone()), b);
                Deduction::apply(Rule::ImpI, vec![body, arb], vec![h, k])
            }
            Formula::Exists(..) => {
                let t = self.term();
                let inst = m.instantiate(&t).expect("existential");
                let body = self.gen(&inst, ctx, b);
                Deduction::apply(
                    Rule::ExI {
                        witness: t,
                        target: m.clone(),
                    },
                    vec![body, arb],
                    vec![k],
                )
            }
            Formula::Forall(..) => {
                let e = self.eigen();
                let inst = m.instantiate(&Term::param(&e)).expect("universal");
                let body = self.gen(&inst, &ctx.clone().forbid(&e), b);
                Deduction::apply(Rule::AllI { eigen: e }, vec![body, arb], vec![k])
            }
            Formula::Top => Deduction::apply(Rule::TopI, vec![arb], vec![k]),
            Formula::Eq(t1, t2) if t1 == t2 => Deduction::apply(Rule::EqI, vec![arb], vec![k]),
            Formula::Eq(t1, t2) => {
                let f = self.pred();
                let (c0, c1) = self.leibniz_sides(&f, t1, t2, ctx, b);
                let (i, j) = (c0.1, c1.1);
                Deduction::apply(
                    Rule::EqIPrime {
                        pred: f,
                        lhs: t1.clone(),
                        rhs: t2.clone(),
                    },
                    vec![c0.0, c1.0, arb],
                    vec![i, j, k],
                )
            }
            _ => arb,
        }
    }

    /// An elimination with major premise `major` concluding `goal`.
    fn elim(&mut self, major: Deduction, goal: &Formula, ctx: &Ctx, budget: usize) -> Deduction {
        let m = major.conclusion().clone();
        let b = budget.max(1);
        match &m {
            Formula::And(a, c) => {
                let (i, j) = (self.class(), self.class());
                let arb = self.gen_using(
                    goal,
                    &ctx.with(i, (**a).clone()).with(j, (**c).clone()),
                    &[i, j],
                    b,
                );
                Deduction::apply(Rule::AndE, vec![major, arb], vec![i, j])
            }
            Formula::Or(a, c) => {
                let (i, j) = (self.class(), self.class());
                let s = self.split(b + 1, 2);
                let l = self.gen_using(goal, &ctx.with(i, (**a).clone()), &[i], s[0]);
                let r = self.gen_using(goal, &ctx.with(j, (**c).clone()), &[j], s[1]);
                Deduction::apply(Rule::OrE, vec![major, l, r], vec![i, j])
            }
            Formula::Imp(a, c) => {
                let i = self.class();
                let s = self.split(b + 1, 2);
                let minor = self.gen(a, ctx, s[0]);
                let arb = self.gen_using(goal, &ctx.with(i, (**c).clone()), &[i], s[1]);
                Deduction::apply(Rule::ImpE, vec![major, minor, arb], vec![i])
            }
            Formula::Exists(..) => {
                let e = self.eigen();
                let i = self.class();
                let inst = m.instantiate(&Term::param(&e)).expect("existential");
                let arb = self.gen_using(goal, &ctx.with(i, inst).forbid(&e), &[i], b);
                Deduction::apply(Rule::ExE { eigen: e }, vec![major, arb], vec![i])
            }
            Formula::Forall(..) => {
                let t = self.term();
                let i = self.class();
                let inst = m.instantiate(&t).expect("universal");
                let arb = self.gen_using(goal, &ctx.with(i, inst), &[i], b);
                Deduction::apply(Rule::AllE { witness: t }, vec![major, arb], vec![i])
            }
            Formula::Bottom if self.bot_ok(goal) => {
                Deduction::apply(Rule::BotE(goal.clone()), vec![major], vec![])
            }
            Formula::Eq(t1, t2) => {
                let forward = self.src.chance(1, 1);
                let (from, to) = if forward { (t1, t2) } else { (t2, t1) };
                let pat = self.pattern(goal, to);
                let i = self.class();
                let s = self.split(b + 1, 2);
                let minor = self.gen(&pat.apply(from), ctx, s[0]);
                let arb = self.gen_using(goal, &ctx.with(i, pat.apply(to)), &[i], s[1]);
                let rule = if forward {
                    Rule::EqE(pat)
                } else {
                    Rule::EqES(pat)
                };
                Deduction::apply(rule, vec![major, minor, arb], vec![i])
            }
            _ => self.forced(goal, ctx, 0),
        }
    }

    /// A pattern that yields `goal` at `t` when `goal` is atomic and mentions `t`.
    fn pattern(&mut self, goal: &Formula, t: &Term) -> PredPattern {
        if let (true, Term::Param(a)) = (goal.is_atomic(), t) {
            if goal.mentions_param(a) {
                return PredPattern::new(goal.abstract_param(a, "x"), "x");
            }
        }
        let p = PREDS[self.src.below(PREDS.len())];
        PredPattern::new(Formula::atom(p, vec![Term::var("x")]), "x")
    }

    /// `goal` as `P(t2)` obtained from `t1 = t2` and `P(t1)`.
    fn leibniz(&mut self, goal: &Formula, ctx: &Ctx, budget: usize) -> Deduction {
        let params: Vec<Name> = goal.params().into_iter().collect();
        let a = params[self.src.below(params.len())].clone();
        let t1 = self.term();
        let eq = Formula::eq(t1, Term::param(&a));
        let s = self.split(budget, 2);
        let major = self.gen(&eq, ctx, s[0]);
        let pat = PredPattern::new(goal.abstract_param(&a, "x"), "x");
        let Formula::Eq(from, _) = &eq else {
            unreachable!()
        };
        let i = self.class();
        let minor = self.gen(&pat.apply(from), ctx, s[1]);
        Deduction::apply(
            Rule::EqE(pat),
            vec![major, minor, Deduction::leaf(i, goal.clone())],
            vec![i],
        )
    }

    /// Introduces a formula built around `goal` and eliminates it at once.
    fn detour(&mut self, goal: &Formula, ctx: &Ctx, budget: usize) -> Deduction {
        let q = self.cfg.quantifiers as u32;
        let eq = (self.cfg.equality && goal.is_atomic() && !goal.params().is_empty()) as u32;
        let s = self.split(budget, 2);
        let (sb, ab) = (s[0], s[1]);
        let k = self.class();
        match self.src.pick(&[3, 2, 3, q, q, eq, eq]) {
            0 => {
                let other = self.formula_from(0, 2);
                let left = self.src.chance(1, 1);
                let m = if left {
                    Formula::and(goal.clone(), other)
                } else {
                    Formula::and(other, goal.clone())
                };
                let arb = self.elim(Deduction::leaf(k, m.clone()), goal, ctx, ab);
                self.wrap_intro(&m, k, arb, ctx, sb)
            }
            1 => {
                let other = self.formula_from(0, 2);
                let m = if self.src.chance(1, 1) {
                    Formula::or(goal.clone(), other)
                } else {
                    Formula::or(other, goal.clone())
                };
                let arb = self.elim(Deduction::leaf(k, m.clone()), goal, ctx, ab);
                self.wrap_intro(&m, k, arb, ctx, sb)
            }
            2 => {
                let a = self.formula_from(0, 2);
                let m = Formula::imp(a, goal.clone());
                let arb = self.elim(Deduction::leaf(k, m.clone()), goal, ctx, ab);
                self.wrap_intro(&m, k, arb, ctx, sb)
            }
            3 => {
                let x = goal.fresh_var();
                let p = PREDS[self.src.below(PREDS.len())];
                let m = Formula::exists(
                    &x,
                    Formula::and(goal.clone(), Formula::atom(p, vec![Term::var(&x)])),
                );
                let arb = self.elim(Deduction::leaf(k, m.clone()), goal, ctx, ab);
                self.wrap_intro(&m, k, arb, ctx, sb)
            }
            4 => {
                let x = goal.fresh_var();
                let params: Vec<Name> = goal.params().into_iter().collect();
                let (m, t) = match params.first() {
                    Some(a) => (
                        Formula::forall(&x, goal.abstract_param(a, &x)),
                        Term::param(a),
                    ),
                    None => (Formula::forall(&x, goal.clone()), self.term()),
                };
                let i = self.class();
                let arb = self.gen_using(
                    goal,
                    &ctx.with(i, m.instantiate(&t).expect("universal")),
                    &[i],
                    ab,
                );
                let elim = Deduction::apply(
                    Rule::AllE { witness: t },
                    vec![Deduction::leaf(k, m.clone()), arb],
                    vec![i],
                );
                self.wrap_intro(&m, k, elim, ctx, sb)
            }
            k5 => {
                let params: Vec<Name> = goal.params().into_iter().collect();
                let a = &params[self.src.below(params.len())];
                let t2 = Term::param(a);
                let t1 = if k5 == 5 { t2.clone() } else { self.term() };
                let m = Formula::eq(t1.clone(), t2.clone());
                let pat = PredPattern::new(goal.abstract_param(a, "x"), "x");
                let i = self.class();
                let minor = self.gen(&pat.apply(&t1), ctx, ab.saturating_sub(2).max(1));
                let elim = Deduction::apply(
                    Rule::EqE(pat),
                    vec![
                        Deduction::leaf(k, m.clone()),
                        minor,
                        Deduction::leaf(i, goal.clone()),
                    ],
                    vec![i],
                );
                self.wrap_intro(&m, k, elim, ctx, sb)
            }
        }
    }
}

fn finish(d: Deduction, cfg: &GenConfig) -> Option<Deduction> {
    let d = relabel_fresh(&simplify_vacuous(&d));
    let ok = d.size() <= cfg.max_nodes
        && check(&d)
            .map(|r| {
                if cfg.nonatomic_falsum {
                    r.is_cleanable() && !r.has(ViolationKind::VacuousArbitrary)
                } else {
                    r.is_valid()
                }
            })
            .unwrap_or(false);
    ok.then_some(d)
}

fn attempt<S: Source>(src: &mut S, cfg: &GenConfig) -> Deduction {
    let mut g = Gen {
        src,
        cfg: *cfg,
        class: 0,
        names: 0,
    };
    let goal = g.formula_from(0, cfg.max_degree + 1);
    g.gen(&goal, &Ctx::default(), cfg.max_nodes)
}

/// A valid deduction of at most `cfg.max_nodes` nodes, determined by `cfg`.
pub fn gen_deduction(cfg: &GenConfig) -> Deduction {
    let mut src = RngSource::new(cfg.seed);
    for _ in 0..64 {
        if let Some(d) = finish(attempt(&mut src, cfg), cfg) {
            return d;
        }
    }
    let mut g = Gen {
        src: &mut src,
        cfg: *cfg,
        class: 0,
        names: 0,
    };
    Deduction::leaf(1, g.atom())
}

/// Every distinct valid deduction reachable by the generator's choice tree,
/// visiting at most `max_tapes` choice sequences.
pub fn enumerate(cfg: &GenConfig, max_tapes: usize) -> Vec<Deduction> {
    let mut seen = BTreeMap::new();
    let mut queue = VecDeque::from([Tape::default()]);
    let mut visited = 0;
    while let Some(mut t) = queue.pop_front() {
        if visited >= max_tapes {
            break;
        }
        visited += 1;
        if let Some(d) = finish(attempt(&mut t, cfg), cfg) {
            seen.entry(print_deduction(&d)).or_insert(d);
        }
        let room = max_tapes.saturating_sub(visited + queue.len());
        queue.extend(t.children().into_iter().take(room));
    }
    seen.into_values().collect()
}

/// Closes `d` by discharging each open class with an implication introduction.
pub fn close(d: &Deduction) -> Deduction {
    let mut out = d.clone();
    let mut next = d.class_ids().iter().next_back().copied().unwrap_or(0) + 1;
    let mut open: Vec<(ClassId, Formula)> = d.sequent().assumptions;
    open.dedup_by_key(|(c, _)| *c);
    let mut done = Vec::new();
    for (c, h) in open {
        if done.contains(&c) {
            continue;
        }
        done.push(c);
        let target = Formula::imp(h, out.conclusion().clone());
        out = Deduction::apply(
            Rule::ImpI,
            vec![out, Deduction::leaf(next, target)],
            vec![c, next],
        );
        next += 1;
    }
    out
}

/// Connectives available to [`pad_detour`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    And,
    Or,
    Imp,
    Exists,
    Forall,
}

/// Wraps the subtree at `at` in an introduction immediately eliminated,
/// leaving its conclusion and open assumptions unchanged.
pub fn pad_detour(d: &Deduction, at: &Address, kind: Padding) -> Option<Deduction> {
    let sub = d.get(at)?.clone();
    let g = sub.conclusion().clone();
    let mut next = d.class_ids().iter().next_back().copied().unwrap_or(0);
    let mut class = || {
        next += 1;
        next
    };
    let mut eigen = 1;
    let params = d.params();
    while params.contains(&format!("e{eigen}")) {
        eigen += 1;
    }
    let e = format!("e{eigen}");
    let (k, i) = (class(), class());
    let top =
        |c: ClassId| Deduction::apply(Rule::TopI, vec![Deduction::leaf(c, Formula::Top)], vec![c]);
    let x = g.fresh_var();
    let wrapped = match kind {
        Padding::And => {
            let m = Formula::and(g.clone(), Formula::Top);
            let (j, t) = (class(), class());
            let elim = Deduction::apply(
                Rule::AndE,
                vec![Deduction::leaf(k, m), Deduction::leaf(i, g.clone())],
                vec![i, j],
            );
            Deduction::apply(Rule::AndI, vec![sub, top(t), elim], vec![k])
        }
        Padding::Or => {
            let m = Formula::or(g.clone(), g.clone());
            let j = class();
            let elim = Deduction::apply(
                Rule::OrE,
                vec![
                    Deduction::leaf(k, m),
                    Deduction::leaf(i, g.clone()),
                    Deduction::leaf(j, g.clone()),
                ],
                vec![i, j],
            );
            Deduction::apply(Rule::OrI1, vec![sub, elim], vec![k])
        }
        Padding::Imp => {
            let m = Formula::imp(Formula::Top, g.clone());
            let (h, t) = (class(), class());
            let elim = Deduction::apply(
                Rule::ImpE,
                vec![Deduction::leaf(k, m), top(t), Deduction::leaf(i, g.clone())],
                vec![i],
            );
            Deduction::apply(Rule::ImpI, vec![sub, elim], vec![h, k])
        }
        Padding::Exists => {
            let m = Formula::exists(&x, g.clone());
            let elim = Deduction::apply(
                Rule::ExE { eigen: e },
                vec![Deduction::leaf(k, m.clone()), Deduction::leaf(i, g.clone())],
                vec![i],
            );
            Deduction::apply(
                Rule::ExI {
                    witness: Term::constant("0"),
                    target: m,
                },
                vec![sub, elim],
                vec![k],
            )
        }
        Padding::Forall => {
            let m = Formula::forall(&x, g.clone());
            let elim = Deduction::apply(
                Rule::AllE {
                    witness: Term::constant("0"),
                },
                vec![Deduction::leaf(k, m), Deduction::leaf(i, g.clone())],
                vec![i],
            );
            Deduction::apply(Rule::AllI { eigen: e }, vec![sub, elim], vec![k])
        }
    };
    d.replace_at(at, wrapped).ok()
}

fn padded<S: Source>(mut d: Deduction, src: &mut S, rounds: usize) -> Deduction {
    const KINDS: [Padding; 5] = [
        Padding::And,
        Padding::Or,
        Padding::Imp,
        Padding::Exists,
        Padding::Forall,
    ];
    for _ in 0..rounds {
        let addrs = d.addresses();
        let at = addrs[src.below(addrs.len())].clone();
        let kind = KINDS[src.below(KINDS.len())];
        if let Some(p) = pad_detour(&d, &at, kind) {
            d = p;
        }
    }
    d
}

fn closed_base(cfg: &GenConfig, src: &mut RngSource) -> Deduction {
    let small = GenConfig {
        max_nodes: cfg.max_nodes.min(12),
        ..*cfg
    };
    let mut g = Gen {
        src,
        cfg: small,
        class: 0,
        names: 0,
    };
    for _ in 0..64 {
        let goal = g.formula_from(0, small.max_degree + 1);
        if let Some(d) = finish(g.gen(&goal, &Ctx::default(), small.max_nodes), &small) {
            return close(&d);
        }
    }
    close(&Deduction::leaf(1, Formula::prop("p")))
}

/// A closed, detour-padded proof of a disjunction, with the side of the
/// disjunction introduced.
pub fn closed_disjunction(cfg: &GenConfig) -> (Deduction, crate::normalize::Side) {
    let mut src = RngSource::new(cfg.seed);
    let base = closed_base(cfg, &mut src);
    let x = base.conclusion().clone();
    let mut g = Gen {
        src: &mut src,
        cfg: *cfg,
        class: 0,
        names: 0,
    };
    let y = g.formula(1);
    let left = g.src.chance(1, 1);
    let k = base.class_ids().iter().next_back().copied().unwrap_or(0) + 1;
    let (rule, target) = if left {
        (Rule::OrI1, Formula::or(x, y))
    } else {
        (Rule::OrI2, Formula::or(y, x))
    };
    let d = Deduction::apply(rule, vec![base, Deduction::leaf(k, target)], vec![k]);
    let side = if left {
        crate::normalize::Side::Left
    } else {
        crate::normalize::Side::Right
    };
    (padded(d, &mut src, 3), side)
}

/// A closed, detour-padded proof of an existential, with its witness.
pub fn closed_existential(cfg: &GenConfig) -> (Deduction, Term) {
    let mut src = RngSource::new(cfg.seed);
    let cfg = GenConfig {
        quantifiers: true,
        ..*cfg
    };
    let base = closed_base(&cfg, &mut src);
    let x = base.conclusion().clone();
    let params: Vec<Name> = x.params().into_iter().collect();
    let v = x.fresh_var();
    let (witness, target) = match params.first() {
        Some(a) => (Term::param(a), Formula::exists(&v, x.abstract_param(a, &v))),
        None => (Term::constant("0"), Formula::exists(&v, x.clone())),
    };
    let k = base.class_ids().iter().next_back().copied().unwrap_or(0) + 1;
    let d = Deduction::apply(
        Rule::ExI {
            witness: witness.clone(),
            target: target.clone(),
        },
        vec![base, Deduction::leaf(k, target)],
        vec![k],
    );
    (padded(d, &mut src, 3), witness)
}

/// Greedy shrinking: repeatedly replaces a subtree by one of its premises
/// with the same conclusion, or by a fresh assumption, keeping only valid
/// candidates on which `fails` still holds.
pub fn shrink(d: &Deduction, fails: impl Fn(&Deduction) -> bool) -> Deduction {
    let valid = |x: &Deduction| check(x).map(|r| r.is_valid()).unwrap_or(false);
    let mut cur = d.clone();
    'outer: loop {
        let fresh = cur.class_ids().iter().next_back().copied().unwrap_or(0) + 1;
        for addr in cur.addresses() {
            let node = cur.get(&addr).expect("address");
            let mut moves: Vec<Deduction> = node
                .premises()
                .iter()
                .filter(|c| c.conclusion() == node.conclusion())
                .cloned()
                .collect();
            if node.inference().is_some() {
                moves.push(Deduction::leaf(fresh, node.conclusion().clone()));
            }
            for m in moves {
                let Ok(cand) = cur.replace_at(&addr, m) else {
                    continue;
                };
                let cand = relabel_fresh(&simplify_vacuous(&cand));
                if cand.size() < cur.size() && valid(&cand) && fails(&cand) {
                    cur = cand;
                    continue 'outer;
                }
            }
        }
        return cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rank;
    use crate::deduction::RuleTag;

    #[test]
    fn deterministic_and_valid() {
        for seed in 0..300 {
            let cfg = GenConfig::default().with_seed(seed);
            let d = gen_deduction(&cfg);
            assert_eq!(d, gen_deduction(&cfg));
            assert!(d.size() <= cfg.max_nodes);
            let report = check(&d).unwrap();
            assert!(
                report.is_valid(),
                "seed {seed}: {:?}\n{}",
                report.violations,
                print_deduction(&d)
            );
        }
    }

    #[test]
    fn single_node_budget() {
        let cfg = GenConfig {
            max_nodes: 1,
            ..GenConfig::default()
        };
        for seed in 0..20 {
            assert_eq!(gen_deduction(&cfg.with_seed(seed)).size(), 1);
        }
    }

    #[test]
    fn detours_are_common() {
        let with_redex = (0..200)
            .filter(|&s| {
                rank(&gen_deduction(&GenConfig::default().with_seed(s)))
                    > crate::analysis::Rank::ZERO
            })
            .count();
        assert!(with_redex >= 100, "{with_redex}");
    }

    #[test]
    fn segments_through_two_premise_rules_occur() {
        let hits = (0..1000)
            .map(|s| gen_deduction(&GenConfig::default().with_seed(s)))
            .filter(|d| {
                crate::analysis::maximal_segments(d).iter().any(|x| {
                    d.get(x.last())
                        .is_some_and(|r| r.tag().arbitrary_children().len() >= 2)
                })
            })
            .count();
        assert!(hits >= 3, "{hits}");
    }

    #[test]
    fn tape_enumeration_is_finite_and_valid() {
        let all = enumerate(&GenConfig::small(5), 2000);
        assert!(all.len() > 20, "{}", all.len());
        for d in &all {
            assert!(check(d).unwrap().is_valid());
            assert!(d.size() <= 5);
        }
    }

    #[test]
    fn tape_children_are_distinct() {
        let mut t = Tape::default();
        attempt(&mut t, &GenConfig::small(6));
        let kids = t.children();
        let prefixes: std::collections::BTreeSet<Vec<usize>> =
            kids.iter().map(|k| k.prefix.clone()).collect();
        assert_eq!(prefixes.len(), kids.len());
        assert!(kids.iter().all(|k| k.prefix.iter().sum::<usize>() == 1));
    }

    #[test]
    fn nonatomic_falsum_is_cleanable() {
        let cfg = GenConfig {
            nonatomic_falsum: true,
            ..GenConfig::default()
        };
        let mut compound = 0;
        for seed in 0..200 {
            let d = gen_deduction(&cfg.with_seed(seed));
            assert!(check(&d).unwrap().is_cleanable());
            compound += check(&d).unwrap().has(ViolationKind::NonatomicBot) as usize;
        }
        assert!(compound > 10, "{compound}");
    }

    #[test]
    fn closed_constructions() {
        for seed in 0..30 {
            let cfg = GenConfig::default().with_seed(seed);
            let (d, _) = closed_disjunction(&cfg);
            let r = check(&d).unwrap();
            assert!(r.is_valid(), "{:?}\n{}", r.violations, print_deduction(&d));
            assert!(d.sequent().is_closed());
            let (e, _) = closed_existential(&cfg);
            let r = check(&e).unwrap();
            assert!(r.is_valid(), "{:?}\n{}", r.violations, print_deduction(&e));
            assert!(matches!(e.conclusion(), Formula::Exists(..)));
        }
    }

    #[test]
    fn shrink_finds_small_witness() {
        let d = (0..100)
            .map(|s| gen_deduction(&GenConfig::default().with_seed(s)))
            .find(|d| d.tags().contains(&RuleTag::AndI) && d.size() > 6)
            .expect("a deduction with a conjunction introduction");
        let small = shrink(&d, |x| x.tags().contains(&RuleTag::AndI));
        assert!(small.size() <= d.size());
        assert!(small.tags().contains(&RuleTag::AndI));
        assert!(check(&small).unwrap().is_valid());
        assert_eq!(shrink(&d, |_| false), d);
    }
}
