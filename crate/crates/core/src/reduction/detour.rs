use super::{
    direct_from_parts, intro_parts, node_at, rule_connective, simplify_vacuous, IntroParts,
    ReductionError,
};
use crate::analysis::{RedexKind, RedexSite};
use crate::deduction::{
    graft, subst_parameter, subst_pred_parameter, Address, ClassId, Deduction, Fresh, GraftOptions,
    Inference, Rule,
};

const REUSE: GraftOptions = GraftOptions { reuse_first: true };

/// Conversion of one maximal formula. The introduction stays in place while
/// other leaves of its major class remain.
pub fn reduce_detour(d: &Deduction, site: &RedexSite) -> Result<Deduction, ReductionError> {
    if site.kind != RedexKind::MaximalFormula {
        return Err(ReductionError::Precondition("not a maximal formula".into()));
    }
    let intro_addr = site
        .intro
        .as_ref()
        .ok_or_else(|| ReductionError::Stale("missing introduction".into()))?;
    let intro = node_at(d, intro_addr)?;
    let elim = node_at(d, &site.elim)?;
    let (k, arb) = major_class(intro)?;
    match elim.premises().first() {
        Some(Deduction::Assumption { class, .. }) if *class == k && elim.tag().is_elim() => {}
        _ => {
            return Err(ReductionError::Stale(format!(
                "no elimination on class {k} at {}",
                site.elim
            )))
        }
    }
    let leaves = intro
        .discharged_leaves(intro.tag().major_discharge().unwrap_or(0))
        .len();
    let retained = leaves > 1;
    let mut fresh = Fresh::new([d]);
    let parts = intro_parts(intro, &mut fresh, retained);
    let reduct = contract(parts, elim, &mut fresh)?;
    let mut out = d
        .replace_at(&site.elim, reduct)
        .map_err(crate::deduction::EditError::from)?;
    if !retained {
        let body = node_at(&out, &intro_addr.child(arb))?.clone();
        out = out
            .replace_at(intro_addr, body)
            .map_err(crate::deduction::EditError::from)?;
    }
    Ok(simplify_vacuous(&out))
}

/// Converts every use of the introduction's major assumption at once and
/// removes the introduction.
pub fn reduce_detour_simultaneous(
    d: &Deduction,
    intro_addr: &Address,
) -> Result<Deduction, ReductionError> {
    let intro = node_at(d, intro_addr)?;
    if !intro.tag().is_intro() {
        return Err(ReductionError::Precondition(format!(
            "{intro_addr} is not an introduction"
        )));
    }
    let (k, arb) = major_class(intro)?;
    let target = intro
        .intro_major()
        .ok_or_else(|| ReductionError::Precondition("major formula undetermined".into()))?;
    let mut fresh = Fresh::new([d]);
    let mut state = Uses {
        intro,
        k,
        target,
        used: false,
    };
    let body = state.transform(&intro.premises()[arb], &mut fresh)?;
    let out = d
        .replace_at(intro_addr, body)
        .map_err(crate::deduction::EditError::from)?;
    Ok(simplify_vacuous(&out))
}

struct Uses<'a> {
    intro: &'a Deduction,
    k: ClassId,
    target: crate::formula::Formula,
    used: bool,
}

impl Uses<'_> {
    fn parts(&mut self, fresh: &mut Fresh) -> IntroParts {
        let copy = std::mem::replace(&mut self.used, true);
        intro_parts(self.intro, fresh, copy)
    }

    fn transform(&mut self, d: &Deduction, fresh: &mut Fresh) -> Result<Deduction, ReductionError> {
        match d {
            Deduction::Assumption { class, .. } if *class == self.k => {
                let parts = self.parts(fresh);
                direct_from_parts(&self.target, parts, fresh)
            }
            Deduction::Assumption { .. } => Ok(d.clone()),
            Deduction::Apply(inf) => {
                let major_is_k = matches!(inf.premises.first(), Some(Deduction::Assumption { class, .. }) if *class == self.k);
                if major_is_k && inf.rule.tag().is_elim() {
                    let mut premises = vec![inf.premises[0].clone()];
                    for c in &inf.premises[1..] {
                        premises.push(self.transform(c, fresh)?);
                    }
                    let elim = Deduction::apply(inf.rule.clone(), premises, inf.discharges.clone());
                    let parts = self.parts(fresh);
                    return contract(parts, &elim, fresh);
                }
                let premises = inf
                    .premises
                    .iter()
                    .map(|c| self.transform(c, fresh))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Deduction::Apply(Box::new(Inference {
                    rule: inf.rule.clone(),
                    premises,
                    discharges: inf.discharges.clone(),
                })))
            }
        }
    }
}

/// Major class id and arbitrary child index of an introduction.
fn major_class(intro: &Deduction) -> Result<(ClassId, usize), ReductionError> {
    let tag = intro.tag();
    match (tag.major_discharge(), tag.arbitrary_children().first()) {
        (Some(pos), Some(&arb)) if tag.is_intro() => Ok((intro.discharges()[pos], arb)),
        _ => Err(ReductionError::Precondition(format!(
            "`{tag}` is not an introduction"
        ))),
    }
}

/// The deduction replacing `elim`, whose major premise is the introduction's major assumption.
fn contract(
    parts: IntroParts,
    elim: &Deduction,
    fresh: &mut Fresh,
) -> Result<Deduction, ReductionError> {
    let inf = elim.inference().expect("elimination node");
    let (ic, ec) = (
        rule_connective(parts.rule.tag()),
        rule_connective(inf.rule.tag()),
    );
    if ic.is_none() || ic != ec {
        return Err(ReductionError::Precondition(format!(
            "`{}` does not match `{}`",
            parts.rule.tag(),
            inf.rule.tag()
        )));
    }
    let prem = &inf.premises;
    let dis = &inf.discharges;
    let mut spec = parts.specific.into_iter();
    let mut next = || spec.next().expect("specific premise");
    let out = match (&parts.rule, &inf.rule) {
        (Rule::AndI, Rule::AndE) => {
            let (s0, s1) = (next(), next());
            let g = graft(&prem[1], dis[0], &s0, fresh, REUSE)?;
            graft(&g, dis[1], &s1, fresh, REUSE)?
        }
        (Rule::ImpI, Rule::ImpE) => {
            let s0 = next();
            let body = graft(&s0, parts.discharges[0], &prem[1], fresh, REUSE)?;
            graft(&prem[2], dis[0], &body, fresh, REUSE)?
        }
        (Rule::OrI1, Rule::OrE) => graft(&prem[1], dis[0], &next(), fresh, REUSE)?,
        (Rule::OrI2, Rule::OrE) => graft(&prem[2], dis[1], &next(), fresh, REUSE)?,
        (Rule::ExI { witness, .. }, Rule::ExE { eigen }) => {
            let body = subst_parameter(&prem[1], eigen, witness)?;
            graft(&body, dis[0], &next(), fresh, REUSE)?
        }
        (Rule::AllI { eigen }, Rule::AllE { witness }) => {
            let inst = subst_parameter(&next(), eigen, witness)?;
            graft(&prem[1], dis[0], &inst, fresh, REUSE)?
        }
        (Rule::EqI, Rule::EqE(_) | Rule::EqES(_)) => {
            graft(&prem[2], dis[0], &prem[1], fresh, REUSE)?
        }
        (Rule::EqIPrime { pred, .. }, Rule::EqE(pat) | Rule::EqES(pat)) => {
            let (s0, s1) = (next(), next());
            let forward = matches!(inf.rule, Rule::EqE(_));
            let (s, hyp) = if forward {
                (s1, parts.discharges[1])
            } else {
                (s0, parts.discharges[0])
            };
            let s = subst_pred_parameter(&s, pred, pat)?;
            let s = graft(&s, hyp, &prem[1], fresh, REUSE)?;
            graft(&prem[2], dis[0], &s, fresh, REUSE)?
        }
        (i, e) => {
            return Err(ReductionError::Precondition(format!(
                "no conversion for `{}` against `{}`",
                i.tag(),
                e.tag()
            )))
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{maximal_formulas, rank, Rank};
    use crate::deduction::check;
    use crate::textio::parse_deduction;

    fn d(src: &str) -> Deduction {
        parse_deduction(src).unwrap()
    }

    fn reduce_first(x: &Deduction) -> Deduction {
        let site = maximal_formulas(x)
            .into_iter()
            .next()
            .expect("a maximal formula");
        let out = reduce_detour(x, &site).unwrap();
        let report = check(&out).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(out.conclusion(), x.conclusion());
        out
    }

    #[test]
    fn conjunction_detour() {
        let x = d(r#"(andI (as 1 "p") (as 2 "q")
                       (andE (as 3 "p & q") (as 4 "q") :dis 5 4) :dis 3)"#);
        assert_eq!(rank(&x), Rank { d: 1, l: 1 });
        let out = reduce_first(&x);
        assert_eq!(
            out,
            Deduction::leaf(2, crate::textio::parse_formula("q").unwrap())
        );
    }

    #[test]
    fn implication_detour() {
        let x = d(r#"(impI (andE (as 1 "q & r") (as 2 "r") :dis 3 2)
                       (impE (as 4 "q & r -> r") (as 5 "q & r") (as 6 "r") :dis 6) :dis 1 4)"#);
        let out = reduce_first(&x);
        assert!(crate::analysis::is_normal(&out));
        assert_eq!(out.sequent().assumptions.len(), 1);
    }

    #[test]
    fn disjunction_and_quantifiers() {
        for src in [
            r#"(orI2 (as 1 "q") (orE (as 2 "p | q")
                 (impE (as 7 "p -> r") (as 5 "p") (as 8 "r") :dis 8)
                 (impE (as 9 "q -> r") (as 6 "q") (as 10 "r") :dis 10) :dis 5 6) :dis 2)"#,
            r#"(exI (as 1 "P(c)") (exE (as 2 "ex x. P(x)") (exI (as 4 "P(a)") (as 6 "ex y. P(y)") :dis 6 :witness "a" :target "ex y. P(y)") :dis 4 :eigen a) :dis 2 :witness "c" :target "ex x. P(x)")"#,
            r#"(allI (allE (as 5 "all x. P(x)") (as 6 "P(a)") :dis 6 :witness "a") (allE (as 2 "all x. P(x)") (as 3 "P(c)") :dis 3 :witness "c") :dis 2 :eigen a)"#,
        ] {
            let x = d(src);
            assert_eq!(maximal_formulas(&x).len(), 1, "{src}");
            let out = reduce_first(&x);
            assert!(crate::analysis::is_normal(&out), "{src}");
        }
    }

    #[test]
    fn retained_introduction_keeps_other_uses() {
        let x = d(r#"(andI (as 1 "p") (as 2 "q")
                       (andI (andE (as 3 "p & q") (as 4 "p") :dis 4 5) (as 3 "p & q") (as 6 "p & (p & q)") :dis 6) :dis 3)"#);
        let out = reduce_first(&x);
        assert_eq!(out.tag(), crate::deduction::RuleTag::AndI);
        assert_eq!(out.discharged_leaves(0).len(), 1);
        assert!(crate::analysis::is_normal(&out));
    }

    #[test]
    fn equality_detours() {
        let refl = d(
            r#"(eqI (eqE (as 1 "c = c") (as 2 "P(c)") (as 3 "P(c)") :dis 3 :pat "P(x)" x) :dis 1)"#,
        );
        assert_eq!(
            reduce_first(&refl),
            Deduction::leaf(2, crate::textio::parse_formula("P(c)").unwrap())
        );
        let prime = d(r#"(eqIprime
                           (eqES (as 7 "a = b") (as 1 "%F(b)") (as 8 "%F(a)") :dis 8 :pat "%F(x)" x)
                           (eqE (as 7 "a = b") (as 2 "%F(a)") (as 9 "%F(b)") :dis 9 :pat "%F(x)" x)
                           (eqE (as 3 "a = b") (as 4 "Q(a)") (as 5 "Q(b)") :dis 5 :pat "Q(x)" x)
                           :dis 1 2 3 :pred F :terms "a" "b")"#);
        let out = reduce_first(&prime);
        assert_eq!(
            out,
            d(r#"(eqE (as 7 "a = b") (as 4 "Q(a)") (as 9 "Q(b)") :dis 9 :pat "Q(x)" x)"#)
        );
    }

    #[test]
    fn simultaneous_handles_non_major_uses() {
        let x = d(r#"(andI (as 1 "p") (as 2 "q")
                       (andI (andE (as 3 "p & q") (as 4 "p") :dis 4 5) (as 3 "p & q") (as 6 "p & (p & q)") :dis 6) :dis 3)"#);
        let out = reduce_detour_simultaneous(&x, &Address::root()).unwrap();
        let report = check(&out).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(out.conclusion(), x.conclusion());
        assert!(crate::analysis::is_normal(&out));
    }
}
