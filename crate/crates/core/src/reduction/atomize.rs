use crate::deduction::{freshen, Deduction, Fresh, Inference, Rule};
use crate::formula::{Formula, Term};

/// Restricts every ⊥E to atomic conclusions. Equations are expanded through
/// =I′ with a fresh predicate parameter, so no ⊥E concludes an equation.
/// An expansion through ⊤ drops its ⊥ premise; discharges this leaves
/// vacuous are then simplified away.
pub fn atomize_falsum(d: &Deduction) -> Deduction {
    let mut fresh = Fresh::new([d]);
    let out = go(d, &mut fresh);
    if out == *d {
        out
    } else {
        super::simplify_vacuous(&out)
    }
}

fn go(d: &Deduction, fresh: &mut Fresh) -> Deduction {
    let Deduction::Apply(inf) = d else {
        return d.clone();
    };
    let premises: Vec<Deduction> = inf.premises.iter().map(|c| go(c, fresh)).collect();
    if let Rule::BotE(concl) = &inf.rule {
        let pi = premises.into_iter().next().expect("botE premise");
        return expand(pi, concl, fresh);
    }
    Deduction::Apply(Box::new(Inference {
        rule: inf.rule.clone(),
        premises,
        discharges: inf.discharges.clone(),
    }))
}

fn bot(pi: Deduction, concl: Formula, fresh: &mut Fresh) -> Deduction {
    expand(pi, &concl, fresh)
}

/// ⊥E from `pi` to `concl`, expanded by the degree of `concl`.
fn expand(pi: Deduction, concl: &Formula, fresh: &mut Fresh) -> Deduction {
    let k = fresh.class();
    let leaf = Deduction::leaf(k, concl.clone());
    match concl {
        f if f.is_atomic() => Deduction::apply(Rule::BotE(f.clone()), vec![pi], vec![]),
        Formula::Bottom => pi,
        Formula::And(a, b) => {
            let copy = freshen(&pi, fresh);
            let left = bot(pi, (**a).clone(), fresh);
            let right = bot(copy, (**b).clone(), fresh);
            Deduction::apply(Rule::AndI, vec![left, right, leaf], vec![k])
        }
        Formula::Or(a, _) => {
            let left = bot(pi, (**a).clone(), fresh);
            Deduction::apply(Rule::OrI1, vec![left, leaf], vec![k])
        }
        Formula::Imp(_, b) => {
            let hyp = fresh.class();
            let body = bot(pi, (**b).clone(), fresh);
            Deduction::apply(Rule::ImpI, vec![body, leaf], vec![hyp, k])
        }
        Formula::Forall(..) => {
            let eigen = fresh.param();
            let inst = concl
                .instantiate(&Term::Param(eigen.clone()))
                .expect("universal");
            let body = bot(pi, inst, fresh);
            Deduction::apply(Rule::AllI { eigen }, vec![body, leaf], vec![k])
        }
        Formula::Exists(..) => {
            let witness = pi
                .open_leaves()
                .iter()
                .flat_map(|(_, _, f)| f.params())
                .min()
                .map(Term::Param)
                .unwrap_or_else(|| Term::constant("0"));
            let inst = concl.instantiate(&witness).expect("existential");
            let body = bot(pi, inst, fresh);
            Deduction::apply(
                Rule::ExI {
                    witness,
                    target: concl.clone(),
                },
                vec![body, leaf],
                vec![k],
            )
        }
        Formula::Top => Deduction::apply(Rule::TopI, vec![leaf], vec![k]),
        Formula::Eq(t1, t2) => {
            let pred = fresh.pred();
            let fp = |t: &Term| Formula::PredParam(pred.clone(), vec![t.clone()]);
            let (i, j) = (fresh.class(), fresh.class());
            let copy = freshen(&pi, fresh);
            let left = bot(pi, fp(t1), fresh);
            let right = bot(copy, fp(t2), fresh);
            Deduction::apply(
                Rule::EqIPrime {
                    pred: pred.clone(),
                    lhs: t1.clone(),
                    rhs: t2.clone(),
                },
                vec![left, right, leaf],
                vec![i, j, k],
            )
        }
        _ => unreachable!("atomic formulas handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::check;
    use crate::textio::{parse_deduction, parse_formula};

    fn bot_concls(d: &Deduction) -> Vec<Formula> {
        let mut out = Vec::new();
        d.visit(&mut |_, n| {
            if let Some(Inference {
                rule: Rule::BotE(c),
                ..
            }) = n.inference()
            {
                out.push(c.clone());
            }
        });
        out
    }

    #[test]
    fn conjunction_figure() {
        let d = parse_deduction(r#"(botE (as 1 "_|_") :concl "p & q")"#).unwrap();
        let out = atomize_falsum(&d);
        assert_eq!(out.tag(), crate::deduction::RuleTag::AndI);
        assert_eq!(
            bot_concls(&out),
            vec![parse_formula("p").unwrap(), parse_formula("q").unwrap()]
        );
        assert!(check(&out).unwrap().is_valid());
        assert_eq!(out.sequent().conclusion, parse_formula("p & q").unwrap());
    }

    #[test]
    fn atomic_unchanged() {
        let d = parse_deduction(r#"(botE (as 1 "_|_") :concl "r")"#).unwrap();
        assert_eq!(atomize_falsum(&d), d);
    }

    #[test]
    fn nested_and_quantified() {
        for concl in [
            "(p | q) & r",
            "p -> q & r",
            "all x. P(x) & Q(x)",
            "ex x. P(x)",
            "T",
            "a = b",
            "_|_",
        ] {
            let src = format!(r#"(botE (as 1 "_|_") :concl "{concl}")"#);
            let d = parse_deduction(&src).unwrap();
            let out = atomize_falsum(&d);
            let report = check(&out).unwrap();
            assert!(report.is_valid(), "{concl}: {:?}", report.violations);
            assert!(bot_concls(&out).iter().all(Formula::is_atomic));
            assert_eq!(out.conclusion(), &parse_formula(concl).unwrap());
        }
    }
}
