use super::edit::EditError;
use super::{Deduction, Inference};
use crate::formula::{Formula, PredPattern, SubstError, Term};

fn map_deduction(
    d: &Deduction,
    f: &mut dyn FnMut(&Formula) -> Result<Formula, EditError>,
    t: &mut dyn FnMut(&Term) -> Term,
) -> Result<Deduction, EditError> {
    Ok(match d {
        Deduction::Assumption { class, formula } => Deduction::Assumption {
            class: *class,
            formula: f(formula)?,
        },
        Deduction::Apply(inf) => {
            let mut err = None;
            let rule = inf.rule.map_formulas(
                &mut |g| match f(g) {
                    Ok(h) => h,
                    Err(e) => {
                        err.get_or_insert(e);
                        g.clone()
                    }
                },
                t,
            );
            if let Some(e) = err {
                return Err(e);
            }
            let premises = inf
                .premises
                .iter()
                .map(|c| map_deduction(c, f, t))
                .collect::<Result<Vec<_>, _>>()?;
            Deduction::Apply(Box::new(Inference {
                rule,
                premises,
                discharges: inf.discharges.clone(),
            }))
        }
    })
}

/// `Ξ^a_t`: replaces the parameter `a` by the closed term `t` throughout.
pub fn subst_parameter(d: &Deduction, a: &str, t: &Term) -> Result<Deduction, EditError> {
    if d.eigens().iter().any(|e| e == a) {
        return Err(EditError::EigenClash(a.to_string()));
    }
    if t.has_vars() {
        return Err(EditError::OpenTerm(t.to_string()));
    }
    map_deduction(d, &mut |f| Ok(f.replace_param(a, t)), &mut |s| {
        s.replace_param(a, t)
    })
}

/// `Σ^F_P`: replaces every `%F(s)` by `P^x_s` throughout.
pub fn subst_pred_parameter(
    d: &Deduction,
    pred: &str,
    pat: &PredPattern,
) -> Result<Deduction, EditError> {
    if d.pred_eigens().iter().any(|p| p == pred) {
        return Err(EditError::EigenClash(format!("%{pred}")));
    }
    if !pat.body.is_atomic() {
        return Err(EditError::Subst(SubstError::PredArity {
            pred: pred.to_string(),
            found: 0,
        }));
    }
    map_deduction(
        d,
        &mut |f| f.replace_pred_param(pred, pat).map_err(EditError::Subst),
        &mut |s| s.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_deduction, parse_formula, parse_pattern};

    #[test]
    fn parameter_substitution() {
        let d = Deduction::leaf(1, parse_formula("P(a)").unwrap());
        let out = subst_parameter(&d, "a", &Term::constant("C")).unwrap();
        assert_eq!(out, Deduction::leaf(1, parse_formula("P(C)").unwrap()));
        assert_eq!(subst_parameter(&d, "b", &Term::constant("C")).unwrap(), d);
    }

    #[test]
    fn eigen_clash_is_reported() {
        let d = parse_deduction(r#"(exE (as 1 "ex x. P(x)") (as 3 "q") :dis 2 :eigen a)"#).unwrap();
        assert!(matches!(
            subst_parameter(&d, "a", &Term::param("b")),
            Err(EditError::EigenClash(_))
        ));
    }

    #[test]
    fn pred_substitution() {
        let pat = parse_pattern("R(x,x)", "x").unwrap();
        let d = Deduction::leaf(1, parse_formula("%F(a) & q").unwrap());
        let out = subst_pred_parameter(&d, "F", &pat).unwrap();
        assert_eq!(
            out,
            Deduction::leaf(1, parse_formula("R(a,a) & q").unwrap())
        );
        let p = parse_pattern("P(x)", "x").unwrap();
        let d = Deduction::leaf(1, parse_formula("%F(b)").unwrap());
        assert_eq!(
            subst_pred_parameter(&d, "F", &p).unwrap(),
            Deduction::leaf(1, parse_formula("P(b)").unwrap())
        );
        assert_eq!(subst_pred_parameter(&d, "G", &p).unwrap(), d);
    }
}
