use super::{node_at, ReductionError};
use crate::analysis::{RedexKind, RedexSite};
use crate::deduction::edit::rename_param;
use crate::deduction::{freshen, Deduction, EditError, Fresh};

/// Moves the elimination ending a maximal segment above the rule `r` that
/// concludes the segment's last occurrence, once per arbitrary premise of `r`.
pub fn permute(d: &Deduction, site: &RedexSite) -> Result<Deduction, ReductionError> {
    if site.kind != RedexKind::MaximalSegment || site.len() < 2 {
        return Err(ReductionError::Precondition("not a maximal segment".into()));
    }
    let last = site.last();
    if last.parent().as_ref() != Some(&site.elim) || last.last() != Some(0) {
        return Err(ReductionError::Stale(format!(
            "{last} is not the major premise of {}",
            site.elim
        )));
    }
    let elim = node_at(d, &site.elim)?;
    let mut r = node_at(d, last)?.clone();
    let arbitrary = r.tag().arbitrary_children();
    if arbitrary.is_empty() {
        return Err(ReductionError::Stale(format!(
            "{last} has no arbitrary premise"
        )));
    }
    let mut fresh = Fresh::new([d]);
    if let Some(eigen) = r
        .inference()
        .and_then(|i| i.rule.eigen())
        .map(str::to_string)
    {
        let new = fresh.param();
        r = rename_param(&r, &eigen, &new);
    }
    let Deduction::Apply(inf) = &mut r else {
        unreachable!("rule with arbitrary premises")
    };
    for (n, &c) in arbitrary.iter().enumerate() {
        let mut copy = if n == 0 {
            elim.clone()
        } else {
            freshen(elim, &mut fresh)
        };
        let Deduction::Apply(e) = &mut copy else {
            unreachable!("elimination node")
        };
        e.premises[0] = std::mem::replace(
            &mut inf.premises[c],
            Deduction::leaf(0, crate::formula::Formula::Top),
        );
        inf.premises[c] = copy;
    }
    Ok(d.replace_at(&site.elim, r).map_err(EditError::from)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{maximal_segments, rank, Rank};
    use crate::deduction::check;
    use crate::textio::parse_deduction;

    fn d(src: &str) -> Deduction {
        parse_deduction(src).unwrap()
    }

    #[test]
    fn permutes_through_disjunction_elimination() {
        let x = d(r#"(andE
                       (orE (as 1 "p | q")
                         (impE (as 8 "p -> r & s") (as 4 "p") (as 2 "r & s") :dis 2)
                         (impE (as 9 "q -> r & s") (as 5 "q") (as 3 "r & s") :dis 3) :dis 4 5)
                       (as 6 "r") :dis 6 7)"#);
        let sites = maximal_segments(&x);
        assert_eq!(sites.len(), 2);
        assert_eq!(rank(&x), Rank { d: 1, l: 6 });
        let out = permute(&x, &sites[0]).unwrap();
        let report = check(&out).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(out.tag(), crate::deduction::RuleTag::OrE);
        assert_eq!(rank(&out), Rank { d: 1, l: 4 });
        assert_ne!(
            out.premises()[1].discharges(),
            out.premises()[2].discharges()
        );
    }

    #[test]
    fn renames_eigenparameter_of_permuted_rule() {
        let x = d(r#"(allE
                       (exE (as 1 "ex x. P(x)")
                         (allE (as 5 "all x. (P(x) -> all y. Q(y))")
                           (impE (as 6 "P(a) -> all y. Q(y)") (as 3 "P(a)") (as 7 "all y. Q(y)") :dis 7) :dis 6 :witness "a")
                         :dis 3 :eigen a)
                       (as 4 "Q(a)") :dis 4 :witness "a")"#);
        let site = maximal_segments(&x).into_iter().next().unwrap();
        let out = permute(&x, &site).unwrap();
        let report = check(&out).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_ne!(out.inference().unwrap().rule.eigen(), Some("a"));
    }
}
