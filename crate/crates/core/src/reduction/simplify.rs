use crate::deduction::{Deduction, Inference};

/// Replaces every application that discharges vacuously above an arbitrary
/// premise by that premise's subdeduction, to a fixpoint.
pub fn simplify_vacuous(d: &Deduction) -> Deduction {
    let mut cur = d.clone();
    loop {
        let next = pass(&cur);
        if next == cur {
            return next;
        }
        cur = next;
    }
}

fn pass(d: &Deduction) -> Deduction {
    let Deduction::Apply(inf) = d else {
        return d.clone();
    };
    let premises: Vec<Deduction> = inf.premises.iter().map(pass).collect();
    let node = Deduction::Apply(Box::new(Inference {
        rule: inf.rule.clone(),
        premises,
        discharges: inf.discharges.clone(),
    }));
    match vacuous_child(&node) {
        Some(i) => node.premises()[i].clone(),
        None => node,
    }
}

/// First arbitrary child all of whose bound classes are empty.
pub(crate) fn vacuous_child(node: &Deduction) -> Option<usize> {
    let tag = node.tag();
    tag.arbitrary_children().iter().copied().find(|&child| {
        let positions: Vec<usize> = tag
            .discharge_children()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == child)
            .map(|(p, _)| p)
            .collect();
        !positions.is_empty()
            && positions
                .iter()
                .all(|&p| node.discharged_leaves(p).is_empty())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::{check, ViolationKind};
    use crate::textio::parse_deduction;

    #[test]
    fn vacuous_and_intro_removed() {
        let d = parse_deduction(r#"(andI (as 1 "p") (as 2 "q") (as 3 "r") :dis 4)"#).unwrap();
        assert_eq!(
            simplify_vacuous(&d),
            parse_deduction(r#"(as 3 "r")"#).unwrap()
        );
    }

    #[test]
    fn untouched_without_vacuous_discharge() {
        let d = parse_deduction(r#"(andE (as 1 "p & q") (as 2 "p") :dis 2 3)"#).unwrap();
        assert_eq!(simplify_vacuous(&d), d);
    }

    #[test]
    fn nested_vacuous_applications() {
        let d = parse_deduction(
            r#"(orI1 (as 1 "p") (andE (as 2 "q & r") (as 3 "s") :dis 4 5) :dis 6)"#,
        )
        .unwrap();
        let out = simplify_vacuous(&d);
        assert_eq!(out, parse_deduction(r#"(as 3 "s")"#).unwrap());
        assert!(!check(&out).unwrap().has(ViolationKind::VacuousArbitrary));
    }

    #[test]
    fn cascading_removal() {
        // Removing the inner andE drops the only leaf of class 9.
        let d = parse_deduction(
            r#"(impE (as 1 "p -> q") (as 2 "p") (andE (as 9 "q") (as 3 "s") :dis 7 8) :dis 9)"#,
        )
        .unwrap();
        assert_eq!(
            simplify_vacuous(&d),
            parse_deduction(r#"(as 3 "s")"#).unwrap()
        );
    }
}
