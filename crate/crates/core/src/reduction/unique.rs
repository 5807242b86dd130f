use super::intro_parts;
use crate::deduction::{Deduction, Fresh, Inference};

/// Splits every introduction whose major class has several leaves into a
/// stack of introductions, each discharging exactly one of them.
pub fn unique_discharge_transform(d: &Deduction) -> Deduction {
    let mut fresh = Fresh::new([d]);
    go(d, &mut fresh)
}

fn go(d: &Deduction, fresh: &mut Fresh) -> Deduction {
    let Deduction::Apply(inf) = d else {
        return d.clone();
    };
    let node = Deduction::Apply(Box::new(Inference {
        rule: inf.rule.clone(),
        premises: inf.premises.iter().map(|c| go(c, fresh)).collect(),
        discharges: inf.discharges.clone(),
    }));
    let tag = inf.rule.tag();
    let (Some(pos), Some(&arb)) = (tag.major_discharge(), tag.arbitrary_children().first()) else {
        return node;
    };
    if !tag.is_intro() {
        return node;
    }
    let leaves = node.discharged_leaves(pos);
    if leaves.len() < 2 {
        return node;
    }
    let k = inf.discharges[pos];
    let mut body = node.premises()[arb].clone();
    let mut classes = vec![k];
    for (addr, formula) in &leaves[1..] {
        let c = fresh.class();
        let rel = crate::deduction::Address(addr.0[1..].to_vec());
        body = body
            .replace_at(&rel, Deduction::leaf(c, formula.clone()))
            .expect("leaf address");
        classes.push(c);
    }
    for (n, &c) in classes.iter().enumerate().rev() {
        let parts = intro_parts(&node, fresh, n > 0);
        let mut specific = parts.specific.into_iter();
        let mut discharges = parts.discharges;
        discharges[pos] = c;
        let premises = (0..tag.arity())
            .map(|i| {
                if i == arb {
                    body.clone()
                } else {
                    specific.next().expect("specific premise")
                }
            })
            .collect();
        body = Deduction::apply(parts.rule, premises, discharges);
    }
    body
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::check;
    use crate::textio::parse_deduction;

    #[test]
    fn splits_double_discharge() {
        let x = parse_deduction(
            r#"(andI (as 1 "p") (as 2 "q")
                 (andI (andE (as 3 "p & q") (as 4 "p") :dis 4 5) (as 3 "p & q") (as 6 "p & (p & q)") :dis 6) :dis 3)"#,
        )
        .unwrap();
        let out = unique_discharge_transform(&x);
        let report = check(&out).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(out.conclusion(), x.conclusion());
        let mut counts = Vec::new();
        out.visit(&mut |_, n| {
            if n.tag().is_intro() {
                counts.push(
                    n.discharged_leaves(n.tag().major_discharge().unwrap())
                        .len(),
                );
            }
        });
        assert!(counts.iter().all(|&c| c <= 1), "{counts:?}");
        assert_eq!(out.tag(), crate::deduction::RuleTag::AndI);
        assert_eq!(out.premises()[2].tag(), crate::deduction::RuleTag::AndI);
    }

    #[test]
    fn leaves_single_discharge_alone() {
        let x = parse_deduction(
            r#"(andI (as 1 "p") (as 2 "q") (andE (as 3 "p & q") (as 4 "p") :dis 4 5) :dis 3)"#,
        )
        .unwrap();
        assert_eq!(unique_discharge_transform(&x), x);
    }
}
