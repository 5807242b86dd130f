//! Maximal formulas, segments, rank, branches and the normal-form properties.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::deduction::{Address, ClassId, Deduction, RuleTag};
use crate::formula::{is_subformula, is_subformula_leibniz, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RedexKind {
    MaximalFormula,
    MaximalSegment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedexSite {
    pub kind: RedexKind,
    pub formula: Formula,
    pub degree: usize,
    /// Introduction discharging the maximal formula.
    pub intro: Option<Address>,
    /// Elimination whose major premise ends the redex.
    pub elim: Address,
    /// Maximal formula: the leaf. Segment: `C1 .. Cn`, top first.
    pub occurrences: Vec<Address>,
}

impl RedexSite {
    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    /// Address of the last occurrence (the elimination's major premise).
    pub fn last(&self) -> &Address {
        self.occurrences.last().expect("nonempty redex")
    }

    /// Primary address used in reports and traces.
    pub fn anchor(&self) -> &Address {
        match self.kind {
            RedexKind::MaximalFormula => self.intro.as_ref().unwrap_or(&self.elim),
            RedexKind::MaximalSegment => self.last(),
        }
    }
}

/// `⟨d, l⟩`, ordered lexicographically.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rank {
    pub d: usize,
    pub l: usize,
}

impl Rank {
    pub const ZERO: Rank = Rank { d: 0, l: 0 };
}

impl PartialOrd for Rank {
    fn partial_cmp(&self, other: &Rank) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rank {
    fn cmp(&self, other: &Rank) -> Ordering {
        (self.d, self.l).cmp(&(other.d, other.l))
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.d, self.l)
    }
}

fn intro_for(
    d: &Deduction,
    dischargers: &BTreeMap<ClassId, (Address, usize)>,
    leaf: &Address,
) -> Option<Address> {
    let Some(Deduction::Assumption { class, .. }) = d.get(leaf) else {
        return None;
    };
    let (node, pos) = dischargers.get(class)?;
    let tag = d.get(node)?.tag();
    (tag.is_intro() && tag.major_discharge() == Some(*pos)).then(|| node.clone())
}

pub fn maximal_formulas(d: &Deduction) -> Vec<RedexSite> {
    let Ok(dischargers) = d.dischargers() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    d.visit(&mut |addr, node| {
        let tag = node.tag();
        if !tag.is_elim() || tag == RuleTag::BotE {
            return;
        }
        let major = addr.child(0);
        if let Some(intro) = intro_for(d, &dischargers, &major) {
            let formula = node.premises()[0].conclusion().clone();
            out.push(RedexSite {
                kind: RedexKind::MaximalFormula,
                degree: formula.degree(),
                formula,
                intro: Some(intro),
                elim: addr.clone(),
                occurrences: vec![major],
            });
        }
    });
    out
}

/// Every segment of length at least two, as `C1 .. Cn` address lists.
pub fn segments(d: &Deduction) -> Vec<Vec<Address>> {
    let mut out = Vec::new();
    d.visit(&mut |addr, _| {
        let is_arbitrary = match (addr.parent(), addr.last()) {
            (Some(p), Some(i)) => d.get(&p).map(|n| n.tag().is_arbitrary(i)).unwrap_or(false),
            _ => false,
        };
        if is_arbitrary {
            return;
        }
        let mut paths = Vec::new();
        upward(d, addr, &mut vec![addr.clone()], &mut paths);
        for mut p in paths {
            if p.len() > 1 {
                p.reverse();
                out.push(p);
            }
        }
    });
    out
}

fn upward(d: &Deduction, addr: &Address, path: &mut Vec<Address>, out: &mut Vec<Vec<Address>>) {
    let node = d.get(addr).expect("address in tree");
    let arbitrary = node.tag().arbitrary_children();
    if arbitrary.is_empty() {
        out.push(path.clone());
        return;
    }
    for &c in arbitrary {
        let next = addr.child(c);
        path.push(next.clone());
        upward(d, &next, path, out);
        path.pop();
    }
}

pub fn maximal_segments(d: &Deduction) -> Vec<RedexSite> {
    segments(d)
        .into_iter()
        .filter_map(|occ| {
            let last = occ.last()?.clone();
            let (parent, idx) = (last.parent()?, last.last()?);
            let node = d.get(&parent)?;
            if !(node.tag().is_elim() && idx == 0) {
                return None;
            }
            let formula = d.get(&last)?.conclusion().clone();
            Some(RedexSite {
                kind: RedexKind::MaximalSegment,
                degree: formula.degree(),
                formula,
                intro: None,
                elim: parent,
                occurrences: occ,
            })
        })
        .collect()
}

/// Maximal formulas followed by maximal segments.
pub fn redexes(d: &Deduction) -> Vec<RedexSite> {
    let mut out = maximal_formulas(d);
    out.extend(maximal_segments(d));
    out
}

pub fn rank_of(sites: &[RedexSite]) -> Rank {
    let d = sites.iter().map(|s| s.degree).max().unwrap_or(0);
    let l = sites
        .iter()
        .filter(|s| s.degree == d)
        .map(|s| match s.kind {
            RedexKind::MaximalFormula => 1,
            RedexKind::MaximalSegment => s.len(),
        })
        .sum();
    if sites.is_empty() {
        Rank::ZERO
    } else {
        Rank { d, l }
    }
}

pub fn rank(d: &Deduction) -> Rank {
    rank_of(&redexes(d))
}

pub fn is_normal(d: &Deduction) -> bool {
    maximal_formulas(d).is_empty() && maximal_segments(d).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub e_part: Vec<Vec<Address>>,
    /// Minimal formula (one occurrence) or minimal segment.
    pub minimal: Vec<Address>,
    pub i_part: Vec<Vec<Address>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub occurrences: Vec<Address>,
    pub order: usize,
    pub decomposition: Option<Decomposition>,
}

enum Step {
    End,
    Next(Vec<Address>),
}

fn successors(d: &Deduction, addr: &Address) -> Step {
    let (Some(parent), Some(idx)) = (addr.parent(), addr.last()) else {
        return Step::End;
    };
    let node = d.get(&parent).expect("parent exists");
    let tag = node.tag();
    if tag.is_arbitrary(idx) {
        return Step::Next(vec![parent]);
    }
    if tag.is_elim() && idx == 0 {
        if tag == RuleTag::BotE {
            return Step::Next(vec![parent]);
        }
        let mut next = Vec::new();
        for pos in 0..node.discharges().len() {
            next.extend(
                node.discharged_leaves(pos)
                    .into_iter()
                    .map(|(rel, _)| Address([parent.0.clone(), rel.0].concat())),
            );
        }
        return Step::Next(next);
    }
    if tag.is_intro() && tag.side_children().contains(&idx) {
        let pos = tag.major_discharge().expect("intro");
        let next = node
            .discharged_leaves(pos)
            .into_iter()
            .map(|(rel, _)| Address([parent.0.clone(), rel.0].concat()))
            .collect();
        return Step::Next(next);
    }
    Step::End
}

fn is_branch_start(
    d: &Deduction,
    dischargers: &BTreeMap<ClassId, (Address, usize)>,
    class: ClassId,
) -> bool {
    match dischargers.get(&class) {
        None => true,
        Some((node, pos)) => {
            let tag = d.get(node).expect("discharger").tag();
            tag.is_intro() && tag.major_discharge() != Some(*pos)
        }
    }
}

fn is_arbitrary_premise(d: &Deduction, addr: &Address) -> bool {
    match (addr.parent(), addr.last()) {
        (Some(p), Some(i)) => d.get(&p).map(|n| n.tag().is_arbitrary(i)).unwrap_or(false),
        _ => false,
    }
}

fn is_major_premise(d: &Deduction, addr: &Address) -> bool {
    match (addr.parent(), addr.last()) {
        (Some(p), Some(0)) => d.get(&p).map(|n| n.tag().is_elim()).unwrap_or(false),
        _ => false,
    }
}

fn decompose(d: &Deduction, occ: &[Address]) -> Decomposition {
    let mut units: Vec<Vec<Address>> = Vec::new();
    for (i, a) in occ.iter().enumerate() {
        let joins = i > 0
            && is_arbitrary_premise(d, &occ[i - 1])
            && occ[i - 1].parent().as_ref() == Some(a);
        match units.last_mut() {
            Some(u) if joins => u.push(a.clone()),
            _ => units.push(vec![a.clone()]),
        }
    }
    let split = units
        .iter()
        .position(|u| !is_major_premise(d, u.last().unwrap()))
        .unwrap_or(units.len());
    let mut rest = units.split_off(split);
    let minimal = if rest.is_empty() {
        Vec::new()
    } else {
        rest.remove(0)
    };
    Decomposition {
        e_part: units,
        minimal,
        i_part: rest,
    }
}

/// All branches with their orders; decompositions only for normal deductions.
pub fn branches(d: &Deduction) -> Vec<Branch> {
    let Ok(dischargers) = d.dischargers() else {
        return Vec::new();
    };
    let mut paths: Vec<Vec<Address>> = Vec::new();
    for (addr, class, _) in d.leaves() {
        if !is_branch_start(d, &dischargers, class) {
            continue;
        }
        let mut stack = vec![vec![addr]];
        while let Some(path) = stack.pop() {
            match successors(d, path.last().unwrap()) {
                Step::End => paths.push(path),
                Step::Next(next) if next.is_empty() => paths.push(path),
                Step::Next(next) => {
                    for n in next.into_iter().rev() {
                        let mut p = path.clone();
                        p.push(n);
                        stack.push(p);
                    }
                }
            }
        }
    }
    let mut orders: Vec<Option<usize>> = paths
        .iter()
        .map(|p| p.last().unwrap().0.is_empty().then_some(0))
        .collect();
    loop {
        let mut changed = false;
        for i in 0..paths.len() {
            if orders[i].is_some() {
                continue;
            }
            let end = paths[i].last().unwrap();
            let Some(parent) = end.parent() else { continue };
            let major = parent.child(0);
            let best = paths
                .iter()
                .zip(&orders)
                .filter(|(p, o)| o.is_some() && p.contains(&major))
                .filter_map(|(_, o)| *o)
                .min();
            if let Some(o) = best {
                orders[i] = Some(o + 1);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let normal = is_normal(d);
    paths
        .into_iter()
        .zip(orders)
        .map(|(occ, order)| Branch {
            decomposition: normal.then(|| decompose(d, &occ)),
            order: order.unwrap_or(usize::MAX),
            occurrences: occ,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub offending: Vec<Address>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.offending.is_empty()
    }
}

/// Every occurrence is a subformula of the conclusion or of an open
/// assumption. Equations count atoms containing either side as subformulas.
pub fn check_subformula_property(d: &Deduction) -> PropertyReport {
    check_subformula_with(d, is_subformula_leibniz)
}

/// The same property under the plain subformula relation.
pub fn check_strict_subformula_property(d: &Deduction) -> PropertyReport {
    check_subformula_with(d, is_subformula)
}

fn check_subformula_with(d: &Deduction, rel: fn(&Formula, &Formula) -> bool) -> PropertyReport {
    let sequent = d.sequent();
    let mut roots = sequent.formula_set();
    roots.push(sequent.conclusion);
    let mut offending = Vec::new();
    d.visit(&mut |addr, node| {
        let f = node.conclusion();
        if !roots.iter().any(|r| rel(f, r)) {
            offending.push(addr.clone());
        }
    });
    PropertyReport { offending }
}

/// Every elimination's major premise is an assumption leaf.
pub fn check_theorem2(d: &Deduction) -> PropertyReport {
    let mut offending = Vec::new();
    d.visit(&mut |addr, node| {
        if node.tag().is_elim() && !matches!(node.premises()[0], Deduction::Assumption { .. }) {
            offending.push(addr.child(0));
        }
    });
    PropertyReport { offending }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_deduction, parse_formula};

    const D_MF: &str =
        r#"(andI (as 0 "p") (as 2 "q") (andE (as 1 "p & q") (as 3 "p") :dis 3 4) :dis 1)"#;

    fn d(src: &str) -> Deduction {
        parse_deduction(src).unwrap()
    }

    #[test]
    fn d_mf_has_one_maximal_formula() {
        let x = d(D_MF);
        let mf = maximal_formulas(&x);
        assert_eq!(mf.len(), 1);
        assert_eq!(mf[0].formula, parse_formula("p & q").unwrap());
        assert_eq!(mf[0].degree, 1);
        assert_eq!(mf[0].intro, Some(Address::root()));
        assert_eq!(mf[0].elim, Address(vec![2]));
        assert!(maximal_segments(&x).is_empty());
        assert_eq!(rank(&x), Rank { d: 1, l: 1 });
        assert!(!is_normal(&x));
    }

    #[test]
    fn leaf_is_normal() {
        let x = d(r#"(as 1 "p")"#);
        assert!(maximal_formulas(&x).is_empty());
        assert_eq!(rank(&x), Rank::ZERO);
        assert!(is_normal(&x));
        let b = branches(&x);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].order, 0);
        let dec = b[0].decomposition.as_ref().unwrap();
        assert!(dec.e_part.is_empty() && dec.i_part.is_empty());
        assert_eq!(dec.minimal, vec![Address::root()]);
    }

    #[test]
    fn segment_through_or_intro() {
        // C -> D concluded via orI then used as major premise of impE.
        let x = d(r#"(impE
  (orI1 (as 1 "p") (impE (as 4 "p | q -> r -> s") (as 2 "p | q") (as 3 "r -> s") :dis 3) :dis 2)
  (as 5 "r")
  (as 6 "s")
  :dis 6)"#);
        let segs = maximal_segments(&x);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].formula, parse_formula("r -> s").unwrap());
        assert_eq!(segs[0].len(), 3);
        assert_eq!(rank(&x), Rank { d: 1, l: 3 });
    }

    #[test]
    fn rank_order_is_lexicographic() {
        assert!(Rank { d: 1, l: 9 } < Rank { d: 2, l: 0 });
        assert!(Rank { d: 2, l: 1 } < Rank { d: 2, l: 2 });
    }

    #[test]
    fn branch_orders_with_imp_elim() {
        let x = d(r#"(impE (as 1 "p -> q") (as 2 "p") (as 3 "q") :dis 3)"#);
        assert!(is_normal(&x));
        let b = branches(&x);
        let orders: Vec<usize> = b.iter().map(|b| b.order).collect();
        assert!(orders.contains(&0) && orders.contains(&1));
        let minor = b.iter().find(|b| b.order == 1).unwrap();
        assert_eq!(minor.occurrences, vec![Address(vec![1])]);
    }

    #[test]
    fn identity_proof_branches() {
        let x = d(r#"(impI (as 1 "p") (as 2 "p -> p") :dis 1 2)"#);
        let b = branches(&x);
        assert_eq!(b.len(), 1);
        let dec = b[0].decomposition.as_ref().unwrap();
        assert!(dec.e_part.is_empty());
        assert_eq!(dec.minimal, vec![Address(vec![0])]);
        assert_eq!(dec.i_part, vec![vec![Address(vec![1]), Address::root()]]);
    }

    #[test]
    fn subformula_property_failure() {
        let x =
            d(r#"(andI (as 0 "r") (as 2 "s") (andE (as 1 "r & s") (as 3 "r") :dis 3 4) :dis 1)"#);
        let report = check_subformula_property(&x);
        assert_eq!(report.offending, vec![Address(vec![2, 0])]);
        let normal = d(r#"(andE (as 1 "r & s") (as 3 "r") :dis 3 4)"#);
        assert!(check_subformula_property(&normal).passed());
    }

    #[test]
    fn theorem2_report() {
        assert!(check_theorem2(&d(D_MF)).passed());
        assert!(check_theorem2(&d(r#"(as 1 "p")"#)).passed());
        let x =
            d(r#"(andE (andI (as 1 "p") (as 2 "q") (as 3 "p & q") :dis 3) (as 4 "p") :dis 4 5)"#);
        assert!(!check_theorem2(&x).passed());
    }
}
