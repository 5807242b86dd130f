//! Invariant battery run on generated deductions.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    check_subformula_property, check_theorem2, is_normal, rank, redexes, RedexKind,
};
use crate::deduction::{check, Deduction, RuleTag};
use crate::formula::{alpha_key, Formula};
use crate::generator::{gen_deduction, GenConfig};
use crate::normalize::{apply_site, normalize, preprocess, Strategy};
use crate::reduction::{atomize_falsum, unique_discharge_transform};
use crate::textio::{print_formula, Style};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Generated,
    Terminates,
    RankDecreases,
    Normal,
    Valid,
    Theorem2,
    SubformulaProperty,
    Conclusion,
    Assumptions,
    EndsInIntroduction,
    Consistency,
    UniqueDischarge,
    Atomization,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::Generated => "generated",
            Property::Terminates => "terminates",
            Property::RankDecreases => "rank-decreases",
            Property::Normal => "normal",
            Property::Valid => "valid",
            Property::Theorem2 => "theorem2",
            Property::SubformulaProperty => "subformula-property",
            Property::Conclusion => "conclusion",
            Property::Assumptions => "assumptions",
            Property::EndsInIntroduction => "ends-in-introduction",
            Property::Consistency => "consistency",
            Property::UniqueDischarge => "unique-discharge",
            Property::Atomization => "atomization",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub property: Property,
    pub strategy: Option<Strategy>,
    pub detail: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.strategy {
            Some(s) => write!(f, "{} ({s}): {}", self.property, self.detail),
            None => write!(f, "{}: {}", self.property, self.detail),
        }
    }
}

fn finding(property: Property, strategy: Option<Strategy>, detail: impl Into<String>) -> Finding {
    Finding {
        property,
        strategy,
        detail: detail.into(),
    }
}

fn shapes(d: &Deduction) -> BTreeSet<String> {
    d.sequent()
        .assumptions
        .iter()
        .map(|(_, f)| alpha_key(f))
        .collect()
}

/// Normalization invariants under one strategy.
pub fn normalization_findings(d: &Deduction, strategy: Strategy) -> Vec<Finding> {
    let s = Some(strategy);
    let (out, trace) = match normalize(d, strategy, None) {
        Ok(r) => r,
        Err(e) => return vec![finding(Property::Terminates, s, e.to_string())],
    };
    let mut found = Vec::new();
    let mut fail = |p: Property, detail: String| found.push(finding(p, s, detail));
    if !trace.is_strictly_decreasing() {
        let ranks: Vec<String> = trace.ranks().iter().map(|r| r.to_string()).collect();
        fail(Property::RankDecreases, ranks.join(" "));
    }
    if !is_normal(&out) {
        fail(Property::Normal, "output has redexes".into());
    }
    match check(&out) {
        Ok(r) if r.is_valid() => {}
        Ok(r) => fail(
            Property::Valid,
            r.violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ),
        Err(e) => fail(Property::Valid, e.to_string()),
    }
    let t2 = check_theorem2(&out);
    if !t2.passed() {
        fail(Property::Theorem2, format!("{:?}", t2.offending));
    }
    let sf = check_subformula_property(&out);
    if !sf.passed() {
        fail(Property::SubformulaProperty, format!("{:?}", sf.offending));
    }
    if out.conclusion() != d.conclusion() {
        fail(Property::Conclusion, "conclusion changed".into());
    }
    if !shapes(&out).is_subset(&shapes(d)) {
        fail(Property::Assumptions, "new open assumption".into());
    }
    if out.sequent().is_closed() && !out.tag().is_intro() {
        fail(
            Property::EndsInIntroduction,
            format!("closed normal form ends in {}", out.tag()),
        );
    }
    found
}

pub fn unique_discharge_findings(d: &Deduction) -> Vec<Finding> {
    let out = unique_discharge_transform(d);
    let mut found = Vec::new();
    if !check(&out).map(|r| r.is_valid()).unwrap_or(false) {
        found.push(finding(Property::UniqueDischarge, None, "output invalid"));
    }
    if out.conclusion() != d.conclusion() || shapes(&out) != shapes(d) {
        found.push(finding(Property::UniqueDischarge, None, "sequent changed"));
    }
    let mut multiple = false;
    out.visit(&mut |_, n| {
        let tag = n.tag();
        if let (true, Some(p)) = (tag.is_intro(), tag.major_discharge()) {
            multiple |= n.discharged_leaves(p).len() != 1;
        }
    });
    if multiple {
        found.push(finding(
            Property::UniqueDischarge,
            None,
            "an introduction discharges other than one major assumption",
        ));
    }
    found
}

pub fn atomization_findings(d: &Deduction) -> Vec<Finding> {
    let out = atomize_falsum(d);
    let mut found = Vec::new();
    let mut bad = false;
    out.visit(&mut |_, n| {
        if n.tag() == RuleTag::BotE && !n.conclusion().is_atomic() {
            bad = true;
        }
    });
    if bad {
        found.push(finding(
            Property::Atomization,
            None,
            "non-atomic falsum elimination remains",
        ));
    }
    if out.conclusion() != d.conclusion() || !shapes(&out).is_subset(&shapes(d)) {
        found.push(finding(Property::Atomization, None, "sequent changed"));
    }
    if !check(&out).map(|r| r.is_valid()).unwrap_or(false) {
        found.push(finding(Property::Atomization, None, "output invalid"));
    }
    found
}

/// Every invariant on one deduction.
pub fn findings(d: &Deduction, strategies: &[Strategy]) -> Vec<Finding> {
    let mut out = Vec::new();
    if !check(d).map(|r| r.is_valid()).unwrap_or(false) {
        out.push(finding(
            Property::Generated,
            None,
            "generated deduction is invalid",
        ));
        return out;
    }
    if d.sequent().is_closed() && *d.conclusion() == Formula::Bottom {
        out.push(finding(
            Property::Consistency,
            None,
            "closed deduction of falsum",
        ));
    }
    for &s in strategies {
        out.extend(normalization_findings(d, s));
    }
    out.extend(unique_discharge_findings(d));
    out.extend(atomization_findings(d));
    out
}

/// Top-degree maximal formulas whose one-step reduction fails to lower the
/// rank. The engine never picks these when a better site exists; listing
/// them probes whether reducing an arbitrary highest-degree maximal formula
/// is enough on its own.
pub fn literal_rank_witnesses(d: &Deduction) -> Vec<String> {
    let (pre, _) = preprocess(d);
    let before = rank(&pre);
    redexes(&pre)
        .iter()
        .filter(|s| s.kind == RedexKind::MaximalFormula && s.degree == before.d)
        .filter_map(|s| {
            let (out, _) = apply_site(&pre, s, Strategy::Official).ok()?;
            let after = rank(&out);
            (after >= before).then(|| {
                let f = print_formula(&s.formula, Style::Pretty);
                format!("{f} at {}: rank {before} -> {after}", s.anchor())
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub nodes: usize,
    pub findings: Vec<Finding>,
    /// Informational, see [`literal_rank_witnesses`].
    #[serde(default)]
    pub literal_witnesses: Vec<String>,
}

pub fn run_seed(cfg: &GenConfig, seed: u64, strategies: &[Strategy]) -> (Deduction, SeedResult) {
    let d = gen_deduction(&cfg.with_seed(seed));
    let findings = findings(&d, strategies);
    let literal_witnesses = literal_rank_witnesses(&d);
    let nodes = d.size();
    (
        d,
        SeedResult {
            seed,
            nodes,
            findings,
            literal_witnesses,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_is_clean() {
        let cfg = GenConfig::default();
        for seed in 0..40 {
            let (d, r) = run_seed(&cfg, seed, &[Strategy::Official, Strategy::Simultaneous]);
            assert!(
                r.findings.is_empty(),
                "seed {seed}: {:?}\n{}",
                r.findings,
                crate::textio::print_deduction(&d)
            );
        }
    }

    #[test]
    fn literal_probe_on_single_detour() {
        let d = crate::textio::parse_deduction(
            r#"(andI (as 1 "p") (as 2 "q") (andE (as 3 "p & q") (as 4 "p") :dis 4 5) :dis 3)"#,
        )
        .unwrap();
        assert!(literal_rank_witnesses(&d).is_empty());
    }
}
