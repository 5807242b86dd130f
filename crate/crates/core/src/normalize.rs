//! Strategy engine: redex selection, the normalization loop, traces and the
//! extraction corollaries.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{is_normal, rank, redexes, Rank, RedexKind, RedexSite};
use crate::deduction::{
    check, graft, Address, CheckReport, ClassId, Deduction, Fresh, GraftOptions, Rule,
    StructureError, Violation,
};
use crate::formula::{Formula, Term};
use crate::reduction::{
    atomize_falsum, direct_from_parts, intro_parts, permute, reduce_detour,
    reduce_detour_simultaneous, rule_connective, simplify_vacuous, unique_discharge_transform,
    ReductionError, ReductionStep, StepKind,
};
use crate::textio::{print_deduction, print_formula, Style};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    Official,
    Simultaneous,
    UniqueDischarge,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::Official,
        Strategy::Simultaneous,
        Strategy::UniqueDischarge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Official => "official",
            Strategy::Simultaneous => "simultaneous",
            Strategy::UniqueDischarge => "unique-discharge",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Strategy, String> {
        if s == "unique" {
            return Ok(Strategy::UniqueDischarge);
        }
        Strategy::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                format!("unknown strategy `{s}` (expected official, simultaneous or unique)")
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub strategy: Strategy,
    /// Cleanup applied before the first reduction.
    pub preprocess: Vec<StepKind>,
    pub initial: Rank,
    pub steps: Vec<ReductionStep>,
    /// SHA-256 of the canonical print of the result.
    pub digest: String,
}

impl Trace {
    pub fn ranks(&self) -> Vec<Rank> {
        std::iter::once(self.initial)
            .chain(self.steps.iter().map(|s| s.after))
            .collect()
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.ranks().windows(2).all(|w| w[1] < w[0])
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.preprocess {
            writeln!(f, "{p}")?;
        }
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        write!(f, "digest {}", self.digest)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalizeError {
    #[error("input is not a valid deduction: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("step budget of {budget} exhausted at rank {}", .ranks.last().copied().unwrap_or_default())]
    Budget {
        budget: usize,
        ranks: Vec<Rank>,
        dump: String,
    },
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn default_max_steps(d: &Deduction) -> usize {
    10 * d.size() * d.size()
}

/// Position order: left to right, deeper nodes before their ancestors.
fn leftmost_innermost(a: &Address, b: &Address) -> Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        if x != y {
            return x.cmp(y);
        }
    }
    b.0.len().cmp(&a.0.len())
}

fn within(addr: &Address, root: &Address) -> bool {
    root.is_prefix_of(addr)
}

fn degree_sites(sites: &[RedexSite], degree: usize) -> impl Iterator<Item = &RedexSite> {
    sites.iter().filter(move |s| s.degree == degree)
}

/// Every redex in preference order: top-degree ones satisfying the selection
/// rule first, then other top-degree ones, then the rest.
pub fn candidates(d: &Deduction) -> Vec<RedexSite> {
    let sites = redexes(d);
    let Some(top) = sites.iter().map(|s| s.degree).max() else {
        return Vec::new();
    };
    let mut eligible = Vec::new();
    let mut other = Vec::new();
    for s in &sites {
        if s.degree != top {
            continue;
        }
        let blocked = match s.kind {
            RedexKind::MaximalSegment => {
                let elim = d.get(&s.elim).expect("redex address");
                let minors: Vec<Address> = (1..elim.premises().len())
                    .map(|i| s.elim.child(i))
                    .collect();
                degree_sites(&sites, top).any(|o| {
                    (o.last() != s.last() && o.elim != s.elim && within(&o.elim, s.last()))
                        || minors.iter().any(|m| within(&o.elim, m))
                })
            }
            RedexKind::MaximalFormula => {
                let intro_addr = s.intro.as_ref().expect("maximal formula introduction");
                let intro = d.get(intro_addr).expect("redex address");
                let elim = d.get(&s.elim).expect("redex address");
                let mut roots: Vec<Address> = intro
                    .tag()
                    .side_children()
                    .iter()
                    .map(|&i| intro_addr.child(i))
                    .collect();
                roots.extend((1..elim.premises().len()).map(|i| s.elim.child(i)));
                degree_sites(&sites, top).any(|o| roots.iter().any(|r| within(&o.elim, r)))
            }
        };
        if blocked {
            other.push(s.clone());
        } else {
            eligible.push(s.clone());
        }
    }
    let order = |v: &mut Vec<RedexSite>| {
        v.sort_by(|a, b| {
            let ka = a.kind == RedexKind::MaximalFormula;
            let kb = b.kind == RedexKind::MaximalFormula;
            ka.cmp(&kb)
                .then_with(|| leftmost_innermost(a.anchor(), b.anchor()))
        })
    };
    order(&mut eligible);
    order(&mut other);
    let mut lower: Vec<RedexSite> = sites.iter().filter(|s| s.degree != top).cloned().collect();
    order(&mut lower);
    eligible.into_iter().chain(other).chain(lower).collect()
}

/// The redex the strategy reduces next; `None` iff `d` is normal.
pub fn select_redex(d: &Deduction) -> Option<RedexSite> {
    candidates(d).into_iter().next()
}

/// Applies the strategy's reduction for one site.
pub fn apply_site(
    d: &Deduction,
    site: &RedexSite,
    strategy: Strategy,
) -> Result<(Deduction, StepKind), ReductionError> {
    match site.kind {
        RedexKind::MaximalSegment => {
            let elim = d.get(&site.elim).map(|n| n.tag());
            let feeding = d.get(site.last()).map(|n| n.tag());
            let out = permute(d, site)?;
            let (Some(elim), Some(feeding)) = (elim, feeding) else {
                return Err(ReductionError::Stale("segment vanished".into()));
            };
            Ok((out, StepKind::Permute { elim, feeding }))
        }
        RedexKind::MaximalFormula => {
            let intro = site
                .intro
                .as_ref()
                .ok_or_else(|| ReductionError::Stale("missing introduction".into()))?;
            let tag = d
                .get(intro)
                .ok_or_else(|| ReductionError::Stale(format!("no node at {intro}")))?
                .tag();
            let connective = rule_connective(tag)
                .ok_or_else(|| ReductionError::Precondition("not an introduction".into()))?;
            if strategy == Strategy::Simultaneous {
                Ok((
                    reduce_detour_simultaneous(d, intro)?,
                    StepKind::DetourSimultaneous { connective },
                ))
            } else {
                Ok((reduce_detour(d, site)?, StepKind::Detour { connective }))
            }
        }
    }
}

fn site_addresses(site: &RedexSite) -> Vec<Address> {
    match site.kind {
        RedexKind::MaximalFormula => site
            .intro
            .iter()
            .cloned()
            .chain([site.elim.clone()])
            .collect(),
        RedexKind::MaximalSegment => vec![site.last().clone()],
    }
}

/// Simplification and ⊥E atomization, recording which ones changed anything.
pub fn preprocess(d: &Deduction) -> (Deduction, Vec<StepKind>) {
    let mut log = Vec::new();
    let mut cur = simplify_vacuous(d);
    if cur != *d {
        log.push(StepKind::Simplify);
    }
    let atomized = atomize_falsum(&cur);
    if atomized != cur {
        log.push(StepKind::Atomize);
        cur = simplify_vacuous(&atomized);
    }
    (cur, log)
}

pub fn digest(d: &Deduction) -> String {
    Sha256::digest(print_deduction(d).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// One reduction step on a preprocessed deduction at rank `current`: the
/// first candidate whose reduction lowers the rank, else the first one that
/// applies. `None` iff `d` is normal.
pub fn step(
    d: &Deduction,
    strategy: Strategy,
    current: Rank,
) -> Result<Option<(Deduction, ReductionStep)>, NormalizeError> {
    let cands = candidates(d);
    let mut chosen: Option<(Deduction, StepKind, Rank, &RedexSite)> = None;
    let mut first_err = None;
    for site in &cands {
        match apply_site(d, site, strategy) {
            Ok((next, kind)) => {
                let r = rank(&next);
                let better = r < current;
                if chosen.is_none() || better {
                    chosen = Some((next, kind, r, site));
                }
                if better {
                    break;
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match chosen {
        Some((next, kind, after, site)) => Ok(Some((
            next,
            ReductionStep {
                kind,
                sites: site_addresses(site),
                before: current,
                after,
            },
        ))),
        None => match first_err {
            Some(e) => Err(e.into()),
            None => Ok(None),
        },
    }
}

/// Normalizes a valid deduction. `max_steps` defaults to ten times the
/// squared node count of the preprocessed input.
pub fn normalize(
    d: &Deduction,
    strategy: Strategy,
    max_steps: Option<usize>,
) -> Result<(Deduction, Trace), NormalizeError> {
    let report = check(d)?;
    if !report.is_cleanable() {
        return Err(NormalizeError::Invalid(report.violations));
    }
    let (mut cur, mut pre) = preprocess(d);
    if strategy == Strategy::UniqueDischarge {
        let split = unique_discharge_transform(&cur);
        if split != cur {
            pre.push(StepKind::UniqueDischargeSplit);
            cur = split;
        }
    }
    let budget = max_steps.unwrap_or_else(|| default_max_steps(&cur));
    let initial = rank(&cur);
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut current_rank = initial;
    loop {
        if is_normal(&cur) {
            break;
        }
        if steps.len() >= budget {
            let mut ranks = vec![initial];
            ranks.extend(steps.iter().map(|s| s.after));
            return Err(NormalizeError::Budget {
                budget,
                ranks,
                dump: print_deduction(&cur),
            });
        }
        let Some((next, step)) = step(&cur, strategy, current_rank)? else {
            break;
        };
        current_rank = step.after;
        steps.push(step);
        cur = next;
    }
    let trace = Trace {
        strategy,
        preprocess: pre,
        initial,
        steps,
        digest: digest(&cur),
    };
    Ok((cur, trace))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("deduction has {} open assumption(s)", .0.len())]
    OpenAssumptions(Vec<Formula>),
    #[error("conclusion `{0}` is not a {1}")]
    WrongConclusion(String, &'static str),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("normal form does not end in the expected introduction")]
    NoIntroduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

fn closed_normal(
    d: &Deduction,
    shape: &'static str,
    ok: fn(&Formula) -> bool,
) -> Result<Deduction, ExtractError> {
    let open = d.sequent();
    if !open.is_closed() {
        return Err(ExtractError::OpenAssumptions(open.formula_set()));
    }
    if !ok(d.conclusion()) {
        return Err(ExtractError::WrongConclusion(
            print_formula(d.conclusion(), Style::Pretty),
            shape,
        ));
    }
    Ok(normalize(d, Strategy::Official, None)?.0)
}

/// Follows arbitrary premises of the final introductions down to the leaf
/// ending the main thread. Returns the chain and the introduction whose
/// major class that leaf belongs to.
fn main_thread(d: &Deduction) -> Option<(Vec<Address>, Address)> {
    let mut chain = Vec::new();
    let mut at = Address::root();
    loop {
        let node = d.get(&at)?;
        match node {
            Deduction::Assumption { class, .. } => {
                let owner = chain.iter().find(|a: &&Address| {
                    let n = d.get(a).expect("chain address");
                    n.tag().major_discharge().map(|p| n.discharges()[p]) == Some(*class)
                })?;
                return Some((chain.clone(), owner.clone()));
            }
            Deduction::Apply(inf) => {
                let tag = inf.rule.tag();
                if !tag.is_intro() {
                    return None;
                }
                chain.push(at.clone());
                at = at.child(*tag.arbitrary_children().first()?);
            }
        }
    }
}

/// The specific premise of the introduction ending the main thread, made
/// closed by grafting direct introductions for the thread's major classes,
/// then normalized.
fn thread_premise(d: &Deduction) -> Result<(Rule, Deduction), ExtractError> {
    let (chain, owner) = main_thread(d).ok_or(ExtractError::NoIntroduction)?;
    let node = d.get(&owner).expect("owner address");
    let inf = node.inference().expect("introduction");
    let side = *inf
        .rule
        .tag()
        .side_children()
        .first()
        .ok_or(ExtractError::NoIntroduction)?;
    let mut sub = inf.premises[side].clone();
    let mut fresh = Fresh::new([d]);
    for addr in &chain {
        let intro = d.get(addr).expect("chain address");
        let tag = intro.tag();
        let k: ClassId = intro.discharges()[tag.major_discharge().expect("introduction")];
        if !sub.open_leaves().iter().any(|(_, c, _)| *c == k) {
            continue;
        }
        let target = intro.intro_major().ok_or(ExtractError::NoIntroduction)?;
        let parts = intro_parts(intro, &mut fresh, true);
        let direct = direct_from_parts(&target, parts, &mut fresh)?;
        sub = graft(&sub, k, &direct, &mut fresh, GraftOptions::default())
            .map_err(ReductionError::from)?;
    }
    let (sub, _) = normalize(&sub, Strategy::Official, None)?;
    Ok((inf.rule.clone(), sub))
}

/// Disjunction property: a closed proof of a disjunction yields a closed
/// normal proof of one disjunct.
pub fn extract_disjunct(d: &Deduction) -> Result<(Side, Deduction), ExtractError> {
    let normal = closed_normal(d, "disjunction", |f| matches!(f, Formula::Or(..)))?;
    let (rule, sub) = thread_premise(&normal)?;
    let side = match rule {
        Rule::OrI1 => Side::Left,
        Rule::OrI2 => Side::Right,
        _ => return Err(ExtractError::NoIntroduction),
    };
    Ok((side, sub))
}

/// Existence property: a closed proof of `∃xA` yields a term `t` and a closed
/// normal proof of `A(t)`.
pub fn extract_witness(d: &Deduction) -> Result<(Term, Deduction), ExtractError> {
    let normal = closed_normal(d, "existential", |f| matches!(f, Formula::Exists(..)))?;
    match thread_premise(&normal)? {
        (Rule::ExI { witness, .. }, sub) => Ok((witness, sub)),
        _ => Err(ExtractError::NoIntroduction),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConsistencyReport {
    /// The tree fails the checker.
    Invalid { violations: Vec<Violation> },
    /// Not a closed proof.
    OpenAssumptions { assumptions: Vec<String> },
    /// Closed, but the conclusion is not falsum.
    NotFalsum { conclusion: String },
    /// Closed, valid and concluding ⊥; the normal form's main thread shows
    /// where the argument breaks. Never expected.
    Refuted { normal_form: String },
}

impl ConsistencyReport {
    /// True for every verdict except [`ConsistencyReport::Refuted`].
    pub fn consistent(&self) -> bool {
        !matches!(self, ConsistencyReport::Refuted { .. })
    }
}

/// Rejects a purported proof of ⊥, naming the failed precondition.
pub fn check_consistency_argument(d: &Deduction) -> ConsistencyReport {
    let report: CheckReport = match check(d) {
        Ok(r) => r,
        Err(e) => {
            return ConsistencyReport::Invalid {
                violations: vec![Violation {
                    at: Address::root(),
                    kind: crate::deduction::ViolationKind::RuleShape,
                    message: e.to_string(),
                }],
            }
        }
    };
    if !report.is_valid() {
        return ConsistencyReport::Invalid {
            violations: report.violations,
        };
    }
    let seq = d.sequent();
    if !seq.is_closed() {
        return ConsistencyReport::OpenAssumptions {
            assumptions: seq
                .formula_set()
                .iter()
                .map(|f| print_formula(f, Style::Pretty))
                .collect(),
        };
    }
    if *d.conclusion() != Formula::Bottom {
        return ConsistencyReport::NotFalsum {
            conclusion: print_formula(d.conclusion(), Style::Pretty),
        };
    }
    let normal = match normalize(d, Strategy::Official, None) {
        Ok((n, _)) => n,
        Err(_) => d.clone(),
    };
    ConsistencyReport::Refuted {
        normal_form: print_deduction(&normal),
    }
}
