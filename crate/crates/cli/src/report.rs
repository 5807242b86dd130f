//! Command reports: a stable text rendering and a JSON rendering.

use std::fmt::Write as _;

use gennd_core::analysis::{Branch, Rank, RedexKind, RedexSite};
use gennd_core::deduction::{Deduction, Violation};
use gennd_core::fuzz::SeedResult;
use gennd_core::normalize::{Side, Trace};
use gennd_core::textio::{print_formula, Style};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Violations,
    Error,
    BudgetExhausted,
    NotClosed,
    Counterexample,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violations | Status::NotClosed | Status::Counterexample => 1,
            Status::Error => 2,
            Status::BudgetExhausted => 3,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violations => "violations",
            Status::Error => "error",
            Status::BudgetExhausted => "budget-exhausted",
            Status::NotClosed => "not-closed",
            Status::Counterexample => "counterexample",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentReport {
    pub assumptions: Vec<String>,
    pub conclusion: String,
}

impl SequentReport {
    pub fn of(d: &Deduction) -> SequentReport {
        let s = d.sequent();
        SequentReport {
            assumptions: s
                .formula_set()
                .iter()
                .map(|f| print_formula(f, Style::Pretty))
                .collect(),
            conclusion: print_formula(&s.conclusion, Style::Pretty),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedexReport {
    pub kind: RedexKind,
    pub formula: String,
    pub degree: usize,
    pub intro: Option<String>,
    pub elim: String,
    pub length: usize,
}

impl From<&RedexSite> for RedexReport {
    fn from(s: &RedexSite) -> RedexReport {
        RedexReport {
            kind: s.kind,
            formula: print_formula(&s.formula, Style::Pretty),
            degree: s.degree,
            intro: s.intro.as_ref().map(|a| a.to_string()),
            elim: s.elim.to_string(),
            length: s.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchReport {
    pub occurrences: Vec<String>,
    pub order: usize,
    pub e_part: Option<Vec<Vec<String>>>,
    pub minimal: Option<Vec<String>>,
    pub i_part: Option<Vec<Vec<String>>>,
}

fn addrs(v: &[gennd_core::deduction::Address]) -> Vec<String> {
    v.iter().map(|a| a.to_string()).collect()
}

impl From<&Branch> for BranchReport {
    fn from(b: &Branch) -> BranchReport {
        let d = b.decomposition.as_ref();
        BranchReport {
            occurrences: addrs(&b.occurrences),
            order: b.order,
            e_part: d.map(|d| d.e_part.iter().map(|u| addrs(u)).collect()),
            minimal: d.map(|d| addrs(&d.minimal)),
            i_part: d.map(|d| d.i_part.iter().map(|u| addrs(u)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub side: Option<Side>,
    pub witness: Option<String>,
    pub proves: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub seeds: u64,
    pub first_seed: u64,
    pub max_nodes: usize,
    pub clean: u64,
    pub failures: Vec<SeedResult>,
    pub witness: Option<String>,
    pub witness_nodes: Option<usize>,
    /// Seeds where reducing some top-degree maximal formula would not lower the rank.
    pub literal_witnesses: Vec<(u64, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub file: Option<String>,
    pub status: Status,
    pub message: Option<String>,
    pub sequent: Option<SequentReport>,
    pub violations: Vec<Violation>,
    pub rank: Option<Rank>,
    pub normal: Option<bool>,
    pub redexes: Vec<RedexReport>,
    pub branches: Vec<BranchReport>,
    pub subformula_property: Option<bool>,
    pub trace: Option<Trace>,
    pub extraction: Option<Extraction>,
    pub fuzz: Option<FuzzSummary>,
    pub output: Option<String>,
    /// Wall-clock phases in milliseconds, present only when requested.
    pub timings: Vec<(String, f64)>,
}

impl Report {
    pub fn new(command: &str, file: Option<&str>) -> Report {
        Report {
            command: command.to_string(),
            file: file.map(str::to_string),
            status: Status::Ok,
            message: None,
            sequent: None,
            violations: Vec::new(),
            rank: None,
            normal: None,
            redexes: Vec::new(),
            branches: Vec::new(),
            subformula_property: None,
            trace: None,
            extraction: None,
            fuzz: None,
            output: None,
            timings: Vec::new(),
        }
    }

    pub fn fail(mut self, status: Status, message: impl Into<String>) -> Report {
        self.status = status;
        self.message = Some(message.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self, color: bool) -> String {
        let paint = |s: &str, good: bool| {
            if color {
                format!("\x1b[{}m{s}\x1b[0m", if good { 32 } else { 31 })
            } else {
                s.to_string()
            }
        };
        let yes_no = |b: bool| paint(if b { "yes" } else { "no" }, b);
        let pass = |b: bool| paint(if b { "pass" } else { "fail" }, b);
        let mut out = String::new();
        let w = &mut out;
        let head = match &self.file {
            Some(f) => format!("{} {f}", self.command),
            None => self.command.clone(),
        };
        let _ = writeln!(
            w,
            "{head}: {}",
            paint(self.status.as_str(), self.status == Status::Ok)
        );
        if let Some(m) = &self.message {
            let _ = writeln!(w, "  {m}");
        }
        if let Some(s) = &self.sequent {
            let lhs = s.assumptions.join(", ");
            let _ = writeln!(
                w,
                "sequent: {}⊢ {}",
                if lhs.is_empty() { lhs } else { lhs + " " },
                s.conclusion
            );
        }
        for v in &self.violations {
            let _ = writeln!(w, "violation {} at {}: {}", v.kind, v.at, v.message);
        }
        if let Some(r) = self.rank {
            let _ = writeln!(w, "rank: {r}");
        }
        if let Some(n) = self.normal {
            let _ = writeln!(w, "normal: {}", yes_no(n));
        }
        for r in &self.redexes {
            match r.kind {
                RedexKind::MaximalFormula => {
                    let _ = writeln!(
                        w,
                        "maximal formula {} (degree {}) introduced at {}, eliminated at {}",
                        r.formula,
                        r.degree,
                        r.intro.as_deref().unwrap_or("?"),
                        r.elim
                    );
                }
                RedexKind::MaximalSegment => {
                    let _ = writeln!(
                        w,
                        "maximal segment {} (degree {}, length {}) eliminated at {}",
                        r.formula, r.degree, r.length, r.elim
                    );
                }
            }
        }
        for b in &self.branches {
            let _ = write!(w, "branch order {}: {}", b.order, b.occurrences.join(" "));
            if let (Some(e), Some(m), Some(i)) = (&b.e_part, &b.minimal, &b.i_part) {
                let units = |u: &Vec<Vec<String>>| {
                    u.iter().map(|x| x.join("~")).collect::<Vec<_>>().join(" ")
                };
                let _ = write!(
                    w,
                    " | E: {} | min: {} | I: {}",
                    units(e),
                    m.join("~"),
                    units(i)
                );
            }
            let _ = writeln!(w);
        }
        if let Some(p) = self.subformula_property {
            let _ = writeln!(w, "subformula property: {}", pass(p));
        }
        if let Some(t) = &self.trace {
            let _ = writeln!(w, "strategy: {}", t.strategy);
            let _ = writeln!(w, "steps: {}", t.steps.len());
            let ranks: Vec<String> = t.ranks().iter().map(|r| r.to_string()).collect();
            let _ = writeln!(w, "ranks: {}", ranks.join(" "));
        }
        if let Some(x) = &self.extraction {
            if let Some(side) = x.side {
                let _ = writeln!(
                    w,
                    "side: {}",
                    if side == Side::Left { "left" } else { "right" }
                );
            }
            if let Some(t) = &x.witness {
                let _ = writeln!(w, "witness: {t}");
            }
            let _ = writeln!(w, "proves: {}", x.proves);
        }
        if let Some(f) = &self.fuzz {
            let _ = writeln!(
                w,
                "seeds: {} from {} (max {} nodes), clean: {}, failing: {}",
                f.seeds,
                f.first_seed,
                f.max_nodes,
                f.clean,
                f.failures.len()
            );
            for r in &f.failures {
                for finding in &r.findings {
                    let _ = writeln!(w, "seed {} ({} nodes): {finding}", r.seed, r.nodes);
                }
            }
            for (seed, site) in &f.literal_witnesses {
                let _ = writeln!(
                    w,
                    "seed {seed}: literal strategy would not lower rank: {site}"
                );
            }
            if let Some(p) = &f.witness {
                let _ = writeln!(w, "witness: {p} ({} nodes)", f.witness_nodes.unwrap_or(0));
            }
        }
        if let Some(o) = &self.output {
            let _ = writeln!(w, "output: {o}");
        }
        for (phase, ms) in &self.timings {
            let _ = writeln!(w, "time {phase}: {ms:.3} ms");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gennd_core::analysis::redexes;
    use gennd_core::textio::parse_deduction;

    fn sample() -> Report {
        let d = parse_deduction(
            r#"(andI (as 1 "p") (as 2 "q") (andE (as 3 "p & q") (as 4 "p") :dis 4 5) :dis 3)"#,
        )
        .unwrap();
        let mut r = Report::new("analyze", Some("mf.ndi"));
        r.sequent = Some(SequentReport::of(&d));
        r.rank = Some(Rank { d: 1, l: 1 });
        r.normal = Some(false);
        r.redexes = redexes(&d).iter().map(RedexReport::from).collect();
        r.timings.push(("analyze".into(), 0.25));
        r
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn text_mentions_redexes_without_color() {
        let text = sample().to_text(false);
        assert!(text.starts_with("analyze mf.ndi: ok\n"));
        assert!(text.contains("rank: 1,1"));
        assert!(
            text.contains("maximal formula p & q (degree 1) introduced at root, eliminated at 2")
        );
        assert!(!text.contains('\x1b'));
        assert!(sample().to_text(true).contains('\x1b'));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Ok.exit_code(), 0);
        assert_eq!(Status::Violations.exit_code(), 1);
        assert_eq!(Status::Error.exit_code(), 2);
        assert_eq!(Status::BudgetExhausted.exit_code(), 3);
    }
}
