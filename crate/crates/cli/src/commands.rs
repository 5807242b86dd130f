use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use gennd_core::analysis::{branches, check_subformula_property, is_normal, rank, redexes};
use gennd_core::deduction::{check_with, relabel_fresh, CheckOptions, Deduction};
use gennd_core::formula::Formula;
use gennd_core::fuzz::{findings, run_seed, SeedResult};
use gennd_core::generator::{shrink, GenConfig};
use gennd_core::normalize::{
    extract_disjunct, extract_witness, normalize as run_normalize, NormalizeError, Strategy,
};
use gennd_core::textio::{parse_deduction, print_deduction, print_formula, print_term, Style};
use rayon::prelude::*;

use crate::report::{
    BranchReport, Extraction, FuzzSummary, RedexReport, Report, SequentReport, Status,
};
use crate::Common;

/// A report plus a deduction destined for standard output.
pub struct Outcome {
    pub report: Report,
    pub stdout: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Outcome {
        Outcome {
            report,
            stdout: None,
        }
    }
}

fn canonical(d: &Deduction) -> String {
    print_deduction(&relabel_fresh(d))
}

fn load(file: &Path) -> anyhow::Result<Deduction> {
    let src =
        fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    parse_deduction(&src).with_context(|| format!("cannot parse {}", file.display()))
}

fn opts(common: &Common) -> CheckOptions {
    CheckOptions {
        strict_eq: common.strict_eq,
    }
}

fn error_chain(e: &anyhow::Error) -> String {
    e.chain()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(": ")
}

struct Clock {
    on: bool,
    start: Instant,
}

impl Clock {
    fn new(common: &Common) -> Clock {
        Clock {
            on: common.timings,
            start: Instant::now(),
        }
    }

    fn lap(&mut self, report: &mut Report, phase: &str) {
        if self.on {
            report
                .timings
                .push((phase.to_string(), self.start.elapsed().as_secs_f64() * 1e3));
        }
        self.start = Instant::now();
    }
}

/// Parses and checks `file`; `Err` is a finished report.
fn load_checked(
    file: &Path,
    report: &mut Report,
    common: &Common,
    cleanable: bool,
) -> Result<Deduction, ()> {
    let mut clock = Clock::new(common);
    let d = match load(file) {
        Ok(d) => d,
        Err(e) => {
            report.status = Status::Error;
            report.message = Some(error_chain(&e));
            return Err(());
        }
    };
    clock.lap(report, "parse");
    report.sequent = Some(SequentReport::of(&d));
    match check_with(&d, opts(common)) {
        Err(e) => {
            report.status = Status::Error;
            report.message = Some(e.to_string());
            Err(())
        }
        Ok(r) => {
            clock.lap(report, "check");
            let accepted = if cleanable {
                r.is_cleanable()
            } else {
                r.is_valid()
            };
            report.violations = r.violations;
            if accepted {
                Ok(d)
            } else {
                report.status = Status::Violations;
                Err(())
            }
        }
    }
}

fn label(file: &Path) -> String {
    file.display().to_string()
}

pub fn check(file: &Path, common: &Common) -> Outcome {
    let mut report = Report::new("check", Some(&label(file)));
    let _ = load_checked(file, &mut report, common, false);
    report.into()
}

pub fn analyze(file: &Path, common: &Common) -> Outcome {
    let mut report = Report::new("analyze", Some(&label(file)));
    let Ok(d) = load_checked(file, &mut report, common, false) else {
        return report.into();
    };
    let mut clock = Clock::new(common);
    report.rank = Some(rank(&d));
    report.normal = Some(is_normal(&d));
    report.redexes = redexes(&d).iter().map(RedexReport::from).collect();
    report.branches = branches(&d).iter().map(BranchReport::from).collect();
    report.subformula_property = Some(check_subformula_property(&d).passed());
    clock.lap(&mut report, "analyze");
    report.into()
}

pub struct NormalizeOpts {
    pub strategy: Strategy,
    pub trace: Option<PathBuf>,
    pub max_steps: Option<usize>,
    pub output: Option<PathBuf>,
}

/// Writes `text` to `path`, or hands it back for standard output.
fn emit(text: String, path: Option<&Path>, report: &mut Report) -> Option<String> {
    match path {
        None => Some(text),
        Some(p) => match fs::write(p, text) {
            Ok(()) => {
                report.output = Some(p.display().to_string());
                None
            }
            Err(e) => {
                report.status = Status::Error;
                report.message = Some(format!("cannot write {}: {e}", p.display()));
                None
            }
        },
    }
}

pub fn normalize(file: &Path, o: &NormalizeOpts, common: &Common) -> Outcome {
    let mut report = Report::new("normalize", Some(&label(file)));
    let Ok(d) = load_checked(file, &mut report, common, true) else {
        return report.into();
    };
    let mut clock = Clock::new(common);
    let result = run_normalize(&d, o.strategy, o.max_steps);
    clock.lap(&mut report, "normalize");
    match result {
        Ok((out, trace)) => {
            report.rank = Some(rank(&out));
            report.normal = Some(true);
            report.sequent = Some(SequentReport::of(&out));
            if let Some(p) = &o.trace {
                if let Err(e) = fs::write(p, format!("{trace}\n")) {
                    report.status = Status::Error;
                    report.message = Some(format!("cannot write {}: {e}", p.display()));
                }
            }
            report.trace = Some(trace);
            let stdout = emit(canonical(&out), o.output.as_deref(), &mut report);
            Outcome { report, stdout }
        }
        Err(NormalizeError::Budget {
            budget,
            ranks,
            dump,
        }) => {
            let ranks: Vec<String> = ranks.iter().map(|r| r.to_string()).collect();
            report.status = Status::BudgetExhausted;
            report.message = Some(format!(
                "step budget {budget} exhausted; ranks {}",
                ranks.join(" ")
            ));
            let partial = parse_deduction(&dump)
                .map(|p| canonical(&p))
                .unwrap_or(dump);
            let stdout = emit(partial, o.output.as_deref(), &mut report);
            Outcome { report, stdout }
        }
        Err(e) => report.fail(Status::Error, e.to_string()).into(),
    }
}

pub fn extract(file: &Path, output: Option<&Path>, common: &Common) -> Outcome {
    let mut report = Report::new("extract", Some(&label(file)));
    let Ok(d) = load_checked(file, &mut report, common, true) else {
        return report.into();
    };
    let open = d.sequent();
    if !open.is_closed() {
        let n = open.formula_set().len();
        return report
            .fail(
                Status::NotClosed,
                format!("not a closed proof: {n} open assumption formula(s)"),
            )
            .into();
    }
    let (side, witness, proof) = match d.conclusion() {
        Formula::Or(..) => match extract_disjunct(&d) {
            Ok((side, p)) => (Some(side), None, p),
            Err(e) => return report.fail(Status::Error, e.to_string()).into(),
        },
        Formula::Exists(..) => match extract_witness(&d) {
            Ok((t, p)) => (None, Some(print_term(&t)), p),
            Err(e) => return report.fail(Status::Error, e.to_string()).into(),
        },
        other => {
            let shown = print_formula(other, Style::Pretty);
            return report
                .fail(
                    Status::Error,
                    format!("conclusion {shown} is neither a disjunction nor an existential"),
                )
                .into();
        }
    };
    report.extraction = Some(Extraction {
        side,
        witness,
        proves: print_formula(proof.conclusion(), Style::Pretty),
    });
    let stdout = emit(canonical(&proof), output, &mut report);
    Outcome { report, stdout }
}

pub struct FuzzOpts {
    pub seeds: u64,
    pub first_seed: u64,
    pub max_nodes: usize,
    pub strategy: Option<Strategy>,
    pub output: PathBuf,
}

pub fn fuzz(o: &FuzzOpts, common: &Common) -> Outcome {
    let mut report = Report::new("fuzz", None);
    let mut clock = Clock::new(common);
    let cfg = GenConfig {
        max_nodes: o.max_nodes,
        ..GenConfig::default()
    };
    let strategies: Vec<Strategy> = match o.strategy {
        Some(s) => vec![s],
        None => Strategy::ALL.to_vec(),
    };
    let mut results: Vec<(Deduction, SeedResult)> = (o.first_seed..o.first_seed + o.seeds)
        .into_par_iter()
        .map(|seed| run_seed(&cfg, seed, &strategies))
        .filter(|(_, r)| !r.findings.is_empty() || !r.literal_witnesses.is_empty())
        .collect();
    results.sort_by_key(|(_, r)| r.seed);
    let literal_witnesses: Vec<(u64, String)> = results
        .iter()
        .flat_map(|(_, r)| r.literal_witnesses.iter().map(|w| (r.seed, w.clone())))
        .collect();
    results.retain(|(_, r)| !r.findings.is_empty());
    clock.lap(&mut report, "sweep");
    let mut summary = FuzzSummary {
        seeds: o.seeds,
        first_seed: o.first_seed,
        max_nodes: o.max_nodes,
        clean: o.seeds - results.len() as u64,
        failures: results.iter().map(|(_, r)| r.clone()).collect(),
        witness: None,
        witness_nodes: None,
        literal_witnesses,
    };
    if let Some((d, r)) = results.first() {
        let property = r.findings[0].property;
        let small = shrink(d, |x| {
            findings(x, &strategies)
                .iter()
                .any(|f| f.property == property)
        });
        clock.lap(&mut report, "shrink");
        summary.witness_nodes = Some(small.size());
        match fs::write(&o.output, canonical(&small)) {
            Ok(()) => summary.witness = Some(o.output.display().to_string()),
            Err(e) => report.message = Some(format!("cannot write {}: {e}", o.output.display())),
        }
        report.status = Status::Counterexample;
    }
    report.fuzz = Some(summary);
    report.into()
}
