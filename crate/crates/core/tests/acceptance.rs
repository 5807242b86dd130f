//! Acceptance battery: one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gennd_core::analysis::{check_subformula_property, check_theorem2, is_normal, redexes};
use gennd_core::deduction::{check, Deduction, RuleTag};
use gennd_core::formula::Formula;
use gennd_core::generator::{
    closed_disjunction, closed_existential, enumerate, gen_deduction, GenConfig,
};
use gennd_core::normalize::{
    apply_site, extract_disjunct, extract_witness, normalize, preprocess, Side, Strategy, Trace,
};
use gennd_core::reduction::{atomize_falsum, unique_discharge_transform};
use gennd_core::textio::print_deduction;

const SEEDS: u64 = 1000;
const SWEEP: u64 = 10_000;
const SAMPLES: u64 = 500;
const EXTRACTIONS: u64 = 50;
const ORACLE_NODES: usize = 12;
const ORACLE_TAPES: usize = 200_000;
const ORACLE_DEPTH: usize = 40;
const ORACLE_STATES: usize = 5_000;

struct Outcome {
    failures: Vec<String>,
    note: String,
    limit: Option<Duration>,
}

impl Outcome {
    fn new(note: impl Into<String>) -> Outcome {
        Outcome {
            failures: Vec::new(),
            note: note.into(),
            limit: None,
        }
    }

    fn within(mut self, limit: Duration) -> Outcome {
        self.limit = Some(limit);
        self
    }
}

fn valid(d: &Deduction) -> bool {
    check(d).map(|r| r.is_valid()).unwrap_or(false)
}

/// Open assumption formulas, compared structurally.
fn open_set(d: &Deduction) -> BTreeSet<String> {
    d.sequent()
        .formula_set()
        .iter()
        .map(|f| format!("{f:?}"))
        .collect()
}

struct Run {
    seed: u64,
    strategy: Strategy,
    input: Deduction,
    result: Result<(Deduction, Trace), String>,
}

fn normalization_runs() -> Vec<Run> {
    let cfg = GenConfig::default();
    let mut runs = Vec::new();
    for seed in 0..SEEDS {
        let input = gen_deduction(&cfg.with_seed(seed));
        for strategy in [Strategy::Official, Strategy::Simultaneous] {
            let result = normalize(&input, strategy, None).map_err(|e| e.to_string());
            runs.push(Run {
                seed,
                strategy,
                input: input.clone(),
                result,
            });
        }
    }
    runs
}

fn tag(run: &Run, msg: impl std::fmt::Display) -> String {
    format!("seed {} ({}): {msg}", run.seed, run.strategy)
}

fn figures() -> Outcome {
    let mut out = Outcome::new(format!("{} figure pairs", common::FIGURES.len()))
        .within(Duration::from_secs(1));
    out.failures = common::FIGURES
        .iter()
        .filter_map(|s| common::figure_step(s).err())
        .collect();
    out
}

fn termination(runs: &[Run]) -> Outcome {
    let mut out = Outcome::new(format!("{} runs", runs.len())).within(Duration::from_secs(10));
    let mut steps = 0;
    for run in runs {
        match &run.result {
            Err(e) => out.failures.push(tag(run, e)),
            Ok((d, trace)) => {
                steps += trace.steps.len();
                if !trace.is_strictly_decreasing() {
                    out.failures
                        .push(tag(run, "rank did not strictly decrease"));
                }
                if !is_normal(d) {
                    out.failures.push(tag(run, "output not normal"));
                }
                if !valid(d) {
                    out.failures.push(tag(run, "output invalid"));
                }
            }
        }
    }
    out.note = format!("{} runs, {steps} steps", runs.len());
    out
}

fn outputs(runs: &[Run]) -> impl Iterator<Item = (&Run, &Deduction)> {
    runs.iter()
        .filter_map(|r| r.result.as_ref().ok().map(|(d, _)| (r, d)))
}

fn theorem2(runs: &[Run]) -> Outcome {
    let mut out = Outcome::new("major premises of eliminations are assumptions");
    for (run, d) in outputs(runs) {
        let report = check_theorem2(d);
        if !report.passed() {
            out.failures
                .push(tag(run, format!("{:?}", report.offending)));
        }
    }
    out
}

fn subformula(runs: &[Run]) -> Outcome {
    let mut out = Outcome::new("subformula property on normal outputs");
    for (run, d) in outputs(runs) {
        let report = check_subformula_property(d);
        if !report.passed() {
            out.failures
                .push(tag(run, format!("{:?}", report.offending)));
        }
    }
    out
}

fn preservation(runs: &[Run]) -> Outcome {
    let mut out = Outcome::new("conclusion kept, open assumptions shrink");
    for (run, d) in outputs(runs) {
        if d.conclusion() != run.input.conclusion() {
            out.failures.push(tag(run, "conclusion changed"));
        }
        if !open_set(d).is_subset(&open_set(&run.input)) {
            out.failures.push(tag(run, "new open assumption"));
        }
    }
    out
}

fn consistency(runs: &[Run]) -> Outcome {
    let mut out = Outcome::new("");
    let mut closed = 0;
    for (run, d) in outputs(runs) {
        if d.sequent().is_closed() {
            closed += 1;
            if !d.tag().is_intro() {
                out.failures
                    .push(tag(run, format!("closed normal form ends in {}", d.tag())));
            }
        }
    }
    let cfg = GenConfig::default();
    for seed in 0..SWEEP {
        let d = gen_deduction(&cfg.with_seed(seed));
        if d.sequent().is_closed() && *d.conclusion() == Formula::Bottom {
            out.failures
                .push(format!("seed {seed}: closed deduction of falsum"));
        }
    }
    for name in common::BOGUS_FALSUM {
        let d = common::load(&format!("{name}.ndi"));
        if valid(&d) && d.sequent().is_closed() {
            out.failures
                .push(format!("{name}: accepted as a closed proof of falsum"));
        }
    }
    out.note = format!(
        "{closed} closed normal outputs, {SWEEP}-seed sweep, {} falsum fixtures",
        common::BOGUS_FALSUM.len()
    );
    out
}

fn extraction() -> Outcome {
    let mut out = Outcome::new(format!(
        "{EXTRACTIONS} disjunctions, {EXTRACTIONS} existentials"
    ));
    let cfg = GenConfig::default();
    for seed in 0..EXTRACTIONS {
        let (d, side) = closed_disjunction(&cfg.with_seed(seed));
        let Formula::Or(a, b) = d.conclusion().clone() else {
            out.failures.push(format!(
                "disjunction seed {seed}: constructed proof does not conclude a disjunction"
            ));
            continue;
        };
        match extract_disjunct(&d) {
            Err(e) => out.failures.push(format!("disjunction seed {seed}: {e}")),
            Ok((got, proof)) => {
                let want = if got == Side::Left { &*a } else { &*b };
                if got != side {
                    out.failures.push(format!(
                        "disjunction seed {seed}: extracted {got:?}, built {side:?}"
                    ));
                }
                if proof.conclusion() != want
                    || !proof.sequent().is_closed()
                    || !is_normal(&proof)
                    || !valid(&proof)
                {
                    out.failures.push(format!(
                        "disjunction seed {seed}: bad proof\n{}",
                        print_deduction(&proof)
                    ));
                }
            }
        }
    }
    for seed in 0..EXTRACTIONS {
        let (d, witness) = closed_existential(&cfg.with_seed(seed));
        match extract_witness(&d) {
            Err(e) => out.failures.push(format!("existential seed {seed}: {e}")),
            Ok((t, proof)) => {
                let want = d.conclusion().instantiate(&t);
                if t != witness {
                    out.failures.push(format!(
                        "existential seed {seed}: witness {t:?}, built with {witness:?}"
                    ));
                }
                if Some(proof.conclusion()) != want.as_ref()
                    || !proof.sequent().is_closed()
                    || !is_normal(&proof)
                    || !valid(&proof)
                {
                    out.failures.push(format!(
                        "existential seed {seed}: bad proof\n{}",
                        print_deduction(&proof)
                    ));
                }
            }
        }
    }
    out
}

fn unique_discharge() -> Outcome {
    let mut out = Outcome::new(format!("{SAMPLES} samples"));
    let cfg = GenConfig::default();
    for seed in 0..SAMPLES {
        let d = gen_deduction(&cfg.with_seed(seed));
        let u = unique_discharge_transform(&d);
        if !valid(&u) {
            out.failures.push(format!("seed {seed}: output invalid"));
        }
        if u.conclusion() != d.conclusion() || open_set(&u) != open_set(&d) {
            out.failures.push(format!("seed {seed}: sequent changed"));
        }
        let mut bad = false;
        u.visit(&mut |_, n| {
            if let (true, Some(p)) = (n.tag().is_intro(), n.tag().major_discharge()) {
                bad |= n.discharged_leaves(p).len() != 1;
            }
        });
        if bad {
            out.failures.push(format!(
                "seed {seed}: an introduction discharges other than one major assumption"
            ));
        }
    }
    out
}

fn atomization() -> Outcome {
    let mut out = Outcome::new(format!("{SAMPLES} samples"));
    let cfg = GenConfig {
        nonatomic_falsum: true,
        ..GenConfig::default()
    };
    let mut expanded = 0;
    for seed in 0..SAMPLES {
        let d = gen_deduction(&cfg.with_seed(seed));
        let a = atomize_falsum(&d);
        if a != d {
            expanded += 1;
        }
        let mut bad = false;
        a.visit(&mut |_, n| bad |= n.tag() == RuleTag::BotE && !n.conclusion().is_atomic());
        if bad {
            out.failures.push(format!(
                "seed {seed}: non-atomic falsum elimination remains"
            ));
        }
        if a.conclusion() != d.conclusion() || !open_set(&a).is_subset(&open_set(&d)) {
            out.failures.push(format!("seed {seed}: sequent changed"));
        }
        if !valid(&a) {
            out.failures.push(format!("seed {seed}: output invalid"));
        }
    }
    out.note = format!("{SAMPLES} samples, {expanded} expanded");
    out
}

/// Breadth-first search over every applicable reduction for a normal form.
fn reaches_normal_form(d: &Deduction) -> Result<usize, String> {
    let (start, _) = preprocess(d);
    let mut seen = BTreeSet::from([print_deduction(&start)]);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some((cur, depth)) = queue.pop_front() {
        if is_normal(&cur) {
            return if cur.conclusion() == d.conclusion() {
                Ok(depth)
            } else {
                Err("conclusion changed".into())
            };
        }
        if depth >= ORACLE_DEPTH {
            continue;
        }
        for site in redexes(&cur) {
            for strategy in [Strategy::Official, Strategy::Simultaneous] {
                if let Ok((next, _)) = apply_site(&cur, &site, strategy) {
                    if seen.len() < ORACLE_STATES && seen.insert(print_deduction(&next)) {
                        queue.push_back((next, depth + 1));
                    }
                }
            }
        }
    }
    Err(format!("no normal form within depth {ORACLE_DEPTH}"))
}

fn oracle() -> Outcome {
    let all = enumerate(&GenConfig::small(ORACLE_NODES), ORACLE_TAPES);
    let mut out = Outcome::new("").within(Duration::from_secs(60));
    let mut deepest = 0;
    let mut with_redex = 0;
    for d in &all {
        if !is_normal(d) {
            with_redex += 1;
        }
        match reaches_normal_form(d) {
            Ok(depth) => deepest = deepest.max(depth),
            Err(e) => out.failures.push(format!("{e}\n{}", print_deduction(d))),
        }
    }
    out.note = format!(
        "{} deductions, {with_redex} with redexes, deepest {deepest} steps",
        all.len()
    );
    out
}

fn main() -> ExitCode {
    let start = Instant::now();
    let runs = normalization_runs();
    let run_time = start.elapsed();
    type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);
    let mut criteria: Vec<Criterion> = vec![
        ("figure regression", Box::new(figures)),
        ("normalization", Box::new(|| termination(&runs))),
        (
            "elimination majors are assumptions",
            Box::new(|| theorem2(&runs)),
        ),
        ("subformula property", Box::new(|| subformula(&runs))),
        (
            "conclusion and assumption preservation",
            Box::new(|| preservation(&runs)),
        ),
        (
            "proofs end in introductions, consistency",
            Box::new(|| consistency(&runs)),
        ),
        ("disjunction and existence properties", Box::new(extraction)),
        ("unique discharge", Box::new(unique_discharge)),
        ("falsum elimination atomization", Box::new(atomization)),
        ("small-instance oracle", Box::new(oracle)),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.drain(..).enumerate() {
        let t = Instant::now();
        let mut outcome = run();
        let mut elapsed = t.elapsed();
        if n == 1 {
            elapsed += run_time;
        }
        if let Some(limit) = outcome.limit.filter(|l| elapsed > *l) {
            outcome
                .failures
                .push(format!("took {elapsed:.2?}, limit {limit:.0?}"));
        }
        let verdict = if outcome.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "criterion {:>2}: {verdict}  {name} ({}; {elapsed:.2?})",
            n + 1,
            outcome.note
        );
        for f in outcome.failures.iter().take(5) {
            println!("    {f}");
        }
        if !outcome.failures.is_empty() {
            failed += 1;
            if outcome.failures.len() > 5 {
                println!("    ... {} more", outcome.failures.len() - 5);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
