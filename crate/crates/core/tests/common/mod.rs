#![allow(dead_code)]

use std::path::PathBuf;

use gennd_core::analysis::rank;
use gennd_core::deduction::{check, relabel_fresh, Deduction};
use gennd_core::normalize::{preprocess, step, Strategy};
use gennd_core::textio::{parse_deduction, print_deduction};

/// Left/right figure pairs, by file stem.
pub const FIGURES: [&str; 11] = [
    "detour_and",
    "detour_imp",
    "detour_or",
    "permute_or_intro",
    "permute_imp_intro",
    "permute_and_elim",
    "permute_bot_and_intro",
    "permute_bot_or_elim",
    "detour_exists",
    "detour_forall",
    "detour_eq",
];

pub const BOGUS_FALSUM: [&str; 5] = [
    "bogus_open",
    "bogus_imp",
    "bogus_label",
    "bogus_eigen",
    "bogus_vacuous",
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load(name: &str) -> Deduction {
    let path = fixture_path(name);
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_deduction(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn canonical(d: &Deduction) -> String {
    print_deduction(&relabel_fresh(d))
}

/// Checks one figure pair; `Err` carries a human-readable mismatch.
pub fn figure_step(stem: &str) -> Result<(), String> {
    let left = load(&format!("{stem}.left.ndi"));
    let right = load(&format!("{stem}.right.ndi"));
    for (side, d) in [("left", &left), ("right", &right)] {
        let report = check(d).map_err(|e| format!("{stem} {side}: {e}"))?;
        if !report.is_valid() {
            return Err(format!("{stem} {side}: {:?}", report.violations));
        }
    }
    let (pre, log) = preprocess(&left);
    if !log.is_empty() {
        return Err(format!(
            "{stem}: preprocessing changed the left figure: {log:?}"
        ));
    }
    let (out, _) = step(&pre, Strategy::Official, rank(&pre))
        .map_err(|e| format!("{stem}: {e}"))?
        .ok_or_else(|| format!("{stem}: left figure is already normal"))?;
    let (got, want) = (canonical(&out), canonical(&right));
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "{stem}: step result differs\n--- got\n{got}\n--- want\n{want}"
        ))
    }
}
