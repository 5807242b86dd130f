mod common;

use common::{figure_step, FIGURES};

#[test]
fn every_figure_pair_reduces_in_one_step() {
    let failures: Vec<String> = FIGURES
        .iter()
        .filter_map(|s| figure_step(s).err())
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn bogus_proofs_of_falsum_are_rejected_or_open() {
    use gennd_core::deduction::check;
    for name in common::BOGUS_FALSUM {
        let d = common::load(&format!("{name}.ndi"));
        assert_eq!(
            d.conclusion(),
            &gennd_core::formula::Formula::Bottom,
            "{name}"
        );
        let valid = check(&d).map(|r| r.is_valid()).unwrap_or(false);
        assert!(
            !valid || !d.sequent().is_closed(),
            "{name} is a closed valid proof of falsum"
        );
    }
}

#[test]
fn auxiliary_fixtures_parse_and_check() {
    use gennd_core::deduction::check;
    for name in ["normal", "mf", "closed_disjunction", "closed_existential"] {
        let d = common::load(&format!("{name}.ndi"));
        assert!(check(&d).unwrap().is_valid(), "{name}");
    }
    let eigen = common::load("eigen_violation.ndi");
    assert!(!check(&eigen).unwrap().is_valid());
}

#[test]
fn literal_strategy_stalls_where_the_engine_does_not() {
    use gennd_core::deduction::check;
    use gennd_core::fuzz::literal_rank_witnesses;
    use gennd_core::normalize::{normalize, Strategy};
    let d = common::load("literal_stall.ndi");
    assert!(check(&d).unwrap().is_valid());
    assert!(!literal_rank_witnesses(&d).is_empty());
    for s in Strategy::ALL {
        let (_, trace) = normalize(&d, s, None).unwrap();
        assert!(trace.is_strictly_decreasing(), "{s}: {trace}");
    }
}
