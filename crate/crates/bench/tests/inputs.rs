use gennd_bench::{corpus, segment_fixture};
use gennd_core::analysis::maximal_segments;
use gennd_core::deduction::check;
use gennd_core::normalize::{normalize, Strategy};

#[test]
fn corpus_is_valid_and_normalizes() {
    let ds = corpus(25);
    assert_eq!(ds.len(), 64);
    for d in &ds {
        assert!(check(d).unwrap().is_valid());
        for s in Strategy::ALL {
            assert!(normalize(d, s, None).is_ok());
        }
    }
}

#[test]
fn segment_fixture_has_two_segments() {
    let d = segment_fixture();
    assert!(check(&d).unwrap().is_valid());
    assert_eq!(maximal_segments(&d).len(), 2);
}
