//! A planted bug in permutation must be found by a seed sweep and shrunk to
//! a small witness.

mod common;

use gennd_core::analysis::{maximal_segments, RedexKind};
use gennd_core::deduction::{check, Deduction};
use gennd_core::generator::{gen_deduction, shrink, GenConfig};
use gennd_core::normalize::{candidates, preprocess};
use gennd_core::reduction::permute;

/// Permutes like the engine, but leaves the second arbitrary premise of the
/// feeding rule untouched.
fn broken_permute(d: &Deduction) -> Option<Deduction> {
    let site = candidates(d)
        .into_iter()
        .find(|s| s.kind == RedexKind::MaximalSegment)?;
    let r = d.get(site.last())?;
    let arbitrary = r.tag().arbitrary_children();
    let out = permute(d, &site).ok()?;
    if arbitrary.len() < 2 {
        return Some(out);
    }
    let second = site.elim.child(arbitrary[1]);
    out.replace_at(&second, r.premises()[arbitrary[1]].clone())
        .ok()
}

fn fails(d: &Deduction) -> bool {
    let (pre, _) = preprocess(d);
    match broken_permute(&pre) {
        Some(out) => !check(&out).map(|r| r.is_valid()).unwrap_or(false),
        None => false,
    }
}

#[test]
fn planted_permutation_bug_is_caught_and_shrunk() {
    let core = common::load("permute_or_elim_core.ndi");
    assert!(check(&core).unwrap().is_valid());
    assert_eq!(maximal_segments(&core).len(), 2);
    assert!(fails(&core));

    let cfg = GenConfig::default();
    let found = (0..5000u64)
        .map(|s| gen_deduction(&cfg.with_seed(s)))
        .find(fails);
    let found = found.expect("sweep finds the planted bug");
    let small = shrink(&found, fails);
    assert!(fails(&small));
    assert!(check(&small).unwrap().is_valid());
    assert!(
        small.size() <= core.size(),
        "shrunk to {} nodes, core has {}",
        small.size(),
        core.size()
    );
}
