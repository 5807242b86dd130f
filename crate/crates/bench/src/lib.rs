//! Inputs shared by the benchmarks in `benches/`.

use gennd_core::deduction::Deduction;
use gennd_core::generator::{gen_deduction, GenConfig};
use gennd_core::textio::parse_deduction;

/// A conjunction elimination below a disjunction elimination.
pub const SEGMENT_FIXTURE: &str = r#"
(andE
  (orE (as 1 "p | q")
    (impE (as 8 "p -> r & s") (as 4 "p") (as 2 "r & s") :dis 2)
    (impE (as 9 "q -> r & s") (as 5 "q") (as 3 "r & s") :dis 3)
    :dis 4 5)
  (as 6 "r")
  :dis 6 7)
"#;

pub fn segment_fixture() -> Deduction {
    parse_deduction(SEGMENT_FIXTURE).expect("fixture parses")
}

/// 64 generated deductions of at most `max_nodes` nodes.
pub fn corpus(max_nodes: usize) -> Vec<Deduction> {
    let cfg = GenConfig {
        max_nodes,
        ..GenConfig::default()
    };
    (0..64).map(|s| gen_deduction(&cfg.with_seed(s))).collect()
}
