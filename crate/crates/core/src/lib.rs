//! Natural deduction with general elimination and general introduction rules.

pub mod analysis;
pub mod deduction;
pub mod formula;
pub mod fuzz;
pub mod generator;
pub mod normalize;
pub mod reduction;
pub mod textio;
