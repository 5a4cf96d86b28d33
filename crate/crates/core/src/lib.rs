pub mod audit;
pub mod geometry;
pub mod geodesic;
pub mod harness;
pub mod ledger;
pub mod modewave;
