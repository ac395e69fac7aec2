//! Exponent predictions, region diagrams and the experiments that test them.

pub mod config;
pub mod exponents;
pub mod families;
pub mod record;
pub mod regions;
pub mod suites;

pub use config::{QuadratureOverrides, RunConfig, Suite};
pub use exponents::*;
pub use record::ResultRecord;
pub use regions::{classify_region, region_exponent, Diagram, Region, RegionClass, RegionPoint};
pub use suites::run_suite;
